#include "circlebreak/partition.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace circlebreak {

namespace {

// lift orbit of x0 with `steps` applications of F
std::vector<Real> lift_orbit(const BreakMap& map, const Real& x0, long long steps)
{
	std::vector<Real> y;
	y.reserve(static_cast<std::size_t>(steps) + 1);
	y.push_back(x0);
	for (long long j = 0; j < steps; ++j)
		y.push_back(map.lift(y.back()));
	return y;
}

} // namespace

DynamicalPartition DynamicalPartition::build(const BreakMap& map, const ContinuedFraction& cf,
                                             int n)
{
	if (n < 1)
		throw validation_error("partition: level must be >= 1");
	if (cf.size() < n)
		throw validation_error("partition: continued fraction has fewer than n quotients");
	DynamicalPartition part;
	part.map_ = map;
	part.cf_ = cf;
	part.n_ = n;
	part.orbit_ = lift_orbit(map, Real(0), cf.q(n) + cf.q(n - 1));
	PartitionReport rep = part.validate();
	if (!rep.ok)
		throw validation_error("partition: " + rep.detail +
		                       " (mistuned parameter or insufficient precision)");
	return part;
}

Real DynamicalPartition::delta(int m) const
{
	return orbit_[static_cast<std::size_t>(cf_.q(m))] - cf_.p(m);
}

Real DynamicalPartition::delta_s() const
{
	return orbit_.back() - (cf_.p(n_) + cf_.p(n_ - 1));
}

std::size_t DynamicalPartition::interval_count() const
{
	return static_cast<std::size_t>(cf_.q(n_) + cf_.q(n_ - 1));
}

Real DynamicalPartition::length_new(std::size_t j) const
{
	long long qn = cf_.q(n_);
	return abs(orbit_[j + static_cast<std::size_t>(qn)] - orbit_[j] - cf_.p(n_));
}

Real DynamicalPartition::length_old(std::size_t i) const
{
	long long qn1 = cf_.q(n_ - 1);
	return abs(orbit_[i + static_cast<std::size_t>(qn1)] - orbit_[i] - cf_.p(n_ - 1));
}

Real DynamicalPartition::left_new(std::size_t j) const
{
	// even n: F^{q_n}(0) - p_n > 0, so xi_j is the left endpoint
	return n_ % 2 == 0 ? xi(j) : xi(j + static_cast<std::size_t>(cf_.q(n_)));
}

Real DynamicalPartition::left_old(std::size_t i) const
{
	return n_ % 2 == 0 ? xi(i + static_cast<std::size_t>(cf_.q(n_ - 1))) : xi(i);
}

PartitionReport DynamicalPartition::validate(const Real& tol) const
{
	PartitionReport rep;
	rep.count = interval_count();
	struct Item {
		Real left, length;
		int family;
		std::size_t index;
	};
	std::vector<Item> items;
	items.reserve(rep.count);
	for (std::size_t j = 0; j < static_cast<std::size_t>(cf_.q(n_ - 1)); ++j)
		items.push_back({left_new(j), length_new(j), n_, j});
	for (std::size_t i = 0; i < static_cast<std::size_t>(cf_.q(n_)); ++i)
		items.push_back({left_old(i), length_old(i), n_ - 1, i});
	std::sort(items.begin(), items.end(),
	          [](const Item& a, const Item& b) { return a.left < b.left; });

	Real total = 0;
	for (const Item& it : items)
		total += it.length;
	rep.coverage_residual = abs(total - 1);
	rep.max_gap = 0;

	for (std::size_t k = 0; k < items.size(); ++k) {
		const Item& cur = items[k];
		Real next_left = k + 1 < items.size() ? items[k + 1].left : items[0].left + 1;
		Real gap = next_left - (cur.left + cur.length);
		if (abs(gap) > abs(rep.max_gap))
			rep.max_gap = gap;
		if (abs(gap) > tol && rep.first_bad_index < 0) {
			rep.first_bad_index = static_cast<long>(k);
			std::ostringstream ss;
			ss << (gap < 0 ? "overlap" : "gap") << " between interval (level "
			   << cur.family << ", index " << cur.index << ") and its neighbor";
			rep.detail = ss.str();
		}
	}
	// A displaced endpoint shifts two adjacent intervals consistently and
	// leaves the tiling intact, so also verify the endpoints form an orbit.
	rep.orbit_residual = 0;
	for (std::size_t j = 0; j + 1 < orbit_.size(); ++j) {
		Real r = abs(map_.lift(orbit_[j]) - orbit_[j + 1]);
		if (r > rep.orbit_residual)
			rep.orbit_residual = r;
		if (r > tol && rep.first_bad_orbit < 0)
			rep.first_bad_orbit = static_cast<long>(j);
	}

	rep.ok = rep.first_bad_index < 0 && rep.first_bad_orbit < 0 &&
	         rep.coverage_residual <= tol;
	if (rep.ok)
		rep.detail = "ok";
	else if (rep.first_bad_orbit >= 0 && rep.detail.empty()) {
		std::ostringstream ss;
		ss << "orbit point " << rep.first_bad_orbit + 1
		   << " is not the image of its predecessor";
		rep.detail = ss.str();
	} else if (rep.detail.empty())
		rep.detail = "coverage residual exceeds tolerance";
	return rep;
}

PartitionReport DynamicalPartition::validate() const
{
	long bits = static_cast<long>(PrecisionContext::current_bits());
	return validate(pow2(-bits + 16 * n_));
}

DynamicalPartition DynamicalPartition::perturbed(std::size_t j, const Real& amount) const
{
	DynamicalPartition part = *this;
	part.orbit_.at(j) += amount;
	return part;
}

void DynamicalPartition::write_csv(std::ostream& os) const
{
	os << "j,xi_j,interval_family,interval_index,length\n";
	for (std::size_t j = 0; j < static_cast<std::size_t>(cf_.q(n_ - 1)); ++j)
		os << j << "," << xi(j).str() << "," << n_ << "," << j << ","
		   << length_new(j).str() << "\n";
	for (std::size_t i = 0; i < static_cast<std::size_t>(cf_.q(n_)); ++i)
		os << i << "," << xi(i).str() << "," << n_ - 1 << "," << i << ","
		   << length_old(i).str() << "\n";
}

Real d_norm(const BreakMap& map, const DynamicalPartition& part, int interior_samples)
{
	if (interior_samples < 0)
		throw numeric_domain_error("d_norm: sample count must be >= 0");
	int n = part.level();
	long long qn = part.q(n), qn1 = part.q(n - 1), pn = part.p(n);
	Real d = 0;
	// orbit points: the lengths of the level-n intervals
	for (std::size_t j = 0; j <= static_cast<std::size_t>(qn1); ++j)
		d = std::max(d, part.length_new(j));
	// Interior samples from the two fundamental segments, pushed forward: the
	// images f^i(x) provide one interior point in every partition interval.
	struct Seg {
		Real end;        // signed lift endpoint, the other endpoint is 0
		long long push;  // number of forward images covering its family
	};
	Seg segs[2] = {{part.delta(n), qn1}, {part.delta(n - 1), qn}};
	for (const Seg& seg : segs) {
		for (int s = 1; s <= interior_samples; ++s) {
			Real x0 = seg.end * s / (interior_samples + 1);
			Real y = x0;
			std::vector<Real> orb;
			orb.reserve(static_cast<std::size_t>(seg.push + qn) + 1);
			orb.push_back(y);
			for (long long i = 0; i < seg.push + qn; ++i) {
				y = map.lift(y);
				orb.push_back(y);
			}
			for (long long i = 0; i < seg.push; ++i)
				d = std::max(d, Real(abs(orb[static_cast<std::size_t>(i + qn)] -
				                         orb[static_cast<std::size_t>(i)] - pn)));
		}
	}
	return d;
}

FinziReport finzi_check(const BreakMap& map, const DynamicalPartition& part)
{
	int n = part.level();
	long long qn = part.q(n), qn1 = part.q(n - 1);
	long long pn1 = part.p(n - 1);
	FinziReport rep;
	rep.nu = map.log_derivative_variation();

	// prefix sums of log f' along the break-point orbit
	std::vector<Real> pre(part.orbit_size());
	pre[0] = 0;
	for (std::size_t j = 0; j + 1 < part.orbit_size(); ++j)
		pre[j + 1] = pre[j] + log(map.d1(part.xi(j), Side::right));
	rep.denjoy_min = rep.denjoy_max = pre[static_cast<std::size_t>(qn)] - pre[0];
	for (std::size_t j = 1; j <= static_cast<std::size_t>(qn1); ++j) {
		Real v = pre[j + static_cast<std::size_t>(qn)] - pre[j];
		rep.denjoy_min = std::min(rep.denjoy_min, v);
		rep.denjoy_max = std::max(rep.denjoy_max, v);
	}

	// orbit of the midpoint of the fundamental segment I_0^{n-1} = [a_0, b_0];
	// endpoints travel along the stored break-point orbit.
	Real a0 = part.delta(n - 1), b0 = 0;
	std::vector<Real> x = {a0 / 2};
	Real logd = 0;
	bool first = true;
	for (long long i = 0; i < qn; ++i) {
		Real ai = part.lift_point(static_cast<std::size_t>(i + qn1)) - pn1;
		Real bi = part.lift_point(static_cast<std::size_t>(i));
		Real xi = x.back();
		Real resc = exp(logd) * (a0 - b0) / (ai - bi);
		Real zi = (xi - ai) / (bi - ai);
		Real z0 = (x[0] - a0) / (b0 - a0);
		Real rel = z0 * (1 - z0) / (zi * (1 - zi));
		if (first) {
			rep.rescaled_min = rep.rescaled_max = resc;
			rep.relcoord_min = rep.relcoord_max = rel;
			first = false;
		} else {
			rep.rescaled_min = std::min(rep.rescaled_min, resc);
			rep.rescaled_max = std::max(rep.rescaled_max, resc);
			rep.relcoord_min = std::min(rep.relcoord_min, rel);
			rep.relcoord_max = std::max(rep.relcoord_max, rel);
		}
		logd += log(map.d1(wrap_unit(xi), Side::right));
		x.push_back(map.lift(xi));
	}

	const Real slack("1e-10");
	Real env = exp(rep.nu) + slack, env2 = exp(2 * rep.nu) + slack;
	rep.ok = abs(rep.denjoy_min) <= rep.nu + slack && abs(rep.denjoy_max) <= rep.nu + slack &&
	         rep.rescaled_max <= env && rep.rescaled_min >= 1 / env &&
	         rep.relcoord_max <= env2 && rep.relcoord_min >= 1 / env2;
	return rep;
}

} // namespace circlebreak
