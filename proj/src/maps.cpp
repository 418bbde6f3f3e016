#include "circlebreak/maps.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <vector>

#include "circlebreak/quadrature.hpp"

namespace circlebreak {

namespace {

// Moebius derivative profile pieces, s = 1/c - 1.  The parameter is promoted
// to the working precision so subexpressions like 1 + s do not cap accuracy
// at whatever precision the map was constructed under.
Real profile_moebius(const Real& s0, const Real& x)
{
	Real s = at_working_precision(s0);
	return (1 + s) / pow(1 + s * x, 2);
}
Real profile_moebius_d1(const Real& s0, const Real& x)
{
	Real s = at_working_precision(s0);
	return -2 * s * (1 + s) / pow(1 + s * x, 3);
}
// Antiderivative of profile_moebius with value 0 at x = 0 (and 1 at x = 1).
Real profile_moebius_int(const Real& s0, const Real& x)
{
	Real s = at_working_precision(s0);
	return x * (1 + s) / (1 + s * x);
}

// Smooth-family log-profile perturbation and its derivative.
Real psi(const Real& x) { return sin(8 * atan(Real(1)) * x) * x * (1 - x); }
Real psi_d1(const Real& x)
{
	Real two_pi = 8 * atan(Real(1));
	return two_pi * cos(two_pi * x) * x * (1 - x) + sin(two_pi * x) * (1 - 2 * x);
}

Real bump_radius() { return 1 / (2 * exp(Real(1))); }

// phi_gamma(t) = t (log 1/|t|)^(-gamma) bump(2 e t), bump(u) = exp(-u^2/(1-u^2)).
// Odd in t, C^1 with phi'(0) = 0; support |t| <= 1/(2e).
Real phi(const Real& gamma0, const Real& t)
{
	if (t == 0)
		return Real(0);
	Real gamma = at_working_precision(gamma0);
	Real a = abs(t);
	Real u = a / bump_radius();
	if (u >= 1)
		return Real(0);
	Real L = -log(a);
	Real b = exp(-u * u / (1 - u * u));
	Real v = a * pow(L, -gamma) * b;
	return t > 0 ? v : -v;
}

// phi' is even in t: phi'(t) = bump * L^(-gamma) * (1 + gamma/L - 2u^2/(1-u^2)^2).
Real phi_d1(const Real& gamma0, const Real& t)
{
	if (t == 0)
		return Real(0);
	Real gamma = at_working_precision(gamma0);
	Real a = abs(t);
	Real u = a / bump_radius();
	if (u >= 1)
		return Real(0);
	Real L = -log(a);
	Real u2 = u * u;
	Real b = exp(-u2 / (1 - u2));
	return b * pow(L, -gamma) * (1 + gamma / L - 2 * u2 / pow(1 - u2, 2));
}

std::map<std::string, Real> parse_params(const std::string& body)
{
	std::map<std::string, Real> out;
	std::stringstream ss(body);
	std::string item;
	while (std::getline(ss, item, ',')) {
		auto eq = item.find('=');
		if (eq == std::string::npos || eq == 0)
			throw validation_error("preset: expected key=value, got '" + item + "'");
		try {
			out[item.substr(0, eq)] = Real(item.substr(eq + 1));
		} catch (const std::exception&) {
			throw validation_error("preset: bad numeric value in '" + item + "'");
		}
	}
	return out;
}

std::string real_str(const Real& x)
{
	return x.str(20);
}

} // namespace

struct BreakMap::Impl {
	Family family = Family::rotation;
	Real c = 1, s = 0, beta = 0, eps = 0, gamma = 0, xstar = 0;

	// Precision-dependent data, built lazily and shared between copies.
	struct Table {
		std::optional<PiecewiseCheb> left, right;
		bool gapped = false;
		Real x0, x1;      // gap straddling x_star (zygmund only)
		Real gap_total;   // integral of the profile over the gap
		Real total;       // integral of the profile over [0,1]
	};
	struct Cache {
		std::mutex mu;
		std::map<unsigned, std::shared_ptr<const Table>> tables;
		std::map<unsigned, Real> nu;
	};
	std::shared_ptr<Cache> cache = std::make_shared<Cache>();

	// Derivative profile D (the non-normalized f') and d/dx log D, closed form.
	Real profile(const Real& x) const
	{
		Real base = profile_moebius(s, x);
		Real e = at_working_precision(eps);
		switch (family) {
		case Family::moebius: return base;
		case Family::smooth: return base * exp(e * psi(x));
		case Family::zygmund: return base * exp(e * phi(gamma, x - at_working_precision(xstar)));
		case Family::rotation: return Real(1);
		}
		return base;
	}
	Real profile_log_d1(const Real& x) const
	{
		Real base = profile_moebius_d1(s, x) / profile_moebius(s, x);
		Real e = at_working_precision(eps);
		switch (family) {
		case Family::moebius: return base;
		case Family::smooth: return base + e * psi_d1(x);
		case Family::zygmund: return base + e * phi_d1(gamma, x - at_working_precision(xstar));
		case Family::rotation: return Real(0);
		}
		return base;
	}

	bool needs_table() const { return family == Family::smooth || family == Family::zygmund; }

	std::shared_ptr<const Table> table() const
	{
		unsigned bits = PrecisionContext::current_bits();
		std::lock_guard<std::mutex> lock(cache->mu);
		auto it = cache->tables.find(bits);
		if (it != cache->tables.end())
			return it->second;
		auto t = std::make_shared<Table>(build_table(bits));
		cache->tables.emplace(bits, t);
		return t;
	}

	Table build_table(unsigned bits) const
	{
		// Coefficients must be computed above the target accuracy, otherwise
		// the adaptive tail test chases arithmetic noise and never converges.
		PrecisionContext guard(bits + 48);
		Table t;
		Real tol = pow2(-static_cast<long>(bits) - 24);
		unsigned deg = std::max(48u, static_cast<unsigned>((bits + 48) / 2.4));
		auto f = [this](const Real& x) { return profile(x); };
		if (family == Family::zygmund) {
			Real delta = pow2(-static_cast<long>((bits + 48) / 2));
			t.gapped = true;
			t.x0 = at_working_precision(xstar) - delta;
			t.x1 = at_working_precision(xstar) + delta;
			Real r = bump_radius();
			t.left = PiecewiseCheb::build(f, Real(0), t.x0, {xstar - r}, tol, deg, delta);
			t.right = PiecewiseCheb::build(f, t.x1, Real(1), {xstar + r}, tol, deg, delta);
			// Across the gap the perturbation phi is odd and O(delta), so the
			// exact Moebius antiderivative is accurate to o(tol) there.
			t.gap_total = profile_moebius_int(s, t.x1) - profile_moebius_int(s, t.x0);
			t.total = t.left->total_integral() + t.gap_total + t.right->total_integral();
		} else {
			t.left = PiecewiseCheb::build(f, Real(0), Real(1), {}, tol, deg, pow2(-64));
			t.total = t.left->total_integral();
		}
		return t;
	}

	// Integral of the profile from 0 to x, x in [0,1].
	Real profile_int(const Real& x, const Table& t) const
	{
		if (!t.gapped || x <= t.x0)
			return t.left->integral(x);
		if (x >= t.x1)
			return t.left->total_integral() + t.gap_total + t.right->integral(x);
		return t.left->total_integral() +
		       profile_moebius_int(s, x) - profile_moebius_int(s, t.x0);
	}

	Real compute_nu(unsigned bits) const
	{
		switch (family) {
		case Family::rotation:
			return Real(0);
		case Family::moebius:
			return 2 * abs(log(1 + at_working_precision(s))) +
			       2 * abs(log(at_working_precision(c)));
		default:
			break;
		}
		Real jump = 2 * abs(log(at_working_precision(c)));
		if (family == Family::zygmund) {
			// (log f')' is unbounded at the singular point (and absent for
			// gamma <= 1), so adaptive quadrature of |(log f')'| cannot
			// converge there.  The integral equals the total variation of
			// log f', measured on a grid refined toward the singular point.
			std::vector<Real> grid;
			const long base = 8192;
			for (long i = 0; i <= base; ++i)
				grid.push_back(Real(i) / base);
			for (long j = 13; j <= static_cast<long>(bits); ++j) {
				Real h = pow2(-j);
				grid.push_back(xstar - h);
				grid.push_back(xstar + h);
			}
			grid.push_back(xstar);
			std::sort(grid.begin(), grid.end());
			Real tv = 0, prev = log(profile(grid.front()));
			for (std::size_t i = 1; i < grid.size(); ++i) {
				if (grid[i] < 0 || grid[i] > 1 || grid[i] == grid[i - 1])
					continue;
				Real cur = log(profile(grid[i]));
				tv += abs(cur - prev);
				prev = cur;
			}
			return tv + jump;
		}
		auto integrand = [this](const Real& x) { return abs(profile_log_d1(x)); };
		Real tol = pow2(-80);
		return integrate(integrand, Real(0), Real(1), tol, 24, 140) + jump;
	}

	Real nu() const
	{
		unsigned bits = PrecisionContext::current_bits();
		{
			std::lock_guard<std::mutex> lock(cache->mu);
			auto it = cache->nu.find(bits);
			if (it != cache->nu.end())
				return it->second;
		}
		Real v = compute_nu(bits);
		std::lock_guard<std::mutex> lock(cache->mu);
		cache->nu.emplace(bits, v);
		return v;
	}

	void validate_amplitude() const
	{
		// Profile is positive by construction; reject amplitudes that push
		// the log-profile out of a numerically sane range.
		const Real cap = 32;
		for (int i = 0; i <= 512; ++i) {
			Real x = Real(i) / 512;
			Real mod = family == Family::smooth ? psi(x) : phi(gamma, x - xstar);
			if (abs(eps * mod) > cap)
				throw validation_error(
				    "derivative profile ill-conditioned: |eps * perturbation| > 32");
		}
	}
};

BreakMap BreakMap::moebius(const Real& c, const Real& beta)
{
	if (!is_finite(c) || !(c > 0) || c == 1)
		throw validation_error("moebius family requires c > 0, c != 1");
	auto impl = std::make_shared<Impl>();
	impl->family = Family::moebius;
	impl->c = c;
	impl->s = 1 / c - 1;
	impl->beta = beta;
	return BreakMap(impl);
}

BreakMap BreakMap::smooth(const Real& c, const Real& beta, const Real& epsilon)
{
	if (!is_finite(c) || !(c > 0) || c == 1)
		throw validation_error("smooth family requires c > 0, c != 1");
	if (!(epsilon >= 0))
		throw validation_error("smooth family requires eps >= 0");
	auto impl = std::make_shared<Impl>();
	impl->family = Family::smooth;
	impl->c = c;
	impl->s = 1 / c - 1;
	impl->beta = beta;
	impl->eps = epsilon;
	impl->validate_amplitude();
	return BreakMap(impl);
}

BreakMap BreakMap::zygmund(const Real& c, const Real& beta, const Real& epsilon,
                           const Real& gamma, const Real& x_star)
{
	if (!is_finite(c) || !(c > 0) || c == 1)
		throw validation_error("zygmund family requires c > 0, c != 1");
	if (!(epsilon >= 0))
		throw validation_error("zygmund family requires eps >= 0");
	if (!(gamma > 0))
		throw validation_error("zygmund family requires gamma > 0");
	if (!(x_star >= Real("0.1") && x_star <= Real("0.9")))
		throw validation_error("zygmund family requires x_star in [0.1, 0.9]");
	Real r = bump_radius();
	if (!(x_star - r > 0 && x_star + r < 1))
		throw validation_error("zygmund family: bump support must stay inside (0,1)");
	auto impl = std::make_shared<Impl>();
	impl->family = Family::zygmund;
	impl->c = c;
	impl->s = 1 / c - 1;
	impl->beta = beta;
	impl->eps = epsilon;
	impl->gamma = gamma;
	impl->xstar = x_star;
	impl->validate_amplitude();
	return BreakMap(impl);
}

BreakMap BreakMap::rotation(const Real& rho)
{
	if (!is_finite(rho))
		throw validation_error("rotation family requires finite rho");
	auto impl = std::make_shared<Impl>();
	impl->family = Family::rotation;
	impl->beta = rho;
	return BreakMap(impl);
}

BreakMap BreakMap::from_preset(const std::string& id)
{
	auto colon = id.find(':');
	std::string name = id.substr(0, colon);
	auto params = colon == std::string::npos ? std::map<std::string, Real>{}
	                                         : parse_params(id.substr(colon + 1));
	auto get = [&](const std::string& key, const Real& dflt) {
		auto it = params.find(key);
		return it == params.end() ? dflt : it->second;
	};
	auto require = [&](const std::string& key) {
		auto it = params.find(key);
		if (it == params.end())
			throw validation_error("preset '" + name + "' requires parameter " + key);
		return it->second;
	};
	for (const auto& [k, v] : params)
		if (k != "c" && k != "beta" && k != "eps" && k != "gamma" && k != "xstar" &&
		    k != "rho")
			throw validation_error("preset: unknown parameter '" + k + "'");
	if (name == "moebius")
		return moebius(require("c"), get("beta", Real(0)));
	if (name == "smooth")
		return smooth(require("c"), get("beta", Real(0)), get("eps", Real(0)));
	if (name == "zygmund")
		return zygmund(require("c"), get("beta", Real(0)), get("eps", Real(0)),
		               require("gamma"), get("xstar", Real("0.5")));
	if (name == "rotation")
		return rotation(require("rho"));
	throw validation_error("unknown family '" + name + "'");
}

BreakMap BreakMap::with_beta(const Real& beta) const
{
	auto impl = std::make_shared<Impl>(*impl_);
	impl->beta = beta; // tables depend only on the profile, so keep sharing them
	return BreakMap(impl);
}

Family BreakMap::family() const { return impl_->family; }
const Real& BreakMap::break_size() const { return impl_->c; }
const Real& BreakMap::beta() const { return impl_->beta; }
const Real& BreakMap::gamma() const { return impl_->gamma; }
const Real& BreakMap::epsilon() const { return impl_->eps; }
const Real& BreakMap::x_star() const { return impl_->xstar; }

bool BreakMap::has_d2() const
{
	return impl_->family != Family::zygmund || impl_->gamma > 1;
}

std::string BreakMap::id() const
{
	switch (impl_->family) {
	case Family::rotation:
		return "rotation:rho=" + real_str(impl_->beta);
	case Family::moebius:
		return "moebius:c=" + real_str(impl_->c) + ",beta=" + real_str(impl_->beta);
	case Family::smooth:
		return "smooth:c=" + real_str(impl_->c) + ",eps=" + real_str(impl_->eps) +
		       ",beta=" + real_str(impl_->beta);
	case Family::zygmund:
		return "zygmund:c=" + real_str(impl_->c) + ",gamma=" + real_str(impl_->gamma) +
		       ",eps=" + real_str(impl_->eps) + ",xstar=" + real_str(impl_->xstar) +
		       ",beta=" + real_str(impl_->beta);
	}
	return "?";
}

Real BreakMap::lift(const Real& x) const
{
	if (!is_finite(x))
		throw numeric_domain_error("lift: non-finite input");
	const Impl& im = *impl_;
	// The final additions run with guard bits so that adding the integer
	// winding is exact and F(x+k) = F(x) + k holds exactly.
	if (im.family == Family::rotation) {
		PrecisionContext guard(PrecisionContext::current_bits() + 64);
		return at_working_precision(x) + im.beta;
	}
	Real k = floor(x);
	Real r = x - k;
	if (r >= 1) { // guard rounding at integer inputs
		k += 1;
		r -= 1;
	}
	Real frac;
	if (im.family == Family::moebius) {
		frac = profile_moebius_int(im.s, r);
	} else {
		auto t = im.table();
		frac = im.profile_int(r, *t) / t->total;
	}
	PrecisionContext guard(PrecisionContext::current_bits() + 64);
	return (at_working_precision(im.beta) + frac) + k;
}

Real BreakMap::d1(const Real& x, Side side) const
{
	const Impl& im = *impl_;
	if (im.family == Family::rotation)
		return Real(1);
	Real r = wrap_unit(x);
	if (r == 0 && side == Side::left)
		r = 1;
	if (im.family == Family::moebius)
		return profile_moebius(im.s, r);
	return im.profile(r) / im.table()->total;
}

Real BreakMap::d2(const Real& x, Side side) const
{
	const Impl& im = *impl_;
	if (!has_d2())
		throw capability_error("second derivative unavailable for zygmund gamma <= 1");
	if (im.family == Family::rotation)
		return Real(0);
	Real r = wrap_unit(x);
	if (r == 0 && side == Side::left)
		r = 1;
	if (im.family == Family::moebius)
		return profile_moebius_d1(im.s, r);
	return im.profile(r) * im.profile_log_d1(r) / im.table()->total;
}

Real BreakMap::log_derivative_variation() const { return impl_->nu(); }

BreakMap::IterResult BreakMap::iterate(const Real& x, long n) const
{
	if (n < 0)
		throw numeric_domain_error("iterate: n must be >= 0");
	IterResult res{wrap_unit(x), Real(0), false};
	Real y = x;
	for (long i = 0; i < n; ++i) {
		Real r = wrap_unit(y);
		if (r == 0 && i > 0)
			res.hit_break = true; // continue with the right-side derivative
		res.log_d1 += log(d1(r, Side::right));
		y = lift(y);
	}
	res.point = wrap_unit(y);
	return res;
}

} // namespace circlebreak
