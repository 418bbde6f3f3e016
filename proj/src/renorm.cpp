#include "circlebreak/renorm.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace circlebreak {

namespace {

// One-sided branch of f' inside the fundamental segments: the f-side segment
// I_0^{n-1} sits left of the break for even n, the g-side segment I_0^n right.
Side f_side(int n) { return n % 2 == 0 ? Side::left : Side::right; }
Side g_side(int n) { return n % 2 == 0 ? Side::right : Side::left; }

// f' at orbit point j, with the requested branch at the break (j == 0).
Real orbit_d1(const DynamicalPartition& part, std::size_t j, Side at_break)
{
	return part.map().d1(part.xi(j), j == 0 ? at_break : Side::right);
}

Real domain_slack()
{
	return pow2(8 - static_cast<long>(PrecisionContext::current_bits()));
}

} // namespace

RenormCoeffs coefficients(const DynamicalPartition& part)
{
	const int n = part.level();
	const long long qn = part.q(n), qn1 = part.q(n - 1);
	RenormCoeffs k;
	k.n = n;
	k.qn = qn;
	k.qn1 = qn1;

	Real d_prev = part.delta(n - 1);
	k.a = part.delta(n) / -d_prev;
	k.b = part.delta_s() / d_prev;
	k.b_interval =
	    (part.length_old(0) - part.length_new(static_cast<std::size_t>(qn1))) /
	    part.length_old(0);

	const Real& c = part.map().break_size();
	k.c = n % 2 == 0 ? c : 1 / c;

	// m: telescoped antiderivative int f''/(2f') = log f'/2 over the I_i^{n-1};
	// the parity sign and the interval orientation cancel, leaving the same
	// expression for both parities.
	Real log_m = 0;
	for (long long i = 0; i < qn; ++i)
		log_m += log(orbit_d1(part, static_cast<std::size_t>(i), f_side(n))) -
		         log(orbit_d1(part, static_cast<std::size_t>(i + qn1), f_side(n)));
	k.m = exp(log_m / 2);

	Real log_mt = 0;
	for (long long i = 0; i < qn; ++i) {
		Real fi = orbit_d1(part, static_cast<std::size_t>(i), f_side(n));
		Real fa = orbit_d1(part, static_cast<std::size_t>(i + qn1), f_side(n));
		log_mt += (fi - fa) / (2 * fi);
	}
	k.m_tilde = exp(log_mt);

	Real log_mh = 0;
	for (long long j = 0; j < qn1; ++j) {
		Real fu = orbit_d1(part, static_cast<std::size_t>(j + qn), g_side(n));
		Real fl = orbit_d1(part, static_cast<std::size_t>(j), g_side(n));
		log_mh += (fu - fl) / (2 * fu);
	}
	k.m_hat = exp(log_mh);

	k.m_formal = !part.map().has_d2();
	return k;
}

// ---------------------------------------------------------------------------
// RenormPair

RenormPair::RenormPair(const DynamicalPartition& part) : part_(part)
{
	scale_ = -part.delta(part.level() - 1); // xi_0 - xi_{q_{n-1}}
	a_ = part.delta(part.level()) / scale_;
}

RenormPair RenormPair::build(const DynamicalPartition& part)
{
	return RenormPair(part);
}

bool RenormPair::has_d2() const
{
	return part_.map().has_d2();
}

void RenormPair::check_f(const Real& z) const
{
	Real s = domain_slack();
	if (!(z >= -1 - s && z <= s))
		throw numeric_domain_error("renorm pair: f argument outside [-1, 0]");
}

void RenormPair::check_g(const Real& z) const
{
	Real s = domain_slack();
	if (!(z >= -s && z <= a_ + s))
		throw numeric_domain_error("renorm pair: g argument outside [0, a_n]");
}

RenormPair::Jet RenormPair::walk(const Real& z, long long steps, long long p,
                                 Side break_side, int order) const
{
	const BreakMap& map = part_.map();
	Real y = z * scale_;
	Real prod = 1, sum = 0;
	for (long long i = 0; i < steps; ++i) {
		if (order >= 1) {
			Real w = wrap_unit(y);
			Side sd = w == 0 ? break_side : Side::right;
			Real d1 = map.d1(w, sd);
			if (order >= 2)
				sum += map.d2(w, sd) / d1 * prod; // (log K')' chain rule
			prod *= d1;
		}
		y = map.lift(y);
	}
	Jet out;
	out.v = (y - p) / scale_;
	out.d1 = prod;
	out.d2 = scale_ * prod * sum; // K'' rescaled: f_n'' = scale * (f^q)''
	return out;
}

RenormPair::Jet RenormPair::f_jet(const Real& z, int order) const
{
	check_f(z);
	int n = part_.level();
	return walk(z, part_.q(n), part_.p(n), f_side(n), order);
}

RenormPair::Jet RenormPair::g_jet(const Real& z, int order) const
{
	check_g(z);
	int n = part_.level();
	return walk(z, part_.q(n - 1), part_.p(n - 1), g_side(n), order);
}

Real RenormPair::f(const Real& z) const { return f_jet(z, 0).v; }
Real RenormPair::f_d1(const Real& z) const { return f_jet(z, 1).d1; }
Real RenormPair::f_d2(const Real& z) const { return f_jet(z, 2).d2; }
Real RenormPair::g(const Real& z) const { return g_jet(z, 0).v; }
Real RenormPair::g_d1(const Real& z) const { return g_jet(z, 1).d1; }
Real RenormPair::g_d2(const Real& z) const { return g_jet(z, 2).d2; }

// ---------------------------------------------------------------------------
// MoebiusMap

MoebiusMap::MoebiusMap(const Real& A, const Real& B, const Real& C, const Real& D,
                       const Real& lo, const Real& hi, std::string name)
    : A_(A), B_(B), C_(C), D_(D), lo_(lo), hi_(hi), name_(std::move(name))
{
	if (B_ * C_ - A_ * D_ == 0)
		throw degeneracy_error(name_ + ": zero determinant (constant map)");
	if (D_ != 0) {
		Real pole = -C_ / D_;
		if (pole >= lo_ && pole <= hi_)
			throw degeneracy_error(name_ + ": pole at z = " + pole.str(10) +
			                       " inside [" + lo_.str(10) + ", " + hi_.str(10) +
			                       "] (denominator coefficients " + C_.str(10) +
			                       ", " + D_.str(10) + ")");
	}
}

void MoebiusMap::check(const Real& z) const
{
	Real s = domain_slack() * (1 + abs(hi_ - lo_));
	if (!(z >= lo_ - s && z <= hi_ + s))
		throw numeric_domain_error(name_ + ": argument outside [" + lo_.str(10) +
		                           ", " + hi_.str(10) + "]");
}

Real MoebiusMap::operator()(const Real& z) const
{
	check(z);
	return (A_ + B_ * z) / (C_ + D_ * z);
}

Real MoebiusMap::d1(const Real& z) const
{
	check(z);
	Real den = C_ + D_ * z;
	return (B_ * C_ - A_ * D_) / (den * den);
}

Real MoebiusMap::d2(const Real& z) const
{
	check(z);
	Real den = C_ + D_ * z;
	return -2 * D_ * (B_ * C_ - A_ * D_) / (den * den * den);
}

MoebiusApproximants moebius_approximants(const RenormCoeffs& k)
{
	Real zero(0), neg1(-1);
	return MoebiusApproximants{
	    MoebiusMap(k.a, k.a + k.b * k.m, Real(1), 1 - k.m, neg1, zero, "F"),
	    MoebiusMap(-k.a * k.c, k.c - k.b * k.m, k.a * k.c, k.m - k.c, zero, k.a, "G"),
	    MoebiusMap(k.a, k.a + k.b * k.m_tilde, Real(1), 1 - k.m_tilde, neg1, zero,
	               "F_tilde"),
	    MoebiusMap(-k.a * k.m_hat, k.m_hat - k.b, k.a * k.m_hat, 1 - k.m_hat, zero,
	               k.a, "G_hat"),
	};
}

MoebiusMap canonical_moebius(const Real& T)
{
	if (!(T > 0))
		throw numeric_domain_error("canonical_moebius: T must be > 0");
	return MoebiusMap(Real(0), T, Real(1), T - 1, Real(0), Real(1), "M_T");
}

// ---------------------------------------------------------------------------
// Upsilon

Upsilon::Upsilon(const DynamicalPartition& part, UpsilonVariant variant,
                 const Real& multiplier)
    : map_(part.map())
{
	if (!(multiplier > 0))
		throw numeric_domain_error("upsilon: multiplier must be > 0");
	const int n = part.level();
	if (variant == UpsilonVariant::tilde) {
		steps_ = part.q(n);
		seg_a_ = part.delta(n - 1); // xi_{q_{n-1}}
		seg_b_ = 0;                 // xi_0
		// K at the segment endpoints, straight from the stored orbit
		ka_ = part.lift_point(static_cast<std::size_t>(part.q(n) + part.q(n - 1))) -
		      part.p(n - 1);
		kb_ = part.lift_point(static_cast<std::size_t>(part.q(n)));
		break_side_ = f_side(n);
	} else {
		steps_ = part.q(n - 1);
		seg_a_ = 0;            // xi_0
		seg_b_ = part.delta(n); // xi_{q_n}
		ka_ = part.lift_point(static_cast<std::size_t>(part.q(n - 1)));
		kb_ = part.lift_point(static_cast<std::size_t>(part.q(n) + part.q(n - 1))) -
		      part.p(n);
		break_side_ = g_side(n);
	}
	log_mult_ = log(multiplier);
	has_d2_ = map_.has_d2();
}

void Upsilon::iterate(const Real& x, Real* val, Real* d1, Real* d2) const
{
	Real y = x;
	Real prod = 1, sum = 0;
	for (long long i = 0; i < steps_; ++i) {
		if (d1 || d2) {
			Real w = wrap_unit(y);
			Side sd = w == 0 ? break_side_ : Side::right;
			Real der = map_.d1(w, sd);
			if (d2)
				sum += map_.d2(w, sd) / der * prod;
			prod *= der;
		}
		y = map_.lift(y);
	}
	if (val)
		*val = y;
	if (d1)
		*d1 = prod;
	if (d2)
		*d2 = prod * sum;
}

Jet2 Upsilon::interior(const Real& z0) const
{
	Real x = seg_b_ + z0 * (seg_a_ - seg_b_);
	Real kx, k1, k2;
	iterate(x, &kx, &k1, has_d2_ ? &k2 : nullptr);

	Real ra = (kx - ka_) / (x - seg_a_);
	Real rb = (kb_ - kx) / (seg_b_ - x);
	Real ra1 = (k1 - ra) / (x - seg_a_);
	Real rb1 = (rb - k1) / (seg_b_ - x);

	Jet2 out;
	out.v = log(ra) - log(rb) + log_mult_;
	Real dx = seg_a_ - seg_b_;
	out.d1 = (ra1 / ra - rb1 / rb) * dx;
	if (has_d2_) {
		Real ra2 = (k2 - 2 * ra1) / (x - seg_a_);
		Real rb2 = (2 * rb1 - k2) / (seg_b_ - x);
		out.d2 = ((ra2 / ra - ra1 * ra1 / (ra * ra)) -
		          (rb2 / rb - rb1 * rb1 / (rb * rb))) *
		         dx * dx;
		out.has_d2 = true;
	}
	return out;
}

Jet2 Upsilon::operator()(const Real& z0) const
{
	if (!(z0 >= 0 && z0 <= 1))
		throw numeric_domain_error("upsilon: z0 must lie in [0, 1]");
	if (z0 > 0 && z0 < 1)
		return interior(z0);

	// Endpoint: one segment collapses; its ratio tends to K' and its slope to
	// K''/2 (one-sided at the break).  Limits needing K''' are taken a small
	// step inside instead.
	Real h = pow2(-static_cast<long>(PrecisionContext::current_bits()) / 3);
	Jet2 inner = interior(z0 == 0 ? h : 1 - h);
	Real dx = seg_a_ - seg_b_;
	Jet2 out;
	out.has_d2 = has_d2_;
	if (has_d2_)
		out.d2 = inner.d2;
	if (z0 == 0) {
		Real kx, k1, k2;
		iterate(seg_b_, &kx, &k1, has_d2_ ? &k2 : nullptr);
		Real ra = (kx - ka_) / (seg_b_ - seg_a_);
		Real ra1 = (k1 - ra) / (seg_b_ - seg_a_);
		out.v = log(ra) - log(k1) + log_mult_;
		out.d1 = has_d2_ ? (ra1 / ra - (k2 / 2) / k1) * dx : inner.d1;
	} else {
		Real kx, k1, k2;
		iterate(seg_a_, &kx, &k1, has_d2_ ? &k2 : nullptr);
		Real rb = (kb_ - kx) / (seg_b_ - seg_a_);
		Real rb1 = (rb - k1) / (seg_b_ - seg_a_);
		out.v = log(k1) - log(rb) + log_mult_;
		out.d1 = has_d2_ ? ((k2 / 2) / k1 - rb1 / rb) * dx : inner.d1;
	}
	return out;
}

UpsilonEval upsilon(const DynamicalPartition& part, UpsilonVariant variant,
                    const Real& multiplier, std::span<const Real> z0_grid)
{
	Upsilon u(part, variant, multiplier);
	UpsilonEval ev;
	ev.max_abs_v = 0;
	ev.max_abs_weighted_d1 = 0;
	for (const Real& z0 : z0_grid) {
		Jet2 j = u(z0);
		ev.z0.push_back(z0);
		ev.v.push_back(j.v);
		ev.d1.push_back(j.d1);
		if (j.has_d2)
			ev.d2.push_back(j.d2);
		ev.max_abs_v = std::max(ev.max_abs_v, Real(abs(j.v)));
		ev.max_abs_weighted_d1 =
		    std::max(ev.max_abs_weighted_d1, Real(abs(z0 * (1 - z0) * j.d1)));
	}
	return ev;
}

Jet2 relative_coordinate_formula(const Real& m, const Jet2& ups, const Real& z0)
{
	Real E = exp(ups.v);
	Real den = (1 - z0) * E + z0 * m;
	Real w = z0 * (1 - z0);
	Real n1 = 1 - w * ups.d1;
	Jet2 out;
	out.v = z0 * m / den;
	out.d1 = n1 * m * E / (den * den);
	if (ups.has_d2) {
		// quotient rule on d1; the denominator derivative is m - E + (1-z0) E U'
		out.d2 = m * E *
		             (ups.d1 * (2 * z0 - w * ups.d1) - w * ups.d2) / (den * den) -
		         2 * m * E * n1 * (m - E + (1 - z0) * E * ups.d1) /
		             (den * den * den);
		out.has_d2 = true;
	}
	return out;
}

// ---------------------------------------------------------------------------
// distance

namespace {

template <class PairEval, class MoebEval>
Real grid_sup(PairEval&& pf, MoebEval&& pm, const Real& lo, const Real& hi, int order,
              int N, Real& argmax)
{
	Real best = -1;
	for (int i = 0; i < N; ++i) {
		Real z = i == N - 1 ? hi : lo + (hi - lo) * i / (N - 1);
		Real s = pf(z, order, pm);
		if (s > best) {
			best = s;
			argmax = z;
		}
	}
	return best;
}

} // namespace

NormReport distance(const RenormPair& pair, const MoebiusMap& F, const MoebiusMap& G,
                    int order, int grid_size)
{
	if (order < 0 || order > 2)
		throw numeric_domain_error("distance: order must be 0, 1 or 2");
	if (order == 2 && !pair.has_d2())
		throw capability_error("distance: order 2 needs a family with f''");
	if (grid_size < 3)
		throw numeric_domain_error("distance: grid must have at least 3 points");

	auto eval_f = [&](const Real& z, int ord, const MoebiusMap& M) {
		RenormPair::Jet j = pair.f_jet(z, ord);
		Real s = abs(j.v - M(z));
		if (ord >= 1)
			s += abs(j.d1 - M.d1(z));
		if (ord >= 2)
			s += abs(j.d2 - M.d2(z));
		return s;
	};
	auto eval_g = [&](const Real& z, int ord, const MoebiusMap& M) {
		RenormPair::Jet j = pair.g_jet(z, ord);
		Real s = abs(j.v - M(z));
		if (ord >= 1)
			s += abs(j.d1 - M.d1(z));
		if (ord >= 2)
			s += abs(j.d2 - M.d2(z));
		return s;
	};

	NormReport rep;
	rep.order = order;
	int N = grid_size;
	Real prev_f = -1, prev_g = -1;
	for (;;) {
		rep.f_norm = grid_sup(eval_f, F, Real(-1), Real(0), order, N, rep.f_argmax);
		rep.g_norm = grid_sup(eval_g, G, Real(0), pair.a(), order, N, rep.g_argmax);
		rep.grid = N;
		bool f_ok = prev_f >= 0 && 100 * abs(rep.f_norm - prev_f) <=
		                               std::max(rep.f_norm, pow2(-10000));
		bool g_ok = prev_g >= 0 && 100 * abs(rep.g_norm - prev_g) <=
		                               std::max(rep.g_norm, pow2(-10000));
		if ((f_ok && g_ok) || N >= 8 * grid_size)
			break;
		prev_f = rep.f_norm;
		prev_g = rep.g_norm;
		N = 2 * N - 1; // keep the endpoints and reuse the dyadic structure
	}
	return rep;
}

CoefficientResidual coefficient_residual(const RenormCoeffs& k)
{
	CoefficientResidual out;
	out.r = k.a + k.b * k.m - k.c;
	out.r_over_a = out.r / k.a;
	return out;
}

MultiplierReport multiplier_consistency(const DynamicalPartition& part)
{
	if (!part.map().has_d2())
		throw capability_error(
		    "multiplier_consistency: needs a family with f'' (zygmund gamma > 1)");
	const int n = part.level();
	const long long qn = part.q(n), qn1 = part.q(n - 1);
	RenormCoeffs k = coefficients(part);

	// exp of the signed sum over the I_j^n of int f''/(2f'), telescoped
	Real log_m2 = 0;
	for (long long j = 0; j < qn1; ++j)
		log_m2 += log(orbit_d1(part, static_cast<std::size_t>(j + qn), g_side(n))) -
		          log(orbit_d1(part, static_cast<std::size_t>(j), g_side(n)));
	Real m2 = exp(log_m2 / 2);

	MultiplierReport rep;
	rep.m_tilde_gap = abs(k.m_tilde - k.m);
	rep.m_hat_gap = abs(k.m_hat - k.c / k.m);
	rep.product_residual = abs(k.m * m2 - k.c);
	return rep;
}

IdentityReport representation_identities(const DynamicalPartition& part,
                                         const DynamicalPartition* next, int grid)
{
	if (grid < 3)
		throw numeric_domain_error(
		    "representation_identities: grid must have at least 3 points");
	RenormCoeffs k = coefficients(part);
	RenormPair pair = RenormPair::build(part);
	Upsilon ut(part, UpsilonVariant::tilde, k.m_tilde);
	Upsilon uh(part, UpsilonVariant::hat, k.m_hat);
	MoebiusMap mt = canonical_moebius(k.m_tilde);
	MoebiusApproximants ap = moebius_approximants(k);

	IdentityReport rep;
	rep.f_identity = rep.g_identity = rep.ftilde_identity = 0;
	for (int i = 0; i < grid; ++i) {
		Real zf = -1 + Real(i) / (grid - 1); // [-1, 0]
		Real z0 = -zf;
		Real zq = relative_coordinate_formula(k.m_tilde, ut(z0), z0).v;
		rep.f_identity = std::max(
		    rep.f_identity, Real(abs(pair.f(zf) - (k.a - (k.a + k.b) * zq))));
		rep.ftilde_identity =
		    std::max(rep.ftilde_identity,
		             Real(abs(ap.F_tilde(zf) - (k.a - (k.a + k.b) * mt(z0)))));

		Real zg = k.a * i / (grid - 1); // [0, a_n]
		Real zb = 1 - zg / k.a;
		Real zh = relative_coordinate_formula(k.m_hat, uh(zb), zb).v;
		rep.g_identity = std::max(
		    rep.g_identity, Real(abs(pair.g(zg) - (-k.b - (1 - k.b) * zh))));
	}

	if (next) {
		if (next->level() != part.level() + 1)
			throw validation_error(
			    "representation_identities: second partition must be one level up");
		RenormPair pn = RenormPair::build(*next);
		rep.cross_value = 0;
		for (int i = 0; i < grid; ++i) {
			Real z = pn.a() * i / (grid - 1);
			rep.cross_value =
			    std::max(rep.cross_value,
			             Real(abs(pn.g(z) + pair.f(-k.a * z) / k.a)));
		}
		rep.cross_deriv = abs(pn.g_d1(Real(0)) - pair.f_d1(Real(0)));
		rep.has_cross = true;
	}
	return rep;
}

void write_renorm_csv_header(std::ostream& os)
{
	os << "n,q_n,a_n,b_n,c_n,m_n,m_tilde_n,m_hat_n,d_n,"
	      "C0_f,C1_f,C2_f,C0_g,C1_g,C2_g,r_n,r_n_over_a_n\n";
}

void write_renorm_csv_row(std::ostream& os, const DynamicalPartition& part)
{
	RenormCoeffs k = coefficients(part);
	RenormPair pair = RenormPair::build(part);
	MoebiusApproximants ap = moebius_approximants(k);
	Real dn = d_norm(part.map(), part);
	NormReport c0 = distance(pair, ap.F, ap.G, 0);
	NormReport c1 = distance(pair, ap.F, ap.G, 1);
	std::string c2f, c2g;
	if (pair.has_d2()) {
		NormReport c2 = distance(pair, ap.F, ap.G, 2);
		c2f = c2.f_norm.str();
		c2g = c2.g_norm.str();
	}
	CoefficientResidual r = coefficient_residual(k);
	os << k.n << "," << k.qn << "," << k.a.str() << "," << k.b.str() << ","
	   << k.c.str() << "," << k.m.str() << "," << k.m_tilde.str() << ","
	   << k.m_hat.str() << "," << dn.str() << "," << c0.f_norm.str() << ","
	   << c1.f_norm.str() << "," << c2f << "," << c0.g_norm.str() << ","
	   << c1.g_norm.str() << "," << c2g << "," << r.r.str() << ","
	   << r.r_over_a.str() << "\n";
}

} // namespace circlebreak
