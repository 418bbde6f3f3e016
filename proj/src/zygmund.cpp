#include "circlebreak/zygmund.hpp"

#include <algorithm>

#include "circlebreak/quadrature.hpp"

namespace circlebreak {

Real zygmund_gauge(const Real& gamma, const Real& x)
{
	if (!(gamma > 0))
		throw numeric_domain_error("zygmund_gauge: gamma must be > 0");
	if (!(x >= 0 && x < 1))
		throw numeric_domain_error("zygmund_gauge: x must lie in [0,1)");
	if (x == 0)
		return Real(0);
	return pow(-log(x), -gamma);
}

Real zygmund_modulus(const Real& gamma, const Real& delta)
{
	if (!(gamma > 0))
		throw numeric_domain_error("zygmund_modulus: gamma must be > 0");
	if (!(delta > 0 && delta < 1))
		throw numeric_domain_error("zygmund_modulus: delta must lie in (0,1)");
	if (gamma < 1)
		return delta * pow(-log(delta), 1 - gamma);
	if (gamma == 1) {
		if (!(delta < exp(Real(-1))))
			throw numeric_domain_error(
			    "zygmund_modulus: gamma = 1 requires delta < 1/e");
		return delta * log(-log(delta));
	}
	return delta;
}

PSum zygmund_p(const Real& gamma, const Real& x, long terms)
{
	if (!(gamma > 1))
		throw numeric_domain_error("zygmund_p: series requires gamma > 1");
	if (!(x > 0 && x < 1))
		throw numeric_domain_error("zygmund_p: x must lie in (0,1)");
	if (terms < 1)
		throw numeric_domain_error("zygmund_p: need at least one term");
	const Real L = -log(x);
	const Real log2 = log(Real(2));
	PSum out{Real(0), Real(0), terms};
	// term n is (n log 2 + L)^(-gamma); sum smallest-first for accuracy
	for (long n = terms; n >= 1; --n)
		out.partial += pow(n * log2 + L, -gamma);
	// integral comparison: sum_{n>N} (n log2 + L)^{-gamma} <= int_N^inf ...
	out.tail_bound = pow(terms * log2 + L, 1 - gamma) / ((gamma - 1) * log2);
	return out;
}

Real zygmund_p_terms_for(const Real& gamma, const Real& x, const Real& tol)
{
	if (!(gamma > 1))
		throw numeric_domain_error("zygmund_p_terms_for: requires gamma > 1");
	if (!(x > 0 && x < 1) || !(tol > 0))
		throw numeric_domain_error("zygmund_p_terms_for: bad arguments");
	const Real L = -log(x);
	const Real log2 = log(Real(2));
	Real n = (pow(tol * (gamma - 1) * log2, 1 / (1 - gamma)) - L) / log2;
	return n < 1 ? Real(1) : ceil(n);
}

Real zygmund_t(const Real& gamma, const Real& s, const Real& t)
{
	if (!(s >= 0 && s <= Real(1) / 2))
		throw numeric_domain_error("zygmund_t: s must lie in [0,1/2]");
	if (!(t > 0 && t < 1))
		throw numeric_domain_error("zygmund_t: t must lie in (0,1)");
	if (s == 0)
		return Real(0);
	const Real tol = pow2(-static_cast<long>(PrecisionContext::current_bits()) / 2);
	Real outer = integrate(
	    [&](const Real& x) { return zygmund_gauge(gamma, x * t) / x; }, s, Real(1), tol,
	    24, 220);
	// The gauge has unbounded derivatives at 0, so cut the lower endpoint at a
	// point whose omitted mass is below tol (the integrand is increasing).
	Real cut = std::min(Real(s / 2), tol / (2 * std::max(zygmund_gauge(gamma, s * t), Real(1))));
	Real inner = integrate([&](const Real& x) { return zygmund_gauge(gamma, x * t); },
	                       cut, s, tol, 24, 220);
	return s * outer + inner;
}

Delta2 second_symmetric_difference(const BreakMap& map, const Real& xi, const Real& tau)
{
	if (!(tau > 0 && tau <= Real(1) / 2))
		throw numeric_domain_error(
		    "second_symmetric_difference: tau must lie in (0,1/2]");
	Real w = wrap_unit(xi);
	// inclusive at both ends: a probe point landing exactly on the break sees
	// only one one-sided value, so the triple is still unusable
	bool straddle = w <= tau || w >= 1 - tau;
	Delta2 out;
	out.straddles_break = straddle;
	out.value = map.d1(w + tau) + map.d1(w - tau) - 2 * map.d1(w);
	return out;
}

Real class_ratio(const BreakMap& map, const Real& gamma, std::span<const Real> taus,
                 std::span<const Real> xis)
{
	Real sup = 0;
	for (const Real& tau : taus) {
		Real denom = tau * zygmund_gauge(gamma, tau);
		for (const Real& xi : xis) {
			Delta2 d = second_symmetric_difference(map, xi, tau);
			if (d.straddles_break)
				continue;
			sup = std::max(sup, Real(abs(d.value) / denom));
		}
	}
	return sup;
}

std::vector<Real> dyadic_taus(int k_min, int k_max)
{
	if (k_min < 1 || k_max < k_min)
		throw numeric_domain_error("dyadic_taus: need 1 <= k_min <= k_max");
	std::vector<Real> out;
	for (int k = k_min; k <= k_max; ++k)
		out.push_back(pow2(-k));
	return out;
}

std::vector<Real> standard_xi_grid(const BreakMap& map, int base_count)
{
	std::vector<Real> grid;
	for (int i = 0; i < base_count; ++i)
		grid.push_back((Real(i) + Real(1) / 2) / base_count);
	auto refine_at = [&](const Real& center) {
		for (int j = 2; j <= 60; ++j) {
			Real h = pow2(-j);
			grid.push_back(wrap_unit(center + h));
			grid.push_back(wrap_unit(center - h));
		}
	};
	refine_at(Real(0));
	if (map.family() == Family::zygmund) {
		refine_at(map.x_star());
		grid.push_back(map.x_star());
	}
	std::sort(grid.begin(), grid.end());
	grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
	return grid;
}

} // namespace circlebreak
