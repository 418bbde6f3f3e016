#pragma once

#include <span>
#include <vector>

#include "circlebreak/maps.hpp"
#include "circlebreak/numerics.hpp"

namespace circlebreak {

// Z_gamma(x) = (log 1/x)^(-gamma) for x in (0,1), Z_gamma(0) = 0.
Real zygmund_gauge(const Real& gamma, const Real& x);

// Modulus of continuity Omega(delta, gamma):
//   gamma < 1 : delta (log 1/delta)^(1-gamma)
//   gamma = 1 : delta log log (1/delta), requires delta < 1/e
//   gamma > 1 : delta
Real zygmund_modulus(const Real& gamma, const Real& delta);

// Partial sum of P_gamma(x) = sum_{n>=1} Z_gamma(x 2^{-n}) with a certified
// tail bound (integral comparison; only valid for gamma > 1).
struct PSum {
	Real partial;
	Real tail_bound;
	long terms;
	Real upper() const { return partial + tail_bound; }
};
PSum zygmund_p(const Real& gamma, const Real& x, long terms);

// Terms needed so the certified tail bound drops below tol (may be huge for
// gamma near 1; the caller should cap it).
Real zygmund_p_terms_for(const Real& gamma, const Real& x, const Real& tol);

// T_gamma(s,t) = s int_s^1 Z_gamma(x t)/x dx + int_0^s Z_gamma(x t) dx,
// s in [0,1/2], t in (0,1); adaptive quadrature at the context precision.
Real zygmund_t(const Real& gamma, const Real& s, const Real& t);

// f'(xi+tau) + f'(xi-tau) - 2 f'(xi) with periodic extension of f'.  Flagged
// when the three points straddle the break (f' lives on the circle minus the
// break, so such probes are excluded from sup estimates).
struct Delta2 {
	Real value;
	bool straddles_break;
};
Delta2 second_symmetric_difference(const BreakMap& map, const Real& xi, const Real& tau);

// Empirical class constant: sup over the grids of |Delta^2 f'(xi,tau)| /
// (tau Z_gamma(tau)), skipping break-straddling probes.
Real class_ratio(const BreakMap& map, const Real& gamma, std::span<const Real> taus,
                 std::span<const Real> xis);

// tau = 2^{-k} for k = k_min..k_max.
std::vector<Real> dyadic_taus(int k_min, int k_max);

// Uniform xi grid with dyadic refinement toward the break and, when the map
// has one, toward its interior singular point.
std::vector<Real> standard_xi_grid(const BreakMap& map, int base_count = 2048);

} // namespace circlebreak
