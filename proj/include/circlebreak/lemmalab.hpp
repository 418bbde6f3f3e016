#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "circlebreak/maps.hpp"
#include "circlebreak/zygmund.hpp"

namespace circlebreak {

// A monotone C^1 (optionally C^2) function on an interval, as evaluators.
// Used so the distortion verifiers run both on break-map lifts and on
// closed-form polynomial oracles in tests.
struct Curve {
	std::function<Real(const Real&)> v;
	std::function<Real(const Real&)> d1;
	std::function<Real(const Real&)> d2; // empty when unavailable
};

// Lift of `map` restricted to [a, b].  The interval must be nondegenerate and
// break-free: no break point (integer lift coordinate) strictly inside.
// Derivatives at an endpoint sitting exactly on the break are the one-sided
// limits from within the interval.
Curve curve_from_map(const BreakMap& map, const Real& a, const Real& b);

// Gauge exponent to use for a map's derivative modulus: the zygmund family
// carries its own, every C^2 family satisfies the class for gamma = 2.
Real effective_gamma(const BreakMap& map);

// |K([a,b])| / |b - a|.
Real ratio_distortion(const Curve& K, const Real& a, const Real& b);
Real ratio_distortion(const BreakMap& map, const Real& a, const Real& b);

// First-order distortion comparison on I = [a, b]:
//   lhs  = R([a,x])/R([x,b]) - 1
//   main = (K'(a) - K'(b)) / (2 K'(b))
//   bound = |I| Z_gamma(|I|) + |K'(a) - K'(b)| Omega(|I|, gamma)
//   ratio = |lhs - main| / bound
struct Lemma26 {
	Real lhs, main_term, bound, ratio;
};

Lemma26 distortion_comparison(const Curve& K, const Real& gamma, const Real& a,
                              const Real& b, const Real& x);
Lemma26 distortion_comparison(const BreakMap& map, const Real& a, const Real& b,
                              const Real& x);

// Convexity-type defect at x in [a, b], z = (b - x)/(b - a):
//   defect        = (x-a)(b-x) |R_b'(x) - R_a'(x)| / (b-a)
//   bound         = |I| Z_gamma(|I|)          (small-interval cap)
//   interp_defect = |z K'(a) + (1-z) K'(b) - K'(x)|
//   t_bound       = |I| T_gamma(min(z, 1-z), |I|)  (branch at z = 1/2)
// R_a'(x) = (K'(x) - R_a(x))/(x - a), R_b'(x) = (R_b(x) - K'(x))/(b - x).
struct ConvexityDefect {
	Real defect, bound, interp_defect, t_bound;
};

ConvexityDefect convexity_defect(const Curve& K, const Real& gamma, const Real& a,
                                 const Real& b, const Real& x);
ConvexityDefect convexity_defect(const BreakMap& map, const Real& a, const Real& b,
                                 const Real& x);

// Derivative-gap bounds for gamma > 1 (K'' required):
//   gap          = |R_b'(x) - R_a'(x)|            vs  p_bound = P_gamma(|I|)
//   second_probe = (x-a)(b-x) |R_a''(x) - R_b''(x)| vs second_bound = |I| P_gamma(|I|)
// with R_a'' = (K'' - 2 R_a')/(x - a) and R_b'' = (2 R_b' - K'')/(b - x).
// P_gamma is evaluated as a certified partial sum (a slight underestimate, so
// the reported ratios are conservative).
struct DerivativeGap {
	Real gap, p_bound, second_probe, second_bound;
};

DerivativeGap derivative_gap(const Curve& K, const Real& gamma, const Real& a,
                             const Real& b, const Real& x);
DerivativeGap derivative_gap(const BreakMap& map, const Real& a, const Real& b,
                             const Real& x);

// Interior probe offsets t, x = a + t (b - a).
std::vector<Real> standard_probes();

// Dyadic sweep of the verifiers on intervals [center, center + 2^-k],
// k = k_min..k_max, at the standard probes.  Emits one row per (lemma, k, t);
// the derivative-gap rows are skipped when f'' is unavailable.
struct LemmaRow {
	std::string lemma_id;
	Real interval_length, probe_t, quantity, bound, ratio;
};

std::vector<LemmaRow> lemma_sweep(const BreakMap& map, const Real& center, int k_min,
                                  int k_max);

// columns: lemma_id, interval_length, probe_t, quantity, bound, ratio
void write_lemma_csv(std::ostream& os, std::span<const LemmaRow> rows);

} // namespace circlebreak
