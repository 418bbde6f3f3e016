#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "circlebreak/partition.hpp"

namespace circlebreak {

// Coefficients attached to level n of the renormalization scheme.
//   a = (xi_{q_n} - xi_0)/(xi_0 - xi_{q_{n-1}})
//   b = -(xi_{q_n+q_{n-1}} - xi_0)/(xi_0 - xi_{q_{n-1}})
//   b_interval: the same quantity from interval lengths,
//               (|I_0^{n-1}| - |I_{q_{n-1}}^n|)/|I_0^{n-1}| (cross-check)
//   c = (break size)^(+-1), sign alternating with the level parity
//   m = exp(sum over the I_i^{n-1} of the exact antiderivative
//           int f''/(2f') = (log f'(upper) - log f'(lower))/2), signed by parity
//   m_tilde, m_hat: the endpoint-difference multipliers
//       m_tilde = exp(sum_i (f'(xi_i) - f'(xi_{i+q_{n-1}}))/(2 f'(xi_i)))
//       m_hat   = exp(sum_j (f'(xi_{j+q_n}) - f'(xi_j))/(2 f'(xi_{j+q_n})))
// m needs only f' (the antiderivative is log f'/2), so it is computed for
// every family; m_formal marks maps whose f'' does not exist everywhere, for
// which m is a formal quantity rather than an integral.
struct RenormCoeffs {
	int n = 0;
	long long qn = 0, qn1 = 0;
	Real a, b, b_interval, c, m, m_tilde, m_hat;
	bool m_formal = false;
};

RenormCoeffs coefficients(const DynamicalPartition& part);

// The renormalized pair (f_n, g_n): the return maps f^{q_n}, f^{q_{n-1}} on
// the neighborhood I_0^n U I_0^{n-1} of the break, in the affine coordinate z
// with z(xi_0) = 0 and z(xi_{q_{n-1}}) = -1.  Domains: f on [-1, 0], g on
// [0, a_n].  First derivatives are exact chain products of f' along the
// orbit; second derivatives use the chain-rule sum and need f''.
// At z = 0 (the break) the f-side uses the derivative limit from inside
// I_0^{n-1} and the g-side the limit from inside I_0^n.
class RenormPair {
public:
	static RenormPair build(const DynamicalPartition& part);

	int level() const { return part_.level(); }
	const Real& a() const { return a_; }
	bool has_d2() const;

	Real f(const Real& z) const;
	Real f_d1(const Real& z) const;
	Real f_d2(const Real& z) const;
	Real g(const Real& z) const;
	Real g_d1(const Real& z) const;
	Real g_d2(const Real& z) const;

	// value and derivatives up to `order` in one orbit walk
	struct Jet {
		Real v, d1, d2;
	};
	Jet f_jet(const Real& z, int order) const;
	Jet g_jet(const Real& z, int order) const;

private:
	explicit RenormPair(const DynamicalPartition& part);

	Jet walk(const Real& z, long long steps, long long p, Side break_side,
	         int order) const;
	void check_f(const Real& z) const;
	void check_g(const Real& z) const;

	DynamicalPartition part_;
	Real scale_; // xi_0 - xi_{q_{n-1}} as a lift displacement = -delta(n-1)
	Real a_;
};

// Fractional-linear map (A + B z)/(C + D z) restricted to [lo, hi].
// Construction fails with degeneracy_error if the pole -C/D lies inside the
// domain or the map is constant.
class MoebiusMap {
public:
	MoebiusMap(const Real& A, const Real& B, const Real& C, const Real& D,
	           const Real& lo, const Real& hi, std::string name);

	const Real& lo() const { return lo_; }
	const Real& hi() const { return hi_; }
	const std::string& name() const { return name_; }

	Real operator()(const Real& z) const;
	Real d1(const Real& z) const;
	Real d2(const Real& z) const;

private:
	void check(const Real& z) const;

	Real A_, B_, C_, D_;
	Real lo_, hi_;
	std::string name_;
};

// The four fractional-linear approximants of (f_n, g_n):
//   F(z)       = (a + (a + b m) z)/(1 + (1 - m) z)          on [-1, 0]
//   G(z)       = (-a c + (c - b m) z)/(a c + (m - c) z)     on [0, a]
//   F_tilde(z) = F with m replaced by m_tilde               on [-1, 0]
//   G_hat(z)   = (-a mh + (mh - b) z)/(a mh + (1 - mh) z)   on [0, a]
struct MoebiusApproximants {
	MoebiusMap F, G, F_tilde, G_hat;
};

MoebiusApproximants moebius_approximants(const RenormCoeffs& k);

// M_T(z) = z T/(1 + z(T - 1)) on [0,1]; M_T(0) = 0, M_T(1) = 1, M_T'(0) = T.
MoebiusMap canonical_moebius(const Real& T);

// Value and first two derivatives of a scalar function at one point.
struct Jet2 {
	Real v, d1, d2;
	bool has_d2 = false;
};

enum class UpsilonVariant { tilde, hat };

// The distortion-ratio defect
//   tilde: U(z0) = log R([xi_{q_{n-1}}, x]; f^{q_n})
//                - log R([x, xi_0]; f^{q_n}) + log(multiplier),
//          x = relative coordinate z0 on I_0^{n-1}
//   hat:   the same with f^{q_{n-1}} on I_0^n and segments [xi_0, y], [y, xi_{q_n}]
// where R(I; K) = |K(I)|/|I|.  Derivatives in z0 are analytic, via
// R_a' = (K'(x) - R_a)/(x - a) and R_b' = (R_b - K'(x))/(b - x) and their
// derivatives; second derivatives need f''.  At z0 in {0, 1} the value and
// (when f'' exists) the first derivative are one-sided limits; quantities
// whose endpoint limit would need a third derivative are evaluated a tiny
// step inside the domain instead.
class Upsilon {
public:
	Upsilon(const DynamicalPartition& part, UpsilonVariant variant,
	        const Real& multiplier);

	const Real& multiplier() const { return log_mult_; }
	Jet2 operator()(const Real& z0) const;

private:
	Jet2 interior(const Real& z0) const;
	// K(x) = lift^steps(x), K'(x), K''(x) by chain rule; `at_break` selects the
	// one-sided branch when the initial point is the break.
	void iterate(const Real& x, Real* val, Real* d1, Real* d2) const;

	BreakMap map_ = BreakMap::rotation(Real(0));
	long long steps_ = 0;
	Real seg_a_, seg_b_; // lift endpoints; z0 = 0 at x = b, z0 = 1 at x = a
	Real ka_, kb_;       // K(seg_a), K(seg_b) from the stored orbit
	Side break_side_ = Side::right;
	Real log_mult_;
	bool has_d2_ = false;
};

// Grid evaluation of Upsilon with running maxima of |U| and |z0(1-z0) U'|.
struct UpsilonEval {
	std::vector<Real> z0, v, d1;
	std::vector<Real> d2; // empty when f'' is unavailable
	Real max_abs_v, max_abs_weighted_d1;
};

UpsilonEval upsilon(const DynamicalPartition& part, UpsilonVariant variant,
                    const Real& multiplier, std::span<const Real> z0_grid);

// z_{q_n}(z0) = z0 m / ((1 - z0) exp(U(z0)) + z0 m) with its two derivatives;
// `ups` carries U and its z0-derivatives at the same point.  With U == 0 this
// reduces to the canonical map M_m.
Jet2 relative_coordinate_formula(const Real& m, const Jet2& ups, const Real& z0);

// C^k distance between the pair and a pair of fractional-linear approximants:
// sup over a grid of sum_{j<=k} |f^(j) - F^(j)| on [-1,0], likewise for
// (g, G) on [0, a].  The grid starts at grid_size points (endpoints included)
// and doubles until the sup changes by less than 1%.
struct NormReport {
	int order = 0;
	Real f_norm, g_norm;
	Real f_argmax, g_argmax;
	int grid = 0; // final grid size
};

NormReport distance(const RenormPair& pair, const MoebiusMap& F, const MoebiusMap& G,
                    int order, int grid_size = 257);

// r_n = a_n + b_n m_n - c_n and r_n / a_n.
struct CoefficientResidual {
	Real r, r_over_a;
};

CoefficientResidual coefficient_residual(const RenormCoeffs& k);

// |m_tilde - m|, |m_hat - c/m|, and the exact product identity
// m * exp(signed sum over the I_j^n of int f''/(2f')) = c, evaluated with the
// log f'/2 antiderivative.  Needs a family with f''.
struct MultiplierReport {
	Real m_tilde_gap, m_hat_gap, product_residual;
};

MultiplierReport multiplier_consistency(const DynamicalPartition& part);

// Grid residuals of the structural identities
//   f_n(z) = a - (a + b) z_{q_n}(-z)
//   g_n(z) = -b - (1 - b) zhat_{q_{n-1}}(1 - z/a)
//   F_tilde(z) = a - (a + b) M_{m_tilde}(-z)
// and, when the level-(n+1) partition is supplied,
//   g_{n+1}(z) = -(1/a_n) f_n(-a_n z) and g_{n+1}'(0) = f_n'(0).
struct IdentityReport {
	Real f_identity, g_identity, ftilde_identity;
	Real cross_value, cross_deriv;
	bool has_cross = false;
};

IdentityReport representation_identities(const DynamicalPartition& part,
                                         const DynamicalPartition* next = nullptr,
                                         int grid = 65);

// Per-level summary row.  Columns:
// n,q_n,a_n,b_n,c_n,m_n,m_tilde_n,m_hat_n,d_n,C0_f,C1_f,C2_f,C0_g,C1_g,C2_g,
// r_n,r_n_over_a_n -- C2 fields are empty when f'' is unavailable.
void write_renorm_csv_header(std::ostream& os);
void write_renorm_csv_row(std::ostream& os, const DynamicalPartition& part);

} // namespace circlebreak
