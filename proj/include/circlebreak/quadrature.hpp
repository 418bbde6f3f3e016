#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "circlebreak/numerics.hpp"

namespace circlebreak {

// Gauss-Legendre rule on [-1,1]; nodes/weights generated at the current
// precision and cached per (order, precision).
struct GaussRule {
	std::vector<Real> nodes;
	std::vector<Real> weights;
};

const GaussRule& gauss_rule(unsigned order);

// Adaptive Gauss quadrature of f over [a,b] to absolute tolerance tol.
// Throws precision_error if the recursion fails to converge.
Real integrate(const std::function<Real(const Real&)>& f, const Real& a, const Real& b,
               const Real& tol, unsigned order = 24, unsigned max_depth = 96);

// Piecewise Chebyshev interpolant of a function on [lo,hi] with an exact
// antiderivative of the interpolant.  Panels are bisected adaptively until the
// trailing Chebyshev coefficients fall below tol (or the panel is narrower
// than min_width, in which case the panel is accepted as-is).
class PiecewiseCheb {
public:
	static PiecewiseCheb build(const std::function<Real(const Real&)>& f,
	                           const Real& lo, const Real& hi,
	                           std::vector<Real> breakpoints,
	                           const Real& tol, unsigned degree,
	                           const Real& min_width);

	Real eval(const Real& x) const;     // interpolated f(x)
	Real integral(const Real& x) const; // integral of f from lo to x
	Real total_integral() const { return total_; }
	std::size_t panel_count() const { return panels_.size(); }
	const Real& lo() const { return lo_; }
	const Real& hi() const { return hi_; }

private:
	struct Panel {
		Real a, b;
		std::vector<Real> coef;  // Chebyshev coefficients of f on the panel
		std::vector<Real> acoef; // coefficients of the antiderivative (value 0 at a)
		Real cum;                // integral of f from lo to a
	};

	std::size_t locate(const Real& x) const;

	Real lo_, hi_, total_;
	std::vector<Panel> panels_;
};

} // namespace circlebreak
