#pragma once

#include <memory>
#include <string>

#include "circlebreak/numerics.hpp"

namespace circlebreak {

enum class Family { moebius, smooth, zygmund, rotation };

enum class Side { left, right };

// A circle diffeomorphism with a single derivative break at xi0 = 0,
// represented by its lift F with F(x+1) = F(x) + 1.
//
// Families:
//   moebius   F(x) = beta + x(1+s)/(1+sx) on [0,1], s = 1/c - 1 (closed forms)
//   smooth    derivative profile D(x) = D_moebius(x) exp(eps sin(2 pi x) x(1-x))
//   zygmund   derivative profile D(x) = D_moebius(x) exp(eps phi_gamma(x - x_star)),
//             phi_gamma(t) = t (log 1/|t|)^(-gamma) bump(2 e t); the bump is C-infinity
//             with support |t| <= 1/(2e)
//   rotation  rigid rotation diagnostic, F(x) = x + beta, break size 1
// The smooth/zygmund lifts are beta + integral of D normalized to integrate to 1.
//
// Immutable and cheap to copy; precision-dependent internal tables are built
// lazily per precision context and shared between copies.
class BreakMap {
public:
	static BreakMap moebius(const Real& c, const Real& beta);
	static BreakMap smooth(const Real& c, const Real& beta, const Real& epsilon);
	static BreakMap zygmund(const Real& c, const Real& beta, const Real& epsilon,
	                        const Real& gamma, const Real& x_star);
	static BreakMap rotation(const Real& rho);

	// Parse a preset id such as "moebius:c=2,beta=0.25" or
	// "zygmund:c=2,gamma=0.75,eps=0.05,xstar=0.5,beta=0".
	static BreakMap from_preset(const std::string& id);

	BreakMap with_beta(const Real& beta) const;

	Family family() const;
	std::string id() const;
	const Real& break_size() const; // c
	const Real& beta() const;
	const Real& gamma() const;   // zygmund exponent (0 for other families)
	const Real& epsilon() const; // perturbation amplitude (0 for moebius/rotation)
	const Real& x_star() const;  // zygmund singularity location
	bool has_d2() const;         // second derivatives available?

	Real lift(const Real& x) const;
	Real d1(const Real& x, Side side = Side::right) const;
	Real d2(const Real& x, Side side = Side::right) const;

	// Total variation of log f' over the circle, including the 2|log c| jump
	// at the break.  Cached per precision context.
	Real log_derivative_variation() const;

	struct IterResult {
		Real point;     // f^n(x), wrapped to [0,1)
		Real log_d1;    // sum of log f'(x_j) along the orbit
		bool hit_break; // some mid-orbit point landed exactly on the break
	};
	IterResult iterate(const Real& x, long n) const;

private:
	struct Impl;
	explicit BreakMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
	std::shared_ptr<const Impl> impl_;
};

} // namespace circlebreak
