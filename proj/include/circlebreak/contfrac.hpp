#pragma once

#include <functional>
#include <vector>

#include "circlebreak/maps.hpp"
#include "circlebreak/numerics.hpp"

namespace circlebreak {

struct Convergent {
	long long p, q;
};

// Continued fraction [0; k_1, k_2, ...] with its convergents p_n/q_n.
// Index convention: p(0)=0, q(0)=1, p(-1)=1, q(-1)=0; p(n), q(n) for n >= 1
// follow the standard recurrence with quotient k_n.
class ContinuedFraction {
public:
	static ContinuedFraction from_quotients(std::vector<long> quotients);

	const std::vector<long>& quotients() const { return quotients_; }
	int size() const { return static_cast<int>(quotients_.size()); }
	long long p(int n) const;
	long long q(int n) const;
	Convergent convergent(int n) const { return {p(n), q(n)}; }
	Real value() const; // p_N / q_N for the last index N

private:
	std::vector<long> quotients_;
	std::vector<Convergent> conv_; // conv_[n] = (p_n, q_n) for n >= 1
};

struct Expansion {
	std::vector<long> quotients;
	bool terminated = false; // the Gauss map hit an exact rational tail
};

// Gauss-map expansion of rho in (0,1), at most `count` quotients.
// Throws precision_error (naming the last trustworthy index) when the
// denominators outgrow the working precision.
Expansion expand(const Real& rho, int count);

// (F^T(0) - 0)/T; within 1/T of the rotation number.
Real estimate_rotation(const BreakMap& map, long iterations);

// Finds beta such that family(beta) has rotation number whose continued
// fraction starts with the given quotients.  The certificate is exact orbit
// combinatorics: sign alternation of F^{q_m}(0) - p_m for m = 1..N+1, the
// (N+1)th convergent being the mediant (tail quotient 1), which pins the
// cylinder of the first N quotients.
Real tune_parameter(const std::function<BreakMap(const Real&)>& family,
                    const std::vector<long>& quotients);

// Convenience: the golden-mean quotient vector (1,1,...,1) of length n.
std::vector<long> golden_quotients(int n);

} // namespace circlebreak
