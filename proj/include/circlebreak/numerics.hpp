#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <span>

#include "circlebreak/errors.hpp"

namespace circlebreak {

// Extended-precision real number.  Precision (mantissa bits) is taken from the
// active PrecisionContext at the time a value is created; MPFR guarantees
// correctly rounded arithmetic, so identical inputs give bit-identical results.
using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;

// How many mantissa bits to use at renormalization level n.
struct PrecisionPolicy {
	unsigned base_bits = 128;
	unsigned per_level_bits = 16;

	unsigned bits(unsigned level) const { return base_bits + per_level_bits * level; }
};

// RAII scope that sets the working precision in mantissa bits.
// Contexts nest; destruction restores the previous precision.
class PrecisionContext {
public:
	explicit PrecisionContext(unsigned bits);
	~PrecisionContext();

	PrecisionContext(const PrecisionContext&) = delete;
	PrecisionContext& operator=(const PrecisionContext&) = delete;

	// Mantissa bits of the innermost active context (53 if none was created).
	static unsigned current_bits();

private:
	unsigned prev_bits_;
	unsigned prev_digits10_;
};

bool is_finite(const Real& x);

// Copy of x carried at (at least) the current working precision.  Raising the
// precision of an MPFR value is exact, so the value never changes.  Needed
// when a constant created under a coarser context feeds arithmetic that must
// be accurate at the current one: the library computes each operation at the
// precision of its operands, so a coarse operand silently caps the result.
Real at_working_precision(const Real& x);

// 2^e at the current precision.
Real pow2(long e);

// x mod 1, in [0,1).  wrap_unit(x + k) == wrap_unit(x) exactly for integer k.
Real wrap_unit(const Real& x);

// Sum of log(factor_j) for strictly positive factors; keeps long derivative
// products in log space so they never under- or overflow.
Real log_sum_derivative(std::span<const Real> factors);

} // namespace circlebreak
