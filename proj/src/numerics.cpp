#include "circlebreak/numerics.hpp"

#include <cmath>

namespace circlebreak {

namespace {

unsigned g_current_bits = 53;

// Decimal digits that guarantee at least `bits` mantissa bits after the
// digits10 -> bits conversion done by the backend (log2(10) > 3.32).
unsigned bits_to_digits10(unsigned bits)
{
	return static_cast<unsigned>(bits * 0.30103) + 3;
}

} // namespace

PrecisionContext::PrecisionContext(unsigned bits)
{
	if (bits < 53)
		throw validation_error("precision context requires at least 53 bits");
	prev_bits_ = g_current_bits;
	prev_digits10_ = Real::default_precision();
	Real::default_precision(bits_to_digits10(bits));
	g_current_bits = bits;
}

PrecisionContext::~PrecisionContext()
{
	Real::default_precision(prev_digits10_);
	g_current_bits = prev_bits_;
}

unsigned PrecisionContext::current_bits() { return g_current_bits; }

bool is_finite(const Real& x)
{
	return mpfr_number_p(x.backend().data()) != 0;
}

Real at_working_precision(const Real& x)
{
	Real y = x;
	unsigned d = Real::default_precision();
	if (y.precision() < d)
		y.precision(d);
	return y;
}

Real pow2(long e)
{
	return ldexp(Real(1), e);
}

Real wrap_unit(const Real& x)
{
	if (!is_finite(x))
		throw numeric_domain_error("wrap_unit: non-finite input");
	Real r = x - floor(x);
	// floor can land exactly on x for integer input; guard the r == 1 edge
	// that would otherwise escape [0,1) after rounding.
	if (r >= 1)
		r -= 1;
	if (r < 0)
		r += 1;
	return r;
}

Real log_sum_derivative(std::span<const Real> factors)
{
	Real sum = 0;
	for (const Real& f : factors) {
		if (!(f > 0))
			throw numeric_domain_error("log_sum_derivative: non-positive factor");
		sum += log(f);
	}
	return sum;
}

} // namespace circlebreak
