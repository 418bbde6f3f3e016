#include "circlebreak/contfrac.hpp"

#include <algorithm>
#include <limits>

namespace circlebreak {

ContinuedFraction ContinuedFraction::from_quotients(std::vector<long> quotients)
{
	ContinuedFraction cf;
	long long p0 = 1, q0 = 0; // (p_{-1}, q_{-1})
	long long p1 = 0, q1 = 1; // (p_0, q_0)
	for (long k : quotients) {
		if (k < 1)
			throw validation_error("continued fraction quotients must be >= 1");
		long long p2 = k * p1 + p0;
		long long q2 = k * q1 + q0;
		if (q2 < q1)
			throw validation_error("continued fraction: denominator overflow");
		cf.conv_.push_back({p2, q2});
		p0 = p1;
		q0 = q1;
		p1 = p2;
		q1 = q2;
	}
	cf.quotients_ = std::move(quotients);
	return cf;
}

long long ContinuedFraction::p(int n) const
{
	if (n == -1)
		return 1;
	if (n == 0)
		return 0;
	if (n < -1 || n > size())
		throw numeric_domain_error("continued fraction index out of range");
	return conv_[n - 1].p;
}

long long ContinuedFraction::q(int n) const
{
	if (n == -1)
		return 0;
	if (n == 0)
		return 1;
	if (n < -1 || n > size())
		throw numeric_domain_error("continued fraction index out of range");
	return conv_[n - 1].q;
}

Real ContinuedFraction::value() const
{
	if (conv_.empty())
		throw numeric_domain_error("continued fraction has no quotients");
	return Real(conv_.back().p) / conv_.back().q;
}

Expansion expand(const Real& rho, int count)
{
	if (!(rho > 0 && rho < 1))
		throw numeric_domain_error("expand: rho must lie in (0,1)");
	if (count < 1)
		throw numeric_domain_error("expand: need count >= 1");
	Expansion out;
	Real x = rho;
	long long q0 = 0, q1 = 1;
	const long bits = static_cast<long>(PrecisionContext::current_bits());
	const Real qcap = pow2(bits / 2 - 4);
	for (int n = 1; n <= count; ++n) {
		if (Real(q1) > qcap)
			throw precision_error(
			    "expand: denominators exceed the working precision budget", n - 1);
		// A remainder at the rounding floor of the input signals an (almost)
		// exact rational: report termination instead of garbage quotients.
		if (x <= std::min(Real(q1) * q1 * pow2(-bits + 16), pow2(-bits / 2))) {
			out.terminated = true;
			return out;
		}
		Real inv = 1 / x;
		Real kf = floor(inv);
		if (kf < 1 || kf > Real(std::numeric_limits<long>::max() / 4))
			throw numeric_domain_error("expand: quotient out of range");
		long k = static_cast<long>(kf);
		long long q2 = k * q1 + q0;
		out.quotients.push_back(k);
		q0 = q1;
		q1 = q2;
		x = inv - kf;
	}
	return out;
}

Real estimate_rotation(const BreakMap& map, long iterations)
{
	if (iterations < 1)
		throw numeric_domain_error("estimate_rotation: iterations must be >= 1");
	Real y = 0;
	for (long i = 0; i < iterations; ++i)
		y = map.lift(y);
	return y / iterations;
}

namespace {

// Returns 0 when the sign certificate passes; otherwise +1 if the first
// violated convergent needs a larger rotation number, -1 if smaller.
int certificate_direction(const BreakMap& map, const ContinuedFraction& cf)
{
	int M = cf.size();
	long long qM = cf.q(M);
	Real y = 0;
	int next = 1;
	for (long long j = 1; j <= qM; ++j) {
		y = map.lift(y);
		while (next <= M && j == cf.q(next)) {
			Real g = y - cf.p(next);
			bool want_positive = next % 2 == 0;
			if (g == 0)
				return want_positive ? +1 : -1; // boundary: nudge off it
			if ((g > 0) != want_positive)
				return want_positive ? +1 : -1;
			++next;
		}
	}
	return 0;
}

} // namespace

Real tune_parameter(const std::function<BreakMap(const Real&)>& family,
                    const std::vector<long>& quotients)
{
	if (quotients.empty())
		throw validation_error("tune_parameter: need at least one target quotient");
	// Extend with a mediant step so the certificate pins the full cylinder.
	std::vector<long> extended = quotients;
	extended.push_back(1);
	ContinuedFraction cf = ContinuedFraction::from_quotients(extended);

	Real lo = 0, hi = 1;
	int dir_lo = certificate_direction(family(lo), cf);
	if (dir_lo == 0)
		return lo;
	int dir_hi = certificate_direction(family(hi), cf);
	if (dir_hi == 0)
		return hi;
	if (dir_lo != +1 || dir_hi != -1)
		throw validation_error("tune_parameter: target not bracketed by beta in [0,1]");

	const unsigned max_iter = PrecisionContext::current_bits() + 16;
	for (unsigned it = 0; it < max_iter; ++it) {
		Real mid = (lo + hi) / 2;
		int dir = certificate_direction(family(mid), cf);
		if (dir == 0)
			return mid;
		(dir > 0 ? lo : hi) = mid;
	}
	throw precision_error("tune_parameter: bisection exhausted the precision budget");
}

std::vector<long> golden_quotients(int n)
{
	return std::vector<long>(static_cast<std::size_t>(n), 1L);
}

} // namespace circlebreak
