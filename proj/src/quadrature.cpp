#include "circlebreak/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace circlebreak {

namespace {

// Legendre P_m and P_m' at x, by the three-term recurrence.
void legendre(unsigned m, const Real& x, Real& p, Real& dp)
{
	Real p0 = 1, p1 = x;
	for (unsigned k = 2; k <= m; ++k) {
		Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
		p0 = p1;
		p1 = p2;
	}
	p = p1;
	dp = m * (x * p1 - p0) / (x * x - 1);
}

GaussRule make_gauss_rule(unsigned order)
{
	GaussRule rule;
	rule.nodes.resize(order);
	rule.weights.resize(order);
	const Real tol = pow2(-static_cast<long>(PrecisionContext::current_bits()) + 6);
	const double pi = 3.14159265358979323846;
	for (unsigned k = 0; k < order; ++k) {
		Real x = std::cos(pi * (k + 0.75) / (order + 0.5));
		Real p, dp;
		for (int it = 0; it < 64; ++it) {
			legendre(order, x, p, dp);
			Real dx = p / dp;
			x -= dx;
			if (abs(dx) < tol)
				break;
		}
		legendre(order, x, p, dp);
		rule.nodes[order - 1 - k] = x;
		rule.weights[order - 1 - k] = 2 / ((1 - x * x) * dp * dp);
	}
	return rule;
}

Real gauss_apply(const std::function<Real(const Real&)>& f, const Real& a, const Real& b,
                 const GaussRule& rule)
{
	Real h = (b - a) / 2, c = (a + b) / 2, sum = 0;
	for (std::size_t i = 0; i < rule.nodes.size(); ++i)
		sum += rule.weights[i] * f(c + h * rule.nodes[i]);
	return sum * h;
}

Real integrate_rec(const std::function<Real(const Real&)>& f, const Real& a, const Real& b,
                   const Real& tol, const GaussRule& rule, unsigned depth, unsigned max_depth)
{
	Real whole = gauss_apply(f, a, b, rule);
	Real mid = (a + b) / 2;
	Real left = gauss_apply(f, a, mid, rule);
	Real right = gauss_apply(f, mid, b, rule);
	if (abs(whole - (left + right)) <= tol)
		return left + right;
	if (depth >= max_depth)
		throw precision_error("integrate: adaptive refinement did not converge");
	return integrate_rec(f, a, mid, tol / 2, rule, depth + 1, max_depth) +
	       integrate_rec(f, mid, b, tol / 2, rule, depth + 1, max_depth);
}

// cos(pi*i/m) table for i = 0..m at the current precision.
std::vector<Real> cos_table(unsigned m)
{
	std::vector<Real> ct(m + 1);
	const Real pi_m = 4 * atan(Real(1)) / m;
	for (unsigned i = 0; i <= m; ++i)
		ct[i] = cos(pi_m * i);
	ct[0] = 1;
	ct[m] = -1;
	if (m % 2 == 0)
		ct[m / 2] = 0;
	return ct;
}

} // namespace

const GaussRule& gauss_rule(unsigned order)
{
	static std::map<std::pair<unsigned, unsigned>, std::shared_ptr<const GaussRule>> cache;
	auto key = std::make_pair(order, PrecisionContext::current_bits());
	auto it = cache.find(key);
	if (it == cache.end())
		it = cache.emplace(key, std::make_shared<GaussRule>(make_gauss_rule(order))).first;
	return *it->second;
}

Real integrate(const std::function<Real(const Real&)>& f, const Real& a, const Real& b,
               const Real& tol, unsigned order, unsigned max_depth)
{
	if (a == b)
		return Real(0);
	const GaussRule& rule = gauss_rule(order);
	return integrate_rec(f, a, b, tol, rule, 0, max_depth);
}

namespace {

// Chebyshev coefficients of f on [a,b] from m+1 Chebyshev-Lobatto samples.
std::vector<Real> cheb_coeffs(const std::function<Real(const Real&)>& f, const Real& a,
                              const Real& b, unsigned m, const std::vector<Real>& ct)
{
	Real c = (a + b) / 2, h = (b - a) / 2;
	std::vector<Real> fv(m + 1);
	for (unsigned k = 0; k <= m; ++k)
		fv[k] = f(c + h * ct[k]);
	std::vector<Real> coef(m + 1);
	for (unsigned j = 0; j <= m; ++j) {
		Real sum = fv[0] / 2;
		for (unsigned k = 1; k < m; ++k) {
			unsigned t = (j * k) % (2 * m);
			if (t > m)
				t = 2 * m - t;
			sum += fv[k] * ct[t];
		}
		sum += fv[m] * (j % 2 == 0 ? Real(1) : Real(-1)) / 2;
		coef[j] = sum * 2 / static_cast<int>(m);
		if (j == 0 || j == m)
			coef[j] /= 2;
	}
	return coef;
}

Real clenshaw(const std::vector<Real>& coef, const Real& t)
{
	Real b1 = 0, b2 = 0;
	Real t2 = 2 * t;
	for (std::size_t j = coef.size(); j-- > 1;) {
		Real b0 = coef[j] + t2 * b1 - b2;
		b2 = b1;
		b1 = b0;
	}
	return coef[0] + t * b1 - b2;
}

} // namespace

PiecewiseCheb PiecewiseCheb::build(const std::function<Real(const Real&)>& f, const Real& lo,
                                   const Real& hi, std::vector<Real> breakpoints,
                                   const Real& tol, unsigned degree, const Real& min_width)
{
	if (!(lo < hi))
		throw validation_error("PiecewiseCheb: empty interval");
	const unsigned m = std::max(degree, 8u);
	const std::vector<Real> ct = cos_table(m);

	std::vector<Real> cuts;
	cuts.push_back(lo);
	std::sort(breakpoints.begin(), breakpoints.end());
	for (const Real& x : breakpoints)
		if (x > lo && x < hi)
			cuts.push_back(x);
	cuts.push_back(hi);

	PiecewiseCheb out;
	out.lo_ = lo;
	out.hi_ = hi;

	constexpr std::size_t max_panels = 65536;
	// Depth-first subdivision keeps the panels in left-to-right order.
	std::vector<std::pair<Real, Real>> stack;
	for (std::size_t i = cuts.size() - 1; i-- > 0;)
		stack.emplace_back(cuts[i], cuts[i + 1]);
	while (!stack.empty()) {
		auto [a, b] = stack.back();
		stack.pop_back();
		std::vector<Real> coef = cheb_coeffs(f, a, b, m, ct);
		Real tail = 0;
		for (unsigned j = m - 3; j <= m; ++j)
			tail = std::max(tail, abs(coef[j]));
		if (tail <= tol || b - a <= min_width) {
			out.panels_.push_back(Panel{a, b, std::move(coef), {}, Real(0)});
			if (out.panels_.size() > max_panels)
				throw precision_error("PiecewiseCheb: panel budget exhausted");
		} else {
			Real mid = (a + b) / 2;
			stack.emplace_back(mid, b);
			stack.emplace_back(a, mid);
		}
	}

	// Antiderivative coefficients per panel and cumulative integrals.
	Real cum = 0;
	for (Panel& p : out.panels_) {
		Real h = (p.b - p.a) / 2;
		std::size_t n = p.coef.size();
		p.acoef.assign(n + 1, Real(0));
		auto cf = [&](std::size_t j) { return j < n ? p.coef[j] : Real(0); };
		for (std::size_t j = 1; j <= n; ++j)
			p.acoef[j] = h * (cf(j - 1) - cf(j + 1)) / (2 * static_cast<long>(j));
		p.acoef[1] = h * (2 * cf(0) - cf(2)) / 2; // integral of T_0 is T_1, not T_1/2
		Real at_minus1 = 0;
		for (std::size_t j = 1; j <= n; ++j)
			at_minus1 += (j % 2 == 0 ? p.acoef[j] : -p.acoef[j]);
		p.acoef[0] = -at_minus1;
		p.cum = cum;
		Real at_plus1 = 0;
		for (std::size_t j = 0; j <= n; ++j)
			at_plus1 += p.acoef[j];
		cum += at_plus1;
	}
	out.total_ = cum;
	return out;
}

std::size_t PiecewiseCheb::locate(const Real& x) const
{
	std::size_t lo = 0, hi = panels_.size() - 1;
	while (lo < hi) {
		std::size_t mid = (lo + hi + 1) / 2;
		if (x >= panels_[mid].a)
			lo = mid;
		else
			hi = mid - 1;
	}
	return lo;
}

Real PiecewiseCheb::eval(const Real& x) const
{
	const Panel& p = panels_[locate(x)];
	Real t = (2 * x - p.a - p.b) / (p.b - p.a);
	return clenshaw(p.coef, t);
}

Real PiecewiseCheb::integral(const Real& x) const
{
	const Panel& p = panels_[locate(x)];
	Real t = (2 * x - p.a - p.b) / (p.b - p.a);
	return p.cum + clenshaw(p.acoef, t);
}

} // namespace circlebreak
