#include "circlebreak/lemmalab.hpp"

#include <ostream>

namespace circlebreak {

namespace {

void check_interval(const Real& a, const Real& b)
{
	if (!(a < b))
		throw numeric_domain_error("lemmalab: interval is degenerate");
	Real k = floor(a) + 1;
	if (k > a && k < b)
		throw numeric_domain_error(
		    "lemmalab: interval contains the break point in its interior");
}

struct Probe {
	Real Ka, Kb, Kx;    // K' at the endpoints and at x
	Real Ra, Rb;        // one-sided distortions at x
	Real Ra1, Rb1;      // their derivatives
	Real len, z;
};

Probe make_probe(const Curve& K, const Real& a, const Real& b, const Real& x)
{
	if (!(x > a && x < b))
		throw numeric_domain_error("lemmalab: probe must be interior");
	Probe p;
	p.len = b - a;
	p.z = (b - x) / p.len;
	p.Ka = K.d1(a);
	p.Kb = K.d1(b);
	p.Kx = K.d1(x);
	Real va = K.v(a), vb = K.v(b), vx = K.v(x);
	p.Ra = (vx - va) / (x - a);
	p.Rb = (vb - vx) / (b - x);
	p.Ra1 = (p.Kx - p.Ra) / (x - a);
	p.Rb1 = (p.Rb - p.Kx) / (b - x);
	return p;
}

} // namespace

Curve curve_from_map(const BreakMap& map, const Real& a, const Real& b)
{
	check_interval(a, b);
	// an integer coordinate can only be an endpoint; take the branch from
	// within [a, b]
	auto side_of = [a](const Real& x) {
		return wrap_unit(x) == 0 && x != a ? Side::left : Side::right;
	};
	Curve c;
	c.v = [map](const Real& x) { return map.lift(x); };
	c.d1 = [map, side_of](const Real& x) { return map.d1(x, side_of(x)); };
	if (map.has_d2())
		c.d2 = [map, side_of](const Real& x) { return map.d2(x, side_of(x)); };
	return c;
}

Real effective_gamma(const BreakMap& map)
{
	return map.family() == Family::zygmund ? map.gamma() : Real(2);
}

Real ratio_distortion(const Curve& K, const Real& a, const Real& b)
{
	if (!(a < b))
		throw numeric_domain_error("ratio_distortion: interval is degenerate");
	return (K.v(b) - K.v(a)) / (b - a);
}

Real ratio_distortion(const BreakMap& map, const Real& a, const Real& b)
{
	return ratio_distortion(curve_from_map(map, a, b), a, b);
}

Lemma26 distortion_comparison(const Curve& K, const Real& gamma, const Real& a,
                              const Real& b, const Real& x)
{
	Probe p = make_probe(K, a, b, x);
	Lemma26 out;
	out.lhs = p.Ra / p.Rb - 1;
	out.main_term = (p.Ka - p.Kb) / (2 * p.Kb);
	out.bound = p.len * zygmund_gauge(gamma, p.len) +
	            abs(p.Ka - p.Kb) * zygmund_modulus(gamma, p.len);
	out.ratio = abs(out.lhs - out.main_term) / out.bound;
	return out;
}

Lemma26 distortion_comparison(const BreakMap& map, const Real& a, const Real& b,
                              const Real& x)
{
	return distortion_comparison(curve_from_map(map, a, b), effective_gamma(map), a,
	                             b, x);
}

ConvexityDefect convexity_defect(const Curve& K, const Real& gamma, const Real& a,
                                 const Real& b, const Real& x)
{
	Probe p = make_probe(K, a, b, x);
	ConvexityDefect out;
	out.defect = (x - a) * (b - x) * abs(p.Rb1 - p.Ra1) / p.len;
	out.bound = p.len * zygmund_gauge(gamma, p.len);
	out.interp_defect = abs(p.z * p.Ka + (1 - p.z) * p.Kb - p.Kx);
	Real s = p.z <= Real(1) / 2 ? p.z : 1 - p.z;
	out.t_bound = p.len * zygmund_t(gamma, s, p.len);
	return out;
}

ConvexityDefect convexity_defect(const BreakMap& map, const Real& a, const Real& b,
                                 const Real& x)
{
	return convexity_defect(curve_from_map(map, a, b), effective_gamma(map), a, b, x);
}

DerivativeGap derivative_gap(const Curve& K, const Real& gamma, const Real& a,
                             const Real& b, const Real& x)
{
	if (!K.d2)
		throw capability_error("derivative_gap: needs K''");
	if (!(gamma > 1))
		throw capability_error("derivative_gap: needs gamma > 1");
	Probe p = make_probe(K, a, b, x);
	Real k2 = K.d2(x);
	Real Ra2 = (k2 - 2 * p.Ra1) / (x - a);
	Real Rb2 = (2 * p.Rb1 - k2) / (b - x);
	DerivativeGap out;
	out.gap = abs(p.Rb1 - p.Ra1);
	out.p_bound = zygmund_p(gamma, p.len, 20000).partial;
	out.second_probe = (x - a) * (b - x) * abs(Ra2 - Rb2);
	out.second_bound = p.len * out.p_bound;
	return out;
}

DerivativeGap derivative_gap(const BreakMap& map, const Real& a, const Real& b,
                             const Real& x)
{
	if (!map.has_d2())
		throw capability_error("derivative_gap: family has no f''");
	return derivative_gap(curve_from_map(map, a, b), effective_gamma(map), a, b, x);
}

std::vector<Real> standard_probes()
{
	// built per call so the values carry the caller's working precision
	return {Real(1) / 10, Real(3) / 10, Real(5) / 10, Real(7) / 10, Real(9) / 10};
}

std::vector<LemmaRow> lemma_sweep(const BreakMap& map, const Real& center, int k_min,
                                  int k_max)
{
	if (k_min < 1 || k_max < k_min)
		throw numeric_domain_error("lemma_sweep: need 1 <= k_min <= k_max");
	std::vector<LemmaRow> rows;
	Real gamma = effective_gamma(map);
	for (int k = k_min; k <= k_max; ++k) {
		Real len = pow2(-k);
		Real a = center, b = center + len;
		Curve K = curve_from_map(map, a, b);
		for (const Real& t : standard_probes()) {
			Real x = a + t * len;
			Lemma26 l = distortion_comparison(K, gamma, a, b, x);
			rows.push_back({"distortion_comparison", len, t,
			                abs(l.lhs - l.main_term), l.bound, l.ratio});
			ConvexityDefect c = convexity_defect(K, gamma, a, b, x);
			rows.push_back({"convexity_defect", len, t, c.defect, c.bound,
			                c.defect / c.bound});
			rows.push_back({"interpolation_defect", len, t, c.interp_defect,
			                c.t_bound, c.interp_defect / c.t_bound});
			if (map.has_d2()) {
				DerivativeGap d = derivative_gap(K, gamma, a, b, x);
				rows.push_back({"derivative_gap", len, t, d.gap,
				                d.p_bound, d.gap / d.p_bound});
				rows.push_back({"second_derivative_gap", len, t,
				                d.second_probe, d.second_bound,
				                d.second_probe / d.second_bound});
			}
		}
	}
	return rows;
}

void write_lemma_csv(std::ostream& os, std::span<const LemmaRow> rows)
{
	os << "lemma_id,interval_length,probe_t,quantity,bound,ratio\n";
	for (const LemmaRow& r : rows)
		os << r.lemma_id << "," << r.interval_length.str() << "," << r.probe_t.str()
		   << "," << r.quantity.str() << "," << r.bound.str() << ","
		   << r.ratio.str() << "\n";
}

} // namespace circlebreak
