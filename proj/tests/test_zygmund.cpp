#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "circlebreak/zygmund.hpp"
#include "test_util.hpp"

using namespace circlebreak;

TEST_CASE("gauge values and domain")
{
	PrecisionContext ctx(128);
	Real e = exp(Real(1));
	cbtest::check_near(zygmund_gauge(Real(1), 1 / e), Real(1), pow2(-100), "Z_1(1/e)");
	cbtest::check_near(zygmund_gauge(Real(2), 1 / (e * e)), Real(1) / 4, pow2(-100), "Z_2(1/e^2)");
	CHECK(zygmund_gauge(Real(2), Real(0)) == 0);
	// decreasing in gamma for x < 1/e, increasing toward x = 1
	CHECK(zygmund_gauge(Real(2), pow2(-10)) < zygmund_gauge(Real(1), pow2(-10)));
	CHECK_THROWS_AS(zygmund_gauge(Real(0), pow2(-1)), numeric_domain_error);
	CHECK_THROWS_AS(zygmund_gauge(Real(1), Real(1)), numeric_domain_error);
	CHECK_THROWS_AS(zygmund_gauge(Real(1), Real(-1)), numeric_domain_error);
}

TEST_CASE("modulus branches")
{
	PrecisionContext ctx(128);
	Real d = pow2(-10);
	Real l2 = log(Real(2));
	cbtest::check_near(zygmund_modulus(Real(1) / 2, d), d * sqrt(10 * l2), pow2(-100), "gamma<1");
	cbtest::check_near(zygmund_modulus(Real(1), d), d * log(10 * l2), pow2(-100), "gamma=1");
	CHECK(zygmund_modulus(Real(2), d) == d);
	CHECK_THROWS_AS(zygmund_modulus(Real(1), Real(1) / 2), numeric_domain_error);
	CHECK_THROWS_AS(zygmund_modulus(Real(2), Real(0)), numeric_domain_error);
}

TEST_CASE("dyadic series against the Basel closed form")
{
	PrecisionContext ctx(160);
	// For x = 2^-m and gamma = 2 the series telescopes into
	// sum_{n>m} (n log 2)^-2 = (pi^2/6 - sum_{j<=m} j^-2) / log^2 2.
	Real pi = 4 * atan(Real(1));
	Real l2 = log(Real(2));
	for (int m : {1, 2, 5}) {
		Real closed = pi * pi / 6;
		for (int j = 1; j <= m; ++j)
			closed -= Real(1) / (Real(j) * j);
		closed /= l2 * l2;
		Real x = pow2(-m);
		Real tol = pow2(-16); // gamma = 2 tails decay like 1/N, so deep tolerances need ~1/tol terms
		Real terms = zygmund_p_terms_for(Real(2), x, tol);
		REQUIRE(terms < pow2(20));
		PSum p = zygmund_p(Real(2), x, static_cast<long>(terms));
		INFO("m = ", m);
		CHECK(p.tail_bound <= tol);
		CHECK(abs(p.partial - closed) <= p.tail_bound);
		CHECK(p.partial <= closed); // tail is strictly positive
	}
}

TEST_CASE("series tail bound is certified")
{
	PrecisionContext ctx(128);
	Real g("1.5"), x = pow2(-6);
	PSum coarse = zygmund_p(g, x, 200);
	PSum fine = zygmund_p(g, x, 20000);
	// the much longer sum must land inside the coarse certificate
	CHECK(fine.partial >= coarse.partial);
	CHECK(fine.partial <= coarse.upper());
	// monotone in x toward 0
	CHECK(zygmund_p(g, pow2(-8), 2000).partial < zygmund_p(g, pow2(-4), 2000).partial);
	CHECK_THROWS_AS(zygmund_p(Real(1), x, 100), numeric_domain_error);
	CHECK_THROWS_AS(zygmund_p(g, x, 0), numeric_domain_error);
}

TEST_CASE("double integral transform")
{
	PrecisionContext ctx(128);
	Real g("0.75"), t = pow2(-3);
	CHECK(zygmund_t(g, Real(0), t) == 0);
	Real quarter = zygmund_t(g, Real(1) / 4, t);
	Real half = zygmund_t(g, Real(1) / 2, t);
	CHECK(quarter > 0);
	CHECK(quarter < half);

	// The outer piece has a closed form: int_s^1 Z(xt)/x dx
	//   = ((log 1/(st))^(1-g) - (log 1/t)^(1-g)) / (1 - g).
	Real s = Real(1) / 2;
	Real outer = (pow(-log(s * t), 1 - g) - pow(-log(t), 1 - g)) / (1 - g);
	Real inner = half - s * outer;
	CHECK(inner >= 0);
	CHECK(inner <= s * zygmund_gauge(g, s * t));             // integrand is increasing
	CHECK(inner >= s / 2 * zygmund_gauge(g, s * t / 2));     // lower box on [s/2, s]

	CHECK_THROWS_AS(zygmund_t(g, Real("0.6"), t), numeric_domain_error);
	CHECK_THROWS_AS(zygmund_t(g, Real("0.25"), Real(1)), numeric_domain_error);
}

TEST_CASE("second symmetric difference of the derivative")
{
	PrecisionContext ctx(128);
	BreakMap rot = BreakMap::rotation(Real("0.3"));
	CHECK(second_symmetric_difference(rot, Real("0.4"), pow2(-4)).value == 0);

	// Moebius: |D2 f'(xi, tau)| <= tau^2 sup|f'''|, with f''' = 6 s^2 (1+s)/(1+s x)^4.
	BreakMap mob = BreakMap::moebius(Real(2), Real(0));
	Real s = Real(1) / 2 - 1;
	Real sup_f3 = abs(6 * s * s * (1 + s)) / pow(1 + s, 4);
	for (int k : {4, 8, 16}) {
		Real tau = pow2(-k);
		Delta2 d = second_symmetric_difference(mob, Real("0.4"), tau);
		CHECK(!d.straddles_break);
		CHECK(abs(d.value) <= sup_f3 * tau * tau);
	}

	Delta2 near0 = second_symmetric_difference(mob, Real("0.05"), Real("0.1"));
	CHECK(near0.straddles_break);
	Delta2 near1 = second_symmetric_difference(mob, Real("0.95"), Real("0.1"));
	CHECK(near1.straddles_break);
	CHECK_THROWS_AS(second_symmetric_difference(mob, Real("0.4"), Real("0.6")),
	                numeric_domain_error);
}

TEST_CASE("gauge-critical modulus of f'' at the singular point")
{
	PrecisionContext ctx(128);
	Real g("1.5"), eps("0.05"), xs("0.5"); // gamma > 1 so f'' is available
	BreakMap zyg = BreakMap::zygmund(Real(2), Real(0), eps, g, xs);
	// f''(x*+t) - f''(x*) = eps f'(x*) Z(t) (1 + g/L) + O(t): continuous but
	// with modulus exactly the gauge, so f'' is not Lipschitz at x*.
	for (int k : {40, 60}) {
		Real t = pow2(-k);
		Real L = -log(t);
		Real lhs = (zyg.d2(xs + t) - zyg.d2(xs)) / (zygmund_gauge(g, t) * (1 + g / L));
		cbtest::check_rel(lhs, eps * zyg.d1(xs), Real("1e-8"), "f'' modulus");
	}
	// a C^2 map scales away under the same normalization
	BreakMap smo = BreakMap::smooth(Real(2), Real(0), eps);
	Real t = pow2(-40);
	CHECK(abs(smo.d2(xs + t) - smo.d2(xs)) / zygmund_gauge(g, t) < Real("1e-6"));
}

TEST_CASE("empirical class constants")
{
	PrecisionContext ctx(128);
	Real g("0.75"), eps("0.05");
	auto taus = dyadic_taus(4, 24);
	BreakMap smo = BreakMap::smooth(Real(2), Real(0), eps);
	BreakMap zyg = BreakMap::zygmund(Real(2), Real(0), eps, g, Real(1) / 2);
	auto xs_smo = standard_xi_grid(smo, 128);
	auto xs_zyg = standard_xi_grid(zyg, 128);
	Real cr_smo = class_ratio(smo, g, taus, xs_smo);
	Real cr_zyg = class_ratio(zyg, g, taus, xs_zyg);
	INFO("cr_smo = ", cr_smo, ", cr_zyg = ", cr_zyg);
	CHECK(cr_smo > 0);
	CHECK(cr_zyg < 100); // bounded in its class
	// At coarse tau both sups are dominated by the shared Moebius curvature.
	// At fine tau a C^2 map scales away while the singular perturbation keeps
	// contributing at the gauge scale near x*.
	auto fine = dyadic_taus(16, 24);
	Real fine_smo = class_ratio(smo, g, fine, xs_smo);
	Real fine_zyg = class_ratio(zyg, g, fine, xs_zyg);
	INFO("fine_smo = ", fine_smo, ", fine_zyg = ", fine_zyg);
	CHECK(fine_zyg > 4 * fine_smo);
	// membership is nested: a gauge with smaller exponent dominates
	CHECK(class_ratio(zyg, g / 2, taus, xs_zyg) <= cr_zyg);
}

TEST_CASE("grid helpers")
{
	PrecisionContext ctx(128);
	CHECK_THROWS_AS(dyadic_taus(0, 4), numeric_domain_error);
	CHECK_THROWS_AS(dyadic_taus(5, 4), numeric_domain_error);
	auto taus = dyadic_taus(2, 5);
	REQUIRE(taus.size() == 4);
	CHECK(taus.front() == pow2(-2));
	CHECK(taus.back() == pow2(-5));

	BreakMap zyg = BreakMap::zygmund(Real(2), Real(0), Real("0.05"), Real(2), Real(1) / 2);
	auto grid = standard_xi_grid(zyg, 64);
	CHECK(grid.size() > 64);
	CHECK(std::is_sorted(grid.begin(), grid.end()));
	for (const Real& x : grid)
		CHECK((x >= 0 && x < 1));
	// refinement points accumulate at the interior singular point
	int close = 0;
	for (const Real& x : grid)
		if (abs(x - Real(1) / 2) < pow2(-20))
			++close;
	CHECK(close > 10);
}
