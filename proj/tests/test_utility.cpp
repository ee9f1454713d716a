#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "betlab/utility.hpp"

using namespace betlab;
using Catch::Approx;

TEST_CASE("eval: parametric families") {
    SECTION("shifted log") {
        const auto u = UtilityFunction::log_shifted(1e6);
        CHECK(u(Money(400)) == Approx(5.994).margin(1e-3));
        CHECK(u(Money(400)) == Approx(std::log(401.0)).margin(1e-12));
        CHECK(u(Money(0)) == 0.0);
        CHECK(u(Money(1000)) == Approx(std::log(1001.0)).margin(1e-12));
    }
    SECTION("normalized log hits its endpoints") {
        const auto u = UtilityFunction::normalized_log(2);
        CHECK(u.domain_max() == 2000.0);
        CHECK(u(Money(0)) == 0.0);
        CHECK(u(Money(2000)) == Approx(1.0).margin(1e-12));
    }
    SECTION("linear, power, exponential") {
        CHECK(UtilityFunction::linear(2.5, 100.0)(Money(40)) == Approx(100.0).margin(1e-12));
        CHECK(UtilityFunction::power(2.0, 100.0)(Money(7)) == Approx(49.0).margin(1e-12));
        CHECK(UtilityFunction::exponential(0.001, 1e5)(1000.0) ==
              Approx(1.0 - std::exp(-1.0)).margin(1e-12));
    }
    SECTION("real-valued arguments are accepted") {
        const auto u = UtilityFunction::log_shifted(1e6);
        CHECK(u(0.5) == Approx(std::log(1.5)).margin(1e-12));
    }
    SECTION("domain is enforced") {
        const auto u = UtilityFunction::log_shifted(2000.0);
        CHECK_THROWS_AS(u(-1.0), DomainExceeded);
        CHECK_THROWS_AS(u(2000.5), DomainExceeded);
        CHECK_NOTHROW(u(2000.0));
    }
    SECTION("parameter validation") {
        CHECK_THROWS_AS(UtilityFunction::linear(0.0, 10.0), std::invalid_argument);
        CHECK_THROWS_AS(UtilityFunction::power(-1.0, 10.0), std::invalid_argument);
        CHECK_THROWS_AS(UtilityFunction::exponential(0.0, 10.0), std::invalid_argument);
        CHECK_THROWS_AS(UtilityFunction::normalized_log(0), std::invalid_argument);
        CHECK_THROWS_AS(UtilityFunction::log_shifted(-5.0), std::invalid_argument);
    }
}

TEST_CASE("every parametric family is strictly increasing on a 1000-point grid") {
    const std::vector<UtilityFunction> families = {
        UtilityFunction::log_shifted(1e6),   UtilityFunction::normalized_log(4),
        UtilityFunction::linear(1.0, 4000),  UtilityFunction::power(0.5, 4000),
        UtilityFunction::power(2.0, 4000),   UtilityFunction::exponential(0.001, 4000),
    };
    for (const auto& u : families) {
        const double m = std::min(u.domain_max(), 4000.0);
        double prev = u(0.0);
        for (int i = 1; i < 1000; ++i) {
            const double x = m * static_cast<double>(i) / 999.0;
            const double v = u(x);
            REQUIRE(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("expected_utility") {
    const auto u = UtilityFunction::log_shifted(1e6);
    const Lottery b = make_lottery({{Money(0), 0.5}, {Money(1000), 0.5}});
    CHECK(expected_utility(u, b) == Approx(0.5 * std::log(1001.0)).margin(1e-12));
    CHECK(expected_utility(u, b) == Approx(3.4545).margin(1e-3));
    CHECK(expected_utility(u, make_lottery({{Money(1000), 0.5}, {Money(2000), 0.5}})) ==
          Approx(0.5 * (std::log(1001.0) + std::log(2001.0))).margin(1e-12));
    CHECK(expected_utility(u, make_lottery({{Money(777), 1.0}})) == u(Money(777)));
    CHECK_THROWS_AS(
        expected_utility(UtilityFunction::log_shifted(500.0), b), DomainExceeded);
}

TEST_CASE("conditional_utility") {
    const auto u = UtilityFunction::log_shifted(1e6);
    SECTION("second-installment values") {
        CHECK(conditional_utility(u, Money(400), Money(400)) ==
              Approx(std::log(801.0 / 401.0)).margin(1e-12));
        CHECK(conditional_utility(u, Money(400), Money(400)) == Approx(0.692).margin(1e-3));
        CHECK(conditional_utility(u, Money(1000), Money(400)) == Approx(1.251).margin(1e-3));
        CHECK(conditional_utility(u, Money(400), Money(1000)) == Approx(0.336).margin(1e-3));
        CHECK(conditional_utility(u, Money(1000), Money(1000)) == Approx(0.693).margin(1e-3));
        CHECK(conditional_utility(u, Money(0), Money(400)) == 0.0);
    }
    SECTION("telescoping across installments") {
        std::mt19937_64 rng(99);
        std::uniform_int_distribution<std::int64_t> cash(0, 5000);
        for (int trial = 0; trial < 200; ++trial) {
            const Money r1(cash(rng)), r2(cash(rng)), r3(cash(rng));
            const double lhs = conditional_utility(u, r2, r1) + conditional_utility(u, r3, r1 + r2);
            const double rhs = u(r1 + r2 + r3) - u(r1);
            REQUIRE(lhs == Approx(rhs).margin(1e-12));
        }
    }
    SECTION("linear utility forgets the first installment") {
        const auto lin = UtilityFunction::linear(1.0, 1e6);
        std::mt19937_64 rng(100);
        std::uniform_int_distribution<std::int64_t> cash(0, 100000);
        const double base = conditional_utility(lin, Money(400), Money(0));
        for (int trial = 0; trial < 100; ++trial) {
            REQUIRE(conditional_utility(lin, Money(400), Money(cash(rng))) ==
                    Approx(base).margin(1e-12));
        }
    }
}

TEST_CASE("conditional_expected_utility") {
    const auto u = UtilityFunction::log_shifted(1e6);
    const Lottery b = make_lottery({{Money(0), 0.5}, {Money(1000), 0.5}});
    CHECK(conditional_expected_utility(u, b, Money(400)) ==
          Approx(0.5 * std::log(1401.0 / 401.0)).margin(1e-12));
    CHECK(conditional_expected_utility(u, b, Money(400)) == Approx(0.6255).margin(1e-3));

    SECTION("point mass reduces to conditional_utility") {
        const Lottery point = make_lottery({{Money(250), 1.0}});
        CHECK(conditional_expected_utility(u, point, Money(777)) ==
              Approx(conditional_utility(u, Money(250), Money(777))).margin(1e-15));
    }
    SECTION("linear utility gives the mean of the installment") {
        const auto lin = UtilityFunction::linear(1.0, 1e6);
        CHECK(conditional_expected_utility(lin, b, Money(123)) == Approx(500.0).margin(1e-9));
        const auto lin2 = UtilityFunction::linear(2.5, 1e6);
        CHECK(conditional_expected_utility(lin2, b, Money(123)) == Approx(1250.0).margin(1e-9));
    }
}

TEST_CASE("alpha: indifference probability") {
    const AlphaSpec bracket(Money(0), Money(400), Money(1000), 0.0, 1e6);

    SECTION("linear utility is wealth-independent with value (c-a)/(b-a)") {
        const auto lin = UtilityFunction::linear(3.0, 2e6);
        for (const double x : {0.0, 17.25, 5000.0, 999999.0}) {
            CHECK(alpha(lin, bracket, x) == Approx(0.4).margin(1e-12));
        }
        const AlphaSpec wide(Money(0), Money(600), Money(1000), 0.0, 5000.0);
        CHECK(alpha(lin, wide, 1234.0) == Approx(0.6).margin(1e-12));
    }
    SECTION("shifted log at zero background wealth") {
        const auto u = UtilityFunction::log_shifted(2e6);
        CHECK(alpha(u, bracket, 0.0) == Approx(0.8675892572207747).margin(1e-12));
    }
    SECTION("shifted log far out approaches 0.4") {
        const auto u = UtilityFunction::log_shifted(2e6);
        const double far = alpha(u, bracket, 1e6);
        CHECK(far == Approx(0.40011994790849553).margin(1e-9));
        CHECK(std::abs(far - 0.4) < 0.005);
    }
    SECTION("the approach to 0.4 is monotone along decades") {
        const auto u = UtilityFunction::log_shifted(2e6);
        double prev = alpha(u, bracket, 1e3);
        for (const double x : {1e4, 1e5, 1e6}) {
            const double a = alpha(u, bracket, x);
            CHECK(a < prev);
            CHECK(a > 0.4);
            prev = a;
        }
        CHECK(std::abs(prev - 0.4) < 0.001);
    }
    SECTION("x outside the declared range") {
        const auto u = UtilityFunction::log_shifted(2e6);
        CHECK_THROWS_AS(alpha(u, bracket, -5.0), DomainExceeded);
        CHECK_THROWS_AS(alpha(u, bracket, 2e6), DomainExceeded);
    }
    SECTION("flat tabulated utility trips the denominator guard") {
        const auto flat = UtilityFunction::tabulated({{0.0, 0.0}, {5000.0, 1e-13}, {10000.0, 1.0}});
        const AlphaSpec spec(Money(0), Money(400), Money(1000), 0.0, 100.0);
        CHECK_THROWS_AS(alpha(flat, spec, 0.0), DegenerateDenominator);
    }
    SECTION("spec construction is validated") {
        CHECK_THROWS_AS(AlphaSpec(Money(400), Money(400), Money(1000), 0.0, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(AlphaSpec(Money(0), Money(1200), Money(1000), 0.0, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(AlphaSpec(Money(0), Money(400), Money(1000), 5.0, 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("alpha_monotonicity_report") {
    const AlphaSpec bracket(Money(0), Money(400), Money(1000), 0.0, 5000.0);

    CHECK(alpha_monotonicity_report(UtilityFunction::log_shifted(1e6), bracket, 1000) ==
          Monotonicity::Decreasing);
    CHECK(alpha_monotonicity_report(UtilityFunction::power(2.0, 1e6), bracket, 1000) ==
          Monotonicity::Increasing);
    CHECK(alpha_monotonicity_report(UtilityFunction::power(0.5, 1e6), bracket, 1000) ==
          Monotonicity::Decreasing);
    CHECK(alpha_monotonicity_report(UtilityFunction::linear(1.0, 1e6), bracket, 1000) ==
          Monotonicity::Constant);

    SECTION("exponential utility is wealth-shift invariant, so alpha is constant") {
        const auto u = UtilityFunction::exponential(0.001, 1e6);
        CHECK(alpha_monotonicity_report(u, bracket, 1000) == Monotonicity::Constant);
        const double analytic = (1.0 - std::exp(-0.4)) / (1.0 - std::exp(-1.0));
        for (const double x : {0.0, 1000.0, 5000.0}) {
            CHECK(alpha(u, bracket, x) == Approx(analytic).margin(1e-12));
        }
    }
    SECTION("alternating curvature yields Mixed") {
        const auto zigzag = UtilityFunction::tabulated({{0.0, 0.0},
                                                        {1000.0, 10.0},
                                                        {2000.0, 11.0},
                                                        {3000.0, 21.0},
                                                        {4000.0, 22.0},
                                                        {8000.0, 30.0}});
        const AlphaSpec spec(Money(0), Money(400), Money(1000), 0.0, 3000.0);
        CHECK(alpha_monotonicity_report(zigzag, spec, 100) == Monotonicity::Mixed);
    }
    SECTION("needs at least three grid points") {
        CHECK_THROWS_AS(
            alpha_monotonicity_report(UtilityFunction::linear(1.0, 1e6), bracket, 2),
            std::invalid_argument);
    }
}

TEST_CASE("certainty_equivalent") {
    const Lottery b = make_lottery({{Money(0), 0.5}, {Money(1000), 0.5}});
    SECTION("linear utility: the mean") {
        CHECK(certainty_equivalent(UtilityFunction::linear(1.0, 1e6), b) ==
              Approx(500.0).margin(1e-6));
    }
    SECTION("shifted log: solves ln(1+e) = (1/2) ln(1001)") {
        const double ce = certainty_equivalent(UtilityFunction::log_shifted(1e6), b);
        CHECK(ce == Approx(30.638584039112747).margin(1e-6));
        CHECK(ce == Approx(30.64).margin(0.01));
    }
    SECTION("point mass: the inverse of eval") {
        const Lottery point = make_lottery({{Money(777), 1.0}});
        CHECK(certainty_equivalent(UtilityFunction::power(0.5, 1e6), point) == 777.0);
    }
    SECTION("consistency under re-evaluation") {
        for (const auto& u : {UtilityFunction::log_shifted(1e6),
                              UtilityFunction::power(0.5, 1e6),
                              UtilityFunction::exponential(0.001, 1e6)}) {
            const double ce = certainty_equivalent(u, b);
            CHECK(u(ce) == Approx(expected_utility(u, b)).margin(1e-5));
        }
    }
}

TEST_CASE("tabulated utilities from CSV") {
    SECTION("well-formed file with header") {
        std::istringstream in("cash,utility\n0,0\n1000,5\n2000,6\n");
        const auto u = load_tabulated_utility(in);
        CHECK(u.family() == UtilityFamily::Tabulated);
        CHECK(u.domain_max() == 2000.0);
        CHECK(u(500.0) == Approx(2.5).margin(1e-12));
        CHECK(u(1500.0) == Approx(5.5).margin(1e-12));
        CHECK(u(Money(2000)) == Approx(6.0).margin(1e-12));
    }
    SECTION("headerless file") {
        std::istringstream in("0,0\n10,1\n");
        CHECK_NOTHROW(load_tabulated_utility(in));
    }
    SECTION("non-increasing cash is rejected with its line number") {
        std::istringstream in("0,0\n1000,5\n500,6\n");
        CHECK_THROWS_WITH(load_tabulated_utility(in),
                          Catch::Matchers::ContainsSubstring("line 3") &&
                              Catch::Matchers::ContainsSubstring("cash"));
    }
    SECTION("non-increasing utility is rejected with its line number") {
        std::istringstream in("0,0\n1000,5\n2000,5\n");
        CHECK_THROWS_WITH(load_tabulated_utility(in),
                          Catch::Matchers::ContainsSubstring("line 3") &&
                              Catch::Matchers::ContainsSubstring("utility"));
    }
    SECTION("column count and parse failures") {
        std::istringstream one_col("0\n");
        CHECK_THROWS_AS(load_tabulated_utility(one_col), ParseError);
        std::istringstream three_col("0,0\n1,2,3\n");
        CHECK_THROWS_WITH(load_tabulated_utility(three_col),
                          Catch::Matchers::ContainsSubstring("line 2"));
        std::istringstream junk("0,0\nabc,def\n");
        CHECK_THROWS_WITH(load_tabulated_utility(junk),
                          Catch::Matchers::ContainsSubstring("line 2"));
    }
    SECTION("must start at cash 0 and have two points") {
        std::istringstream in("100,1\n200,2\n");
        CHECK_THROWS_AS(load_tabulated_utility(in), ParseError);
        std::istringstream single("0,0\n");
        CHECK_THROWS_AS(load_tabulated_utility(single), ParseError);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(load_tabulated_utility_file("/nonexistent/u.csv"), ParseError);
    }
}
