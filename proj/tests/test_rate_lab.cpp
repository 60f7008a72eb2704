#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stablelab/errors.hpp"
#include "stablelab/rate_lab.hpp"
#include "stablelab/rng.hpp"

using namespace stablelab;

TEST_CASE("lambda_rate: display values") {
    // alpha = 1.5, gamma = 2, n = 1e6: n^{-1/3} + n^{-4/3}
    const double n = 1e6;
    CHECK(lambda_rate(1000000, 1.5, 2.0, false) ==
          doctest::Approx(std::pow(n, -1.0 / 3.0) + std::pow(n, -4.0 / 3.0)).epsilon(1e-12));
    // rho cases for alpha < 1
    CHECK(lambda_rate(100, 0.5, 0.3, false) ==
          doctest::Approx(0.01 + std::pow(100.0, -0.3 / 0.7)).epsilon(1e-12));
    CHECK(lambda_rate(100, 0.5, 0.3, true) ==
          doctest::Approx(0.01 + std::pow(100.0, -0.3 / 0.7)).epsilon(1e-12));
    // symmetric changes the exponent when alpha dominates 1-gamma
    CHECK(lambda_rate(100, 0.5, 0.8, true) ==
          doctest::Approx(0.01 + std::pow(100.0, -0.8 / 0.5)).epsilon(1e-12));
    CHECK(lambda_rate(100, 0.5, 0.8, false) ==
          doctest::Approx(0.01 + std::pow(100.0, -1.0)).epsilon(1e-12));
    // critical log factors
    CHECK(lambda_rate(100, 1.5, 0.5, false) ==
          doctest::Approx(std::pow(100.0, -1.0 / 3.0) +
                          std::pow(100.0, -0.5 / 1.5) * std::log(100.0))
              .epsilon(1e-12));
    CHECK(lambda_rate(100, 1.0, 1.0, false) ==
          doctest::Approx(0.01 + 0.01 * std::log(100.0)).epsilon(1e-12));
}

TEST_CASE("lambda_rate is monotone non-increasing in n away from critical gamma") {
    for (double a : {0.5, 0.8, 1.0, 1.3, 1.8}) {
        for (double g : {0.2, 0.7, 3.0}) {
            if (g == 2.0 - a || g == 1.0 - a || (a == 1.0 && g == 1.0)) continue;
            CAPTURE(a);
            CAPTURE(g);
            double prev = 1e300;
            for (long long n = 3; n < 4000; n = n * 3 / 2 + 1) {
                const double v = lambda_rate(n, a, g, false);
                CHECK(v <= prev + 1e-15);
                prev = v;
            }
        }
    }
    // at critical gamma the (ln n) factor delays the decay; monotone beyond
    // the turning point n > exp(alpha/gamma)
    double prev = 1e300;
    for (long long n = 9000; n < 4000000; n *= 2) {
        const double v = lambda_rate(n, 1.8, 0.2, false);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}

TEST_CASE("exponent registry matches the theorem displays") {
    CHECK(pareto_rate_exponent(1.5) == doctest::Approx(-1.0 / 3.0));
    CHECK(pareto_rate_exponent(1.0) == doctest::Approx(-1.0));
    CHECK(pareto_rate_exponent(0.8) == doctest::Approx(-1.0));
    CHECK(theoretical_exponent(1.5, std::numeric_limits<double>::infinity(), true) ==
          doctest::Approx(-1.0 / 3.0));
    CHECK(theoretical_exponent(0.5, 0.3, false) == doctest::Approx(-0.3 / 0.7));
}

TEST_CASE("fit_loglog: exact power law is recovered to machine precision") {
    std::vector<std::pair<double, double>> table;
    for (int e = 4; e <= 14; ++e) {
        const double n = std::pow(2.0, e);
        table.emplace_back(n, 3.0 * std::pow(n, -0.5));
    }
    const RateFit fit = fit_loglog(table);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.ci_lo <= fit.slope);
    CHECK(fit.ci_hi >= fit.slope);
}

TEST_CASE("fit_loglog: ln ln regressor separates the log exponent") {
    std::vector<std::pair<double, double>> table;
    for (int e = 4; e <= 14; ++e) {
        const double n = std::pow(2.0, e);
        table.emplace_back(n, 0.7 * std::pow(std::log(n), 2.0) / n);
    }
    const RateFit plain = fit_loglog(table, false);
    CHECK(plain.slope > -1.0);  // biased upward by the log factor
    const RateFit with_ln = fit_loglog(table, true);
    CHECK(with_ln.ln_exponent == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(with_ln.slope == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("fit_loglog: bootstrap CI covers the truth on noisy power laws") {
    RngStream rng(2718, 0);
    int covered = 0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
        std::vector<std::pair<double, double>> table;
        for (int e = 4; e <= 14; ++e) {
            const double n = std::pow(2.0, e);
            const double noise = 1.0 + 0.1 * (2.0 * rng.u01() - 1.0);
            table.emplace_back(n, 2.0 * std::pow(n, -0.7) * noise);
        }
        const RateFit fit = fit_loglog(table, false, 1000 + r);
        if (fit.ci_lo <= -0.7 && -0.7 <= fit.ci_hi) ++covered;
    }
    CHECK(covered >= 90);
}

TEST_CASE("fit_loglog: scale invariance is exact") {
    std::vector<std::pair<double, double>> table, scaled;
    for (int e = 4; e <= 12; ++e) {
        const double n = std::pow(2.0, e);
        const double d = std::pow(n, -0.9) * (1.0 + 0.05 * std::sin(e));
        table.emplace_back(n, d);
        scaled.emplace_back(n, 17.0 * d);
    }
    const RateFit f1 = fit_loglog(table, false, 5);
    const RateFit f2 = fit_loglog(scaled, false, 5);
    CHECK(f1.slope == f2.slope);  // bitwise: only the intercept moves
    CHECK(f2.intercept == doctest::Approx(f1.intercept + std::log(17.0)).epsilon(1e-12));
}

TEST_CASE("fit_loglog rejects degenerate tables; drops nonpositive rows") {
    std::vector<std::pair<double, double>> tiny = {{16.0, 0.1}, {32.0, 0.05}};
    CHECK_THROWS_AS(fit_loglog(tiny), domain_error);
    std::vector<std::pair<double, double>> mixed;
    for (int e = 4; e <= 12; ++e) mixed.emplace_back(std::pow(2.0, e), std::pow(2.0, -e));
    mixed.emplace_back(99999.0, -1.0);
    const RateFit fit = fit_loglog(mixed);
    CHECK(fit.dropped_nonpositive == 1);
    CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("run_sweep validates the grid") {
    RateScenario sc;
    sc.model = pareto_model(1, 1.5);
    sc.n_grid = {16};
    CHECK_THROWS_AS(run_sweep(sc), domain_error);
    sc.n_grid = {16, 32, 64, 128};  // < 2 decades
    CHECK_THROWS_AS(run_sweep(sc), domain_error);
    sc.n_grid = {16, 32, 32, 64, 16384};
    CHECK_THROWS_AS(run_sweep(sc), domain_error);  // not strictly increasing
}

TEST_CASE("headline verdict: synthetic controls") {
    // positive control: d = c / n
    std::vector<std::pair<double, double>> clean, logged;
    for (int e = 4; e <= 14; ++e) {
        const double n = std::pow(2.0, e);
        clean.emplace_back(n, 0.12 / n);
        logged.emplace_back(n, 0.12 * std::pow(std::log(n), 2.0) / n);
    }
    const HeadlineReport pos = headline_from_table(clean);
    CHECK(pos.verdict_n_inverse);
    CHECK(pos.ratio_max_over_min < 1.0001);
    const HeadlineReport neg = headline_from_table(logged);
    CHECK_FALSE(neg.verdict_n_inverse);
    CHECK(neg.ratio_max_over_min > 4.0);
    CHECK(neg.ln_ci_lo <= 2.0);
    CHECK(neg.ln_ci_hi >= 2.0);
    // short grid is inconclusive
    const HeadlineReport inc = headline_from_table({{16.0, 0.1}, {32.0, 0.05}});
    CHECK_FALSE(inc.conclusive);
    CHECK_FALSE(inc.message.empty());  // message explains the requirement
}

TEST_CASE("headline report serializes to json") {
    std::vector<std::pair<double, double>> clean;
    for (int e = 4; e <= 14; ++e) clean.emplace_back(std::pow(2.0, e), 0.5 * std::pow(2.0, -e));
    const std::string j = headline_from_table(clean).to_json();
    CHECK(j.find("\"verdict_n_inverse\":true") != std::string::npos);
    CHECK(j.find("\"ln_ci\":[") != std::string::npos);
}
