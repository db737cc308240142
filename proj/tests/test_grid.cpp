#include <doctest.h>

#include <cmath>

#include "smj/grid.hpp"
#include "smj/numeric.hpp"

using namespace smj;

TEST_CASE("sample_grid covers the horizon and starts at zero") {
    PoissonGrid grid = sample_grid(1.0, 1.0, 1e-12, 42);
    CHECK(grid.arrivals.front() == 0.0);
    CHECK(grid.max_index() >= 1);
    CHECK(grid.arrivals.back() > 1.0);
    for (int k = 1; k <= grid.max_index(); ++k) CHECK(grid.chi(k) > grid.chi(k - 1));
}

TEST_CASE("sample_grid is deterministic in the seed") {
    PoissonGrid a = sample_grid(7.5, 2.0, 1e-10, 1234);
    PoissonGrid b = sample_grid(7.5, 2.0, 1e-10, 1234);
    REQUIRE(a.arrivals.size() == b.arrivals.size());
    for (std::size_t k = 0; k < a.arrivals.size(); ++k) CHECK(a.arrivals[k] == b.arrivals[k]);
    PoissonGrid c = sample_grid(7.5, 2.0, 1e-10, 1235);
    CHECK(a.arrivals[1] != c.arrivals[1]);
}

TEST_CASE("sample_grid rejects bad arguments") {
    CHECK_THROWS(sample_grid(0.0, 1.0, 1e-10, 1));
    CHECK_THROWS(sample_grid(1.0, -1.0, 1e-10, 1));
    CHECK_THROWS(sample_grid(1.0, 1.0, 2.0, 1));
}

// Poisson concentration: with a loose tail requirement the grid length is
// driven by the coverage count, which concentrates around gamma * T.
TEST_CASE("sample_grid length concentrates around gamma*T") {
    const double gamma = 100.0, T = 5.0;
    int within = 0;
    const int seeds = 1000;
    for (int s = 0; s < seeds; ++s) {
        PoissonGrid g = sample_grid(gamma, T, 0.4, std::uint64_t(s) + 1);
        double ratio = double(g.max_index()) / (gamma * T);
        if (ratio >= 0.9 && ratio <= 1.1) ++within;
    }
    CHECK(within >= int(0.95 * seeds));
}

TEST_CASE("poisson_pmf basics") {
    CHECK(poisson_pmf(0.0, 0) == 1.0);
    CHECK(poisson_pmf(0.0, 3) == 0.0);
    CHECK(poisson_pmf(2.0, 0) == doctest::Approx(0.1353352832366127).epsilon(1e-12));
    CHECK_THROWS(poisson_pmf(-1.0, 0));
    CHECK_THROWS(poisson_pmf(1.0, -1));
    // stays finite far out in the tail
    CHECK(poisson_pmf(1500.0, 3000) > 0.0);
    CHECK(std::isfinite(poisson_pmf(1500.0, 3000)));
}

TEST_CASE("poisson pmf sums to one within the truncation tail") {
    for (double lambda : {0.3, 5.0, 180.0}) {
        int top = poisson_tail_index(lambda, 1e-12);
        KahanSum acc;
        for (int k = 0; k <= top; ++k) acc.add(poisson_pmf(lambda, k));
        CHECK(acc.value() == doctest::Approx(1.0).epsilon(1e-11));
        CHECK(poisson_upper_tail(lambda, top) < 1e-12);
    }
}

TEST_CASE("erlang_pdf basics") {
    CHECK(erlang_pdf(1, 3.0, 0.0) == 3.0);
    CHECK(erlang_pdf(2, 3.0, 0.0) == 0.0);
    CHECK(erlang_pdf(2, 1.0, 1.0) == doctest::Approx(0.36787944117144233).epsilon(1e-12));
    CHECK_THROWS(erlang_pdf(0, 1.0, 0.5));
    CHECK_THROWS(erlang_pdf(1, -1.0, 0.5));
    CHECK_THROWS(erlang_pdf(1, 1.0, -0.5));
}

TEST_CASE("erlang density integrates to one") {
    for (auto [k, gamma] : {std::pair<int, double>{1, 0.5}, {3, 2.0}, {17, 4.0}, {50, 1.0}}) {
        double upper = (k + 14.0 * std::sqrt(double(k))) / gamma + 5.0;
        double mass = adaptive_simpson(
            [k = k, gamma = gamma](double x) { return erlang_pdf(k, gamma, x); }, 0.0,
            upper, 1e-10);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
}

// int_0^s Erl_{l-w,gamma}(s-v) Poi_{gamma v}(w) dv = Poi_{gamma s}(l),
// checked by independent quadrature.
TEST_CASE("erlang-poisson convolution identity") {
    const int ell = 5, w = 2;
    const double gamma = 3.0, s = 1.7;
    double quad = adaptive_simpson(
        [&](double v) {
            return erlang_pdf(ell - w, gamma, s - v) * poisson_pmf(gamma * v, w);
        },
        0.0, s, 1e-11);
    CHECK(std::abs(quad - poisson_pmf(gamma * s, ell)) <= 1e-8);
}

TEST_CASE("grid_deviation on a synthetic deterministic grid is zero") {
    PoissonGrid g;
    g.gamma = 4.0;
    for (int k = 0; k <= 40; ++k) g.arrivals.push_back(k / 4.0);
    CHECK(grid_deviation(g, 0.3) == 0.0);
}

TEST_CASE("grid_deviation with one arrival") {
    PoissonGrid g;
    g.gamma = 1.0;
    g.arrivals = {0.0, 1.37};
    CHECK(grid_deviation(g, 0.5) == doctest::Approx(std::abs(1.37 - 1.0)));
}

// statistical check of the deterministic-grid convergence bound with the
// explicit q = 2 constant
TEST_CASE("grid deviation stays below the log-gamma bound for most seeds") {
    const double gamma = 100.0, eps = 0.1;
    const double bound =
        2.0 * std::exp(0.5 + eps / 2.0 + 4.0) * std::log(gamma) * std::pow(gamma, -0.45);
    int ok = 0;
    const int seeds = 500;
    int min_len = int(std::pow(gamma, 1.0 + eps)) + 1;
    for (int s = 0; s < seeds; ++s) {
        PoissonGrid g = sample_grid(gamma, 1.0, 1e-6, std::uint64_t(s) + 77, min_len);
        if (grid_deviation(g, eps) <= bound) ++ok;
    }
    CHECK(ok >= int(0.95 * seeds));
}
