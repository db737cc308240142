#include <doctest.h>

#include <cmath>

#include "smj/intensity.hpp"
#include "smj/rng.hpp"

using namespace smj;

namespace {

IntensityFamily two_state_absorbing(double mu) {
    IntensityFamily fam;
    fam.states = 2;
    fam.gamma0 = mu;
    fam.eval_into = [mu](double, double, Matrix& m) {
        m.setZero(2, 2);
        m(0, 0) = -mu;
        m(0, 1) = mu;
    };
    return fam;
}

std::vector<std::pair<double, double>> square_grid(double s0, double s1, double v0,
                                                   double v1, int n) {
    std::vector<std::pair<double, double>> grid;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            grid.emplace_back(s0 + (s1 - s0) * a / (n - 1), v0 + (v1 - v0) * b / (n - 1));
    return grid;
}

}  // namespace

TEST_CASE("validate accepts a constant conservative family") {
    ValidationReport report = validate(two_state_absorbing(1.0), square_grid(0, 5, 0, 5, 4));
    CHECK(report.valid);
    CHECK(report.inferred_bound == doctest::Approx(1.0));
    CHECK(report.inferred_bound <= 1.0 + 1e-12);
}

TEST_CASE("validate flags a negative off-diagonal entry") {
    IntensityFamily bad;
    bad.states = 2;
    bad.gamma0 = 1.0;
    bad.eval_into = [](double s, double, Matrix& m) {
        m.setZero(2, 2);
        m(0, 1) = s > 2.0 ? -0.5 : 0.5;
        m(0, 0) = -m(0, 1);
    };
    ValidationReport report = validate(bad, square_grid(0, 4, 0, 1, 5));
    CHECK(!report.valid);
    bool found = false;
    for (const auto& v : report.violations)
        if (v.kind == "sign" && v.i == 1 && v.j == 2 && v.s > 2.0) found = true;
    CHECK(found);
}

TEST_CASE("validate requires a non-empty grid") {
    CHECK_THROWS(validate(two_state_absorbing(1.0), {}));
}

TEST_CASE("shipped disability parameters validate on the age window") {
    IntensityFamily fam = disability_family(illustrative_disability_rates(), 0.0,
                                            kIllustrativeGamma0, kIllustrativeLipschitzK);
    // ages 25..67 x durations 0..5, as an age-indexed family (age0 = 0)
    ValidationReport report = validate(fam, square_grid(25, 67, 0, 5, 43));
    CHECK(report.valid);
    CHECK(report.inferred_bound < kIllustrativeGamma0);
}

TEST_CASE("disability family: dead state is absorbing and diagonals balance") {
    IntensityFamily fam = disability_family(illustrative_disability_rates(), 40.0,
                                            kIllustrativeGamma0, kIllustrativeLipschitzK);
    for (auto [s, v] : square_grid(0, 5, 0, 5, 6)) {
        Matrix lam = fam.eval(s, v);
        for (int j = 0; j < 3; ++j) CHECK(lam(2, j) == 0.0);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(lam.row(i).sum()) <= 1e-12);
    }
}

TEST_CASE("disability incidence is clamped below 25 and above 67") {
    DisabilityRates rates = illustrative_disability_rates();
    for (double v : {0.0, 1.0, 3.7}) {
        (void)v;
        CHECK(rates.active_to_disabled(20.0) == rates.active_to_disabled(25.0));
        CHECK(rates.active_to_disabled(80.0) == rates.active_to_disabled(67.0));
    }
    CHECK(rates.active_to_disabled(40.0) != rates.active_to_disabled(41.0));
}

TEST_CASE("recovery rate matches its closed form on the first duration branch") {
    DisabilityRates r = illustrative_disability_rates();
    double expected = std::exp(r.phi3 + r.beta1 * 40.0 + r.theta3 * 0.1);
    CHECK(r.recovery(40.0, 0.1) == doctest::Approx(expected).epsilon(1e-15));
    double expected2 = std::exp(r.alpha1 + r.eta1 * 40.0 + r.zeta1 * 2.0);
    CHECK(r.disabled_to_dead(40.0, 2.0) == doctest::Approx(expected2).epsilon(1e-15));
}

TEST_CASE("recovery and disabled-mortality rates are continuous at the breakpoints") {
    DisabilityRates r = illustrative_disability_rates();
    for (double age : {30.0, 45.0, 62.0}) {
        for (double b : {0.23, 2.0, 5.0})
            CHECK(r.recovery(age, b) ==
                  doctest::Approx(r.recovery(age, b + 1e-12)).epsilon(1e-9));
        CHECK(r.disabled_to_dead(age, 5.0) ==
              doctest::Approx(r.disabled_to_dead(age, 5.0 + 1e-12)).epsilon(1e-9));
    }
}

TEST_CASE("mortality spline interpolates its knots and extrapolates flat") {
    DisabilityRates r = illustrative_disability_rates();
    for (std::size_t k = 0; k < r.mortality_ages.size(); ++k)
        CHECK(r.active_to_dead(r.mortality_ages[k]) ==
              doctest::Approx(r.mortality_rates[k]).epsilon(1e-12));
    CHECK(r.active_to_dead(10.0) == doctest::Approx(r.mortality_rates.front()));
    CHECK(r.active_to_dead(120.0) == doctest::Approx(r.mortality_rates.back()));
}

TEST_CASE("augment blocks reproduce the shifted family") {
    IntensityFamily fam = disability_family(illustrative_disability_rates(), 0.0,
                                            kIllustrativeGamma0, kIllustrativeLipschitzK);
    double t0 = 40.0, u0 = 1.0;
    IntensityFamily aug = augment(fam, t0, u0);
    CHECK(aug.states == 6);
    CHECK(aug.gamma0 == fam.gamma0);

    double s = 2.0, v = 0.5;
    Matrix big = aug.eval(s, v);
    Matrix shifted = fam.eval(42.0, 1.5);
    Matrix reset = fam.eval(42.0, 0.5);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(big(i, j) == (i == j ? shifted(i, i) : 0.0));
            CHECK(big(i, 3 + j) == (i == j ? 0.0 : shifted(i, j)));
            CHECK(big(3 + i, j) == 0.0);
            CHECK(big(3 + i, 3 + j) == reset(i, j));
        }
    // conservativity is preserved
    for (int i = 0; i < 6; ++i) CHECK(std::abs(big.row(i).sum()) <= 1e-12);
}

TEST_CASE("augment at (0,0) splits the family into diagonal and off-diagonal parts") {
    IntensityFamily fam = two_state_absorbing(1.0);
    Matrix big = augment(fam, 0.0, 0.0).eval(0.7, 0.3);
    Matrix base = fam.eval(0.7, 0.3);
    CHECK(big(0, 0) == base(0, 0));
    CHECK(big(0, 1) == 0.0);
    CHECK(big(0, 2) == 0.0);
    CHECK(big(0, 3) == base(0, 1));
    CHECK(big(2, 2) == base(0, 0));
}

TEST_CASE("augment rejects negative offsets") {
    CHECK_THROWS(augment(two_state_absorbing(1.0), -1.0, 0.0));
    CHECK_THROWS(augment(two_state_absorbing(1.0), 0.0, -0.5));
}

TEST_CASE("lipschitz audit stays below the declared constant") {
    IntensityFamily fam = disability_family(illustrative_disability_rates(), 0.0,
                                            kIllustrativeGamma0, kIllustrativeLipschitzK);
    Rng rng(991);
    std::vector<std::array<double, 4>> pairs;
    for (int k = 0; k < 500; ++k)
        pairs.push_back({25.0 + 42.0 * rng.uniform(), 6.0 * rng.uniform(),
                         25.0 + 42.0 * rng.uniform(), 6.0 * rng.uniform()});
    double ratio = lipschitz_ratio(fam, pairs);
    CHECK(ratio > 0.0);
    CHECK(ratio <= kIllustrativeLipschitzK);
}

TEST_CASE("cubic spline is exact on straight-line data") {
    CubicSpline s({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
    CHECK(s(1.5) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(s(2.25) == doctest::Approx(5.5).epsilon(1e-12));
    CHECK(s(-2.0) == 1.0);
    CHECK(s(9.0) == 7.0);
    CHECK_THROWS(CubicSpline({0.0, 0.0}, {1.0, 2.0}));
}
