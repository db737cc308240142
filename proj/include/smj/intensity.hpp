#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace smj {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Family of J x J intensity matrices Lambda(s, v): time s, duration v.
// Off-diagonals >= 0, rows sum to 0, |Lambda_ii| <= gamma0 everywhere the
// family is evaluated. eval_into must be deterministic and reentrant.
struct IntensityFamily {
    int states = 0;
    std::function<void(double s, double v, Matrix& out)> eval_into;
    double gamma0 = 0.0;
    std::optional<double> lipschitz_k;

    Matrix eval(double s, double v) const {
        Matrix out(states, states);
        eval_into(s, v, out);
        return out;
    }
};

struct Violation {
    std::string kind;  // "sign" | "row_sum" | "diag_bound" | "non_finite"
    double s = 0.0;
    double v = 0.0;
    int i = -1;  // 1-based row, -1 when not entry-specific
    int j = -1;  // 1-based column
    double value = 0.0;
};

struct ValidationReport {
    bool valid = true;
    double inferred_bound = 0.0;  // max |Lambda_ii| observed on the grid
    std::vector<Violation> violations;
};

// Samples the family on the grid and reports every sign / row-sum /
// diagonal-bound violation. Never throws; failures live in the report.
ValidationReport validate(const IntensityFamily& family,
                          const std::vector<std::pair<double, double>>& sample_grid);

// max over pairs {(s1,v1),(s2,v2)} of rowTV(Lambda(s1,v1) - Lambda(s2,v2))
// divided by |s1-s2| + |v1-v2|; an observed lower bound for the Lipschitz
// modulus of the family.
double lipschitz_ratio(const IntensityFamily& family,
                       const std::vector<std::array<double, 4>>& pairs);

// 2J-state family encoding initial time t0 and duration u0. States [0,J)
// form the "no reset yet" block (duration continues from u0), states [J,2J)
// the "reset occurred" block. gamma0 and the Lipschitz constant carry over.
IntensityFamily augment(const IntensityFamily& family, double t0, double u0);

// Natural cubic spline with flat extrapolation outside the knot range.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> xs, std::vector<double> ys);
    double operator()(double t) const;

private:
    std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
};

// Disability model rates (3 states: 1 active, 2 disabled, 3 dead).
// Functional forms follow the semi-Markov disability model; the shipped
// parameter values are illustrative, not calibrated to any portfolio.
struct DisabilityRates {
    // 1 -> 3: natural cubic spline through (age, log rate), duration-free
    std::vector<double> mortality_ages;
    std::vector<double> mortality_rates;

    // 1 -> 2: exp of a fifth-order polynomial in (age - incidence_center),
    // constant below age 25 and above age 67, duration-free
    std::array<double, 6> log_incidence_coeffs{};
    double incidence_center = 0.0;

    // 2 -> 1: piecewise exponential in (age, duration), breaks at 0.23/2/5
    double phi0 = 0, phi1 = 0, phi2 = 0, phi3 = 0;
    double beta1 = 0, beta2 = 0;
    double theta1 = 0, theta2 = 0, theta3 = 0;

    // 2 -> 3: piecewise exponential in (age, duration), break at 5
    double alpha1 = 0, alpha2 = 0;
    double eta1 = 0, eta2 = 0;
    double zeta1 = 0;

    double active_to_dead(double age) const;
    double active_to_disabled(double age) const;
    double recovery(double age, double dur) const;
    double disabled_to_dead(double age, double dur) const;

    static constexpr double kIncidenceClampLow = 25.0;
    static constexpr double kIncidenceClampHigh = 67.0;
    static constexpr double kRecoveryBreak1 = 0.23;
    static constexpr double kRecoveryBreak2 = 2.0;
    static constexpr double kRecoveryBreak3 = 5.0;
    static constexpr double kMortalityBreak = 5.0;
};

// 3-state family evaluating the disability rates at age0 + s. Throws if the
// rates are non-finite anywhere on a coarse scan of [age0, age0+60]x[0,10].
IntensityFamily disability_family(const DisabilityRates& rates, double age0,
                                  double gamma0,
                                  std::optional<double> lipschitz_k = std::nullopt);

// Illustrative parameter set used by the shipped configs: not calibrated to
// any portfolio, chained for continuity across the duration breakpoints.
// max |Lambda_ii| is about 2.20 for ages >= 25 (bound 2.5) and the row-TV
// Lipschitz modulus is about 9.9 on ages [25,67] x durations [0,6] (K 12).
DisabilityRates illustrative_disability_rates();

inline constexpr double kIllustrativeGamma0 = 2.5;
inline constexpr double kIllustrativeLipschitzK = 12.0;

}  // namespace smj
