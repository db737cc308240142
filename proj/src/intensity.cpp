#include "smj/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace smj {

namespace {
constexpr double kRowSumTol = 1e-12;
}

ValidationReport validate(const IntensityFamily& family,
                          const std::vector<std::pair<double, double>>& sample_grid) {
    ValidationReport report;
    if (sample_grid.empty())
        throw std::invalid_argument("validate: sample_grid must be non-empty");
    Matrix lam(family.states, family.states);
    for (auto [s, v] : sample_grid) {
        family.eval_into(s, v, lam);
        for (int i = 0; i < family.states; ++i) {
            double row = 0.0;
            for (int j = 0; j < family.states; ++j) {
                double x = lam(i, j);
                if (!std::isfinite(x)) {
                    report.violations.push_back({"non_finite", s, v, i + 1, j + 1, x});
                    continue;
                }
                row += x;
                if (i != j && x < 0.0)
                    report.violations.push_back({"sign", s, v, i + 1, j + 1, x});
            }
            double diag = std::abs(lam(i, i));
            report.inferred_bound = std::max(report.inferred_bound, diag);
            if (diag > family.gamma0 + kRowSumTol)
                report.violations.push_back({"diag_bound", s, v, i + 1, -1, diag});
            if (std::abs(row) > kRowSumTol)
                report.violations.push_back({"row_sum", s, v, i + 1, -1, row});
        }
    }
    report.valid = report.violations.empty();
    return report;
}

double lipschitz_ratio(const IntensityFamily& family,
                       const std::vector<std::array<double, 4>>& pairs) {
    double worst = 0.0;
    Matrix a(family.states, family.states), b(family.states, family.states);
    for (const auto& p : pairs) {
        double dist = std::abs(p[0] - p[2]) + std::abs(p[1] - p[3]);
        if (dist <= 0.0) continue;
        family.eval_into(p[0], p[1], a);
        family.eval_into(p[2], p[3], b);
        double tv = (a - b).cwiseAbs().rowwise().sum().maxCoeff();
        worst = std::max(worst, tv / dist);
    }
    return worst;
}

IntensityFamily augment(const IntensityFamily& family, double t0, double u0) {
    if (t0 < 0.0 || u0 < 0.0)
        throw std::invalid_argument("augment: t0 and u0 must be >= 0");
    int j = family.states;
    auto base = std::make_shared<IntensityFamily>(family);
    IntensityFamily out;
    out.states = 2 * j;
    out.gamma0 = family.gamma0;
    out.lipschitz_k = family.lipschitz_k;
    out.eval_into = [base, j, t0, u0](double s, double v, Matrix& m) {
        Matrix shifted(j, j), reset(j, j);
        base->eval_into(t0 + s, u0 + v, shifted);
        base->eval_into(t0 + s, v, reset);
        m.setZero(2 * j, 2 * j);
        for (int i = 0; i < j; ++i) m(i, i) = shifted(i, i);
        m.topRightCorner(j, j) = shifted;
        for (int i = 0; i < j; ++i) m(i, j + i) = 0.0;
        m.bottomRightCorner(j, j) = reset;
    };
    return out;
}

// ---- natural cubic spline ----

CubicSpline::CubicSpline(std::vector<double> xs, std::vector<double> ys)
    : x_(std::move(xs)), y_(std::move(ys)) {
    std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw std::invalid_argument("CubicSpline: need >= 2 knots with matching values");
    for (std::size_t k = 1; k < n; ++k)
        if (!(x_[k] > x_[k - 1]))
            throw std::invalid_argument("CubicSpline: knots must be strictly increasing");

    m_.assign(n, 0.0);
    if (n == 2) return;
    // tridiagonal solve for interior second derivatives (natural ends)
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), sub(n, 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        double h0 = x_[k] - x_[k - 1];
        double h1 = x_[k + 1] - x_[k];
        sub[k] = h0;
        diag[k] = 2.0 * (h0 + h1);
        rhs[k] = 6.0 * ((y_[k + 1] - y_[k]) / h1 - (y_[k] - y_[k - 1]) / h0);
    }
    for (std::size_t k = 2; k + 1 < n; ++k) {
        double w = sub[k] / diag[k - 1];
        diag[k] -= w * (x_[k] - x_[k - 1]);
        rhs[k] -= w * rhs[k - 1];
    }
    for (std::size_t k = n - 2; k >= 1; --k) {
        double upper = (k + 2 < n) ? (x_[k + 1] - x_[k]) * m_[k + 1] : 0.0;
        m_[k] = (rhs[k] - upper) / diag[k];
        if (k == 1) break;
    }
}

double CubicSpline::operator()(double t) const {
    if (t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t k = std::size_t(it - x_.begin()) - 1;
    double h = x_[k + 1] - x_[k];
    double a = (x_[k + 1] - t) / h;
    double b = (t - x_[k]) / h;
    return a * y_[k] + b * y_[k + 1] +
           ((a * a * a - a) * m_[k] + (b * b * b - b) * m_[k + 1]) * h * h / 6.0;
}

// ---- disability model ----

namespace {
CubicSpline log_mortality_spline(const DisabilityRates& rates) {
    std::vector<double> logs(rates.mortality_rates.size());
    for (std::size_t k = 0; k < logs.size(); ++k) logs[k] = std::log(rates.mortality_rates[k]);
    return CubicSpline(rates.mortality_ages, logs);
}
}  // namespace

double DisabilityRates::active_to_dead(double age) const {
    return std::exp(log_mortality_spline(*this)(age));
}

double DisabilityRates::active_to_disabled(double age) const {
    double t = std::clamp(age, kIncidenceClampLow, kIncidenceClampHigh);
    double x = t - incidence_center;
    double p = 0.0;
    for (int k = 5; k >= 0; --k) p = p * x + log_incidence_coeffs[std::size_t(k)];
    return std::exp(p);
}

double DisabilityRates::recovery(double age, double dur) const {
    if (dur <= kRecoveryBreak1) return std::exp(phi3 + beta1 * age + theta3 * dur);
    if (dur <= kRecoveryBreak2) return std::exp(phi2 + beta1 * age + theta2 * dur);
    if (dur <= kRecoveryBreak3) return std::exp(phi1 + beta1 * age + theta1 * dur);
    return std::exp(phi0 + beta2 * age);
}

double DisabilityRates::disabled_to_dead(double age, double dur) const {
    if (dur <= kMortalityBreak) return std::exp(alpha1 + eta1 * age + zeta1 * dur);
    return std::exp(alpha2 + eta2 * age);
}

DisabilityRates illustrative_disability_rates() {
    DisabilityRates r;
    r.mortality_ages = {20, 30, 40, 50, 60, 70, 80, 90};
    r.mortality_rates = {4.0e-4, 5.5e-4, 9.0e-4, 2.2e-3, 5.5e-3, 1.4e-2, 3.8e-2, 1.1e-1};
    r.log_incidence_coeffs = {-5.116, 0.055, 8.0e-4, -2.0e-5, -6.0e-7, 1.0e-8};
    r.incidence_center = 46.0;
    r.beta1 = -0.045;
    r.beta2 = -0.045;
    r.theta3 = -2.2;
    r.theta2 = -0.45;
    r.theta1 = -0.30;
    r.phi3 = 1.913;
    r.phi2 = r.phi3 + (r.theta3 - r.theta2) * DisabilityRates::kRecoveryBreak1;
    r.phi1 = r.phi2 + (r.theta2 - r.theta1) * DisabilityRates::kRecoveryBreak2;
    r.phi0 = r.phi1 + r.theta1 * DisabilityRates::kRecoveryBreak3;
    r.alpha1 = -7.8;
    r.eta1 = 0.075;
    r.zeta1 = 0.035;
    r.alpha2 = r.alpha1 + DisabilityRates::kMortalityBreak * r.zeta1;
    r.eta2 = r.eta1;
    return r;
}

IntensityFamily disability_family(const DisabilityRates& rates, double age0,
                                  double gamma0, std::optional<double> lipschitz_k) {
    if (rates.mortality_ages.size() < 2)
        throw std::invalid_argument("disability_family: mortality spline needs >= 2 knots");
    for (double r : rates.mortality_rates)
        if (!(r > 0.0) || !std::isfinite(r))
            throw std::invalid_argument("disability_family: mortality rates must be positive");

    auto shared = std::make_shared<DisabilityRates>(rates);
    auto spline = std::make_shared<CubicSpline>(log_mortality_spline(rates));
    for (double t = age0; t <= age0 + 60.0; t += 2.5) {
        for (double u = 0.0; u <= 10.0; u += 0.5) {
            double sum = std::exp((*spline)(t)) + shared->active_to_disabled(t) +
                         shared->recovery(t, u) + shared->disabled_to_dead(t, u);
            if (!std::isfinite(sum))
                throw std::invalid_argument("disability_family: non-finite rate at age " +
                                            std::to_string(t));
        }
    }

    IntensityFamily fam;
    fam.states = 3;
    fam.gamma0 = gamma0;
    fam.lipschitz_k = lipschitz_k;
    fam.eval_into = [shared, spline, age0](double s, double v, Matrix& m) {
        double age = age0 + s;
        double l12 = shared->active_to_disabled(age);
        double l13 = std::exp((*spline)(age));
        double l21 = shared->recovery(age, v);
        double l23 = shared->disabled_to_dead(age, v);
        m.setZero(3, 3);
        m(0, 1) = l12;
        m(0, 2) = l13;
        m(0, 0) = -(l12 + l13);
        m(1, 0) = l21;
        m(1, 2) = l23;
        m(1, 1) = -(l21 + l23);
        // row 3: dead is absorbing
    };
    return fam;
}

}  // namespace smj
