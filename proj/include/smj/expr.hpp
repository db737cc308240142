#pragma once

#include <array>
#include <optional>
#include <vector>

namespace smj {

// One multiplicative term of the restricted (s, v) expression vocabulary:
//   scale * 1{s in s_window} * 1{v >= v_min}
//         * exp(exp_s * sc + exp_v * vc) * poly_s(sc) * poly_v(vc)
// where sc / vc are s / v after optional clamping. Sums of terms cover the
// payment and intensity forms used by the shipped models (indicators,
// exponentials, polynomials, clamps).
struct FuncTerm {
    double scale = 1.0;
    std::optional<std::array<double, 2>> s_window;
    std::optional<double> v_min;
    double exp_s = 0.0;
    double exp_v = 0.0;
    std::vector<double> poly_s;  // coefficients, ascending powers; empty = 1
    std::vector<double> poly_v;
    std::optional<std::array<double, 2>> s_clamp;
    std::optional<std::array<double, 2>> v_clamp;
};

double eval_term(const FuncTerm& term, double s, double v);
double eval_terms(const std::vector<FuncTerm>& terms, double s, double v);

// true when any term reads v
bool terms_depend_on_duration(const std::vector<FuncTerm>& terms);

}  // namespace smj
