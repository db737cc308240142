#include "smj/expr.hpp"

#include <algorithm>
#include <cmath>

namespace smj {

namespace {
double horner(const std::vector<double>& coeffs, double x) {
    if (coeffs.empty()) return 1.0;
    double p = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) p = p * x + *it;
    return p;
}
}  // namespace

double eval_term(const FuncTerm& term, double s, double v) {
    if (term.s_window && (s < (*term.s_window)[0] || s > (*term.s_window)[1])) return 0.0;
    if (term.v_min && v < *term.v_min) return 0.0;
    double sc = term.s_clamp ? std::clamp(s, (*term.s_clamp)[0], (*term.s_clamp)[1]) : s;
    double vc = term.v_clamp ? std::clamp(v, (*term.v_clamp)[0], (*term.v_clamp)[1]) : v;
    double out = term.scale * horner(term.poly_s, sc) * horner(term.poly_v, vc);
    if (term.exp_s != 0.0 || term.exp_v != 0.0)
        out *= std::exp(term.exp_s * sc + term.exp_v * vc);
    return out;
}

double eval_terms(const std::vector<FuncTerm>& terms, double s, double v) {
    double total = 0.0;
    for (const auto& t : terms) total += eval_term(t, s, v);
    return total;
}

bool terms_depend_on_duration(const std::vector<FuncTerm>& terms) {
    for (const auto& t : terms)
        if (t.v_min || t.exp_v != 0.0 || !t.poly_v.empty()) return true;
    return false;
}

}  // namespace smj
