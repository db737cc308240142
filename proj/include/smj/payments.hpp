#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace smj {

// Lump ΔB^{j,v}(t): amount paid at a fixed time while sojourning in `state`
// with duration >= v_min.
struct DiscretePayment {
    double time = 0.0;
    int state = 0;  // 0-based
    double v_min = 0.0;
    double amount = 0.0;
};

// Payment contract: sojourn rate b^{j,v}(s), transition lumps
// b^{(j,v),(k,0)}(s), and discrete payments, over horizon [0, T].
struct PaymentSpec {
    int states = 0;
    double horizon = 0.0;
    std::function<double(int j, double v, double s)> rate;
    std::function<double(int j, double v, int k, double s)> lump;
    std::vector<DiscretePayment> discrete;
    bool duration_independent = false;       // b and lump both ignore v
    bool lump_duration_independent = false;  // lump alone ignores v
    bool has_lumps = true;                   // false skips jump-measure work
    double initial_premium = 0.0;            // b0 <= 0; premium solve only
    std::vector<double> s_breakpoints;       // payment discontinuities in s

    static PaymentSpec zero(int states, double horizon);
};

// Deterministic nonnegative short rate, piecewise constant; the cumulative
// integral is exact.
struct DiscountCurve {
    std::vector<double> times;  // breakpoints, times[0] == 0
    std::vector<double> rates;

    double integral(double s) const;  // \int_0^s r
    double factor(double s) const { return std::exp(-integral(s)); }
    DiscountCurve shifted(double t0) const;

    static DiscountCurve flat(double r);
};

// Payments under the 2J-state augmentation with offsets (t0, u0): block-0
// states read the running duration u0 + v, block-1 states read v; times
// shift by t0. Transitions landing in block 0 cannot occur and pay nothing.
PaymentSpec augment_payments(const PaymentSpec& base, double t0, double u0);

// a + c * b (same states/horizon); used by the premium solver.
PaymentSpec combine_payments(const PaymentSpec& a, const PaymentSpec& b, double c);

}  // namespace smj
