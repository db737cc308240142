#include "smj/payments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smj {

PaymentSpec PaymentSpec::zero(int states, double horizon) {
    PaymentSpec p;
    p.states = states;
    p.horizon = horizon;
    p.rate = [](int, double, double) { return 0.0; };
    p.lump = [](int, double, int, double) { return 0.0; };
    p.duration_independent = true;
    p.lump_duration_independent = true;
    p.has_lumps = false;
    return p;
}

double DiscountCurve::integral(double s) const {
    if (times.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        double lo = times[k];
        double hi = (k + 1 < times.size()) ? times[k + 1] : s;
        if (s <= lo) break;
        acc += rates[k] * (std::min(s, hi) - lo);
        if (s <= hi) break;
    }
    return acc;
}

DiscountCurve DiscountCurve::shifted(double t0) const {
    DiscountCurve out;
    out.times.push_back(0.0);
    out.rates.push_back(rates.empty() ? 0.0 : rates.front());
    for (std::size_t k = 0; k < times.size(); ++k) {
        double t = times[k] - t0;
        double r = rates[k];
        if (t <= 0.0) {
            out.rates.front() = r;
        } else {
            out.times.push_back(t);
            out.rates.push_back(r);
        }
    }
    return out;
}

DiscountCurve DiscountCurve::flat(double r) {
    if (r < 0.0) throw std::invalid_argument("DiscountCurve: rate must be >= 0");
    return {{0.0}, {r}};
}

PaymentSpec augment_payments(const PaymentSpec& base, double t0, double u0) {
    if (t0 < 0.0 || u0 < 0.0)
        throw std::invalid_argument("augment_payments: t0 and u0 must be >= 0");
    if (t0 > base.horizon)
        throw std::invalid_argument("augment_payments: t0 beyond horizon");
    int j = base.states;
    PaymentSpec out;
    out.states = 2 * j;
    out.horizon = base.horizon - t0;
    out.duration_independent = base.duration_independent;
    out.lump_duration_independent = base.lump_duration_independent;
    out.has_lumps = base.has_lumps;
    out.initial_premium = base.initial_premium;

    auto rate = base.rate;
    auto lump = base.lump;
    out.rate = [rate, j, t0, u0](int state, double v, double s) {
        if (state < j) return rate(state, u0 + v, t0 + s);
        return rate(state - j, v, t0 + s);
    };
    out.lump = [lump, j, t0, u0](int from, double v, int to, double s) {
        if (to < j) return 0.0;  // block 0 is unreachable as a target
        int k = to - j;
        if (from < j) return from == k ? 0.0 : lump(from, u0 + v, k, t0 + s);
        return (from - j) == k ? 0.0 : lump(from - j, v, k, t0 + s);
    };
    for (const auto& d : base.discrete) {
        double t = d.time - t0;
        if (t < 0.0 || t > out.horizon) continue;
        out.discrete.push_back({t, d.state, std::max(0.0, d.v_min - u0), d.amount});
        out.discrete.push_back({t, d.state + j, d.v_min, d.amount});
    }
    for (double b : base.s_breakpoints) {
        double t = b - t0;
        if (t > 0.0 && t < out.horizon) out.s_breakpoints.push_back(t);
    }
    return out;
}

PaymentSpec combine_payments(const PaymentSpec& a, const PaymentSpec& b, double c) {
    if (a.states != b.states || a.horizon != b.horizon)
        throw std::invalid_argument("combine_payments: shape mismatch");
    PaymentSpec out;
    out.states = a.states;
    out.horizon = a.horizon;
    out.duration_independent = a.duration_independent && b.duration_independent;
    out.lump_duration_independent =
        a.lump_duration_independent && b.lump_duration_independent;
    out.has_lumps = a.has_lumps || b.has_lumps;
    out.initial_premium = a.initial_premium + c * b.initial_premium;
    auto ra = a.rate, rb = b.rate;
    auto la = a.lump, lb = b.lump;
    out.rate = [ra, rb, c](int s1, double v, double s) {
        return ra(s1, v, s) + c * rb(s1, v, s);
    };
    out.lump = [la, lb, c](int j, double v, int k, double s) {
        return la(j, v, k, s) + c * lb(j, v, k, s);
    };
    out.discrete = a.discrete;
    for (auto d : b.discrete) {
        d.amount *= c;
        out.discrete.push_back(d);
    }
    out.s_breakpoints = a.s_breakpoints;
    out.s_breakpoints.insert(out.s_breakpoints.end(), b.s_breakpoints.begin(),
                             b.s_breakpoints.end());
    std::sort(out.s_breakpoints.begin(), out.s_breakpoints.end());
    return out;
}

}  // namespace smj
