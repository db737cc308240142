#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace smj {

// Kahan compensated accumulator.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Trapezoid rule over tabulated values with uniform spacing h.
inline double trapezoid(const std::vector<double>& f, double h) {
    if (f.size() < 2) return 0.0;
    KahanSum acc;
    acc.add(0.5 * f.front());
    for (std::size_t k = 1; k + 1 < f.size(); ++k) acc.add(f[k]);
    acc.add(0.5 * f.back());
    return acc.value() * h;
}

// Composite Simpson over [a,b] with n subintervals (n made even internally).
template <typename F>
double simpson(F&& f, double a, double b, int n) {
    if (n < 2) n = 2;
    if (n % 2 != 0) ++n;
    double h = (b - a) / n;
    KahanSum acc;
    acc.add(f(a));
    acc.add(f(b));
    for (int k = 1; k < n; ++k) acc.add((k % 2 == 1 ? 4.0 : 2.0) * f(a + k * h));
    return acc.value() * h / 3.0;
}

// Simpson refined until successive halvings agree within tol (abs).
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol, int n0 = 64,
                        int n_max = 1 << 20) {
    double prev = simpson(f, a, b, n0);
    for (int n = 2 * n0; n <= n_max; n *= 2) {
        double cur = simpson(f, a, b, n);
        if (std::abs(cur - prev) < tol) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace smj
