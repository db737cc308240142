#include "smj/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smj/numeric.hpp"

namespace smj {

int PathRecord::state_at(double t) const {
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    if (it == jump_times.begin()) return initial_state;
    return states[std::size_t(it - jump_times.begin()) - 1];
}

double PathRecord::duration_at(double t) const {
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    if (it == jump_times.begin()) return initial_duration + t;
    return t - *(it - 1);
}

PathRecord simulate_path(const IntensityFamily& family, double rate, double horizon,
                         int i0, double u0, Rng& rng) {
    if (rate < family.gamma0)
        throw std::invalid_argument("simulate_path: rate below gamma0 bound");
    if (i0 < 0 || i0 >= family.states)
        throw std::invalid_argument("simulate_path: bad initial state");
    PathRecord path;
    path.horizon = horizon;
    path.initial_state = i0;
    path.initial_duration = u0;

    Matrix lam(family.states, family.states);
    int state = i0;
    double t = 0.0;
    double v = u0;
    while (true) {
        double dt = rng.exponential(rate);
        t += dt;
        if (t > horizon) break;
        v += dt;
        family.eval_into(t, v, lam);
        double y = rng.uniform();
        double cum = 0.0;
        int next = state;
        for (int k = 0; k < family.states; ++k) {
            double p = lam(state, k) / rate + (k == state ? 1.0 : 0.0);
            cum += p;
            if (y < cum) {
                next = k;
                break;
            }
        }
        if (next != state) {
            path.jump_times.push_back(t);
            path.states.push_back(next);
            state = next;
            v = 0.0;
        }
    }
    return path;
}

namespace {

double pick_rate(const IntensityFamily& family, double rate) {
    if (rate <= 0.0) return std::max(family.gamma0, 1e-12);
    return rate;
}

constexpr long kChunk = 4096;

}  // namespace

McCurve mc_cashflow(const IntensityFamily& family, const PaymentSpec& payments,
                    int i0, double u0, long n_paths,
                    const std::vector<double>& s_grid, std::uint64_t seed,
                    double rate) {
    if (n_paths < 1) throw std::invalid_argument("mc_cashflow: n_paths must be >= 1");
    if (s_grid.size() < 1) throw std::invalid_argument("mc_cashflow: empty s_grid");
    rate = pick_rate(family, rate);
    std::size_t n = s_grid.size();
    double h = n >= 2 ? s_grid[1] - s_grid[0] : payments.horizon;
    double lo = s_grid.front() - 0.5 * h;

    std::vector<KahanSum> sum(n), sumsq(n);
    std::vector<double> x(n);
    long done = 0;
    std::uint64_t chunk = 0;
    while (done < n_paths) {
        long batch = std::min(kChunk, n_paths - done);
        Rng rng(mix_seed(seed, chunk++));
        for (long p = 0; p < batch; ++p) {
            PathRecord path = simulate_path(family, rate, payments.horizon, i0, u0, rng);
            std::fill(x.begin(), x.end(), 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                double s = s_grid[k];
                x[k] = payments.rate(path.state_at(s), path.duration_at(s), s);
            }
            if (payments.has_lumps) {
                int prev = path.initial_state;
                double last = 0.0;
                double dur0 = path.initial_duration;
                for (std::size_t j = 0; j < path.jump_times.size(); ++j) {
                    double tau = path.jump_times[j];
                    double dur = tau - last + (j == 0 ? dur0 : 0.0);
                    long bin = std::lround(std::floor((tau - lo) / h));
                    if (bin >= 0 && bin < long(n))
                        x[std::size_t(bin)] +=
                            payments.lump(prev, dur, path.states[j], tau) / h;
                    prev = path.states[j];
                    last = tau;
                }
            }
            for (const auto& d : payments.discrete) {
                if (path.state_at(d.time) != d.state) continue;
                if (path.duration_at(d.time) < d.v_min) continue;
                long bin = std::lround(std::floor((d.time - lo) / h));
                if (bin >= 0 && bin < long(n)) x[std::size_t(bin)] += d.amount / h;
            }
            for (std::size_t k = 0; k < n; ++k) {
                sum[k].add(x[k]);
                sumsq[k].add(x[k] * x[k]);
            }
        }
        done += batch;
    }

    McCurve out;
    out.s_grid = s_grid;
    out.n_paths = n_paths;
    out.seed = seed;
    out.mean.resize(n);
    out.se.resize(n);
    double np = double(n_paths);
    for (std::size_t k = 0; k < n; ++k) {
        double m = sum[k].value() / np;
        out.mean[k] = m;
        double var = std::max(0.0, (sumsq[k].value() - np * m * m) / std::max(1.0, np - 1.0));
        out.se[k] = std::sqrt(var / np);
    }
    return out;
}

McValue mc_reserve(const IntensityFamily& family, const PaymentSpec& payments,
                   const DiscountCurve& discount, int i0, double u0, long n_paths,
                   std::uint64_t seed, double rate, int rate_steps) {
    if (n_paths < 1) throw std::invalid_argument("mc_reserve: n_paths must be >= 1");
    rate = pick_rate(family, rate);
    double T = payments.horizon;

    // integration knots: uniform grid plus payment breakpoints
    std::vector<double> knots;
    knots.reserve(std::size_t(rate_steps) + payments.s_breakpoints.size() + 2);
    for (int k = 0; k <= rate_steps; ++k) knots.push_back(T * k / rate_steps);
    for (double b : payments.s_breakpoints)
        if (b > 0.0 && b < T) knots.push_back(b);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    std::vector<double> disc(knots.size());
    for (std::size_t k = 0; k < knots.size(); ++k) disc[k] = discount.factor(knots[k]);

    KahanSum sum, sumsq;
    long done = 0;
    std::uint64_t chunk = 0;
    while (done < n_paths) {
        long batch = std::min(kChunk, n_paths - done);
        Rng rng(mix_seed(seed, chunk++));
        for (long p = 0; p < batch; ++p) {
            PathRecord path = simulate_path(family, rate, T, i0, u0, rng);
            KahanSum value;
            // discounted sojourn payments, trapezoid between knots
            double prev_f = disc[0] * payments.rate(path.state_at(0.0), u0, 0.0);
            for (std::size_t k = 1; k < knots.size(); ++k) {
                double s = knots[k];
                double f = disc[k] * payments.rate(path.state_at(s), path.duration_at(s), s);
                value.add(0.5 * (prev_f + f) * (s - knots[k - 1]));
                prev_f = f;
            }
            if (payments.has_lumps) {
                int prev = path.initial_state;
                double last = 0.0;
                for (std::size_t j = 0; j < path.jump_times.size(); ++j) {
                    double tau = path.jump_times[j];
                    double dur = tau - last + (j == 0 ? path.initial_duration : 0.0);
                    value.add(discount.factor(tau) *
                              payments.lump(prev, dur, path.states[j], tau));
                    prev = path.states[j];
                    last = tau;
                }
            }
            for (const auto& d : payments.discrete) {
                if (d.time < 0.0 || d.time > T) continue;
                if (path.state_at(d.time) != d.state) continue;
                if (path.duration_at(d.time) < d.v_min) continue;
                value.add(discount.factor(d.time) * d.amount);
            }
            double x = value.value();
            sum.add(x);
            sumsq.add(x * x);
        }
        done += batch;
    }
    double np = double(n_paths);
    double m = sum.value() / np;
    double var = std::max(0.0, (sumsq.value() - np * m * m) / std::max(1.0, np - 1.0));
    return {m, std::sqrt(var / np)};
}

}  // namespace smj
