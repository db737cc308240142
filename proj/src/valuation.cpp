#include "smj/valuation.hpp"

#include <cmath>
#include <stdexcept>

#include "smj/numeric.hpp"
#include "smj/parallel.hpp"

namespace smj {

KernelProvider::KernelProvider(const IntensityFamily& family, double horizon,
                               EngineParams params)
    : params_(params), horizon_(horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("KernelProvider: horizon must be > 0");
    int l_max = poisson_tail_index(params_.gamma * horizon, params_.tail_prob);
    if (params_.mode == StepMode::conditional)
        grid_ = std::make_shared<const PoissonGrid>(
            sample_grid(params_.gamma, horizon, params_.tail_prob, params_.seed, l_max + 1));
    steps_ = std::make_unique<StepMatrices>(family, params_.gamma, params_.mode, grid_);
    table_ = std::make_unique<PiTable>(build_pi_table(*steps_, l_max));
}

TransitionMeasure KernelProvider::transition(double s, bool tabulate) const {
    std::vector<double> v_grid;
    if (tabulate) v_grid = make_v_grid(s, params_.n_v);
    return transition_measure(*table_, *steps_, s, v_grid, params_.tail_prob);
}

JumpMeasure KernelProvider::jumps(double s, bool tabulate) const {
    std::vector<double> v_grid;
    if (tabulate) v_grid = make_v_grid(s, params_.n_v);
    return jump_measure(*table_, *steps_, s, v_grid, params_.tail_prob, tabulate);
}

namespace {

// instantaneous cashflow at s = 0: all mass sits on (i, v = 0)
Vector cashflow_at_origin(const KernelProvider& provider, const PaymentSpec& payments) {
    const auto& family = provider.steps().family();
    Matrix lam = family.eval(0.0, 0.0);
    int n = family.states;
    Vector out(n);
    for (int i = 0; i < n; ++i) {
        double c = payments.rate(i, 0.0, 0.0);
        for (int k = 0; k < n; ++k)
            if (k != i) c += lam(i, k) * payments.lump(i, 0.0, k, 0.0);
        out(i) = c;
    }
    return out;
}

}  // namespace

Vector cashflow_values(const KernelProvider& provider, const PaymentSpec& payments,
                       double s) {
    if (payments.states != provider.table().states())
        throw std::invalid_argument("cashflow_values: payment/state-count mismatch");
    if (s > provider.horizon() * (1.0 + 1e-12))
        throw std::invalid_argument("cashflow_values: s beyond horizon");
    if (s <= 0.0) return cashflow_at_origin(provider, payments);

    int n = payments.states;
    bool rate_needs_v = !payments.duration_independent;
    bool lump_needs_v = !(payments.duration_independent || payments.lump_duration_independent);

    TransitionMeasure m = provider.transition(s, rate_needs_v);
    std::vector<KahanSum> total;
    total.resize(std::size_t(n));

    // sojourn payments: atom at duration v = s plus the density part
    for (int i = 0; i < n; ++i) {
        double a = m.atom(i, i);
        if (a != 0.0) total[std::size_t(i)].add(a * payments.rate(i, s, s));
    }
    if (rate_needs_v) {
        std::vector<double> f(m.v_grid.size());
        for (int j = 0; j < n; ++j) {
            std::vector<double> pay(m.v_grid.size());
            for (std::size_t k = 0; k < m.v_grid.size(); ++k)
                pay[k] = payments.rate(j, m.v_grid[k], s);
            for (int i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < m.v_grid.size(); ++k)
                    f[k] = m.density[k](i, j) * pay[k];
                total[std::size_t(i)].add(integrate_tabulated(m.v_grid, f));
            }
        }
    } else {
        for (int j = 0; j < n; ++j) {
            double b = payments.rate(j, 0.0, s);
            if (b == 0.0) continue;
            for (int i = 0; i < n; ++i) total[std::size_t(i)].add(m.density_mass(i, j) * b);
        }
    }

    if (payments.has_lumps) {
        JumpMeasure jm = provider.jumps(s, lump_needs_v);
        for (int i = 0; i < n; ++i) {
            const Matrix& atom = jm.atom[std::size_t(i)];
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    if (j == k) continue;
                    double a = atom(j, k);
                    if (a != 0.0) total[std::size_t(i)].add(a * payments.lump(j, s, k, s));
                }
        }
        if (lump_needs_v) {
            std::vector<double> f(jm.v_grid.size());
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        if (j == k) continue;
                        for (std::size_t vi = 0; vi < jm.v_grid.size(); ++vi)
                            f[vi] = jm.density[vi][std::size_t(i)](j, k) *
                                    payments.lump(j, jm.v_grid[vi], k, s);
                        total[std::size_t(i)].add(integrate_tabulated(jm.v_grid, f));
                    }
        } else {
            for (int i = 0; i < n; ++i) {
                const Matrix& mass = jm.mass[std::size_t(i)];
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        if (j == k) continue;
                        double c = mass(j, k);
                        if (c != 0.0)
                            total[std::size_t(i)].add(c * payments.lump(j, 0.0, k, s));
                    }
            }
        }
    }

    Vector out(n);
    for (int i = 0; i < n; ++i) out(i) = total[std::size_t(i)].value();
    return out;
}

double cashflow_value(const KernelProvider& provider, const PaymentSpec& payments,
                      int i0, double s) {
    return cashflow_values(provider, payments, s)(i0);
}

namespace {

// P(state j, duration >= v_min) under the measure at the payment time
double state_probability(const TransitionMeasure& m, int i0, int j, double v_min) {
    double p = (j == i0 && m.s >= v_min) ? m.atom(i0, j) : 0.0;
    if (v_min <= 0.0) return p + m.density_mass(i0, j);
    std::vector<double> f(m.v_grid.size());
    for (std::size_t k = 0; k < m.v_grid.size(); ++k)
        f[k] = m.v_grid[k] >= v_min ? m.density[k](i0, j) : 0.0;
    return p + integrate_tabulated(m.v_grid, f);
}

}  // namespace

CashflowCurve cashflow(const KernelProvider& provider, const PaymentSpec& payments,
                       int i0, const std::vector<double>& s_grid) {
    CashflowCurve curve;
    curve.s_grid = s_grid;
    curve.values.resize(s_grid.size());
    curve.state = i0;
    curve.gamma = provider.params().gamma;
    curve.mode = provider.params().mode;
    curve.seed = provider.params().seed;
    for (std::size_t k = 0; k < s_grid.size(); ++k)
        curve.values[k] = cashflow_value(provider, payments, i0, s_grid[k]);

    if (!payments.discrete.empty() && s_grid.size() >= 2) {
        double h = s_grid[1] - s_grid[0];
        for (const auto& d : payments.discrete) {
            for (std::size_t k = 0; k < s_grid.size(); ++k) {
                if (std::abs(s_grid[k] - d.time) > 1e-12) continue;
                TransitionMeasure m = provider.transition(d.time, d.v_min > 0.0);
                curve.values[k] += d.amount * state_probability(m, i0, d.state, d.v_min) / h;
                break;
            }
        }
    }
    return curve;
}

Matrix cashflow_curve_all(const KernelProvider& provider, const PaymentSpec& payments,
                          const std::vector<double>& s_grid) {
    Matrix out(long(s_grid.size()), payments.states);
    parallel_for(int(s_grid.size()), [&](int k) {
        out.row(k) = cashflow_values(provider, payments, s_grid[std::size_t(k)]).transpose();
    });
    return out;
}

Vector reserves_all(const KernelProvider& provider, const PaymentSpec& payments,
                    const DiscountCurve& discount, int n_s) {
    double T = payments.horizon;
    if (n_s < 2) n_s = 2;
    if (n_s % 2 != 0) ++n_s;
    double h = T / n_s;
    Matrix f(n_s + 1, payments.states);
    parallel_for(n_s + 1, [&](int k) {
        double s = T * k / n_s;
        f.row(k) = discount.factor(s) *
                   cashflow_values(provider, payments, s).transpose();
    });
    Vector value = (f.row(0) + f.row(n_s)).transpose();
    for (int k = 1; k < n_s; ++k) value += (k % 2 == 1 ? 4.0 : 2.0) * f.row(k).transpose();
    value *= h / 3.0;

    for (const auto& d : payments.discrete) {
        if (d.time < 0.0 || d.time > T) continue;
        if (d.time <= 0.0) {
            if (d.v_min <= 0.0) value(d.state) += d.amount;
            continue;
        }
        TransitionMeasure m = provider.transition(d.time, d.v_min > 0.0);
        for (int i = 0; i < payments.states; ++i)
            value(i) += discount.factor(d.time) * d.amount *
                        state_probability(m, i, d.state, d.v_min);
    }
    return value;
}

double reserve(const KernelProvider& provider, const PaymentSpec& payments,
               const DiscountCurve& discount, int i0, int n_s) {
    double T = payments.horizon;
    if (T > provider.horizon() * (1.0 + 1e-12))
        throw std::invalid_argument("reserve: payment horizon beyond kernel horizon");
    double value = simpson(
        [&](double s) {
            return discount.factor(s) * cashflow_value(provider, payments, i0, s);
        },
        0.0, T, n_s);
    for (const auto& d : payments.discrete) {
        if (d.time < 0.0 || d.time > T) continue;
        double p;
        if (d.time <= 0.0) {
            p = (d.state == i0 && d.v_min <= 0.0) ? 1.0 : 0.0;
        } else {
            TransitionMeasure m = provider.transition(d.time, d.v_min > 0.0);
            p = state_probability(m, i0, d.state, d.v_min);
        }
        value += discount.factor(d.time) * d.amount * p;
    }
    return value;
}

double reserve_at(const IntensityFamily& family, const PaymentSpec& payments,
                  const DiscountCurve& discount, double t, int i0, double u,
                  const EngineParams& params, int n_s) {
    if (t < 0.0 || t > payments.horizon)
        throw std::invalid_argument("reserve_at: need 0 <= t <= horizon");
    if (u < 0.0 || u > t)
        throw std::invalid_argument("reserve_at: need 0 <= u <= t");
    if (t >= payments.horizon) return 0.0;
    if (t == 0.0 && u == 0.0) {
        KernelProvider provider(family, payments.horizon, params);
        return reserve(provider, payments, discount, i0, n_s);
    }
    IntensityFamily aug = augment(family, t, u);
    PaymentSpec pay = augment_payments(payments, t, u);
    DiscountCurve disc = discount.shifted(t);
    KernelProvider provider(aug, pay.horizon, params);
    return reserve(provider, pay, disc, i0, n_s);  // block-0 state (0, i0)
}

double actuarial_premium_solve(const KernelProvider& provider,
                               const PaymentSpec& benefits,
                               const PaymentSpec& premium_unit,
                               const DiscountCurve& discount, int i0, int n_s) {
    double v_benefit = reserve(provider, benefits, discount, i0, n_s);
    double v_premium = reserve(provider, premium_unit, discount, i0, n_s);
    double scale = std::max({1.0, std::abs(v_benefit)});
    if (std::abs(v_premium) < 1e-14 * scale)
        throw std::runtime_error("actuarial_premium_solve: zero premium sensitivity");
    return -(v_benefit + benefits.initial_premium) / v_premium;
}

std::vector<double> uniform_grid(double a, double b, int intervals) {
    std::vector<double> g(std::size_t(intervals) + 1);
    for (int k = 0; k <= intervals; ++k) g[std::size_t(k)] = a + (b - a) * k / intervals;
    return g;
}

std::vector<double> bin_centers(double a, double b, int bins) {
    std::vector<double> g(std::size_t(bins), 0.0);
    double h = (b - a) / bins;
    for (int k = 0; k < bins; ++k) g[std::size_t(k)] = a + (k + 0.5) * h;
    return g;
}

}  // namespace smj
