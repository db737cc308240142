#include "smj/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "smj/numeric.hpp"

namespace smj {

namespace {

struct Weights {
    std::vector<double> poisson;  // Poi_{gamma s}(l), l = 0..l_cut
    int l_cut = 0;
    double truncation = 0.0;
};

Weights poisson_weights(const PiTable& pi, double gamma, double s, double tail_prob) {
    Weights w;
    double lambda = gamma * s;
    int want = poisson_tail_index(lambda, tail_prob);
    w.l_cut = std::min(pi.levels(), want);
    w.poisson.resize(std::size_t(w.l_cut) + 1);
    KahanSum total;
    for (int ell = 0; ell <= w.l_cut; ++ell) {
        w.poisson[std::size_t(ell)] = poisson_pmf(lambda, ell);
        total.add(w.poisson[std::size_t(ell)]);
    }
    w.truncation = std::max(0.0, 1.0 - total.value());
    return w;
}

// Erlang factors Erl_{m,gamma}(s - v) for m = 1..l_cut; m = 0 unused.
void erlang_column(double gamma, double x, int l_cut, std::vector<double>& out) {
    out.assign(std::size_t(l_cut) + 1, 0.0);
    for (int m = 1; m <= l_cut; ++m) out[std::size_t(m)] = erlang_pdf(m, gamma, x);
}

// contiguous index window where column values exceed threshold
std::pair<int, int> support_window(const std::vector<double>& col, double threshold) {
    int lo = int(col.size()), hi = -1;
    for (int k = 0; k < int(col.size()); ++k) {
        if (col[std::size_t(k)] > threshold) {
            if (k < lo) lo = k;
            hi = k;
        }
    }
    return {lo, hi};
}

}  // namespace

std::vector<double> make_v_grid(double s, int n_v) {
    if (n_v < 1) throw std::invalid_argument("make_v_grid: n_v must be >= 1");
    std::vector<double> grid(std::size_t(n_v) + 1);
    double h = s / n_v;
    for (int k = 0; k < n_v; ++k) grid[std::size_t(k)] = k * h;
    grid[std::size_t(n_v)] = s * (1.0 - 1e-10);
    return grid;
}

double integrate_tabulated(const std::vector<double>& grid,
                           const std::vector<double>& values) {
    if (grid.size() != values.size())
        throw std::invalid_argument("integrate_tabulated: size mismatch");
    KahanSum acc;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k)
        acc.add(0.5 * (values[k] + values[k + 1]) * (grid[k + 1] - grid[k]));
    return acc.value();
}

TransitionMeasure transition_measure(const PiTable& pi, const StepMatrices& steps,
                                     double s, const std::vector<double>& v_grid,
                                     double tail_prob) {
    if (!(s > 0.0)) throw std::invalid_argument("transition_measure: s must be > 0");
    double gamma = steps.gamma();
    if (poisson_upper_tail(gamma * s, pi.levels()) >= tail_prob * 10.0 + 1e-30)
        throw std::invalid_argument(
            "transition_measure: Pi table too shallow for s=" + std::to_string(s));
    for (double v : v_grid)
        if (v < 0.0 || v >= s)
            throw std::invalid_argument("transition_measure: v_grid must lie in [0, s)");

    int n = pi.states();
    TransitionMeasure out;
    out.s = s;
    out.gamma = gamma;
    out.mode = pi.mode();
    out.v_grid = v_grid;

    Weights wts = poisson_weights(pi, gamma, s, tail_prob);
    out.truncation_mass = wts.truncation;

    // atom: diagonal Poisson mixture of no-reset probabilities
    out.atom = Matrix::Zero(n, n);
    {
        std::vector<KahanSum> diag;
        diag.resize(std::size_t(n));
        for (int ell = 0; ell <= wts.l_cut; ++ell)
            for (int i = 0; i < n; ++i)
                diag[std::size_t(i)].add(wts.poisson[std::size_t(ell)] * pi.value(ell, ell, i, i));
        for (int i = 0; i < n; ++i) out.atom(i, i) = diag[std::size_t(i)].value();
    }

    // exact integrated density
    out.density_mass = Matrix::Zero(n, n);
    {
        Matrix levelsum(n, n);
        for (int ell = 1; ell <= wts.l_cut; ++ell) {
            levelsum.setZero();
            for (int w = 0; w < ell; ++w) levelsum += pi.pi(ell, w);
            out.density_mass.noalias() += wts.poisson[std::size_t(ell)] * levelsum;
        }
    }

    // tabulated density
    out.density.assign(v_grid.size(), Matrix::Zero(n, n));
    double tiny = 1e-18 * std::max(1.0, gamma);
    std::vector<double> erl, poi(std::size_t(wts.l_cut) + 1);
    for (std::size_t vi = 0; vi < v_grid.size(); ++vi) {
        double v = v_grid[vi];
        erlang_column(gamma, s - v, wts.l_cut, erl);
        for (int w = 0; w <= wts.l_cut; ++w) poi[std::size_t(w)] = poisson_pmf(gamma * v, w);
        auto [mlo, mhi] = support_window(erl, tiny);
        auto [wlo, whi] = support_window(poi, tiny);
        Matrix& dv = out.density[vi];
        for (int w = wlo; w <= whi; ++w) {
            double pw = poi[std::size_t(w)];
            for (int m = std::max(1, mlo); m <= mhi && m + w <= wts.l_cut; ++m) {
                double weight = pw * erl[std::size_t(m)];
                if (weight <= tiny * 1e-2) continue;
                dv.noalias() += weight * pi.pi(m + w, w);
            }
        }
    }
    return out;
}

JumpMeasure jump_measure(const PiTable& pi, const StepMatrices& steps, double s,
                         const std::vector<double>& v_grid, double tail_prob,
                         bool tabulate_density) {
    if (!(s > 0.0)) throw std::invalid_argument("jump_measure: s must be > 0");
    double gamma = steps.gamma();
    if (poisson_upper_tail(gamma * s, pi.levels()) >= tail_prob * 10.0 + 1e-30)
        throw std::invalid_argument("jump_measure: Pi table too shallow for s=" +
                                    std::to_string(s));
    int n = pi.states();
    JumpMeasure out;
    out.s = s;
    out.gamma = gamma;
    out.mode = pi.mode();
    out.v_grid = v_grid;

    Weights wts = poisson_weights(pi, gamma, s, tail_prob);
    out.truncation_mass = wts.truncation;
    out.atom.assign(std::size_t(n), Matrix::Zero(n, n));
    out.mass.assign(std::size_t(n), Matrix::Zero(n, n));

    // gamma * Q_offdiag(l, w) equals Lambda at the step arguments with the
    // diagonal removed
    Matrix lam(n, n);
    auto gamma_qn_into = [&](int ell, int w) {
        steps.q_into(ell, w, lam);
        lam *= gamma;
        lam.diagonal().setZero();
    };

    for (int ell = 0; ell <= wts.l_cut; ++ell) {
        double pl = wts.poisson[std::size_t(ell)];
        gamma_qn_into(ell, ell);
        for (int i = 0; i < n; ++i)
            out.atom[std::size_t(i)].row(i) += pl * pi.value(ell, ell, i, i) * lam.row(i);
        for (int w = 0; w < ell; ++w) {
            gamma_qn_into(ell, w);
            auto piw = pi.pi(ell, w);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double c = pl * piw(i, j);
                    if (c != 0.0) out.mass[std::size_t(i)].row(j) += c * lam.row(j);
                }
        }
    }

    if (tabulate_density) {
        out.density.assign(v_grid.size(),
                           std::vector<Matrix>(std::size_t(n), Matrix::Zero(n, n)));
        double tiny = 1e-18 * std::max(1.0, gamma);
        std::vector<std::vector<double>> erl(v_grid.size()), poi(v_grid.size());
        for (std::size_t vi = 0; vi < v_grid.size(); ++vi) {
            erlang_column(gamma, s - v_grid[vi], wts.l_cut, erl[vi]);
            poi[vi].resize(std::size_t(wts.l_cut) + 1);
            for (int w = 0; w <= wts.l_cut; ++w)
                poi[vi][std::size_t(w)] = poisson_pmf(gamma * v_grid[vi], w);
        }
        for (int w = 0; w < wts.l_cut; ++w) {
            for (int m = 1; m + w <= wts.l_cut; ++m) {
                gamma_qn_into(m + w, w);
                auto piw = pi.pi(m + w, w);
                for (std::size_t vi = 0; vi < v_grid.size(); ++vi) {
                    double weight = poi[vi][std::size_t(w)] * erl[vi][std::size_t(m)];
                    if (weight <= tiny) continue;
                    auto& slot = out.density[vi];
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                            double c = weight * piw(i, j);
                            if (c != 0.0) slot[std::size_t(i)].row(j) += c * lam.row(j);
                        }
                }
            }
        }
    }
    return out;
}

Vector normalization_report(const TransitionMeasure& m) {
    int n = m.atom.rows();
    Vector defect(n);
    for (int i = 0; i < n; ++i) {
        double total = m.atom.row(i).sum() + m.density_mass.row(i).sum();
        defect(i) = std::abs(1.0 - total);
    }
    return defect;
}

Vector atom_tv(const TransitionMeasure& a, const TransitionMeasure& b) {
    return (a.atom - b.atom).cwiseAbs().rowwise().sum();
}

Vector density_tv_integral(const TransitionMeasure& a, const TransitionMeasure& b) {
    if (a.v_grid != b.v_grid)
        throw std::invalid_argument("density_tv_integral: measures use different v grids");
    int n = a.atom.rows();
    Vector out = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> f(a.v_grid.size());
        for (std::size_t k = 0; k < a.v_grid.size(); ++k)
            f[k] = (a.density[k].row(i) - b.density[k].row(i)).cwiseAbs().sum();
        out(i) = integrate_tabulated(a.v_grid, f);
    }
    return out;
}

}  // namespace smj
