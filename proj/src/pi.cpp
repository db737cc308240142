#include "smj/pi.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace smj {

const char* to_string(StepMode mode) {
    return mode == StepMode::conditional ? "conditional" : "unconditional";
}

StepMatrices::StepMatrices(IntensityFamily family, double gamma, StepMode mode,
                           std::shared_ptr<const PoissonGrid> grid)
    : family_(std::move(family)), gamma_(gamma), mode_(mode), grid_(std::move(grid)) {
    if (gamma_ < family_.gamma0)
        throw std::invalid_argument(
            "uniformization rate too small: gamma=" + std::to_string(gamma_) +
            " < gamma0=" + std::to_string(family_.gamma0));
    if (mode_ == StepMode::conditional && !grid_)
        throw std::invalid_argument("StepMatrices: conditional mode needs a PoissonGrid");
    if (mode_ == StepMode::conditional && grid_->gamma != gamma_)
        throw std::invalid_argument("StepMatrices: grid gamma mismatch");
}

void StepMatrices::q_into(int ell, int w, Matrix& out) const {
    if (w < 0 || w > ell)
        throw std::invalid_argument("StepMatrices::q: need 0 <= w <= ell");
    double s, v;
    if (mode_ == StepMode::conditional) {
        if (ell + 1 > grid_->max_index())
            throw std::invalid_argument("StepMatrices::q: grid too short for ell=" +
                                        std::to_string(ell));
        s = grid_->chi(ell + 1);
        v = s - grid_->chi(ell - w);
    } else {
        s = double(ell + 1) / gamma_;
        v = double(w + 1) / gamma_;
    }
    family_.eval_into(s, v, out);
    out /= gamma_;
    int n = family_.states;
    for (int i = 0; i < n; ++i) {
        out(i, i) += 1.0;
        if (out(i, i) < -1e-14)
            throw std::invalid_argument(
                "uniformization rate too small: |Lambda_" + std::to_string(i + 1) +
                std::to_string(i + 1) + "(" + std::to_string(s) + "," + std::to_string(v) +
                ")| exceeds gamma=" + std::to_string(gamma_));
    }
}

Matrix StepMatrices::q(int ell, int w) const {
    Matrix out(states(), states());
    q_into(ell, w, out);
    return out;
}

Matrix StepMatrices::q_diag(int ell, int w) const {
    Matrix full = q(ell, w);
    Matrix out = Matrix::Zero(states(), states());
    out.diagonal() = full.diagonal();
    return out;
}

Matrix StepMatrices::q_offdiag(int ell, int w) const {
    Matrix out = q(ell, w);
    out.diagonal().setZero();
    return out;
}

PiTable::PiTable(int states, int levels, StepMode mode, double gamma)
    : states_(states), levels_(levels), mode_(mode), gamma_(gamma) {
    std::size_t n = std::size_t(levels + 1) * std::size_t(levels + 2) / 2;
    data_.assign(n * std::size_t(states) * std::size_t(states), 0.0);
}

std::size_t PiTable::slot(int k, int w) const {
    return (std::size_t(k) * std::size_t(k + 1) / 2 + std::size_t(w)) *
           std::size_t(states_) * std::size_t(states_);
}

Eigen::Map<const Matrix> PiTable::pi(int k, int w) const {
    return {data_.data() + slot(k, w), states_, states_};
}

Eigen::Map<Matrix> PiTable::pi(int k, int w) {
    return {data_.data() + slot(k, w), states_, states_};
}

double PiTable::value(int k, int w, int i, int j) const {
    if (w > k) return 0.0;
    return pi(k, w)(i, j);
}

Vector PiTable::level_mass(int k) const {
    Vector mass = Vector::Zero(states_);
    for (int w = 0; w <= k; ++w) mass += pi(k, w).rowwise().sum();
    return mass;
}

void sweep_pi_levels(const StepMatrices& steps, int l_max,
                     const std::function<void(int, const std::vector<Matrix>&)>& visit) {
    if (l_max < 0) throw std::invalid_argument("sweep_pi_levels: l_max must be >= 0");
    int n = steps.states();
    std::vector<Matrix> prev, cur;
    prev.reserve(std::size_t(l_max) + 1);
    cur.reserve(std::size_t(l_max) + 1);
    prev.push_back(Matrix::Identity(n, n));
    visit(0, prev);

    Matrix q(n, n);
    for (int k = 1; k <= l_max; ++k) {
        cur.assign(std::size_t(k) + 1, Matrix::Zero(n, n));
        // ascending k' keeps the reset-column reduction deterministic
        for (int kp = 0; kp < k; ++kp) {
            steps.q_into(k - 1, kp, q);
            Vector diag = q.diagonal();
            q.diagonal().setZero();
            cur[0].noalias() += prev[std::size_t(kp)] * q;
            cur[std::size_t(kp) + 1] = prev[std::size_t(kp)] * diag.transpose().asDiagonal();
        }
        visit(k, cur);
        prev.swap(cur);
    }
}

PiTable build_pi_table(const StepMatrices& steps, int l_max) {
    PiTable table(steps.states(), l_max, steps.mode(), steps.gamma());
    sweep_pi_levels(steps, l_max, [&](int k, const std::vector<Matrix>& level) {
        for (int w = 0; w <= k; ++w) table.pi(k, w) = level[std::size_t(w)];
    });
    return table;
}

Vector tv_distance(const PiTable& a, const PiTable& b, int k,
                   const std::vector<int>& subset) {
    if (a.states() != b.states())
        throw std::invalid_argument("tv_distance: state-count mismatch");
    if (k > a.levels() || k > b.levels())
        throw std::invalid_argument("tv_distance: level " + std::to_string(k) +
                                    " beyond table depth");
    Vector out = Vector::Zero(a.states());
    for (int w : subset) {
        if (w < 0 || w > k) continue;
        out += (a.pi(k, w) - b.pi(k, w)).cwiseAbs().rowwise().sum();
    }
    return out;
}

double step_tv_bound(const StepMatrices& a, const StepMatrices& b, int k) {
    if (a.states() != b.states())
        throw std::invalid_argument("step_tv_bound: state-count mismatch");
    double c = 0.0;
    Matrix qa(a.states(), a.states()), qb(b.states(), b.states());
    for (int ell = 0; ell <= k - 1; ++ell) {
        for (int w = 0; w <= ell; ++w) {
            a.q_into(ell, w, qa);
            b.q_into(ell, w, qb);
            c = std::max(c, (qa - qb).cwiseAbs().rowwise().sum().maxCoeff());
        }
    }
    return c;
}

}  // namespace smj
