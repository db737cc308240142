#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "smj/grid.hpp"
#include "smj/intensity.hpp"

namespace smj {

enum class StepMode { conditional, unconditional };

const char* to_string(StepMode mode);

// One-step matrices of the uniformized duration-counting chain:
//   conditional    Q(l,w) = I + Lambda(chi_{l+1}, chi_{l+1} - chi_{l-w}) / gamma
//   unconditional  Q(l,w) = I + Lambda((l+1)/gamma, (w+1)/gamma) / gamma
// Requires gamma >= gamma0 so entries stay in [0,1]; rows sum to 1.
class StepMatrices {
public:
    StepMatrices(IntensityFamily family, double gamma, StepMode mode,
                 std::shared_ptr<const PoissonGrid> grid = nullptr);

    int states() const { return family_.states; }
    double gamma() const { return gamma_; }
    StepMode mode() const { return mode_; }
    const IntensityFamily& family() const { return family_; }
    const std::shared_ptr<const PoissonGrid>& grid() const { return grid_; }

    // full matrix; 0 <= w <= ell
    void q_into(int ell, int w, Matrix& out) const;
    Matrix q(int ell, int w) const;
    Matrix q_diag(int ell, int w) const;     // diagonal part
    Matrix q_offdiag(int ell, int w) const;  // Q - diag(Q)

private:
    IntensityFamily family_;
    double gamma_;
    StepMode mode_;
    std::shared_ptr<const PoissonGrid> grid_;
};

// Lower-triangular table of the recursion
//   Pi(0,0) = I
//   Pi(k,0) = sum_{k'=0}^{k-1} Pi(k-1,k') Qoff(k-1,k')      (duration resets)
//   Pi(k,w) = Pi(k-1,w-1) Qdiag(k-1,w-1),  1 <= w <= k      (duration grows)
// Pi_ij(k,w) = P(chain in state j with duration counter w after k steps | i).
class PiTable {
public:
    PiTable(int states, int levels, StepMode mode, double gamma);

    int states() const { return states_; }
    int levels() const { return levels_; }
    StepMode mode() const { return mode_; }
    double gamma() const { return gamma_; }

    Eigen::Map<const Matrix> pi(int k, int w) const;
    Eigen::Map<Matrix> pi(int k, int w);
    double value(int k, int w, int i, int j) const;

    // sum over (w, j) of Pi_ij(k, w); equals 1 for every i when Q is stochastic
    Vector level_mass(int k) const;

private:
    std::size_t slot(int k, int w) const;
    int states_, levels_;
    StepMode mode_;
    double gamma_;
    std::vector<double> data_;
};

PiTable build_pi_table(const StepMatrices& steps, int l_max);

// Streaming variant: visits levels 0..l_max keeping only two levels in
// memory; visit(k, level) receives Pi(k, 0..k) as a contiguous matrix array.
void sweep_pi_levels(const StepMatrices& steps, int l_max,
                     const std::function<void(int k, const std::vector<Matrix>&)>& visit);

// Per-row total variation over a subset of duration indices:
//   out_i = sum_{w in subset} sum_j |a_ij(k,w) - b_ij(k,w)|
Vector tv_distance(const PiTable& a, const PiTable& b, int k,
                   const std::vector<int>& subset);

// C_k: max over 0 <= w <= l <= k-1 and rows of the TV distance between the
// one-step matrices of two constructions (the Lemma B.1 constant).
double step_tv_bound(const StepMatrices& a, const StepMatrices& b, int k);

}  // namespace smj
