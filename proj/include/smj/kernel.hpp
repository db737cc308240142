#pragma once

#include <vector>

#include "smj/pi.hpp"

namespace smj {

// Approximating transition measure p_ij(s, dv) for fixed s and start (i, 0):
// an atom at v = s (no jump yet, diagonal support) plus a density over
// v in [0, s). density_mass holds the exact inner integral
//   sum_{l>w} Poi_{gamma s}(l) Pi_ij(l, w)
// obtained from the identity int_0^s Erl_{l-w}(s-v) Poi_{gamma v}(w) dv =
// Poi_{gamma s}(l); the tabulated density serves duration-dependent
// integrands and CSV output.
struct TransitionMeasure {
    double s = 0.0;
    double gamma = 0.0;
    StepMode mode = StepMode::unconditional;
    Matrix atom;
    Matrix density_mass;
    std::vector<double> v_grid;
    std::vector<Matrix> density;
    double truncation_mass = 0.0;  // discarded Poisson tail
};

// Measure of (j -> k) jump points, indexed by start i. atom[i](j,k) is
// nonzero only for j == i (a jump at duration v = s is the first jump).
struct JumpMeasure {
    double s = 0.0;
    double gamma = 0.0;
    StepMode mode = StepMode::unconditional;
    std::vector<Matrix> atom;
    std::vector<Matrix> mass;                  // exact integral over [0, s)
    std::vector<double> v_grid;
    std::vector<std::vector<Matrix>> density;  // [v][i](j,k); empty unless tabulated
    double truncation_mass = 0.0;
};

// Uniform v-grid of n_v + 1 points on [0, s): k*s/n_v plus a final point just
// inside s carrying the density's left limit.
std::vector<double> make_v_grid(double s, int n_v);

TransitionMeasure transition_measure(const PiTable& pi, const StepMatrices& steps,
                                     double s, const std::vector<double>& v_grid,
                                     double tail_prob);

JumpMeasure jump_measure(const PiTable& pi, const StepMatrices& steps, double s,
                         const std::vector<double>& v_grid, double tail_prob,
                         bool tabulate_density = false);

// defect_i = |1 - sum_j (atom_ij + density_mass_ij)|
Vector normalization_report(const TransitionMeasure& m);

// per-row TV between two atom parts: out_i = sum_j |a_ij - b_ij|
Vector atom_tv(const TransitionMeasure& a, const TransitionMeasure& b);

// out_i = int_0^s sum_j |a^c_ij(s,v) - b^c_ij(s,v)| dv over the shared grid
Vector density_tv_integral(const TransitionMeasure& a, const TransitionMeasure& b);

// Trapezoid over the measure's stored grid (non-uniform safe).
double integrate_tabulated(const std::vector<double>& grid,
                           const std::vector<double>& values);

}  // namespace smj
