#pragma once

#include <cstdint>
#include <vector>

namespace smj {

// Arrival times chi_0 = 0 < chi_1 < ... of the uniformization Poisson
// process with intensity gamma. Immutable after sampling; regenerating with
// the same (gamma, seed) reproduces the sequence bit-exactly.
struct PoissonGrid {
    double gamma = 0.0;
    std::vector<double> arrivals;
    std::uint64_t seed = 0;

    int max_index() const { return int(arrivals.size()) - 1; }
    double chi(int ell) const { return arrivals[std::size_t(ell)]; }
};

// Samples arrivals until they cover [0, horizon], the Poisson(gamma*horizon)
// upper tail beyond the last index is below tail_prob, and at least min_len
// arrivals past chi_0 exist.
PoissonGrid sample_grid(double gamma, double horizon, double tail_prob,
                        std::uint64_t seed, int min_len = 0);

// Poisson(lambda) pmf at k; log-space evaluation.
double poisson_pmf(double lambda, int k);

// Erlang(k, gamma) density at x >= 0; requires k >= 1 (the k = 0 atom is the
// caller's case split).
double erlang_pdf(int k, double gamma, double x);

// Smallest L with P(Poisson(lambda) > L) < tail_prob.
int poisson_tail_index(double lambda, double tail_prob);

// P(Poisson(lambda) > L), compensated summation.
double poisson_upper_tail(double lambda, int L);

// max over ell <= min(L, floor(gamma^(1+epsilon))) of |chi_ell - ell/gamma|.
double grid_deviation(const PoissonGrid& grid, double epsilon);

}  // namespace smj
