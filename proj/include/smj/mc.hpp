#pragma once

#include <cstdint>
#include <vector>

#include "smj/intensity.hpp"
#include "smj/payments.hpp"
#include "smj/rng.hpp"

namespace smj {

// One simulated trajectory: real jumps only (self-transitions collapse).
// Duration before the first jump continues from initial_duration.
struct PathRecord {
    double horizon = 0.0;
    int initial_state = 0;
    double initial_duration = 0.0;
    std::vector<double> jump_times;
    std::vector<int> states;  // state entered at each jump

    int state_at(double t) const;
    double duration_at(double t) const;
};

// Uniformization / thinning simulation of the semi-Markov process driven by
// the family: exponential(rate) arrivals, then a categorical draw with
// weights delta_{ij} + Lambda_ij(T_{l+1}, v_l + dT) / rate. rate >= gamma0.
PathRecord simulate_path(const IntensityFamily& family, double rate, double horizon,
                         int i0, double u0, Rng& rng);

struct McCurve {
    std::vector<double> s_grid;
    std::vector<double> mean;
    std::vector<double> se;
    long n_paths = 0;
    std::uint64_t seed = 0;
};

// Plain Monte Carlo cashflow estimate: per-s mean of the sojourn payment
// rate plus transition lumps binned into grid cells of width h (bin centers
// = s_grid), each divided by h. Discrete payments land in their bin.
McCurve mc_cashflow(const IntensityFamily& family, const PaymentSpec& payments,
                    int i0, double u0, long n_paths,
                    const std::vector<double>& s_grid, std::uint64_t seed,
                    double rate = 0.0);

struct McValue {
    double mean = 0.0;
    double se = 0.0;
};

// Monte Carlo reserve: discounted payments integrated along each path
// (trapezoid with payment breakpoints inserted), lumps and discrete
// payments exact.
McValue mc_reserve(const IntensityFamily& family, const PaymentSpec& payments,
                   const DiscountCurve& discount, int i0, double u0, long n_paths,
                   std::uint64_t seed, double rate = 0.0, int rate_steps = 1000);

}  // namespace smj
