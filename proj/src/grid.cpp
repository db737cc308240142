#include "smj/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "smj/numeric.hpp"
#include "smj/rng.hpp"

namespace smj {

PoissonGrid sample_grid(double gamma, double horizon, double tail_prob,
                        std::uint64_t seed, int min_len) {
    if (!(gamma > 0.0)) throw std::invalid_argument("sample_grid: gamma must be > 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("sample_grid: horizon must be > 0");
    if (!(tail_prob > 0.0 && tail_prob < 1.0))
        throw std::invalid_argument("sample_grid: tail_prob must lie in (0,1)");

    int l_tail = poisson_tail_index(gamma * horizon, tail_prob);
    PoissonGrid grid;
    grid.gamma = gamma;
    grid.seed = seed;
    grid.arrivals.reserve(std::size_t(l_tail) + 2);
    grid.arrivals.push_back(0.0);

    Rng rng(seed);
    double t = 0.0;
    int n = 0;
    while (t <= horizon || n < l_tail || n < min_len) {
        t += rng.exponential(gamma);
        grid.arrivals.push_back(t);
        ++n;
    }
    return grid;
}

double poisson_pmf(double lambda, int k) {
    if (lambda < 0.0) throw std::invalid_argument("poisson_pmf: lambda must be >= 0");
    if (k < 0) throw std::invalid_argument("poisson_pmf: k must be >= 0");
    if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(k * std::log(lambda) - lambda - std::lgamma(double(k) + 1.0));
}

double erlang_pdf(int k, double gamma, double x) {
    if (k < 1) throw std::invalid_argument("erlang_pdf: k must be >= 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("erlang_pdf: gamma must be > 0");
    if (x < 0.0) throw std::invalid_argument("erlang_pdf: x must be >= 0");
    if (x == 0.0) return k == 1 ? gamma : 0.0;
    return std::exp(std::log(gamma) + (k - 1) * (std::log(gamma) + std::log(x)) -
                    gamma * x - std::lgamma(double(k)));
}

int poisson_tail_index(double lambda, double tail_prob) {
    if (lambda < 0.0) throw std::invalid_argument("poisson_tail_index: lambda must be >= 0");
    if (!(tail_prob > 0.0 && tail_prob < 1.0))
        throw std::invalid_argument("poisson_tail_index: tail_prob must lie in (0,1)");
    KahanSum cdf;
    int k = 0;
    cdf.add(poisson_pmf(lambda, 0));
    while (1.0 - cdf.value() >= tail_prob) {
        ++k;
        cdf.add(poisson_pmf(lambda, k));
        if (k > 10'000'000)
            throw std::runtime_error("poisson_tail_index: tail index exceeds 1e7 at lambda=" +
                                     std::to_string(lambda));
    }
    return k;
}

double poisson_upper_tail(double lambda, int L) {
    KahanSum cdf;
    for (int k = 0; k <= L; ++k) cdf.add(poisson_pmf(lambda, k));
    double tail = 1.0 - cdf.value();
    return tail > 0.0 ? tail : 0.0;
}

double grid_deviation(const PoissonGrid& grid, double epsilon) {
    double cap = std::floor(std::pow(grid.gamma, 1.0 + epsilon));
    int top = grid.max_index();
    if (cap < double(top)) top = int(cap);
    double dev = 0.0;
    for (int ell = 0; ell <= top; ++ell) {
        double d = std::abs(grid.chi(ell) - double(ell) / grid.gamma);
        if (d > dev) dev = d;
    }
    return dev;
}

}  // namespace smj
