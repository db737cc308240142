#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "smj/kernel.hpp"
#include "smj/payments.hpp"

namespace smj {

struct EngineParams {
    double gamma = 0.0;
    StepMode mode = StepMode::unconditional;
    double tail_prob = 1e-10;
    int n_v = 200;
    std::uint64_t seed = 0;  // grid seed; conditional mode only
};

// Owns the step matrices and the Pi table for one (family, gamma, mode,
// seed) cell, sized for a fixed horizon; serves measures at any s <= horizon.
class KernelProvider {
public:
    KernelProvider(const IntensityFamily& family, double horizon, EngineParams params);

    const PiTable& table() const { return *table_; }
    const StepMatrices& steps() const { return *steps_; }
    const EngineParams& params() const { return params_; }
    double horizon() const { return horizon_; }

    // tabulate=false skips the density grid (exact masses only)
    TransitionMeasure transition(double s, bool tabulate = true) const;
    JumpMeasure jumps(double s, bool tabulate = false) const;

private:
    EngineParams params_;
    double horizon_;
    std::shared_ptr<const PoissonGrid> grid_;
    std::unique_ptr<StepMatrices> steps_;
    std::unique_ptr<PiTable> table_;
};

struct CashflowCurve {
    std::vector<double> s_grid;
    std::vector<double> values;
    int state = 0;  // 0-based initial state
    double gamma = 0.0;
    StepMode mode = StepMode::unconditional;
    std::uint64_t seed = 0;
};

// Expected cashflow density at one time: sojourn-rate part plus transition
// lump part (continuous components only; discrete payments are handled by
// the curve/reserve drivers). cashflow_values returns one value per initial
// state off a single measure build.
Vector cashflow_values(const KernelProvider& provider, const PaymentSpec& payments,
                       double s);
double cashflow_value(const KernelProvider& provider, const PaymentSpec& payments,
                      int i0, double s);

// Curve over s_grid. Discrete payments landing exactly on a grid point are
// added as point masses spread over one grid cell.
CashflowCurve cashflow(const KernelProvider& provider, const PaymentSpec& payments,
                       int i0, const std::vector<double>& s_grid);

// All initial states at once; out(k, i) = cashflow at s_grid[k] from state i.
// Evaluations at distinct s run on the worker pool.
Matrix cashflow_curve_all(const KernelProvider& provider, const PaymentSpec& payments,
                          const std::vector<double>& s_grid);

// Reserve per initial state (continuous parts via Simpson, discrete exact).
Vector reserves_all(const KernelProvider& provider, const PaymentSpec& payments,
                    const DiscountCurve& discount, int n_s = 200);

// Prospective reserve at inception: composite Simpson of the discounted
// cashflow over [0, horizon] with n_s intervals, plus exact discrete terms.
double reserve(const KernelProvider& provider, const PaymentSpec& payments,
               const DiscountCurve& discount, int i0, int n_s = 200);

// Reserve at time t, state i0, running duration u: reduces to the (0,0) case
// through the 2J-state augmentation of the family and the payments.
double reserve_at(const IntensityFamily& family, const PaymentSpec& payments,
                  const DiscountCurve& discount, double t, int i0, double u,
                  const EngineParams& params, int n_s = 200);

// Premium scale c* with V(benefits + c * premium_unit) + b0 = 0. Throws on
// vanishing premium sensitivity.
double actuarial_premium_solve(const KernelProvider& provider,
                               const PaymentSpec& benefits,
                               const PaymentSpec& premium_unit,
                               const DiscountCurve& discount, int i0, int n_s = 200);

std::vector<double> uniform_grid(double a, double b, int intervals);
std::vector<double> bin_centers(double a, double b, int bins);

}  // namespace smj
