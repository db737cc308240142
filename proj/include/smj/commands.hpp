#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smj/config.hpp"
#include "smj/valuation.hpp"

namespace smj {

struct CommandOptions {
    std::string config_path;
    std::string out_dir;  // overrides output.directory when nonempty
    bool with_mc = false;
    std::vector<double> gamma_override;
    std::vector<std::uint64_t> seed_override;
    std::string mode_override;
    double s = 1.0;  // evaluation time for `transition`
};

// The valuation frame a config resolves to: base model for (t,u) = (0,0),
// otherwise the 2J-state augmentation with shifted payments and discounting.
struct Frame {
    IntensityFamily family;
    PaymentSpec payments;
    DiscountCurve discount;
    int i0 = 0;           // 0-based initial state inside the frame
    double horizon = 0.0;
    bool augmented = false;
    int base_states = 0;
};

Frame resolve_frame(const RunConfig& config);

int cmd_validate(const CommandOptions& options);
int cmd_transition(const CommandOptions& options);
int cmd_cashflow(const CommandOptions& options);
int cmd_reserve(const CommandOptions& options);
int cmd_convergence(const CommandOptions& options);

}  // namespace smj
