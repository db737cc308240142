#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "smj/expr.hpp"
#include "smj/intensity.hpp"
#include "smj/payments.hpp"
#include "smj/pi.hpp"

namespace smj {

using json = nlohmann::json;

struct ExprEntry {
    int from = 0;  // 1-based in config
    int to = 0;
    std::vector<FuncTerm> terms;
};

struct ModelConfig {
    std::string kind;  // "constant" | "disability" | "expr"
    int states = 0;
    std::vector<std::vector<double>> matrix;  // constant
    std::vector<ExprEntry> entries;           // expr
    DisabilityRates rates;                    // disability
    std::string note;
    double age0 = 0.0;
    double gamma0 = 0.0;
    std::optional<double> lipschitz_k;
    std::vector<std::pair<double, double>> validation_grid;
};

struct RateBlock {
    int state = 0;  // 1-based
    std::vector<FuncTerm> terms;
};

struct LumpBlock {
    int from = 0, to = 0;  // 1-based
    std::vector<FuncTerm> terms;
};

struct PaymentsConfig {
    double horizon = 0.0;
    std::vector<RateBlock> rates;
    std::vector<LumpBlock> lumps;
    std::vector<DiscretePayment> discrete;  // state kept 1-based here
    double initial_premium = 0.0;
    bool duration_independent = false;  // audited against the terms
};

struct DiscountConfig {
    std::string kind = "flat";  // "flat" | "piecewise"
    double rate = 0.0;
    std::vector<double> times, rates;
};

struct EngineConfig {
    std::vector<double> gammas{30.0};
    std::string mode = "both";  // "conditional" | "unconditional" | "both"
    std::vector<std::uint64_t> seeds{1};
    double tail_prob = 1e-10;
    int n_s = 200;
    int n_v = 200;
    double epsilon = 0.1;
};

struct McConfig {
    long n_paths = 10000;
    std::vector<std::uint64_t> seeds{901};
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> formats{"csv"};
};

struct PolicyConfig {
    int initial_state = 1;  // 1-based
    double initial_duration = 0.0;
    double initial_time = 0.0;
};

struct RunConfig {
    ModelConfig model;
    PaymentsConfig payments;
    DiscountConfig discount;
    EngineConfig engine;
    McConfig mc;
    OutputConfig output;
    PolicyConfig policy;

    IntensityFamily build_family() const;
    PaymentSpec build_payments() const;
    DiscountCurve build_discount() const;
    std::vector<StepMode> modes() const;
    json echo() const;  // fully resolved, defaults explicit
};

// Strict parsing: unknown keys anywhere are an error.
RunConfig parse_run_config(const json& j);
RunConfig load_run_config(const std::string& path);

}  // namespace smj
