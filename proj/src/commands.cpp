#include "smj/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "smj/csv.hpp"
#include "smj/mc.hpp"
#include "smj/numeric.hpp"
#include "smj/parallel.hpp"

namespace smj {

namespace {

RunConfig load_with_overrides(const CommandOptions& options) {
    RunConfig config = load_run_config(options.config_path);
    if (!options.gamma_override.empty()) config.engine.gammas = options.gamma_override;
    if (!options.seed_override.empty()) config.engine.seeds = options.seed_override;
    if (!options.mode_override.empty()) {
        if (options.mode_override != "conditional" &&
            options.mode_override != "unconditional" && options.mode_override != "both")
            throw std::invalid_argument("--mode must be conditional|unconditional|both");
        config.engine.mode = options.mode_override;
    }
    if (!options.out_dir.empty()) config.output.directory = options.out_dir;
    for (double g : config.engine.gammas)
        if (g < config.model.gamma0)
            throw std::invalid_argument("gamma override below model gamma0");
    return config;
}

std::string out_path(const RunConfig& config, const std::string& name) {
    std::filesystem::create_directories(config.output.directory);
    return (std::filesystem::path(config.output.directory) / name).string();
}

std::string cell_tag(double gamma, StepMode mode, std::uint64_t seed) {
    std::ostringstream os;
    os << "g" << gamma << "_" << to_string(mode);
    if (mode == StepMode::conditional) os << "_s" << seed;
    return os.str();
}

// cells: conditional per (gamma, seed); unconditional once per gamma (seed 0)
struct Cell {
    double gamma;
    StepMode mode;
    std::uint64_t seed;
};

std::vector<Cell> make_cells(const RunConfig& config) {
    std::vector<Cell> cells;
    for (double gamma : config.engine.gammas)
        for (StepMode mode : config.modes()) {
            if (mode == StepMode::conditional)
                for (auto seed : config.engine.seeds) cells.push_back({gamma, mode, seed});
            else
                cells.push_back({gamma, mode, 0});
        }
    return cells;
}

EngineParams cell_params(const RunConfig& config, const Cell& cell) {
    EngineParams p;
    p.gamma = cell.gamma;
    p.mode = cell.mode;
    p.tail_prob = config.engine.tail_prob;
    p.n_v = config.engine.n_v;
    p.seed = cell.seed;
    return p;
}

}  // namespace

Frame resolve_frame(const RunConfig& config) {
    Frame frame;
    frame.base_states = config.model.states;
    IntensityFamily family = config.build_family();
    PaymentSpec payments = config.build_payments();
    frame.discount = config.build_discount();
    double t0 = config.policy.initial_time;
    double u0 = config.policy.initial_duration;
    if (t0 > 0.0 || u0 > 0.0) {
        frame.family = augment(family, t0, u0);
        frame.payments = augment_payments(payments, t0, u0);
        frame.discount = frame.discount.shifted(t0);
        frame.augmented = true;
    } else {
        frame.family = std::move(family);
        frame.payments = std::move(payments);
    }
    frame.i0 = config.policy.initial_state - 1;
    frame.horizon = frame.payments.horizon;
    return frame;
}

int cmd_validate(const CommandOptions& options) {
    RunConfig config = load_with_overrides(options);
    std::cout << config.echo().dump(2) << "\n";

    IntensityFamily family = config.build_family();
    auto grid = config.model.validation_grid;
    if (grid.empty()) {
        double T = config.payments.horizon;
        for (int a = 0; a <= 10; ++a)
            for (int b = 0; b <= 10; ++b) grid.emplace_back(T * a / 10.0, T * b / 10.0);
    }
    ValidationReport report = validate(family, grid);
    std::cout << "validate: " << grid.size() << " grid points, inferred bound "
              << format_double(report.inferred_bound) << " (gamma0 "
              << format_double(family.gamma0) << ")\n";
    for (const auto& v : report.violations)
        std::cout << "  violation " << v.kind << " at (s=" << v.s << ", v=" << v.v
                  << ") i=" << v.i << " j=" << v.j << " value=" << v.value << "\n";

    bool lipschitz_ok = true;
    if (family.lipschitz_k) {
        Rng rng(12345);
        double s_hi = 0.0, v_hi = 0.0;
        for (auto [s, v] : grid) {
            s_hi = std::max(s_hi, s);
            v_hi = std::max(v_hi, v);
        }
        std::vector<std::array<double, 4>> pairs;
        for (int k = 0; k < 400; ++k)
            pairs.push_back({rng.uniform() * s_hi, rng.uniform() * v_hi,
                             rng.uniform() * s_hi, rng.uniform() * v_hi});
        double ratio = lipschitz_ratio(family, pairs);
        lipschitz_ok = ratio <= *family.lipschitz_k;
        std::cout << "lipschitz audit: observed ratio " << format_double(ratio)
                  << " vs declared K " << format_double(*family.lipschitz_k)
                  << (lipschitz_ok ? " (ok)\n" : " (VIOLATED)\n");
    }

    bool payments_ok = true;
    if (config.payments.duration_independent) {
        PaymentSpec payments = config.build_payments();
        for (int j = 0; j < payments.states && payments_ok; ++j)
            for (double s : {0.3, 1.7, 3.9}) {
                if (payments.rate(j, 0.1, s) != payments.rate(j, 2.3, s)) payments_ok = false;
                for (int k = 0; k < payments.states; ++k)
                    if (j != k &&
                        payments.lump(j, 0.1, k, s) != payments.lump(j, 2.3, k, s))
                        payments_ok = false;
            }
        if (!payments_ok)
            std::cout << "payments audit: duration_independent flag VIOLATED by terms\n";
    }

    bool ok = report.valid && lipschitz_ok && payments_ok;
    std::cout << (ok ? "validate: OK\n" : "validate: FAILED\n");
    return ok ? 0 : 1;
}

int cmd_transition(const CommandOptions& options) {
    RunConfig config = load_with_overrides(options);
    Frame frame = resolve_frame(config);
    double s = options.s;
    if (!(s > 0.0) || s > frame.horizon)
        throw std::invalid_argument("transition: need 0 < s <= horizon");

    std::vector<Cell> cells = make_cells(config);
    double worst = 0.0;
    for (const auto& cell : cells) {
        EngineParams params = cell_params(config, cell);
        KernelProvider provider(frame.family, s, params);
        TransitionMeasure m = provider.transition(s, true);
        Vector defect = normalization_report(m);
        worst = std::max(worst, defect.maxCoeff());

        CsvWriter csv(out_path(config, "transition_" + cell_tag(cell.gamma, cell.mode,
                                                                cell.seed) + ".csv"),
                      {"s", "v", "i", "j", "p_type", "value", "mode", "gamma", "seed"});
        int n = frame.family.states;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                csv.row(s, s, i + 1, j + 1, "atom", m.atom(i, j), to_string(cell.mode),
                        cell.gamma, (unsigned long long)cell.seed);
        for (std::size_t k = 0; k < m.v_grid.size(); ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    csv.row(s, m.v_grid[k], i + 1, j + 1, "density", m.density[k](i, j),
                            to_string(cell.mode), cell.gamma, (unsigned long long)cell.seed);

        std::cout << "transition " << cell_tag(cell.gamma, cell.mode, cell.seed)
                  << ": truncation " << format_double(m.truncation_mass) << ", defect";
        for (int i = 0; i < n; ++i) std::cout << " " << format_double(defect(i));
        std::cout << "\n";
    }
    bool ok = worst <= config.engine.tail_prob + 1e-8;
    std::cout << "transition: max defect " << format_double(worst)
              << (ok ? " (ok)\n" : " (VIOLATED)\n");
    return ok ? 0 : 1;
}

int cmd_cashflow(const CommandOptions& options) {
    RunConfig config = load_with_overrides(options);
    Frame frame = resolve_frame(config);
    std::vector<double> s_grid = bin_centers(0.0, frame.horizon, config.engine.n_s);
    std::vector<Cell> cells = make_cells(config);

    // the oracle lives on the base model with the policy's raw (u0, t0)
    McCurve mc;
    if (options.with_mc) {
        IntensityFamily base = config.build_family();
        PaymentSpec base_pay = config.build_payments();
        if (config.policy.initial_time > 0.0)
            throw std::invalid_argument("cashflow --with-mc: initial_time shift needs t=0");
        mc = mc_cashflow(base, base_pay, config.policy.initial_state - 1,
                         config.policy.initial_duration, config.mc.n_paths, s_grid,
                         config.mc.seeds.empty() ? 901 : config.mc.seeds[0]);
    }

    int bad_cells = 0;
    for (const auto& cell : cells) {
        EngineParams params = cell_params(config, cell);
        KernelProvider provider(frame.family, frame.horizon, params);
        Matrix curve = cashflow_curve_all(provider, frame.payments, s_grid);

        std::string tag = cell_tag(cell.gamma, cell.mode, cell.seed);
        CsvWriter csv(out_path(config, "cashflow_" + tag + ".csv"),
                      {"s", "i", "c_value", "gamma", "mode", "seed"});
        for (std::size_t k = 0; k < s_grid.size(); ++k)
            for (int i = 0; i < frame.family.states; ++i)
                csv.row(s_grid[k], i + 1, curve(long(k), i), cell.gamma,
                        to_string(cell.mode), (unsigned long long)cell.seed);

        if (options.with_mc) {
            CsvWriter cmp(out_path(config, "cashflow_mc_" + tag + ".csv"),
                          {"s", "i", "c_value", "mc_mean", "mc_se", "z", "gamma", "mode",
                           "seed", "mc_n_paths", "mc_seed"});
            int exceed = 0;
            for (std::size_t k = 0; k < s_grid.size(); ++k) {
                double c = curve(long(k), frame.i0);
                double z = 0.0;
                if (mc.se[k] > 0.0)
                    z = (c - mc.mean[k]) / mc.se[k];
                else if (std::abs(c - mc.mean[k]) > 1e-12)
                    z = std::numeric_limits<double>::infinity();
                if (std::abs(z) > 3.0) ++exceed;
                cmp.row(s_grid[k], config.policy.initial_state, c, mc.mean[k], mc.se[k], z,
                        cell.gamma, to_string(cell.mode), (unsigned long long)cell.seed,
                        mc.n_paths, (unsigned long long)mc.seed);
            }
            double frac = 1.0 - double(exceed) / double(s_grid.size());
            bool ok = frac >= 0.95;
            if (!ok) ++bad_cells;
            std::cout << "cashflow " << tag << ": |z|<=3 on " << format_double(100.0 * frac)
                      << "% of points" << (ok ? "\n" : " (BELOW 95%)\n");
        } else {
            std::cout << "cashflow " << tag << ": wrote " << s_grid.size() << " points\n";
        }
    }
    return bad_cells == 0 ? 0 : 1;
}

int cmd_reserve(const CommandOptions& options) {
    RunConfig config = load_with_overrides(options);
    Frame frame = resolve_frame(config);
    std::vector<Cell> cells = make_cells(config);

    CsvWriter csv(out_path(config, "reserve.csv"),
                  {"i", "u", "t", "V", "gamma", "mode", "seed"});
    for (const auto& cell : cells) {
        EngineParams params = cell_params(config, cell);
        KernelProvider provider(frame.family, frame.horizon, params);
        Vector values = reserves_all(provider, frame.payments, frame.discount,
                                     config.engine.n_s);
        for (int i = 0; i < frame.base_states; ++i)
            csv.row(i + 1, config.policy.initial_duration, config.policy.initial_time,
                    values(i), cell.gamma, to_string(cell.mode),
                    (unsigned long long)cell.seed);
        std::cout << "reserve " << cell_tag(cell.gamma, cell.mode, cell.seed) << ": V("
                  << config.policy.initial_state
                  << ") = " << format_double(values(frame.i0)) << "\n";
    }
    return 0;
}

int cmd_convergence(const CommandOptions& options) {
    RunConfig config = load_with_overrides(options);
    Frame frame = resolve_frame(config);
    double T = frame.horizon;
    double eps = config.engine.epsilon;
    std::optional<double> K = frame.family.lipschitz_k;

    struct Row {
        double gamma;
        std::uint64_t seed;
        int k;
        double tv_max, k_ck, grid_dev, c_cap, qbound, defect_max, atom_tv, density_tv;
        bool lemma_ok, qbound_ok;
    };
    struct CellOut {
        std::vector<Row> rows;
        double tv_final = 0.0;
    };

    std::vector<Cell> cells;
    for (double gamma : config.engine.gammas)
        for (auto seed : config.engine.seeds) cells.push_back({gamma, StepMode::conditional, seed});
    std::vector<CellOut> results(cells.size());

    parallel_for(int(cells.size()), [&](int ci) {
        const Cell& cell = cells[std::size_t(ci)];
        EngineParams cp = cell_params(config, cell);
        cp.mode = StepMode::conditional;
        cp.seed = cell.seed;
        KernelProvider cond(frame.family, T, cp);
        EngineParams up = cp;
        up.mode = StepMode::unconditional;
        up.seed = 0;
        KernelProvider uncond(frame.family, T, up);

        int levels = cond.table().levels();
        double grid_dev = grid_deviation(*cond.steps().grid(), eps);
        int cap = std::min(levels, int(std::floor(std::pow(cell.gamma, 1.0 + eps))));
        double c_cap = step_tv_bound(cond.steps(), uncond.steps(), cap);
        double qbound = K ? 3.0 * (*K) / cell.gamma * grid_dev : 0.0;
        bool qbound_ok = !K || c_cap <= qbound + 1e-12;

        double defect_max = 0.0;
        for (int a = 1; a <= 10; ++a) {
            double s = T * a / 10.0;
            defect_max = std::max(defect_max,
                                  normalization_report(cond.transition(s, false)).maxCoeff());
            defect_max = std::max(
                defect_max, normalization_report(uncond.transition(s, false)).maxCoeff());
        }

        double s_diag = std::min(2.0, T);
        TransitionMeasure mc_ = cond.transition(s_diag, true);
        TransitionMeasure mu_ = uncond.transition(s_diag, true);
        double a_tv = atom_tv(mc_, mu_).maxCoeff();
        double d_tv = density_tv_integral(mc_, mu_).maxCoeff();

        CellOut out;
        std::vector<int> ks = {std::max(1, levels / 4), std::max(1, levels / 2), levels};
        for (int k : ks) {
            std::vector<int> full(std::size_t(k) + 1);
            for (int w = 0; w <= k; ++w) full[std::size_t(w)] = w;
            double tv = tv_distance(cond.table(), uncond.table(), k, full).maxCoeff();
            double ck = step_tv_bound(cond.steps(), uncond.steps(), k);
            Row row{cell.gamma, cell.seed,  k,     tv,   double(k) * ck,
                    grid_dev,   c_cap,      qbound, defect_max, a_tv,
                    d_tv,       tv <= double(k) * ck + 1e-12, qbound_ok};
            out.rows.push_back(row);
            if (k == levels) out.tv_final = tv;
        }
        results[std::size_t(ci)] = std::move(out);
    });

    CsvWriter csv(out_path(config, "convergence.csv"),
                  {"gamma", "seed", "k", "tv_max", "k_ck", "lemma_ok", "grid_deviation",
                   "c_gamma_eps", "qbound", "qbound_ok", "defect_max", "atom_tv",
                   "density_tv_int"});
    bool hard_ok = true;
    for (const auto& out : results)
        for (const auto& r : out.rows) {
            csv.row(r.gamma, (unsigned long long)r.seed, r.k, r.tv_max, r.k_ck,
                    r.lemma_ok ? 1 : 0, r.grid_dev, r.c_cap, r.qbound, r.qbound_ok ? 1 : 0,
                    r.defect_max, r.atom_tv, r.density_tv);
            if (!r.lemma_ok || !r.qbound_ok) hard_ok = false;
            if (r.defect_max > config.engine.tail_prob + 1e-8) hard_ok = false;
        }

    // soft trend: seed-averaged final-level TV non-increasing in gamma
    std::cout << "convergence: seed-averaged TV by gamma:";
    double prev = -1.0;
    bool trend_ok = true;
    for (std::size_t gi = 0; gi < config.engine.gammas.size(); ++gi) {
        double mean = 0.0;
        int count = 0;
        for (std::size_t ci = 0; ci < cells.size(); ++ci)
            if (cells[ci].gamma == config.engine.gammas[gi]) {
                mean += results[ci].tv_final;
                ++count;
            }
        mean /= std::max(1, count);
        std::cout << " " << format_double(mean);
        if (prev >= 0.0 && mean > prev) trend_ok = false;
        prev = mean;
    }
    std::cout << (trend_ok ? " (non-increasing)\n" : " (NOT monotone; soft)\n");
    std::cout << (hard_ok ? "convergence: OK\n" : "convergence: HARD INVARIANT FAILED\n");
    return hard_ok ? 0 : 1;
}

}  // namespace smj
