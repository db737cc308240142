#include "smj/config.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <stdexcept>

namespace smj {

namespace {

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key()))
            throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

std::vector<FuncTerm> parse_terms(const json& j, const std::string& where) {
    std::vector<FuncTerm> terms;
    if (!j.is_array()) throw std::invalid_argument(where + ": 'terms' must be an array");
    for (const auto& tj : j) {
        check_keys(tj, where + ".term",
                   {"scale", "s_window", "v_min", "exp_s", "exp_v", "poly_s", "poly_v",
                    "s_clamp", "v_clamp"});
        FuncTerm t;
        t.scale = get_or(tj, "scale", 1.0);
        if (tj.contains("s_window")) {
            auto w = tj.at("s_window").get<std::vector<double>>();
            if (w.size() != 2) throw std::invalid_argument(where + ": s_window needs [a,b]");
            t.s_window = {{w[0], w[1]}};
        }
        if (tj.contains("v_min")) t.v_min = tj.at("v_min").get<double>();
        t.exp_s = get_or(tj, "exp_s", 0.0);
        t.exp_v = get_or(tj, "exp_v", 0.0);
        t.poly_s = get_or(tj, "poly_s", std::vector<double>{});
        t.poly_v = get_or(tj, "poly_v", std::vector<double>{});
        if (tj.contains("s_clamp")) {
            auto c = tj.at("s_clamp").get<std::vector<double>>();
            if (c.size() != 2) throw std::invalid_argument(where + ": s_clamp needs [lo,hi]");
            t.s_clamp = {{c[0], c[1]}};
        }
        if (tj.contains("v_clamp")) {
            auto c = tj.at("v_clamp").get<std::vector<double>>();
            if (c.size() != 2) throw std::invalid_argument(where + ": v_clamp needs [lo,hi]");
            t.v_clamp = {{c[0], c[1]}};
        }
        terms.push_back(std::move(t));
    }
    return terms;
}

json terms_echo(const std::vector<FuncTerm>& terms) {
    json arr = json::array();
    for (const auto& t : terms) {
        json tj;
        tj["scale"] = t.scale;
        if (t.s_window) tj["s_window"] = {(*t.s_window)[0], (*t.s_window)[1]};
        if (t.v_min) tj["v_min"] = *t.v_min;
        tj["exp_s"] = t.exp_s;
        tj["exp_v"] = t.exp_v;
        if (!t.poly_s.empty()) tj["poly_s"] = t.poly_s;
        if (!t.poly_v.empty()) tj["poly_v"] = t.poly_v;
        if (t.s_clamp) tj["s_clamp"] = {(*t.s_clamp)[0], (*t.s_clamp)[1]};
        if (t.v_clamp) tj["v_clamp"] = {(*t.v_clamp)[0], (*t.v_clamp)[1]};
        arr.push_back(tj);
    }
    return arr;
}

DisabilityRates parse_rates(const json& j) {
    check_keys(j, "model.rates",
               {"note", "mortality_ages", "mortality_rates", "log_incidence_coeffs",
                "incidence_center", "recovery", "disabled_mortality"});
    DisabilityRates r;
    r.mortality_ages = j.at("mortality_ages").get<std::vector<double>>();
    r.mortality_rates = j.at("mortality_rates").get<std::vector<double>>();
    auto coeffs = j.at("log_incidence_coeffs").get<std::vector<double>>();
    if (coeffs.size() != 6)
        throw std::invalid_argument("model.rates: log_incidence_coeffs needs 6 entries");
    for (std::size_t k = 0; k < 6; ++k) r.log_incidence_coeffs[k] = coeffs[k];
    r.incidence_center = get_or(j, "incidence_center", 0.0);

    const json& rec = j.at("recovery");
    check_keys(rec, "model.rates.recovery", {"phi", "beta", "theta"});
    auto phi = rec.at("phi").get<std::vector<double>>();
    auto beta = rec.at("beta").get<std::vector<double>>();
    auto theta = rec.at("theta").get<std::vector<double>>();
    if (phi.size() != 4 || beta.size() != 2 || theta.size() != 3)
        throw std::invalid_argument("model.rates.recovery: need phi[4], beta[2], theta[3]");
    r.phi0 = phi[0]; r.phi1 = phi[1]; r.phi2 = phi[2]; r.phi3 = phi[3];
    r.beta1 = beta[0]; r.beta2 = beta[1];
    r.theta1 = theta[0]; r.theta2 = theta[1]; r.theta3 = theta[2];

    const json& dm = j.at("disabled_mortality");
    check_keys(dm, "model.rates.disabled_mortality", {"alpha", "eta", "zeta"});
    auto alpha = dm.at("alpha").get<std::vector<double>>();
    auto eta = dm.at("eta").get<std::vector<double>>();
    auto zeta = dm.at("zeta").get<std::vector<double>>();
    if (alpha.size() != 2 || eta.size() != 2 || zeta.size() != 1)
        throw std::invalid_argument(
            "model.rates.disabled_mortality: need alpha[2], eta[2], zeta[1]");
    r.alpha1 = alpha[0]; r.alpha2 = alpha[1];
    r.eta1 = eta[0]; r.eta2 = eta[1];
    r.zeta1 = zeta[0];
    return r;
}

ModelConfig parse_model(const json& j) {
    check_keys(j, "model",
               {"kind", "states", "matrix", "entries", "rates", "note", "age0", "gamma0",
                "lipschitz_k", "validation_grid"});
    ModelConfig m;
    m.kind = j.at("kind").get<std::string>();
    m.note = get_or(j, "note", std::string{});
    if (j.contains("lipschitz_k")) m.lipschitz_k = j.at("lipschitz_k").get<double>();

    if (m.kind == "constant") {
        m.matrix = j.at("matrix").get<std::vector<std::vector<double>>>();
        m.states = int(m.matrix.size());
        double bound = 0.0;
        for (int i = 0; i < m.states; ++i) {
            if (int(m.matrix[std::size_t(i)].size()) != m.states)
                throw std::invalid_argument("model.matrix: must be square");
            bound = std::max(bound, std::abs(m.matrix[std::size_t(i)][std::size_t(i)]));
        }
        m.gamma0 = get_or(j, "gamma0", bound);
    } else if (m.kind == "disability") {
        m.states = 3;
        m.rates = parse_rates(j.at("rates"));
        m.age0 = get_or(j, "age0", 0.0);
        m.gamma0 = j.at("gamma0").get<double>();
    } else if (m.kind == "expr") {
        m.states = j.at("states").get<int>();
        for (const auto& ej : j.at("entries")) {
            check_keys(ej, "model.entries", {"from", "to", "terms"});
            ExprEntry e;
            e.from = ej.at("from").get<int>();
            e.to = ej.at("to").get<int>();
            e.terms = parse_terms(ej.at("terms"), "model.entries");
            if (e.from < 1 || e.from > m.states || e.to < 1 || e.to > m.states ||
                e.from == e.to)
                throw std::invalid_argument("model.entries: bad (from,to) pair");
            m.entries.push_back(std::move(e));
        }
        m.gamma0 = j.at("gamma0").get<double>();
    } else {
        throw std::invalid_argument("model.kind must be constant|disability|expr");
    }

    if (j.contains("validation_grid")) {
        const json& g = j.at("validation_grid");
        check_keys(g, "model.validation_grid",
                   {"s_min", "s_max", "n_s", "v_min", "v_max", "n_v"});
        double s0 = g.at("s_min").get<double>(), s1 = g.at("s_max").get<double>();
        double v0 = g.at("v_min").get<double>(), v1 = g.at("v_max").get<double>();
        int ns = g.at("n_s").get<int>(), nv = g.at("n_v").get<int>();
        for (int a = 0; a < ns; ++a)
            for (int b = 0; b < nv; ++b)
                m.validation_grid.emplace_back(
                    s0 + (ns > 1 ? (s1 - s0) * a / (ns - 1) : 0.0),
                    v0 + (nv > 1 ? (v1 - v0) * b / (nv - 1) : 0.0));
    }
    return m;
}

PaymentsConfig parse_payments(const json& j) {
    check_keys(j, "payments",
               {"horizon", "rates", "lumps", "discrete", "initial_premium",
                "duration_independent"});
    PaymentsConfig p;
    p.horizon = j.at("horizon").get<double>();
    if (!(p.horizon > 0.0)) throw std::invalid_argument("payments.horizon must be > 0");
    for (const auto& rj : get_or(j, "rates", json::array())) {
        check_keys(rj, "payments.rates", {"state", "terms"});
        RateBlock b;
        b.state = rj.at("state").get<int>();
        b.terms = parse_terms(rj.at("terms"), "payments.rates");
        p.rates.push_back(std::move(b));
    }
    for (const auto& lj : get_or(j, "lumps", json::array())) {
        check_keys(lj, "payments.lumps", {"from", "to", "terms"});
        LumpBlock b;
        b.from = lj.at("from").get<int>();
        b.to = lj.at("to").get<int>();
        b.terms = parse_terms(lj.at("terms"), "payments.lumps");
        p.lumps.push_back(std::move(b));
    }
    for (const auto& dj : get_or(j, "discrete", json::array())) {
        check_keys(dj, "payments.discrete", {"time", "state", "v_min", "amount"});
        DiscretePayment d;
        d.time = dj.at("time").get<double>();
        d.state = dj.at("state").get<int>();
        d.v_min = get_or(dj, "v_min", 0.0);
        d.amount = dj.at("amount").get<double>();
        p.discrete.push_back(d);
    }
    p.initial_premium = get_or(j, "initial_premium", 0.0);

    bool derived = true;
    for (const auto& b : p.rates)
        if (terms_depend_on_duration(b.terms)) derived = false;
    for (const auto& b : p.lumps)
        if (terms_depend_on_duration(b.terms)) derived = false;
    p.duration_independent = get_or(j, "duration_independent", derived);
    if (p.duration_independent && !derived)
        throw std::invalid_argument(
            "payments.duration_independent=true but terms depend on duration");
    return p;
}

DiscountConfig parse_discount(const json& j) {
    check_keys(j, "discount", {"kind", "rate", "times", "rates"});
    DiscountConfig d;
    d.kind = get_or(j, "kind", std::string("flat"));
    if (d.kind == "flat") {
        d.rate = get_or(j, "rate", 0.0);
        if (d.rate < 0.0) throw std::invalid_argument("discount.rate must be >= 0");
    } else if (d.kind == "piecewise") {
        d.times = j.at("times").get<std::vector<double>>();
        d.rates = j.at("rates").get<std::vector<double>>();
        if (d.times.empty() || d.times.size() != d.rates.size() || d.times.front() != 0.0)
            throw std::invalid_argument("discount.piecewise: times/rates malformed");
        for (std::size_t k = 1; k < d.times.size(); ++k)
            if (d.times[k] <= d.times[k - 1])
                throw std::invalid_argument("discount.times must increase");
        for (double r : d.rates)
            if (r < 0.0) throw std::invalid_argument("discount.rates must be >= 0");
    } else {
        throw std::invalid_argument("discount.kind must be flat|piecewise");
    }
    return d;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    check_keys(j, "config",
               {"model", "payments", "discount", "engine", "mc", "output", "policy"});
    RunConfig c;
    c.model = parse_model(j.at("model"));
    c.payments = parse_payments(j.at("payments"));
    if (j.contains("discount")) c.discount = parse_discount(j.at("discount"));

    if (j.contains("engine")) {
        const json& e = j.at("engine");
        check_keys(e, "engine",
                   {"gamma", "mode", "seeds", "tail_prob", "n_s", "n_v", "epsilon"});
        c.engine.gammas = get_or(e, "gamma", c.engine.gammas);
        c.engine.mode = get_or(e, "mode", c.engine.mode);
        if (c.engine.mode != "conditional" && c.engine.mode != "unconditional" &&
            c.engine.mode != "both")
            throw std::invalid_argument("engine.mode must be conditional|unconditional|both");
        c.engine.seeds = get_or(e, "seeds", c.engine.seeds);
        c.engine.tail_prob = get_or(e, "tail_prob", c.engine.tail_prob);
        c.engine.n_s = get_or(e, "n_s", c.engine.n_s);
        c.engine.n_v = get_or(e, "n_v", c.engine.n_v);
        c.engine.epsilon = get_or(e, "epsilon", c.engine.epsilon);
        for (double g : c.engine.gammas)
            if (g < c.model.gamma0)
                throw std::invalid_argument("engine.gamma below model gamma0");
    }
    if (j.contains("mc")) {
        const json& m = j.at("mc");
        check_keys(m, "mc", {"n_paths", "seeds"});
        c.mc.n_paths = get_or(m, "n_paths", c.mc.n_paths);
        c.mc.seeds = get_or(m, "seeds", c.mc.seeds);
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, "output", {"directory", "formats"});
        c.output.directory = get_or(o, "directory", c.output.directory);
        c.output.formats = get_or(o, "formats", c.output.formats);
    }
    if (j.contains("policy")) {
        const json& p = j.at("policy");
        check_keys(p, "policy", {"initial_state", "initial_duration", "initial_time"});
        c.policy.initial_state = get_or(p, "initial_state", 1);
        c.policy.initial_duration = get_or(p, "initial_duration", 0.0);
        c.policy.initial_time = get_or(p, "initial_time", 0.0);
    }
    if (c.policy.initial_state < 1 || c.policy.initial_state > c.model.states)
        throw std::invalid_argument("policy.initial_state out of range");
    for (const auto& b : c.payments.rates)
        if (b.state < 1 || b.state > c.model.states)
            throw std::invalid_argument("payments.rates: state out of range");
    for (const auto& b : c.payments.lumps)
        if (b.from < 1 || b.from > c.model.states || b.to < 1 || b.to > c.model.states ||
            b.from == b.to)
            throw std::invalid_argument("payments.lumps: bad (from,to)");
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }
    try {
        return parse_run_config(j);
    } catch (const json::exception& e) {
        throw std::runtime_error("config schema error in " + path + ": " + e.what());
    }
}

IntensityFamily RunConfig::build_family() const {
    if (model.kind == "constant") {
        Matrix lam(model.states, model.states);
        for (int i = 0; i < model.states; ++i)
            for (int k = 0; k < model.states; ++k)
                lam(i, k) = model.matrix[std::size_t(i)][std::size_t(k)];
        IntensityFamily fam;
        fam.states = model.states;
        fam.gamma0 = model.gamma0;
        fam.lipschitz_k = model.lipschitz_k;
        fam.eval_into = [lam](double, double, Matrix& out) { out = lam; };
        return fam;
    }
    if (model.kind == "disability")
        return disability_family(model.rates, model.age0, model.gamma0, model.lipschitz_k);

    auto entries = std::make_shared<std::vector<ExprEntry>>(model.entries);
    int n = model.states;
    IntensityFamily fam;
    fam.states = n;
    fam.gamma0 = model.gamma0;
    fam.lipschitz_k = model.lipschitz_k;
    fam.eval_into = [entries, n](double s, double v, Matrix& out) {
        out.setZero(n, n);
        for (const auto& e : *entries) out(e.from - 1, e.to - 1) = eval_terms(e.terms, s, v);
        for (int i = 0; i < n; ++i) out(i, i) = -out.row(i).sum();
    };
    return fam;
}

PaymentSpec RunConfig::build_payments() const {
    PaymentSpec p = PaymentSpec::zero(model.states, payments.horizon);
    auto rates = std::make_shared<std::vector<RateBlock>>(payments.rates);
    auto lumps = std::make_shared<std::vector<LumpBlock>>(payments.lumps);
    p.rate = [rates](int j, double v, double s) {
        double out = 0.0;
        for (const auto& b : *rates)
            if (b.state - 1 == j) out += eval_terms(b.terms, s, v);
        return out;
    };
    p.lump = [lumps](int j, double v, int k, double s) {
        double out = 0.0;
        for (const auto& b : *lumps)
            if (b.from - 1 == j && b.to - 1 == k) out += eval_terms(b.terms, s, v);
        return out;
    };
    p.has_lumps = !payments.lumps.empty();
    p.duration_independent = payments.duration_independent;
    bool lump_dur = false;
    for (const auto& b : payments.lumps)
        if (terms_depend_on_duration(b.terms)) lump_dur = true;
    p.lump_duration_independent = !lump_dur;
    p.initial_premium = payments.initial_premium;
    for (const auto& d : payments.discrete)
        p.discrete.push_back({d.time, d.state - 1, d.v_min, d.amount});
    for (const auto& b : payments.rates)
        for (const auto& t : b.terms)
            if (t.s_window) {
                p.s_breakpoints.push_back((*t.s_window)[0]);
                p.s_breakpoints.push_back((*t.s_window)[1]);
            }
    for (const auto& b : payments.lumps)
        for (const auto& t : b.terms)
            if (t.s_window) {
                p.s_breakpoints.push_back((*t.s_window)[0]);
                p.s_breakpoints.push_back((*t.s_window)[1]);
            }
    return p;
}

DiscountCurve RunConfig::build_discount() const {
    if (discount.kind == "flat") return DiscountCurve::flat(discount.rate);
    return {discount.times, discount.rates};
}

std::vector<StepMode> RunConfig::modes() const {
    if (engine.mode == "conditional") return {StepMode::conditional};
    if (engine.mode == "unconditional") return {StepMode::unconditional};
    return {StepMode::conditional, StepMode::unconditional};
}

json RunConfig::echo() const {
    json j;
    json m;
    m["kind"] = model.kind;
    m["states"] = model.states;
    m["gamma0"] = model.gamma0;
    if (model.lipschitz_k) m["lipschitz_k"] = *model.lipschitz_k;
    if (!model.note.empty()) m["note"] = model.note;
    if (model.kind == "constant") m["matrix"] = model.matrix;
    if (model.kind == "disability") {
        m["age0"] = model.age0;
        json r;
        r["mortality_ages"] = model.rates.mortality_ages;
        r["mortality_rates"] = model.rates.mortality_rates;
        r["log_incidence_coeffs"] = model.rates.log_incidence_coeffs;
        r["incidence_center"] = model.rates.incidence_center;
        r["recovery"] = {{"phi", {model.rates.phi0, model.rates.phi1, model.rates.phi2,
                                  model.rates.phi3}},
                         {"beta", {model.rates.beta1, model.rates.beta2}},
                         {"theta", {model.rates.theta1, model.rates.theta2,
                                    model.rates.theta3}}};
        r["disabled_mortality"] = {{"alpha", {model.rates.alpha1, model.rates.alpha2}},
                                   {"eta", {model.rates.eta1, model.rates.eta2}},
                                   {"zeta", {model.rates.zeta1}}};
        m["rates"] = r;
    }
    if (model.kind == "expr") {
        json arr = json::array();
        for (const auto& e : model.entries)
            arr.push_back({{"from", e.from}, {"to", e.to}, {"terms", terms_echo(e.terms)}});
        m["entries"] = arr;
    }
    j["model"] = m;

    json p;
    p["horizon"] = payments.horizon;
    p["duration_independent"] = payments.duration_independent;
    p["initial_premium"] = payments.initial_premium;
    json rr = json::array();
    for (const auto& b : payments.rates)
        rr.push_back({{"state", b.state}, {"terms", terms_echo(b.terms)}});
    p["rates"] = rr;
    json ll = json::array();
    for (const auto& b : payments.lumps)
        ll.push_back({{"from", b.from}, {"to", b.to}, {"terms", terms_echo(b.terms)}});
    p["lumps"] = ll;
    json dd = json::array();
    for (const auto& d : payments.discrete)
        dd.push_back({{"time", d.time}, {"state", d.state}, {"v_min", d.v_min},
                      {"amount", d.amount}});
    p["discrete"] = dd;
    j["payments"] = p;

    if (discount.kind == "flat")
        j["discount"] = {{"kind", "flat"}, {"rate", discount.rate}};
    else
        j["discount"] = {{"kind", "piecewise"}, {"times", discount.times},
                         {"rates", discount.rates}};

    j["engine"] = {{"gamma", engine.gammas},   {"mode", engine.mode},
                   {"seeds", engine.seeds},    {"tail_prob", engine.tail_prob},
                   {"n_s", engine.n_s},        {"n_v", engine.n_v},
                   {"epsilon", engine.epsilon}};
    j["mc"] = {{"n_paths", mc.n_paths}, {"seeds", mc.seeds}};
    j["output"] = {{"directory", output.directory}, {"formats", output.formats}};
    j["policy"] = {{"initial_state", policy.initial_state},
                   {"initial_duration", policy.initial_duration},
                   {"initial_time", policy.initial_time}};
    return j;
}

}  // namespace smj
