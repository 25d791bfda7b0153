#include "cvol/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

namespace cvol {

namespace {

class ErrorLog {
  public:
    void add(const std::string& path, const std::string& what) {
        messages_.push_back(path + ": " + what);
    }
    bool empty() const { return messages_.empty(); }
    std::string joined() const {
        std::ostringstream out;
        out << "configuration errors:";
        for (const auto& m : messages_) out << "\n  - " << m;
        return out.str();
    }

  private:
    std::vector<std::string> messages_;
};

template <typename T>
T get_req(const YAML::Node& node, const char* key, const std::string& path,
          ErrorLog& log, T fallback = T{}) {
    const YAML::Node child = node[key];
    if (!child) {
        log.add(path + "." + key, "is required");
        return fallback;
    }
    try {
        return child.as<T>();
    } catch (const std::exception&) {
        log.add(path + "." + key, "cannot be parsed");
        return fallback;
    }
}

template <typename T>
T get_opt(const YAML::Node& node, const char* key, const std::string& path,
          ErrorLog& log, T fallback) {
    const YAML::Node child = node[key];
    if (!child) return fallback;
    try {
        return child.as<T>();
    } catch (const std::exception&) {
        log.add(path + "." + key, "cannot be parsed");
        return fallback;
    }
}

ModelConfig parse_model(const YAML::Node& node, ErrorLog& log) {
    ModelConfig model;
    if (!node) {
        log.add("model", "is required");
        return model;
    }
    model.sigma0 = get_req<double>(node, "sigma0", "model", log);
    model.beta = get_opt<double>(node, "beta", "model", log, 1.0);
    model.rate = get_req<double>(node, "rate", "model", log);
    model.spot = get_req<double>(node, "spot", "model", log);
    if (const YAML::Node drift = node["drift"]) {
        std::string text;
        try {
            text = drift.as<std::string>();
        } catch (const std::exception&) {
        }
        if (text == "auto") {
            model.drift_auto = true;
        } else {
            try {
                model.drift = drift.as<double>();
                model.drift_auto = false;
            } catch (const std::exception&) {
                log.add("model.drift", "must be a number or \"auto\"");
            }
        }
    }
    if (const YAML::Node clock = node["clock"]) {
        BernsteinSpec bern;
        bern.mu = get_req<double>(clock, "mu", "model.clock", log, 1.0);
        bern.nu = get_req<double>(clock, "nu", "model.clock", log);
        if (bern.mu <= 0.0) log.add("model.clock.mu", "must be positive");
        if (bern.nu < 0.0) log.add("model.clock.nu", "must be nonnegative");
        model.clock = bern;
    }
    if (model.sigma0 <= 0.0) log.add("model.sigma0", "must be positive");
    if (model.spot <= 0.0) log.add("model.spot", "must be positive");
    if (model.beta <= 0.0) log.add("model.beta", "must be positive");
    return model;
}

GridSpec parse_grid(const YAML::Node& node, const ModelConfig& model,
                    ErrorLog& log) {
    GridSpec grid{};
    if (!node) {
        log.add("grid", "is required");
        return grid;
    }
    grid.l = get_req<double>(node, "lower", "grid", log);
    grid.s = get_opt<double>(node, "anchor", "grid", log, model.spot);
    grid.u = get_req<double>(node, "upper", "grid", log);
    grid.N = get_req<int>(node, "count", "grid", log);
    grid.g_l = get_req<double>(node, "stretch_lower", "grid", log);
    grid.g_u = get_req<double>(node, "stretch_upper", "grid", log);
    if (grid.N < 4 || grid.N % 2 != 0)
        log.add("grid.count", "must be an even number of at least 4");
    if (!(grid.l < grid.s && grid.s < grid.u))
        log.add("grid", "needs lower < anchor < upper");
    if (grid.g_l <= 0.0 || grid.g_u <= 0.0)
        log.add("grid", "stretch parameters must be positive");
    return grid;
}

std::optional<Corridor> parse_corridor(const YAML::Node& node, ErrorLog& log) {
    if (!node) return std::nullopt;
    Corridor corridor;
    corridor.lower = get_opt<double>(node, "lower", "corridor", log, 0.0);
    corridor.upper = get_opt<double>(node, "upper", "corridor", log,
                                     std::numeric_limits<double>::infinity());
    if (corridor.lower < 0.0) log.add("corridor.lower", "must be nonnegative");
    if (!(corridor.lower < corridor.upper))
        log.add("corridor", "needs lower < upper");
    return corridor;
}

AlphaPolicy parse_alpha(const YAML::Node& node, const std::string& path,
                        ErrorLog& log, double& alpha) {
    if (!node) return AlphaPolicy::automatic;
    std::string text;
    try {
        text = node.as<std::string>();
    } catch (const std::exception&) {
    }
    if (text == "auto") return AlphaPolicy::automatic;
    if (text == "min_feasible") return AlphaPolicy::min_feasible;
    try {
        alpha = node.as<double>();
        return AlphaPolicy::fixed;
    } catch (const std::exception&) {
        log.add(path, "must be a number, \"auto\" or \"min_feasible\"");
        return AlphaPolicy::automatic;
    }
}

MatchingConfig parse_matching(const YAML::Node& node, ErrorLog& log) {
    MatchingConfig matching;
    if (!node) {
        log.add("matching", "is required");
        return matching;
    }
    matching.C = get_req<int>(node, "C", "matching", log);
    if (matching.C < 1) log.add("matching.C", "must be at least 1");
    matching.circle_multiple =
        get_opt<double>(node, "circle_multiple", "matching", log, 3.0);
    if (matching.circle_multiple <= 0.0)
        log.add("matching.circle_multiple", "must be positive");
    matching.tail_guard = get_opt<double>(node, "tail_guard", "matching", log, 1e-4);
    if (matching.tail_guard <= 0.0)
        log.add("matching.tail_guard", "must be positive");

    if (const YAML::Node region = node["region"]) {
        bool is_auto = false;
        try {
            is_auto = region.as<std::string>() == "auto";
        } catch (const std::exception&) {
        }
        if (!is_auto) {
            matching.region.automatic = false;
            matching.region.lower =
                get_req<double>(region, "lower", "matching.region", log);
            matching.region.upper =
                get_req<double>(region, "upper", "matching.region", log);
            if (!(matching.region.lower < matching.region.upper))
                log.add("matching.region", "needs lower < upper");
        }
    }
    matching.region.mass_tol =
        get_opt<double>(node, "region_mass_tol", "matching", log, 1e-6);
    if (matching.region.mass_tol <= 0.0)
        log.add("matching.region_mass_tol", "must be positive");

    const YAML::Node schemes = node["schemes"];
    if (!schemes || !schemes.IsSequence() || schemes.size() == 0) {
        log.add("matching.schemes", "must be a nonempty list");
        return matching;
    }
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        const std::string path = "matching.schemes[" + std::to_string(i) + "]";
        const YAML::Node s = schemes[i];
        SchemeConfig scheme;
        scheme.k = get_req<int>(s, "k", path, log);
        scheme.n = get_opt<int>(s, "n", path, log, 0);
        scheme.m = get_opt<int>(s, "m", path, log, 0);
        scheme.policy = parse_alpha(s["alpha"], path + ".alpha", log, scheme.alpha);
        scheme.strict = get_opt<bool>(s, "strict", path, log, false);
        if (scheme.k < 1 || scheme.k > 3)
            log.add(path + ".k", "must be 1, 2 or 3");
        if (scheme.k >= 2 && scheme.n < 2)
            log.add(path + ".n", "must be at least 2 when two or more moments are matched");
        if (scheme.k == 3 && scheme.m <= scheme.n)
            log.add(path + ".m", "must exceed n when three moments are matched");
        if (scheme.k == 1 && scheme.policy != AlphaPolicy::fixed)
            log.add(path + ".alpha",
                    "matching one moment admits every pitch; give alpha explicitly");
        if (scheme.policy == AlphaPolicy::fixed && scheme.alpha <= 0.0)
            log.add(path + ".alpha", "must be positive");
        matching.schemes.push_back(scheme);
    }
    return matching;
}

PayoffKind parse_kind(const std::string& text, const std::string& path,
                      ErrorLog& log) {
    if (text == "variance_swap") return PayoffKind::variance_swap;
    if (text == "volatility_swap") return PayoffKind::volatility_swap;
    if (text == "variance_call") return PayoffKind::variance_call;
    log.add(path, "unknown payoff kind '" + text + "'");
    return PayoffKind::variance_swap;
}

PayoffConfig parse_payoffs(const YAML::Node& node, ErrorLog& log) {
    PayoffConfig payoffs;
    if (!node) {
        log.add("payoffs", "is required");
        return payoffs;
    }
    payoffs.maturities =
        get_req<std::vector<double>>(node, "maturities", "payoffs", log);
    for (double t : payoffs.maturities)
        if (t <= 0.0) log.add("payoffs.maturities", "must all be positive");
    const auto names =
        get_req<std::vector<std::string>>(node, "kinds", "payoffs", log);
    for (std::size_t i = 0; i < names.size(); ++i)
        payoffs.kinds.push_back(
            parse_kind(names[i], "payoffs.kinds[" + std::to_string(i) + "]", log));
    if (payoffs.maturities.empty()) log.add("payoffs.maturities", "must be nonempty");
    if (payoffs.kinds.empty()) log.add("payoffs.kinds", "must be nonempty");
    payoffs.call_moneyness = get_opt<std::vector<double>>(
        node, "call_moneyness", "payoffs", log, payoffs.call_moneyness);
    for (double q : payoffs.call_moneyness)
        if (q <= 0.0) log.add("payoffs.call_moneyness", "must all be positive");
    payoffs.discount_rate =
        get_opt<double>(node, "discount_rate", "payoffs", log, 0.0);
    return payoffs;
}

std::optional<VanillaConfig> parse_vanillas(const YAML::Node& node, ErrorLog& log) {
    if (!node) return std::nullopt;
    VanillaConfig v;
    v.strikes = get_req<std::vector<double>>(node, "strikes", "vanillas", log);
    v.maturities =
        get_req<std::vector<double>>(node, "maturities", "vanillas", log);
    v.grow_strikes = get_opt<bool>(node, "grow_strikes", "vanillas", log, true);
    if (v.strikes.empty()) log.add("vanillas.strikes", "must be nonempty");
    for (double k : v.strikes)
        if (k <= 0.0) log.add("vanillas.strikes", "must all be positive");
    for (double t : v.maturities)
        if (t <= 0.0) log.add("vanillas.maturities", "must all be positive");
    return v;
}

std::optional<McBlock> parse_mc(const YAML::Node& node, ErrorLog& log) {
    if (!node) return std::nullopt;
    McBlock mc;
    mc.paths = get_opt<long>(node, "paths", "mc", log, 100000L);
    mc.steps_per_year = get_opt<int>(node, "steps_per_year", "mc", log, 252);
    mc.seed = get_opt<std::uint64_t>(node, "seed", "mc", log, 1);
    if (mc.paths < 1) log.add("mc.paths", "must be positive");
    if (mc.steps_per_year < 1) log.add("mc.steps_per_year", "must be positive");
    return mc;
}

} // namespace

RunConfig parse_config(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw std::runtime_error(std::string("configuration is not valid YAML: ") +
                                 e.what());
    }
    ErrorLog log;
    RunConfig cfg;
    cfg.description = get_opt<std::string>(root, "description", "", log, "");
    cfg.model = parse_model(root["model"], log);
    cfg.grid = parse_grid(root["grid"], cfg.model, log);
    cfg.corridor = parse_corridor(root["corridor"], log);
    cfg.matching = parse_matching(root["matching"], log);
    cfg.payoffs = parse_payoffs(root["payoffs"], log);
    cfg.vanillas = parse_vanillas(root["vanillas"], log);
    cfg.mc = parse_mc(root["mc"], log);
    if (!log.empty()) throw std::runtime_error(log.joined());
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open configuration file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

double resolved_drift(const ModelConfig& model) {
    if (!model.drift_auto) return model.drift;
    if (model.clock) return risk_neutral_drift(*model.clock, model.rate);
    return model.rate;
}

std::string echo_config(const RunConfig& cfg) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    if (!cfg.description.empty()) out << YAML::Key << "description"
                                      << YAML::Value << cfg.description;
    out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "sigma0" << YAML::Value << cfg.model.sigma0;
    out << YAML::Key << "beta" << YAML::Value << cfg.model.beta;
    out << YAML::Key << "rate" << YAML::Value << cfg.model.rate;
    out << YAML::Key << "spot" << YAML::Value << cfg.model.spot;
    out << YAML::Key << "drift" << YAML::Value << resolved_drift(cfg.model);
    if (cfg.model.clock) {
        out << YAML::Key << "clock" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "mu" << YAML::Value << cfg.model.clock->mu;
        out << YAML::Key << "nu" << YAML::Value << cfg.model.clock->nu;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;

    out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "lower" << YAML::Value << cfg.grid.l;
    out << YAML::Key << "anchor" << YAML::Value << cfg.grid.s;
    out << YAML::Key << "upper" << YAML::Value << cfg.grid.u;
    out << YAML::Key << "count" << YAML::Value << cfg.grid.N;
    out << YAML::Key << "stretch_lower" << YAML::Value << cfg.grid.g_l;
    out << YAML::Key << "stretch_upper" << YAML::Value << cfg.grid.g_u;
    out << YAML::EndMap;

    if (cfg.corridor) {
        out << YAML::Key << "corridor" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "lower" << YAML::Value << cfg.corridor->lower;
        out << YAML::Key << "upper" << YAML::Value << cfg.corridor->upper;
        out << YAML::EndMap;
    }

    out << YAML::Key << "matching" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "C" << YAML::Value << cfg.matching.C;
    out << YAML::Key << "circle_multiple" << YAML::Value
        << cfg.matching.circle_multiple;
    out << YAML::Key << "tail_guard" << YAML::Value << cfg.matching.tail_guard;
    if (cfg.matching.region.automatic) {
        out << YAML::Key << "region" << YAML::Value << "auto";
        out << YAML::Key << "region_mass_tol" << YAML::Value
            << cfg.matching.region.mass_tol;
    } else {
        out << YAML::Key << "region" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "lower" << YAML::Value << cfg.matching.region.lower;
        out << YAML::Key << "upper" << YAML::Value << cfg.matching.region.upper;
        out << YAML::EndMap;
    }
    out << YAML::Key << "schemes" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : cfg.matching.schemes) {
        out << YAML::BeginMap;
        out << YAML::Key << "k" << YAML::Value << s.k;
        if (s.k >= 2) out << YAML::Key << "n" << YAML::Value << s.n;
        if (s.k == 3) out << YAML::Key << "m" << YAML::Value << s.m;
        out << YAML::Key << "alpha" << YAML::Value;
        switch (s.policy) {
            case AlphaPolicy::fixed: out << s.alpha; break;
            case AlphaPolicy::automatic: out << "auto"; break;
            case AlphaPolicy::min_feasible: out << "min_feasible"; break;
        }
        if (s.strict) out << YAML::Key << "strict" << YAML::Value << true;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;

    out << YAML::Key << "payoffs" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "maturities" << YAML::Value << YAML::Flow
        << cfg.payoffs.maturities;
    out << YAML::Key << "kinds" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (PayoffKind kind : cfg.payoffs.kinds) {
        switch (kind) {
            case PayoffKind::variance_swap: out << "variance_swap"; break;
            case PayoffKind::volatility_swap: out << "volatility_swap"; break;
            case PayoffKind::variance_call: out << "variance_call"; break;
        }
    }
    out << YAML::EndSeq;
    out << YAML::Key << "call_moneyness" << YAML::Value << YAML::Flow
        << cfg.payoffs.call_moneyness;
    out << YAML::Key << "discount_rate" << YAML::Value
        << cfg.payoffs.discount_rate;
    out << YAML::EndMap;

    if (cfg.vanillas) {
        out << YAML::Key << "vanillas" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "strikes" << YAML::Value << YAML::Flow
            << cfg.vanillas->strikes;
        out << YAML::Key << "maturities" << YAML::Value << YAML::Flow
            << cfg.vanillas->maturities;
        out << YAML::Key << "grow_strikes" << YAML::Value
            << cfg.vanillas->grow_strikes;
        out << YAML::EndMap;
    }
    if (cfg.mc) {
        out << YAML::Key << "mc" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "paths" << YAML::Value << cfg.mc->paths;
        out << YAML::Key << "steps_per_year" << YAML::Value
            << cfg.mc->steps_per_year;
        out << YAML::Key << "seed" << YAML::Value << cfg.mc->seed;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

} // namespace cvol
