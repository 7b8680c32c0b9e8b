// Scenario configuration: JSON (comments allowed) with strict keys.
//
//   {
//     "scenario": "fotoc-lmg-bath",
//     "model": { "n_system": 4, "n_bath": 5, "lambda": 0.5 },
//     "operators": { "axis_a": "z", "axis_b": "z", "site_b": 0, "sites_a": "all" },
//     "time": { "t_max": 5, "steps": 200 },
//     "vary": [ { "lambda": 0.5 }, { "lambda": 1.0 } ]
//   }
//
// Model keys may also sit at the top level. Every key not listed for the
// scenario is rejected. See configs/README.md for the full schema.

#pragma once

#include "scramble/models.hpp"
#include "scramble/open_models.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace scramble::cli {

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Scenario { fotoc_lmg_bath, fotoc_corrected_lmg_bath, compare_two_spin, tfim_lightcone, lmg_closed, validate, haar_check };

inline const std::vector<std::pair<Scenario, std::string>>& scenario_names() {
    static const std::vector<std::pair<Scenario, std::string>> names{
        {Scenario::fotoc_lmg_bath, "fotoc-lmg-bath"}, {Scenario::fotoc_corrected_lmg_bath, "fotoc-corrected-lmg-bath"},
        {Scenario::compare_two_spin, "compare-two-spin"}, {Scenario::tfim_lightcone, "tfim-lightcone"},
        {Scenario::lmg_closed, "lmg-closed"}, {Scenario::validate, "validate"}, {Scenario::haar_check, "haar-check"}};
    return names;
}

inline Scenario parse_scenario(const std::string& s) {
    for (const auto& [sc, name] : scenario_names())
        if (name == s) return sc;
    throw ConfigError("unknown scenario '" + s + "'");
}

inline std::string scenario_name(Scenario s) {
    for (const auto& [sc, name] : scenario_names())
        if (sc == s) return name;
    return "?";
}

enum class ModelFamily { lmg_bath, tfim, lmg_closed, none };

inline ModelFamily model_family(Scenario s) {
    switch (s) {
        case Scenario::fotoc_lmg_bath:
        case Scenario::fotoc_corrected_lmg_bath:
        case Scenario::compare_two_spin: return ModelFamily::lmg_bath;
        case Scenario::tfim_lightcone: return ModelFamily::tfim;
        case Scenario::lmg_closed: return ModelFamily::lmg_closed;
        default: return ModelFamily::none;
    }
}

enum class InitialState { product_tilted, maximally_mixed };

inline InitialState parse_initial_state(const std::string& s) {
    if (s == "product-tilted") return InitialState::product_tilted;
    if (s == "maximally-mixed") return InitialState::maximally_mixed;
    throw ConfigError("initial_state must be 'product-tilted' or 'maximally-mixed', got '" + s + "'");
}

inline Matrix initial_state(InitialState s, std::size_t n_system) {
    return s == InitialState::product_tilted ? models::tilted_product_state(n_system)
                                             : qops::maximally_mixed(Index{1} << n_system);
}

struct OperatorSpec {
    qops::Axis axis_a = qops::Axis::z;
    qops::Axis axis_b = qops::Axis::z;
    std::size_t site_b = 0;
    std::optional<std::vector<std::size_t>> sites_a;  // nullopt: every system site
};

struct TimeSpec {
    double t_max = 5.0;
    std::size_t steps = 200;
};

struct OutputSpec {
    std::string dir = "out";
    std::string prefix;
};

struct ScenarioConfig {
    Scenario scenario = Scenario::validate;
    json model = json::object();       // resolved model parameters
    std::vector<json> variants;        // model overrides, one run each; never empty
    OperatorSpec operators;
    TimeSpec time;
    InitialState initial = InitialState::product_tilted;
    models::BathState bath = models::BathState::thermal;
    bool fast_path = false;
    std::uint64_t seed = 1;
    std::size_t samples = 2000;
    std::vector<Index> dims{2, 4};
    OutputSpec output;

    // Model parameters for variant k.
    json variant_model(std::size_t k) const {
        json m = model;
        for (const auto& [key, value] : variants.at(k).items()) m[key] = value;
        return m;
    }

    std::vector<double> times() const {
        std::vector<double> t(time.steps);
        for (std::size_t k = 0; k < time.steps; ++k) t[k] = time.t_max * static_cast<double>(k) / static_cast<double>(time.steps - 1);
        return t;
    }

    json echo() const;
};

// --------------------------- Model parameter tables -------------------------

inline json default_model(Scenario s) {
    switch (model_family(s)) {
        case ModelFamily::lmg_bath: {
            json m{{"n_system", 4}, {"n_bath", 5}, {"omega", 2.0}, {"j_coupling", 0.5}, {"lambda", 0.5},
                   {"lambda_tilde", nullptr}, {"omega_c", 4.0}, {"temperature", 10.0}};
            if (s == Scenario::compare_two_spin) {
                m["n_system"] = 2;
                m["n_bath"] = 10;
                m["lambda"] = 1.0;
            }
            return m;
        }
        case ModelFamily::tfim:
            return json{{"n_system", 4}, {"n_bath", 6}, {"b_field", 0.5}, {"j_coupling", 0.5}, {"theta", 1.5707963267948966},
                        {"g", 0.5}, {"gamma", 0.5}, {"lambda_z", 1.0}, {"temperature", 10.0}};
        case ModelFamily::lmg_closed:
            return json{{"n_spins", 6}, {"lambda", 1.0}, {"gamma", 1.0}, {"omega_c", 0.5}};
        case ModelFamily::none: break;
    }
    return json::object();
}

namespace detail {

template <class T>
T get_as(const json& j, const std::string& key, const std::string& where) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + key + ": wrong type (got " + std::string(j.type_name()) + ")");
    }
}

inline std::size_t get_count(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(where + key + ": expected a non-negative integer");
    return j.get<std::size_t>();
}

inline double get_real(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + key + ": expected a number (got " + std::string(j.type_name()) + ")");
    return j.get<double>();
}

inline void check_model_keys(const json& overrides, const json& defaults, const std::string& where) {
    if (!overrides.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : overrides.items()) {
        if (!defaults.contains(key)) throw ConfigError(where + ": unknown model key '" + key + "'");
        if (key.rfind("n_", 0) == 0) get_count(value, key, where + ".");
        else if (!(key == "lambda_tilde" && value.is_null())) get_real(value, key, where + ".");
    }
}

}  // namespace detail

inline models::IsingLMGParams lmg_params(const json& m) {
    models::IsingLMGParams p;
    p.n_system = m.at("n_system").get<std::size_t>();
    p.n_bath = m.at("n_bath").get<std::size_t>();
    p.omega = m.at("omega").get<double>();
    p.j_coupling = m.at("j_coupling").get<double>();
    p.lambda = m.at("lambda").get<double>();
    if (!m.at("lambda_tilde").is_null()) p.lambda_tilde = m.at("lambda_tilde").get<double>();
    p.omega_c = m.at("omega_c").get<double>();
    p.temperature = m.at("temperature").get<double>();
    return p;
}

inline models::TFIMParams tfim_params(const json& m) {
    models::TFIMParams p;
    p.n_system = m.at("n_system").get<std::size_t>();
    p.n_bath = m.at("n_bath").get<std::size_t>();
    p.b_field = m.at("b_field").get<double>();
    p.j_coupling = m.at("j_coupling").get<double>();
    p.theta = m.at("theta").get<double>();
    p.g = m.at("g").get<double>();
    p.gamma = m.at("gamma").get<double>();
    p.lambda_z = m.at("lambda_z").get<double>();
    p.temperature = m.at("temperature").get<double>();
    return p;
}

inline models::LMGClosedParams closed_params(const json& m) {
    models::LMGClosedParams p;
    p.n_spins = m.at("n_spins").get<std::size_t>();
    p.lambda = m.at("lambda").get<double>();
    p.gamma = m.at("gamma").get<double>();
    p.omega_c = m.at("omega_c").get<double>();
    return p;
}

inline std::size_t system_sites(const ScenarioConfig& cfg, const json& m) {
    switch (model_family(cfg.scenario)) {
        case ModelFamily::lmg_bath:
        case ModelFamily::tfim: return m.at("n_system").get<std::size_t>();
        case ModelFamily::lmg_closed: return m.at("n_spins").get<std::size_t>();
        case ModelFamily::none: break;
    }
    return 0;
}

inline std::vector<std::size_t> probe_sites(const ScenarioConfig& cfg, std::size_t n_system) {
    if (cfg.operators.sites_a) return *cfg.operators.sites_a;
    std::vector<std::size_t> all(n_system);
    for (std::size_t k = 0; k < n_system; ++k) all[k] = k;
    return all;
}

// --------------------------- Parsing ----------------------------------------

inline json ScenarioConfig::echo() const {
    json out;
    out["scenario"] = scenario_name(scenario);
    if (model_family(scenario) != ModelFamily::none) {
        out["model"] = model;
        out["vary"] = variants;
        json ops{{"axis_a", qops::axis_name(operators.axis_a)}, {"axis_b", qops::axis_name(operators.axis_b)}, {"site_b", operators.site_b}};
        ops["sites_a"] = operators.sites_a ? json(*operators.sites_a) : json("all");
        out["operators"] = ops;
        out["time"] = {{"t_max", time.t_max}, {"steps", time.steps}};
        out["initial_state"] = initial == InitialState::product_tilted ? "product-tilted" : "maximally-mixed";
    }
    if (model_family(scenario) == ModelFamily::lmg_bath || model_family(scenario) == ModelFamily::tfim)
        out["bath_state"] = bath == models::BathState::thermal ? "thermal" : "maximally-mixed";
    if (model_family(scenario) == ModelFamily::lmg_bath) out["fast_path"] = fast_path;
    out["seed"] = seed;
    if (scenario == Scenario::haar_check || scenario == Scenario::validate) out["samples"] = samples;
    if (scenario == Scenario::haar_check) out["dims"] = dims;
    out["output"] = {{"dir", output.dir}, {"prefix", output.prefix}};
    return out;
}

// `scenario_override` replaces the scenario key before anything else is read.
inline ScenarioConfig parse_config(const std::string& text, const std::optional<std::string>& scenario_override = std::nullopt) {
    json root;
    try {
        root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a single object");
    if (scenario_override) root["scenario"] = *scenario_override;
    if (!root.contains("scenario")) throw ConfigError("missing required key 'scenario'");

    ScenarioConfig cfg;
    cfg.scenario = parse_scenario(detail::get_as<std::string>(root["scenario"], "scenario", ""));
    const ModelFamily family = model_family(cfg.scenario);
    const json defaults = default_model(cfg.scenario);
    cfg.model = defaults;

    std::set<std::string> allowed{"scenario", "seed", "output"};
    if (family != ModelFamily::none) allowed.insert({"model", "operators", "time", "initial_state", "vary"});
    if (family == ModelFamily::lmg_bath || family == ModelFamily::tfim) allowed.insert("bath_state");
    if (family == ModelFamily::lmg_bath) allowed.insert("fast_path");
    if (cfg.scenario == Scenario::haar_check || cfg.scenario == Scenario::validate) allowed.insert("samples");
    if (cfg.scenario == Scenario::haar_check) allowed.insert("dims");

    json top_model = json::object();
    for (const auto& [key, value] : root.items()) {
        if (allowed.count(key)) continue;
        if (defaults.contains(key)) top_model[key] = value;
        else throw ConfigError("unknown key '" + key + "' for scenario " + scenario_name(cfg.scenario));
    }

    if (root.contains("model")) {
        detail::check_model_keys(root["model"], defaults, "model");
        for (const auto& [key, value] : root["model"].items()) cfg.model[key] = value;
    }
    detail::check_model_keys(top_model, defaults, "config");
    for (const auto& [key, value] : top_model.items()) {
        if (root.contains("model") && root["model"].contains(key)) throw ConfigError("model key '" + key + "' given twice");
        cfg.model[key] = value;
    }

    if (root.contains("vary")) {
        if (!root["vary"].is_array()) throw ConfigError("vary: expected a list of model overrides");
        for (std::size_t k = 0; k < root["vary"].size(); ++k) {
            detail::check_model_keys(root["vary"][k], defaults, "vary[" + std::to_string(k) + "]");
            cfg.variants.push_back(root["vary"][k]);
        }
    }
    if (cfg.variants.empty()) cfg.variants.push_back(json::object());

    if (cfg.scenario == Scenario::compare_two_spin) cfg.initial = InitialState::maximally_mixed;
    if (cfg.scenario == Scenario::compare_two_spin) cfg.operators.sites_a = std::vector<std::size_t>{1};

    if (root.contains("operators")) {
        const json& ops = root["operators"];
        if (!ops.is_object()) throw ConfigError("operators: expected an object");
        for (const auto& [key, value] : ops.items()) {
            if (key == "axis_a" || key == "axis_b") {
                try {
                    (key == "axis_a" ? cfg.operators.axis_a : cfg.operators.axis_b) =
                        qops::parse_axis(detail::get_as<std::string>(value, key, "operators."));
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(std::string("operators.") + key + ": " + e.what());
                }
            } else if (key == "site_b") {
                cfg.operators.site_b = detail::get_count(value, key, "operators.");
            } else if (key == "sites_a") {
                if (value.is_string() && value.get<std::string>() == "all") cfg.operators.sites_a.reset();
                else if (value.is_array()) {
                    std::vector<std::size_t> sites;
                    for (const auto& v : value) sites.push_back(detail::get_count(v, key, "operators."));
                    if (sites.empty()) throw ConfigError("operators.sites_a: empty list");
                    cfg.operators.sites_a = sites;
                } else throw ConfigError("operators.sites_a: expected a list of sites or \"all\"");
            } else throw ConfigError("operators: unknown key '" + key + "'");
        }
    }

    if (root.contains("time")) {
        const json& t = root["time"];
        if (!t.is_object()) throw ConfigError("time: expected an object");
        for (const auto& [key, value] : t.items()) {
            if (key == "t_max") cfg.time.t_max = detail::get_real(value, key, "time.");
            else if (key == "steps") cfg.time.steps = detail::get_count(value, key, "time.");
            else throw ConfigError("time: unknown key '" + key + "'");
        }
    }
    if (cfg.time.steps < 2) throw ConfigError("time.steps must be >= 2 (steps ≥ 2)");
    if (!(cfg.time.t_max > 0.0)) throw ConfigError("time.t_max must be > 0");

    if (root.contains("initial_state")) cfg.initial = parse_initial_state(detail::get_as<std::string>(root["initial_state"], "initial_state", ""));
    if (root.contains("bath_state")) {
        try {
            cfg.bath = models::parse_bath_state(detail::get_as<std::string>(root["bath_state"], "bath_state", ""));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (root.contains("fast_path")) cfg.fast_path = detail::get_as<bool>(root["fast_path"], "fast_path", "");
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
        cfg.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("samples")) cfg.samples = detail::get_count(root["samples"], "samples", "");
    if ((cfg.scenario == Scenario::haar_check || cfg.scenario == Scenario::validate) && cfg.samples < 100)
        throw ConfigError("samples must be >= 100");
    if (root.contains("dims")) {
        if (!root["dims"].is_array() || root["dims"].empty()) throw ConfigError("dims: expected a nonempty list");
        cfg.dims.clear();
        for (const auto& d : root["dims"]) {
            const auto v = detail::get_count(d, "dims", "");
            if (v < 1) throw ConfigError("dims: entries must be >= 1");
            cfg.dims.push_back(static_cast<Index>(v));
        }
    }
    if (root.contains("output")) {
        const json& o = root["output"];
        if (!o.is_object()) throw ConfigError("output: expected an object");
        for (const auto& [key, value] : o.items()) {
            if (key == "dir") cfg.output.dir = detail::get_as<std::string>(value, key, "output.");
            else if (key == "prefix") cfg.output.prefix = detail::get_as<std::string>(value, key, "output.");
            else throw ConfigError("output: unknown key '" + key + "'");
        }
    }

    // Every variant must describe a valid model with valid operator sites.
    for (std::size_t k = 0; k < cfg.variants.size(); ++k) {
        const json m = cfg.variant_model(k);
        const std::string where = cfg.variants.size() > 1 ? "vary[" + std::to_string(k) + "]: " : "";
        try {
            switch (family) {
                case ModelFamily::lmg_bath: lmg_params(m).validate(); break;
                case ModelFamily::tfim: tfim_params(m).validate(); break;
                case ModelFamily::lmg_closed: closed_params(m).validate(); break;
                case ModelFamily::none: break;
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + e.what());
        }
        if (family == ModelFamily::none) continue;
        const std::size_t n = system_sites(cfg, m);
        if (cfg.operators.site_b >= n) throw ConfigError(where + "operators.site_b out of range");
        for (auto s : probe_sites(cfg, n))
            if (s >= n) throw ConfigError(where + "operators.sites_a entry " + std::to_string(s) + " out of range");
    }
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path, const std::optional<std::string>& scenario_override = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), scenario_override);
}

}  // namespace scramble::cli
