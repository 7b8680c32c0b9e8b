// Dispatch a ScenarioConfig to the library and collect results.

#pragma once

#include "scramble/bipartite.hpp"
#include "scramble/cli/config.hpp"
#include "scramble/cli/validation.hpp"
#include "scramble/open_models.hpp"
#include "scramble/otoc.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace scramble::cli {

inline constexpr Index kDimensionBudget = 4096;

struct DimensionRefusal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// F on a (time × site) grid; values[s][k] belongs to sites[s], times[k].
struct Grid {
    std::string name;
    std::vector<double> times;
    std::vector<std::size_t> sites;
    std::vector<std::vector<double>> values;
};

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct RunResult {
    std::vector<otoc::SeriesResult> series;
    std::vector<Grid> grids;
    std::vector<Table> tables;
    json metadata;
    double wall_time = 0.0;
    bool validation_failed = false;
};

// %.12g, with literal nan / inf / -inf
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

inline std::string variant_tag(const json& overrides) {
    std::string tag;
    for (const auto& [key, value] : overrides.items()) {
        if (!tag.empty()) tag += '|';
        tag += key + '=' + (value.is_number() ? format_number(value.get<double>()) : value.dump());
    }
    return tag;
}

inline std::string label(const std::string& what, const std::string& site_part, const std::string& tag) {
    std::string inner = site_part;
    if (!tag.empty()) inner += (inner.empty() ? "" : "|") + tag;
    return inner.empty() ? what : what + "[" + inner + "]";
}

inline Index pow2(std::size_t n) {
    if (n >= 62) return std::numeric_limits<Index>::max();
    return Index{1} << n;
}

inline void require_budget(Index dim, const std::string& what, bool suggest_fast_path) {
    if (dim <= kDimensionBudget) return;
    std::string msg = what + " needs Hilbert dimension " + std::to_string(dim) + ", above the limit of " + std::to_string(kDimensionBudget);
    if (suggest_fast_path) msg += "; set \"fast_path\": true to use the collective-block representation of the bath";
    throw DimensionRefusal(msg);
}

inline void check_budget(const ScenarioConfig& cfg) {
    for (std::size_t k = 0; k < cfg.variants.size(); ++k) {
        const json m = cfg.variant_model(k);
        switch (model_family(cfg.scenario)) {
            case ModelFamily::lmg_bath: {
                const auto p = lmg_params(m);
                if (cfg.fast_path) {
                    // the largest block is system ⊗ (N + 1)
                    const Index sys = pow2(p.n_system);
                    const Index dim = sys > kDimensionBudget ? sys : sys * static_cast<Index>(p.n_bath + 1);
                    require_budget(dim, "fast-path run", false);
                } else {
                    require_budget(pow2(p.n_system + p.n_bath), "dense run", true);
                }
                break;
            }
            case ModelFamily::tfim: {
                const auto p = tfim_params(m);
                require_budget(pow2(p.n_system + p.n_bath), "TFIM run", false);
                break;
            }
            case ModelFamily::lmg_closed: require_budget(pow2(closed_params(m).n_spins), "closed LMG run", false); break;
            case ModelFamily::none: break;
        }
    }
}

// threshold nullopt: no onset column value (series that start at 0)
inline void add_summary_row(Table& t, const otoc::SeriesResult& s, std::optional<double> threshold) {
    double sum = 0.0, mn = std::numeric_limits<double>::infinity();
    std::size_t n = 0;
    for (double v : s.values)
        if (!std::isnan(v)) sum += v, mn = std::min(mn, v), ++n;
    const auto onset = threshold ? otoc::onset_time(s.times, s.values, *threshold) : std::nullopt;
    t.rows.push_back({s.label, s.site ? std::to_string(*s.site) : "", format_number(n ? sum / static_cast<double>(n) : std::nan("")),
                      format_number(n ? mn : std::nan("")), threshold ? (onset ? format_number(*onset) : "none") : "",
                      format_number(s.max_imag)});
}

inline Table summary_table() {
    return {"summary", {"label", "site", "mean", "min", "onset_0.98", "max_imag"}, {}};
}

inline void add_sweep(RunResult& out, Table& summary, const otoc::SweepResult& sw, const std::string& what, const std::string& tag) {
    Grid g{label(what, "", tag), sw.times, sw.sites, {}};
    for (auto s : sw.series) {
        s.label = label(what, "site=" + std::to_string(s.site.value_or(0)), tag);
        add_summary_row(summary, s, sw.threshold);
        g.values.push_back(s.values);
        out.series.push_back(std::move(s));
    }
    out.grids.push_back(std::move(g));
}

inline otoc::SweepRequest sweep_request(const ScenarioConfig& cfg, std::size_t n_system) {
    otoc::SweepRequest sw;
    sw.n_system = n_system;
    sw.base_site = cfg.operators.site_b;
    sw.target_sites = probe_sites(cfg, n_system);
    sw.axis_a = cfg.operators.axis_a;
    sw.axis_b = cfg.operators.axis_b;
    sw.initial_state = initial_state(cfg.initial, n_system);
    sw.times = cfg.times();
    return sw;
}

inline dynamics::OpenDynamics lmg_dynamics(const ScenarioConfig& cfg, const models::IsingLMGParams& p) {
    return cfg.fast_path ? models::ising_lmg_collective(p, cfg.bath) : models::ising_lmg_dense(p, cfg.bath);
}

inline void run_lmg_sweep(const ScenarioConfig& cfg, RunResult& out, bool corrected) {
    Table summary = summary_table();
    for (std::size_t k = 0; k < cfg.variants.size(); ++k) {
        const auto p = lmg_params(cfg.variant_model(k));
        auto sw = sweep_request(cfg, p.n_system);
        sw.corrected = corrected;
        add_sweep(out, summary, otoc::fotoc_site_sweep(lmg_dynamics(cfg, p), sw), corrected ? "F_c" : "F", variant_tag(cfg.variants[k]));
    }
    out.tables.push_back(std::move(summary));
}

inline void run_compare(const ScenarioConfig& cfg, RunResult& out) {
    Table summary = summary_table();
    for (std::size_t k = 0; k < cfg.variants.size(); ++k) {
        const auto p = lmg_params(cfg.variant_model(k));
        if (p.n_system != 2) throw ConfigError("compare-two-spin needs n_system = 2 (two one-qubit partitions)");
        const auto dyn = lmg_dynamics(cfg, p);
        const std::string tag = variant_tag(cfg.variants[k]);
        const auto sw = otoc::fotoc_site_sweep(dyn, sweep_request(cfg, p.n_system));
        for (auto s : sw.series) {
            s.label = label("F", "site=" + std::to_string(s.site.value_or(0)), tag);
            add_summary_row(summary, s, sw.threshold);
            out.series.push_back(std::move(s));
        }
        const auto times = cfg.times();
        std::vector<double> g(times.size());
        double worst = 0.0;
        std::vector<double> imag(times.size());
        parallel_for(times.size(), [&](std::size_t i) {
            const auto v = bipartite::bipartite_otoc_open_detail(dyn.superoperator(dynamics::Direction::adjoint, dynamics::Sense::forward, times[i]),
                                                                 bipartite::Bipartition(2, 2));
            g[i] = v.value;
            imag[i] = std::abs(v.imag);
        });
        for (double v : imag) worst = std::max(worst, v);
        otoc::SeriesResult gs{label("G", "", tag), times, g, worst, std::nullopt};
        add_summary_row(summary, gs, std::nullopt);
        out.series.push_back(std::move(gs));
    }
    out.tables.push_back(std::move(summary));
}

inline void run_tfim(const ScenarioConfig& cfg, RunResult& out) {
    Table summary = summary_table();
    Table onsets{"onsets", {"variant", "site", "distance", "onset"}, {}};
    for (std::size_t k = 0; k < cfg.variants.size(); ++k) {
        const auto p = tfim_params(cfg.variant_model(k));
        const std::string tag = variant_tag(cfg.variants[k]);
        const auto sw = otoc::fotoc_site_sweep(models::tfim_dense(p, cfg.bath), sweep_request(cfg, p.n_system));
        for (std::size_t s = 0; s < sw.sites.size(); ++s) {
            const std::size_t site = sw.sites[s], base = cfg.operators.site_b;
            onsets.rows.push_back({tag, std::to_string(site), std::to_string(site > base ? site - base : base - site),
                                   sw.onset[s] ? format_number(*sw.onset[s]) : "none"});
        }
        add_sweep(out, summary, sw, "F", tag);
    }
    out.tables.push_back(std::move(summary));
    out.tables.push_back(std::move(onsets));
}

inline void run_lmg_closed(const ScenarioConfig& cfg, RunResult& out) {
    Table summary = summary_table();
    for (std::size_t k = 0; k < cfg.variants.size(); ++k) {
        const auto p = closed_params(cfg.variant_model(k));
        add_sweep(out, summary, otoc::fotoc_site_sweep(models::build_lmg_closed(p), sweep_request(cfg, p.n_spins)), "F",
                  variant_tag(cfg.variants[k]));
    }
    out.tables.push_back(std::move(summary));
}

inline void run_validate(const ScenarioConfig& cfg, RunResult& out) {
    Table t{"validation", {"check", "error", "tolerance", "status"}, {}};
    for (const auto& c : run_validation(cfg.seed, cfg.samples)) {
        t.rows.push_back({c.name, format_number(c.error), format_number(c.tolerance), c.passed ? "pass" : "FAIL"});
        if (!c.passed) out.validation_failed = true;
    }
    out.tables.push_back(std::move(t));
}

inline void run_haar(const ScenarioConfig& cfg, RunResult& out) {
    Table t{"haar_identity", {"dim", "samples", "error", "bound", "status"}, {}};
    const double bound = 5.0 / std::sqrt(static_cast<double>(cfg.samples));
    for (std::size_t k = 0; k < cfg.dims.size(); ++k) {
        auto rng = qops::substream(cfg.seed, k);
        const double err = bipartite::haar_identity_check(cfg.dims[k], cfg.samples, rng);
        t.rows.push_back({std::to_string(cfg.dims[k]), std::to_string(cfg.samples), format_number(err), format_number(bound),
                          err <= bound ? "pass" : "FAIL"});
        if (err > bound) out.validation_failed = true;
    }
    out.tables.push_back(std::move(t));
}

}  // namespace detail

inline RunResult run_scenario(const ScenarioConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    if (cfg.fast_path && model_family(cfg.scenario) != ModelFamily::lmg_bath)
        throw ConfigError("fast_path only applies to the LMG-bath scenarios");
    detail::check_budget(cfg);

    RunResult out;
    try {
        switch (cfg.scenario) {
            case Scenario::fotoc_lmg_bath: detail::run_lmg_sweep(cfg, out, false); break;
            case Scenario::fotoc_corrected_lmg_bath: detail::run_lmg_sweep(cfg, out, true); break;
            case Scenario::compare_two_spin: detail::run_compare(cfg, out); break;
            case Scenario::tfim_lightcone: detail::run_tfim(cfg, out); break;
            case Scenario::lmg_closed: detail::run_lmg_closed(cfg, out); break;
            case Scenario::validate: detail::run_validate(cfg, out); break;
            case Scenario::haar_check: detail::run_haar(cfg, out); break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error(scenario_name(cfg.scenario) + ": " + e.what());
    }

    out.metadata["config"] = cfg.echo();
    json series = json::array();
    for (const auto& s : out.series) series.push_back({{"label", s.label}, {"points", s.values.size()}, {"max_imag", s.max_imag}});
    out.metadata["series"] = series;
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace scramble::cli
