// Simulated annealing over degree distributions.
//
// A state is a distribution on degrees 1..d_max_cap; its energy is the
// predicted number of inactivations plus a penalty that kicks in once the
// failure-probability lower bound reaches the design target. Candidate
// states transfer a random slice of mass between two degrees and are pushed
// back under the mean-degree cap when the transfer overshoots it. Standard
// Metropolis acceptance with geometric cooling; the best state ever
// accepted is returned, not the final one.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include <ltkit/degree_dist.hpp>
#include <ltkit/failure_bound.hpp>
#include <ltkit/ripple_model.hpp>
#include <ltkit/rng.hpp>

namespace ltkit {

struct DesignConstraints {
    std::uint32_t k = 0;
    double pf_target = 1e-2;        // bound at or above this is penalized
    double pf_eval_epsilon = 0.0;   // overhead at which energy is evaluated
    double mean_degree_cap = 0.0;   // feasible states keep mean degree below
    std::uint32_t d_max_cap = 0;    // largest degree a state may use
    double penalty_b = 1000.0;
};

inline void validate_constraints(const DesignConstraints& c) {
    if (c.k == 0) throw std::invalid_argument("constraints: k must be positive");
    if (!(c.pf_target > 0.0))
        throw std::invalid_argument("constraints: pf_target must be positive");
    if (!(c.mean_degree_cap >= 1.0))
        throw std::invalid_argument(
            "constraints: mean_degree_cap below 1 leaves no distribution");
    if (c.d_max_cap == 0 || c.d_max_cap > c.k)
        throw std::invalid_argument("constraints: d_max_cap must be in [1, k]");
    if (!(c.penalty_b > 0.0))
        throw std::invalid_argument("constraints: penalty_b must be positive");
    if (!(c.pf_eval_epsilon >= -1.0) || !std::isfinite(c.pf_eval_epsilon))
        throw std::invalid_argument("constraints: bad pf_eval_epsilon");
}

struct EnergyBreakdown {
    double total = 0.0;
    double n_inact = 0.0;
    double pf_bound = 0.0;
    double penalty = 0.0;
    double mean_degree = 0.0;
};

// Energy of one state. Infeasible states (mean degree over the cap, or
// support past d_max_cap) cost +infinity and skip the expensive parts, so
// the annealer simply never accepts them.
inline EnergyBreakdown energy_detail(const DegreeDistribution& dist,
                                     const DesignConstraints& cons) {
    validate_constraints(cons);
    EnergyBreakdown out;
    out.mean_degree = dist.mean_degree();
    if (out.mean_degree > cons.mean_degree_cap + 1e-9 ||
        dist.d_max() > cons.d_max_cap || dist.k() != cons.k) {
        out.total = std::numeric_limits<double>::infinity();
        out.pf_bound = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.n_inact = predict_total(cons.k, cons.pf_eval_epsilon, dist);
    out.pf_bound = pf_lower_bound(dist, cons.k, cons.pf_eval_epsilon).value;
    out.penalty = out.pf_bound < cons.pf_target
                      ? 0.0
                      : cons.penalty_b * (out.pf_bound / cons.pf_target - 1.0);
    out.total = out.n_inact + out.penalty;
    return out;
}

inline double energy(const DegreeDistribution& dist,
                     const DesignConstraints& cons) {
    return energy_detail(dist, cons).total;
}

// Deterministic core of the neighbour move: shift `delta` mass from degree
// d_a to degree d_b, then walk overflow mass down to degree 1 (largest
// degrees first) until the mean-degree cap holds again, and renormalize to
// wash out float drift.
inline DegreeDistribution neighbor_move(const DegreeDistribution& dist,
                                        std::uint32_t d_a, std::uint32_t d_b,
                                        double delta,
                                        const DesignConstraints& cons) {
    validate_constraints(cons);
    if (d_a == 0 || d_b == 0 || d_a > cons.d_max_cap || d_b > cons.d_max_cap)
        throw std::invalid_argument("neighbor_move: degrees must lie in [1, d_max_cap]");
    if (d_a == d_b) throw std::invalid_argument("neighbor_move: degrees must differ");
    if (!(delta >= 0.0) || delta > dist.omega(d_a))
        throw std::invalid_argument("neighbor_move: delta must be in [0, omega(d_a)]");

    std::vector<double> w(std::max<std::size_t>(dist.d_max(), std::max(d_a, d_b)), 0.0);
    std::copy(dist.probs().begin(), dist.probs().end(), w.begin());
    w[d_a - 1] -= delta;
    w[d_b - 1] += delta;

    auto mean_of = [](const std::vector<double>& v) {
        NeumaierSum s;
        for (std::size_t d = 0; d < v.size(); ++d) s.add(v[d] * (d + 1));
        return s.value();
    };
    double mean = mean_of(w);
    while (mean > cons.mean_degree_cap + 1e-12) {
        std::size_t top = w.size();
        while (top > 1 && w[top - 1] <= 0.0) --top;
        if (top <= 1) break;  // everything already sits at degree 1
        const double excess = mean - cons.mean_degree_cap;
        const double shift = std::min(w[top - 1], excess / (top - 1));
        w[top - 1] -= shift;
        w[0] += shift;
        mean = mean_of(w);
    }

    // Transfers conserve mass up to an ulp or two; snap back to the simplex
    // only once drift is measurable so a zero-delta move stays bit-identical.
    NeumaierSum total;
    for (double v : w) total.add(v);
    const double s = total.value();
    if (s > 0.0 && std::abs(s - 1.0) > 1e-13)
        for (double& v : w) v /= s;
    return DegreeDistribution(dist.k(), w);
}

// Random neighbour: degrees d_a != d_b uniform on 1..d_max_cap, mass slice
// delta = scale * U(0,1) * omega(d_a). Draw order (d_a, d_b, U) is part of
// the determinism contract.
inline DegreeDistribution neighbor(const DegreeDistribution& dist, double scale,
                                   const DesignConstraints& cons, Rng& rng) {
    validate_constraints(cons);
    if (cons.d_max_cap == 1) return dist;  // singleton state space
    const std::uint32_t d_a =
        1 + static_cast<std::uint32_t>(rng.uniform_below(cons.d_max_cap));
    std::uint32_t d_b =
        1 + static_cast<std::uint32_t>(rng.uniform_below(cons.d_max_cap - 1));
    if (d_b >= d_a) ++d_b;
    const double delta =
        std::min(scale * rng.uniform01() * dist.omega(d_a), dist.omega(d_a));
    return neighbor_move(dist, d_a, d_b, delta, cons);
}

struct AnnealConfig {
    double t_init = 10.0;
    double t_final = 1e-3;
    double cooling_factor = 0.95;
    std::uint32_t moves_per_temperature = 50;
    double perturbation_scale = 0.2;
    std::uint64_t seed = 1;
    std::uint64_t max_steps = 100000;
    std::optional<double> target_energy;  // stop once best energy reaches it
    DesignConstraints constraints;
    std::optional<DegreeDistribution> initial_dist;
};

struct HistoryEntry {
    std::uint64_t step = 0;
    double temperature = 0.0;
    double energy = 0.0;
    bool accepted = false;
    double mean_degree = 0.0;
    double pf_bound = 0.0;
};

struct AnnealRun {
    DegreeDistribution best_dist;
    double best_energy = 0.0;
    std::vector<HistoryEntry> history;  // entry 0 is the initial state
    std::uint64_t evaluations = 0;      // energy computations (cache misses)
};

namespace detail {

// Content hash of a distribution for the energy cache. A 64-bit collision
// would silently reuse a wrong energy, but FNV over ~10^3 bytes makes that
// a non-concern in an annealing run.
inline std::uint64_t dist_content_hash(const DegreeDistribution& dist) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix_bytes = [&h](const void* p, std::size_t n) {
        const unsigned char* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    const std::uint32_t k = dist.k();
    mix_bytes(&k, sizeof k);
    mix_bytes(dist.probs().data(), dist.probs().size() * sizeof(double));
    return h;
}

}  // namespace detail

inline AnnealRun anneal(const AnnealConfig& cfg) {
    validate_constraints(cfg.constraints);
    if (!(cfg.t_init > cfg.t_final) || !(cfg.t_final > 0.0))
        throw std::invalid_argument("anneal: need t_init > t_final > 0");
    if (cfg.cooling_factor <= 0.0 || cfg.cooling_factor >= 1.0)
        throw std::invalid_argument("anneal: cooling_factor must be in (0,1)");
    if (cfg.moves_per_temperature == 0)
        throw std::invalid_argument("anneal: moves_per_temperature must be positive");
    if (!(cfg.perturbation_scale >= 0.0))
        throw std::invalid_argument("anneal: perturbation_scale must be nonnegative");
    if (!cfg.initial_dist)
        throw std::invalid_argument("anneal: no initial distribution");

    std::unordered_map<std::uint64_t, EnergyBreakdown> cache;
    std::uint64_t evaluations = 0;
    auto scored = [&](const DegreeDistribution& d) {
        const std::uint64_t key = detail::dist_content_hash(d);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        ++evaluations;
        return cache.emplace(key, energy_detail(d, cfg.constraints)).first->second;
    };

    const EnergyBreakdown init = scored(*cfg.initial_dist);
    if (!std::isfinite(init.total))
        throw std::invalid_argument("anneal: initial distribution is infeasible");

    AnnealRun run{*cfg.initial_dist, init.total, {}, 0};
    run.history.push_back(
        {0, cfg.t_init, init.total, true, init.mean_degree, init.pf_bound});

    Rng rng(cfg.seed);
    DegreeDistribution current = *cfg.initial_dist;
    double current_energy = init.total;
    double temperature = cfg.t_init;
    std::uint32_t moves_at_level = 0;

    for (std::uint64_t step = 1;
         step <= cfg.max_steps && temperature > cfg.t_final &&
         !(cfg.target_energy && run.best_energy <= *cfg.target_energy);
         ++step) {
        DegreeDistribution candidate =
            neighbor(current, cfg.perturbation_scale, cfg.constraints, rng);
        const EnergyBreakdown cand = scored(candidate);

        bool accept;
        if (cand.total <= current_energy)
            accept = true;
        else
            accept = rng.uniform01() <
                     std::exp(-(cand.total - current_energy) / temperature);

        run.history.push_back({step, temperature, cand.total, accept,
                               cand.mean_degree, cand.pf_bound});
        if (accept) {
            current = std::move(candidate);
            current_energy = cand.total;
            if (current_energy < run.best_energy) {
                run.best_energy = current_energy;
                run.best_dist = current;
            }
        }
        if (++moves_at_level >= cfg.moves_per_temperature) {
            temperature *= cfg.cooling_factor;
            moves_at_level = 0;
        }
    }
    run.evaluations = evaluations;
    return run;
}

struct RsdSearchResult {
    double c = 0.0;
    double delta = 0.0;
    double energy = 0.0;
    DegreeDistribution dist;
};

// Best truncated robust soliton over a parameter grid; no randomness, ties
// on energy go to the smaller mean degree.
inline RsdSearchResult rsd_parameter_search(std::uint32_t k,
                                            const DesignConstraints& cons,
                                            const std::vector<double>& c_grid,
                                            const std::vector<double>& delta_grid) {
    validate_constraints(cons);
    if (k != cons.k)
        throw std::invalid_argument("rsd_parameter_search: k disagrees with constraints.k");
    if (c_grid.empty() || delta_grid.empty())
        throw std::invalid_argument("rsd_parameter_search: empty grid");
    std::optional<RsdSearchResult> best;
    double best_mean = 0.0;
    for (double c : c_grid) {
        for (double delta : delta_grid) {
            DegreeDistribution dist =
                truncate(make_rsd(k, c, delta), std::min(cons.d_max_cap, k));
            const double e = energy(dist, cons);
            const double mean = dist.mean_degree();
            const bool better =
                !best || e < best->energy ||
                (e == best->energy && mean < best_mean);
            if (better) {
                best = RsdSearchResult{c, delta, e, std::move(dist)};
                best_mean = mean;
            }
        }
    }
    return *best;
}

inline void write_history_csv(std::ostream& os,
                              const std::vector<HistoryEntry>& history) {
    os << "step,temperature,energy,accepted,mean_degree,pf_bound\n";
    char line[192];
    for (const auto& h : history) {
        std::snprintf(line, sizeof line, "%llu,%.12g,%.12g,%d,%.12g,%.12g\n",
                      static_cast<unsigned long long>(h.step), h.temperature,
                      h.energy, h.accepted ? 1 : 0, h.mean_degree, h.pf_bound);
        os << line;
    }
}

inline nlohmann::json anneal_config_to_json(const AnnealConfig& cfg) {
    nlohmann::json j;
    j["t_init"] = cfg.t_init;
    j["t_final"] = cfg.t_final;
    j["cooling_factor"] = cfg.cooling_factor;
    j["moves_per_temperature"] = cfg.moves_per_temperature;
    j["perturbation_scale"] = cfg.perturbation_scale;
    j["seed"] = cfg.seed;
    j["max_steps"] = cfg.max_steps;
    if (cfg.target_energy) j["target_energy"] = *cfg.target_energy;
    j["constraints"] = {{"k", cfg.constraints.k},
                        {"pf_target", cfg.constraints.pf_target},
                        {"pf_eval_epsilon", cfg.constraints.pf_eval_epsilon},
                        {"mean_degree_cap", cfg.constraints.mean_degree_cap},
                        {"d_max_cap", cfg.constraints.d_max_cap},
                        {"penalty_b", cfg.constraints.penalty_b}};
    if (cfg.initial_dist) {
        std::ostringstream dist_json;
        save_json(*cfg.initial_dist, dist_json);
        j["initial_dist"] = nlohmann::json::parse(dist_json.str());
    }
    return j;
}

inline AnnealConfig anneal_config_from_json(const nlohmann::json& j) {
    AnnealConfig cfg;
    cfg.t_init = j.at("t_init").get<double>();
    cfg.t_final = j.at("t_final").get<double>();
    cfg.cooling_factor = j.at("cooling_factor").get<double>();
    cfg.moves_per_temperature = j.at("moves_per_temperature").get<std::uint32_t>();
    cfg.perturbation_scale = j.at("perturbation_scale").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.max_steps = j.at("max_steps").get<std::uint64_t>();
    if (j.contains("target_energy") && !j["target_energy"].is_null())
        cfg.target_energy = j["target_energy"].get<double>();
    const auto& c = j.at("constraints");
    cfg.constraints.k = c.at("k").get<std::uint32_t>();
    cfg.constraints.pf_target = c.at("pf_target").get<double>();
    cfg.constraints.pf_eval_epsilon = c.at("pf_eval_epsilon").get<double>();
    cfg.constraints.mean_degree_cap = c.at("mean_degree_cap").get<double>();
    cfg.constraints.d_max_cap = c.at("d_max_cap").get<std::uint32_t>();
    cfg.constraints.penalty_b = c.at("penalty_b").get<double>();
    if (j.contains("initial_dist") && !j["initial_dist"].is_null()) {
        std::istringstream dist_json(j["initial_dist"].dump());
        cfg.initial_dist = load_distribution(dist_json);
    }
    return cfg;
}

inline AnnealConfig load_anneal_config(std::istream& in) {
    nlohmann::json j;
    in >> j;
    return anneal_config_from_json(j);
}

inline void save_anneal_config(std::ostream& os, const AnnealConfig& cfg) {
    os << anneal_config_to_json(cfg).dump(2) << '\n';
}

}  // namespace ltkit
