// Monte Carlo experiment layer: seeded simulation sweeps over an overhead
// grid, their aggregation into per-epsilon statistics, and the plot-ready
// CSV emitters the command line tool prints.
//
// Reproducibility contract: trial t of epsilon-grid entry e runs on its own
// generator seeded with derive_stream_seed(master_seed, e, t); the encoder
// seed is that generator's first output. Results are keyed by trial index,
// so the aggregate is byte-identical no matter how trials are scheduled.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <ltkit/degree_dist.hpp>
#include <ltkit/failure_bound.hpp>
#include <ltkit/lt_codec.hpp>
#include <ltkit/ripple_model.hpp>
#include <ltkit/rng.hpp>
#include <ltkit/util.hpp>

namespace ltkit {

struct SimStats {
    double epsilon = 0.0;
    std::uint32_t trials = 0;
    double mean_inact = 0.0;
    double std_dev = 0.0;
    double std_err = 0.0;  // std_dev / sqrt(trials)
    double failure_rate = 0.0;
};

namespace detail {

struct TrialOutcome {
    std::uint32_t inactivations = 0;
    bool failed = false;
};

inline TrialOutcome run_one_trial(const DegreeDistribution& dist, std::uint32_t k,
                                  std::uint32_t m, InactivationStrategy strategy,
                                  std::uint64_t master_seed, std::uint32_t eps_index,
                                  std::uint32_t trial) {
    Rng rng(derive_stream_seed(master_seed, eps_index, trial));
    auto g = encode({k, m, dist, rng.next()});
    auto trace = decode(std::move(g), strategy, rng);
    return {trace.num_inactivations, !trace.success};
}

}  // namespace detail

// One epsilon grid entry: `trials` independent encode+decode runs.
inline SimStats simulate_point(const DegreeDistribution& dist, std::uint32_t k,
                               double epsilon, std::uint32_t eps_index,
                               std::uint32_t trials, InactivationStrategy strategy,
                               std::uint64_t master_seed, std::uint32_t threads = 1) {
    if (trials == 0) throw std::invalid_argument("simulate_point: trials must be positive");
    const auto m = static_cast<std::uint32_t>(symbols_for_overhead(k, epsilon));
    std::vector<detail::TrialOutcome> outcomes(trials);

    if (threads <= 1) {
        for (std::uint32_t t = 0; t < trials; ++t)
            outcomes[t] = detail::run_one_trial(dist, k, m, strategy, master_seed,
                                                eps_index, t);
    } else {
        const std::uint32_t workers = std::min(threads, trials);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::uint32_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::uint32_t t = w; t < trials; t += workers)
                    outcomes[t] = detail::run_one_trial(dist, k, m, strategy,
                                                        master_seed, eps_index, t);
            });
        }
        for (auto& th : pool) th.join();
    }

    NeumaierSum sum;
    std::uint32_t fails = 0;
    for (const auto& o : outcomes) {
        sum.add(o.inactivations);
        fails += o.failed;
    }
    const double mean = sum.value() / trials;
    NeumaierSum sq;
    for (const auto& o : outcomes) {
        const double d = o.inactivations - mean;
        sq.add(d * d);
    }
    SimStats s;
    s.epsilon = epsilon;
    s.trials = trials;
    s.mean_inact = mean;
    s.std_dev = trials > 1 ? std::sqrt(sq.value() / (trials - 1)) : 0.0;
    s.std_err = s.std_dev / std::sqrt(static_cast<double>(trials));
    s.failure_rate = static_cast<double>(fails) / trials;
    return s;
}

inline std::vector<SimStats> run_simulation(const DegreeDistribution& dist,
                                            std::uint32_t k,
                                            const std::vector<double>& epsilons,
                                            std::uint32_t trials,
                                            InactivationStrategy strategy,
                                            std::uint64_t master_seed,
                                            std::uint32_t threads = 1) {
    if (epsilons.empty())
        throw std::invalid_argument("run_simulation: empty epsilon grid");
    std::vector<SimStats> out;
    out.reserve(epsilons.size());
    for (std::uint32_t e = 0; e < epsilons.size(); ++e)
        out.push_back(simulate_point(dist, k, epsilons[e], e, trials, strategy,
                                     master_seed, threads));
    return out;
}

// Mean ripple occupancy (levels 1..3) and mean cumulative inactivations per
// decoding step, averaged over seeded trials; used to compare against the
// predicted trajectory. Vectors have k+1 entries, one per marked-input count.
struct RippleAverages {
    std::vector<double> ripple1, ripple2, ripple3, cum_inact;
};

inline RippleAverages average_ripples(const DegreeDistribution& dist, std::uint32_t k,
                                      double epsilon, std::uint32_t trials,
                                      InactivationStrategy strategy,
                                      std::uint64_t master_seed) {
    if (trials == 0) throw std::invalid_argument("average_ripples: trials must be positive");
    const auto m = static_cast<std::uint32_t>(symbols_for_overhead(k, epsilon));
    RippleAverages avg;
    avg.ripple1.assign(k + 1, 0.0);
    avg.ripple2.assign(k + 1, 0.0);
    avg.ripple3.assign(k + 1, 0.0);
    avg.cum_inact.assign(k + 1, 0.0);

    for (std::uint32_t t = 0; t < trials; ++t) {
        Rng rng(derive_stream_seed(master_seed, 0, t));
        auto g = encode({k, m, dist, rng.next()});
        DecodeProbe probe;
        auto trace = decode(std::move(g), strategy, rng, nullptr, &probe);
        for (std::uint32_t j = 0; j <= k; ++j) {
            avg.ripple1[j] += probe.ripple1[j];
            avg.ripple2[j] += probe.ripple2[j];
            avg.ripple3[j] += probe.ripple3[j];
        }
        double cum = 0.0;
        for (std::uint32_t j = 0; j < k; ++j) {
            cum += trace.per_step_inactivation[j];
            avg.cum_inact[j + 1] += cum;
        }
    }
    for (std::uint32_t j = 0; j <= k; ++j) {
        avg.ripple1[j] /= trials;
        avg.ripple2[j] /= trials;
        avg.ripple3[j] /= trials;
        avg.cum_inact[j] /= trials;
    }
    return avg;
}

inline std::vector<std::pair<double, double>> run_prediction(
    const DegreeDistribution& dist, std::uint32_t k,
    const std::vector<double>& epsilons) {
    if (epsilons.empty())
        throw std::invalid_argument("run_prediction: empty epsilon grid");
    std::vector<std::pair<double, double>> out;
    out.reserve(epsilons.size());
    for (double eps : epsilons) out.emplace_back(eps, predict_total(k, eps, dist));
    return out;
}

inline std::vector<std::pair<double, double>> run_bound(
    const DegreeDistribution& dist, std::uint32_t k,
    const std::vector<double>& epsilons, BoundOptions opts = {}) {
    if (epsilons.empty())
        throw std::invalid_argument("run_bound: empty epsilon grid");
    std::vector<std::pair<double, double>> out;
    out.reserve(epsilons.size());
    for (double eps : epsilons)
        out.emplace_back(eps, pf_lower_bound(dist, k, eps, opts).value);
    return out;
}

inline void write_sim_csv(std::ostream& os, const std::vector<SimStats>& stats) {
    os << "epsilon,trials,mean_inact,std,stderr,failure_rate\n";
    char line[160];
    for (const auto& s : stats) {
        std::snprintf(line, sizeof line, "%.12g,%u,%.12g,%.12g,%.12g,%.12g\n",
                      s.epsilon, s.trials, s.mean_inact, s.std_dev, s.std_err,
                      s.failure_rate);
        os << line;
    }
}

inline void write_prediction_csv(std::ostream& os,
                                 const std::vector<std::pair<double, double>>& rows) {
    os << "epsilon,predicted_inact\n";
    char line[80];
    for (const auto& [eps, n] : rows) {
        std::snprintf(line, sizeof line, "%.12g,%.12g\n", eps, n);
        os << line;
    }
}

inline void write_bound_csv(std::ostream& os,
                            const std::vector<std::pair<double, double>>& rows) {
    os << "epsilon,pf_lower_bound\n";
    char line[80];
    for (const auto& [eps, v] : rows) {
        std::snprintf(line, sizeof line, "%.12g,%.12g\n", eps, v);
        os << line;
    }
}

// "0,0.05,0.1" or "start:step:stop" (stop inclusive up to float fuzz).
inline std::vector<double> parse_eps_list(const std::string& text) {
    auto parse_num = [](const std::string& tok) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad epsilon value '" + tok + "'");
        }
        if (used != tok.size())
            throw std::invalid_argument("bad epsilon value '" + tok + "'");
        return v;
    };

    if (text.empty()) throw std::invalid_argument("empty epsilon list");
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        if (b == std::string::npos || text.find(':', b + 1) != std::string::npos)
            throw std::invalid_argument("range form is start:step:stop");
        const double start = parse_num(text.substr(0, a));
        const double step = parse_num(text.substr(a + 1, b - a - 1));
        const double stop = parse_num(text.substr(b + 1));
        if (!(step > 0.0)) throw std::invalid_argument("range step must be positive");
        if (stop < start) throw std::invalid_argument("range stop below start");
        const auto count = static_cast<std::size_t>((stop - start) / step + 1e-9) + 1;
        for (std::size_t i = 0; i < count; ++i) out.push_back(start + i * step);
        return out;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto end = comma == std::string::npos ? text.size() : comma;
        out.push_back(parse_num(text.substr(pos, end - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// Distribution source: rsd:c,delta | rsd-trunc:c,delta,dmax | lrfc:mean |
// file:PATH. For file sources a nonzero k must agree with the stored one.
inline DegreeDistribution parse_dist_spec(const std::string& spec, std::uint32_t k) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("distribution spec needs a kind prefix, got '" +
                                    spec + "'");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);

    auto split_args = [&rest]() {
        std::vector<double> args;
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            const auto comma = rest.find(',', pos);
            const auto end = comma == std::string::npos ? rest.size() : comma;
            const std::string tok = rest.substr(pos, end - pos);
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad numeric argument '" + tok + "'");
            }
            if (used != tok.size())
                throw std::invalid_argument("bad numeric argument '" + tok + "'");
            args.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return args;
    };

    if (kind == "file") {
        auto dist = load_distribution_file(rest);
        if (k != 0 && dist.k() != k)
            throw std::invalid_argument("file distribution has k=" +
                                        std::to_string(dist.k()) +
                                        " but k=" + std::to_string(k) + " was requested");
        return dist;
    }
    if (k == 0)
        throw std::invalid_argument("k is required for builtin distribution '" +
                                    kind + "'");
    const auto args = split_args();
    if (kind == "rsd") {
        if (args.size() != 2)
            throw std::invalid_argument("rsd spec takes c,delta");
        return make_rsd(k, args[0], args[1]);
    }
    if (kind == "rsd-trunc") {
        if (args.size() != 3)
            throw std::invalid_argument("rsd-trunc spec takes c,delta,dmax");
        return truncate(make_rsd(k, args[0], args[1]),
                        static_cast<std::uint32_t>(args[2]));
    }
    if (kind == "lrfc") {
        if (args.size() != 1)
            throw std::invalid_argument("lrfc spec takes the mean degree");
        return make_lrfc(k, args[0]);
    }
    throw std::invalid_argument("unknown distribution kind '" + kind + "'");
}

}  // namespace ltkit
