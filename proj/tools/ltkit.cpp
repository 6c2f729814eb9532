// Command line front end. Five subcommands cover the workflow: inspect a
// degree distribution, predict inactivations, simulate decoding, evaluate
// the failure-probability lower bound, and run the annealing optimizer.
// Everything prints plot-ready CSV; nothing here renders figures.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <ltkit/experiment.hpp>
#include <ltkit/sa_optimizer.hpp>

namespace {

// Write through to a file when --out was given, stdout otherwise.
void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + out_path + "'");
    f << content;
    if (!f) throw std::runtime_error("write to '" + out_path + "' failed");
}

ltkit::InactivationStrategy parse_strategy(const std::string& name) {
    if (name == "random") return ltkit::InactivationStrategy::Random;
    if (name == "max-active-degree") return ltkit::InactivationStrategy::MaxActiveDegree;
    throw std::runtime_error("unknown strategy '" + name +
                             "' (use random or max-active-degree)");
}

// Pull c and delta back out of an rsd/rsd-trunc spec so dist mode can show
// where the spike sits.
bool rsd_params_of(const std::string& spec, double& c, double& delta) {
    if (spec.rfind("rsd:", 0) != 0 && spec.rfind("rsd-trunc:", 0) != 0) return false;
    const std::string rest = spec.substr(spec.find(':') + 1);
    std::istringstream ss(rest);
    char comma;
    return static_cast<bool>(ss >> c >> comma >> delta) && comma == ',';
}

struct CommonArgs {
    std::uint32_t k = 0;
    std::string dist_spec;
    std::string eps_text;
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_eps) {
    cmd->add_option("--k", args.k, "number of input symbols");
    cmd->add_option("--dist", args.dist_spec,
                    "degree distribution: rsd:c,delta | rsd-trunc:c,delta,dmax | "
                    "lrfc:mean | file:PATH")
        ->required();
    if (needs_eps)
        cmd->add_option("--eps", args.eps_text,
                        "overhead grid: comma list or start:step:stop")
            ->required();
    cmd->add_option("--out", args.out_path, "output file (default stdout)");
}

int run_dist(const CommonArgs& args, const std::string& format) {
    auto dist = ltkit::parse_dist_spec(args.dist_spec, args.k);
    std::cout << "k " << dist.k() << "\n"
              << "d_max " << dist.d_max() << "\n"
              << "mean_degree " << dist.mean_degree() << "\n"
              << "omega_1 " << dist.omega(1) << "\n";
    double c, delta;
    if (rsd_params_of(args.dist_spec, c, delta)) {
        const auto spike = ltkit::rsd_spike_degree(dist.k(), c, delta);
        std::cout << "spike_degree " << spike << "\n"
                  << "omega_spike " << dist.omega(spike) << "\n";
    }
    if (!args.out_path.empty()) {
        std::ofstream f(args.out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file '" + args.out_path + "'");
        if (format == "json")
            ltkit::save_json(dist, f);
        else
            ltkit::save_text(dist, f);
    }
    return 0;
}

int run_predict(const CommonArgs& args, const std::string& trajectory_path) {
    auto dist = ltkit::parse_dist_spec(args.dist_spec, args.k);
    const auto grid = ltkit::parse_eps_list(args.eps_text);
    auto rows = ltkit::run_prediction(dist, dist.k(), grid);
    std::ostringstream csv;
    ltkit::write_prediction_csv(csv, rows);
    emit(args.out_path, csv.str());

    if (!trajectory_path.empty()) {
        if (grid.size() != 1)
            throw std::runtime_error("--trajectory needs exactly one epsilon");
        auto pred = ltkit::predict_inactivations(dist.k(), grid[0], dist);
        std::ofstream f(trajectory_path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open trajectory file '" +
                                     trajectory_path + "'");
        ltkit::write_trajectory_csv(f, pred.trajectory);
    }
    return 0;
}

int run_simulate(const CommonArgs& args, std::uint32_t trials,
                 const std::string& strategy, std::uint64_t seed,
                 std::uint32_t threads) {
    auto dist = ltkit::parse_dist_spec(args.dist_spec, args.k);
    const auto grid = ltkit::parse_eps_list(args.eps_text);
    auto stats = ltkit::run_simulation(dist, dist.k(), grid, trials,
                                       parse_strategy(strategy), seed, threads);
    std::ostringstream csv;
    ltkit::write_sim_csv(csv, stats);
    emit(args.out_path, csv.str());
    return 0;
}

int run_bound_cmd(const CommonArgs& args, std::uint32_t precision, bool real_exponent) {
    auto dist = ltkit::parse_dist_spec(args.dist_spec, args.k);
    const auto grid = ltkit::parse_eps_list(args.eps_text);
    ltkit::BoundOptions opts;
    opts.precision_bits = precision;
    opts.real_exponent = real_exponent;
    auto rows = ltkit::run_bound(dist, dist.k(), grid, opts);
    std::ostringstream csv;
    ltkit::write_bound_csv(csv, rows);
    emit(args.out_path, csv.str());
    return 0;
}

int run_optimize(const std::string& config_path, const std::string& history_path,
                 const std::string& out_dist_path) {
    std::ifstream cfg_file(config_path);
    if (!cfg_file)
        throw std::runtime_error("cannot open config file '" + config_path + "'");
    auto cfg = ltkit::load_anneal_config(cfg_file);
    auto run = ltkit::anneal(cfg);

    auto best = ltkit::energy_detail(run.best_dist, cfg.constraints);
    std::cout << "best_energy " << run.best_energy << "\n"
              << "predicted_inact " << best.n_inact << "\n"
              << "pf_bound " << best.pf_bound << "\n"
              << "mean_degree " << best.mean_degree << "\n"
              << "evaluations " << run.evaluations << "\n"
              << "steps " << run.history.size() - 1 << "\n";

    if (!history_path.empty()) {
        std::ofstream f(history_path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open history file '" + history_path + "'");
        ltkit::write_history_csv(f, run.history);
    }
    if (!out_dist_path.empty()) {
        std::ofstream f(out_dist_path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open distribution file '" +
                                     out_dist_path + "'");
        ltkit::save_text(run.best_dist, f);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LT code design toolkit: degree distributions, inactivation "
                 "predictions, Monte Carlo simulation, failure bounds, and "
                 "annealing-based optimization"};
    app.require_subcommand(1);

    CommonArgs dist_args;
    std::string dist_format = "text";
    auto* dist_cmd = app.add_subcommand("dist", "inspect or export a degree distribution");
    add_common(dist_cmd, dist_args, false);
    dist_cmd->add_option("--format", dist_format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));

    CommonArgs predict_args;
    std::string trajectory_path;
    auto* predict_cmd =
        app.add_subcommand("predict", "predicted inactivations over an overhead grid");
    add_common(predict_cmd, predict_args, true);
    predict_cmd->add_option("--trajectory", trajectory_path,
                            "also dump the per-step state curve (single epsilon only)");

    CommonArgs sim_args;
    std::uint32_t trials = 200;
    std::string strategy = "random";
    std::uint64_t seed = 1;
    std::uint32_t threads = 1;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo decoding sweep");
    add_common(sim_cmd, sim_args, true);
    sim_cmd->add_option("--trials", trials, "decodes per grid point");
    sim_cmd->add_option("--strategy", strategy, "random or max-active-degree");
    sim_cmd->add_option("--seed", seed, "master seed for trial derivation");
    sim_cmd->add_option("--threads", threads, "worker threads");

    CommonArgs bound_args;
    std::uint32_t precision = 256;
    bool real_exponent = false;
    auto* bound_cmd =
        app.add_subcommand("bound", "failure-probability lower bound over a grid");
    add_common(bound_cmd, bound_args, true);
    bound_cmd->add_option("--precision", precision, "mantissa bits (rounded up the ladder)");
    bound_cmd->add_flag("--real-exponent", real_exponent,
                        "use the real exponent k(1+eps) instead of the symbol count");

    std::string config_path, history_path, out_dist_path;
    auto* opt_cmd = app.add_subcommand("optimize", "simulated annealing over distributions");
    opt_cmd->add_option("--config", config_path, "anneal config JSON")->required();
    opt_cmd->add_option("--history", history_path, "write per-step history CSV here");
    opt_cmd->add_option("--out-dist", out_dist_path, "write the best distribution here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dist_cmd->parsed()) return run_dist(dist_args, dist_format);
        if (predict_cmd->parsed()) return run_predict(predict_args, trajectory_path);
        if (sim_cmd->parsed())
            return run_simulate(sim_args, trials, strategy, seed, threads);
        if (bound_cmd->parsed()) return run_bound_cmd(bound_args, precision, real_exponent);
        if (opt_cmd->parsed())
            return run_optimize(config_path, history_path, out_dist_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
