// ============================================================================
// acceptance.cpp
// End-to-end acceptance harness. One numbered criterion per block; each
// prints a single PASS/FAIL line plus the measurements it was judged on,
// so a failing run documents itself.
//
// Usage:
//   acceptance [--criterion N] [--cli PATH] [--long]
//
//   --criterion N  run only criterion N (1..8); default runs all
//   --cli PATH     path to the command line binary (criterion 8)
//   --long         criterion 6 also repeats the optimization at k=10000
//
// Exit code: number of failed criteria.
// ============================================================================

#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include <ltkit/experiment.hpp>
#include <ltkit/sa_optimizer.hpp>

using namespace ltkit;

namespace {

// Every criterion shares one master seed, fixed before any numbers were
// frozen. Changing it invalidates the measurements quoted in the README.
constexpr std::uint64_t kMasterSeed = 1;

bool g_criterion_ok = true;

void fail(const char* fmt, ...) {
    g_criterion_ok = false;
    std::va_list ap;
    va_start(ap, fmt);
    std::printf("  [FAIL] ");
    std::vprintf(fmt, ap);
    std::printf("\n");
    va_end(ap);
}

bool finish(int n, const char* label) {
    std::printf("criterion %d (%s): %s\n", n, label, g_criterion_ok ? "PASS" : "FAIL");
    const bool ok = g_criterion_ok;
    g_criterion_ok = true;
    return ok;
}

// ---------------------------------------------------------------------------
// 1. Predictor accuracy across the overhead sweep, both reference families.
// ---------------------------------------------------------------------------
bool criterion_1() {
    const auto grid = parse_eps_list("0:0.05:0.3");
    struct Family { const char* name; DegreeDistribution dist; };
    const Family families[] = {
        {"rsd", make_rsd(1000, 0.09266, 0.001993)},
        {"lrfc", make_lrfc(1000, 12.0)},
    };
    for (const auto& fam : families) {
        const auto sim = run_simulation(fam.dist, 1000, grid, 200,
                                        InactivationStrategy::Random, kMasterSeed, 1);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double pred = predict_total(1000, grid[i], fam.dist);
            const double err = std::fabs(pred - sim[i].mean_inact);
            const double tol = std::max(2.0, 0.1 * sim[i].mean_inact);
            std::printf("  %-4s eps=%.2f sim=%8.3f pred=%8.3f err=%6.3f tol=%6.3f\n",
                        fam.name, grid[i], sim[i].mean_inact, pred, err, tol);
            if (!(err <= tol))
                fail("%s eps=%.2f: |pred-sim|=%.3f exceeds %.3f", fam.name,
                     grid[i], err, tol);
        }
    }
    return finish(1, "predicted inactivations track simulation");
}

// ---------------------------------------------------------------------------
// 2. Per-step ripple curves and the cumulative inactivation curve.
// ---------------------------------------------------------------------------
bool criterion_2() {
    const std::uint32_t k = 1000;
    const auto dist = make_rsd(k, 0.09266, 0.001993);
    const auto avg = average_ripples(dist, k, 0.2, 200,
                                     InactivationStrategy::Random, kMasterSeed);
    const auto pred = predict_inactivations(k, 0.2, dist);

    auto curve_check = [&](const char* name, const std::vector<double>& sim,
                           auto model_at) {
        double abs_err = 0.0, peak = 0.0;
        for (std::uint32_t j = 0; j <= k; ++j) {
            abs_err += std::fabs(sim[j] - model_at(pred.trajectory[j]));
            peak = std::max(peak, sim[j]);
        }
        const double mae = abs_err / (k + 1);
        const double tol = 0.05 * peak;
        std::printf("  curve %-9s mae=%7.3f peak=%8.3f tol=%7.3f\n", name, mae,
                    peak, tol);
        if (!(mae <= tol))
            fail("curve %s: mae %.3f exceeds 5%% of peak (%.3f)", name, mae, tol);
    };
    auto ripple_at = [](std::size_t i) {
        return [i](const RippleState& s) {
            return i < s.p.size() ? s.active_outputs * s.p[i] : 0.0;
        };
    };
    curve_check("ripple1", avg.ripple1, ripple_at(0));
    curve_check("ripple2", avg.ripple2, ripple_at(1));
    curve_check("ripple3", avg.ripple3, ripple_at(2));
    curve_check("cum_inact", avg.cum_inact,
                [](const RippleState& s) { return s.cum_inactivations; });
    return finish(2, "ripple trajectories track simulation means");
}

// ---------------------------------------------------------------------------
// 3. Bound equals the exact uncovered-input probability when degrees are
//    all one. Oracle in exact rational arithmetic.
// ---------------------------------------------------------------------------
boost::multiprecision::cpp_int binom_exact(std::uint32_t n, std::uint32_t r) {
    boost::multiprecision::cpp_int v = 1;
    for (std::uint32_t t = 0; t < r; ++t) { v *= n - t; v /= t + 1; }
    return v;
}

double exact_uncovered_degree_one(std::uint32_t k, std::uint32_t m) {
    namespace mp = boost::multiprecision;
    mp::cpp_rational total = 0;
    const mp::cpp_int k_pow = pow(mp::cpp_int(k), m);
    for (std::uint32_t i = 1; i <= k; ++i) {
        const mp::cpp_rational term(binom_exact(k, i) * pow(mp::cpp_int(k - i), m),
                                    k_pow);
        total += (i % 2 == 1) ? term : -term;
    }
    return total.convert_to<double>();
}

bool criterion_3() {
    const auto ones2 = DegreeDistribution::from_pairs(2, {{1, 1.0}});
    const double two_two = pf_lower_bound(ones2, 2, 0.0).value;
    std::printf("  k=2 m=2 bound=%.17g exact=0.5\n", two_two);
    if (std::fabs(two_two - 0.5) > 1e-9) fail("k=2 m=2: got %.17g", two_two);

    double worst = 0.0;
    for (std::uint32_t k : {3u, 5u, 8u, 12u, 16u, 20u}) {
        const auto ones = DegreeDistribution::from_pairs(k, {{1, 1.0}});
        for (std::uint32_t m : {k, k + 3, 2 * k}) {
            const double eps = static_cast<double>(m) / k - 1.0;
            const double got = pf_lower_bound(ones, k, eps).value;
            const double want = exact_uncovered_degree_one(k, m);
            worst = std::max(worst, std::fabs(got - want));
            if (std::fabs(got - want) > 1e-9)
                fail("k=%u m=%u: bound %.17g vs exact %.17g", k, m, got, want);
        }
    }
    std::printf("  degree-one grid worst abs err=%.3g (limit 1e-9)\n", worst);
    return finish(3, "bound exact on degree-one distributions");
}

// ---------------------------------------------------------------------------
// 4. Decode success must coincide with full column rank of the received
//    matrix, judged by an independent dense elimination.
// ---------------------------------------------------------------------------
bool criterion_4() {
    Rng seeder(kMasterSeed);
    std::uint32_t instances = 0, successes = 0;
    const std::uint32_t ks[] = {3, 5, 8, 13, 21, 34, 50, 64};
    const double eps_cycle[] = {0.0, 0.1, 0.3};
    try {
        for (std::uint32_t rep = 0; rep < 32; ++rep) {
            for (std::uint32_t k : ks) {
                std::vector<DegreeDistribution> dists;
                dists.push_back(DegreeDistribution::from_pairs(k, {{1, 1.0}}));
                dists.push_back(make_lrfc(k, std::min(4.0, k / 2.0)));
                dists.push_back(truncate(make_rsd(k, 0.2, 0.5), std::min(k, 20u)));
                if (k >= 3)
                    dists.push_back(DegreeDistribution::from_pairs(
                        k, {{1, 0.2}, {2, 0.5}, {3, 0.3}}));
                for (const auto& dist : dists) {
                    const double eps = eps_cycle[instances % 3];
                    EncodeSpec spec;
                    spec.k = k;
                    spec.m = symbols_for_overhead(k, eps);
                    spec.dist = dist;
                    spec.seed = seeder.next();
                    const auto g = encode(spec);

                    Rng dec(seeder.next());
                    const auto trace =
                        decode(g, InactivationStrategy::Random, dec);

                    gf2::DenseBitMatrix dense(g.rows(), g.cols());
                    for (std::size_t r = 0; r < g.rows(); ++r)
                        for (std::uint32_t c : g.row(r)) dense.set(r, c, true);
                    const bool full_rank = gf2::rank(dense) == k;
                    if (trace.success != full_rank)
                        fail("k=%u m=%u seed run %u: decode %s but rank %s k",
                             k, spec.m, instances,
                             trace.success ? "succeeded" : "failed",
                             full_rank ? "==" : "<");
                    ++instances;
                    successes += trace.success ? 1 : 0;
                }
            }
        }
    } catch (const std::exception& e) {
        fail("exception during sweep: %s", e.what());
    }
    std::printf("  %u instances, %u decode successes, rank agreement on all\n",
                instances, successes);
    if (instances < 1000) fail("only %u instances generated", instances);
    return finish(4, "decode success equals full rank");
}

// ---------------------------------------------------------------------------
// 5. Inactivation strategy ordering: picking the busiest input must not
//    lose to random choice, and the edge stays modest.
// ---------------------------------------------------------------------------
bool criterion_5() {
    const auto dist = truncate(make_rsd(1000, 0.09266, 0.001993), 150);
    const std::vector<double> grid = {0.0, 0.1};
    const auto rnd = run_simulation(dist, 1000, grid, 500,
                                    InactivationStrategy::Random, kMasterSeed, 1);
    const auto mad = run_simulation(dist, 1000, grid, 500,
                                    InactivationStrategy::MaxActiveDegree,
                                    kMasterSeed, 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::printf("  eps=%.1f random=%.3f max-active=%.3f ratio=%.4f\n",
                    grid[i], rnd[i].mean_inact, mad[i].mean_inact,
                    mad[i].mean_inact / rnd[i].mean_inact);
        if (!(mad[i].mean_inact <= rnd[i].mean_inact))
            fail("eps=%.1f: max-active %.3f above random %.3f", grid[i],
                 mad[i].mean_inact, rnd[i].mean_inact);
        if (!(mad[i].mean_inact >= 0.8 * rnd[i].mean_inact))
            fail("eps=%.1f: gap exceeds 20%% (ratio %.4f)", grid[i],
                 mad[i].mean_inact / rnd[i].mean_inact);
    }
    return finish(5, "max-active-degree no worse than random, within 20%");
}

// ---------------------------------------------------------------------------
// 6. Annealing beats the best truncated robust soliton from a parameter
//    grid, under the same design constraints, and the win survives
//    simulation. Scale k=1000; --long repeats at k=10000.
// ---------------------------------------------------------------------------
bool optimize_once(std::uint32_t k) {
    DesignConstraints cons;
    cons.k = k;
    cons.pf_target = 1e-2;
    cons.pf_eval_epsilon = 0.0;
    cons.mean_degree_cap = 12.0;
    cons.d_max_cap = 150;
    cons.penalty_b = 1000.0;
    const std::vector<double> c_grid = {0.02, 0.03, 0.05, 0.07, 0.09266, 0.12, 0.16, 0.20};
    const std::vector<double> delta_grid = {0.001, 0.005, 0.01, 0.05, 0.1, 0.2, 0.3};

    // No distribution under the mean cap can push the bound below the
    // single-uncovered-input mass; print it so an unreachable target is
    // legible in the output rather than looking like an optimizer defect.
    const double floor1 =
        k * std::exp(symbols_for_overhead(k, cons.pf_eval_epsilon) *
                     std::log1p(-cons.mean_degree_cap / k));
    std::printf("  k=%u single-uncovered floor at mean cap: %.3g (target %.3g)\n",
                k, floor1, cons.pf_target);

    const auto grid = rsd_parameter_search(k, cons, c_grid, delta_grid);
    const auto gdet = energy_detail(grid.dist, cons);
    std::printf("  k=%u grid best: c=%g delta=%g n_inact=%.3f bound=%.3g\n", k,
                grid.c, grid.delta, gdet.n_inact, gdet.pf_bound);

    AnnealConfig cfg;
    cfg.constraints = cons;
    cfg.initial_dist = grid.dist;
    cfg.seed = kMasterSeed;
    cfg.t_init = 1.0;
    cfg.t_final = 1e-3;
    cfg.cooling_factor = 0.93;
    cfg.moves_per_temperature = 60;
    cfg.perturbation_scale = 0.3;
    const auto run = anneal(cfg);
    const auto sdet = energy_detail(run.best_dist, cons);
    std::printf("  k=%u annealed:  n_inact=%.3f bound=%.3g evals=%llu\n", k,
                sdet.n_inact, sdet.pf_bound,
                static_cast<unsigned long long>(run.evaluations));

    if (!(sdet.n_inact < gdet.n_inact))
        fail("k=%u: annealed prediction %.3f not below grid %.3f", k,
             sdet.n_inact, gdet.n_inact);
    if (!(sdet.pf_bound <= cons.pf_target))
        fail("k=%u: annealed bound %.3g above target %.3g", k, sdet.pf_bound,
             cons.pf_target);

    const auto sim_g = run_simulation(grid.dist, k, {0.0}, 200,
                                      InactivationStrategy::Random, kMasterSeed, 1);
    const auto sim_s = run_simulation(run.best_dist, k, {0.0}, 200,
                                      InactivationStrategy::Random, kMasterSeed, 1);
    const double diff = sim_g[0].mean_inact - sim_s[0].mean_inact;
    const double sep = 2.0 * std::hypot(sim_g[0].std_err, sim_s[0].std_err);
    std::printf("  k=%u sim: grid=%.3f+-%.3f annealed=%.3f+-%.3f diff=%.3f need>%.3f\n",
                k, sim_g[0].mean_inact, sim_g[0].std_err, sim_s[0].mean_inact,
                sim_s[0].std_err, diff, sep);
    if (!(diff > sep))
        fail("k=%u: simulated gap %.3f within noise %.3f", k, diff, sep);
    return true;
}

bool criterion_6(bool long_mode) {
    optimize_once(1000);
    if (long_mode) optimize_once(10000);
    return finish(6, "annealing beats the soliton grid under constraints");
}

// ---------------------------------------------------------------------------
// 7. Numerical hygiene: widening the bound arithmetic must not move the
//    answer, and nothing in the sweeps may go non-finite.
// ---------------------------------------------------------------------------
bool criterion_7() {
    const auto big = truncate(make_rsd(10000, 0.05642, 0.0317), 150);
    for (double eps : {0.0, 0.05, 0.1}) {
        const auto narrow = pf_lower_bound(big, 10000, eps, 256u);
        const auto wide = pf_lower_bound(big, 10000, eps, 512u);
        const double rel = std::fabs(narrow.value - wide.value) /
                           std::max(wide.value, 1e-300);
        std::printf("  k=10000 eps=%.2f b256=%.12g b512=%.12g rel=%.3g\n", eps,
                    narrow.value, wide.value, rel);
        if (!(rel < 1e-9))
            fail("eps=%.2f: precision doubling moved bound by %.3g", eps, rel);
        if (!std::isfinite(narrow.value) || !std::isfinite(wide.value))
            fail("eps=%.2f: non-finite bound", eps);
    }

    std::uint32_t values = 0;
    for (const auto& dist :
         {make_rsd(1000, 0.09266, 0.001993), make_lrfc(1000, 12.0),
          truncate(make_rsd(1000, 0.03, 0.05), 150)}) {
        for (double eps = 0.0; eps <= 0.3 + 1e-12; eps += 0.05) {
            const double p = predict_total(1000, eps, dist);
            const double b = pf_lower_bound(dist, 1000, eps).value;
            if (!std::isfinite(p) || !std::isfinite(b))
                fail("sweep dist d_max=%u eps=%.2f: non-finite value",
                     dist.d_max(), eps);
            values += 2;
        }
    }
    std::printf("  sweep produced %u finite values\n", values);
    return finish(7, "bound stable under precision doubling, sweeps finite");
}

// ---------------------------------------------------------------------------
// 8. The command line tool is bitwise deterministic for a fixed seed.
// ---------------------------------------------------------------------------
std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool criterion_8(const std::string& cli) {
    if (cli.empty()) {
        fail("no --cli path given");
        return finish(8, "command line output byte-identical per seed");
    }
    const struct { const char* name; std::string args; } runs[] = {
        {"simulate",
         " simulate --k 300 --dist rsd:0.1,0.05 --eps 0:0.1:0.2 --trials 50"
         " --strategy max-active-degree --seed 7 --threads 2"},
        {"predict", " predict --k 300 --dist rsd:0.1,0.05 --eps 0:0.1:0.2"},
        {"bound", " bound --k 300 --dist rsd:0.1,0.05 --eps 0,0.1"},
    };
    for (const auto& r : runs) {
        const std::string a = std::string("acceptance_c8_") + r.name + "_a.csv";
        const std::string b = std::string("acceptance_c8_") + r.name + "_b.csv";
        const std::string base = cli + r.args + " --out ";
        if (std::system((base + a).c_str()) != 0 ||
            std::system((base + b).c_str()) != 0) {
            fail("%s: command failed", r.name);
            continue;
        }
        const std::string ca = slurp(a), cb = slurp(b);
        std::printf("  %s: %zu bytes, repeat %s\n", r.name, ca.size(),
                    ca == cb && !ca.empty() ? "identical" : "DIFFERS");
        if (ca.empty() || ca != cb) fail("%s: outputs differ or empty", r.name);
        std::remove(a.c_str());
        std::remove(b.c_str());
    }
    return finish(8, "command line output byte-identical per seed");
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    bool long_mode = false;
    std::string cli;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc)
            only = std::atoi(argv[++i]);
        else if (!std::strcmp(argv[i], "--cli") && i + 1 < argc)
            cli = argv[++i];
        else if (!std::strcmp(argv[i], "--long"))
            long_mode = true;
        else {
            std::fprintf(stderr, "usage: acceptance [--criterion N] [--cli PATH] [--long]\n");
            return 2;
        }
    }

    int failures = 0;
    auto run = [&](int n, bool (*f)()) {
        if (only == 0 || only == n) failures += f() ? 0 : 1;
    };
    run(1, criterion_1);
    run(2, criterion_2);
    run(3, criterion_3);
    run(4, criterion_4);
    run(5, criterion_5);
    if (only == 0 || only == 6) failures += criterion_6(long_mode) ? 0 : 1;
    run(7, criterion_7);
    if (only == 0 || only == 8) failures += criterion_8(cli) ? 0 : 1;
    return failures;
}
