// netlearn — command-line front end: simulation runs, node-count sweeps,
// graph analysis, bound evaluation, and the verification suite.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "netlearn/analysis.hpp"
#include "netlearn/bounds.hpp"
#include "netlearn/checks.hpp"
#include "netlearn/graph.hpp"
#include "netlearn/harness.hpp"

using namespace netlearn;

namespace {

struct SimFlags {
    std::string config_path;
    std::string graph_kind;
    std::string family;
    int n = 0, rows = 0, cols = 0, b_window = 0, edge_budget = -1;
    std::uint64_t graph_seed = 0;
    std::vector<int> measuring;
    std::int64_t period = 0;
    double sigma = -1.0, sigma_prime = -1.0;
    std::string distribution;
    bool symmetric_offset = false;
    double epsilon = -1.0, offset = -1.0;
    std::vector<double> mu;
    int l = 0;
    bool init_zeros = false;
    std::vector<double> init_box;
    std::int64_t horizon = 0;
    std::uint64_t seed = 0;
    int trials = 0;
    std::int64_t stride = -1;
    double threshold = -1.0;
    std::string out_dir = ".";
    std::string format = "csv";
};

void add_sim_options(CLI::App* sub, SimFlags& f) {
    sub->add_option("--config", f.config_path, "config file (flags override file values)");
    sub->add_option("--graph-kind", f.graph_kind, "family | random_sequence");
    sub->add_option("--graph", f.family, "graph family: complete|line|star|lollipop|grid2d");
    sub->add_option("--n", f.n, "node count");
    sub->add_option("--rows", f.rows, "grid rows");
    sub->add_option("--cols", f.cols, "grid cols");
    sub->add_option("--b-window", f.b_window, "connectivity window B");
    sub->add_option("--edge-budget", f.edge_budget, "edges per window (random sequence)");
    sub->add_option("--graph-seed", f.graph_seed, "random-sequence seed");
    sub->add_option("--measuring", f.measuring, "measuring nodes (default: canonical node)");
    sub->add_option("--period", f.period, "steps between measurement times");
    sub->add_option("--sigma", f.sigma, "measurement noise std dev");
    sub->add_option("--sigma-prime", f.sigma_prime, "offset noise std dev");
    sub->add_option("--distribution", f.distribution, "gaussian|uniform|rademacher");
    sub->add_flag("--symmetric-offset", f.symmetric_offset, "force w_ji = -w_ij");
    sub->add_option("--epsilon", f.epsilon, "stepsize exponent parameter in (0,1)");
    sub->add_option("--offset", f.offset, "stepsize offset (delta(t)=1/(t+offset)^(1-eps))");
    sub->add_option("--mu", f.mu, "target vector entries (default zeros)");
    sub->add_option("--l", f.l, "target dimension");
    sub->add_flag("--init-zeros", f.init_zeros, "start all estimates at zero");
    sub->add_option("--init-box", f.init_box, "uniform init box LO HI")->expected(2);
    sub->add_option("--horizon", f.horizon, "max steps");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--trials", f.trials, "independent trials");
    sub->add_option("--stride", f.stride, "trajectory sampling stride (0=auto)");
    sub->add_option("--threshold", f.threshold, "convergence threshold on the inf-error");
    sub->add_option("--out", f.out_dir, "output directory");
    sub->add_option("--format", f.format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
}

ExperimentConfig build_config(const CLI::App* sub, const SimFlags& f) {
    ExperimentConfig cfg;
    if (sub->count("--config")) apply_config_file(cfg, f.config_path);
    if (sub->count("--graph-kind")) cfg.graph_kind = f.graph_kind;
    if (sub->count("--graph")) cfg.family = f.family;
    if (sub->count("--n")) cfg.n = f.n;
    if (sub->count("--rows")) cfg.rows = f.rows;
    if (sub->count("--cols")) cfg.cols = f.cols;
    if (sub->count("--b-window")) cfg.b_window = f.b_window;
    if (sub->count("--edge-budget")) cfg.edge_budget = f.edge_budget;
    if (sub->count("--graph-seed")) cfg.graph_seed = f.graph_seed;
    if (sub->count("--measuring")) cfg.measuring_nodes = f.measuring;
    if (sub->count("--period")) cfg.period = f.period;
    if (sub->count("--sigma")) cfg.sigma = f.sigma;
    if (sub->count("--sigma-prime")) cfg.sigma_prime = f.sigma_prime;
    if (sub->count("--distribution")) cfg.distribution = f.distribution;
    if (sub->count("--symmetric-offset")) cfg.symmetric_offset = true;
    if (sub->count("--epsilon")) cfg.epsilon = f.epsilon;
    if (sub->count("--offset")) cfg.offset = f.offset;
    if (sub->count("--mu")) cfg.mu = f.mu;
    if (sub->count("--l")) cfg.l = f.l;
    if (sub->count("--init-zeros")) cfg.init_kind = "zeros";
    if (sub->count("--init-box")) {
        cfg.init_kind = "box";
        cfg.init_lo = f.init_box[0];
        cfg.init_hi = f.init_box[1];
    }
    if (sub->count("--horizon")) cfg.horizon = f.horizon;
    if (sub->count("--seed")) cfg.seed = f.seed;
    if (sub->count("--trials")) cfg.trials = f.trials;
    if (sub->count("--stride")) cfg.stride = f.stride;
    if (sub->count("--threshold")) cfg.threshold = f.threshold;
    return cfg;
}

std::int64_t median_time(std::vector<std::optional<std::int64_t>> times, std::int64_t horizon) {
    std::vector<std::int64_t> v;
    v.reserve(times.size());
    for (const auto& t : times) v.push_back(t.value_or(horizon + 1));
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return (k % 2 == 1) ? v[k / 2] : (v[k / 2 - 1] + v[k / 2]) / 2;
}

// A family simulation needs a size from somewhere; absence is a usage error.
bool missing_size(const CLI::App* sub) {
    return !sub->count("--config") && !sub->count("--n") &&
           !(sub->count("--rows") && sub->count("--cols"));
}

int cmd_simulate(const CLI::App* sub, const SimFlags& f) {
    if (missing_size(sub)) {
        std::cerr << "error: simulate requires --n (or --rows/--cols, or a --config file)\n";
        return 2;
    }
    ExperimentConfig cfg = build_config(sub, f);
    cfg.validate();
    std::cout << "config_digest = " << cfg.digest() << "\n";

    const std::string base = f.out_dir + "/";
    if (cfg.trials > 1) {
        const TrialAggregate agg = monte_carlo(cfg);
        if (f.format == "csv" || f.format == "both") {
            const std::string p = base + "agg_" + cfg.digest() + ".csv";
            export_csv(agg, cfg, p);
            std::cout << "wrote " << p << "\n";
        }
        if (f.format == "json" || f.format == "both") {
            const std::string p = base + "agg_" + cfg.digest() + ".json";
            export_json(agg, cfg, p);
            std::cout << "wrote " << p << "\n";
        }
        std::cout << "trials = " << agg.trials << "\n";
        std::cout << "final Z_mean = " << agg.z_mean.back() << " (se " << agg.z_se.back() << ")\n";
        if (cfg.threshold > 0.0) {
            const std::int64_t med = median_time(agg.convergence_times, cfg.horizon);
            if (med > cfg.horizon) std::cout << "median convergence_time = not reached\n";
            else std::cout << "median convergence_time = " << med << "\n";
        }
    } else {
        const RunResult r = run(cfg);
        if (r.unit_step_used)
            std::cerr << "warning: stepsize is 1 at t=1 (offset 0); the decreasing-stepsize "
                         "contraction hypothesis starts holding from t=2\n";
        if (f.format == "csv" || f.format == "both") {
            const std::string p = base + "run_" + cfg.digest() + ".csv";
            export_csv(r, cfg, p);
            std::cout << "wrote " << p << "\n";
        }
        if (f.format == "json" || f.format == "both") {
            const std::string p = base + "run_" + cfg.digest() + ".json";
            export_json(r, cfg, p);
            std::cout << "wrote " << p << "\n";
        }
        std::cout << "final: t=" << r.final_t << " Z=" << r.final_z << " max_err=" << r.final_err
                  << "\n";
        if (cfg.threshold > 0.0) {
            if (r.convergence_time) std::cout << "convergence_time = " << *r.convergence_time << "\n";
            else std::cout << "convergence_time = not reached\n";
        }
    }
    return 0;
}

int cmd_sweep(const CLI::App* sub, const SimFlags& f, const std::vector<int>& n_list) {
    if (n_list.empty()) throw std::invalid_argument("sweep: --n-list must not be empty");
    ExperimentConfig base_cfg = build_config(sub, f);
    if (!(base_cfg.threshold > 0.0))
        throw std::invalid_argument("sweep: a convergence --threshold is required");

    std::ostringstream rows;
    rows << "n,convergence_time\n";
    std::string digest;
    for (int n : n_list) {
        ExperimentConfig cfg = base_cfg;
        cfg.n = n;
        cfg.validate();
        digest = cfg.digest();
        std::cout << "n=" << n << " config_digest = " << digest << std::flush;
        const auto times = convergence_times(cfg);
        const std::int64_t med = median_time(times, cfg.horizon);
        if (med > cfg.horizon) {
            std::cout << " convergence_time = not reached\n";
            rows << n << ",-1\n";
        } else {
            std::cout << " convergence_time = " << med << "\n";
            rows << n << "," << med << "\n";
        }
    }
    const std::string p = f.out_dir + "/sweep_" + digest + ".csv";
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p);
    out << rows.str();
    std::cout << "wrote " << p << "\n";
    return 0;
}

int cmd_analyze(const std::string& family, int n, int rows, int cols, const std::string& graph_file,
                std::vector<int> measuring, const std::string& format) {
    GraphSnapshot g;
    std::string desc;
    if (!graph_file.empty()) {
        g = read_graph_file(graph_file);
        desc = graph_file;
    } else {
        const GraphFamily fam = parse_family(family);
        g = (fam == GraphFamily::grid2d && rows > 0 && cols > 0) ? generate_grid(rows, cols)
                                                                 : generate(fam, n);
        desc = family;
        if (measuring.empty()) measuring = {canonical_measuring_node(fam, g.n())};
    }
    if (measuring.empty()) measuring = {0};
    if (!g.is_connected()) throw std::runtime_error("analyze: graph is disconnected");

    const auto metro = metropolis_matrix(g);
    const auto k_ord = sieve_constant(metro, SieveSum::ordered);
    const auto k_unord = sieve_constant(metro, SieveSum::unordered);
    const auto ht = hitting_times(g);
    const int diam = diameter(g);
    const double lam = lambda_max(protocol_matrix(g, measuring));
    const double lam_bound = 1.0 - 1.0 / (24.0 * ht.max_value);

    if (format == "json") {
        nlohmann::ordered_json j;
        j["graph"] = desc;
        j["n"] = g.n();
        j["edges"] = g.edge_count();
        j["diameter"] = diam;
        j["hitting_time_max"] = ht.max_value;
        j["kappa_ordered"] = k_ord.value;
        j["kappa_ordered_argmin"] = k_ord.argmin_index;
        j["kappa_unordered"] = k_unord.value;
        j["sieve_lower_bound"] = k_ord.lower_bound;
        j["measuring"] = measuring;
        j["lambda_max"] = lam;
        j["lambda_max_bound"] = lam_bound;
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("graph              %s\n", desc.c_str());
        std::printf("n                  %d\n", g.n());
        std::printf("edges              %d\n", g.edge_count());
        std::printf("diameter           %d\n", diam);
        std::printf("hitting_time_max   %.10g\n", ht.max_value);
        std::printf("kappa_ordered      %.10g (argmin node %d)\n", k_ord.value, k_ord.argmin_index);
        std::printf("kappa_unordered    %.10g\n", k_unord.value);
        std::printf("sieve_lower_bound  %.10g\n", k_ord.lower_bound);
        std::printf("lambda_max         %.10g (measuring:", lam);
        for (int i : measuring) std::printf(" %d", i);
        std::printf(")\n");
        std::printf("lambda_max_bound   %.10g\n", lam_bound);
    }
    return 0;
}

int cmd_bound(const bounds::BoundParams& p, const std::vector<double>& ts, const std::string& format) {
    p.validate();
    const auto tc = bounds::transient_connected(p);
    const auto tg = bounds::transient_general(p);

    if (format == "json") {
        nlohmann::ordered_json j;
        j["transient_connected"] = {{"value", tc.value}, {"log", tc.log_value}, {"overflow", tc.overflow}};
        j["transient_general"] = {{"value", tg.value}, {"log", tg.log_value}, {"overflow", tg.overflow}};
        auto rows_json = nlohmann::ordered_json::array();
        for (double t : ts) {
            nlohmann::ordered_json row;
            row["t"] = t;
            row["connected_bound"] = bounds::connected_bound(t, p);
            row["general_bound"] = bounds::general_bound(t, p);
            row["past_connected_transient"] = !tc.overflow && t >= tc.value;
            row["past_general_transient"] = !tg.overflow && t >= tg.value;
            rows_json.push_back(row);
        }
        j["bounds"] = rows_json;
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("transient_connected  %.10g (ln %.6g)%s\n", tc.value, tc.log_value,
                    tc.overflow ? " [overflow: reported as +inf]" : "");
        std::printf("transient_general    %.10g (ln %.6g)%s\n", tg.value, tg.log_value,
                    tg.overflow ? " [overflow: reported as +inf]" : "");
        if (!ts.empty()) {
            std::printf("%-16s %-22s %-22s\n", "t", "connected_bound", "general_bound");
            for (double t : ts) {
                std::printf("%-16.8g %-22.12g %-22.12g", t, bounds::connected_bound(t, p),
                            bounds::general_bound(t, p));
                if (!tc.overflow && t < tc.value) std::printf("  [t below connected transient]");
                std::printf("\n");
            }
        }
    }
    return 0;
}

int cmd_verify(const std::string& which, const checks::CheckOptions& opt) {
    std::vector<checks::CheckResult> results;
    if (which == "all") {
        results = checks::run_all_checks(opt);
    } else {
        results.push_back(checks::run_check(which, opt));
    }
    int fails = 0;
    for (const auto& r : results) {
        std::cout << checks::format_result(r) << "\n";
        if (!r.pass) ++fails;
    }
    return fails == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentralized vector-learning simulator and graph analysis toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the protocol and export trajectories");
    SimFlags sim_flags;
    add_sim_options(sim, sim_flags);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "convergence time as a function of node count");
    SimFlags sweep_flags;
    std::vector<int> n_list;
    add_sim_options(sweep, sweep_flags);
    sweep->add_option("--n-list", n_list, "node counts to sweep")->required();

    // analyze
    auto* ana = app.add_subcommand("analyze",
                                   "graph quantities: kappa, hitting times, lambda_max, diameter");
    std::string ana_family = "complete", ana_file, ana_format = "table";
    int ana_n = 2, ana_rows = 0, ana_cols = 0;
    std::vector<int> ana_measuring;
    ana->add_option("--graph", ana_family, "graph family");
    ana->add_option("--n", ana_n, "node count");
    ana->add_option("--rows", ana_rows, "grid rows");
    ana->add_option("--cols", ana_cols, "grid cols");
    ana->add_option("--graph-file", ana_file, "read the graph from a file instead");
    ana->add_option("--measuring", ana_measuring, "measuring set for lambda_max");
    ana->add_option("--format", ana_format, "table|json")->check(CLI::IsMember({"table", "json"}));

    // bound
    auto* bnd = app.add_subcommand("bound", "evaluate transient thresholds and decay bounds");
    bounds::BoundParams bp;
    std::vector<double> bound_ts;
    std::string bound_format = "table";
    bnd->add_option("--n", bp.n, "agents");
    bnd->add_option("--l", bp.l, "target dimension");
    bnd->add_option("--T", bp.T, "measurement gap bound");
    bnd->add_option("--B", bp.B, "connectivity window");
    bnd->add_option("--M", bp.M, "max simultaneous measurers");
    bnd->add_option("--d-max", bp.d_max, "max degree");
    bnd->add_option("--sigma", bp.sigma, "measurement noise std dev");
    bnd->add_option("--sigma-prime", bp.sigma_prime, "offset noise std dev");
    bnd->add_option("--epsilon", bp.epsilon, "stepsize exponent parameter")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9));
    bnd->add_option("--hitting-time", bp.hitting_time, "max hitting time H");
    bnd->add_option("--z1", bp.z1, "initial variance Z(1)");
    bnd->add_option("--t", bound_ts, "times at which to evaluate the bounds");
    bnd->add_option("--format", bound_format, "table|json")->check(CLI::IsMember({"table", "json"}));

    // verify
    auto* ver = app.add_subcommand("verify", "run the self-verification suite");
    std::string check_name = "all";
    checks::CheckOptions copt;
    auto names = checks::check_names();
    names.push_back("all");
    ver->add_option("--check", check_name, "check to run (default all)")
        ->check(CLI::IsMember(names));
    ver->add_option("--max-n", copt.max_n, "graph size cap for spectral_bound");
    ver->add_option("--cases", copt.cases, "fuzz cases");
    ver->add_option("--graphs", copt.graphs, "random graphs for sieve_bound");
    ver->add_option("--instances", copt.instances, "instances for one_step_decrease");
    ver->add_option("--draws", copt.draws, "Monte Carlo draws per instance");
    ver->add_option("--horizon", copt.horizon, "recursion grid horizon");
    ver->add_option("--seed", copt.seed, "seed for randomized checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // usage error
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim, sim_flags);
        if (sweep->parsed()) return cmd_sweep(sweep, sweep_flags, n_list);
        if (ana->parsed())
            return cmd_analyze(ana_family, ana_n, ana_rows, ana_cols, ana_file, ana_measuring,
                               ana_format);
        if (bnd->parsed()) return cmd_bound(bp, bound_ts, bound_format);
        if (ver->parsed()) return cmd_verify(check_name, copt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
