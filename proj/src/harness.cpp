#include "netlearn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace netlearn {

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt17(v[i]);
    }
    return s;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

int ExperimentConfig::node_count() const {
    if (graph_kind == "family" && family == "grid2d" && rows > 0 && cols > 0) return rows * cols;
    return n;
}

std::vector<int> ExperimentConfig::resolved_measuring() const {
    if (!measuring_nodes.empty()) {
        auto m = measuring_nodes;
        std::sort(m.begin(), m.end());
        m.erase(std::unique(m.begin(), m.end()), m.end());
        return m;
    }
    if (graph_kind == "family")
        return {canonical_measuring_node(parse_family(family), node_count())};
    return {0};
}

Vec ExperimentConfig::resolved_mu() const {
    if (mu.empty()) return Vec(static_cast<std::size_t>(l), 0.0);
    return mu;
}

std::int64_t ExperimentConfig::resolved_stride() const {
    if (stride > 0) return stride;
    return std::max<std::int64_t>(1, horizon / 10000);
}

bool ExperimentConfig::resolved_early_exit() const {
    if (early_exit >= 0) return early_exit != 0;
    return threshold > 0.0;
}

GraphSequence ExperimentConfig::build_sequence() const {
    if (graph_kind == "family") {
        const GraphFamily f = parse_family(family);
        GraphSnapshot g = (f == GraphFamily::grid2d && rows > 0 && cols > 0)
                              ? generate_grid(rows, cols)
                              : generate(f, n);
        return GraphSequence::constant(std::move(g), b_window);
    }
    if (graph_kind == "random_sequence")
        return random_sequence(n, b_window, edge_budget, graph_seed);
    throw std::invalid_argument("unknown graph.kind: " + graph_kind);
}

void ExperimentConfig::validate() const {
    if (horizon < 1) throw std::invalid_argument("config: run.horizon must be >= 1");
    if (trials < 1) throw std::invalid_argument("config: run.trials must be >= 1");
    if (period < 1) throw std::invalid_argument("config: measurement.period must be >= 1");
    if (sigma < 0.0 || sigma_prime < 0.0) throw std::invalid_argument("config: noise std devs must be >= 0");
    if (l < 1) throw std::invalid_argument("config: target.l must be >= 1");
    if (!mu.empty() && static_cast<int>(mu.size()) != l)
        throw std::invalid_argument("config: target.mu length must equal target.l");
    if (threshold < 0.0) throw std::invalid_argument("config: run.threshold must be >= 0");
    if (init_kind != "zeros" && init_kind != "box" && init_kind != "matrix")
        throw std::invalid_argument("config: init.kind must be zeros|box|matrix");
    if (init_kind == "box" && !(init_hi >= init_lo))
        throw std::invalid_argument("config: init box needs hi >= lo");
    StepsizeSchedule check_sched(epsilon, offset); // validates epsilon/offset
    (void)check_sched;
    parse_distribution(distribution);

    const int nn = node_count();
    if (init_kind == "matrix" && (init_matrix.rows != nn || init_matrix.cols != l))
        throw std::invalid_argument("config: init.matrix must be n x l");
    for (int i : resolved_measuring())
        if (i < 0 || i >= nn)
            throw std::invalid_argument("config: measuring node " + std::to_string(i) + " out of range");
    if (graph_kind == "random_sequence") {
        if (b_window < 1) throw std::invalid_argument("config: graph.b_window must be >= 1");
        if (edge_budget < nn - 1)
            throw std::invalid_argument("config: graph.edge_budget must be >= n-1");
    }
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream out;
    out << "graph.kind = " << graph_kind << "\n";
    out << "graph.family = " << family << "\n";
    out << "graph.n = " << node_count() << "\n";
    out << "graph.rows = " << rows << "\n";
    out << "graph.cols = " << cols << "\n";
    out << "graph.b_window = " << b_window << "\n";
    out << "graph.edge_budget = " << edge_budget << "\n";
    out << "graph.seed = " << graph_seed << "\n";
    out << "measurement.nodes = " << join_ints(resolved_measuring()) << "\n";
    out << "measurement.period = " << period << "\n";
    out << "noise.sigma = " << fmt17(sigma) << "\n";
    out << "noise.sigma_prime = " << fmt17(sigma_prime) << "\n";
    out << "noise.distribution = " << distribution << "\n";
    out << "noise.symmetric_offset = " << (symmetric_offset ? "true" : "false") << "\n";
    out << "stepsize.epsilon = " << fmt17(epsilon) << "\n";
    out << "stepsize.offset = " << fmt17(offset) << "\n";
    out << "target.mu = " << join_doubles(resolved_mu()) << "\n";
    out << "target.l = " << l << "\n";
    out << "init.kind = " << init_kind << "\n";
    out << "init.lo = " << fmt17(init_lo) << "\n";
    out << "init.hi = " << fmt17(init_hi) << "\n";
    if (init_kind == "matrix") {
        out << "init.matrix = ";
        for (int i = 0; i < init_matrix.rows; ++i) {
            if (i) out << ";";
            for (int k = 0; k < init_matrix.cols; ++k) {
                if (k) out << ",";
                out << fmt17(init_matrix(i, k));
            }
        }
        out << "\n";
    }
    out << "run.horizon = " << horizon << "\n";
    out << "run.seed = " << seed << "\n";
    out << "run.trials = " << trials << "\n";
    out << "run.stride = " << resolved_stride() << "\n";
    out << "run.threshold = " << fmt17(threshold) << "\n";
    out << "run.early_exit = " << (resolved_early_exit() ? "true" : "false") << "\n";
    return out.str();
}

std::string ExperimentConfig::digest() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_text())));
    return buf;
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "graph.kind") cfg.graph_kind = val;
        else if (key == "graph.family") cfg.family = val;
        else if (key == "graph.n") cfg.n = std::stoi(val);
        else if (key == "graph.rows") cfg.rows = std::stoi(val);
        else if (key == "graph.cols") cfg.cols = std::stoi(val);
        else if (key == "graph.b_window") cfg.b_window = std::stoi(val);
        else if (key == "graph.edge_budget") cfg.edge_budget = std::stoi(val);
        else if (key == "graph.seed") cfg.graph_seed = std::stoull(val);
        else if (key == "measurement.nodes") cfg.measuring_nodes = parse_int_list(val);
        else if (key == "measurement.period") cfg.period = std::stoll(val);
        else if (key == "noise.sigma") cfg.sigma = std::stod(val);
        else if (key == "noise.sigma_prime") cfg.sigma_prime = std::stod(val);
        else if (key == "noise.distribution") cfg.distribution = val;
        else if (key == "noise.symmetric_offset") cfg.symmetric_offset = (val == "true" || val == "1");
        else if (key == "stepsize.epsilon") cfg.epsilon = std::stod(val);
        else if (key == "stepsize.offset") cfg.offset = std::stod(val);
        else if (key == "target.mu") cfg.mu = (val == "zeros") ? std::vector<double>{} : parse_double_list(val);
        else if (key == "target.l") cfg.l = std::stoi(val);
        else if (key == "init.kind") cfg.init_kind = val;
        else if (key == "init.lo") cfg.init_lo = std::stod(val);
        else if (key == "init.hi") cfg.init_hi = std::stod(val);
        else if (key == "init.matrix") {
            std::vector<std::vector<double>> rows;
            std::stringstream rs(val);
            std::string row;
            while (std::getline(rs, row, ';')) rows.push_back(parse_double_list(row));
            if (rows.empty()) throw std::runtime_error("config: empty init.matrix");
            Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
            for (int i = 0; i < m.rows; ++i) {
                if (static_cast<int>(rows[i].size()) != m.cols)
                    throw std::runtime_error("config: ragged init.matrix");
                for (int k = 0; k < m.cols; ++k) m(i, k) = rows[i][k];
            }
            cfg.init_matrix = std::move(m);
        }
        else if (key == "run.horizon") cfg.horizon = std::stoll(val);
        else if (key == "run.seed") cfg.seed = std::stoull(val);
        else if (key == "run.trials") cfg.trials = std::stoi(val);
        else if (key == "run.stride") cfg.stride = std::stoll(val);
        else if (key == "run.threshold") cfg.threshold = std::stod(val);
        else if (key == "run.early_exit") cfg.early_exit = (val == "true" || val == "1") ? 1 : 0;
        else throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
}

namespace {

RunResult run_trial_impl(const ExperimentConfig& cfg, int trial, bool force_full_horizon) {
    cfg.validate();
    const GraphSequence seq = cfg.build_sequence();
    const int n = seq.n();
    const int l = cfg.l;
    const Vec mu = cfg.resolved_mu();
    const std::vector<int> meas_nodes = cfg.resolved_measuring();
    const std::vector<int> no_nodes;
    std::vector<char> mask_on(n, 0), mask_off(n, 0);
    for (int i : meas_nodes) mask_on[i] = 1;

    const StepsizeSchedule sched(cfg.epsilon, cfg.offset);
    const std::int64_t stride = cfg.resolved_stride();
    const bool early_exit = !force_full_horizon && cfg.resolved_early_exit();
    const double threshold = cfg.threshold;

    RunResult result;
    result.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(trial));
    result.config_digest = cfg.digest();
    result.unit_step_used = stepsize(sched, 1) >= 1.0;

    Rng rng(result.seed);
    Matrix v0(n, l);
    if (cfg.init_kind == "box") {
        for (auto& x : v0.a) x = cfg.init_lo + (cfg.init_hi - cfg.init_lo) * rng.uniform01();
    } else if (cfg.init_kind == "matrix") {
        v0 = cfg.init_matrix;
    } // zeros: already filled

    NoiseModel noise(cfg.sigma, cfg.sigma_prime, parse_distribution(cfg.distribution), rng,
                     cfg.symmetric_offset);

    const bool static_graph = (cfg.graph_kind == "family");
    const GraphSnapshot g_static = static_graph ? seq.at(1) : GraphSnapshot();

    ProtocolState cur(std::move(v0), 1);
    ProtocolState nxt(Matrix(n, l), 1);
    NoiseDraws draws;

    auto sampled = [&](std::int64_t t) { return t == 1 || t % stride == 0; };

    for (std::int64_t t = 1;; ++t) {
        const double z = variance(cur, mu);
        const double err = max_error(cur, mu);
        if (!std::isfinite(z))
            throw std::runtime_error("run: state overflowed at t=" + std::to_string(t));

        bool recorded = false;
        if (sampled(t)) {
            result.trajectory.push_back({t, z, err});
            recorded = true;
        }
        if (threshold > 0.0 && !result.convergence_time && err < threshold)
            result.convergence_time = t;

        const bool stop = (t == cfg.horizon) || (early_exit && result.convergence_time.has_value());
        if (stop) {
            if (!recorded) result.trajectory.push_back({t, z, err});
            result.final_t = t;
            result.final_z = z;
            result.final_err = err;
            break;
        }

        const GraphSnapshot g_dyn = static_graph ? GraphSnapshot() : seq.at(t);
        const GraphSnapshot& g = static_graph ? g_static : g_dyn;
        const bool measuring_now = ((t - 1) % cfg.period) == 0;
        draw_noise_into(draws, g, measuring_now ? meas_nodes : no_nodes, noise, l);
        step_with_draws_into(cur, g, measuring_now ? mask_on : mask_off, stepsize(sched, t), draws,
                             mu, nxt, /*allow_unit_step=*/true);
        std::swap(cur, nxt);
    }
    return result;
}

template <typename Fn>
void parallel_trials(int trials, Fn&& body) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(trials));
    if (workers <= 1) {
        for (int i = 0; i < trials; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::future<void>> futs;
    futs.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        futs.push_back(std::async(std::launch::async, [&]() {
            for (int i = next.fetch_add(1); i < trials; i = next.fetch_add(1)) body(i);
        }));
    }
    for (auto& f : futs) f.get();
}

} // namespace

RunResult run(const ExperimentConfig& cfg) { return run_trial_impl(cfg, 0, false); }

RunResult run_trial(const ExperimentConfig& cfg, int trial) {
    return run_trial_impl(cfg, trial, false);
}

TrialAggregate monte_carlo(const ExperimentConfig& cfg, int trial_offset) {
    cfg.validate();
    if (cfg.trials < 2) throw std::invalid_argument("monte_carlo: trials must be >= 2");

    std::vector<RunResult> results(cfg.trials);
    parallel_trials(cfg.trials,
                    [&](int i) { results[i] = run_trial_impl(cfg, trial_offset + i, true); });

    const std::size_t points = results[0].trajectory.size();
    for (const auto& r : results)
        if (r.trajectory.size() != points)
            throw std::runtime_error("monte_carlo: trials disagree on the sampled grid");

    TrialAggregate agg;
    agg.trials = cfg.trials;
    agg.config_digest = cfg.digest();
    agg.ts.resize(points);
    agg.z_mean.assign(points, 0.0);
    agg.z_se.assign(points, 0.0);
    agg.err_mean.assign(points, 0.0);
    agg.err_se.assign(points, 0.0);
    const double k = cfg.trials;
    for (std::size_t p = 0; p < points; ++p) {
        agg.ts[p] = results[0].trajectory[p].t;
        double zm = 0.0, em = 0.0;
        for (const auto& r : results) {
            zm += r.trajectory[p].z;
            em += r.trajectory[p].err;
        }
        zm /= k;
        em /= k;
        double zv = 0.0, ev = 0.0;
        for (const auto& r : results) {
            zv += (r.trajectory[p].z - zm) * (r.trajectory[p].z - zm);
            ev += (r.trajectory[p].err - em) * (r.trajectory[p].err - em);
        }
        agg.z_mean[p] = zm;
        agg.err_mean[p] = em;
        if (cfg.trials > 1) {
            agg.z_se[p] = std::sqrt(zv / (k - 1.0) / k);
            agg.err_se[p] = std::sqrt(ev / (k - 1.0) / k);
        }
    }
    agg.convergence_times.reserve(results.size());
    for (const auto& r : results) agg.convergence_times.push_back(r.convergence_time);
    return agg;
}

TrialAggregate merge(const TrialAggregate& a, const TrialAggregate& b) {
    if (a.ts != b.ts) throw std::invalid_argument("merge: aggregates have different sampled grids");
    TrialAggregate m;
    m.ts = a.ts;
    m.trials = a.trials + b.trials;
    m.config_digest = (a.config_digest == b.config_digest) ? a.config_digest : "merged";
    const double na = a.trials, nb = b.trials, nc = na + nb;
    const std::size_t points = a.ts.size();
    m.z_mean.resize(points);
    m.z_se.resize(points);
    m.err_mean.resize(points);
    m.err_se.resize(points);
    auto combine = [&](double ma, double sea, double mb, double seb, double& mc, double& sec) {
        mc = (na * ma + nb * mb) / nc;
        // sample-variance merge via sums of squared deviations
        const double m2a = sea * sea * na * std::max(na - 1.0, 0.0);
        const double m2b = seb * seb * nb * std::max(nb - 1.0, 0.0);
        const double delta = mb - ma;
        const double m2c = m2a + m2b + delta * delta * na * nb / nc;
        sec = (nc > 1.0) ? std::sqrt(m2c / (nc - 1.0) / nc) : 0.0;
    };
    for (std::size_t p = 0; p < points; ++p) {
        combine(a.z_mean[p], a.z_se[p], b.z_mean[p], b.z_se[p], m.z_mean[p], m.z_se[p]);
        combine(a.err_mean[p], a.err_se[p], b.err_mean[p], b.err_se[p], m.err_mean[p], m.err_se[p]);
    }
    m.convergence_times = a.convergence_times;
    m.convergence_times.insert(m.convergence_times.end(), b.convergence_times.begin(),
                               b.convergence_times.end());
    return m;
}

std::vector<std::optional<std::int64_t>> convergence_times(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!(cfg.threshold > 0.0))
        throw std::invalid_argument("convergence_times: run.threshold must be set");
    std::vector<std::optional<std::int64_t>> out(cfg.trials);
    parallel_trials(cfg.trials, [&](int i) { out[i] = run_trial_impl(cfg, i, false).convergence_time; });
    return out;
}

std::optional<std::int64_t> convergence_time(const ExperimentConfig& cfg, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("convergence_time: threshold must be > 0");
    ExperimentConfig c = cfg;
    c.threshold = threshold;
    return run_trial_impl(c, 0, false).convergence_time;
}

namespace {

void write_config_comments(std::ofstream& out, const ExperimentConfig& cfg) {
    out << "# config_digest = " << cfg.digest() << "\n";
    std::istringstream lines(cfg.canonical_text());
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << "\n";
}

nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    std::istringstream lines(cfg.canonical_text());
    std::string line;
    while (std::getline(lines, line)) {
        const auto eq = line.find(" = ");
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 3);
        j[key] = val;
    }
    return j;
}

} // namespace

void export_csv(const RunResult& r, const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_config_comments(out, cfg);
    out << "t,Z,max_err\n";
    for (const auto& p : r.trajectory)
        out << p.t << "," << fmt17(p.z) << "," << fmt17(p.err) << "\n";
}

void export_csv(const TrialAggregate& a, const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_config_comments(out, cfg);
    out << "t,Z_mean,Z_se,err_mean,err_se,trials\n";
    for (std::size_t p = 0; p < a.ts.size(); ++p)
        out << a.ts[p] << "," << fmt17(a.z_mean[p]) << "," << fmt17(a.z_se[p]) << ","
            << fmt17(a.err_mean[p]) << "," << fmt17(a.err_se[p]) << "," << a.trials << "\n";
}

void export_json(const RunResult& r, const ExperimentConfig& cfg, const std::string& path) {
    nlohmann::ordered_json j;
    j["kind"] = "run";
    j["config_digest"] = cfg.digest();
    j["config"] = config_json(cfg);
    j["seed_used"] = r.seed;
    j["unit_step_used"] = r.unit_step_used;
    j["columns"] = {"t", "Z", "max_err"};
    auto rows = nlohmann::ordered_json::array();
    for (const auto& p : r.trajectory) rows.push_back({p.t, p.z, p.err});
    j["trajectory"] = std::move(rows);
    j["final"] = {{"t", r.final_t}, {"Z", r.final_z}, {"max_err", r.final_err}};
    if (r.convergence_time) j["convergence_time"] = *r.convergence_time;
    else j["convergence_time"] = nullptr;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

void export_json(const TrialAggregate& a, const ExperimentConfig& cfg, const std::string& path) {
    nlohmann::ordered_json j;
    j["kind"] = "aggregate";
    j["config_digest"] = cfg.digest();
    j["config"] = config_json(cfg);
    j["trials"] = a.trials;
    j["columns"] = {"t", "Z_mean", "Z_se", "err_mean", "err_se"};
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t p = 0; p < a.ts.size(); ++p)
        rows.push_back({a.ts[p], a.z_mean[p], a.z_se[p], a.err_mean[p], a.err_se[p]});
    j["trajectory"] = std::move(rows);
    auto conv = nlohmann::ordered_json::array();
    for (const auto& c : a.convergence_times) {
        if (c) conv.push_back(*c);
        else conv.push_back(nullptr);
    }
    j["convergence_times"] = std::move(conv);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

std::vector<TrajectoryPoint> read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<TrajectoryPoint> out;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true; // column header
            continue;
        }
        long long t = 0;
        double z = 0.0, err = 0.0;
        if (std::sscanf(line.c_str(), "%lld,%lg,%lg", &t, &z, &err) == 3)
            out.push_back({static_cast<std::int64_t>(t), z, err});
    }
    return out;
}

} // namespace netlearn
