// harness.hpp — experiment orchestration: full runs, Monte Carlo trial
// aggregation, convergence-time measurement, and CSV/JSON persistence.
//
// An ExperimentConfig fully determines a run: same (config, seed) gives a
// bit-identical trajectory on one platform. Trial i draws from the stream
// seeded mix_seed(config.seed, i): box initial values first (row-major),
// then the per-step noise in the documented order.
//
// Config files are plain key-value text with [section] headers and #
// comments; every field has a stable key (see the README for the schema).
// Flags in the CLI override file values, which override defaults.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netlearn/graph.hpp"
#include "netlearn/linalg.hpp"
#include "netlearn/protocol.hpp"

namespace netlearn {

struct ExperimentConfig {
    // [graph]
    std::string graph_kind = "family"; // family | random_sequence
    std::string family = "complete";
    int n = 2;
    int rows = 0; // grid2d only
    int cols = 0;
    int b_window = 1;
    int edge_budget = 0;               // random_sequence
    std::uint64_t graph_seed = 1;      // random_sequence

    // [measurement]
    std::vector<int> measuring_nodes;  // empty = canonical node for the family
    std::int64_t period = 1;

    // [noise]
    double sigma = 1.0;
    double sigma_prime = 0.0;
    std::string distribution = "gaussian";
    bool symmetric_offset = false;

    // [stepsize]
    double epsilon = 0.75;
    double offset = 0.0;

    // [target]
    std::vector<double> mu; // empty = zeros(l)
    int l = 1;

    // [init]
    std::string init_kind = "box"; // zeros | box | matrix
    double init_lo = 0.0;
    double init_hi = 5.0;
    Matrix init_matrix; // rows x l when init_kind == matrix

    // [run]
    std::int64_t horizon = 100000;
    std::uint64_t seed = 1;
    int trials = 1;
    std::int64_t stride = 0;  // 0 = auto: max(1, horizon/10000)
    double threshold = 0.0;   // 0 = no convergence threshold
    int early_exit = -1;      // -1 auto (on iff threshold set), 0 off, 1 on

    void validate() const;

    int node_count() const; // resolves grid rows*cols
    std::vector<int> resolved_measuring() const;
    Vec resolved_mu() const;
    std::int64_t resolved_stride() const;
    bool resolved_early_exit() const;

    GraphSequence build_sequence() const;

    // Canonical "key = value" text of the fully resolved config; the digest
    // is FNV-1a 64 over it, printed as 16 hex digits.
    std::string canonical_text() const;
    std::string digest() const;
};

// Parse a config file into cfg (unknown sections/keys are rejected).
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

struct TrajectoryPoint {
    std::int64_t t;
    double z;
    double err;
};

struct RunResult {
    std::vector<TrajectoryPoint> trajectory; // t = 1, multiples of stride, final t
    std::int64_t final_t = 0;
    double final_z = 0.0;
    double final_err = 0.0;
    std::optional<std::int64_t> convergence_time; // first t with err < threshold
    std::uint64_t seed = 0;       // the derived trial seed actually used
    std::string config_digest;
    bool unit_step_used = false;  // stepsize hit 1 at t=1 (offset 0)
};

RunResult run(const ExperimentConfig& cfg);                    // trial 0
RunResult run_trial(const ExperimentConfig& cfg, int trial);

struct TrialAggregate {
    std::vector<std::int64_t> ts;
    Vec z_mean, z_se;     // standard error of the mean, sample-stddev based
    Vec err_mean, err_se;
    std::vector<std::optional<std::int64_t>> convergence_times; // per trial
    int trials = 0;
    std::string config_digest;
};

// Runs cfg.trials independent trials (concurrently; the reduction is in
// trial order, so the aggregate is deterministic in the master seed).
// Early exit is disabled so all trials share the sampled-t grid.
// trial_offset shifts the per-trial seed indices, so an aggregate over 2k
// trials equals the merge of the [0,k) and [k,2k) aggregates.
TrialAggregate monte_carlo(const ExperimentConfig& cfg, int trial_offset = 0);

// Exact mean/SE merge of two aggregates over the same t grid.
TrialAggregate merge(const TrialAggregate& a, const TrialAggregate& b);

// Per-trial convergence times with early exit enabled; threshold must be
// set. The convergence check runs every step regardless of stride.
std::vector<std::optional<std::int64_t>> convergence_times(const ExperimentConfig& cfg);

// First t (checked every step) with inf-error below threshold, for trial 0.
std::optional<std::int64_t> convergence_time(const ExperimentConfig& cfg, double threshold);

// CSV schema: `t,Z,max_err` per run, `t,Z_mean,Z_se,err_mean,err_se,trials`
// for aggregates; floats with 17 significant digits; leading `#` comment
// lines carry the config echo and digest. JSON mirrors the data with a
// `config` echo block including every resolved default.
void export_csv(const RunResult& r, const ExperimentConfig& cfg, const std::string& path);
void export_csv(const TrialAggregate& a, const ExperimentConfig& cfg, const std::string& path);
void export_json(const RunResult& r, const ExperimentConfig& cfg, const std::string& path);
void export_json(const TrialAggregate& a, const ExperimentConfig& cfg, const std::string& path);

// Round-trip reader for per-run CSV files (comments skipped).
std::vector<TrajectoryPoint> read_trajectory_csv(const std::string& path);

} // namespace netlearn
