// protocol.hpp — the learning dynamics: agent estimates, noise, stepsize,
// measurement schedule, and the two equivalent forms of the update.
//
// n agents hold estimates v_i(t) in R^l of an unknown target mu. Per step,
// a non-measuring agent nudges its estimate toward noisy neighbor offsets:
//   v_i(t+1) = v_i(t) + (delta/4) * sum_{j in N_i} o_ij / max(d_i, d_j),
//   o_ij = v_j - v_i + w_ij,
// and a measuring agent additionally adds (delta/4) * (mu + w_i - v_i).
//
// Noise-draw order (the contract that lets the direct and matrix-form
// updates consume identical streams): offset draws first, agents in index
// order and neighbors in ascending order within an agent; then measurement
// draws for measuring agents in index order. Each draw is an l-vector with
// entries drawn in index order. sigma' = 0 skips the offset phase entirely,
// sigma = 0 skips the measurement phase. With symmetric_offset enabled,
// w_ji for j > i is set to -w_ij and consumes no draw.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netlearn/graph.hpp"
#include "netlearn/linalg.hpp"
#include "netlearn/rng.hpp"

namespace netlearn {

struct StepsizeSchedule {
    double epsilon; // in (0,1)
    double offset;  // >= 0; delta(t) = 1/(t+offset)^(1-epsilon)

    StepsizeSchedule(double eps, double off);
};

double stepsize(const StepsizeSchedule& sched, std::int64_t t);

enum class NoiseDistribution { gaussian, uniform, rademacher };

NoiseDistribution parse_distribution(const std::string& name);
std::string distribution_name(NoiseDistribution d);

// Zero-mean noise source with per-entry std sigma (measurements) and
// sigma_prime (neighbor offsets). All distributions are scaled to the
// requested variance. Owns its stream; value semantics.
class NoiseModel {
public:
    NoiseModel(double sigma, double sigma_prime, NoiseDistribution dist, std::uint64_t seed,
               bool symmetric_offset = false)
        : sigma_(sigma), sigma_prime_(sigma_prime), dist_(dist), symmetric_offset_(symmetric_offset),
          rng_(seed) {}
    NoiseModel(double sigma, double sigma_prime, NoiseDistribution dist, Rng rng,
               bool symmetric_offset = false)
        : sigma_(sigma), sigma_prime_(sigma_prime), dist_(dist), symmetric_offset_(symmetric_offset),
          rng_(rng) {}

    double sigma() const { return sigma_; }
    double sigma_prime() const { return sigma_prime_; }
    bool symmetric_offset() const { return symmetric_offset_; }

    double unit_draw(); // zero mean, unit variance under dist_
    void fill_measurement(double* out, int l);
    void fill_offset(double* out, int l);

private:
    double sigma_;
    double sigma_prime_;
    NoiseDistribution dist_;
    bool symmetric_offset_;
    Rng rng_;
};

// One step's primitive draws. offset[i][k] pairs with neighbors(i)[k];
// a cleared phase flag means "that phase was skipped (std dev 0)".
struct NoiseDraws {
    bool has_offset = false;
    bool has_measurement = false;
    std::vector<std::vector<Vec>> offset; // w_ij, per agent i then neighbor slot
    std::vector<Vec> measurement;         // w_i, indexed by node
};

NoiseDraws draw_noise(const GraphSnapshot& g, const std::vector<int>& measuring, NoiseModel& noise,
                      int l);

// Buffer-reusing variant for long runs.
void draw_noise_into(NoiseDraws& out, const GraphSnapshot& g, const std::vector<int>& measuring,
                     NoiseModel& noise, int l);

struct ProtocolState {
    Matrix v;       // n x l, row i = agent i's estimate
    std::int64_t t; // current time, >= 1

    ProtocolState(Matrix estimates, std::int64_t time) : v(std::move(estimates)), t(time) {}
    int n() const { return v.rows; }
    int l() const { return v.cols; }
};

// Noisy offset observation o_ij = v_j - v_i + w_ij (one fresh draw).
Vec observe_offset(const ProtocolState& state, int i, int j, NoiseModel& noise);

// Direct per-agent update. delta must lie in (0,1); pass allow_unit_step to
// accept delta == 1 (the decreasing-stepsize analysis requires delta < 1,
// but the t^(1/4) schedule starts there).
ProtocolState step(const ProtocolState& state, const GraphSnapshot& g,
                   const std::vector<int>& measuring, const StepsizeSchedule& sched,
                   NoiseModel& noise, const Vec& mu, bool allow_unit_step = false);

// Same update with caller-supplied primitive draws.
ProtocolState step_with_draws(const ProtocolState& state, const GraphSnapshot& g,
                              const std::vector<int>& measuring, double delta,
                              const NoiseDraws& draws, const Vec& mu,
                              bool allow_unit_step = false);

// Matrix form of the same step:
//   v(t+1) = (1-delta) v + delta A v + delta b + delta r + delta c
// with A = protocol_matrix(g, measuring), b_i = mu/4 on measuring rows,
// r_i = w_i/4 on measuring rows, c_i = (1/4) sum_j w_ij / max(d_i, d_j).
// Given identical draws this reproduces step_with_draws to rounding error;
// the two are kept as independent computation paths on purpose.
ProtocolState step_matrix_form(const ProtocolState& state, const GraphSnapshot& g,
                               const std::vector<int>& measuring, double delta,
                               const NoiseDraws& draws, const Vec& mu,
                               bool allow_unit_step = false);

// In-place core for hot loops: writes the updated estimates into out.v
// (resized as needed) and advances out.t. measuring is passed as a mask of
// size n; same arithmetic as step_with_draws.
void step_with_draws_into(const ProtocolState& state, const GraphSnapshot& g,
                          const std::vector<char>& measuring_mask, double delta,
                          const NoiseDraws& draws, const Vec& mu, ProtocolState& out,
                          bool allow_unit_step = false);

// Z(t) = sum_i |v_i(t) - mu|_2^2
double variance(const ProtocolState& state, const Vec& mu);

// max_i max_k |v_i(t)[k] - mu[k]|
double max_error(const ProtocolState& state, const Vec& mu);

// Periodic measurement schedule: S(t) = nodes when (t-1) % period == 0,
// empty otherwise. The gap bound T equals the period: strictly fewer than T
// non-measurement steps pass between successive measurement times, so
// period 1 means a measurement every step.
struct MeasurementSchedule {
    std::vector<int> nodes;
    std::int64_t period = 1;

    std::vector<int> at(std::int64_t t) const {
        return ((t - 1) % period == 0) ? nodes : std::vector<int>{};
    }
    std::int64_t gap_bound() const { return period; }          // T
    int max_simultaneous() const { return static_cast<int>(nodes.size()); } // M
};

} // namespace netlearn
