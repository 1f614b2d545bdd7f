#include "netlearn/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace netlearn {

StepsizeSchedule::StepsizeSchedule(double eps, double off) : epsilon(eps), offset(off) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("StepsizeSchedule: epsilon must lie in (0,1)");
    if (!(off >= 0.0)) throw std::invalid_argument("StepsizeSchedule: offset must be >= 0");
}

double stepsize(const StepsizeSchedule& sched, std::int64_t t) {
    if (t < 1) throw std::invalid_argument("stepsize: t must be >= 1");
    const double base = static_cast<double>(t) + sched.offset;
    return std::pow(base, -(1.0 - sched.epsilon));
}

NoiseDistribution parse_distribution(const std::string& name) {
    if (name == "gaussian") return NoiseDistribution::gaussian;
    if (name == "uniform") return NoiseDistribution::uniform;
    if (name == "rademacher") return NoiseDistribution::rademacher;
    throw std::invalid_argument("unknown noise distribution: " + name);
}

std::string distribution_name(NoiseDistribution d) {
    switch (d) {
        case NoiseDistribution::gaussian: return "gaussian";
        case NoiseDistribution::uniform: return "uniform";
        case NoiseDistribution::rademacher: return "rademacher";
    }
    return "?";
}

double NoiseModel::unit_draw() {
    switch (dist_) {
        case NoiseDistribution::gaussian: return rng_.gaussian();
        case NoiseDistribution::uniform:
            // uniform on +/- sqrt(3): zero mean, unit variance
            return (2.0 * rng_.uniform01() - 1.0) * 1.7320508075688772;
        case NoiseDistribution::rademacher: return rng_.rademacher();
    }
    return 0.0;
}

void NoiseModel::fill_measurement(double* out, int l) {
    for (int k = 0; k < l; ++k) out[k] = sigma_ * unit_draw();
}

void NoiseModel::fill_offset(double* out, int l) {
    for (int k = 0; k < l; ++k) out[k] = sigma_prime_ * unit_draw();
}

namespace {

std::vector<char> measuring_mask(int n, const std::vector<int>& measuring, const char* what) {
    std::vector<char> mask(n, 0);
    for (int i : measuring) {
        if (i < 0 || i >= n)
            throw std::invalid_argument(std::string(what) + ": measuring node " + std::to_string(i) +
                                        " out of range");
        mask[i] = 1;
    }
    return mask;
}

void check_delta(double delta, bool allow_unit_step, const char* what) {
    const bool ok = delta > 0.0 && (delta < 1.0 || (allow_unit_step && delta <= 1.0));
    if (!ok)
        throw std::invalid_argument(std::string(what) + ": stepsize " + std::to_string(delta) +
                                    " outside (0,1)");
}

} // namespace

void draw_noise_into(NoiseDraws& out, const GraphSnapshot& g, const std::vector<int>& measuring,
                     NoiseModel& noise, int l) {
    const int n = g.n();
    const auto mask = measuring_mask(n, measuring, "draw_noise");

    out.has_offset = noise.sigma_prime() > 0.0;
    if (out.has_offset) {
        out.offset.resize(n);
        for (int i = 0; i < n; ++i) {
            const auto& nb = g.neighbors(i);
            out.offset[i].resize(nb.size());
            for (std::size_t k = 0; k < nb.size(); ++k) {
                Vec& w = out.offset[i][k];
                w.resize(l);
                if (noise.symmetric_offset() && nb[k] < i) {
                    // reverse direction already drawn; reuse its negation
                    const auto& nbj = g.neighbors(nb[k]);
                    const std::size_t slot =
                        std::lower_bound(nbj.begin(), nbj.end(), i) - nbj.begin();
                    const Vec& wji = out.offset[nb[k]][slot];
                    for (int c = 0; c < l; ++c) w[c] = -wji[c];
                } else {
                    noise.fill_offset(w.data(), l);
                }
            }
        }
    }

    out.has_measurement = noise.sigma() > 0.0 && !measuring.empty();
    if (out.has_measurement) {
        out.measurement.resize(n);
        for (int i = 0; i < n; ++i) {
            if (!mask[i]) {
                out.measurement[i].clear();
                continue;
            }
            out.measurement[i].resize(l);
            noise.fill_measurement(out.measurement[i].data(), l);
        }
    }
}

NoiseDraws draw_noise(const GraphSnapshot& g, const std::vector<int>& measuring, NoiseModel& noise,
                      int l) {
    NoiseDraws d;
    draw_noise_into(d, g, measuring, noise, l);
    return d;
}

Vec observe_offset(const ProtocolState& state, int i, int j, NoiseModel& noise) {
    const int n = state.n();
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
        throw std::invalid_argument("observe_offset: bad node pair");
    const int l = state.l();
    Vec o(static_cast<std::size_t>(l));
    for (int k = 0; k < l; ++k) o[k] = state.v(j, k) - state.v(i, k);
    if (noise.sigma_prime() > 0.0) {
        Vec w(static_cast<std::size_t>(l));
        noise.fill_offset(w.data(), l);
        for (int k = 0; k < l; ++k) o[k] += w[k];
    }
    return o;
}

void step_with_draws_into(const ProtocolState& state, const GraphSnapshot& g,
                          const std::vector<char>& measuring_mask, double delta,
                          const NoiseDraws& draws, const Vec& mu, ProtocolState& out,
                          bool allow_unit_step) {
    const int n = state.n();
    const int l = state.l();
    if (g.n() != n) throw std::invalid_argument("step: graph size does not match state");
    if (static_cast<int>(mu.size()) != l) throw std::invalid_argument("step: mu dimension mismatch");
    if (static_cast<int>(measuring_mask.size()) != n)
        throw std::invalid_argument("step: mask size mismatch");
    check_delta(delta, allow_unit_step, "step");

    out.v.rows = n;
    out.v.cols = l;
    out.v.a.resize(static_cast<std::size_t>(n) * l);

    const double quarter = 0.25 * delta;
    for (int i = 0; i < n; ++i) {
        const auto& nb = g.neighbors(i);
        const auto& w = g.inv_max_degree(i);
        for (int k = 0; k < l; ++k) out.v(i, k) = state.v(i, k);
        for (std::size_t s = 0; s < nb.size(); ++s) {
            const int j = nb[s];
            const double coeff = quarter * w[s];
            if (draws.has_offset) {
                const Vec& wij = draws.offset[i][s];
                for (int k = 0; k < l; ++k)
                    out.v(i, k) += coeff * (state.v(j, k) - state.v(i, k) + wij[k]);
            } else {
                for (int k = 0; k < l; ++k)
                    out.v(i, k) += coeff * (state.v(j, k) - state.v(i, k));
            }
        }
        if (measuring_mask[i]) {
            const Vec* wi = (draws.has_measurement && !draws.measurement[i].empty())
                                ? &draws.measurement[i]
                                : nullptr;
            for (int k = 0; k < l; ++k) {
                const double sample = mu[k] + (wi ? (*wi)[k] : 0.0);
                out.v(i, k) += quarter * (sample - state.v(i, k));
            }
        }
    }
    out.t = state.t + 1;
}

ProtocolState step_with_draws(const ProtocolState& state, const GraphSnapshot& g,
                              const std::vector<int>& measuring, double delta,
                              const NoiseDraws& draws, const Vec& mu, bool allow_unit_step) {
    const auto mask = measuring_mask(state.n(), measuring, "step");
    ProtocolState out(Matrix(state.n(), state.l()), state.t);
    step_with_draws_into(state, g, mask, delta, draws, mu, out, allow_unit_step);
    return out;
}

ProtocolState step(const ProtocolState& state, const GraphSnapshot& g,
                   const std::vector<int>& measuring, const StepsizeSchedule& sched,
                   NoiseModel& noise, const Vec& mu, bool allow_unit_step) {
    const double delta = stepsize(sched, state.t);
    check_delta(delta, allow_unit_step, "step");
    const NoiseDraws draws = draw_noise(g, measuring, noise, state.l());
    return step_with_draws(state, g, measuring, delta, draws, mu, allow_unit_step);
}

ProtocolState step_matrix_form(const ProtocolState& state, const GraphSnapshot& g,
                               const std::vector<int>& measuring, double delta,
                               const NoiseDraws& draws, const Vec& mu, bool allow_unit_step) {
    const int n = state.n();
    const int l = state.l();
    if (g.n() != n) throw std::invalid_argument("step_matrix_form: graph size does not match state");
    if (static_cast<int>(mu.size()) != l)
        throw std::invalid_argument("step_matrix_form: mu dimension mismatch");
    check_delta(delta, allow_unit_step, "step_matrix_form");
    const auto mask = measuring_mask(n, measuring, "step_matrix_form");

    const Matrix a = protocol_matrix(g, measuring).m;

    Matrix out(n, l);
    Vec x(static_cast<std::size_t>(n));
    for (int col = 0; col < l; ++col) {
        for (int i = 0; i < n; ++i) x[i] = state.v(i, col);
        const Vec ax = matvec(a, x);
        for (int i = 0; i < n; ++i) {
            double next = (1.0 - delta) * x[i] + delta * ax[i];
            if (mask[i]) {
                next += delta * 0.25 * mu[col]; // deterministic sample pull
                if (draws.has_measurement && !draws.measurement[i].empty())
                    next += delta * 0.25 * draws.measurement[i][col]; // measurement noise
            }
            if (draws.has_offset) {
                const auto& w = g.inv_max_degree(i);
                double c = 0.0;
                for (std::size_t s = 0; s < w.size(); ++s) c += draws.offset[i][s][col] * w[s];
                next += delta * 0.25 * c; // aggregated offset noise
            }
            out(i, col) = next;
        }
    }
    return ProtocolState(std::move(out), state.t + 1);
}

double variance(const ProtocolState& state, const Vec& mu) {
    if (static_cast<int>(mu.size()) != state.l())
        throw std::invalid_argument("variance: mu dimension mismatch");
    double z = 0.0;
    for (int i = 0; i < state.n(); ++i)
        for (int k = 0; k < state.l(); ++k) {
            const double d = state.v(i, k) - mu[k];
            z += d * d;
        }
    return z;
}

double max_error(const ProtocolState& state, const Vec& mu) {
    if (static_cast<int>(mu.size()) != state.l())
        throw std::invalid_argument("max_error: mu dimension mismatch");
    double e = 0.0;
    for (int i = 0; i < state.n(); ++i)
        for (int k = 0; k < state.l(); ++k)
            e = std::max(e, std::fabs(state.v(i, k) - mu[k]));
    return e;
}

} // namespace netlearn
