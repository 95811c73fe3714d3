#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "lno/augment.hpp"
#include "lno/boundary.hpp"
#include "lno/errors.hpp"
#include "lno/model.hpp"
#include "lno/ops.hpp"
#include "lno/trajectory.hpp"

namespace lno {

struct TrainSchedule {
    std::size_t iterations = 100000;
    double lr0 = 1e-3;
    double decay = 0.7;
    std::size_t decay_interval = 10000;
    std::size_t rollout = 10;
    std::size_t batch = 4;
    std::size_t log_every = 100;
    std::size_t checkpoint_every = 0; ///< 0 disables periodic checkpoints
    double divergence_factor = 1e3;
    bool augment = true;

    double lr(std::size_t iteration) const {
        return lr0 * std::pow(decay, double(iteration / decay_interval));
    }

    void validate() const {
        if (iterations == 0 || rollout == 0 || batch == 0 || decay_interval == 0 || log_every == 0)
            throw ShapeError("training schedule counts must be positive");
        if (!(lr0 > 0.0) || !(decay > 0.0)) throw ShapeError("learning rate and decay must be positive");
    }
};

class Adam {
  public:
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    /// One bias-corrected update from the accumulated gradients.
    void step(const std::vector<WeightTensor*>& params, double lr) {
        if (m_.empty()) {
            for (const WeightTensor* w : params) {
                m_.emplace_back(w->count(), 0.0);
                v_.emplace_back(w->count(), 0.0);
            }
        }
        if (m_.size() != params.size()) throw ShapeError("Adam: parameter list changed between steps");
        ++t_;
        const double c1 = 1.0 - std::pow(beta1, double(t_));
        const double c2 = 1.0 - std::pow(beta2, double(t_));
        for (std::size_t p = 0; p < params.size(); ++p) {
            WeightTensor& w = *params[p];
            if (!w.requires_grad) continue;
            for (std::size_t i = 0; i < w.values.size(); ++i) {
                const double g = w.grad[i];
                m_[p][i] = beta1 * m_[p][i] + (1.0 - beta1) * g;
                v_[p][i] = beta2 * v_[p][i] + (1.0 - beta2) * g * g;
                w.values[i] -= lr * (m_[p][i] / c1) / (std::sqrt(v_[p][i] / c2) + eps);
            }
        }
    }

    std::size_t steps() const noexcept { return t_; }

  private:
    std::size_t t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

struct Window {
    GridField start;
    std::vector<GridField> targets;
    std::size_t trajectory = 0;
    std::size_t offset = 0;
    Symmetry symmetry = Symmetry::Identity;
};

/// Velocity-like data transforms its two channels as a vector; wave (p, p_t) does not.
inline bool has_vector_channels(const Trajectory& t) {
    return t.size() > 0 && t[0].rank() == 2 && t[0].channels() == 2 && t.equation != "wave";
}

/// Uniform trajectory, start frame and (2-D only) symmetry.
inline Window sample_window(const std::vector<Trajectory>& data, std::size_t rollout, std::mt19937_64& rng,
                            bool augment_2d = true) {
    std::vector<std::size_t> usable;
    for (std::size_t k = 0; k < data.size(); ++k)
        if (data[k].size() > rollout) usable.push_back(k);
    if (usable.empty())
        throw ShapeError("dataset has no trajectory with more than " + std::to_string(rollout) + " frames");
    Window w;
    w.trajectory = usable[std::uniform_int_distribution<std::size_t>(0, usable.size() - 1)(rng)];
    const Trajectory& t = data[w.trajectory];
    w.offset = std::uniform_int_distribution<std::size_t>(0, t.size() - 1 - rollout)(rng);
    if (augment_2d && t[0].rank() == 2)
        w.symmetry = kAllSymmetries[std::uniform_int_distribution<std::size_t>(0, 7)(rng)];
    const bool vec = has_vector_channels(t);
    w.start = augment(t[w.offset], w.symmetry, vec);
    for (std::size_t k = 1; k <= rollout; ++k) w.targets.push_back(augment(t[w.offset + k], w.symmetry, vec));
    return w;
}

/// (1/K) sum_k meanL2(prediction_k, target_k) over a K-step recurrent rollout.
inline Var rollout_loss(Tape& tape, const LnoModel& model, const GridField& start,
                        const std::vector<GridField>& targets, const BoundarySpec& spec) {
    if (targets.empty()) throw ShapeError("rollout loss needs at least one target");
    Var state = tape.input(start);
    std::vector<Var> terms;
    for (const GridField& target : targets) {
        state = march_step(tape, model, state, spec);
        terms.push_back(mean_l2(tape, state, target));
    }
    return scaled_sum(tape, terms, 1.0 / double(targets.size()));
}

inline double rollout_loss(const LnoModel& model, const GridField& start, const std::vector<GridField>& targets,
                           const BoundarySpec& spec) {
    Tape tape(false);
    return rollout_loss(tape, model, start, targets, spec)->value.values()[0];
}

struct LossRecord {
    std::size_t iteration = 0;
    double lr = 0.0;
    double loss = 0.0;
};

struct TrainResult {
    std::vector<double> losses; ///< batch-mean loss per iteration
    std::vector<LossRecord> log;
    double initial_loss = 0.0;

    /// Mean of the last `n` iteration losses.
    double tail_mean(std::size_t n = 100) const {
        if (losses.empty()) return 0.0;
        n = std::min(n, losses.size());
        return std::accumulate(losses.end() - long(n), losses.end(), 0.0) / double(n);
    }
};

struct TrainHooks {
    std::function<void(const LossRecord&)> on_log;
    std::function<void(std::size_t, const LnoModel&)> on_checkpoint;
};

/// Periodic extension each rollout step; gradients are summed over the batch.
/// Logged loss at iteration i is the mean over iterations since the previous log.
inline TrainResult train_loop(LnoModel& model, const std::vector<Trajectory>& data, const TrainSchedule& schedule,
                              std::uint64_t seed, const TrainHooks& hooks = {}) {
    schedule.validate();
    if (data.empty()) throw ShapeError("training needs at least one trajectory");
    const GridField& f0 = data.front()[0];
    if (f0.rank() != model.config().d || f0.channels() != model.config().d_u)
        throw ShapeError("dataset frames " + f0.shape_string() + " do not match the model (d=" +
                         std::to_string(model.config().d) + ", d_u=" + std::to_string(model.config().d_u) + ")");
    const BoundarySpec spec = BoundarySpec::periodic(f0.rank());
    std::mt19937_64 rng(seed);
    Adam adam;
    const auto params = model.parameters();
    TrainResult result;
    double window_sum = 0.0;
    std::size_t window_count = 0;
    for (std::size_t it = 0; it < schedule.iterations; ++it) {
        model.zero_grad();
        double batch_loss = 0.0;
        for (std::size_t b = 0; b < schedule.batch; ++b) {
            const Window w = sample_window(data, schedule.rollout, rng, schedule.augment);
            Tape tape;
            Var loss = rollout_loss(tape, model, w.start, w.targets, spec);
            const double value = loss->value.values()[0];
            if (!std::isfinite(value))
                throw NumericalError("non-finite loss at iteration " + std::to_string(it) + " (trajectory " +
                                     std::to_string(w.trajectory) + ", frame " + std::to_string(w.offset) + ")");
            tape.backward(loss);
            batch_loss += value;
        }
        batch_loss /= double(schedule.batch);
        if (it == 0) result.initial_loss = batch_loss;
        if (batch_loss > schedule.divergence_factor * result.initial_loss)
            throw NumericalError("training diverged at iteration " + std::to_string(it) + ": loss " +
                                 std::to_string(batch_loss) + " exceeds " +
                                 std::to_string(schedule.divergence_factor) + "x the initial " +
                                 std::to_string(result.initial_loss));
        const double lr = schedule.lr(it);
        adam.step(params, lr);
        result.losses.push_back(batch_loss);
        window_sum += batch_loss;
        ++window_count;
        if (it % schedule.log_every == 0 || it + 1 == schedule.iterations) {
            LossRecord rec{it, lr, window_sum / double(window_count)};
            result.log.push_back(rec);
            if (hooks.on_log) hooks.on_log(rec);
            window_sum = 0.0;
            window_count = 0;
        }
        if (schedule.checkpoint_every && (it + 1) % schedule.checkpoint_every == 0 && hooks.on_checkpoint)
            hooks.on_checkpoint(it + 1, model);
    }
    return result;
}

/// Mean over grid points of the channel-wise Euclidean error norm.
inline double mean_l2_error(const GridField& pred, const GridField& truth) {
    if (!pred.same_shape(truth))
        throw ShapeError("error metric: " + pred.shape_string() + " vs " + truth.shape_string());
    double total = 0.0;
    for (std::size_t i = 0; i < pred.points(); ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < pred.channels(); ++c) {
            const double d = pred.at(c, i) - truth.at(c, i);
            s += d * d;
        }
        total += std::sqrt(s);
    }
    return total / double(pred.points());
}

struct ErrorRow {
    double time = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
};

/// E_t for each requested time, rolling out from frame 0 of every trajectory.
inline std::vector<ErrorRow> validate_error(const LnoModel& model, const std::vector<Trajectory>& data,
                                            const std::vector<double>& times, const BoundarySpec& spec) {
    if (data.empty()) throw ShapeError("validation needs at least one trajectory");
    const double dt = data.front().dt;
    std::vector<std::size_t> steps;
    for (double t : times) {
        const double s = t / dt;
        const auto k = std::size_t(std::llround(s));
        if (t <= 0.0 || std::abs(s - double(k)) > 1e-6)
            throw ShapeError("validation time " + std::to_string(t) + " is not a positive multiple of dt=" +
                             std::to_string(dt));
        for (const Trajectory& tr : data)
            if (k >= tr.size())
                throw ShapeError("validation time " + std::to_string(t) + " is beyond the trajectory length " +
                                 std::to_string(double(tr.size() - 1) * dt));
        steps.push_back(k);
    }
    const std::size_t horizon = *std::max_element(steps.begin(), steps.end());
    std::vector<std::vector<double>> errs(times.size());
    for (const Trajectory& tr : data) {
        const Trajectory pred = rollout(model, tr[0], horizon, spec);
        for (std::size_t q = 0; q < times.size(); ++q) errs[q].push_back(mean_l2_error(pred[steps[q]], tr[steps[q]]));
    }
    std::vector<ErrorRow> rows;
    for (std::size_t q = 0; q < times.size(); ++q) {
        const double n = double(errs[q].size());
        const double mean = std::accumulate(errs[q].begin(), errs[q].end(), 0.0) / n;
        double var = 0.0;
        for (double e : errs[q]) var += (e - mean) * (e - mean);
        rows.push_back({times[q], mean, std::sqrt(var / n)});
    }
    return rows;
}

} // namespace lno
