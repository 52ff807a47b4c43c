// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "lapnet/common.hpp"
#include "lapnet/tape.hpp"

namespace lapnet {

// Standard Gumbel variate from a uniform draw in (0, 1).
inline double gumbel_from_uniform(double u) { return -std::log(-std::log(u)); }

// Instrumentation: how many noise vectors have been drawn since the last
// reset. Lets contract tests prove a code path never touched this module.
inline std::uint64_t& gumbel_draw_count() {
    static std::uint64_t count = 0;
    return count;
}

inline std::vector<double> sample_gumbel(std::size_t count, Rng& rng) {
    require(count >= 1, "sample_gumbel needs count >= 1");
    ++gumbel_draw_count();
    std::vector<double> g(count);
    for (double& v : g) v = gumbel_from_uniform(rng.uniform_open01());
    return g;
}

// argmax with lowest-index tie break.
inline std::size_t argmax_index(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

// Hard categorical sample: argmax_i(log_probs_i + noise_i).
inline std::size_t gumbel_max_select(const std::vector<double>& log_probs,
                                     const std::vector<double>& noise) {
    if (log_probs.size() != noise.size() || log_probs.size() < 2)
        throw DimensionError("gumbel_max_select needs congruent vectors, length >= 2");
    std::vector<double> perturbed(log_probs.size());
    for (std::size_t i = 0; i < perturbed.size(); ++i)
        perturbed[i] = log_probs[i] + noise[i];
    return argmax_index(perturbed);
}

// Tempered softmax over the perturbed logits. The differentiable surrogate of
// the hard sample above: low temperature concentrates on the argmax, high
// temperature flattens toward uniform.
inline std::vector<double> gumbel_softmax_relax(const std::vector<double>& log_probs,
                                                const std::vector<double>& noise,
                                                double temperature) {
    if (log_probs.size() != noise.size())
        throw DimensionError("gumbel_softmax_relax needs congruent vectors");
    require(temperature > 0.0, "gumbel_softmax_relax needs temperature > 0");
    std::vector<double> scaled(log_probs.size());
    for (std::size_t i = 0; i < scaled.size(); ++i)
        scaled[i] = (log_probs[i] + noise[i]) / temperature;
    return Tape::softmax_values(scaled);
}

// Tape version: same value, recorded for backward w.r.t. log_probs.
inline TensorRef gumbel_softmax_relax(Tape& tape, TensorRef log_probs,
                                      const std::vector<double>& noise,
                                      double temperature) {
    require(temperature > 0.0, "gumbel_softmax_relax needs temperature > 0");
    const auto& lp = tape.values(log_probs);
    if (lp.size() != noise.size())
        throw DimensionError("gumbel_softmax_relax needs congruent vectors");
    TensorRef shifted = tape.add(log_probs, tape.constant(noise));
    TensorRef scaled = tape.mul(shifted, tape.fill(tape.shape(log_probs), 1.0 / temperature));
    return tape.softmax(scaled);
}

// Forward emits the hard one-hot exactly; backward is the relaxed vector's
// Jacobian. Both must come from the same noise draw, enforced by the argmax
// precondition.
inline TensorRef straight_through(Tape& tape, const std::vector<double>& hard_one_hot,
                                  TensorRef relaxed) {
    const auto& soft = tape.values(relaxed);
    if (hard_one_hot.size() != soft.size())
        throw DimensionError("straight_through size mismatch");
    std::size_t hot = argmax_index(hard_one_hot);
    if (hard_one_hot[hot] != 1.0)
        throw ContractError("straight_through expects a one-hot hard sample");
    if (argmax_index(soft) != hot)
        throw ContractError("straight_through hard/relaxed argmax mismatch");
    return tape.value_override(relaxed, hard_one_hot);
}

inline std::vector<double> one_hot(std::size_t index, std::size_t size) {
    std::vector<double> v(size, 0.0);
    v[index] = 1.0;
    return v;
}

// Exponential per-epoch annealing with a floor: tau(e) = max(floor, tau0 * exp(-rate * e)).
struct TemperatureSchedule {
    double initial = 5.0;
    double floor = 0.1;
    double rate = 0.0;

    double at(std::size_t epoch) const {
        double tau = initial * std::exp(-rate * static_cast<double>(epoch));
        return tau < floor ? floor : tau;
    }

    // Rate such that tau(final_epoch) lands exactly on the floor.
    static TemperatureSchedule reach_floor_at(double initial, double floor,
                                              std::size_t final_epoch) {
        require(initial > 0.0 && floor > 0.0 && initial >= floor,
                "temperature schedule needs initial >= floor > 0");
        TemperatureSchedule s;
        s.initial = initial;
        s.floor = floor;
        s.rate = final_epoch == 0 ? 0.0
                                  : std::log(initial / floor) / static_cast<double>(final_epoch);
        return s;
    }
};

inline double temperature_at(const TemperatureSchedule& schedule, std::size_t epoch) {
    return schedule.at(epoch);
}

}  // namespace lapnet
