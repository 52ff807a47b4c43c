// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lapnet/gumbel.hpp"
#include "lapnet/memory.hpp"
#include "lapnet/tape.hpp"

namespace lapnet {

// Equidistant-window geometry: progression state p selects the contiguous
// window [p*s, p*s + K) over the 2*depth pool, s = floor((2*depth - K) / (P - 1)).
// State 0 is the most history-biased window, state P-1 the most future-biased.
inline std::size_t compute_stride(std::size_t depth, std::size_t window_size,
                                  std::size_t states) {
    if (states < 2) throw ConfigError("progression state count must be >= 2");
    if (window_size < 1 || window_size > 2 * depth)
        throw ConfigError("window size must be in [1, 2 * depth]");
    return (2 * depth - window_size) / (states - 1);
}

struct SamplerConfig {
    std::size_t depth = 8;        // history/future stack size
    std::size_t window_size = 7;  // frames aggregated per window
    std::size_t states = 4;       // progression state count

    std::size_t stride() const { return compute_stride(depth, window_size, states); }
    std::size_t pool_size() const { return 2 * depth; }

    void validate() const { (void)stride(); }
};

struct WindowRange {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive
    std::size_t size() const { return end - begin; }
};

inline WindowRange window_indices(std::size_t state, std::size_t stride,
                                  std::size_t window_size) {
    return WindowRange{state * stride, state * stride + window_size};
}

inline WindowRange window_indices(const SamplerConfig& cfg, std::size_t state) {
    if (state >= cfg.states) throw ConfigError("progression state out of range");
    return window_indices(state, cfg.stride(), cfg.window_size);
}

// Temporal average pooling over one window of the pool.
inline FeatureVector aggregate_window(const FeaturePool<FeatureVector>& pool,
                                      WindowRange range) {
    if (range.begin >= range.end || range.end > pool.frames.size())
        throw DimensionError("window range out of pool bounds");
    FeatureVector mean(pool.frames[range.begin].size(), 0.0);
    for (std::size_t i = range.begin; i < range.end; ++i)
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += pool.frames[i][d];
    double inv = 1.0 / static_cast<double>(range.size());
    for (double& v : mean) v *= inv;
    return mean;
}

inline TensorRef aggregate_window(Tape& tape, const FeaturePool<TensorRef>& pool,
                                  WindowRange range) {
    if (range.begin >= range.end || range.end > pool.frames.size())
        throw DimensionError("window range out of pool bounds");
    return tape.mean_rows(std::span<const TensorRef>(pool.frames.data() + range.begin,
                                                     range.size()));
}

// Supplementary feature with the straight-through gradient route: the forward
// value is the hard-selected window mean; backward sees the relaxed mixture
// sum_i relaxed_i * window_mean_i, so logits get the tempered-softmax Jacobian
// and every pool frame under any window receives its mixture share. With
// straight_through off the relaxed mixture itself is returned (the smooth
// surrogate, used by gradient verification).
inline TensorRef adaptive_supplementary(Tape& tape, const FeaturePool<TensorRef>& pool,
                                        const SamplerConfig& cfg, TensorRef relaxed,
                                        std::size_t hard_state,
                                        bool straight_through = true) {
    if (tape.values(relaxed).size() != cfg.states)
        throw DimensionError("relaxed distribution length must equal state count");
    if (hard_state >= cfg.states) throw ConfigError("hard progression state out of range");
    if (pool.frames.size() != cfg.pool_size())
        throw DimensionError("pool size does not match sampler config");
    std::vector<TensorRef> means;
    means.reserve(cfg.states);
    for (std::size_t p = 0; p < cfg.states; ++p)
        means.push_back(aggregate_window(tape, pool, window_indices(cfg, p)));
    TensorRef soft = tape.weighted_sum(relaxed, means);
    if (!straight_through) return soft;
    return tape.value_override(soft, tape.values(means[hard_state]));
}

// Fixed-window variant (adaptive sampling off): plain mean of one window, no
// relaxed distribution involved.
inline TensorRef fixed_supplementary(Tape& tape, const FeaturePool<TensorRef>& pool,
                                     const SamplerConfig& cfg, std::size_t state) {
    return aggregate_window(tape, pool, window_indices(cfg, state));
}

}  // namespace lapnet
