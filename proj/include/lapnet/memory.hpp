// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "lapnet/common.hpp"

namespace lapnet {

using FeatureVector = std::vector<double>;

// Chronological queue of the last `depth` observed frame features, oldest
// first. Zero-padded at stream start so the pool is always full-length.
class HistoryStack {
public:
    HistoryStack() = default;
    HistoryStack(std::size_t depth, std::size_t dim)
        : dim_(dim), entries_(depth, FeatureVector(dim, 0.0)) {}

    std::size_t depth() const { return entries_.size(); }
    std::size_t dim() const { return dim_; }
    const std::vector<FeatureVector>& entries() const { return entries_; }
    const FeatureVector& operator[](std::size_t i) const { return entries_[i]; }

    // Drop the oldest entry, append f. Only observed features belong here;
    // predictions never enter the history.
    void push(const FeatureVector& f) {
        if (f.size() != dim_) throw DimensionError("history push dimension mismatch");
        entries_.erase(entries_.begin());
        entries_.push_back(f);
    }

    void reset() {
        for (auto& e : entries_) e.assign(dim_, 0.0);
    }

private:
    std::size_t dim_ = 0;
    std::vector<FeatureVector> entries_;
};

// History followed by predicted futures: 2 * depth frames, chronological
// oldest -> newest. frames[boundary - 1] is the most recent observed frame,
// frames[boundary] the prediction for the current step. Templated so the same
// assembly serves value vectors and tape handles.
template <typename Frame>
struct FeaturePool {
    std::vector<Frame> frames;
    std::size_t boundary = 0;  // index of the first predicted frame
};

template <typename Frame>
FeaturePool<Frame> build_pool(const std::vector<Frame>& history,
                              const std::vector<Frame>& futures) {
    if (history.size() != futures.size())
        throw DimensionError("pool needs equally sized history and future stacks");
    FeaturePool<Frame> pool;
    pool.frames.reserve(history.size() + futures.size());
    pool.frames.insert(pool.frames.end(), history.begin(), history.end());
    pool.frames.insert(pool.frames.end(), futures.begin(), futures.end());
    pool.boundary = history.size();
    return pool;
}

inline FeaturePool<FeatureVector> build_pool(const HistoryStack& history,
                                             const std::vector<FeatureVector>& futures) {
    for (const auto& f : futures)
        if (f.size() != history.dim())
            throw DimensionError("pool future frame dimension mismatch");
    return build_pool(history.entries(), futures);
}

}  // namespace lapnet
