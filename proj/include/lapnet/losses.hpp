// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "lapnet/tape.hpp"

namespace lapnet {

// Recognition loss for one frame: -log c_t[y_t].
inline TensorRef loss_cls(Tape& tape, TensorRef class_probs, std::size_t label) {
    return tape.cross_entropy(class_probs, static_cast<int>(label));
}

// Future action loss: mean over prediction steps of -log c~_{t+i}[y_{t+i}].
inline TensorRef loss_pre(Tape& tape, const std::vector<TensorRef>& class_probs,
                          const std::vector<std::size_t>& labels) {
    if (class_probs.size() != labels.size())
        throw DimensionError("loss_pre needs one label per prediction step");
    std::vector<TensorRef> terms;
    terms.reserve(class_probs.size());
    for (std::size_t i = 0; i < class_probs.size(); ++i)
        terms.push_back(tape.cross_entropy(class_probs[i], static_cast<int>(labels[i])));
    return tape.mean_rows(terms);
}

// Combined objective: L_cls + balance * L_pre.
inline TensorRef total_loss(Tape& tape, TensorRef l_cls, TensorRef l_pre, double balance) {
    require(balance >= 0.0, "loss balance factor must be non-negative");
    return tape.add(l_cls, tape.mul(l_pre, tape.scalar(balance)));
}

struct LossReport {
    double cls = 0.0;
    double pre = 0.0;
    double balance = 1.0;
    double total = 0.0;
};

}  // namespace lapnet
