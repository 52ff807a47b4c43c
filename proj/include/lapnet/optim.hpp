// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lapnet/tensor.hpp"

namespace lapnet {

// Bias-corrected adaptive-moment optimizer with decoupled weight decay.
// Moment slots are bound to parameters by registration order.
class AdamOptimizer {
public:
    struct Settings {
        double learning_rate = 0.0005;
        double weight_decay = 0.001;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double epsilon = 1e-8;
    };

    struct Slot {
        std::vector<double> m;
        std::vector<double> v;
    };

    AdamOptimizer() = default;
    explicit AdamOptimizer(Settings s) : settings_(s) {}

    void attach(const std::vector<Tensor*>& params) {
        params_ = params;
        slots_.clear();
        slots_.reserve(params_.size());
        for (Tensor* p : params_) {
            require(p->requires_grad, "optimizer parameters must require grad");
            slots_.push_back({std::vector<double>(p->size(), 0.0),
                              std::vector<double>(p->size(), 0.0)});
        }
        step_count_ = 0;
    }

    const Settings& settings() const { return settings_; }
    std::uint64_t step_count() const { return step_count_; }
    std::vector<Slot>& slots() { return slots_; }
    const std::vector<Slot>& slots() const { return slots_; }

    // Restores moments and the step counter (checkpoint resume).
    void restore(std::vector<Slot> slots, std::uint64_t step_count) {
        require(slots.size() == params_.size(), "optimizer slot count mismatch");
        for (std::size_t i = 0; i < slots.size(); ++i)
            require(slots[i].m.size() == params_[i]->size() &&
                        slots[i].v.size() == params_[i]->size(),
                    "optimizer slot shape mismatch");
        slots_ = std::move(slots);
        step_count_ = step_count;
    }

    double grad_norm() const {
        double sq = 0.0;
        for (const Tensor* p : params_)
            for (double g : p->grad) sq += g * g;
        return std::sqrt(sq);
    }

    // Scales all grads so the global norm is at most max_norm. 0 disables.
    void clip_grad_norm(double max_norm) {
        if (max_norm <= 0.0) return;
        double norm = grad_norm();
        if (norm <= max_norm) return;
        double scale = max_norm / norm;
        for (Tensor* p : params_)
            for (double& g : p->grad) g *= scale;
    }

    void step() {
        for (const Tensor* p : params_)
            if (!all_finite(p->grad))
                throw NumericError("optimizer step aborted: non-finite gradient");
        ++step_count_;
        double bc1 = 1.0 - std::pow(settings_.beta1, static_cast<double>(step_count_));
        double bc2 = 1.0 - std::pow(settings_.beta2, static_cast<double>(step_count_));
        for (std::size_t i = 0; i < params_.size(); ++i) {
            Tensor& p = *params_[i];
            Slot& s = slots_[i];
            for (std::size_t j = 0; j < p.size(); ++j) {
                double g = p.grad[j];
                s.m[j] = settings_.beta1 * s.m[j] + (1.0 - settings_.beta1) * g;
                s.v[j] = settings_.beta2 * s.v[j] + (1.0 - settings_.beta2) * g * g;
                double mhat = s.m[j] / bc1;
                double vhat = s.v[j] / bc2;
                p.values[j] -= settings_.learning_rate *
                               (mhat / (std::sqrt(vhat) + settings_.epsilon) +
                                settings_.weight_decay * p.values[j]);
            }
        }
    }

    void zero_grad() {
        for (Tensor* p : params_) p->zero_grad();
    }

private:
    Settings settings_;
    std::vector<Tensor*> params_;
    std::vector<Slot> slots_;
    std::uint64_t step_count_ = 0;
};

}  // namespace lapnet
