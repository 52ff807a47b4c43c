// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lapnet/gumbel.hpp"
#include "lapnet/memory.hpp"
#include "lapnet/sampler.hpp"
#include "lapnet/tape.hpp"

namespace lapnet {

struct GruParameters {
    Tensor w_update, w_reset, w_cand;  // each [hidden x (hidden + input)]
    Tensor b_update, b_reset, b_cand;  // each [hidden]

    std::size_t hidden() const { return w_update.shape[0]; }
    std::size_t input() const { return w_update.shape[1] - w_update.shape[0]; }
};

// z = sigmoid(Wz [h; x] + bz), r = sigmoid(Wr [h; x] + br),
// cand = tanh(Wh [r .* h; x] + bh), h' = (1 - z) .* h + z .* cand.
inline TensorRef gru_step(Tape& tape, const GruParameters& p, TensorRef w_update,
                          TensorRef w_reset, TensorRef w_cand, TensorRef b_update,
                          TensorRef b_reset, TensorRef b_cand, TensorRef h_prev,
                          TensorRef x) {
    if (tape.values(h_prev).size() != p.hidden() || tape.values(x).size() != p.input())
        throw DimensionError("gru_step input shapes do not match parameters");
    TensorRef hx = tape.concat({h_prev, x});
    TensorRef z = tape.sigmoid(tape.linear(hx, w_update, b_update));
    TensorRef r = tape.sigmoid(tape.linear(hx, w_reset, b_reset));
    TensorRef rhx = tape.concat({tape.mul(r, h_prev), x});
    TensorRef cand = tape.tanh(tape.linear(rhx, w_cand, b_cand));
    return tape.add(tape.mul(tape.one_minus(z), h_prev), tape.mul(z, cand));
}

// Convenience overload that leases the parameters onto the tape itself.
inline TensorRef gru_step(Tape& tape, GruParameters& p, TensorRef h_prev, TensorRef x) {
    return gru_step(tape, p, tape.param(p.w_update), tape.param(p.w_reset),
                    tape.param(p.w_cand), tape.param(p.b_update), tape.param(p.b_reset),
                    tape.param(p.b_cand), h_prev, x);
}

struct ModelConfig {
    std::size_t feature_dim = 32;
    std::size_t hidden_size = 64;
    std::size_t num_classes = 6;  // background + action classes
    SamplerConfig sampler;
    bool adaptive_sampling = true;

    void validate() const {
        if (feature_dim == 0 || hidden_size == 0 || num_classes < 2)
            throw ConfigError("model dimensions must be positive, classes >= 2");
        sampler.validate();
    }
};

// All learnable state. The classifier tensors are shared between the
// detection output and the per-step prediction output by construction: both
// paths lease the same objects.
struct LapNetParameters {
    ModelConfig config;
    GruParameters detection;  // input 2 * feature_dim (frame + supplementary)
    GruParameters decoder;    // input feature_dim
    Tensor progression_w, progression_b;  // [states x hidden], [states]
    Tensor feature_w, feature_b;          // [feature_dim x hidden], [feature_dim]
    Tensor classifier_w, classifier_b;    // [classes x hidden], [classes]

    static LapNetParameters init(const ModelConfig& cfg, std::uint64_t seed) {
        cfg.validate();
        Rng rng(Rng::mix(seed, 0));
        LapNetParameters p;
        p.config = cfg;
        std::size_t h = cfg.hidden_size, d = cfg.feature_dim;
        p.detection = init_gru(h, 2 * d, rng);
        p.decoder = init_gru(h, d, rng);
        p.progression_w = init_weight(cfg.sampler.states, h, rng);
        p.progression_b = Tensor::zeros({cfg.sampler.states}, true);
        p.feature_w = init_weight(d, h, rng);
        p.feature_b = Tensor::zeros({d}, true);
        p.classifier_w = init_weight(cfg.num_classes, h, rng);
        p.classifier_b = Tensor::zeros({cfg.num_classes}, true);
        return p;
    }

    std::vector<std::pair<std::string, Tensor*>> named_parameters() {
        return {
            {"detection.w_update", &detection.w_update},
            {"detection.w_reset", &detection.w_reset},
            {"detection.w_cand", &detection.w_cand},
            {"detection.b_update", &detection.b_update},
            {"detection.b_reset", &detection.b_reset},
            {"detection.b_cand", &detection.b_cand},
            {"decoder.w_update", &decoder.w_update},
            {"decoder.w_reset", &decoder.w_reset},
            {"decoder.w_cand", &decoder.w_cand},
            {"decoder.b_update", &decoder.b_update},
            {"decoder.b_reset", &decoder.b_reset},
            {"decoder.b_cand", &decoder.b_cand},
            {"progression.w", &progression_w},
            {"progression.b", &progression_b},
            {"feature.w", &feature_w},
            {"feature.b", &feature_b},
            {"classifier.w", &classifier_w},
            {"classifier.b", &classifier_b},
        };
    }

    std::vector<Tensor*> parameters() {
        std::vector<Tensor*> out;
        for (auto& [name, t] : named_parameters()) out.push_back(t);
        return out;
    }

private:
    // Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
    static Tensor init_weight(std::size_t rows, std::size_t cols, Rng& rng) {
        double bound = 1.0 / std::sqrt(static_cast<double>(cols));
        std::vector<double> v(rows * cols);
        for (double& x : v) x = rng.uniform(-bound, bound);
        return Tensor({rows, cols}, std::move(v), true);
    }

    static GruParameters init_gru(std::size_t hidden, std::size_t input, Rng& rng) {
        GruParameters g;
        g.w_update = init_weight(hidden, hidden + input, rng);
        g.w_reset = init_weight(hidden, hidden + input, rng);
        g.w_cand = init_weight(hidden, hidden + input, rng);
        g.b_update = Tensor::zeros({hidden}, true);
        g.b_reset = Tensor::zeros({hidden}, true);
        g.b_cand = Tensor::zeros({hidden}, true);
        return g;
    }
};

// Log-probabilities over progression states from the previous hidden state.
inline TensorRef estimate_progression(Tape& tape, TensorRef h_prev, TensorRef head_w,
                                      TensorRef head_b) {
    return tape.log_softmax(tape.linear(h_prev, head_w, head_b));
}

struct FuturePrediction {
    std::vector<TensorRef> features;     // predicted frame features, step 0 = now
    std::vector<TensorRef> class_probs;  // per-step class distributions
    std::vector<TensorRef> hiddens;      // decoder hidden states
};

// Autoregressive decoder: hidden starts from h_prev, step n feeds on the
// features predicted at step n-1 (step 0 on the observed current frame). The
// classifier here is the shared detection classifier.
inline FuturePrediction predict_future(Tape& tape, TensorRef h_prev, TensorRef f_current,
                                       std::size_t steps, GruParameters& decoder,
                                       TensorRef feature_w, TensorRef feature_b,
                                       TensorRef classifier_w, TensorRef classifier_b) {
    TensorRef wu = tape.param(decoder.w_update);
    TensorRef wr = tape.param(decoder.w_reset);
    TensorRef wc = tape.param(decoder.w_cand);
    TensorRef bu = tape.param(decoder.b_update);
    TensorRef br = tape.param(decoder.b_reset);
    TensorRef bc = tape.param(decoder.b_cand);
    FuturePrediction out;
    out.features.reserve(steps);
    out.class_probs.reserve(steps);
    out.hiddens.reserve(steps);
    TensorRef h = h_prev;
    TensorRef input = f_current;
    for (std::size_t i = 0; i < steps; ++i) {
        h = gru_step(tape, decoder, wu, wr, wc, bu, br, bc, h, input);
        TensorRef f = tape.linear(h, feature_w, feature_b);
        TensorRef c = tape.softmax(tape.linear(h, classifier_w, classifier_b));
        out.hiddens.push_back(h);
        out.features.push_back(f);
        out.class_probs.push_back(c);
        input = f;
    }
    return out;
}

enum class StepMode { train, eval };

struct StepOptions {
    StepMode mode = StepMode::eval;
    double temperature = 1.0;
    Rng* rng = nullptr;  // required in train mode with adaptive sampling
    // Overrides the progression choice entirely (fixed-window baselines and
    // the forced-state equivalence test). Skips the progression head.
    std::optional<std::size_t> force_state;
    // Supplies the train-mode noise instead of drawing it (gradient and
    // contract tests that must hold the perturbation fixed).
    std::optional<std::vector<double>> fixed_noise;
    // Uses the relaxed mixture as the forward value instead of the hard
    // window (smooth surrogate for finite-difference verification).
    bool soft_forward = false;
    bool capture_pool = false;
};

struct StepDiagnostics {
    std::size_t hard_state = 0;
    WindowRange window;
    std::vector<double> soft_estimate;   // exp of the progression head output
    std::vector<double> relaxed;         // tempered relaxation (train mode)
    bool used_gumbel = false;
    std::vector<FeatureVector> pool_values;  // filled when capture_pool is set
};

struct StepResult {
    TensorRef h_next;
    TensorRef scores;       // pre-softmax recognition scores
    TensorRef class_probs;  // softmax over classes
    std::vector<TensorRef> future_features;
    std::vector<TensorRef> future_class_probs;
    StepDiagnostics diag;
};

// One frame through the full pipeline: predict futures from h_prev, pool them
// behind the history, pick a progression-conditioned window, aggregate it,
// and run the detection cell on [frame; supplementary]. The caller pushes the
// observed frame onto the history afterwards (see push_observed), keeping the
// pool at step t free of the step-t observation.
inline StepResult lapnet_step(Tape& tape, LapNetParameters& params,
                              const HistoryStack& history, TensorRef h_prev,
                              const FeatureVector& frame, const StepOptions& opt) {
    const ModelConfig& cfg = params.config;
    if (frame.size() != cfg.feature_dim)
        throw DimensionError("frame dimension does not match model");
    if (history.depth() != cfg.sampler.depth || history.dim() != cfg.feature_dim)
        throw DimensionError("history does not match model config");

    TensorRef cls_w = tape.param(params.classifier_w);
    TensorRef cls_b = tape.param(params.classifier_b);
    TensorRef f_t = tape.constant(frame);

    FuturePrediction fut = predict_future(tape, h_prev, f_t, cfg.sampler.depth,
                                          params.decoder, tape.param(params.feature_w),
                                          tape.param(params.feature_b), cls_w, cls_b);

    std::vector<TensorRef> history_refs;
    history_refs.reserve(history.depth());
    for (const auto& h : history.entries()) history_refs.push_back(tape.constant(h));
    FeaturePool<TensorRef> pool = build_pool(history_refs, fut.features);

    StepResult result;
    result.future_features = fut.features;
    result.future_class_probs = fut.class_probs;

    TensorRef supplementary;
    if (opt.force_state.has_value()) {
        std::size_t state = *opt.force_state;
        result.diag.hard_state = state;
        supplementary = fixed_supplementary(tape, pool, cfg.sampler, state);
    } else {
        TensorRef log_probs = estimate_progression(tape, h_prev,
                                                   tape.param(params.progression_w),
                                                   tape.param(params.progression_b));
        const auto& lp = tape.values(log_probs);
        result.diag.soft_estimate.resize(lp.size());
        for (std::size_t i = 0; i < lp.size(); ++i)
            result.diag.soft_estimate[i] = std::exp(lp[i]);
        if (opt.mode == StepMode::train) {
            std::vector<double> noise;
            if (opt.fixed_noise.has_value()) {
                noise = *opt.fixed_noise;
                if (noise.size() != cfg.sampler.states)
                    throw DimensionError("fixed noise length must equal state count");
            } else {
                require(opt.rng != nullptr, "train-mode step needs an rng");
                noise = sample_gumbel(cfg.sampler.states, *opt.rng);
            }
            std::size_t hard = gumbel_max_select(lp, noise);
            TensorRef relaxed = gumbel_softmax_relax(tape, log_probs, noise, opt.temperature);
            result.diag.used_gumbel = true;
            result.diag.hard_state = hard;
            result.diag.relaxed = tape.values(relaxed);
            supplementary = adaptive_supplementary(tape, pool, cfg.sampler, relaxed, hard,
                                                   !opt.soft_forward);
        } else {
            std::size_t hard = argmax_index(lp);
            result.diag.hard_state = hard;
            supplementary = fixed_supplementary(tape, pool, cfg.sampler, hard);
        }
    }
    result.diag.window = window_indices(cfg.sampler, result.diag.hard_state);
    if (opt.capture_pool)
        for (TensorRef r : pool.frames) result.diag.pool_values.push_back(tape.values(r));

    TensorRef x = tape.concat({f_t, supplementary});
    result.h_next = gru_step(tape, params.detection, h_prev, x);
    result.scores = tape.linear(result.h_next, cls_w, cls_b);
    result.class_probs = tape.softmax(result.scores);
    return result;
}

// Streaming wrapper: owns hidden-state values and the history between frames,
// running each frame on a fresh no-grad tape.
class StreamState {
public:
    StreamState(LapNetParameters& params, std::uint64_t rng_seed = 0)
        : params_(&params),
          h_(params.config.hidden_size, 0.0),
          history_(params.config.sampler.depth, params.config.feature_dim),
          rng_(rng_seed) {}

    struct FrameOutput {
        std::vector<double> class_probs;
        std::vector<std::vector<double>> future_class_probs;
        StepDiagnostics diag;
    };

    FrameOutput step(const FeatureVector& frame, StepMode mode = StepMode::eval,
                     double temperature = 1.0) {
        Tape tape(false);
        StepOptions opt;
        opt.mode = mode;
        opt.temperature = temperature;
        opt.rng = &rng_;
        if (!params_->config.adaptive_sampling)
            opt.force_state = params_->config.sampler.states - 1;
        TensorRef h_prev = tape.constant(h_);
        StepResult r = lapnet_step(tape, *params_, history_, h_prev, frame, opt);
        h_ = tape.values(r.h_next);
        if (!all_finite(h_)) throw NumericError("non-finite hidden state");
        history_.push(frame);
        FrameOutput out;
        out.class_probs = tape.values(r.class_probs);
        for (TensorRef c : r.future_class_probs)
            out.future_class_probs.push_back(tape.values(c));
        out.diag = std::move(r.diag);
        return out;
    }

    void reset() {
        std::fill(h_.begin(), h_.end(), 0.0);
        history_.reset();
    }

    const std::vector<double>& hidden() const { return h_; }
    const HistoryStack& history() const { return history_; }

private:
    LapNetParameters* params_;
    std::vector<double> h_;
    HistoryStack history_;
    Rng rng_;
};

}  // namespace lapnet
