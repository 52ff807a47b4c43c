// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lapnet/common.hpp"
#include "lapnet/memory.hpp"

namespace lapnet {

// One pre-extracted feature stream: frame_count x feature_dim features with a
// class label per frame. Label 0 is background; actions are 1..num_actions.
struct FeatureSequence {
    std::string name;
    std::size_t frame_count = 0;
    std::size_t feature_dim = 0;
    std::size_t num_actions = 0;
    std::vector<double> features;       // row-major frame_count x feature_dim
    std::vector<std::uint16_t> labels;  // in [0, num_actions]

    FeatureVector frame(std::size_t t) const {
        auto begin = features.begin() + static_cast<std::ptrdiff_t>(t * feature_dim);
        return FeatureVector(begin, begin + static_cast<std::ptrdiff_t>(feature_dim));
    }

    std::size_t label(std::size_t t) const { return labels[t]; }

    void validate() const {
        if (features.size() != frame_count * feature_dim)
            throw DimensionError("sequence feature buffer size mismatch");
        if (labels.size() != frame_count)
            throw DimensionError("sequence label count mismatch");
        if (!all_finite(features))
            throw NumericError("sequence contains non-finite features");
        for (std::uint16_t l : labels)
            if (l > num_actions)
                throw FormatError("labels", "label exceeds declared class count");
    }
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}
inline void put_f32(std::string& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
}
inline std::uint32_t get_u32(const std::string& in, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[off + i])) << (8 * i);
    return v;
}
inline std::uint16_t get_u16(const std::string& in, std::size_t off) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(in[off]) |
                                      (static_cast<unsigned char>(in[off + 1]) << 8));
}
inline float get_f32(const std::string& in, std::size_t off) {
    std::uint32_t bits = get_u32(in, off);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}
inline std::uint32_t crc32_of(const std::string& data, std::size_t len) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(data.data()),
                static_cast<uInt>(len)));
}

}  // namespace detail

// LAPF container: "LAPF" + version 1 + u32 frame_count/feature_dim/num_actions
// (little-endian) + f32 features row-major + u16 labels + CRC-32 of everything
// preceding. Features are stored as f32 and promoted to doubles on load.
inline void save_sequence(const FeatureSequence& seq, const std::filesystem::path& path) {
    seq.validate();
    std::string buf;
    buf.reserve(17 + seq.features.size() * 4 + seq.labels.size() * 2 + 4);
    buf += "LAPF";
    buf.push_back(1);
    detail::put_u32(buf, static_cast<std::uint32_t>(seq.frame_count));
    detail::put_u32(buf, static_cast<std::uint32_t>(seq.feature_dim));
    detail::put_u32(buf, static_cast<std::uint32_t>(seq.num_actions));
    for (double v : seq.features) detail::put_f32(buf, static_cast<float>(v));
    for (std::uint16_t l : seq.labels) detail::put_u16(buf, l);
    detail::put_u32(buf, detail::crc32_of(buf, buf.size()));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("write failed: " + path.string());
}

inline FeatureSequence load_sequence(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open for reading: " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 17 || buf.compare(0, 4, "LAPF") != 0)
        throw FormatError("magic", "not a LAPF file");
    if (static_cast<unsigned char>(buf[4]) != 1)
        throw FormatError("version", "unsupported LAPF version");
    FeatureSequence seq;
    seq.name = path.stem().string();
    seq.frame_count = detail::get_u32(buf, 5);
    seq.feature_dim = detail::get_u32(buf, 9);
    seq.num_actions = detail::get_u32(buf, 13);
    std::size_t payload = 17 + seq.frame_count * seq.feature_dim * 4 + seq.frame_count * 2;
    if (buf.size() != payload + 4)
        throw FormatError("checksum", "file size does not match header");
    std::uint32_t stored = detail::get_u32(buf, payload);
    if (stored != detail::crc32_of(buf, payload))
        throw FormatError("checksum", "CRC-32 mismatch");
    seq.features.resize(seq.frame_count * seq.feature_dim);
    std::size_t off = 17;
    for (double& v : seq.features) {
        v = static_cast<double>(detail::get_f32(buf, off));
        off += 4;
    }
    seq.labels.resize(seq.frame_count);
    for (std::uint16_t& l : seq.labels) {
        l = detail::get_u16(buf, off);
        off += 2;
    }
    seq.validate();
    return seq;
}

struct SyntheticConfig {
    std::size_t num_actions = 5;
    std::size_t feature_dim = 32;
    std::size_t num_sequences = 60;
    std::size_t min_length = 96;
    std::size_t max_length = 160;
    std::size_t min_action_len = 10;
    std::size_t max_action_len = 20;
    std::size_t min_background_len = 6;
    std::size_t max_background_len = 12;
    // 0 keeps the drift coefficient continuous (j / L); a positive value
    // quantizes it into that many plateaus.
    std::size_t progression_phases = 0;
    // High enough that a single frame is ambiguous; averaging several real
    // frames of the same segment is what recovers the class signal.
    double noise_scale = 4.0;
    std::uint64_t seed = 7;

    void validate() const {
        if (num_actions == 0 || feature_dim == 0 || num_sequences == 0)
            throw ConfigError("synthetic config needs positive counts");
        if (min_length > max_length || min_action_len > max_action_len ||
            min_background_len > max_background_len)
            throw ConfigError("synthetic config ranges are inverted");
        if (min_action_len == 0)
            throw ConfigError("action segments need at least one frame");
        if (min_length < min_background_len + min_action_len)
            throw ConfigError("sequences too short for one background and one action segment");
        if (noise_scale < 0.0) throw ConfigError("noise scale must be non-negative");
    }
};

// Streams of alternating background and action segments. Action frames drift
// from the class prototype along a per-class direction as the segment
// progresses, so the informative temporal window genuinely depends on how far
// the action has run. Pure function of the config, seed included.
class SyntheticGenerator {
public:
    explicit SyntheticGenerator(const SyntheticConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        Rng proto_rng(Rng::mix(cfg_.seed, 0));
        prototypes_.resize(cfg_.num_actions + 1, FeatureVector(cfg_.feature_dim));
        for (auto& p : prototypes_)
            for (double& v : p) v = proto_rng.normal();
        drift_.resize(cfg_.num_actions + 1, FeatureVector(cfg_.feature_dim, 0.0));
        double drift_scale = 2.0 / std::sqrt(static_cast<double>(cfg_.feature_dim));
        for (std::size_t c = 1; c <= cfg_.num_actions; ++c)
            for (double& v : drift_[c]) v = drift_scale * proto_rng.normal();
    }

    const std::vector<FeatureVector>& prototypes() const { return prototypes_; }
    const std::vector<FeatureVector>& drift() const { return drift_; }

    FeatureSequence sequence(std::size_t index) const {
        Rng rng(Rng::mix(cfg_.seed, index + 1));
        std::size_t target =
            cfg_.min_length + rng.below(cfg_.max_length - cfg_.min_length + 1);
        FeatureSequence seq;
        seq.name = "synthetic_" + std::to_string(index);
        seq.feature_dim = cfg_.feature_dim;
        seq.num_actions = cfg_.num_actions;
        bool background = true;
        bool has_action = false;
        while (seq.frame_count < target || !has_action) {
            std::size_t len;
            std::size_t cls;
            if (background) {
                len = cfg_.min_background_len +
                      rng.below(cfg_.max_background_len - cfg_.min_background_len + 1);
                cls = 0;
            } else {
                len = cfg_.min_action_len +
                      rng.below(cfg_.max_action_len - cfg_.min_action_len + 1);
                cls = 1 + rng.below(cfg_.num_actions);
                has_action = true;
            }
            append_segment(seq, cls, len, rng);
            background = !background;
        }
        seq.validate();
        return seq;
    }

    std::vector<FeatureSequence> all() const {
        std::vector<FeatureSequence> out;
        out.reserve(cfg_.num_sequences);
        for (std::size_t i = 0; i < cfg_.num_sequences; ++i) out.push_back(sequence(i));
        return out;
    }

private:
    void append_segment(FeatureSequence& seq, std::size_t cls, std::size_t len,
                        Rng& rng) const {
        for (std::size_t j = 0; j < len; ++j) {
            double phase = static_cast<double>(j) / static_cast<double>(len);
            if (cfg_.progression_phases > 0) {
                double p = static_cast<double>(cfg_.progression_phases);
                phase = std::floor(phase * p) / p;
            }
            for (std::size_t d = 0; d < cfg_.feature_dim; ++d) {
                double v = prototypes_[cls][d] + phase * drift_[cls][d] +
                           cfg_.noise_scale * rng.normal();
                seq.features.push_back(v);
            }
            seq.labels.push_back(static_cast<std::uint16_t>(cls));
            ++seq.frame_count;
        }
    }

    SyntheticConfig cfg_;
    std::vector<FeatureVector> prototypes_;
    std::vector<FeatureVector> drift_;
};

inline std::vector<FeatureSequence> generate_synthetic(const SyntheticConfig& cfg) {
    return SyntheticGenerator(cfg).all();
}

// A training sample: sample_length consecutive frames of one sequence.
struct TrainingSample {
    const FeatureSequence* sequence = nullptr;
    std::size_t start = 0;
    std::size_t length = 0;
};

// Chunking augmentation: drop the first `offset` frames, then emit
// floor((frame_count - offset) / sample_length) non-overlapping windows.
inline std::vector<TrainingSample> chunk_training_samples(const FeatureSequence& seq,
                                                          std::size_t sample_length,
                                                          std::size_t offset) {
    if (offset < 1 || offset > sample_length)
        throw ConfigError("chunk offset must be in [1, sample_length]");
    if (sample_length == 0 || sample_length > seq.frame_count)
        throw ConfigError("sample length must be in [1, frame_count]");
    std::vector<TrainingSample> samples;
    if (seq.frame_count < offset + sample_length) return samples;
    std::size_t count = (seq.frame_count - offset) / sample_length;
    samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        samples.push_back({&seq, offset + i * sample_length, sample_length});
    return samples;
}

// Ground-truth labels for prediction steps t .. t + depth - 1; positions past
// the sequence end clamp to the final frame's label.
inline std::vector<std::size_t> future_labels(const FeatureSequence& seq, std::size_t t,
                                              std::size_t depth) {
    std::vector<std::size_t> out(depth);
    for (std::size_t i = 0; i < depth; ++i) {
        std::size_t idx = t + i;
        if (idx >= seq.frame_count) idx = seq.frame_count - 1;
        out[i] = seq.labels[idx];
    }
    return out;
}

}  // namespace lapnet
