// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lapnet/cells.hpp"
#include "lapnet/config.hpp"
#include "lapnet/data.hpp"
#include "lapnet/optim.hpp"

namespace lapnet {

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline std::uint64_t get_u64(const std::string& in, std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[off + i])) << (8 * i);
    return v;
}
inline void put_f64(std::string& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(out, bits);
}
inline double get_f64(const std::string& in, std::size_t off) {
    std::uint64_t bits = get_u64(in, off);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

}  // namespace detail

// Training snapshot: model parameters (named, shaped, 64-bit), optimizer
// moments and step counter, epochs completed, and the run config. Binary
// layout is "LAPC" + version 1 + little-endian fields + CRC-32 trailer, so
// round-trips are bitwise exact.
struct Checkpoint {
    RunConfig run;
    std::size_t feature_dim = 0;
    std::size_t num_actions = 0;
    std::size_t epochs_completed = 0;
    std::uint64_t optimizer_steps = 0;
    LapNetParameters params;
    std::vector<AdamOptimizer::Slot> slots;

    ModelConfig model_config() const { return run.model(feature_dim, num_actions); }
};

inline void save_checkpoint(const std::filesystem::path& path, LapNetParameters& params,
                            const AdamOptimizer& optimizer, const RunConfig& run,
                            std::size_t feature_dim, std::size_t num_actions,
                            std::size_t epochs_completed) {
    auto named = params.named_parameters();
    const auto& slots = optimizer.slots();
    if (slots.size() != named.size())
        throw ContractError("checkpoint save: optimizer not attached to these parameters");

    std::string buf;
    buf += "LAPC";
    buf.push_back(1);
    detail::put_u32(buf, static_cast<std::uint32_t>(epochs_completed));
    detail::put_u64(buf, optimizer.step_count());
    detail::put_u32(buf, static_cast<std::uint32_t>(feature_dim));
    detail::put_u32(buf, static_cast<std::uint32_t>(num_actions));
    std::string cfg = run.to_json().dump();
    detail::put_u32(buf, static_cast<std::uint32_t>(cfg.size()));
    buf += cfg;
    detail::put_u32(buf, static_cast<std::uint32_t>(named.size()));
    for (std::size_t i = 0; i < named.size(); ++i) {
        const auto& [name, tensor] = named[i];
        detail::put_u16(buf, static_cast<std::uint16_t>(name.size()));
        buf += name;
        detail::put_u32(buf, static_cast<std::uint32_t>(tensor->shape.size()));
        for (std::size_t d : tensor->shape)
            detail::put_u32(buf, static_cast<std::uint32_t>(d));
        for (double v : tensor->values) detail::put_f64(buf, v);
        for (double v : slots[i].m) detail::put_f64(buf, v);
        for (double v : slots[i].v) detail::put_f64(buf, v);
    }
    detail::put_u32(buf, detail::crc32_of(buf, buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open checkpoint for writing: " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("checkpoint write failed: " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open checkpoint for reading: " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 9 || buf.compare(0, 4, "LAPC") != 0)
        throw FormatError("magic", "not a LAPC checkpoint");
    if (static_cast<unsigned char>(buf[4]) != 1)
        throw FormatError("version", "unsupported checkpoint version");
    if (buf.size() < 4 ||
        detail::get_u32(buf, buf.size() - 4) != detail::crc32_of(buf, buf.size() - 4))
        throw FormatError("checksum", "CRC-32 mismatch");

    std::size_t off = 5;
    auto need = [&](std::size_t n) {
        if (off + n + 4 > buf.size())
            throw FormatError("length", "checkpoint truncated");
    };
    Checkpoint ck;
    need(20);
    ck.epochs_completed = detail::get_u32(buf, off);
    off += 4;
    ck.optimizer_steps = detail::get_u64(buf, off);
    off += 8;
    ck.feature_dim = detail::get_u32(buf, off);
    off += 4;
    ck.num_actions = detail::get_u32(buf, off);
    off += 4;
    need(4);
    std::uint32_t cfg_len = detail::get_u32(buf, off);
    off += 4;
    need(cfg_len);
    Json cfg_json;
    try {
        cfg_json = Json::parse(buf.substr(off, cfg_len));
    } catch (const Json::exception&) {
        throw FormatError("config", "checkpoint config snapshot is not valid JSON");
    }
    ck.run = RunConfig::from_json(cfg_json);
    off += cfg_len;

    ck.params = LapNetParameters::init(ck.model_config(), ck.run.seed);
    auto named = ck.params.named_parameters();
    need(4);
    std::uint32_t count = detail::get_u32(buf, off);
    off += 4;
    if (count != named.size())
        throw FormatError("parameters", "parameter count does not match architecture");
    ck.slots.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        need(2);
        std::uint16_t name_len = detail::get_u16(buf, off);
        off += 2;
        need(name_len);
        std::string name = buf.substr(off, name_len);
        off += name_len;
        auto& [expected, tensor] = named[i];
        if (name != expected)
            throw FormatError("parameters", "unexpected parameter name: " + name);
        need(4);
        std::uint32_t ndim = detail::get_u32(buf, off);
        off += 4;
        need(4 * ndim);
        Shape shape(ndim);
        for (std::uint32_t d = 0; d < ndim; ++d) {
            shape[d] = detail::get_u32(buf, off);
            off += 4;
        }
        if (shape != tensor->shape)
            throw FormatError("parameters", "shape mismatch for " + name);
        std::size_t n = tensor->size();
        need(8 * n * 3);
        for (double& v : tensor->values) {
            v = detail::get_f64(buf, off);
            off += 8;
        }
        ck.slots[i].m.resize(n);
        ck.slots[i].v.resize(n);
        for (double& v : ck.slots[i].m) {
            v = detail::get_f64(buf, off);
            off += 8;
        }
        for (double& v : ck.slots[i].v) {
            v = detail::get_f64(buf, off);
            off += 8;
        }
    }
    if (off + 4 != buf.size())
        throw FormatError("length", "checkpoint has trailing bytes");
    return ck;
}

}  // namespace lapnet
