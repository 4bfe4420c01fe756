// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Flat named-tensor weight container:
//
//   "TSFPW1\n"
//   repeated records:
//     u32 name length (little-endian), UTF-8 name bytes,
//     u32 rank, u32 dims[rank],
//     f32 data[product(dims)] (little-endian)
//
// Values are always stored as 32-bit floats regardless of the compute type,
// so save -> load -> save is byte-identical. Model-level config (the
// architecture variant) rides along as a data-less marker record named
// "meta.variant.<tag>".

#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "tsfp/layers.hpp"

namespace tsfp {

namespace detail {

inline void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t read_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("checkpoint: truncated file " + path);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void write_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_u32(out, bits);
}

inline float read_f32(std::istream& in, const std::string& path) {
    const std::uint32_t bits = read_u32(in, path);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

constexpr const char* kCheckpointMagic = "TSFPW1\n";
constexpr const char* kVariantPrefix = "meta.variant.";

}  // namespace detail

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const ParamMap<T>& params,
                     const std::string& variant_tag = "") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + path.string());
    out.write(detail::kCheckpointMagic, 7);

    const auto write_record = [&](const std::string& name, const Shape& shape,
                                  std::span<const T> data) {
        detail::write_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        detail::write_u32(out, static_cast<std::uint32_t>(shape.size()));
        for (int d : shape) detail::write_u32(out, static_cast<std::uint32_t>(d));
        for (const T v : data) detail::write_f32(out, static_cast<float>(v));
    };

    if (!variant_tag.empty()) {
        const std::vector<T> marker{T(0)};
        write_record(detail::kVariantPrefix + variant_tag, Shape{1}, marker);
    }
    for (const auto& [name, tensor] : params.items())
        write_record(name, tensor.shape(), tensor.data());
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

// Scans record headers without loading data and returns the variant tag, or
// "" when none was recorded.
inline std::string read_checkpoint_variant(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
    char magic[7];
    in.read(magic, 7);
    if (!in || std::memcmp(magic, detail::kCheckpointMagic, 7) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path.string());
    for (;;) {
        in.peek();
        if (in.eof()) return "";
        const std::uint32_t name_len = detail::read_u32(in, path.string());
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const std::uint32_t rank = detail::read_u32(in, path.string());
        std::int64_t count = 1;
        for (std::uint32_t i = 0; i < rank; ++i)
            count *= static_cast<std::int64_t>(detail::read_u32(in, path.string()));
        if (name.rfind(detail::kVariantPrefix, 0) == 0)
            return name.substr(std::strlen(detail::kVariantPrefix));
        in.seekg(count * 4, std::ios::cur);
        if (!in) throw std::runtime_error("checkpoint: truncated file " + path.string());
    }
}

// Loads every record into the matching registered parameter (by name, shapes
// must agree) and returns the variant tag if one was recorded. Unknown or
// missing names are errors.
template <typename T>
std::string load_checkpoint(const std::filesystem::path& path, ParamMap<T>& params) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
    char magic[7];
    in.read(magic, 7);
    if (!in || std::memcmp(magic, detail::kCheckpointMagic, 7) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path.string());

    std::string variant;
    std::set<std::string> filled;
    for (;;) {
        in.peek();
        if (in.eof()) break;
        const std::uint32_t name_len = detail::read_u32(in, path.string());
        if (name_len == 0 || name_len > 4096)
            throw std::runtime_error("checkpoint: implausible name length in " + path.string());
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const std::uint32_t rank = detail::read_u32(in, path.string());
        if (rank > 8) throw std::runtime_error("checkpoint: implausible rank in " + path.string());
        Shape shape(rank);
        std::int64_t count = 1;
        for (auto& d : shape) {
            d = static_cast<int>(detail::read_u32(in, path.string()));
            count *= d;
        }
        std::vector<float> values(static_cast<std::size_t>(count));
        for (auto& v : values) v = detail::read_f32(in, path.string());

        if (name.rfind(detail::kVariantPrefix, 0) == 0) {
            variant = name.substr(std::strlen(detail::kVariantPrefix));
            continue;
        }
        Tensor<T>* target = params.find(name);
        if (!target)
            throw std::runtime_error("checkpoint: unknown tensor '" + name + "' in " +
                                     path.string());
        if (target->shape() != shape)
            throw std::runtime_error("checkpoint: shape mismatch for '" + name + "': file has " +
                                     shape_str(shape) + ", model expects " +
                                     shape_str(target->shape()));
        auto dst = target->raw_data();
        for (std::size_t i = 0; i < values.size(); ++i) dst[i] = static_cast<T>(values[i]);
        filled.insert(name);
    }
    for (const auto& [name, tensor] : params.items())
        if (!filled.count(name))
            throw std::runtime_error("checkpoint: tensor '" + name + "' missing from " +
                                     path.string());
    return variant;
}

}  // namespace tsfp
