// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Binary PNM (P5 grayscale / P6 RGB) readers and writers plus the raw
// 16-bit little-endian PCM + sidecar metadata used for clip audio. Writers
// emit a canonical header so write -> read -> write round-trips are
// byte-identical.

#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tsfp/common.hpp"

namespace tsfp {

struct ImageU8 {
    int width = 0;
    int height = 0;
    int channels = 1;  // 1 = P5, 3 = P6 (interleaved RGB)
    std::vector<std::uint8_t> pixels;
};

namespace detail {

inline int pnm_token(std::istream& in, const std::string& path) {
    // Skips whitespace and '#' comment lines, then reads one decimal token.
    int c = in.get();
    for (;;) {
        while (c != EOF && std::isspace(c)) c = in.get();
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
            continue;
        }
        break;
    }
    if (c == EOF || !std::isdigit(c))
        throw std::runtime_error("pnm: malformed header in " + path);
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 1000000) throw std::runtime_error("pnm: header value out of range in " + path);
        c = in.get();
    }
    if (c != EOF) in.unget();
    return static_cast<int>(value);
}

}  // namespace detail

inline ImageU8 read_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("pnm: cannot open " + path.string());
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || (m1 != '5' && m1 != '6'))
        throw std::runtime_error("pnm: unsupported magic in " + path.string());
    ImageU8 img;
    img.channels = m1 == '5' ? 1 : 3;
    img.width = detail::pnm_token(in, path.string());
    img.height = detail::pnm_token(in, path.string());
    const int maxval = detail::pnm_token(in, path.string());
    if (img.width < 1 || img.height < 1)
        throw std::runtime_error("pnm: bad dimensions in " + path.string());
    if (maxval < 1 || maxval > 255)
        throw std::runtime_error("pnm: only 8-bit maxval supported in " + path.string());
    const int sep = in.get();
    if (sep == EOF || !std::isspace(sep))
        throw std::runtime_error("pnm: missing raster separator in " + path.string());
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw std::runtime_error("pnm: truncated raster in " + path.string());
    return img;
}

inline void write_pnm(const std::filesystem::path& path, const ImageU8& img) {
    if (img.channels != 1 && img.channels != 3)
        throw std::runtime_error("pnm: images must have 1 or 3 channels");
    if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * img.channels)
        throw std::runtime_error("pnm: pixel buffer does not match dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("pnm: cannot write " + path.string());
    out << (img.channels == 1 ? "P5\n" : "P6\n") << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw std::runtime_error("pnm: write failed for " + path.string());
}

struct AudioMeta {
    int sample_rate = 0;
    double fps = 25.0;  // frames per second of the paired video
};

inline std::vector<std::int16_t> read_pcm16(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("pcm: cannot open " + path.string());
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes % 2 != 0) throw std::runtime_error("pcm: odd byte count in " + path.string());
    std::vector<std::int16_t> samples(bytes / 2);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw std::runtime_error("pcm: short read in " + path.string());
    return samples;
}

inline void write_pcm16(const std::filesystem::path& path, const std::vector<std::int16_t>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("pcm: cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(samples.data()),
              static_cast<std::streamsize>(samples.size() * 2));
    if (!out) throw std::runtime_error("pcm: write failed for " + path.string());
}

inline AudioMeta read_audio_meta(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("audio meta: cannot open " + path.string());
    AudioMeta meta;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("audio meta: malformed line in " + path.string());
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "sample_rate")
            meta.sample_rate = std::stoi(value);
        else if (key == "fps")
            meta.fps = std::stod(value);
        else
            throw std::runtime_error("audio meta: unknown key '" + key + "' in " + path.string());
    }
    if (meta.sample_rate <= 0)
        throw std::runtime_error("audio meta: missing sample_rate in " + path.string());
    if (meta.fps <= 0.0) throw std::runtime_error("audio meta: fps must be positive");
    return meta;
}

inline void write_audio_meta(const std::filesystem::path& path, const AudioMeta& meta) {
    std::ofstream out(path);
    out << "sample_rate=" << meta.sample_rate << "\n";
    out << "fps=" << meta.fps << "\n";
    if (!out) throw std::runtime_error("audio meta: write failed for " + path.string());
}

}  // namespace tsfp
