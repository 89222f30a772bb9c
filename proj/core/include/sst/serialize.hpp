// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sst {

/// Little-endian binary writer over an ofstream (all file formats here are
/// little-endian regardless of host order).
class BinaryWriter {
  public:
    explicit BinaryWriter(const std::string& path)
        : stream_(path, std::ios::binary | std::ios::trunc) {
        if (!stream_) throw std::runtime_error("cannot open for writing: " + path);
    }

    void magic(const char tag[4]) { stream_.write(tag, 4); }
    void u32(std::uint32_t v) { write_le(v); }
    void u64(std::uint64_t v) { write_le(v); }
    void f32(float v) { std::uint32_t b; std::memcpy(&b, &v, 4); write_le(b); }
    void f64(double v) { std::uint64_t b; std::memcpy(&b, &v, 8); write_le(b); }
    void f32_array(const float* data, std::size_t n) { for (std::size_t i = 0; i < n; ++i) f32(data[i]); }

    void close() {
        stream_.close();
        if (!stream_) throw std::runtime_error("write failure on close");
    }

  private:
    template <typename T>
    void write_le(T v) {
        unsigned char buf[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
        stream_.write(reinterpret_cast<const char*>(buf), sizeof(T));
    }

    std::ofstream stream_;
};

class BinaryReader {
  public:
    explicit BinaryReader(const std::string& path) : stream_(path, std::ios::binary) {
        if (!stream_) throw std::runtime_error("cannot open for reading: " + path);
    }

    /// Reads 4 bytes and checks them against the expected tag.
    void expect_magic(const char tag[4], const std::string& what) {
        char got[4];
        stream_.read(got, 4);
        if (!stream_ || std::memcmp(got, tag, 4) != 0)
            throw std::runtime_error(what + ": bad magic bytes");
    }

    std::uint32_t u32() { return read_le<std::uint32_t>(); }
    std::uint64_t u64() { return read_le<std::uint64_t>(); }
    float f32() { const auto b = read_le<std::uint32_t>(); float v; std::memcpy(&v, &b, 4); return v; }
    double f64() { const auto b = read_le<std::uint64_t>(); double v; std::memcpy(&v, &b, 8); return v; }
    void f32_array(float* data, std::size_t n) { for (std::size_t i = 0; i < n; ++i) data[i] = f32(); }

    bool ok() const { return static_cast<bool>(stream_); }
    void require_ok(const std::string& what) {
        if (!stream_) throw std::runtime_error(what + ": truncated or corrupt file");
    }

  private:
    template <typename T>
    T read_le() {
        unsigned char buf[sizeof(T)] = {};
        stream_.read(reinterpret_cast<char*>(buf), sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
        return v;
    }

    std::ifstream stream_;
};

/// FNV-1a 64-bit over a byte range.
inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xCBF29CE484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t fingerprint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot fingerprint missing file: " + path);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    }
    return h;
}

}  // namespace sst
