#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "nn.hpp"

namespace explorler {

// Binary container: 16-byte header ("EXPLRFPB" + u32 version + u32 reserved),
// u64 entry count, then per entry {u64 name_len, name bytes, u64 rank, u64
// dims...}, then the raw float64 little-endian values.
inline constexpr char kFlatMagic[8] = {'E', 'X', 'P', 'L', 'R', 'F', 'P', 'B'};
inline constexpr uint32_t kFlatVersion = 1;

namespace detail {

inline void put_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& os, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline void put_f64(std::ostream& os, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(os, bits);
}

inline uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("flat params: truncated file");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
}

inline uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("flat params: truncated file");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
}

inline double get_f64(std::istream& is) {
    const uint64_t bits = get_u64(is);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace detail

inline void save_flat_params(const FlatParams& p, const std::string& path) {
    if (static_cast<int64_t>(p.values.size()) != p.total())
        throw std::invalid_argument("save_flat_params: layout/value count mismatch");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_flat_params: cannot open " + path);
    os.write(kFlatMagic, 8);
    detail::put_u32(os, kFlatVersion);
    detail::put_u32(os, 0);
    detail::put_u64(os, p.layout.size());
    for (const auto& s : p.layout) {
        detail::put_u64(os, s.name.size());
        os.write(s.name.data(), static_cast<long>(s.name.size()));
        detail::put_u64(os, s.dims.size());
        for (int64_t d : s.dims) detail::put_u64(os, static_cast<uint64_t>(d));
    }
    for (double v : p.values) detail::put_f64(os, v);
    if (!os) throw std::runtime_error("save_flat_params: write failed for " + path);
}

inline FlatParams load_flat_params(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_flat_params: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kFlatMagic, 8) != 0)
        throw std::runtime_error("load_flat_params: bad magic in " + path);
    const uint32_t version = detail::get_u32(is);
    if (version != kFlatVersion)
        throw std::runtime_error("load_flat_params: unsupported version in " + path);
    detail::get_u32(is);  // reserved
    const uint64_t n_entries = detail::get_u64(is);
    FlatParams p;
    p.layout.reserve(n_entries);
    for (uint64_t e = 0; e < n_entries; ++e) {
        ParamShape s;
        const uint64_t name_len = detail::get_u64(is);
        if (name_len > 4096) throw std::runtime_error("load_flat_params: implausible name length");
        s.name.resize(name_len);
        is.read(s.name.data(), static_cast<long>(name_len));
        if (!is) throw std::runtime_error("flat params: truncated file");
        const uint64_t rank = detail::get_u64(is);
        if (rank > 8) throw std::runtime_error("load_flat_params: implausible rank");
        s.dims.resize(rank);
        for (uint64_t d = 0; d < rank; ++d) s.dims[d] = static_cast<int64_t>(detail::get_u64(is));
        p.layout.push_back(std::move(s));
    }
    const int64_t total = p.total();
    p.values.resize(static_cast<size_t>(total));
    for (int64_t i = 0; i < total; ++i) p.values[static_cast<size_t>(i)] = detail::get_f64(is);
    return p;
}

// Debug-friendly JSON mirror of the binary container.
inline nlohmann::json flat_params_to_json(const FlatParams& p) {
    nlohmann::json j;
    j["version"] = kFlatVersion;
    j["layout"] = nlohmann::json::array();
    for (const auto& s : p.layout) j["layout"].push_back({{"name", s.name}, {"dims", s.dims}});
    j["values"] = p.values;
    return j;
}

inline void save_flat_params_json(const FlatParams& p, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_flat_params_json: cannot open " + path);
    os << flat_params_to_json(p).dump(2) << "\n";
}

}  // namespace explorler
