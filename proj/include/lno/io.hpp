#pragma once

// Shared pieces of the binary file formats: a single-line JSON header followed
// by a little-endian blob.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lno/errors.hpp"

namespace lno::io {

using json = nlohmann::json;

inline void write_header(std::ostream& out, const json& header) {
    out << header.dump() << '\n';
}

/// Reads the header line; `what` names the file kind in error messages.
inline json read_header(std::istream& in, const std::string& what) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError(what + ": missing header line");
    try {
        json j = json::parse(line);
        if (!j.is_object()) throw FormatError(what + ": header is not a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw FormatError(what + ": header is not valid JSON (" + e.what() + ")");
    }
}

/// Fetches a required header field, converting type errors into FormatError
/// that name the field.
template <class T>
T field(const json& j, const std::string& name, const std::string& what) {
    if (!j.contains(name)) throw FormatError(what + ": header field '" + name + "' is missing");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        throw FormatError(what + ": header field '" + name + "' has the wrong type");
    }
}

template <class T>
inline T to_little(T v) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
        U u;
        std::memcpy(&u, &v, sizeof u);
        U r = 0;
        for (std::size_t b = 0; b < sizeof u; ++b) r |= ((u >> (8 * b)) & 0xFF) << (8 * (sizeof u - 1 - b));
        std::memcpy(&v, &r, sizeof r);
        return v;
    }
}

template <class T>
void write_values(std::ostream& out, const T* data, std::size_t n) {
    std::vector<T> buf(data, data + n);
    for (T& v : buf) v = to_little(v);
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(n * sizeof(T)));
}

template <class T>
void read_values(std::istream& in, T* data, std::size_t n, const std::string& what) {
    in.read(reinterpret_cast<char*>(data), std::streamsize(n * sizeof(T)));
    if (std::size_t(in.gcount()) != n * sizeof(T))
        throw FormatError(what + ": truncated data blob (expected " + std::to_string(n * sizeof(T)) +
                          " bytes, got " + std::to_string(in.gcount()) + ")");
    for (std::size_t i = 0; i < n; ++i) data[i] = to_little(data[i]);
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    return out;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "' for reading");
    return in;
}

} // namespace lno::io
