#pragma once

// Little-endian scalar encoding shared by the SRIM / SRSM / raw-f64 formats.

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

namespace suprox::detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> buf{};
    for (int k = 0; k < 4; ++k) buf[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
    out.write(buf.data(), buf.size());
}

inline void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> buf{};
    for (int k = 0; k < 8; ++k) buf[k] = static_cast<char>((bits >> (8 * k)) & 0xffu);
    out.write(buf.data(), buf.size());
}

// Both getters return false on short reads.
inline bool get_u32(std::istream& in, std::uint32_t& v) {
    std::array<unsigned char, 4> buf{};
    if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) return false;
    v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(buf[k]) << (8 * k);
    return true;
}

inline bool get_f64(std::istream& in, double& v) {
    std::array<unsigned char, 8> buf{};
    if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) return false;
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
    v = std::bit_cast<double>(bits);
    return true;
}

}  // namespace suprox::detail
