#pragma once

// Tiny deterministic sampling helpers on top of mt19937_64. std::*_distribution
// output is not pinned by the standard, so tests roll their own to keep frozen
// expectations stable across toolchains.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

inline double unit_real(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline std::size_t uniform_index(std::mt19937_64& gen, std::size_t n) {
    const auto i = static_cast<std::size_t>(unit_real(gen) * static_cast<double>(n));
    return i >= n ? n - 1 : i;
}

inline double normal(std::mt19937_64& gen) {
    const double u1 = 1.0 - unit_real(gen);  // (0, 1]
    const double u2 = unit_real(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& gen) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[uniform_index(gen, i)]);
}

// Text with parentheses, regulation-style codes and section signs mixed in,
// for cleaning round-trip properties.
inline std::string random_paren_text(std::mt19937_64& gen) {
    static const char* fragments[] = {
        "reservoir bags", "oxygen cannula",  "a syringe",  "pump tubing", "sterile",
        "see",            "\xc2\xa7",        "868.5320",   "870.1234",    "12.3",
        "8685320",        "21 CFR 876.1500", "(",          ")",           "device",
        "x-ray",          "catheter set",    "99999.99",   "1.2.3",       "drain urine",
    };
    const std::size_t n_fragments = sizeof(fragments) / sizeof(fragments[0]);
    const std::size_t len = 1 + uniform_index(gen, 24);
    std::string text;
    for (std::size_t i = 0; i < len; ++i) {
        text += fragments[uniform_index(gen, n_fragments)];
        if (unit_real(gen) < 0.8)
            text += ' ';
    }
    return text;
}

}  // namespace testsupport
