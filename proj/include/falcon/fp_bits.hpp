#pragma once

#include <bit>
#include <cstdint>
#include <type_traits>

namespace falcon {

// Lane-level description of the two supported IEEE-754 formats. Everything in
// the codec that depends on the value width goes through these traits.
template<typename T>
struct fp_traits;

template<>
struct fp_traits<double> {
    using value_type = double;
    using bits_type = std::uint64_t;
    using sbits_type = std::int64_t;

    static constexpr int width = 64;
    static constexpr int mantissa_bits = 52;
    static constexpr int exponent_bits = 11;
    static constexpr int exponent_bias = 1023;
    static constexpr unsigned exponent_mask = 0x7ffu;

    // Inclusive bounds on the decimal place and significand count a value may
    // have and still take the integer path.
    static constexpr int max_alpha = 22;
    static constexpr int max_beta = 15;
    static constexpr std::uint8_t exception_alpha = 23;
    static constexpr std::uint8_t exception_beta = 16;

    // 2^-52, the relative spacing used by the stopping rule.
    static constexpr double rel_eps = 0x1p-52;

    // Decades with a finite normal representative.
    static constexpr int min_decade = -308;
    static constexpr int max_decade = 308;
};

template<>
struct fp_traits<float> {
    using value_type = float;
    using bits_type = std::uint32_t;
    using sbits_type = std::int32_t;

    static constexpr int width = 32;
    static constexpr int mantissa_bits = 23;
    static constexpr int exponent_bits = 8;
    static constexpr int exponent_bias = 127;
    static constexpr unsigned exponent_mask = 0xffu;

    static constexpr int max_alpha = 10;
    static constexpr int max_beta = 6;
    static constexpr std::uint8_t exception_alpha = 11;
    static constexpr std::uint8_t exception_beta = 7;

    static constexpr float rel_eps = 0x1p-23f;

    static constexpr int min_decade = -38;
    static constexpr int max_decade = 38;
};

template<typename T>
using fp_bits_t = typename fp_traits<T>::bits_type;

template<typename T>
constexpr fp_bits_t<T> bits_of(T v) noexcept {
    return std::bit_cast<fp_bits_t<T>>(v);
}

template<typename T>
constexpr T value_of(fp_bits_t<T> b) noexcept {
    return std::bit_cast<T>(b);
}

// Sign / biased exponent / mantissa split of one value.
template<typename T>
struct fp_fields {
    bool sign;
    unsigned biased_exponent;
    fp_bits_t<T> mantissa;
};

template<typename T>
constexpr fp_fields<T> split_fields(T v) noexcept {
    using tr = fp_traits<T>;
    const auto b = bits_of(v);
    return fp_fields<T>{
        .sign = (b >> (tr::width - 1)) != 0,
        .biased_exponent =
            static_cast<unsigned>(b >> tr::mantissa_bits) & tr::exponent_mask,
        .mantissa = b & ((fp_bits_t<T>{1} << tr::mantissa_bits) - 1),
    };
}

template<typename T>
constexpr T join_fields(const fp_fields<T>& f) noexcept {
    using tr = fp_traits<T>;
    fp_bits_t<T> b = fp_bits_t<T>{f.sign} << (tr::width - 1);
    b |= fp_bits_t<T>{f.biased_exponent & tr::exponent_mask} << tr::mantissa_bits;
    b |= f.mantissa & ((fp_bits_t<T>{1} << tr::mantissa_bits) - 1);
    return value_of<T>(b);
}

} // namespace falcon
