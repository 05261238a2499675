#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

#include "numeric.hpp"

namespace falcon {

template<typename B>
constexpr B zigzag_encode(std::make_signed_t<B> x) noexcept {
    constexpr int top = std::numeric_limits<B>::digits - 1;
    return (static_cast<B>(x) << 1) ^ static_cast<B>(x >> top);
}

template<typename B>
constexpr std::make_signed_t<B> zigzag_decode(B z) noexcept {
    return static_cast<std::make_signed_t<B>>((z >> 1) ^ (B{0} - (z & B{1})));
}

// Per-chunk header metadata: the shared scale and the significand bound after
// scaling. Chunks whose values cannot all take the integer path carry the
// sentinel pair and fall back to encoding raw bit patterns.
struct chunk_meta {
    std::uint8_t alpha_max = 0;
    std::uint8_t beta_hat_max = 0;

    friend bool operator==(const chunk_meta&, const chunk_meta&) = default;
};

template<typename T>
constexpr chunk_meta chunk_sentinel() noexcept {
    return {fp_traits<T>::exception_alpha, fp_traits<T>::exception_beta};
}

template<typename T>
constexpr bool is_case2(chunk_meta h) noexcept {
    return h.alpha_max > fp_traits<T>::max_alpha ||
           h.beta_hat_max > fp_traits<T>::max_beta;
}

// Decide how a chunk is encoded: the widest decimal place of any value plus
// the significand count of the largest magnitude once scaled to that place.
template<typename T>
inline chunk_meta analyze_chunk(std::span<const T> values) noexcept {
    using tr = fp_traits<T>;
    int alpha_max = 0;
    T v_max{0};
    for (const T v : values) {
        const decimal_meta m = dp_ds_calculate(v);
        if (is_exception<T>(m))
            return chunk_sentinel<T>();
        if (m.alpha > alpha_max)
            alpha_max = m.alpha;
        const T a = std::abs(v);
        if (a > v_max)
            v_max = a;
    }
    const int beta_hat =
        v_max == T{0} ? 0 : alpha_max + floor_log10(v_max) + 1;
    if (alpha_max > tr::max_alpha || beta_hat > tr::max_beta)
        return chunk_sentinel<T>();
    return {static_cast<std::uint8_t>(alpha_max),
            static_cast<std::uint8_t>(beta_hat)};
}

// Values -> integer lanes -> zigzagged first-order deltas. z[0] keeps the
// first lane verbatim; all arithmetic wraps.
template<typename T>
inline void forward_transform(std::span<const T> values, chunk_meta h,
                              std::vector<fp_bits_t<T>>& z) {
    using B = fp_bits_t<T>;
    using S = typename fp_traits<T>::sbits_type;
    const std::size_t n = values.size();
    z.resize(n);
    if (is_case2<T>(h)) {
        for (std::size_t i = 0; i < n; ++i)
            z[i] = zigzag_encode<B>(static_cast<S>(bits_of(values[i])));
    } else {
        for (std::size_t i = 0; i < n; ++i)
            z[i] = static_cast<B>(static_cast<S>(
                decimal_round_scale(values[i], h.alpha_max)));
    }
    for (std::size_t i = n; i-- > 1;)
        z[i] = zigzag_encode<B>(static_cast<S>(z[i] - z[i - 1]));
}

template<typename T>
inline void inverse_transform(std::span<const fp_bits_t<T>> z, chunk_meta h,
                              std::size_t count, std::vector<T>& values) {
    using B = fp_bits_t<T>;
    using S = typename fp_traits<T>::sbits_type;
    values.resize(count);
    const bool raw = is_case2<T>(h);
    B g = 0;
    for (std::size_t i = 0; i < count; ++i) {
        g = i == 0 ? z[0] : g + static_cast<B>(zigzag_decode(z[i]));
        if (raw)
            values[i] = value_of<T>(static_cast<B>(zigzag_decode(g)));
        else
            values[i] = inverse_scale<T>(static_cast<S>(g), h.alpha_max);
    }
}

} // namespace falcon
