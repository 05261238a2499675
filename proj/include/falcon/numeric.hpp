#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "error.hpp"
#include "fp_bits.hpp"

namespace falcon {

// Exact powers of ten, 10^0 .. 10^max_alpha. Every entry is exactly
// representable (the mantissa still has room for 5^k), so repeated
// multiplication stays error-free.
namespace detail {

template<typename T>
constexpr auto make_pow10_table() {
    std::array<T, fp_traits<T>::max_alpha + 1> a{};
    T p = 1;
    for (auto& e : a) {
        e = p;
        p *= T{10};
    }
    return a;
}

template<typename T>
inline constexpr auto pow10_table = make_pow10_table<T>();

// Correctly rounded 10^k for k in [min_decade, max_decade], built once at
// startup and immutable afterwards.
template<typename T>
const T* decade_table() noexcept;

} // namespace detail

template<typename T>
constexpr T pow10(int i) {
    return detail::pow10_table<T>[static_cast<unsigned>(i)];
}

// Floor of log2(|v|), straight from the exponent field. pre: v normal.
template<typename T>
inline int floor_log2(T v) noexcept {
    return static_cast<int>(split_fields(v).biased_exponent) -
           fp_traits<T>::exponent_bias;
}

// Position of the leading digit of the shortest decimal form of v, i.e. the
// decimal analogue of floor_log2. Comparison against correctly rounded decade
// values keeps this exact at decade boundaries (floor_log10(1000.0) == 3).
// pre: v normal.
template<typename T>
inline int floor_log10(T v) noexcept {
    using tr = fp_traits<T>;
    const T a = std::abs(v);
    // 78913 / 2^18 ~ log10(2); close enough that one correction step suffices.
    int k = static_cast<int>((static_cast<long long>(floor_log2(v)) * 78913) >> 18);
    if (k < tr::min_decade) k = tr::min_decade;
    if (k > tr::max_decade) k = tr::max_decade;
    const T* d = detail::decade_table<T>();
    while (k > tr::min_decade && a < d[k - tr::min_decade]) --k;
    while (k < tr::max_decade && a >= d[k + 1 - tr::min_decade]) ++k;
    return k;
}

// Unit in the last place: 2^floor_log2(v) scaled to the bottom mantissa bit.
template<typename T>
inline T ulp(T v) {
    if (std::fpclassify(v) != FP_NORMAL)
        throw error("ulp: value must be a nonzero finite normal");
    return std::ldexp(T{1}, floor_log2(v) - fp_traits<T>::mantissa_bits);
}

// Decimal place (fraction digit count) and decimal significand (significant
// digit count) of one value. Values that cannot take the integer path carry
// the out-of-range sentinel pair instead.
struct decimal_meta {
    std::uint8_t alpha = 0;
    std::uint8_t beta = 0;

    friend bool operator==(const decimal_meta&, const decimal_meta&) = default;
};

template<typename T>
constexpr decimal_meta exception_meta() noexcept {
    return {fp_traits<T>::exception_alpha, fp_traits<T>::exception_beta};
}

template<typename T>
constexpr bool is_exception(decimal_meta m) noexcept {
    return m.alpha > fp_traits<T>::max_alpha || m.beta > fp_traits<T>::max_beta;
}

namespace detail {

template<typename T>
struct dp_ds_result {
    decimal_meta meta;
    int iterations;
};

// Scale v by rising powers of ten until the product is provably an integer:
// the gap to the nearest integer must drop to at most one relative rounding
// step of the product. A final division check rejects products that round to
// an integer without reconstructing v.
template<typename T>
inline dp_ds_result<T> dp_ds_calculate_counted(T v) noexcept {
    using tr = fp_traits<T>;
    if (v == T{0}) {
        if (std::signbit(v))
            return {exception_meta<T>(), 0};
        return {decimal_meta{0, 0}, 0};
    }
    if (std::fpclassify(v) != FP_NORMAL)
        return {exception_meta<T>(), 0};
    const int mag = floor_log10(v);
    // Products below one cannot round to a matching integer, so scales under
    // -mag are skipped; the significand count starts at 1 there.
    int alpha = mag < 0 ? -mag : 0;
    int beta = alpha + mag + 1;
    int iterations = 0;
    while (beta <= tr::max_beta && alpha <= tr::max_alpha) {
        ++iterations;
        const T scaled = v * pow10<T>(alpha);
        const T nearest = std::round(scaled);
        const T gap = std::abs(scaled - nearest);
        if (gap <= std::abs(scaled) * tr::rel_eps) {
            if (nearest / pow10<T>(alpha) != v)
                return {exception_meta<T>(), iterations};
            return {decimal_meta{static_cast<std::uint8_t>(alpha),
                                 static_cast<std::uint8_t>(beta)},
                    iterations};
        }
        ++alpha;
        ++beta;
    }
    return {exception_meta<T>(), iterations};
}

} // namespace detail

template<typename T>
inline decimal_meta dp_ds_calculate(T v) noexcept {
    return detail::dp_ds_calculate_counted(v).meta;
}

// Round v * 10^alpha half away from zero to an integer.
template<typename T>
inline std::int64_t decimal_round_scale(T v, int alpha) {
    const T scaled = v * pow10<T>(alpha);
    if (!(std::abs(scaled) < T(0x1p62)))
        throw error("decimal_round_scale: scaled value exceeds 63 bits");
    return std::llround(scaled);
}

// Exact inverse of decimal_round_scale for in-range conversions.
template<typename T>
inline T inverse_scale(std::int64_t g, int alpha) noexcept {
    return static_cast<T>(g) / pow10<T>(alpha);
}

} // namespace falcon
