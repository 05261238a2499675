#include "oracle.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>

#include "falcon/error.hpp"

namespace falcon::oracle {
namespace {

template<typename T>
struct bounds;

template<>
struct bounds<double> {
    static constexpr int max_dp = 22, max_ds = 15;
    static constexpr std::uint8_t exc_dp = 23, exc_ds = 16;
    static constexpr int lanes = 64;
};

template<>
struct bounds<float> {
    static constexpr int max_dp = 10, max_ds = 6;
    static constexpr std::uint8_t exc_dp = 11, exc_ds = 7;
    static constexpr int lanes = 32;
};

template<typename T>
using lane_t = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;

template<typename T>
T naive_pow10(int k) {
    T p = 1;
    for (int i = 0; i < k; ++i)
        p *= T{10};
    return p;
}

template<typename U, typename S>
U naive_zigzag(S x) {
    return x < 0 ? static_cast<U>(-(x + 1)) * 2 + 1 : static_cast<U>(x) * 2;
}

template<typename U>
std::make_signed_t<U> naive_unzigzag(U z) {
    using S = std::make_signed_t<U>;
    return z & 1 ? static_cast<S>(-static_cast<S>(z >> 1) - 1)
                 : static_cast<S>(z >> 1);
}

template<typename T>
std::optional<decimal_counts> dp_oracle_impl(T v) {
    if (v == T{0}) {
        if (std::signbit(v))
            return std::nullopt;
        return decimal_counts{0, 0};
    }
    if (!std::isfinite(v) || std::fpclassify(v) == FP_SUBNORMAL)
        return std::nullopt;
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string_view s(buf, static_cast<std::size_t>(res.ptr - buf));
    if (s.front() == '-')
        s.remove_prefix(1);
    int e10 = 0;
    if (const auto epos = s.find('e'); epos != std::string_view::npos) {
        const auto tail = s.substr(epos + 1);
        std::from_chars(tail.data() + (tail.front() == '+'), tail.data() + tail.size(), e10);
        s = s.substr(0, epos);
    }
    std::string digits;
    int frac = 0;
    bool seen_dot = false;
    for (const char c : s) {
        if (c == '.') {
            seen_dot = true;
            continue;
        }
        digits.push_back(c);
        if (seen_dot)
            ++frac;
    }
    // value = digits x 10^q with q the position of the last kept digit
    int q = e10 - frac;
    const std::size_t last = digits.find_last_not_of('0');
    q += static_cast<int>(digits.size() - 1 - last);
    digits.erase(last + 1);
    digits.erase(0, digits.find_first_not_of('0'));
    const int dp = q < 0 ? -q : 0;
    const int ds = static_cast<int>(digits.size()) + (q > 0 ? q : 0);
    if (dp > bounds<T>::max_dp || ds > bounds<T>::max_ds)
        return std::nullopt;
    return decimal_counts{dp, ds};
}

template<typename T>
std::vector<std::uint8_t> naive_compress_chunk_impl(std::span<const T> values) {
    using U = lane_t<T>;
    using S = std::make_signed_t<U>;
    const std::size_t n = values.size();

    bool exceptional = false;
    int alpha_max = 0;
    T vmax{0};
    for (const T v : values) {
        const auto c = dp_oracle_impl(v);
        if (!c) {
            exceptional = true;
            break;
        }
        alpha_max = std::max(alpha_max, c->dp);
        vmax = std::max(vmax, std::abs(v));
    }
    int beta_hat = 0;
    if (!exceptional && vmax != T{0}) {
        const auto c = dp_oracle_impl(vmax);
        beta_hat = alpha_max + c->ds - c->dp;
    }
    if (!exceptional && beta_hat > bounds<T>::max_ds)
        exceptional = true;

    std::vector<U> lanes(n);
    if (exceptional) {
        for (std::size_t i = 0; i < n; ++i)
            lanes[i] = naive_zigzag<U>(static_cast<S>(std::bit_cast<U>(values[i])));
    } else {
        const T scale = naive_pow10<T>(alpha_max);
        for (std::size_t i = 0; i < n; ++i)
            lanes[i] = static_cast<U>(
                static_cast<S>(std::llround(values[i] * scale)));
    }
    std::vector<U> z(n);
    z[0] = lanes[0];
    for (std::size_t i = 1; i < n; ++i)
        z[i] = naive_zigzag<U>(
            static_cast<S>(static_cast<U>(lanes[i] - lanes[i - 1])));

    int w = 0;
    for (std::size_t i = 1; i < n; ++i)
        for (int b = 0; b < bounds<T>::lanes; ++b)
            if (z[i] >> b & 1)
                w = std::max(w, b + 1);

    std::vector<std::uint8_t> out;
    out.push_back(exceptional ? bounds<T>::exc_dp
                              : static_cast<std::uint8_t>(alpha_max));
    out.push_back(exceptional ? bounds<T>::exc_ds
                              : static_cast<std::uint8_t>(beta_hat));
    for (unsigned byte = 0; byte < sizeof(U); ++byte)
        out.push_back(static_cast<std::uint8_t>(z[0] >> (8 * byte)));
    out.push_back(static_cast<std::uint8_t>(w));
    if (w == 0)
        return out;

    const std::size_t cols = n - 1;
    const std::size_t row_bytes = cols / 8;
    const std::size_t bitmap_bytes = cols / 64;
    std::vector<std::vector<std::uint8_t>> rows(
        static_cast<std::size_t>(w), std::vector<std::uint8_t>(row_bytes, 0));
    for (int r = 0; r < w; ++r) {
        const int plane = w - 1 - r;
        for (std::size_t j = 0; j < cols; ++j)
            if (z[1 + j] >> plane & 1)
                rows[static_cast<std::size_t>(r)][j / 8] |=
                    static_cast<std::uint8_t>(0x80u >> (j % 8));
    }
    std::vector<bool> dense(static_cast<std::size_t>(w));
    for (int r = 0; r < w; ++r) {
        std::size_t zero = 0;
        for (const auto b : rows[static_cast<std::size_t>(r)])
            zero += b == 0;
        dense[static_cast<std::size_t>(r)] = zero <= bitmap_bytes; // tie: dense
    }
    const std::size_t flag_bytes = static_cast<std::size_t>(w + 7) / 8;
    std::vector<std::uint8_t> flags(flag_bytes, 0);
    for (int r = 0; r < w; ++r)
        if (dense[static_cast<std::size_t>(r)]) {
            const int bit = w - 1 - r;
            flags[flag_bytes - 1 - static_cast<std::size_t>(bit / 8)] |=
                static_cast<std::uint8_t>(1u << (bit % 8));
        }
    out.insert(out.end(), flags.begin(), flags.end());
    for (int r = 0; r < w; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (dense[static_cast<std::size_t>(r)]) {
            out.insert(out.end(), row.begin(), row.end());
            continue;
        }
        std::vector<std::uint8_t> bitmap(bitmap_bytes, 0);
        for (std::size_t j = 0; j < row_bytes; ++j)
            if (row[j] != 0)
                bitmap[j / 8] |= static_cast<std::uint8_t>(0x80u >> (j % 8));
        out.insert(out.end(), bitmap.begin(), bitmap.end());
        for (std::size_t j = 0; j < row_bytes; ++j)
            if (row[j] != 0)
                out.push_back(row[j]);
    }
    return out;
}

template<typename T>
std::vector<T> naive_decompress_chunk_impl(std::span<const std::uint8_t> in,
                                           std::size_t n, std::size_t count) {
    using U = lane_t<T>;
    using S = std::make_signed_t<U>;
    const std::size_t header = 3 + sizeof(U);
    if (in.size() < header)
        throw error("oracle: chunk too small");
    const int a = in[0];
    const int bh = in[1];
    const bool exceptional =
        a == bounds<T>::exc_dp && bh == bounds<T>::exc_ds;
    U z1 = 0;
    for (unsigned byte = 0; byte < sizeof(U); ++byte)
        z1 |= static_cast<U>(in[2 + byte]) << (8 * byte);
    const int w = in[2 + sizeof(U)];
    std::size_t pos = header;
    std::vector<bool> dense(static_cast<std::size_t>(w), false);
    if (w > 0) {
        const std::size_t flag_bytes = static_cast<std::size_t>(w + 7) / 8;
        for (int r = 0; r < w; ++r) {
            const int bit = w - 1 - r;
            dense[static_cast<std::size_t>(r)] =
                in[pos + flag_bytes - 1 - static_cast<std::size_t>(bit / 8)] >>
                    (bit % 8) &
                1;
        }
        pos += flag_bytes;
    }
    const std::size_t cols = n - 1;
    const std::size_t row_bytes = cols / 8;
    const std::size_t bitmap_bytes = cols / 64;
    std::vector<U> z(n, 0);
    z[0] = z1;
    std::vector<std::uint8_t> row(row_bytes);
    for (int r = 0; r < w; ++r) {
        const int plane = w - 1 - r;
        std::fill(row.begin(), row.end(), 0);
        if (dense[static_cast<std::size_t>(r)]) {
            std::memcpy(row.data(), in.data() + pos, row_bytes);
            pos += row_bytes;
        } else {
            const std::uint8_t* bitmap = in.data() + pos;
            pos += bitmap_bytes;
            for (std::size_t j = 0; j < row_bytes; ++j)
                if (bitmap[j / 8] >> (7 - j % 8) & 1)
                    row[j] = in[pos++];
        }
        for (std::size_t j = 0; j < cols; ++j)
            if (row[j / 8] >> (7 - j % 8) & 1)
                z[1 + j] |= U{1} << plane;
    }
    std::vector<T> out(count);
    U g = 0;
    for (std::size_t i = 0; i < count; ++i) {
        g = i == 0 ? z[0] : g + static_cast<U>(naive_unzigzag(z[i]));
        if (exceptional)
            out[i] = std::bit_cast<T>(static_cast<U>(naive_unzigzag(g)));
        else
            out[i] = static_cast<T>(static_cast<S>(g)) / naive_pow10<T>(a);
    }
    return out;
}

} // namespace

template<typename T>
std::optional<decimal_counts> dp_oracle(T v) {
    return dp_oracle_impl(v);
}

template<typename T>
std::vector<std::uint8_t> naive_compress_chunk(std::span<const T> values) {
    return naive_compress_chunk_impl(values);
}

template<typename T>
std::vector<T> naive_decompress_chunk(std::span<const std::uint8_t> bytes,
                                      std::size_t n, std::size_t count) {
    return naive_decompress_chunk_impl<T>(bytes, n, count);
}

template std::optional<decimal_counts> dp_oracle<double>(double);
template std::optional<decimal_counts> dp_oracle<float>(float);
template std::vector<std::uint8_t>
naive_compress_chunk<double>(std::span<const double>);
template std::vector<std::uint8_t>
naive_compress_chunk<float>(std::span<const float>);
template std::vector<double>
naive_decompress_chunk<double>(std::span<const std::uint8_t>, std::size_t, std::size_t);
template std::vector<float>
naive_decompress_chunk<float>(std::span<const std::uint8_t>, std::size_t, std::size_t);

} // namespace falcon::oracle
