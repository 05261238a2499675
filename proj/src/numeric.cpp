#include "falcon/numeric.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace falcon::detail {
namespace {

template<typename T, int Min, int Max>
std::array<T, Max - Min + 1> build_decades() {
    std::array<T, Max - Min + 1> t{};
    for (int k = Min; k <= Max; ++k) {
        char buf[16];
        const int len = std::snprintf(buf, sizeof buf, "1e%d", k);
        T parsed{};
        std::from_chars(buf, buf + len, parsed);
        t[static_cast<std::size_t>(k - Min)] = parsed;
    }
    return t;
}

} // namespace

template<>
const double* decade_table<double>() noexcept {
    static const auto table =
        build_decades<double, fp_traits<double>::min_decade,
                      fp_traits<double>::max_decade>();
    return table.data();
}

template<>
const float* decade_table<float>() noexcept {
    static const auto table =
        build_decades<float, fp_traits<float>::min_decade,
                      fp_traits<float>::max_decade>();
    return table.data();
}

} // namespace falcon::detail
