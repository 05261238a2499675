#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "falcon/bitplane.hpp"

using namespace falcon;

namespace {

// reference transpose, one bit at a time
void transpose_naive(const std::uint64_t in[64], std::uint64_t out[64]) {
    for (int i = 0; i < 64; ++i) {
        out[i] = 0;
        for (int j = 0; j < 64; ++j) {
            const std::uint64_t bit = in[j] >> (63 - i) & 1;
            out[i] |= bit << (63 - j);
        }
    }
}

std::vector<std::uint64_t> random_lanes(std::mt19937_64& rng, std::size_t n, int w) {
    std::vector<std::uint64_t> z(n);
    const std::uint64_t mask = w == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w) - 1;
    for (auto& x : z)
        x = rng() & mask;
    return z;
}

} // namespace

TEST_CASE("block transpose matches the naive reference") {
    std::mt19937_64 rng(21);
    std::uint64_t a[64], b[64];
    for (int rep = 0; rep < 500; ++rep) {
        for (auto& x : a)
            x = rng();
        transpose_naive(a, b);
        transpose_bits_64(a);
        for (int i = 0; i < 64; ++i)
            REQUIRE(a[i] == b[i]);
    }
}

TEST_CASE("block transpose is an involution") {
    std::mt19937_64 rng(22);
    std::uint64_t a[64], orig[64];
    for (auto& x : a)
        x = rng();
    std::memcpy(orig, a, sizeof a);
    transpose_bits_64(a);
    transpose_bits_64(a);
    for (int i = 0; i < 64; ++i)
        CHECK(a[i] == orig[i]);
}

TEST_CASE("big endian word store and load") {
    std::uint8_t buf[8];
    store_be64(0x0102030405060708ull, buf);
    CHECK(buf[0] == 1);
    CHECK(buf[7] == 8);
    CHECK(load_be64(buf) == 0x0102030405060708ull);
}

TEST_CASE("plane image layout against a per-bit reference") {
    std::mt19937_64 rng(23);
    for (const std::size_t n : {std::size_t{65}, std::size_t{129}, std::size_t{1025}}) {
        for (const int w : {1, 5, 9, 31, 64}) {
            const auto z = random_lanes(rng, n, w);
            bit_plane_image img;
            build_planes<std::uint64_t>(z, img);
            REQUIRE(img.row_bytes == (n - 1) / 8);
            std::uint64_t all = 0;
            for (std::size_t i = 1; i < n; ++i)
                all |= z[i];
            REQUIRE(img.w == std::bit_width(all));
            for (int r = 0; r < img.w; ++r) {
                const int bit = img.w - 1 - r; // row 0 is the top plane
                std::uint32_t zeros = 0;
                for (std::size_t j = 0; j + 1 < n; ++j) {
                    const unsigned expect =
                        static_cast<unsigned>(z[1 + j] >> bit & 1);
                    const unsigned got =
                        img.row(r)[j / 8] >> (7 - j % 8) & 1;
                    REQUIRE(got == expect);
                }
                for (std::size_t j = 0; j < img.row_bytes; ++j)
                    zeros += img.row(r)[j] == 0;
                REQUIRE(img.zero_bytes[static_cast<std::size_t>(r)] == zeros);
            }
        }
    }
}

TEST_CASE("an all-zero tail produces an empty image") {
    std::vector<std::uint64_t> z(65, 0);
    z[0] = 123456; // first lane is carried outside the planes
    bit_plane_image img;
    build_planes<std::uint64_t>(z, img);
    CHECK(img.w == 0);
    CHECK(img.rows.empty());
}

TEST_CASE("untranspose recovers the lanes") {
    std::mt19937_64 rng(24);
    for (const std::size_t n : {std::size_t{65}, std::size_t{1025}}) {
        for (const int w : {1, 7, 33, 64}) {
            auto z = random_lanes(rng, n, w);
            bit_plane_image img;
            build_planes<std::uint64_t>(z, img);
            std::vector<std::uint64_t> back(n, 0);
            back[0] = z[0];
            untranspose_planes<std::uint64_t>(img, back);
            REQUIRE(back == z);
        }
    }
}

TEST_CASE("32-bit lanes go through the same planes") {
    std::mt19937_64 rng(25);
    std::vector<std::uint32_t> z(257);
    for (auto& x : z)
        x = static_cast<std::uint32_t>(rng());
    bit_plane_image img;
    build_planes<std::uint32_t>(z, img);
    CHECK(img.w <= 32);
    std::vector<std::uint32_t> back(z.size(), 0);
    back[0] = z[0];
    untranspose_planes<std::uint32_t>(img, back);
    CHECK(back == z);
}

TEST_CASE("scheme selection pays for the bitmap") {
    // n=1025: 128-byte rows, 16-byte bitmap
    CHECK(select_scheme(17, 1025) == row_scheme::sparse);
    CHECK(select_scheme(16, 1025) == row_scheme::dense);
    CHECK(select_scheme(0, 1025) == row_scheme::dense);
    CHECK(select_scheme(128, 1025) == row_scheme::sparse);
    CHECK(row_encoded_size(16, 1025) == 128);
    CHECK(row_encoded_size(17, 1025) == 16 + 128 - 17);
    CHECK(row_encoded_size(128, 1025) == 16);
    // n=65: 8-byte rows, 1-byte bitmap; an empty row costs a single byte
    CHECK(select_scheme(8, 65) == row_scheme::sparse);
    CHECK(row_encoded_size(8, 65) == 1);
    CHECK(select_scheme(1, 65) == row_scheme::dense);
}

TEST_CASE("row codec round trips and flags mark the dense rows") {
    std::mt19937_64 rng(26);
    for (int rep = 0; rep < 400; ++rep) {
        const std::size_t n = 1 + 64 * (1 + rng() % 16);
        const int w = 1 + static_cast<int>(rng() % 64);
        auto z = random_lanes(rng, n, w);
        // zero out a random span of lanes so some rows go sparse
        const std::size_t cut = rng() % n;
        for (std::size_t i = 1 + cut; i < n; ++i)
            z[i] = 0;
        bit_plane_image img;
        build_planes<std::uint64_t>(z, img);

        std::vector<std::uint8_t> buf;
        const std::uint64_t flags = encode_rows(img, n, buf);
        std::size_t expect_size = 0;
        for (int r = 0; r < img.w; ++r) {
            const auto zb = img.zero_bytes[static_cast<std::size_t>(r)];
            expect_size += row_encoded_size(zb, n);
            const bool dense_bit = flags >> (img.w - 1 - r) & 1;
            REQUIRE(dense_bit == (select_scheme(zb, n) == row_scheme::dense));
        }
        REQUIRE(buf.size() == expect_size);

        bit_plane_image out;
        const std::size_t used = decode_rows(buf, flags, img.w, n, out);
        REQUIRE(used == buf.size());
        REQUIRE(out.rows == img.rows);
        REQUIRE(out.zero_bytes == img.zero_bytes);
    }
}

TEST_CASE("decode rejects truncated input") {
    std::mt19937_64 rng(27);
    const std::size_t n = 129;
    auto z = random_lanes(rng, n, 12);
    for (std::size_t i = 40; i < n; ++i)
        z[i] = 0;
    bit_plane_image img;
    build_planes<std::uint64_t>(z, img);
    std::vector<std::uint8_t> buf;
    const std::uint64_t flags = encode_rows(img, n, buf);
    bit_plane_image out;
    for (std::size_t keep = 0; keep < buf.size(); ++keep) {
        CHECK_THROWS_AS(
            decode_rows(std::span(buf.data(), keep), flags, img.w, n, out),
            corrupt_error);
    }
}
