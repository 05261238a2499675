#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "error.hpp"
#include "fp_bits.hpp"

namespace falcon {

// 64x64 bit matrix transpose, rows as words, columns counted from the most
// significant bit. Standard block-swap scheme; it is its own inverse.
inline void transpose_bits_64(std::uint64_t x[64]) noexcept {
    std::uint64_t m = 0x00000000ffffffffull;
    for (unsigned j = 32; j != 0; j >>= 1, m ^= m << j) {
        for (unsigned k = 0; k < 64; k = (k + j + 1) & ~j) {
            const std::uint64_t t = (x[k] ^ (x[k + j] >> j)) & m;
            x[k] ^= t;
            x[k + j] ^= t << j;
        }
    }
}

inline void store_be64(std::uint64_t v, std::uint8_t* dst) noexcept {
    for (int i = 0; i < 8; ++i)
        dst[i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
}

inline std::uint64_t load_be64(const std::uint8_t* src) noexcept {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v = v << 8 | src[i];
    return v;
}

// Transposed bit planes of the delta lanes z[1..n): row 0 holds the highest
// retained bit of every lane, each row is (n-1)/8 bytes, lane j sits at byte
// j/8 bit 7-(j%8). Leading all-zero planes are dropped entirely: w counts
// only the planes at or below the highest set bit anywhere.
struct bit_plane_image {
    int w = 0;
    std::size_t row_bytes = 0;
    std::vector<std::uint8_t> rows;        // w * row_bytes
    std::vector<std::uint32_t> zero_bytes; // per row

    std::uint8_t* row(int r) noexcept { return rows.data() + static_cast<std::size_t>(r) * row_bytes; }
    const std::uint8_t* row(int r) const noexcept { return rows.data() + static_cast<std::size_t>(r) * row_bytes; }
};

namespace detail {

inline std::uint32_t count_zero_bytes(const std::uint8_t* p, std::size_t len) noexcept {
    std::uint32_t c = 0;
    for (std::size_t i = 0; i < len; ++i)
        c += p[i] == 0;
    return c;
}

} // namespace detail

template<typename B>
inline void build_planes(std::span<const B> z, bit_plane_image& img) {
    const std::size_t n = z.size();
    const std::size_t groups = (n - 1) / 64;
    B all = 0;
    for (std::size_t i = 1; i < n; ++i)
        all |= z[i];
    const int w = std::bit_width(all);
    img.w = w;
    img.row_bytes = (n - 1) / 8;
    img.rows.assign(static_cast<std::size_t>(w) * img.row_bytes, 0);
    img.zero_bytes.assign(static_cast<std::size_t>(w), 0);
    if (w == 0)
        return;
    std::uint64_t block[64];
    for (std::size_t g = 0; g < groups; ++g) {
        const B* src = z.data() + 1 + g * 64;
        for (int j = 0; j < 64; ++j)
            block[j] = src[j];
        transpose_bits_64(block);
        for (int r = 0; r < w; ++r)
            store_be64(block[64 - w + r], img.row(r) + g * 8);
    }
    for (int r = 0; r < w; ++r)
        img.zero_bytes[static_cast<std::size_t>(r)] =
            detail::count_zero_bytes(img.row(r), img.row_bytes);
}

// Rebuild the delta lanes from decoded planes; z[0] is left untouched.
template<typename B>
inline void untranspose_planes(const bit_plane_image& img, std::span<B> z) {
    const std::size_t groups = (z.size() - 1) / 64;
    const int w = img.w;
    std::uint64_t block[64];
    for (std::size_t g = 0; g < groups; ++g) {
        std::memset(block, 0, sizeof block);
        for (int r = 0; r < w; ++r)
            block[64 - w + r] = load_be64(img.row(r) + g * 8);
        transpose_bits_64(block);
        B* dst = z.data() + 1 + g * 64;
        for (int j = 0; j < 64; ++j)
            dst[j] = static_cast<B>(block[j]);
    }
}

enum class row_scheme : std::uint8_t { sparse, dense };

// A row goes sparse when more than 1/8 of its bytes are zero, i.e. when the
// bitmap pays for itself; ties go dense.
inline row_scheme select_scheme(std::size_t zero_bytes, std::size_t n) noexcept {
    return zero_bytes > (n - 1) / 64 ? row_scheme::sparse : row_scheme::dense;
}

inline std::size_t row_encoded_size(std::size_t zero_bytes, std::size_t n) noexcept {
    const std::size_t row_bytes = (n - 1) / 8;
    if (select_scheme(zero_bytes, n) == row_scheme::dense)
        return row_bytes;
    return (n - 1) / 64 + (row_bytes - zero_bytes);
}

// Serialize every row, sparse or dense per its zero-byte count. Returns the
// dense flags as a bitmask with row r at bit (w-1-r).
inline std::uint64_t encode_rows(const bit_plane_image& img, std::size_t n,
                                 std::vector<std::uint8_t>& out) {
    const std::size_t bitmap_bytes = (n - 1) / 64;
    std::uint64_t flags = 0;
    for (int r = 0; r < img.w; ++r) {
        const std::uint8_t* row = img.row(r);
        if (select_scheme(img.zero_bytes[static_cast<std::size_t>(r)], n) ==
            row_scheme::dense) {
            flags |= std::uint64_t{1} << (img.w - 1 - r);
            out.insert(out.end(), row, row + img.row_bytes);
            continue;
        }
        const std::size_t base = out.size();
        out.resize(base + bitmap_bytes, 0);
        for (std::size_t j = 0; j < img.row_bytes; ++j)
            if (row[j] != 0)
                out[base + j / 8] |= static_cast<std::uint8_t>(0x80u >> (j % 8));
        for (std::size_t j = 0; j < img.row_bytes; ++j)
            if (row[j] != 0)
                out.push_back(row[j]);
    }
    return flags;
}

// Inverse of encode_rows; consumes bytes from the front of `in` and returns
// the consumed count. Throws on truncation.
inline std::size_t decode_rows(std::span<const std::uint8_t> in,
                               std::uint64_t flags, int w, std::size_t n,
                               bit_plane_image& img) {
    const std::size_t row_bytes = (n - 1) / 8;
    const std::size_t bitmap_bytes = (n - 1) / 64;
    img.w = w;
    img.row_bytes = row_bytes;
    img.rows.assign(static_cast<std::size_t>(w) * row_bytes, 0);
    img.zero_bytes.assign(static_cast<std::size_t>(w), 0);
    std::size_t pos = 0;
    for (int r = 0; r < w; ++r) {
        std::uint8_t* row = img.row(r);
        if (flags >> (w - 1 - r) & 1) {
            if (in.size() - pos < row_bytes)
                throw corrupt_error("row data truncated");
            std::memcpy(row, in.data() + pos, row_bytes);
            pos += row_bytes;
        } else {
            if (in.size() - pos < bitmap_bytes)
                throw corrupt_error("row bitmap truncated");
            const std::uint8_t* bitmap = in.data() + pos;
            pos += bitmap_bytes;
            for (std::size_t j = 0; j < row_bytes; ++j) {
                if (bitmap[j / 8] >> (7 - j % 8) & 1) {
                    if (pos >= in.size())
                        throw corrupt_error("row payload truncated");
                    row[j] = in[pos++];
                }
            }
        }
        img.zero_bytes[static_cast<std::size_t>(r)] =
            detail::count_zero_bytes(row, row_bytes);
    }
    return pos;
}

} // namespace falcon
