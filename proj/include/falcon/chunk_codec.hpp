#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bitplane.hpp"
#include "transform.hpp"

namespace falcon {

namespace detail {

template<typename B>
inline void store_le(B v, std::uint8_t* p) noexcept {
    for (unsigned i = 0; i < sizeof(B); ++i)
        p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

template<typename B>
inline B load_le(const std::uint8_t* p) noexcept {
    B v = 0;
    for (unsigned i = 0; i < sizeof(B); ++i)
        v |= static_cast<B>(p[i]) << (8 * i);
    return v;
}

} // namespace detail

// Fixed part of one encoded chunk: scale byte, significand byte, first lane
// verbatim (little-endian, lane width), plane count byte. The plane flags
// (one bit per row, big-endian, dense = 1) and the row data follow.
template<typename T>
inline constexpr std::size_t chunk_header_bytes = 3 + sizeof(fp_bits_t<T>);

template<typename T>
constexpr std::size_t max_encoded_chunk_size(std::size_t n) noexcept {
    using tr = fp_traits<T>;
    return chunk_header_bytes<T> + static_cast<std::size_t>(tr::width + 7) / 8 +
           static_cast<std::size_t>(tr::width) * ((n - 1) / 8);
}

// Reusable scratch so per-chunk work allocates nothing in steady state.
template<typename T>
struct chunk_workspace {
    std::vector<fp_bits_t<T>> z;
    bit_plane_image img;
};

template<typename T>
inline void compress_chunk(std::span<const T> values, chunk_workspace<T>& ws,
                           std::vector<std::uint8_t>& out) {
    using B = fp_bits_t<T>;
    const std::size_t n = values.size();
    const chunk_meta h = analyze_chunk(values);
    forward_transform(values, h, ws.z);
    build_planes<B>(ws.z, ws.img);
    const int w = ws.img.w;
    const std::size_t base = out.size();
    out.resize(base + chunk_header_bytes<T>);
    out[base] = h.alpha_max;
    out[base + 1] = h.beta_hat_max;
    detail::store_le(ws.z[0], out.data() + base + 2);
    out[base + 2 + sizeof(B)] = static_cast<std::uint8_t>(w);
    if (w == 0)
        return;
    const std::size_t flag_bytes = static_cast<std::size_t>(w + 7) / 8;
    const std::size_t flags_at = out.size();
    out.resize(flags_at + flag_bytes, 0);
    const std::uint64_t flags = encode_rows(ws.img, n, out);
    for (std::size_t i = 0; i < flag_bytes; ++i)
        out[flags_at + i] =
            static_cast<std::uint8_t>(flags >> (8 * (flag_bytes - 1 - i)));
}

template<typename T>
inline std::vector<std::uint8_t> compress_chunk(std::span<const T> values) {
    chunk_workspace<T> ws;
    std::vector<std::uint8_t> out;
    compress_chunk(values, ws, out);
    return out;
}

// `in` must span exactly one encoded chunk; `count` values of the n decoded
// lanes are emitted (the padded tail of a final chunk is dropped).
template<typename T>
inline void decompress_chunk(std::span<const std::uint8_t> in, std::size_t n,
                             std::size_t count, chunk_workspace<T>& ws,
                             std::vector<T>& out) {
    using B = fp_bits_t<T>;
    using tr = fp_traits<T>;
    if (count > n)
        throw error("decompress_chunk: count exceeds chunk capacity");
    if (in.size() < chunk_header_bytes<T>)
        throw corrupt_error("chunk header truncated");
    const chunk_meta h{in[0], in[1]};
    if (is_case2<T>(h) && h != chunk_sentinel<T>())
        throw corrupt_error("chunk meta bytes out of range");
    const B z1 = detail::load_le<B>(in.data() + 2);
    const int w = in[2 + sizeof(B)];
    if (w > tr::width)
        throw corrupt_error("plane count out of range");
    std::size_t pos = chunk_header_bytes<T>;
    std::uint64_t flags = 0;
    if (w > 0) {
        const std::size_t flag_bytes = static_cast<std::size_t>(w + 7) / 8;
        if (in.size() - pos < flag_bytes)
            throw corrupt_error("plane flags truncated");
        for (std::size_t i = 0; i < flag_bytes; ++i)
            flags = flags << 8 | in[pos + i];
        if (flag_bytes * 8 > static_cast<std::size_t>(w) && flags >> w != 0)
            throw corrupt_error("nonzero flag padding bits");
        pos += flag_bytes;
    }
    pos += decode_rows(in.subspan(pos), flags, w, n, ws.img);
    if (pos != in.size())
        throw corrupt_error("chunk size mismatch");
    ws.z.assign(n, 0);
    ws.z[0] = z1;
    untranspose_planes(ws.img, std::span<B>(ws.z));
    inverse_transform<T>(std::span<const B>(ws.z), h, count, out);
}

template<typename T>
inline std::vector<T> decompress_chunk(std::span<const std::uint8_t> in,
                                       std::size_t n, std::size_t count) {
    chunk_workspace<T> ws;
    std::vector<T> out;
    decompress_chunk(in, n, count, ws, out);
    return out;
}

} // namespace falcon
