#include "falcon/container.hpp"

#include <cstring>
#include <limits>

namespace falcon {
namespace {

void put_u16(std::uint16_t v, std::uint8_t* p) {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
}

void put_u32(std::uint32_t v, std::uint8_t* p) {
    for (int i = 0; i < 4; ++i)
        p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void put_u64(std::uint64_t v, std::uint8_t* p) {
    for (int i = 0; i < 8; ++i)
        p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

std::uint32_t get_u32(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

} // namespace

std::array<std::uint8_t, archive_header_bytes> write_header(const archive_header& h) {
    std::array<std::uint8_t, archive_header_bytes> out{};
    std::memcpy(out.data(), archive_magic.data(), archive_magic.size());
    put_u16(archive_version, out.data() + 8);
    out[10] = static_cast<std::uint8_t>(h.precision);
    put_u32(h.chunk_n, out.data() + 11);
    put_u64(h.batch_values, out.data() + 15);
    put_u64(h.total_values, out.data() + 23);
    put_u64(h.batch_count, out.data() + 31);
    put_u64(0, out.data() + 39); // reserved checksum
    return out;
}

archive_header read_header(std::span<const std::uint8_t> in) {
    if (in.size() < archive_header_bytes)
        throw corrupt_error("archive header truncated");
    if (std::memcmp(in.data(), archive_magic.data(), archive_magic.size()) != 0)
        throw corrupt_error("bad archive magic");
    if (get_u16(in.data() + 8) != archive_version)
        throw corrupt_error("unsupported archive version");
    archive_header h;
    const std::uint8_t prec = in[10];
    if (prec > 1)
        throw corrupt_error("unknown precision tag");
    h.precision = static_cast<precision_tag>(prec);
    h.chunk_n = get_u32(in.data() + 11);
    if (h.chunk_n < 65 || (h.chunk_n - 1) % 64 != 0)
        throw corrupt_error("invalid chunk length");
    h.batch_values = get_u64(in.data() + 15);
    h.total_values = get_u64(in.data() + 23);
    h.batch_count = get_u64(in.data() + 31);
    if (h.batch_values == 0 && h.total_values != 0)
        throw corrupt_error("zero batch size with nonzero value count");
    if (h.batch_values != 0) {
        const std::uint64_t expect =
            (h.total_values + h.batch_values - 1) / h.batch_values;
        if (expect != h.batch_count)
            throw corrupt_error("batch count disagrees with value count");
    } else if (h.batch_count != 0) {
        throw corrupt_error("batch count disagrees with value count");
    }
    return h;
}

void append_batch(std::span<const std::vector<std::uint8_t>> chunks,
                  std::vector<std::uint8_t>& out) {
    if (chunks.size() > std::numeric_limits<std::uint32_t>::max())
        throw error("append_batch: too many chunks");
    std::size_t payload = 0;
    for (const auto& c : chunks) {
        if (c.size() > std::numeric_limits<std::uint32_t>::max())
            throw error("append_batch: chunk too large");
        payload += c.size();
    }
    const std::size_t base = out.size();
    out.resize(base + 4 + 4 * chunks.size() + payload);
    std::uint8_t* p = out.data() + base;
    put_u32(static_cast<std::uint32_t>(chunks.size()), p);
    p += 4;
    for (const auto& c : chunks) {
        put_u32(static_cast<std::uint32_t>(c.size()), p);
        p += 4;
    }
    for (const auto& c : chunks) {
        std::memcpy(p, c.data(), c.size());
        p += c.size();
    }
}

batch_view read_batch(std::span<const std::uint8_t> in) {
    if (in.size() < 4)
        throw corrupt_error("batch header truncated");
    const std::uint32_t count = get_u32(in.data());
    const std::size_t table_end = 4 + std::size_t{4} * count;
    if (in.size() < table_end)
        throw corrupt_error("batch size table truncated");
    batch_view view;
    view.sizes.resize(count);
    std::uint64_t payload = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
        view.sizes[i] = get_u32(in.data() + 4 + std::size_t{4} * i);
        payload += view.sizes[i];
    }
    if (in.size() - table_end < payload)
        throw corrupt_error("batch payload truncated");
    view.payload = in.subspan(table_end, payload);
    view.wire_bytes = table_end + payload;
    return view;
}

} // namespace falcon
