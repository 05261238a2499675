#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "error.hpp"

namespace falcon {

inline constexpr std::array<std::uint8_t, 8> archive_magic = {
    'F', 'A', 'L', 'C', 'O', 'N', 'A', '\0'};
inline constexpr std::uint16_t archive_version = 1;
inline constexpr std::size_t archive_header_bytes = 47;

enum class precision_tag : std::uint8_t { f64 = 0, f32 = 1 };

// Fixed little-endian archive header; the checksum slot is reserved and
// written as zero.
struct archive_header {
    precision_tag precision = precision_tag::f64;
    std::uint32_t chunk_n = 1025;
    std::uint64_t batch_values = 0;
    std::uint64_t total_values = 0;
    std::uint64_t batch_count = 0;
};

std::array<std::uint8_t, archive_header_bytes> write_header(const archive_header& h);

// Validates magic, version, precision, chunk geometry, and batch accounting.
archive_header read_header(std::span<const std::uint8_t> in);

// Exclusive prefix sum of chunk sizes; byte offsets within a batch payload.
template<typename U>
inline std::vector<std::uint64_t> offsets_from_sizes(std::span<const U> sizes) {
    std::vector<std::uint64_t> offsets(sizes.size());
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        offsets[i] = acc;
        const std::uint64_t next = acc + sizes[i];
        if (next < acc)
            throw error("offsets_from_sizes: offset overflow");
        acc = next;
    }
    return offsets;
}

// One batch on the wire: chunk count, the chunk size array, then the chunk
// payloads back to back.
void append_batch(std::span<const std::vector<std::uint8_t>> chunks,
                  std::vector<std::uint8_t>& out);

struct batch_view {
    std::vector<std::uint32_t> sizes;
    std::span<const std::uint8_t> payload;
    std::size_t wire_bytes = 0; // total consumed from the input
};

batch_view read_batch(std::span<const std::uint8_t> in);

} // namespace falcon
