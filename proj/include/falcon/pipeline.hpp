#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstring>
#include <functional>
#include <memory>
#include <mutex>
#include <semaphore>
#include <span>
#include <string>
#include <vector>

#include "chunk_codec.hpp"
#include "container.hpp"
#include "worker_pool.hpp"

namespace falcon {

template<typename T>
class value_source {
public:
    virtual ~value_source() = default;
    // Fill as much of dst as possible; 0 means end of stream.
    virtual std::size_t read(std::span<T> dst) = 0;
};

template<typename T>
class value_sink {
public:
    virtual ~value_sink() = default;
    // One call per batch, possibly out of order and from worker threads.
    virtual void put(std::uint64_t first_value_index, std::span<const T> values) = 0;
};

template<typename T>
class memory_source final : public value_source<T> {
public:
    explicit memory_source(std::span<const T> data) : data_(data) {}

    std::size_t read(std::span<T> dst) override {
        const std::size_t k = std::min(dst.size(), data_.size() - pos_);
        std::copy_n(data_.data() + pos_, k, dst.data());
        pos_ += k;
        return k;
    }

private:
    std::span<const T> data_;
    std::size_t pos_ = 0;
};

template<typename T>
class memory_sink final : public value_sink<T> {
public:
    explicit memory_sink(std::size_t total) : values(total) {}

    void put(std::uint64_t first, std::span<const T> v) override {
        std::copy(v.begin(), v.end(), values.begin() + static_cast<std::ptrdiff_t>(first));
    }

    std::vector<T> values;
};

inline constexpr int stage_compress = 0;
inline constexpr int stage_store = 1;
inline constexpr int stage_decode = 2;

struct pipeline_options {
    std::uint32_t chunk_n = 1025;
    std::uint64_t batch_values = std::uint64_t{1025} * 1024 * 4;
    unsigned n_streams = 16;
    unsigned workers = 0; // 0 = FALCON_WORKERS / hardware default

    // Test hook: runs right before a stage's completion signal fires, on the
    // worker that executed the stage. Used to inject scheduling jitter.
    std::function<void(int stage, unsigned slot, std::uint64_t seq)> stage_delay;
};

struct pipeline_stats {
    std::uint64_t batches = 0;
    std::uint64_t values = 0;
    std::uint64_t blocking_waits = 0; // stalled-scan safeguard engagements
};

template<typename T>
inline constexpr precision_tag precision_of = precision_tag::f64;
template<>
inline constexpr precision_tag precision_of<float> = precision_tag::f32;

namespace detail {

// Edge-triggered one-shot completion signal.
class one_shot_event {
public:
    void fire() {
        {
            std::lock_guard lock(m_);
            fired_ = true;
        }
        cv_.notify_all();
    }

    bool try_consume() {
        std::lock_guard lock(m_);
        const bool f = fired_;
        fired_ = false;
        return f;
    }

    // Blocks until fired but leaves the signal set for the consumer.
    void wait_fired() {
        std::unique_lock lock(m_);
        cv_.wait(lock, [this] { return fired_; });
    }

private:
    std::mutex m_;
    std::condition_variable cv_;
    bool fired_ = false;
};

template<typename T>
inline std::size_t read_full(value_source<T>& src, std::span<T> dst) {
    std::size_t total = 0;
    while (total < dst.size()) {
        const std::size_t k = src.read(dst.subspan(total));
        if (k == 0)
            break;
        total += k;
    }
    return total;
}

inline void validate_pipeline_options(const pipeline_options& o) {
    if (o.chunk_n < 65 || (o.chunk_n - 1) % 64 != 0)
        throw error("chunk length must be a multiple of 64 plus one");
    if (o.batch_values == 0)
        throw error("batch size must be positive");
    if (o.n_streams == 0)
        throw error("stream count must be positive");
}

enum class slot_state : std::uint8_t { idle, m_pend, p_pend };

} // namespace detail

// Event-driven multi-stream compressor. Batches rotate over n_streams slots;
// each slot stages a batch, compresses it chunk-parallel on the pool, and
// reports its compressed size. A cycling `current` pointer accepts sizes
// strictly in launch order, assigns the archive offset, and starts the store
// stage, so the output bytes never depend on completion timing. When a full
// scan makes no progress the coordinator blocks on the oldest in-flight
// slot's pending signal instead of spinning.
template<typename T>
std::vector<std::uint8_t> compress_pipeline(value_source<T>& in,
                                            const pipeline_options& opt,
                                            pipeline_stats* stats_out = nullptr) {
    detail::validate_pipeline_options(opt);
    const std::uint32_t chunk_n = opt.chunk_n;
    const unsigned n_streams = opt.n_streams;

    worker_pool pool(opt.workers);

    struct slot_t {
        detail::slot_state state = detail::slot_state::idle;
        std::vector<T> input;
        std::size_t count = 0;
        std::uint64_t launch_seq = 0;
        std::vector<std::vector<std::uint8_t>> chunk_out;
        std::vector<std::uint8_t> frame; // assembled batch wire bytes
        std::uint64_t offset = 0;
        std::atomic<std::size_t> pending{0};
        detail::one_shot_event size_done, store_done;
    };
    std::vector<std::unique_ptr<slot_t>> slots;
    slots.reserve(n_streams);
    for (unsigned i = 0; i < n_streams; ++i)
        slots.push_back(std::make_unique<slot_t>());

    std::vector<std::uint8_t> archive(archive_header_bytes, 0);
    std::mutex archive_m;

    std::mutex err_m;
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    auto record_error = [&](std::exception_ptr e) {
        std::lock_guard lock(err_m);
        if (!err)
            err = std::move(e);
        failed.store(true, std::memory_order_release);
    };

    auto run_chunk_range = [&record_error, &failed, &opt, chunk_n](
                               slot_t& s, std::size_t c0, std::size_t c1,
                               unsigned slot_id) {
        try {
            if (!failed.load(std::memory_order_relaxed)) {
                thread_local chunk_workspace<T> ws;
                thread_local std::vector<T> padded;
                for (std::size_t c = c0; c < c1; ++c) {
                    auto& out = s.chunk_out[c];
                    out.clear();
                    const std::size_t first = c * chunk_n;
                    const std::size_t len =
                        std::min<std::size_t>(chunk_n, s.count - first);
                    if (len == chunk_n) {
                        compress_chunk(std::span<const T>(s.input.data() + first, chunk_n),
                                       ws, out);
                    } else {
                        padded.assign(chunk_n, T{0});
                        std::copy_n(s.input.data() + first, len, padded.begin());
                        compress_chunk(std::span<const T>(padded), ws, out);
                    }
                }
            }
        } catch (...) {
            record_error(std::current_exception());
        }
        if (s.pending.fetch_sub(1, std::memory_order_acq_rel) == 1) {
            try {
                if (!failed.load(std::memory_order_relaxed)) {
                    s.frame.clear();
                    append_batch(std::span<const std::vector<std::uint8_t>>(s.chunk_out),
                                 s.frame);
                }
            } catch (...) {
                record_error(std::current_exception());
            }
            if (opt.stage_delay)
                opt.stage_delay(stage_compress, slot_id, s.launch_seq);
            s.size_done.fire();
        }
    };

    auto run_store = [&archive, &archive_m, &record_error, &failed, &opt](
                         slot_t& s, unsigned slot_id) {
        try {
            if (!failed.load(std::memory_order_relaxed)) {
                std::lock_guard lock(archive_m);
                if (archive.size() < s.offset + s.frame.size())
                    archive.resize(s.offset + s.frame.size());
                std::memcpy(archive.data() + s.offset, s.frame.data(), s.frame.size());
            }
        } catch (...) {
            record_error(std::current_exception());
        }
        if (opt.stage_delay)
            opt.stage_delay(stage_store, slot_id, s.launch_seq);
        s.store_done.fire();
    };

    pipeline_stats stats;
    std::vector<T> stage(opt.batch_values);
    std::size_t stage_count = 0;
    bool have_batch = false;
    auto refill = [&] {
        stage.resize(opt.batch_values);
        stage_count = detail::read_full<T>(in, std::span<T>(stage));
        have_batch = stage_count > 0;
    };
    refill(); // nothing in flight yet, a read error propagates directly

    unsigned active = 0, current = 0, next_slot = 0;
    std::uint64_t launch_counter = 0;
    std::uint64_t write_cursor = archive_header_bytes;
    std::uint64_t total_values = 0, batch_count = 0;

    while (have_batch || active > 0) {
        if (failed.load(std::memory_order_acquire))
            have_batch = false; // drain in-flight slots, then fail below
        bool progress = false;
        for (unsigned i = 0; i < n_streams; ++i) {
            slot_t& s = *slots[i];
            switch (s.state) {
            case detail::slot_state::idle:
                // Batches rotate over slots in launch order; intake waits for
                // the slot whose turn it is.
                if (have_batch && i == next_slot) {
                    s.input.swap(stage);
                    s.count = stage_count;
                    s.launch_seq = launch_counter++;
                    const std::size_t chunks = (s.count + chunk_n - 1) / chunk_n;
                    s.chunk_out.resize(chunks);
                    const std::size_t tasks =
                        std::max<std::size_t>(1, std::min<std::size_t>(chunks, std::size_t{pool.size()} * 4));
                    s.pending.store(tasks, std::memory_order_relaxed);
                    for (std::size_t t = 0; t < tasks; ++t) {
                        const std::size_t c0 = chunks * t / tasks;
                        const std::size_t c1 = chunks * (t + 1) / tasks;
                        pool.submit([&run_chunk_range, &s, c0, c1, i] {
                            run_chunk_range(s, c0, c1, i);
                        });
                    }
                    s.state = detail::slot_state::m_pend;
                    ++active;
                    next_slot = (next_slot + 1) % n_streams;
                    progress = true;
                    try {
                        refill();
                    } catch (...) {
                        record_error(std::current_exception());
                        have_batch = false;
                    }
                }
                break;
            case detail::slot_state::m_pend:
                if (i == current && s.size_done.try_consume()) {
                    s.offset = write_cursor;
                    write_cursor += s.frame.size();
                    total_values += s.count;
                    ++batch_count;
                    pool.submit([&run_store, &s, i] { run_store(s, i); });
                    current = (current + 1) % n_streams;
                    s.state = detail::slot_state::p_pend;
                    progress = true;
                }
                break;
            case detail::slot_state::p_pend:
                if (s.store_done.try_consume()) {
                    --active;
                    s.state = detail::slot_state::idle;
                    progress = true;
                }
                break;
            }
        }
        if (!progress && active > 0) {
            slot_t* oldest = nullptr;
            for (auto& up : slots) {
                slot_t& s = *up;
                if (s.state != detail::slot_state::idle &&
                    (!oldest || s.launch_seq < oldest->launch_seq))
                    oldest = &s;
            }
            ++stats.blocking_waits;
            if (oldest->state == detail::slot_state::m_pend)
                oldest->size_done.wait_fired();
            else
                oldest->store_done.wait_fired();
        }
    }

    {
        std::lock_guard lock(err_m);
        if (err)
            std::rethrow_exception(err);
    }

    archive_header h;
    h.precision = precision_of<T>;
    h.chunk_n = chunk_n;
    h.batch_values = opt.batch_values;
    h.total_values = total_values;
    h.batch_count = batch_count;
    const auto hb = write_header(h);
    std::copy(hb.begin(), hb.end(), archive.begin());

    stats.batches = batch_count;
    stats.values = total_values;
    if (stats_out)
        *stats_out = stats;
    return archive;
}

// Decompression needs no size negotiation: every batch's value range is known
// from the header, so batches are dispatched with pre-assigned output
// positions and only throttled to n_streams in flight.
template<typename T>
pipeline_stats decompress_pipeline(std::span<const std::uint8_t> archive,
                                   value_sink<T>& sink,
                                   const pipeline_options& opt = {}) {
    const archive_header h = read_header(archive);
    if (h.precision != precision_of<T>)
        throw error("archive precision does not match the requested value type");
    if (opt.n_streams == 0)
        throw error("stream count must be positive");
    const std::uint64_t n = h.chunk_n;

    worker_pool pool(opt.workers);
    std::counting_semaphore<> in_flight(opt.n_streams);

    std::mutex err_m;
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    auto record_error = [&](std::exception_ptr e) {
        std::lock_guard lock(err_m);
        if (!err)
            err = std::move(e);
        failed.store(true, std::memory_order_release);
    };

    std::size_t cursor = archive_header_bytes;
    for (std::uint64_t b = 0; b < h.batch_count; ++b) {
        if (failed.load(std::memory_order_acquire))
            break;
        batch_view view;
        try {
            view = read_batch(archive.subspan(cursor));
        } catch (const corrupt_error& e) {
            for (unsigned i = 0; i < opt.n_streams; ++i)
                in_flight.acquire();
            throw corrupt_error(std::string(e.what()) + " (batch " +
                                std::to_string(b) + ")");
        }
        cursor += view.wire_bytes;
        const std::uint64_t first = b * h.batch_values;
        const std::uint64_t count =
            std::min<std::uint64_t>(h.batch_values, h.total_values - first);
        const std::uint64_t chunks = (count + n - 1) / n;
        if (view.sizes.size() != chunks) {
            for (unsigned i = 0; i < opt.n_streams; ++i)
                in_flight.acquire();
            throw corrupt_error("chunk count mismatch (batch " +
                                std::to_string(b) + ")");
        }
        in_flight.acquire();
        pool.submit([&sink, &in_flight, &record_error, &failed, &opt,
                     view = std::move(view), first, count, n, b] {
            try {
                if (!failed.load(std::memory_order_relaxed)) {
                    thread_local chunk_workspace<T> ws;
                    thread_local std::vector<T> staging;
                    thread_local std::vector<T> chunk_values;
                    staging.clear();
                    staging.reserve(count);
                    std::size_t off = 0;
                    for (std::size_t c = 0; c < view.sizes.size(); ++c) {
                        const std::size_t cnt = static_cast<std::size_t>(
                            std::min<std::uint64_t>(n, count - c * n));
                        decompress_chunk<T>(view.payload.subspan(off, view.sizes[c]),
                                            static_cast<std::size_t>(n), cnt, ws,
                                            chunk_values);
                        staging.insert(staging.end(), chunk_values.begin(),
                                       chunk_values.end());
                        off += view.sizes[c];
                    }
                    if (opt.stage_delay)
                        opt.stage_delay(stage_decode,
                                        static_cast<unsigned>(b % opt.n_streams), b);
                    sink.put(first, std::span<const T>(staging));
                }
            } catch (const corrupt_error& e) {
                record_error(std::make_exception_ptr(corrupt_error(
                    std::string(e.what()) + " (batch " + std::to_string(b) + ")")));
            } catch (...) {
                record_error(std::current_exception());
            }
            in_flight.release();
        });
    }
    for (unsigned i = 0; i < opt.n_streams; ++i)
        in_flight.acquire();
    {
        std::lock_guard lock(err_m);
        if (err)
            std::rethrow_exception(err);
    }
    if (cursor != archive.size())
        throw corrupt_error("trailing bytes after final batch");

    pipeline_stats stats;
    stats.batches = h.batch_count;
    stats.values = h.total_values;
    return stats;
}

template<typename T>
std::vector<T> decompress_to_vector(std::span<const std::uint8_t> archive,
                                    const pipeline_options& opt = {}) {
    const archive_header h = read_header(archive);
    memory_sink<T> sink(h.total_values);
    decompress_pipeline<T>(archive, sink, opt);
    return std::move(sink.values);
}

} // namespace falcon
