// falcon: lossless floating-point compression tool.
//
//   falcon compress   data.raw data.fln --precision 64
//   falcon decompress data.fln data.raw
//   falcon verify     data.raw data.fln
//   falcon inspect    data.fln
//   falcon gen        data.raw --kind walk --count 1000000
//   falcon bench      --kind walk --count 10000000
//
// Raw files hold native-endian IEEE-754 values back to back; csv files hold
// one row per value with --column picking the field.

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "falcon/pipeline.hpp"
#include "falcon/synthetic.hpp"

using namespace falcon;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::uint8_t> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void spill(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw io_error("write failed on " + path);
}

template<typename T>
class raw_file_source final : public value_source<T> {
public:
    explicit raw_file_source(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_)
            throw io_error("cannot open " + path);
    }

    std::size_t read(std::span<T> dst) override {
        in_.read(reinterpret_cast<char*>(dst.data()),
                 static_cast<std::streamsize>(dst.size() * sizeof(T)));
        const auto got = static_cast<std::size_t>(in_.gcount());
        if (got % sizeof(T) != 0)
            throw io_error("input ends inside a value");
        return got / sizeof(T);
    }

private:
    std::ifstream in_;
};

template<typename T>
class raw_file_sink final : public value_sink<T> {
public:
    explicit raw_file_sink(const std::string& path)
        : out_(path, std::ios::binary | std::ios::trunc | std::ios::in | std::ios::out) {
        if (!out_) { // in|out needs the file to exist first
            std::ofstream(path, std::ios::binary | std::ios::trunc);
            out_.open(path, std::ios::binary | std::ios::in | std::ios::out);
        }
        if (!out_)
            throw io_error("cannot open " + path);
    }

    void put(std::uint64_t first, std::span<const T> v) override {
        std::lock_guard lock(m_);
        out_.seekp(static_cast<std::streamoff>(first * sizeof(T)));
        out_.write(reinterpret_cast<const char*>(v.data()),
                   static_cast<std::streamsize>(v.size() * sizeof(T)));
        if (!out_)
            throw io_error("write failed");
    }

private:
    std::mutex m_;
    std::fstream out_;
};

// Compares decompressed output against the original raw file in place.
template<typename T>
class compare_sink final : public value_sink<T> {
public:
    explicit compare_sink(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_)
            throw io_error("cannot open " + path);
    }

    void put(std::uint64_t first, std::span<const T> v) override {
        std::vector<T> expect(v.size());
        {
            std::lock_guard lock(m_);
            in_.clear();
            in_.seekg(static_cast<std::streamoff>(first * sizeof(T)));
            in_.read(reinterpret_cast<char*>(expect.data()),
                     static_cast<std::streamsize>(expect.size() * sizeof(T)));
            if (static_cast<std::size_t>(in_.gcount()) != expect.size() * sizeof(T))
                throw error("original file is shorter than the archive claims");
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (bits_of(v[i]) != bits_of(expect[i]))
                throw error("value mismatch at index " + std::to_string(first + i));
        }
    }

private:
    std::mutex m_;
    std::ifstream in_;
};

template<typename T>
std::vector<T> load_csv(const std::string& path, unsigned column) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open " + path);
    std::vector<T> values;
    std::string line;
    bool first_line = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::size_t begin = 0;
        for (unsigned c = 0; c < column; ++c) {
            const auto comma = line.find(',', begin);
            if (comma == std::string::npos)
                throw io_error("row has no column " + std::to_string(column));
            begin = comma + 1;
        }
        auto end = line.find(',', begin);
        if (end == std::string::npos)
            end = line.size();
        T v{};
        const auto r = std::from_chars(line.data() + begin, line.data() + end, v);
        if (r.ec != std::errc{} || r.ptr != line.data() + end) {
            if (first_line) { // a header row is fine, anything later is not
                first_line = false;
                continue;
            }
            throw io_error("cannot parse value: " + line.substr(begin, end - begin));
        }
        first_line = false;
        values.push_back(v);
    }
    return values;
}

template<typename T>
void save_csv(const std::string& path, std::span<const T> values) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw io_error("cannot open " + path);
    char buf[64];
    for (const T v : values) {
        const auto r = std::to_chars(buf, buf + sizeof buf, v);
        *r.ptr = '\n';
        out.write(buf, r.ptr + 1 - buf);
    }
    if (!out)
        throw io_error("write failed on " + path);
}

struct io_options {
    std::string format = "raw";
    unsigned column = 0;
};

struct codec_options {
    unsigned precision = 64;
    std::uint32_t chunk_n = 1025;
    std::uint64_t batch_values = std::uint64_t{1025} * 1024 * 4;
    unsigned streams = 16;
    unsigned workers = 0;

    pipeline_options pipeline() const {
        pipeline_options o;
        o.chunk_n = chunk_n;
        o.batch_values = batch_values;
        o.n_streams = streams;
        o.workers = workers;
        return o;
    }
};

void add_codec_flags(CLI::App& cmd, codec_options& c, bool with_precision = true) {
    if (with_precision)
        cmd.add_option("--precision", c.precision, "value width in bits")
            ->check(CLI::IsMember({32, 64}));
    cmd.add_option("--chunk-n", c.chunk_n, "values per chunk, 64k+1");
    cmd.add_option("--batch-values", c.batch_values, "values per batch");
    cmd.add_option("--streams", c.streams, "concurrent batches in flight");
    cmd.add_option("--workers", c.workers, "worker threads, 0 = auto");
}

void add_io_flags(CLI::App& cmd, io_options& io) {
    cmd.add_option("--format", io.format, "raw or csv")
        ->check(CLI::IsMember({"raw", "csv"}));
    cmd.add_option("--column", io.column, "csv column holding the values");
}

synth::spec spec_from(const std::string& kind, std::uint64_t seed, int dp,
                      int step, std::uint64_t period, std::int64_t spike) {
    synth::spec sp;
    sp.kind = synth::kind_from_name(kind);
    sp.seed = seed;
    sp.decimal_places = dp;
    sp.max_step_units = step;
    sp.outlier_period = period;
    sp.outlier_units = spike;
    return sp;
}

void report(const char* key, std::string_view value) {
    std::cout << key << "=" << value << "\n";
}

void report(const char* key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    report(key, std::string(buf));
}

void report(const char* key, std::uint64_t value) {
    report(key, std::to_string(value));
}

template<typename T>
int run_compress(const std::string& input, const std::string& output,
                 const io_options& io, const codec_options& codec) {
    const auto t0 = std::chrono::steady_clock::now();
    pipeline_stats stats;
    std::vector<std::uint8_t> archive;
    if (io.format == "csv") {
        const auto values = load_csv<T>(input, io.column);
        memory_source<T> src(values);
        archive = compress_pipeline<T>(src, codec.pipeline(), &stats);
    } else {
        raw_file_source<T> src(input);
        archive = compress_pipeline<T>(src, codec.pipeline(), &stats);
    }
    const double dt = seconds_since(t0);
    spill(output, archive);
    const std::uint64_t raw_bytes = stats.values * sizeof(T);
    report("values", stats.values);
    report("batches", stats.batches);
    report("raw_bytes", raw_bytes);
    report("archive_bytes", static_cast<std::uint64_t>(archive.size()));
    report("ratio", raw_bytes ? static_cast<double>(archive.size()) / raw_bytes : 0.0);
    report("seconds", dt);
    report("mb_per_s", dt > 0 ? raw_bytes / dt / 1e6 : 0.0);
    return 0;
}

template<typename T>
int run_decompress(const std::string& input, const std::string& output,
                   const io_options& io, const codec_options& codec) {
    const auto archive = slurp(input);
    const auto t0 = std::chrono::steady_clock::now();
    pipeline_stats stats;
    if (io.format == "csv") {
        const auto values = decompress_to_vector<T>(archive, codec.pipeline());
        stats.values = values.size();
        save_csv<T>(output, std::span<const T>(values));
    } else {
        raw_file_sink<T> sink(output);
        stats = decompress_pipeline<T>(archive, sink, codec.pipeline());
    }
    const double dt = seconds_since(t0);
    report("values", stats.values);
    report("seconds", dt);
    report("mb_per_s", dt > 0 ? stats.values * sizeof(T) / dt / 1e6 : 0.0);
    return 0;
}

template<typename T>
int run_verify(const std::string& original, const std::string& archive_path,
               const io_options& io, const codec_options& codec) {
    const auto archive = slurp(archive_path);
    try {
        if (io.format == "csv") {
            const auto values = decompress_to_vector<T>(archive, codec.pipeline());
            const auto expect = load_csv<T>(original, io.column);
            if (values.size() != expect.size())
                throw error("value count mismatch: " + std::to_string(expect.size()) +
                            " in the original, " + std::to_string(values.size()) +
                            " in the archive");
            for (std::size_t i = 0; i < values.size(); ++i)
                if (bits_of(values[i]) != bits_of(expect[i]))
                    throw error("value mismatch at index " + std::to_string(i));
        } else {
            compare_sink<T> sink(original);
            decompress_pipeline<T>(archive, sink, codec.pipeline());
        }
    } catch (const std::exception& e) {
        report("verify", std::string("mismatch"));
        report("detail", std::string(e.what()));
        return 1;
    }
    report("verify", std::string("ok"));
    return 0;
}

int run_inspect(const std::string& path) {
    const auto archive = slurp(path);
    const archive_header h = read_header(archive);
    report("precision", h.precision == precision_tag::f64 ? std::string("64")
                                                          : std::string("32"));
    report("chunk_n", static_cast<std::uint64_t>(h.chunk_n));
    report("batch_values", h.batch_values);
    report("total_values", h.total_values);
    report("batch_count", h.batch_count);
    report("archive_bytes", static_cast<std::uint64_t>(archive.size()));
    const std::size_t width = h.precision == precision_tag::f64 ? 8 : 4;
    report("ratio", h.total_values
                        ? static_cast<double>(archive.size()) / (h.total_values * width)
                        : 0.0);
    std::size_t cursor = archive_header_bytes;
    std::uint64_t chunks = 0;
    std::uint32_t min_chunk = ~std::uint32_t{0}, max_chunk = 0;
    for (std::uint64_t b = 0; b < h.batch_count; ++b) {
        const auto view = read_batch(std::span(archive).subspan(cursor));
        cursor += view.wire_bytes;
        chunks += view.sizes.size();
        for (const auto s : view.sizes) {
            min_chunk = std::min(min_chunk, s);
            max_chunk = std::max(max_chunk, s);
        }
    }
    if (cursor != archive.size())
        throw corrupt_error("trailing bytes after final batch");
    report("chunks", chunks);
    if (chunks) {
        report("min_chunk_bytes", static_cast<std::uint64_t>(min_chunk));
        report("max_chunk_bytes", static_cast<std::uint64_t>(max_chunk));
    }
    return 0;
}

template<typename T>
int run_gen(const std::string& output, const synth::spec& sp, std::uint64_t count,
            const io_options& io) {
    synth::generator<T> gen(sp);
    if (io.format == "csv") {
        std::vector<T> values(count);
        for (auto& v : values)
            v = gen.next();
        save_csv<T>(output, std::span<const T>(values));
    } else {
        std::ofstream out(output, std::ios::binary | std::ios::trunc);
        if (!out)
            throw io_error("cannot open " + output);
        std::vector<T> buf(1 << 16);
        std::uint64_t left = count;
        while (left > 0) {
            const std::size_t k = static_cast<std::size_t>(
                std::min<std::uint64_t>(left, buf.size()));
            for (std::size_t i = 0; i < k; ++i)
                buf[i] = gen.next();
            out.write(reinterpret_cast<const char*>(buf.data()),
                      static_cast<std::streamsize>(k * sizeof(T)));
            left -= k;
        }
        if (!out)
            throw io_error("write failed on " + output);
    }
    report("values", count);
    report("kind", synth::kind_name(sp.kind));
    return 0;
}

template<typename T>
int run_bench(const synth::spec& sp, std::uint64_t count, const codec_options& codec) {
    synth::generator_source<T> src(sp, count);
    const auto t0 = std::chrono::steady_clock::now();
    pipeline_stats stats;
    const auto archive = compress_pipeline<T>(src, codec.pipeline(), &stats);
    const double enc_dt = seconds_since(t0);

    struct null_sink final : value_sink<T> {
        void put(std::uint64_t, std::span<const T>) override {}
    } sink;
    const auto t1 = std::chrono::steady_clock::now();
    decompress_pipeline<T>(archive, sink, codec.pipeline());
    const double dec_dt = seconds_since(t1);

    const std::uint64_t raw_bytes = stats.values * sizeof(T);
    report("kind", synth::kind_name(sp.kind));
    report("values", stats.values);
    report("raw_bytes", raw_bytes);
    report("archive_bytes", static_cast<std::uint64_t>(archive.size()));
    report("ratio", static_cast<double>(archive.size()) / raw_bytes);
    report("compress_seconds", enc_dt);
    report("compress_mb_per_s", raw_bytes / enc_dt / 1e6);
    report("decompress_seconds", dec_dt);
    report("decompress_mb_per_s", raw_bytes / dec_dt / 1e6);
    report("blocking_waits", stats.blocking_waits);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lossless IEEE-754 value compressor"};
    app.require_subcommand(1);

    std::string input, output;
    io_options io;
    codec_options codec;

    std::string kind = "walk";
    std::uint64_t count = 1000000, seed = 1, period = 1025;
    std::int64_t spike = 3575;
    int dp = 2, step = 127;

    auto* c_compress = app.add_subcommand("compress", "pack values into an archive");
    c_compress->add_option("input", input)->required();
    c_compress->add_option("output", output)->required();
    add_io_flags(*c_compress, io);
    add_codec_flags(*c_compress, codec);

    auto* c_decompress = app.add_subcommand("decompress", "unpack an archive");
    c_decompress->add_option("input", input)->required();
    c_decompress->add_option("output", output)->required();
    add_io_flags(*c_decompress, io);
    add_codec_flags(*c_decompress, codec, false);

    auto* c_verify =
        app.add_subcommand("verify", "check an archive against the original data");
    c_verify->add_option("original", input)->required();
    c_verify->add_option("archive", output)->required();
    add_io_flags(*c_verify, io);
    add_codec_flags(*c_verify, codec, false);

    auto* c_inspect = app.add_subcommand("inspect", "print archive structure");
    c_inspect->add_option("archive", input)->required();

    auto* c_gen = app.add_subcommand("gen", "write a synthetic data file");
    c_gen->add_option("output", output)->required();
    c_gen->add_option("--kind", kind, "walk, decimal, signflip, outlier, bits");
    c_gen->add_option("--count", count, "number of values");
    c_gen->add_option("--seed", seed);
    c_gen->add_option("--dp", dp, "decimal places for walk data");
    c_gen->add_option("--step", step, "walk step bound in scaled units");
    c_gen->add_option("--period", period, "outlier spacing");
    c_gen->add_option("--spike", spike, "outlier height in scaled units");
    c_gen->add_option("--precision", codec.precision)->check(CLI::IsMember({32, 64}));
    add_io_flags(*c_gen, io);

    auto* c_bench = app.add_subcommand("bench", "compress synthetic data in memory");
    c_bench->add_option("--kind", kind, "walk, decimal, signflip, outlier, bits");
    c_bench->add_option("--count", count, "number of values");
    c_bench->add_option("--seed", seed);
    c_bench->add_option("--dp", dp);
    c_bench->add_option("--step", step);
    c_bench->add_option("--period", period);
    c_bench->add_option("--spike", spike);
    add_codec_flags(*c_bench, codec);

    CLI11_PARSE(app, argc, argv);

    try {
        const bool f64 = codec.precision == 64;
        if (c_compress->parsed())
            return f64 ? run_compress<double>(input, output, io, codec)
                       : run_compress<float>(input, output, io, codec);
        if (c_decompress->parsed() || c_verify->parsed()) {
            const auto head = slurp(c_verify->parsed() ? output : input);
            const bool archive_f64 =
                read_header(head).precision == precision_tag::f64;
            if (c_decompress->parsed())
                return archive_f64 ? run_decompress<double>(input, output, io, codec)
                                   : run_decompress<float>(input, output, io, codec);
            return archive_f64 ? run_verify<double>(input, output, io, codec)
                               : run_verify<float>(input, output, io, codec);
        }
        if (c_inspect->parsed())
            return run_inspect(input);
        const auto sp = spec_from(kind, seed, dp, step, period, spike);
        if (c_gen->parsed())
            return f64 ? run_gen<double>(output, sp, count, io)
                       : run_gen<float>(output, sp, count, io);
        return f64 ? run_bench<double>(sp, count, codec)
                   : run_bench<float>(sp, count, codec);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
