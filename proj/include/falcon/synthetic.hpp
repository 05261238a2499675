#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

#include "error.hpp"
#include "numeric.hpp"
#include "pipeline.hpp"

namespace falcon::synth {

enum class kind : std::uint8_t {
    random_walk,     // decimal random walk with bounded integer steps
    fixed_decimal,   // independent values with exactly decimal_places digits
    sign_flip,       // alternating-sign full-mantissa magnitudes
    outlier_injected, // random walk with one magnified value per period
    uniform_bits,    // raw uniform bit patterns, specials included
};

kind kind_from_name(std::string_view name);
std::string_view kind_name(kind k);

struct spec {
    synth::kind kind = synth::kind::random_walk;
    int decimal_places = 2;
    std::uint64_t seed = 1;
    int max_step_units = 127;          // random_walk / outlier_injected
    std::uint64_t outlier_period = 1025; // outlier_injected
    std::int64_t outlier_units = 3575;   // spike added on top of the walk
};

// Deterministic value stream: the sequence depends only on the spec, never on
// how reads are sized.
template<typename T>
class generator {
public:
    explicit generator(const spec& s) : spec_(s), rng_(s.seed) {
        using tr = fp_traits<T>;
        if (spec_.decimal_places < 0 || spec_.decimal_places > tr::max_alpha)
            throw error("decimal_places out of range for this precision");
        if (spec_.max_step_units < 1)
            throw error("max_step_units must be positive");
        walk_acc_ = static_cast<std::int64_t>(rng_() % 20001) - 10000;
        if (spec_.kind == kind::outlier_injected) {
            if (spec_.outlier_period == 0)
                throw error("outlier_period must be positive");
            next_outlier_ = rng_() % spec_.outlier_period;
        }
    }

    T next() {
        using tr = fp_traits<T>;
        switch (spec_.kind) {
        case kind::random_walk:
        case kind::outlier_injected: {
            const std::int64_t span = 2 * spec_.max_step_units + 1;
            walk_acc_ += static_cast<std::int64_t>(rng_() % span) - spec_.max_step_units;
            std::int64_t units = walk_acc_;
            if (spec_.kind == kind::outlier_injected) {
                if (index_ == next_outlier_) {
                    units += spec_.outlier_units; // transient spike, walk unaffected
                    next_outlier_ += spec_.outlier_period;
                }
            }
            ++index_;
            return inverse_scale<T>(units, spec_.decimal_places);
        }
        case kind::fixed_decimal: {
            // significand with 1..max_beta digits, last digit nonzero
            const int digits = 1 + static_cast<int>(rng_() % tr::max_beta);
            std::int64_t lo = 1, hi = 10;
            for (int i = 1; i < digits; ++i) {
                lo *= 10;
                hi *= 10;
            }
            if (digits == 1)
                lo = 1;
            std::int64_t d = lo + static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(hi - lo));
            if (d % 10 == 0)
                ++d;
            if (rng_() & 1)
                d = -d;
            ++index_;
            return inverse_scale<T>(d, spec_.decimal_places);
        }
        case kind::sign_flip: {
            // magnitude in [1, 2), fresh mantissa bits every time
            fp_bits_t<T> b = static_cast<fp_bits_t<T>>(rng_());
            b &= (fp_bits_t<T>{1} << tr::mantissa_bits) - 1;
            b |= fp_bits_t<T>{tr::exponent_bias} << tr::mantissa_bits;
            b |= static_cast<fp_bits_t<T>>(index_ & 1) << (tr::width - 1);
            ++index_;
            return value_of<T>(b);
        }
        case kind::uniform_bits:
            ++index_;
            return value_of<T>(static_cast<fp_bits_t<T>>(rng_()));
        }
        throw error("unknown generator kind");
    }

    void fill(std::span<T> dst) {
        for (auto& v : dst)
            v = next();
    }

private:
    spec spec_;
    std::mt19937_64 rng_;
    std::int64_t walk_acc_ = 0;
    std::uint64_t index_ = 0;
    std::uint64_t next_outlier_ = 0;
};

// Bounded stream over a generator, pluggable into the pipeline.
template<typename T>
class generator_source final : public value_source<T> {
public:
    generator_source(const spec& s, std::uint64_t count)
        : gen_(s), remaining_(count) {}

    std::size_t read(std::span<T> dst) override {
        const std::size_t k = static_cast<std::size_t>(
            std::min<std::uint64_t>(dst.size(), remaining_));
        gen_.fill(dst.first(k));
        remaining_ -= k;
        return k;
    }

private:
    generator<T> gen_;
    std::uint64_t remaining_;
};

} // namespace falcon::synth
