#ifndef TARS_SYNTH_HPP
#define TARS_SYNTH_HPP

#include <cstdint>
#include <string>

#include "tars/occurrence.hpp"

namespace tars {

// One planted pattern: `occurrences` chained head->tail occurrences per
// period, intra-times drawn from [intra_lo, intra_hi], repeated `periods`
// times across the horizon.
struct PatternSpec {
    std::vector<ItemId> head;
    std::vector<ItemId> tail;
    Day intra_lo = 1;
    Day intra_hi = 1;
    Day period_length = 0;
    std::size_t occurrences = 1;
    std::size_t periods = 1;
    double grid_phase = -1.0;  // grid layout: fixed run offset in slots from
                               // each cycle start; negative means random
};

enum class SynthLayout {
    Independent,  // each pattern placed on its own schedule
    Rotation,     // patterns take turns, one window per cycle
    Grid,         // one shopping cadence per customer; patterns occupy runs of
                  // consecutive grid days (requires a common fixed intra time)
};

struct SyntheticConfig {
    std::size_t customers = 1;
    Day horizon_days = 364;
    std::uint64_t seed = 1;
    std::vector<PatternSpec> patterns;
    double noise_rate = 0.0;     // chance per basket of one unrelated pool item
    std::size_t noise_pool = 100;
    double impulse_rate = 0.0;   // off-schedule bundle re-buys of planted patterns,
                                 // as a fraction of the planted basket count
    Day impulse_flank = 0;       // grid layout: place impulses this many slots
                                 // before a random run (0 = uniformly at random)
    SynthLayout layout = SynthLayout::Independent;
    Day window_gap = 30;         // rotation: days between consecutive windows
    std::vector<double> scale_choices{1.0};  // per-customer stretch of intra times and gaps
    Day ragged_end = 0;          // trim up to this many trailing days per customer,
                                 // so histories end at varying schedule phases

    void validate() const;
    static SyntheticConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
};

// What was actually planted for one customer, for recovery checks.
struct PlantedPattern {
    Sequence seq;
    Day intra_lo = 1;
    Day intra_hi = 1;
    std::size_t occurrences = 1;
    std::size_t periods = 1;
};

struct SyntheticGroundTruth {
    struct Customer {
        CustomerId id;
        std::vector<PlantedPattern> patterns;
        std::vector<ItemId> planted_items;  // sorted union over patterns
    };
    std::vector<Customer> customers;
    ItemId noise_base = 0;  // noise item ids start here
};

// Deterministic for a given config; per-customer streams are derived from
// the seed so the output does not depend on generation order.
Dataset generate_synthetic(const SyntheticConfig& config,
                           SyntheticGroundTruth* truth = nullptr);

} // namespace tars

#endif
