#include "tars/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <json.hpp>

namespace tars {

namespace {

constexpr ItemId kNoiseBase = 1000000;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Day scaled(Day v, double scale) {
    return std::max<Day>(1, static_cast<Day>(std::llround(static_cast<double>(v) * scale)));
}

struct BasketBuilder {
    std::map<Day, std::vector<ItemId>> items_by_day;

    void add(Day t, const std::vector<ItemId>& items) {
        auto& v = items_by_day[t];
        v.insert(v.end(), items.begin(), items.end());
    }
    void add(Day t, ItemId item) { items_by_day[t].push_back(item); }

    PurchaseHistory finish(const CustomerId& id) const {
        PurchaseHistory h;
        h.customer = id;
        for (const auto& [day, items] : items_by_day) {
            Basket b;
            b.time = day;
            b.items = items;
            b.normalize();
            h.baskets.push_back(std::move(b));
        }
        return h;
    }
};

Day draw_intra(Day lo, Day hi, std::mt19937_64& rng) {
    if (lo >= hi) return lo;
    std::uniform_int_distribution<Day> d(lo, hi);
    return d(rng);
}

// Emits one window of chained occurrences starting at `start`; returns the
// day of the window's last basket.
Day emit_window(BasketBuilder& bb, const PatternSpec& p, Day intra_lo, Day intra_hi, Day start,
                std::size_t occurrences, std::mt19937_64& rng) {
    const bool self = p.head == p.tail;
    Day t = start;
    Day last = start;
    if (self) {
        bb.add(t, p.head);
        for (std::size_t i = 0; i < occurrences; ++i) {
            t += draw_intra(intra_lo, intra_hi, rng);
            bb.add(t, p.head);
        }
        last = t;
    } else {
        for (std::size_t i = 0; i < occurrences; ++i) {
            bb.add(t, p.head);
            const Day a = draw_intra(intra_lo, intra_hi, rng);
            bb.add(t + a, p.tail);
            last = t + a;
            t += a + draw_intra(intra_lo, intra_hi, rng);
        }
    }
    return last;
}

} // namespace

void SyntheticConfig::validate() const {
    if (customers < 1) throw DataError("synthetic config: customers must be >= 1");
    if (horizon_days < 2) throw DataError("synthetic config: horizon too short");
    if (patterns.empty()) throw DataError("synthetic config: at least one pattern required");
    if (noise_rate < 0 || noise_rate > 1 || impulse_rate < 0 || impulse_rate > 1)
        throw DataError("synthetic config: rates must lie in [0,1]");
    if (scale_choices.empty()) throw DataError("synthetic config: scale_choices must be non-empty");
    for (double s : scale_choices)
        if (s <= 0) throw DataError("synthetic config: scales must be positive");
    for (const auto& p : patterns) {
        if (p.head.empty() || p.tail.empty())
            throw DataError("synthetic config: pattern itemsets must be non-empty");
        if (p.intra_lo < 1 || p.intra_hi < p.intra_lo)
            throw DataError("synthetic config: bad intra-time range");
        if (p.occurrences < 1 || p.periods < 1)
            throw DataError("synthetic config: occurrences and periods must be >= 1");
        if (p.period_length < static_cast<Day>(p.occurrences) * p.intra_lo)
            throw DataError("synthetic config: period length " + std::to_string(p.period_length) +
                            " cannot hold " + std::to_string(p.occurrences) +
                            " occurrences of intra time >= " + std::to_string(p.intra_lo));
        for (ItemId id : p.head)
            if (id >= kNoiseBase) throw DataError("synthetic config: item ids must stay below 1000000");
        for (ItemId id : p.tail)
            if (id >= kNoiseBase) throw DataError("synthetic config: item ids must stay below 1000000");
    }
    if (layout == SynthLayout::Rotation) {
        for (const auto& p : patterns)
            if (p.periods != patterns.front().periods)
                throw DataError("synthetic config: rotation needs equal period counts");
    }
    if (layout == SynthLayout::Grid) {
        const Day step = patterns.front().intra_lo;
        for (const auto& p : patterns)
            if (p.intra_lo != step || p.intra_hi != step)
                throw DataError("synthetic config: grid layout needs one fixed intra time "
                                "shared by every pattern");
    }
}

Dataset generate_synthetic(const SyntheticConfig& config, SyntheticGroundTruth* truth) {
    config.validate();
    Dataset ds;
    if (truth) {
        truth->customers.clear();
        truth->noise_base = kNoiseBase;
    }

    int width = 1;
    for (std::size_t v = config.customers; v >= 10; v /= 10) ++width;

    for (std::size_t ci = 0; ci < config.customers; ++ci) {
        std::mt19937_64 rng(splitmix64(config.seed * 0x100000001b3ULL + ci));
        std::string id = std::to_string(ci);
        id = "c" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(width, id.size()), '0') + id;

        const double scale =
            config.scale_choices[rng() % config.scale_choices.size()];

        BasketBuilder bb;
        SyntheticGroundTruth::Customer gt;
        gt.id = id;
        Day grid_step = 0;

        // histories may stop early so schedule phases vary at the end
        Day cut = config.horizon_days;
        if (config.ragged_end > 0)
            cut -= static_cast<Day>(rng() % static_cast<std::uint64_t>(config.ragged_end));

        std::vector<std::size_t> grid_full_runs(config.patterns.size(), 0);
        std::vector<std::vector<std::size_t>> grid_run_starts(config.patterns.size());
        if (config.layout == SynthLayout::Grid) {
            const Day step = scaled(config.patterns.front().intra_lo, scale);
            grid_step = step;
            const std::size_t slots =
                static_cast<std::size_t>(config.horizon_days / step) + 1;
            // slide the whole schedule so customers sit at unrelated phases
            std::size_t max_periods = 1;
            for (const auto& p : config.patterns) max_periods = std::max(max_periods, p.periods);
            const std::size_t phase_shift =
                max_periods > 1 ? rng() % std::max<std::size_t>(1, slots / max_periods) : 0;
            for (std::size_t pi = 0; pi < config.patterns.size(); ++pi) {
                const auto& p = config.patterns[pi];
                const bool self = p.head == p.tail;
                const std::size_t run_slots =
                    self ? p.occurrences + 1 : 2 * p.occurrences;
                const double cycle =
                    static_cast<double>(slots) / static_cast<double>(p.periods);
                if (p.periods >= 2 && run_slots + 1 > static_cast<std::size_t>(cycle))
                    throw DataError("synthetic config: grid runs of pattern " +
                                    Sequence(p.head, p.tail).to_string() +
                                    " do not fit the horizon for customer " + id);
                for (std::size_t per = 0; per < p.periods; ++per) {
                    const auto base_slot =
                        static_cast<std::size_t>(cycle * static_cast<double>(per)) + phase_shift;
                    std::size_t slack =
                        static_cast<std::size_t>(cycle) > run_slots
                            ? static_cast<std::size_t>(cycle) - run_slots
                            : 1;
                    std::size_t offset;
                    if (p.grid_phase >= 0.0) {
                        // fixed slot offset, one slot of jitter
                        offset = static_cast<std::size_t>(p.grid_phase) + rng() % 2;
                        if (offset >= slack) offset = slack > 0 ? slack - 1 : 0;
                    } else {
                        // random phase; leave more than `occurrences` slots
                        // between runs so consecutive periods stay apart
                        if (slack > p.occurrences + 2) slack -= p.occurrences + 2;
                        else slack = 1;
                        offset = rng() % slack;
                    }
                    const std::size_t start = base_slot + offset;
                    std::size_t emitted = 0;
                    for (std::size_t r = 0; r < run_slots; ++r) {
                        const std::size_t slot = start + r;
                        const Day day = static_cast<Day>(slot) * step;
                        if (slot >= slots || day > cut) break;
                        if (!self && r % 2 == 1) bb.add(day, p.tail);
                        else bb.add(day, p.head);
                        ++emitted;
                    }
                    if (emitted > 0) grid_run_starts[pi].push_back(start);
                    if (emitted == run_slots || (p.periods == 1 && emitted > 1))
                        ++grid_full_runs[pi];
                }
            }
        } else if (config.layout == SynthLayout::Rotation) {
            const std::size_t cycles = config.patterns.front().periods;
            const Day gap = scaled(config.window_gap, scale);
            Day cursor = static_cast<Day>(rng() % static_cast<std::uint64_t>(std::max<Day>(1, gap)));
            for (std::size_t cyc = 0; cyc < cycles; ++cyc)
                for (const auto& p : config.patterns) {
                    const Day lo = scaled(p.intra_lo, scale), hi = scaled(p.intra_hi, scale);
                    const Day end = emit_window(bb, p, lo, hi, cursor, p.occurrences, rng);
                    cursor = end + gap;
                }
            if (cursor - gap > config.horizon_days)
                throw DataError("synthetic config: rotation does not fit the horizon for customer " + id);
        } else {
            for (const auto& p : config.patterns) {
                const Day lo = scaled(p.intra_lo, scale), hi = scaled(p.intra_hi, scale);
                const Day len = scaled(p.period_length, scale);
                const Day spacing = config.horizon_days / static_cast<Day>(p.periods);
                if (spacing < len)
                    throw DataError("synthetic config: periods overlap, horizon too short");
                for (std::size_t per = 0; per < p.periods; ++per) {
                    const Day slack = std::max<Day>(1, spacing - len);
                    const Day start = static_cast<Day>(per) * spacing +
                                      static_cast<Day>(rng() % static_cast<std::uint64_t>(slack));
                    emit_window(bb, p, lo, hi, start, p.occurrences, rng);
                }
            }
        }

        for (std::size_t pi = 0; pi < config.patterns.size(); ++pi) {
            const auto& p = config.patterns[pi];
            PlantedPattern pp;
            pp.seq = Sequence(p.head, p.tail);
            pp.intra_lo = scaled(p.intra_lo, scale);
            pp.intra_hi = scaled(p.intra_hi, scale);
            pp.occurrences = p.occurrences;
            // grid histories may end mid-run; the truth counts complete runs
            pp.periods = config.layout == SynthLayout::Grid ? grid_full_runs[pi] : p.periods;
            gt.patterns.push_back(std::move(pp));
            gt.planted_items.insert(gt.planted_items.end(), p.head.begin(), p.head.end());
            gt.planted_items.insert(gt.planted_items.end(), p.tail.begin(), p.tail.end());
        }
        std::sort(gt.planted_items.begin(), gt.planted_items.end());
        gt.planted_items.erase(std::unique(gt.planted_items.begin(), gt.planted_items.end()),
                               gt.planted_items.end());

        // off-schedule re-buys of a planted bundle
        if (config.impulse_rate > 0) {
            const auto planted_baskets = bb.items_by_day.size();
            const auto n_impulses = static_cast<std::size_t>(
                std::llround(config.impulse_rate * static_cast<double>(planted_baskets)));
            const Day last_day = bb.items_by_day.empty() ? 0 : bb.items_by_day.rbegin()->first;
            for (std::size_t i = 0; i < n_impulses; ++i) {
                const std::size_t pidx = rng() % config.patterns.size();
                const auto& p = config.patterns[pidx];
                Day day;
                if (grid_step > 0 && config.impulse_flank > 0 &&
                    !grid_run_starts[pidx].empty()) {
                    // shortly before a run of the same pattern
                    const auto start =
                        grid_run_starts[pidx][rng() % grid_run_starts[pidx].size()];
                    const auto flank = static_cast<std::size_t>(config.impulse_flank);
                    const std::size_t slot = start > flank ? start - flank : 0;
                    day = static_cast<Day>(slot) * grid_step;
                } else {
                    day = static_cast<Day>(rng() % static_cast<std::uint64_t>(last_day + 1));
                    // keep impulses on the shopping grid so gaps stay regular
                    if (grid_step > 0) day -= day % grid_step;
                }
                bb.add(day, p.head);
                bb.add(day, p.tail);
            }
            bb.items_by_day.erase(bb.items_by_day.upper_bound(cut), bb.items_by_day.end());
        }

        // unrelated pool items sprinkled into existing baskets
        if (config.noise_rate > 0) {
            std::uniform_real_distribution<double> coin(0.0, 1.0);
            for (auto& [day, items] : bb.items_by_day)
                if (coin(rng) < config.noise_rate)
                    items.push_back(kNoiseBase + static_cast<ItemId>(rng() % config.noise_pool));
        }

        if (config.ragged_end > 0 && !bb.items_by_day.empty()) {
            // keep at least two baskets
            auto keep_end = bb.items_by_day.upper_bound(cut);
            auto min_keep = std::next(bb.items_by_day.begin(),
                                      std::min<std::ptrdiff_t>(2, static_cast<std::ptrdiff_t>(
                                                                      bb.items_by_day.size())));
            while (keep_end != bb.items_by_day.end() &&
                   std::distance(bb.items_by_day.begin(), keep_end) <
                       std::distance(bb.items_by_day.begin(), min_keep))
                ++keep_end;
            bb.items_by_day.erase(keep_end, bb.items_by_day.end());
        }

        PurchaseHistory h = bb.finish(id);
        h.validate();
        for (const auto& b : h.baskets) ds.register_items(b);
        ds.histories.emplace(id, std::move(h));
        if (truth) truth->customers.push_back(std::move(gt));
    }
    ds.validate();
    return ds;
}

SyntheticConfig SyntheticConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("synthetic config: invalid json: ") + e.what());
    }
    SyntheticConfig c;
    c.customers = j.value("customers", std::size_t{1});
    c.horizon_days = j.value("horizon_days", Day{364});
    c.seed = j.value("seed", std::uint64_t{1});
    c.noise_rate = j.value("noise_rate", 0.0);
    c.noise_pool = j.value("noise_pool", std::size_t{100});
    c.impulse_rate = j.value("impulse_rate", 0.0);
    c.impulse_flank = j.value("impulse_flank", Day{0});
    c.window_gap = j.value("window_gap", Day{30});
    c.ragged_end = j.value("ragged_end", Day{0});
    if (j.contains("scale_choices"))
        c.scale_choices = j["scale_choices"].get<std::vector<double>>();
    const std::string layout = j.value("layout", std::string("independent"));
    if (layout == "rotation") c.layout = SynthLayout::Rotation;
    else if (layout == "independent") c.layout = SynthLayout::Independent;
    else if (layout == "grid") c.layout = SynthLayout::Grid;
    else throw DataError("synthetic config: unknown layout '" + layout + "'");
    if (!j.contains("patterns") || !j["patterns"].is_array())
        throw DataError("synthetic config: patterns array required");
    for (const auto& pj : j["patterns"]) {
        PatternSpec p;
        p.head = pj.at("head").get<std::vector<ItemId>>();
        p.tail = pj.value("tail", p.head);
        p.intra_lo = pj.at("intra_lo").get<Day>();
        p.intra_hi = pj.at("intra_hi").get<Day>();
        p.period_length = pj.at("period_length").get<Day>();
        p.occurrences = pj.at("occurrences").get<std::size_t>();
        p.periods = pj.at("periods").get<std::size_t>();
        p.grid_phase = pj.value("grid_phase", -1.0);
        c.patterns.push_back(std::move(p));
    }
    c.validate();
    return c;
}

std::string SyntheticConfig::to_json_text() const {
    nlohmann::json j;
    j["customers"] = customers;
    j["horizon_days"] = horizon_days;
    j["seed"] = seed;
    j["noise_rate"] = noise_rate;
    j["noise_pool"] = noise_pool;
    j["impulse_rate"] = impulse_rate;
    j["impulse_flank"] = impulse_flank;
    j["window_gap"] = window_gap;
    j["ragged_end"] = ragged_end;
    j["scale_choices"] = scale_choices;
    j["layout"] = layout == SynthLayout::Rotation
                      ? "rotation"
                      : (layout == SynthLayout::Grid ? "grid" : "independent");
    j["patterns"] = nlohmann::json::array();
    for (const auto& p : patterns) {
        nlohmann::json pj;
        pj["head"] = p.head;
        pj["tail"] = p.tail;
        pj["intra_lo"] = p.intra_lo;
        pj["intra_hi"] = p.intra_hi;
        pj["period_length"] = p.period_length;
        pj["occurrences"] = p.occurrences;
        pj["periods"] = p.periods;
        pj["grid_phase"] = p.grid_phase;
        j["patterns"].push_back(pj);
    }
    return j.dump(2);
}

} // namespace tars
