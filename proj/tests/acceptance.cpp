// Acceptance suite: one line per criterion, nonzero exit when a required
// criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tars/baselines.hpp"
#include "tars/evaluation.hpp"
#include "tars/io.hpp"
#include "tars/parallel.hpp"
#include "tars/predictor.hpp"
#include "tars/synth.hpp"
#include "testutil.hpp"

using namespace tars;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int number, bool pass, const std::string& name, const std::string& detail) {
    std::printf("%s  criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// --- criterion 1: worked-example fidelity ---

void criterion_1() {
    const auto start = Clock::now();
    auto h = oracle::example_history();
    auto stats = minimal_occurrences(h, Sequence::pair(oracle::A, oracle::B));
    bool ok = stats.head_times == std::vector<Day>{4, 8, 12, 24, 36, 44};

    OccurrenceStats published;
    published.head_times = {4, 8, 12, 24, 36, 44};
    published.intra = {4, 4, 12, 8, 4, 8};
    published.inter = {4, 4, 16, 12, 8, 8};
    auto periods = detect_periods(published, 14.0, 2.0);
    ok = ok && periods.size() == 2 && periods[0].support() == 2 && periods[1].support() == 3 &&
         periods[0].times(published) == std::vector<Day>{4, 8} &&
         periods[1].times(published) == std::vector<Day>{24, 36, 44} &&
         recurrence(periods) == 2;
    const double el = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof detail, "exact head times, period supports 2/3, rec 2; %.3fs",
                  el);
    report(1, ok && el < 1.0, "worked-example occurrence and period trace", detail);
}

// --- criterion 2: recurrence is not anti-monotone ---

void criterion_2() {
    auto h = oracle::example_history();
    const double dmax = 14.0, qmin = 2.0;
    auto cc = minimal_occurrences(h, Sequence::pair(oracle::C, oracle::C));
    auto cdc = minimal_occurrences(h, Sequence({oracle::C, oracle::D}, {oracle::C}));
    const std::size_t rec_cc = recurrence(detect_periods(cc, dmax, qmin));
    const std::size_t rec_cdc = recurrence(detect_periods(cdc, dmax, qmin));

    auto brute_cc = oracle::brute_minimal_occurrences(h, Sequence::pair(oracle::C, oracle::C));
    auto brute_cdc =
        oracle::brute_minimal_occurrences(h, Sequence({oracle::C, oracle::D}, {oracle::C}));
    const std::size_t brute_rec_cc = recurrence(oracle::brute_periods(brute_cc, dmax, qmin));
    const std::size_t brute_rec_cdc = recurrence(oracle::brute_periods(brute_cdc, dmax, qmin));

    const bool ok = rec_cc == 1 && rec_cdc == 2 && brute_rec_cc == 1 && brute_rec_cdc == 2;
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "rec one-item %zu (oracle %zu), rec two-item %zu (oracle %zu)", rec_cc,
                  brute_rec_cc, rec_cdc, brute_rec_cdc);
    report(2, ok, "subsequence not recurring while supersequence is", detail);
}

// --- criterion 3: tree mining equals the exhaustive pipeline ---

void criterion_3() {
    const auto start = Clock::now();
    std::mt19937_64 rng(424242);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
        auto h = oracle::random_history(rng, 15, 8);
        TarsSet mined = extract_tars(h);
        auto expected = oracle::brute_extract_tars(h, 4);
        bool equal = mined.tars.size() == expected.size();
        for (std::size_t i = 0; equal && i < expected.size(); ++i)
            equal = mined.tars[i].seq == expected[i].seq &&
                    mined.tars[i].alpha1 == expected[i].alpha1 &&
                    mined.tars[i].alpha2 == expected[i].alpha2 &&
                    mined.tars[i].p == expected[i].p &&
                    std::abs(mined.tars[i].q - expected[i].q) < 1e-9;
        if (!equal) ++mismatches;
    }
    const double el = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof detail, "%zu mismatches over 500 histories; %.1fs", mismatches,
                  el);
    report(3, mismatches == 0 && el < 60.0, "tree pipeline equals the exhaustive pipeline",
           detail);
}

// --- the shared synthetic corpus ---

SyntheticConfig acceptance_config() {
    SyntheticConfig cfg;
    cfg.customers = 100;
    cfg.horizon_days = 364;  // 52 weeks
    cfg.seed = 20250808;
    cfg.layout = SynthLayout::Grid;
    cfg.scale_choices = {1.0};  // one shopping trip every two days
    cfg.impulse_rate = 0.2;     // one unscheduled bundle re-buy per five baskets
    cfg.noise_rate = 0.0;
    cfg.ragged_end = 30;        // histories stop at varying schedule phases
    PatternSpec staple;
    staple.head = {0, 1, 2};
    staple.tail = staple.head;
    staple.intra_lo = staple.intra_hi = 2;
    staple.occurrences = 180;
    staple.period_length = 364;
    staple.periods = 1;
    cfg.patterns.push_back(staple);
    PatternSpec bulk_b;
    bulk_b.head = {3, 4};
    bulk_b.tail = bulk_b.head;
    bulk_b.intra_lo = bulk_b.intra_hi = 2;
    bulk_b.occurrences = 2;
    bulk_b.period_length = 6;
    bulk_b.periods = 21;
    bulk_b.grid_phase = 0.0;  // run opens each cycle
    cfg.patterns.push_back(bulk_b);
    PatternSpec bulk_c;
    bulk_c.head = {5, 6};
    bulk_c.tail = bulk_c.head;
    bulk_c.intra_lo = bulk_c.intra_hi = 2;
    bulk_c.occurrences = 3;
    bulk_c.period_length = 8;
    bulk_c.periods = 21;
    bulk_c.grid_phase = 3.0;  // run follows straight after the first bulk
    cfg.patterns.push_back(bulk_c);
    return cfg;
}

// Larger, longer-cycle variant for the stability protocol: a flat schedule
// with enough customers that per-step means settle.
SyntheticConfig stationary_config() {
    SyntheticConfig cfg = acceptance_config();
    cfg.customers = 400;
    cfg.ragged_end = 90;
    cfg.patterns[1].periods = 15;
    cfg.patterns[2].periods = 15;
    return cfg;
}

struct CorpusTruth {
    Dataset data;
    SyntheticGroundTruth truth;
    std::map<ItemId, std::size_t> pattern_of;  // planted item -> pattern index
    std::size_t staple_pattern = 0;
};

CorpusTruth make_corpus() {
    CorpusTruth out;
    auto cfg = acceptance_config();
    out.data = generate_synthetic(cfg, &out.truth);
    for (std::size_t pi = 0; pi < cfg.patterns.size(); ++pi) {
        for (ItemId id : cfg.patterns[pi].head) out.pattern_of[id] = pi;
        for (ItemId id : cfg.patterns[pi].tail) out.pattern_of[id] = pi;
        if (cfg.patterns[pi].periods == 1) out.staple_pattern = pi;
    }
    return out;
}

// --- criterion 4: planted-pattern recovery and base precision ---

void criterion_4(const CorpusTruth& corpus) {
    const auto start = Clock::now();
    std::size_t recovered = 0, planted_total = 0;
    std::size_t base_true = 0, base_total = 0;

    for (const auto& gt : corpus.truth.customers) {
        const auto& h = corpus.data.histories.at(gt.id);
        TarsSet set = extract_tars(h);

        for (const auto& pp : gt.patterns) {
            ++planted_total;
            bool pattern_ok = true;
            for (ItemId x : pp.seq.head)
                for (ItemId y : pp.seq.tail) {
                    const Tars* t = set.find(Sequence::pair(x, y));
                    if (!t) { pattern_ok = false; continue; }
                    const auto planted_p = static_cast<long long>(pp.periods);
                    const bool p_ok = std::llabs(static_cast<long long>(t->p) - planted_p) <= 1;
                    const bool alpha_ok = t->alpha1 <= pp.intra_lo && t->alpha2 >= pp.intra_hi;
                    if (!p_ok || !alpha_ok) pattern_ok = false;
                }
            if (pattern_ok) ++recovered;
        }

        // a mined pair is consistent with the construction when both items
        // sit in one pattern or either side is the always-on staple
        for (const Tars& t : set.tars) {
            if (t.seq.length() != 2) continue;
            ++base_total;
            const ItemId x = t.seq.head.front(), y = t.seq.tail.front();
            auto px = corpus.pattern_of.find(x);
            auto py = corpus.pattern_of.find(y);
            if (px == corpus.pattern_of.end() || py == corpus.pattern_of.end()) continue;
            if (px->second == py->second || px->second == corpus.staple_pattern ||
                py->second == corpus.staple_pattern)
                ++base_true;
        }
    }
    const double recovery =
        planted_total ? static_cast<double>(recovered) / static_cast<double>(planted_total) : 0;
    const double precision =
        base_total ? static_cast<double>(base_true) / static_cast<double>(base_total) : 0;
    const double el = seconds_since(start);
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "recovery %.3f (need >= 0.90), base precision %.3f (need >= 0.80); %.1fs",
                  recovery, precision, el);
    report(4, recovery >= 0.90 && precision >= 0.80 && el < 300.0,
           "planted patterns recovered, few spurious base patterns", detail);
}

// --- criterion 5: ranking direction against the baselines ---

void criterion_5(const CorpusTruth& corpus) {
    EvalOptions opt;
    opt.k_policy = KPolicy::personalized();
    opt.jobs = 2;

    opt.method = Method::Tbp;
    const auto tbp = evaluate_leave_one_out(corpus.data, opt);
    opt.method = Method::Top;
    const auto top = evaluate_leave_one_out(corpus.data, opt);
    opt.method = Method::Mc;
    const auto mc = evaluate_leave_one_out(corpus.data, opt);

    const double gap_top = tbp.mean_f1 - top.mean_f1;
    const double gap_mc = tbp.mean_f1 - mc.mean_f1;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "mean F1: tbp %.3f, top %.3f, mc %.3f; gaps %.3f/%.3f (need >= 0.03)",
                  tbp.mean_f1, top.mean_f1, mc.mean_f1, gap_top, gap_mc);
    report(5, gap_top >= 0.03 && gap_mc >= 0.03, "tbp leads both user-centric baselines", detail);
}

// --- criterion 6: estimated thresholds against one-size-fits-all ---

void criterion_6(const CorpusTruth& corpus) {
    EvalOptions opt;
    opt.k_policy = KPolicy::personalized();
    opt.jobs = 2;
    auto cmp = evaluate_parameter_fixed(corpus.data, opt, ParameterTriple{14.0, 3.0, 2.0});
    char detail[128];
    std::snprintf(detail, sizeof detail, "parameter-free %.3f vs fixed(14,3,2) %.3f",
                  cmp.parameter_free.mean_f1, cmp.parameter_fixed.mean_f1);
    report(6, cmp.parameter_free.mean_f1 >= cmp.parameter_fixed.mean_f1,
           "parameter-free at least as accurate as fixed thresholds", detail);
}

// --- criterion 7: multi-step stability ---

void criterion_7() {
    Dataset stationary = generate_synthetic(stationary_config());
    EvalOptions opt;
    opt.k_policy = KPolicy::personalized();
    opt.jobs = 2;
    opt.method = Method::Tbp;
    auto steps = evaluate_multi_step(stationary, opt, 0.7, 20);
    double lo = 1e9, hi = -1e9;
    std::size_t populated = 0;
    for (const auto& s : steps) {
        if (s.rows.empty()) continue;
        ++populated;
        lo = std::min(lo, s.mean_f1);
        hi = std::max(hi, s.mean_f1);
    }
    const double spread = populated ? hi - lo : 1e9;
    char detail[128];
    std::snprintf(detail, sizeof detail, "%zu steps, mean F1 in [%.3f, %.3f], spread %.3f",
                  populated, lo, hi, spread);
    report(7, populated == 20 && spread <= 0.05, "per-step accuracy stays flat over 20 steps",
           detail);
}

// --- criterion 8: metric formulas on hand-built pairs ---

struct MetricCase {
    std::vector<ItemId> actual;
    std::vector<ItemId> predicted;
    std::size_t overlap;
};

void criterion_8() {
    // fifty hand-built pairs; expected values follow the printed formulas
    // from the overlap count and the two set sizes
    const std::vector<MetricCase> cases = {
        {{1}, {}, 0},
        {{1}, {1}, 1},
        {{1}, {2}, 0},
        {{1}, {1, 2}, 1},
        {{1}, {2, 3}, 0},
        {{1, 2}, {}, 0},
        {{1, 2}, {1}, 1},
        {{1, 2}, {3}, 0},
        {{1, 2}, {1, 2}, 2},
        {{1, 2}, {2, 3}, 1},
        {{1, 2}, {3, 4}, 0},
        {{1, 2}, {1, 2, 3}, 2},
        {{1, 2}, {3, 4, 5}, 0},
        {{1, 2, 3}, {1}, 1},
        {{1, 2, 3}, {4}, 0},
        {{1, 2, 3}, {1, 2}, 2},
        {{1, 2, 3}, {1, 4}, 1},
        {{1, 2, 3}, {4, 5}, 0},
        {{1, 2, 3}, {1, 2, 3}, 3},
        {{1, 2, 3}, {1, 2, 4}, 2},
        {{1, 2, 3}, {1, 4, 5}, 1},
        {{1, 2, 3}, {4, 5, 6}, 0},
        {{1, 2, 3}, {1, 2, 3, 4}, 3},
        {{1, 2, 3}, {2, 3, 4, 5}, 2},
        {{1, 2, 3}, {4, 5, 6, 7}, 0},
        {{1, 2, 3, 4}, {1, 2, 5}, 2},
        {{1, 2, 3, 4}, {1}, 1},
        {{1, 2, 3, 4}, {5}, 0},
        {{1, 2, 3, 4}, {1, 2, 3, 4}, 4},
        {{1, 2, 3, 4}, {1, 2, 3, 4, 5}, 4},
        {{1, 2, 3, 4}, {5, 6, 7, 8}, 0},
        {{1, 2, 3, 4}, {4, 5, 6, 7}, 1},
        {{1, 2, 3, 4}, {3, 4, 5}, 2},
        {{1, 2, 3, 4}, {2, 3, 4}, 3},
        {{1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}, 5},
        {{1, 2, 3, 4, 5}, {1}, 1},
        {{1, 2, 3, 4, 5}, {6}, 0},
        {{1, 2, 3, 4, 5}, {1, 6}, 1},
        {{1, 2, 3, 4, 5}, {1, 2, 6, 7}, 2},
        {{1, 2, 3, 4, 5}, {1, 2, 3, 6, 7}, 3},
        {{1, 2, 3, 4, 5}, {6, 7, 8, 9, 10}, 0},
        {{1, 2, 3, 4, 5}, {5, 4, 3, 2, 1}, 5},
        {{2, 4, 6}, {1, 2, 3}, 1},
        {{2, 4, 6}, {2, 4}, 2},
        {{2, 4, 6}, {6}, 1},
        {{10, 20}, {10, 20, 30, 40}, 2},
        {{10, 20}, {20}, 1},
        {{7}, {7, 8, 9, 10, 11}, 1},
        {{7, 8}, {8, 7}, 2},
        {{1, 3, 5, 7, 9}, {2, 3, 5, 8}, 2},
    };
    bool ok = cases.size() == 50;
    for (const auto& c : cases) {
        const auto prf = precision_recall_f1(c.actual, c.predicted);
        const double i = static_cast<double>(c.overlap);
        const double expected_p =
            c.predicted.empty() ? 0.0 : i / static_cast<double>(c.predicted.size());
        const double expected_r = i / static_cast<double>(c.actual.size());
        const double expected_f1 =
            c.overlap == 0
                ? 0.0
                : 2.0 * i / static_cast<double>(c.actual.size() + c.predicted.size());
        ok = ok && std::abs(prf.precision - expected_p) < 1e-12 &&
             std::abs(prf.recall - expected_r) < 1e-12 && std::abs(prf.f1 - expected_f1) < 1e-12 &&
             hit(c.actual, c.predicted) == (c.overlap > 0 ? 1 : 0);
    }
    char detail[64];
    std::snprintf(detail, sizeof detail, "%zu cases, exact match", cases.size());
    report(8, ok, "metric formulas on hand-built pairs", detail);
}

// --- criterion 9: worker count cannot change any output byte ---

void criterion_9(const CorpusTruth& corpus) {
    auto mine_all = [&](std::size_t jobs) {
        std::vector<const PurchaseHistory*> hs;
        for (const auto& [id, h] : corpus.data.histories) hs.push_back(&h);
        auto sets = parallel_map<TarsSet>(hs.size(), jobs,
                                          [&](std::size_t i) { return extract_tars(*hs[i]); });
        std::ostringstream os;
        for (const auto& s : sets) {
            os << s.customer << '\n';
            write_tars_jsonl(s, os);
        }
        return os.str();
    };
    const std::string mined_1 = mine_all(1);
    const std::string mined_8 = mine_all(8);

    auto evaluate_all = [&](std::size_t jobs) {
        EvalOptions opt;
        opt.k_policy = KPolicy::personalized();
        opt.jobs = jobs;
        opt.method = Method::Tbp;
        std::ostringstream os;
        write_report_csv(evaluate_leave_one_out(corpus.data, opt), os);
        write_step_series_csv(evaluate_multi_step(corpus.data, opt, 0.7, 5), os);
        return os.str();
    };
    const std::string eval_1 = evaluate_all(1);
    const std::string eval_8 = evaluate_all(8);

    const bool ok = mined_1 == mined_8 && eval_1 == eval_8;
    char detail[128];
    std::snprintf(detail, sizeof detail, "mine %zu bytes, reports %zu bytes",
                  mined_1.size(), eval_1.size());
    report(9, ok, "single- and multi-worker runs emit identical bytes", detail);
}

// --- criterion 10 (optional): public retail dataset ---

void criterion_10() {
    const char* path = std::getenv("TAFENG_CSV");
    if (!path) {
        std::printf("SKIP  criterion 10: public retail benchmark (set TAFENG_CSV to enable)\n");
        return;
    }
    try {
        Dataset ds = load_transactions(path);
        ds = filter_min_baskets(ds, 10);
        EvalOptions opt;
        opt.k_policy = KPolicy::personalized();
        opt.jobs = 8;
        opt.method = Method::Tbp;
        auto report_loo = evaluate_leave_one_out(ds, opt);
        const bool ok = std::abs(report_loo.mean_f1 - 0.07) <= 0.03;
        char detail[128];
        std::snprintf(detail, sizeof detail, "mean F1 %.3f over %zu customers (expect 0.07±0.03)",
                      report_loo.mean_f1, report_loo.evaluated);
        report(10, ok, "public retail benchmark", detail);
    } catch (const std::exception& e) {
        report(10, false, "public retail benchmark", e.what());
    }
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    CorpusTruth corpus = make_corpus();
    criterion_4(corpus);
    criterion_5(corpus);
    criterion_6(corpus);
    criterion_7();
    criterion_8();
    criterion_9(corpus);
    criterion_10();
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all required criteria passed\n");
    return failures == 0 ? 0 : 1;
}
