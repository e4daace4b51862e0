#include "tars/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "tars/baselines.hpp"
#include "tars/parallel.hpp"
#include "tars/predictor.hpp"
#include "tars/split.hpp"

namespace tars {

Prf precision_recall_f1(const std::vector<ItemId>& actual, const std::vector<ItemId>& predicted) {
    if (actual.empty()) throw DataError("metrics need a non-empty actual basket");
    std::unordered_set<ItemId> truth(actual.begin(), actual.end());
    std::size_t inter = 0;
    for (ItemId id : predicted) inter += truth.count(id);
    Prf out;
    out.precision = predicted.empty()
                        ? 0.0
                        : static_cast<double>(inter) / static_cast<double>(predicted.size());
    out.recall = static_cast<double>(inter) / static_cast<double>(actual.size());
    out.f1 = (out.precision + out.recall) > 0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

int hit(const std::vector<ItemId>& actual, const std::vector<ItemId>& predicted) {
    std::unordered_set<ItemId> truth(actual.begin(), actual.end());
    for (ItemId id : predicted)
        if (truth.count(id)) return 1;
    return 0;
}

const char* method_name(Method m) {
    switch (m) {
        case Method::Tbp: return "tbp";
        case Method::Top: return "top";
        case Method::Lst: return "lst";
        case Method::Mc: return "mc";
    }
    return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
    if (name == "tbp") return Method::Tbp;
    if (name == "top") return Method::Top;
    if (name == "lst") return Method::Lst;
    if (name == "mc") return Method::Mc;
    return std::nullopt;
}

namespace {

std::size_t choose_k(const KPolicy& policy, const PurchaseHistory& train) {
    return policy.k ? *policy.k : personalized_k(train);
}

struct Prediction {
    std::vector<ItemId> items;
    std::size_t active_tars = 0;
};

// `model` carries the mined patterns for tbp; `scan` is the history the
// prediction may look at (it can extend past the mining prefix)
Prediction predict_items(Method method, const TarsSet* model, const PurchaseHistory& scan,
                         std::size_t k) {
    Prediction out;
    switch (method) {
        case Method::Tbp: {
            ActiveTars active = get_active_tars(scan, *model);
            out.active_tars = active.active.size();
            out.items = rank_items(scan, calculate_item_scores(scan, active), k);
            break;
        }
        case Method::Top: out.items = predict_top(scan, k); break;
        case Method::Lst: out.items = predict_lst(scan, k); break;
        case Method::Mc: out.items = predict_mc(scan, k); break;
    }
    return out;
}

CustomerResult score_prediction(const PurchaseHistory& train, const Basket& test,
                                const Prediction& pred, std::size_t k) {
    CustomerResult r;
    r.customer = train.customer;
    r.k = k;
    r.train_baskets = train.size();
    r.predicted = pred.items.size();
    const Prf prf = precision_recall_f1(test.items, pred.items);
    r.precision = prf.precision;
    r.recall = prf.recall;
    r.f1 = prf.f1;
    r.hit = hit(test.items, pred.items);
    r.active_tars = pred.active_tars;
    return r;
}

// minimum train length a method can predict from
std::size_t min_train_for(Method m) { return m == Method::Mc ? 2 : 1; }

} // namespace

void EvaluationReport::finalize() {
    evaluated = rows.size();
    double f1_sum = 0, hits = 0, f1_hit_sum = 0;
    for (const auto& r : rows) {
        f1_sum += r.f1;
        hits += r.hit;
        if (r.hit) f1_hit_sum += r.f1;
    }
    mean_f1 = rows.empty() ? 0.0 : f1_sum / static_cast<double>(rows.size());
    hit_ratio = rows.empty() ? 0.0 : hits / static_cast<double>(rows.size());
    normalized_f1 = hits > 0 ? f1_hit_sum / hits : 0.0;
}

EvaluationReport evaluate_leave_one_out(const Dataset& ds, const EvalOptions& options) {
    EvaluationReport report;
    report.protocol = "loo";
    report.method = options.method;
    report.k_policy = options.k_policy.k ? std::to_string(*options.k_policy.k) : "personal";

    std::vector<const PurchaseHistory*> histories;
    for (const auto& [id, h] : ds.histories) histories.push_back(&h);

    struct Row {
        bool skipped = true;
        CustomerResult result;
    };
    auto rows = parallel_map<Row>(histories.size(), options.jobs, [&](std::size_t i) {
        Row row;
        const PurchaseHistory& h = *histories[i];
        if (h.size() < 2) return row;
        LeaveOneOut split = split_leave_one_out(h);
        if (split.train.size() < min_train_for(options.method)) return row;
        const std::size_t k = choose_k(options.k_policy, split.train);
        TarsSet model;
        if (options.method == Method::Tbp) model = extract_tars(split.train, options.mining);
        Prediction pred = predict_items(options.method, &model, split.train, k);
        row.result = score_prediction(split.train, split.test, pred, k);
        row.result.tars_count = model.tars.size();
        row.skipped = false;
        return row;
    });
    for (auto& row : rows) {
        if (row.skipped) ++report.skipped;
        else report.rows.push_back(std::move(row.result));
    }
    report.finalize();
    return report;
}

std::vector<EvaluationReport> evaluate_multi_step(const Dataset& ds, const EvalOptions& options,
                                                  double train_fraction, std::size_t horizon) {
    std::vector<const PurchaseHistory*> histories;
    for (const auto& [id, h] : ds.histories) histories.push_back(&h);

    struct CustomerSteps {
        bool skipped = true;
        std::vector<CustomerResult> steps;  // [0] is step 1
    };
    auto per_customer =
        parallel_map<CustomerSteps>(histories.size(), options.jobs, [&](std::size_t i) {
            CustomerSteps out;
            const PurchaseHistory& h = *histories[i];
            if (h.size() < 2) return out;
            FractionSplit split;
            try {
                split = split_fraction(h, train_fraction);
            } catch (const DataError&) {
                return out;
            }
            if (split.holdout.empty() || split.train.size() < min_train_for(options.method))
                return out;
            const std::size_t k = choose_k(options.k_policy, split.train);
            TarsSet model;
            if (options.method == Method::Tbp) model = extract_tars(split.train, options.mining);
            out.skipped = false;

            PurchaseHistory observed = split.train;  // grows one basket per step
            const std::size_t steps = std::min<std::size_t>(horizon, split.holdout.size());
            for (std::size_t s = 0; s < steps; ++s) {
                const Basket& target = split.holdout[s];
                Prediction pred = predict_items(options.method, &model, observed, k);
                CustomerResult r = score_prediction(split.train, target, pred, k);
                r.tars_count = model.tars.size();
                out.steps.push_back(std::move(r));
                observed.baskets.push_back(target);
            }
            return out;
        });

    std::vector<EvaluationReport> reports(horizon);
    std::size_t skipped = 0;
    for (const auto& cs : per_customer)
        if (cs.skipped) ++skipped;
    for (std::size_t s = 0; s < horizon; ++s) {
        reports[s].protocol = "multistep:" + std::to_string(s + 1);
        reports[s].method = options.method;
        reports[s].k_policy = options.k_policy.k ? std::to_string(*options.k_policy.k) : "personal";
        reports[s].skipped = skipped;
        for (const auto& cs : per_customer)
            if (s < cs.steps.size()) reports[s].rows.push_back(cs.steps[s]);
        reports[s].finalize();
    }
    return reports;
}

namespace {

double percentile_nearest(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    if (rank < 1) rank = 1;
    if (rank > sorted.size()) rank = sorted.size();
    return sorted[rank - 1];
}

Band band_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    Band b;
    b.p10 = percentile_nearest(values, 0.10);
    b.p25 = percentile_nearest(values, 0.25);
    b.p50 = percentile_nearest(values, 0.50);
    b.p75 = percentile_nearest(values, 0.75);
    b.p90 = percentile_nearest(values, 0.90);
    return b;
}

} // namespace

std::vector<WeekStats> evaluate_incremental_weeks(const Dataset& ds, const EvalOptions& options) {
    std::vector<const PurchaseHistory*> histories;
    for (const auto& [id, h] : ds.histories) histories.push_back(&h);

    struct WeekRow {
        std::size_t week;
        double f1;
        double items;
        double tars;
        double active;
    };
    auto per_customer =
        parallel_map<std::vector<WeekRow>>(histories.size(), options.jobs, [&](std::size_t i) {
            std::vector<WeekRow> out;
            const PurchaseHistory& h = *histories[i];
            if (h.size() < 2) return out;
            const Day first = h.front().time;
            for (std::size_t week = 2;; ++week) {
                const Day cutoff = first + static_cast<Day>(7 * week);
                PurchaseHistory train;
                train.customer = h.customer;
                const Basket* target = nullptr;
                for (const auto& b : h.baskets) {
                    if (b.time < cutoff) train.baskets.push_back(b);
                    else { target = &b; break; }
                }
                if (!target) break;  // history exhausted; later weeks have no target either
                if (train.size() < min_train_for(options.method)) continue;
                const std::size_t k = choose_k(options.k_policy, train);
                TarsSet model;
                if (options.method == Method::Tbp) model = extract_tars(train, options.mining);
                Prediction pred = predict_items(options.method, &model, train, k);
                const Prf prf = precision_recall_f1(target->items, pred.items);
                out.push_back({week, prf.f1, static_cast<double>(train.distinct_items().size()),
                               static_cast<double>(model.tars.size()),
                               static_cast<double>(pred.active_tars)});
            }
            return out;
        });

    std::map<std::size_t, std::vector<WeekRow>> by_week;
    for (const auto& rows : per_customer)
        for (const auto& r : rows) by_week[r.week].push_back(r);

    std::vector<WeekStats> out;
    for (const auto& [week, rows] : by_week) {
        WeekStats w;
        w.week = week;
        w.customers = rows.size();
        std::vector<double> f1, items, tars_n, active;
        for (const auto& r : rows) {
            f1.push_back(r.f1);
            items.push_back(r.items);
            tars_n.push_back(r.tars);
            active.push_back(r.active);
        }
        w.f1 = band_of(std::move(f1));
        w.items = band_of(std::move(items));
        w.tars = band_of(std::move(tars_n));
        w.active = band_of(std::move(active));
        out.push_back(w);
    }
    return out;
}

ParameterFixedComparison evaluate_parameter_fixed(const Dataset& ds, const EvalOptions& options,
                                                  ParameterTriple fixed) {
    ParameterFixedComparison out;
    EvalOptions free_opts = options;
    free_opts.method = Method::Tbp;
    free_opts.mining.fixed.reset();
    out.parameter_free = evaluate_leave_one_out(ds, free_opts);
    out.parameter_free.protocol = "paramfree";

    EvalOptions fixed_opts = free_opts;
    fixed_opts.mining.fixed = fixed;
    out.parameter_fixed = evaluate_leave_one_out(ds, fixed_opts);
    out.parameter_fixed.protocol = "paramfixed";

    for (const auto& r : out.parameter_free.rows) out.tars_counts_free.push_back(r.tars_count);
    for (const auto& r : out.parameter_fixed.rows) out.tars_counts_fixed.push_back(r.tars_count);
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

void write_report_csv(const EvaluationReport& report, std::ostream& out) {
    out << "customer,k,train_baskets,predicted,hit,precision,recall,f1,tars,active_tars\n";
    for (const auto& r : report.rows)
        out << r.customer << ',' << r.k << ',' << r.train_baskets << ',' << r.predicted << ','
            << r.hit << ',' << fmt(r.precision) << ',' << fmt(r.recall) << ',' << fmt(r.f1) << ','
            << r.tars_count << ',' << r.active_tars << '\n';
}

void write_report_json(const EvaluationReport& report, std::ostream& out) {
    nlohmann::json j;
    j["protocol"] = report.protocol;
    j["method"] = method_name(report.method);
    j["k_policy"] = report.k_policy;
    j["evaluated"] = report.evaluated;
    j["skipped"] = report.skipped;
    j["mean_f1"] = fmt(report.mean_f1);
    j["hit_ratio"] = fmt(report.hit_ratio);
    j["normalized_f1"] = fmt(report.normalized_f1);
    out << j.dump(2) << '\n';
}

void write_week_series_csv(const std::vector<WeekStats>& weeks, std::ostream& out) {
    out << "week,customers";
    for (const char* panel : {"f1", "items", "tars", "active"})
        for (const char* p : {"p10", "p25", "p50", "p75", "p90"})
            out << ',' << panel << '_' << p;
    out << '\n';
    auto put = [&](const Band& b) {
        out << ',' << fmt(b.p10) << ',' << fmt(b.p25) << ',' << fmt(b.p50) << ',' << fmt(b.p75)
            << ',' << fmt(b.p90);
    };
    for (const auto& w : weeks) {
        out << w.week << ',' << w.customers;
        put(w.f1);
        put(w.items);
        put(w.tars);
        put(w.active);
        out << '\n';
    }
}

void write_step_series_csv(const std::vector<EvaluationReport>& steps, std::ostream& out) {
    out << "step,customers,mean_f1,hit_ratio,normalized_f1\n";
    for (std::size_t s = 0; s < steps.size(); ++s)
        out << (s + 1) << ',' << steps[s].rows.size() << ',' << fmt(steps[s].mean_f1) << ','
            << fmt(steps[s].hit_ratio) << ',' << fmt(steps[s].normalized_f1) << '\n';
}

} // namespace tars
