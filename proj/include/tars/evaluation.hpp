#ifndef TARS_EVALUATION_HPP
#define TARS_EVALUATION_HPP

#include <iosfwd>
#include <optional>
#include <variant>

#include "tars/mining.hpp"

namespace tars {

// --- metrics ---

struct Prf {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

// precision = |b ∩ b*| / |b*| (0 when the prediction is empty),
// recall = |b ∩ b*| / |b|, f1 their harmonic mean (0 when both are 0)
Prf precision_recall_f1(const std::vector<ItemId>& actual, const std::vector<ItemId>& predicted);

// 1 when the prediction intersects the actual basket
int hit(const std::vector<ItemId>& actual, const std::vector<ItemId>& predicted);

// --- protocols ---

enum class Method { Tbp, Top, Lst, Mc };

const char* method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

struct KPolicy {
    // fixed k, or the customer's mean train-basket size when personalized
    static KPolicy fixed(std::size_t k) { return {k}; }
    static KPolicy personalized() { return {std::nullopt}; }
    std::optional<std::size_t> k;
};

struct EvalOptions {
    Method method = Method::Tbp;
    KPolicy k_policy = KPolicy::personalized();
    MiningOptions mining;
    std::size_t jobs = 1;
};

struct CustomerResult {
    CustomerId customer;
    std::size_t k = 0;
    std::size_t train_baskets = 0;
    std::size_t predicted = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    int hit = 0;
    std::size_t tars_count = 0;    // mined patterns (tbp only)
    std::size_t active_tars = 0;   // active patterns at prediction time (tbp only)
};

struct EvaluationReport {
    std::string protocol;
    Method method = Method::Tbp;
    std::string k_policy;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;       // customers too short for the protocol
    double mean_f1 = 0;
    double hit_ratio = 0;
    double normalized_f1 = 0;      // mean f1 over customers with a hit
    std::vector<CustomerResult> rows;

    void finalize();  // recomputes the aggregates from the rows
};

// leave-one-out: train on all but the last basket, test on the last
EvaluationReport evaluate_leave_one_out(const Dataset& ds, const EvalOptions& options);

// Model mined once on the fraction prefix; step s predicts the s-th holdout
// basket with the history observed so far. Customers without step s drop out
// of that step's aggregate.
std::vector<EvaluationReport> evaluate_multi_step(const Dataset& ds, const EvalOptions& options,
                                                  double train_fraction = 0.7,
                                                  std::size_t horizon = 20);

struct Band {
    double p10 = 0, p25 = 0, p50 = 0, p75 = 0, p90 = 0;
};

struct WeekStats {
    std::size_t week = 0;  // weeks of history used for training
    std::size_t customers = 0;
    Band f1;       // prediction quality
    Band items;    // distinct items seen in training
    Band tars;     // mined patterns
    Band active;   // active patterns at prediction time
};

// Trains on the first w weeks of each customer's history (weeks counted from
// the customer's first basket) and predicts the next basket after the
// cutoff, for w = 2,3,... while any customer still has a target.
std::vector<WeekStats> evaluate_incremental_weeks(const Dataset& ds, const EvalOptions& options);

struct ParameterFixedComparison {
    EvaluationReport parameter_free;
    EvaluationReport parameter_fixed;
    std::vector<std::size_t> tars_counts_free;   // per customer
    std::vector<std::size_t> tars_counts_fixed;
};

// Leave-one-out with estimated triples versus a constant triple for every
// base sequence.
ParameterFixedComparison evaluate_parameter_fixed(const Dataset& ds, const EvalOptions& options,
                                                  ParameterTriple fixed = {14.0, 3.0, 2.0});

// --- report output ---

void write_report_csv(const EvaluationReport& report, std::ostream& out);
void write_report_json(const EvaluationReport& report, std::ostream& out);
void write_week_series_csv(const std::vector<WeekStats>& weeks, std::ostream& out);
void write_step_series_csv(const std::vector<EvaluationReport>& steps, std::ostream& out);

} // namespace tars

#endif
