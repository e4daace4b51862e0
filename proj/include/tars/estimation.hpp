#ifndef TARS_ESTIMATION_HPP
#define TARS_ESTIMATION_HPP

#include <map>
#include <span>
#include <vector>

#include "tars/occurrence.hpp"

namespace tars {

// Per-sequence thresholds: maximum inter-time inside a period, minimum
// occurrences per period, minimum number of periods. The latter two are
// medians, so they are real-valued.
struct ParameterTriple {
    double delta_max = 1.0;
    double q_min = 1.0;
    double p_min = 1.0;

    bool operator==(const ParameterTriple& o) const {
        return delta_max == o.delta_max && q_min == o.q_min && p_min == o.p_min;
    }
};

// median with the mean-of-middle-two convention for even counts
double median(std::vector<double> values);

// nearest-rank quantile: value at rank ceil(q * n), 1-based
double quantile_nearest_rank(std::vector<double> values, double q);

// max of the Sturges and Freedman-Diaconis bin counts; 1 when the range is
// zero, Sturges alone when the IQR is zero
std::size_t num_bins(const std::vector<double>& values);

// Equal-width binning over [min, max].
struct BinClustering {
    std::vector<double> edges;            // k+1 ascending edges
    std::vector<std::size_t> assignment;  // values[i] -> bin index

    std::size_t bin_count() const { return edges.empty() ? 0 : edges.size() - 1; }
};

BinClustering bin_values(const std::vector<double>& values, std::size_t bins);
// bin_values with num_bins(values) bins
BinClustering group_similar(const std::vector<double>& values);

// Intermediate statistics of the estimation, kept for inspection dumps.
struct SequenceEstimate {
    Sequence seq;
    double delta_hat = 0;  // median inter-time
    double q_hat = 0;      // median temporally-compliant run size
    double w = 0;          // total occurrences across periods
    double e = 0;          // w / |periods| (0 when no periods)
    std::size_t rec = 0;   // period count under the estimated (delta_max, q_min)
    std::size_t cluster_delta = 0;
    std::size_t cluster_q = 0;
    std::size_t cluster_p = 0;
    ParameterTriple triple;
};

struct EstimationTrace {
    std::vector<SequenceEstimate> rows;  // one per base sequence, in input order
};

using BaseSequence = std::pair<Sequence, OccurrenceStats>;

// Estimates (delta_max, q_min, p_min) for every base sequence:
//   1. delta_hat = median inter-time; cluster; delta_max = cluster median.
//   2. q_hat = median size of the compliant runs under delta_max, 0 when
//      no occurrence is compliant; cluster; q_min = cluster median.
//   3. periods under (delta_max, q_min); e = occurrences per period (0 when
//      there are none); cluster the e values; p_min = median of the cluster
//      members' period counts, floored at 1.
std::map<Sequence, ParameterTriple> estimate_parameters(std::span<const BaseSequence> base,
                                                        EstimationTrace* trace = nullptr);

} // namespace tars

#endif
