#include "tars/estimation.hpp"

#include <algorithm>
#include <cmath>

namespace tars {

double median(std::vector<double> values) {
    if (values.empty()) throw DataError("median of an empty list");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile_nearest_rank(std::vector<double> values, double q) {
    if (values.empty()) throw DataError("quantile of an empty list");
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    if (rank < 1) rank = 1;
    if (rank > values.size()) rank = values.size();
    return values[rank - 1];
}

std::size_t num_bins(const std::vector<double>& values) {
    if (values.empty()) throw DataError("num_bins of an empty list");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double range = *mx - *mn;
    if (range <= 0.0) return 1;
    const double n = static_cast<double>(values.size());
    const auto sturges = static_cast<std::size_t>(std::ceil(std::log2(n))) + 1;
    const double iqr =
        quantile_nearest_rank(values, 0.75) - quantile_nearest_rank(values, 0.25);
    if (iqr <= 0.0) return sturges;
    const double width = 2.0 * iqr * std::pow(n, -1.0 / 3.0);
    const auto fd = static_cast<std::size_t>(std::ceil(range / width));
    return std::max<std::size_t>(1, std::max(sturges, fd));
}

BinClustering bin_values(const std::vector<double>& values, std::size_t bins) {
    if (values.empty() || bins == 0) throw DataError("bin_values needs values and bins >= 1");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn, hi = *mx;
    const double width = (hi - lo) / static_cast<double>(bins);
    BinClustering out;
    out.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        out.edges[i] = lo + width * static_cast<double>(i);
    out.edges.back() = hi;
    out.assignment.reserve(values.size());
    for (double v : values) {
        std::size_t idx = 0;
        if (width > 0.0) {
            idx = static_cast<std::size_t>((v - lo) / width);
            if (idx >= bins) idx = bins - 1;  // the maximum lands in the last bin
        }
        out.assignment.push_back(idx);
    }
    return out;
}

BinClustering group_similar(const std::vector<double>& values) {
    return bin_values(values, num_bins(values));
}

namespace {

// assigns each value its cluster's median
std::vector<double> cluster_medians(const std::vector<double>& values,
                                    const BinClustering& clustering) {
    std::map<std::size_t, std::vector<double>> members;
    for (std::size_t i = 0; i < values.size(); ++i)
        members[clustering.assignment[i]].push_back(values[i]);
    std::map<std::size_t, double> med;
    for (auto& [bin, vals] : members) med[bin] = median(vals);
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = med[clustering.assignment[i]];
    return out;
}

} // namespace

std::map<Sequence, ParameterTriple> estimate_parameters(std::span<const BaseSequence> base,
                                                        EstimationTrace* trace) {
    if (base.empty()) throw DataError("estimate_parameters needs at least one base sequence");
    const std::size_t n = base.size();

    std::vector<SequenceEstimate> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i].seq = base[i].first;
        if (base[i].second.empty())
            throw DataError("base sequence " + base[i].first.to_string() + " has no occurrences");
    }

    // step 1: delta_max from clustered median inter-times
    std::vector<double> delta_hat(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> inter(base[i].second.inter.begin(), base[i].second.inter.end());
        delta_hat[i] = median(std::move(inter));
    }
    BinClustering c_delta = group_similar(delta_hat);
    std::vector<double> delta_max = cluster_medians(delta_hat, c_delta);

    // step 2: q_min from clustered median run sizes under delta_max; a
    // sequence with no compliant run contributes 0
    std::vector<double> q_hat(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto runs = temporally_compliant_periods(base[i].second, delta_max[i]);
        std::vector<double> sizes;
        sizes.reserve(runs.size());
        for (const Period& p : runs) sizes.push_back(static_cast<double>(p.support()));
        q_hat[i] = sizes.empty() ? 0.0 : median(std::move(sizes));
    }
    BinClustering c_q = group_similar(q_hat);
    std::vector<double> q_min = cluster_medians(q_hat, c_q);

    // step 3: p_min from the period counts of sequences with similar
    // occurrences-per-period
    std::vector<double> e_val(n);
    std::vector<double> rec(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto periods = detect_periods(base[i].second, delta_max[i], q_min[i]);
        double w = 0;
        for (const Period& p : periods) w += static_cast<double>(p.support());
        rows[i].w = w;
        rec[i] = static_cast<double>(periods.size());
        e_val[i] = periods.empty() ? 0.0 : w / static_cast<double>(periods.size());
    }
    BinClustering c_p = group_similar(e_val);
    std::map<std::size_t, std::vector<double>> rec_by_bin;
    for (std::size_t i = 0; i < n; ++i) rec_by_bin[c_p.assignment[i]].push_back(rec[i]);
    std::map<std::size_t, double> p_min_by_bin;
    for (auto& [bin, recs] : rec_by_bin) p_min_by_bin[bin] = std::max(1.0, median(recs));

    std::map<Sequence, ParameterTriple> out;
    for (std::size_t i = 0; i < n; ++i) {
        ParameterTriple t;
        t.delta_max = delta_max[i];
        t.q_min = q_min[i];
        t.p_min = p_min_by_bin[c_p.assignment[i]];
        out[base[i].first] = t;
        rows[i].delta_hat = delta_hat[i];
        rows[i].q_hat = q_hat[i];
        rows[i].e = e_val[i];
        rows[i].rec = static_cast<std::size_t>(rec[i]);
        rows[i].cluster_delta = c_delta.assignment[i];
        rows[i].cluster_q = c_q.assignment[i];
        rows[i].cluster_p = c_p.assignment[i];
        rows[i].triple = t;
    }
    if (trace) trace->rows = std::move(rows);
    return out;
}

} // namespace tars
