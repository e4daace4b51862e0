#include "tars/occurrence.hpp"

#include <algorithm>
#include <sstream>

namespace tars {

Sequence::Sequence(std::vector<ItemId> h, std::vector<ItemId> t)
    : head(std::move(h)), tail(std::move(t)) {
    std::sort(head.begin(), head.end());
    head.erase(std::unique(head.begin(), head.end()), head.end());
    std::sort(tail.begin(), tail.end());
    tail.erase(std::unique(tail.begin(), tail.end()), tail.end());
    if (head.empty() || tail.empty())
        throw DataError("sequence head and tail must be non-empty");
}

std::string Sequence::to_string() const {
    std::ostringstream os;
    auto itemset = [&](const std::vector<ItemId>& v) {
        os << '{';
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) os << ',';
            os << v[i];
        }
        os << '}';
    };
    itemset(head);
    os << "->";
    itemset(tail);
    return os.str();
}

bool is_subsequence(const Sequence& s1, const Sequence& s2) {
    return std::includes(s2.head.begin(), s2.head.end(), s1.head.begin(), s1.head.end()) &&
           std::includes(s2.tail.begin(), s2.tail.end(), s1.tail.begin(), s1.tail.end());
}

void OccurrenceStats::validate() const {
    if (head_times.size() != intra.size() || head_times.size() != inter.size())
        throw DataError("occurrence stats lists must be aligned");
    for (std::size_t j = 0; j < head_times.size(); ++j) {
        if (intra[j] < 1 || inter[j] < 1)
            throw DataError("intra and inter times must be >= 1");
        if (intra[j] > inter[j])
            throw DataError("intra time exceeds inter time");
        if (j + 1 < head_times.size() && head_times[j] >= head_times[j + 1])
            throw DataError("head times must be strictly increasing");
    }
    if (!inter.empty() && inter.back() != intra.back())
        throw DataError("final inter time must equal final intra time");
}

OccurrenceStats minimal_occurrences(const std::vector<Day>& head_times,
                                    const std::vector<Day>& tail_times) {
    OccurrenceStats out;
    std::size_t t = 0;
    for (std::size_t i = 0; i < head_times.size(); ++i) {
        const Day th = head_times[i];
        while (t < tail_times.size() && tail_times[t] <= th) ++t;
        if (t == tail_times.size()) break;
        const Day tl = tail_times[t];
        // skip this head if a later head still precedes the tail
        if (i + 1 < head_times.size() && head_times[i + 1] < tl) continue;
        out.head_times.push_back(th);
        out.intra.push_back(tl - th);
    }
    const std::size_t m = out.head_times.size();
    out.inter.resize(m);
    for (std::size_t j = 0; j + 1 < m; ++j)
        out.inter[j] = out.head_times[j + 1] - out.head_times[j];
    if (m > 0) out.inter[m - 1] = out.intra[m - 1];
    return out;
}

OccurrenceStats minimal_occurrences(const PurchaseHistory& history, const Sequence& seq) {
    return minimal_occurrences(history.times_containing(seq.head),
                               history.times_containing(seq.tail));
}

std::vector<Period> detect_periods(const OccurrenceStats& stats, double delta_max, double q_min) {
    std::vector<Period> runs;
    std::size_t begin = 0, len = 0;
    auto flush = [&]() {
        if (len > 0) runs.push_back({begin, len});
        len = 0;
    };
    // an occurrence belongs to a period only when its own inter-time stays
    // within the bound; separated occurrences belong to none
    for (std::size_t w = 0; w < stats.head_times.size(); ++w) {
        if (static_cast<double>(stats.inter[w]) <= delta_max) {
            if (len == 0) begin = w;
            ++len;
        } else {
            flush();
        }
    }
    flush();
    std::vector<Period> out;
    for (const Period& p : runs)
        if (static_cast<double>(p.support()) >= q_min) out.push_back(p);
    return out;
}

std::vector<Period> temporally_compliant_periods(const OccurrenceStats& stats, double delta_max) {
    return detect_periods(stats, delta_max, 1.0);
}

double median_period_support(const std::vector<Period>& periods) {
    if (periods.empty()) throw DataError("median of an empty period list");
    std::vector<double> supports;
    supports.reserve(periods.size());
    for (const Period& p : periods) supports.push_back(static_cast<double>(p.support()));
    std::sort(supports.begin(), supports.end());
    const std::size_t n = supports.size();
    return n % 2 ? supports[n / 2] : 0.5 * (supports[n / 2 - 1] + supports[n / 2]);
}

} // namespace tars
