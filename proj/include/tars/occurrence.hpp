#ifndef TARS_OCCURRENCE_HPP
#define TARS_OCCURRENCE_HPP

#include <string>
#include <tuple>
#include <vector>

#include "tars/core.hpp"

namespace tars {

// A sequence head -> tail: the tail itemset is bought after the head itemset.
// Both itemsets are sorted, non-empty and duplicate-free.
struct Sequence {
    std::vector<ItemId> head;
    std::vector<ItemId> tail;

    Sequence() = default;
    Sequence(std::vector<ItemId> h, std::vector<ItemId> t);
    static Sequence pair(ItemId x, ItemId y) { return Sequence({x}, {y}); }

    std::size_t length() const { return head.size() + tail.size(); }
    std::string to_string() const;

    bool operator==(const Sequence& o) const { return head == o.head && tail == o.tail; }
    bool operator!=(const Sequence& o) const { return !(*this == o); }
    bool operator<(const Sequence& o) const {
        return std::tie(head, tail) < std::tie(o.head, o.tail);
    }
};

// s1 is a subsequence of s2 when head(s1) ⊆ head(s2) and tail(s1) ⊆ tail(s2)
bool is_subsequence(const Sequence& s1, const Sequence& s2);

// Per-occurrence statistics of a sequence over one history.
// head_times[j] is the head-basket day of the j-th minimal occurrence,
// intra[j] the days from head to tail, inter[j] the days from this head to
// the next one; the final inter entry equals the final intra entry.
struct OccurrenceStats {
    std::vector<Day> head_times;
    std::vector<Day> intra;
    std::vector<Day> inter;

    std::size_t support() const { return head_times.size(); }
    bool empty() const { return head_times.empty(); }
    void validate() const;
};

// A maximal stretch of occurrences whose inter-times stay within the bound,
// stored as an index range [begin, begin+length) into the stats arrays.
struct Period {
    std::size_t begin = 0;
    std::size_t length = 0;

    std::size_t support() const { return length; }
    std::vector<Day> times(const OccurrenceStats& stats) const {
        return {stats.head_times.begin() + begin,
                stats.head_times.begin() + begin + length};
    }
    bool operator==(const Period& o) const { return begin == o.begin && length == o.length; }
};

// Minimal occurrences of `seq` in `history`: pairs (t_h, t_l) with
// head ⊆ basket(t_h), tail ⊆ basket(t_l), t_h < t_l, such that no other
// qualifying pair lies inside [t_h, t_l]. Equivalently, t_l is the earliest
// tail basket after t_h and no head basket falls strictly between them.
OccurrenceStats minimal_occurrences(const PurchaseHistory& history, const Sequence& seq);

// Same, from precomputed head/tail basket-time lists (both ascending).
OccurrenceStats minimal_occurrences(const std::vector<Day>& head_times,
                                    const std::vector<Day>& tail_times);

// Maximal contiguous runs of occurrences whose inter-times stay within
// delta_max; an occurrence whose own inter-time exceeds the bound belongs to
// no run. Runs with support >= q_min are the periods.
std::vector<Period> detect_periods(const OccurrenceStats& stats, double delta_max, double q_min);

// detect_periods with only the temporal constraint (q_min = 1)
std::vector<Period> temporally_compliant_periods(const OccurrenceStats& stats, double delta_max);

inline std::size_t recurrence(const std::vector<Period>& periods) { return periods.size(); }

// median period support; even counts average the two middle values
double median_period_support(const std::vector<Period>& periods);

} // namespace tars

#endif
