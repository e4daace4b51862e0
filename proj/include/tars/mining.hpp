#ifndef TARS_MINING_HPP
#define TARS_MINING_HPP

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>

#include "tars/estimation.hpp"
#include "tars/occurrence.hpp"

namespace tars {

// A temporal annotated recurring sequence: the sequence, its intra-time
// range, the number of periods it recurs in, and the median occurrences per
// period. The periods are retained for inspection.
struct Tars {
    Sequence seq;
    Day alpha1 = 0;
    Day alpha2 = 0;
    std::size_t p = 0;
    double q = 0;
    std::vector<Period> periods;

    bool operator==(const Tars& o) const {
        return seq == o.seq && alpha1 == o.alpha1 && alpha2 == o.alpha2 && p == o.p && q == o.q;
    }
    bool operator<(const Tars& o) const { return seq < o.seq; }
};

struct TarsSet {
    CustomerId customer;
    std::vector<Tars> tars;                      // sorted by sequence
    std::map<Sequence, ParameterTriple> triples; // thresholds used for the base sequences

    bool contains(const Sequence& s) const;
    const Tars* find(const Sequence& s) const;
};

struct MiningOptions {
    std::size_t max_length = 4;                  // |head| + |tail| cap for candidates
    std::optional<ParameterTriple> fixed;        // bypasses estimation when set
};

// All length-2 sequences {x}->{y} (x = y allowed) with at least one minimal
// occurrence, each with its stats, sorted by sequence.
std::vector<BaseSequence> extract_base_sequences(const PurchaseHistory& history);

// Keeps the base sequences whose recurrence under their own triple reaches
// p_min. The recurrence test runs per sequence; it is never inherited.
std::vector<BaseSequence> filter_recurring(const std::vector<BaseSequence>& base,
                                           const std::map<Sequence, ParameterTriple>& triples);

// Prefix tree of candidate sequences. Children extend their parent by one
// item; every node carries freshly computed occurrence stats.
struct TarsTreeNode {
    Sequence seq;
    OccurrenceStats stats;
    ParameterTriple triple;          // element-wise median over the length-2 subsequences
    std::vector<Period> periods;     // under the node's triple
    std::vector<std::unique_ptr<TarsTreeNode>> children;
};

struct TarsTree {
    std::vector<std::unique_ptr<TarsTreeNode>> roots;

    std::size_t node_count() const;
    void for_each(const std::function<void(const TarsTreeNode&)>& fn) const;
};

// Grows candidates whose every cross pair {x}->{y} (x in head, y in tail) is
// base recurring. Growth below a node stops when its support drops under the
// smallest q_min among the base recurring sequences, which no candidate
// period could satisfy.
TarsTree build_tars_tree(const PurchaseHistory& history,
                         const std::vector<BaseSequence>& base_recurring,
                         const std::map<Sequence, ParameterTriple>& triples,
                         const MiningOptions& options = {});

// Annotation of a sequence from its stats and periods: p is the period
// count, q the median period support, and the intra-time range covers only
// occurrences that belong to a period.
Tars annotate(const Sequence& seq, const OccurrenceStats& stats,
              const std::vector<Period>& periods);

// The full extraction pipeline: base sequences, parameter estimation,
// recurring filter, tree growth, per-node recurrence check and annotation.
// Histories too short to produce base sequences yield an empty set.
TarsSet extract_tars(const PurchaseHistory& history, MiningOptions options = {},
                     EstimationTrace* trace = nullptr);

// --- serialization ---

// one TARS per line: {"head":[..],"tail":[..],"a1":..,"a2":..,"p":..,"q":..}
void write_tars_jsonl(const TarsSet& set, std::ostream& out);
TarsSet read_tars_jsonl(std::istream& in, const CustomerId& customer);

// e.g. {2,7} --(2,15)-->[p=11.40,q=8.15] {4}
std::string render_tars(const Tars& t);

} // namespace tars

#endif
