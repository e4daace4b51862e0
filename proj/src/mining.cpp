#include "tars/mining.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace tars {

bool TarsSet::contains(const Sequence& s) const { return find(s) != nullptr; }

const Tars* TarsSet::find(const Sequence& s) const {
    auto it = std::lower_bound(tars.begin(), tars.end(), s,
                               [](const Tars& t, const Sequence& q) { return t.seq < q; });
    return (it != tars.end() && it->seq == s) ? &*it : nullptr;
}

std::vector<BaseSequence> extract_base_sequences(const PurchaseHistory& history) {
    std::vector<BaseSequence> out;
    const auto items = history.distinct_items();
    std::unordered_map<ItemId, std::vector<Day>> postings;
    for (ItemId id : items) postings.emplace(id, history.times_containing({id}));

    for (ItemId x : items) {
        const auto& tx = postings[x];
        for (ItemId y : items) {
            const auto& ty = postings[y];
            if (tx.front() >= ty.back()) continue;  // no head strictly before a tail
            OccurrenceStats stats = minimal_occurrences(tx, ty);
            if (!stats.empty())
                out.emplace_back(Sequence::pair(x, y), std::move(stats));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const BaseSequence& a, const BaseSequence& b) { return a.first < b.first; });
    return out;
}

std::vector<BaseSequence> filter_recurring(const std::vector<BaseSequence>& base,
                                           const std::map<Sequence, ParameterTriple>& triples) {
    std::vector<BaseSequence> out;
    for (const auto& bs : base) {
        auto it = triples.find(bs.first);
        if (it == triples.end())
            throw DataError("no parameter triple for " + bs.first.to_string());
        const ParameterTriple& t = it->second;
        auto periods = detect_periods(bs.second, t.delta_max, t.q_min);
        if (static_cast<double>(periods.size()) >= t.p_min) out.push_back(bs);
    }
    return out;
}

namespace {

// growth order: descending support, ties by ascending item id
std::unordered_map<ItemId, std::size_t> growth_ranks(const PurchaseHistory& history) {
    const auto items = history.distinct_items();
    std::vector<std::pair<std::size_t, ItemId>> by_support;
    by_support.reserve(items.size());
    for (ItemId id : items) by_support.emplace_back(history.item_support(id), id);
    std::sort(by_support.begin(), by_support.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::unordered_map<ItemId, std::size_t> rank;
    for (std::size_t i = 0; i < by_support.size(); ++i) rank[by_support[i].second] = i;
    return rank;
}

ParameterTriple aggregate_triple(const Sequence& seq,
                                 const std::map<Sequence, ParameterTriple>& triples) {
    std::vector<double> d, q, p;
    for (ItemId x : seq.head)
        for (ItemId y : seq.tail) {
            auto it = triples.find(Sequence::pair(x, y));
            if (it == triples.end())
                throw DataError("candidate " + seq.to_string() +
                                " has a cross pair without a triple");
            d.push_back(it->second.delta_max);
            q.push_back(it->second.q_min);
            p.push_back(it->second.p_min);
        }
    return {median(std::move(d)), median(std::move(q)), median(std::move(p))};
}

struct GrowContext {
    const PurchaseHistory* history = nullptr;
    const std::map<Sequence, ParameterTriple>* triples = nullptr;
    std::unordered_map<ItemId, std::size_t> rank;
    std::unordered_map<ItemId, std::vector<ItemId>> tails_of;  // x -> ys with (x,y) recurring
    std::unordered_map<ItemId, std::vector<ItemId>> heads_of;  // y -> xs with (x,y) recurring
    std::size_t max_length = 4;
    double q_min_floor = 1.0;

    std::size_t max_rank(const std::vector<ItemId>& itemset) const {
        std::size_t r = 0;
        for (ItemId id : itemset) r = std::max(r, rank.at(id));
        return r;
    }
};

std::unique_ptr<TarsTreeNode> make_node(const GrowContext& ctx, Sequence seq) {
    OccurrenceStats stats = minimal_occurrences(*ctx.history, seq);
    if (stats.empty()) return nullptr;
    auto node = std::make_unique<TarsTreeNode>();
    node->triple = aggregate_triple(seq, *ctx.triples);
    node->periods = detect_periods(stats, node->triple.delta_max, node->triple.q_min);
    node->seq = std::move(seq);
    node->stats = std::move(stats);
    return node;
}

void grow(const GrowContext& ctx, TarsTreeNode& node) {
    if (node.seq.length() >= ctx.max_length) return;
    // no candidate below this node can reach the smallest period size bar
    if (static_cast<double>(node.stats.support()) < ctx.q_min_floor) return;

    // head extensions happen before any tail extension, so each candidate
    // sequence is reachable along exactly one path
    if (node.seq.tail.size() == 1) {
        const ItemId y = node.seq.tail.front();
        const std::size_t bar = ctx.max_rank(node.seq.head);
        auto it = ctx.heads_of.find(y);
        if (it != ctx.heads_of.end()) {
            for (ItemId x : it->second) {
                if (ctx.rank.at(x) <= bar) continue;
                Sequence child_seq = node.seq;
                child_seq.head.push_back(x);
                std::sort(child_seq.head.begin(), child_seq.head.end());
                if (auto child = make_node(ctx, std::move(child_seq))) {
                    grow(ctx, *child);
                    node.children.push_back(std::move(child));
                }
            }
        }
    }
    {
        const std::size_t bar = ctx.max_rank(node.seq.tail);
        // a tail candidate must pair with every head item
        std::vector<ItemId> candidates;
        bool first = true;
        for (ItemId x : node.seq.head) {
            auto it = ctx.tails_of.find(x);
            if (it == ctx.tails_of.end()) { candidates.clear(); break; }
            std::vector<ItemId> ys = it->second;
            std::sort(ys.begin(), ys.end());
            if (first) { candidates = std::move(ys); first = false; }
            else {
                std::vector<ItemId> keep;
                std::set_intersection(candidates.begin(), candidates.end(), ys.begin(), ys.end(),
                                      std::back_inserter(keep));
                candidates = std::move(keep);
            }
        }
        for (ItemId y : candidates) {
            if (ctx.rank.at(y) <= bar) continue;
            Sequence child_seq = node.seq;
            child_seq.tail.push_back(y);
            std::sort(child_seq.tail.begin(), child_seq.tail.end());
            if (auto child = make_node(ctx, std::move(child_seq))) {
                grow(ctx, *child);
                node.children.push_back(std::move(child));
            }
        }
    }
}

} // namespace

std::size_t TarsTree::node_count() const {
    std::size_t n = 0;
    for_each([&](const TarsTreeNode&) { ++n; });
    return n;
}

void TarsTree::for_each(const std::function<void(const TarsTreeNode&)>& fn) const {
    std::function<void(const TarsTreeNode&)> walk = [&](const TarsTreeNode& node) {
        fn(node);
        for (const auto& c : node.children) walk(*c);
    };
    for (const auto& r : roots) walk(*r);
}

TarsTree build_tars_tree(const PurchaseHistory& history,
                         const std::vector<BaseSequence>& base_recurring,
                         const std::map<Sequence, ParameterTriple>& triples,
                         const MiningOptions& options) {
    TarsTree tree;
    if (base_recurring.empty()) return tree;

    GrowContext ctx;
    ctx.history = &history;
    ctx.triples = &triples;
    ctx.rank = growth_ranks(history);
    ctx.max_length = std::max<std::size_t>(2, options.max_length);
    ctx.q_min_floor = std::numeric_limits<double>::infinity();
    for (const auto& bs : base_recurring) {
        const ItemId x = bs.first.head.front();
        const ItemId y = bs.first.tail.front();
        ctx.tails_of[x].push_back(y);
        ctx.heads_of[y].push_back(x);
        ctx.q_min_floor = std::min(ctx.q_min_floor, triples.at(bs.first).q_min);
    }

    for (const auto& bs : base_recurring) {
        auto node = std::make_unique<TarsTreeNode>();
        node->seq = bs.first;
        node->stats = bs.second;
        node->triple = triples.at(bs.first);
        node->periods = detect_periods(bs.second, node->triple.delta_max, node->triple.q_min);
        grow(ctx, *node);
        tree.roots.push_back(std::move(node));
    }
    return tree;
}

Tars annotate(const Sequence& seq, const OccurrenceStats& stats,
              const std::vector<Period>& periods) {
    if (periods.empty()) throw DataError("cannot annotate " + seq.to_string() + " without periods");
    Tars t;
    t.seq = seq;
    t.p = periods.size();
    t.q = median_period_support(periods);
    Day lo = std::numeric_limits<Day>::max();
    Day hi = std::numeric_limits<Day>::min();
    for (const Period& p : periods)
        for (std::size_t j = p.begin; j < p.begin + p.length; ++j) {
            lo = std::min(lo, stats.intra[j]);
            hi = std::max(hi, stats.intra[j]);
        }
    t.alpha1 = lo;
    t.alpha2 = hi;
    t.periods = periods;
    return t;
}

TarsSet extract_tars(const PurchaseHistory& history, MiningOptions options,
                     EstimationTrace* trace) {
    TarsSet out;
    out.customer = history.customer;
    if (history.size() < 2) return out;

    auto base = extract_base_sequences(history);
    if (base.empty()) return out;

    if (options.fixed) {
        for (const auto& bs : base) out.triples[bs.first] = *options.fixed;
        if (trace) trace->rows.clear();
    } else {
        out.triples = estimate_parameters(base, trace);
    }

    auto recurring = filter_recurring(base, out.triples);
    if (recurring.empty()) return out;

    TarsTree tree = build_tars_tree(history, recurring, out.triples, options);

    std::set<Sequence> seen;  // guards against duplicate emission
    tree.for_each([&](const TarsTreeNode& node) {
        if (node.periods.empty()) return;
        if (static_cast<double>(node.periods.size()) < node.triple.p_min) return;
        if (!seen.insert(node.seq).second) return;
        out.tars.push_back(annotate(node.seq, node.stats, node.periods));
    });
    std::sort(out.tars.begin(), out.tars.end());
    return out;
}

void write_tars_jsonl(const TarsSet& set, std::ostream& out) {
    for (const Tars& t : set.tars) {
        nlohmann::ordered_json j;
        j["head"] = t.seq.head;
        j["tail"] = t.seq.tail;
        j["a1"] = t.alpha1;
        j["a2"] = t.alpha2;
        j["p"] = t.p;
        j["q"] = t.q;
        out << j.dump() << '\n';
    }
}

TarsSet read_tars_jsonl(std::istream& in, const CustomerId& customer) {
    TarsSet set;
    set.customer = customer;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("tars line " + std::to_string(line_no) + ": " + e.what());
        }
        Tars t;
        t.seq = Sequence(j.at("head").get<std::vector<ItemId>>(),
                         j.at("tail").get<std::vector<ItemId>>());
        t.alpha1 = j.at("a1").get<Day>();
        t.alpha2 = j.at("a2").get<Day>();
        t.p = j.at("p").get<std::size_t>();
        t.q = j.at("q").get<double>();
        set.tars.push_back(std::move(t));
    }
    std::sort(set.tars.begin(), set.tars.end());
    set.tars.erase(std::unique(set.tars.begin(), set.tars.end(),
                               [](const Tars& a, const Tars& b) { return a.seq == b.seq; }),
                   set.tars.end());
    return set;
}

std::string render_tars(const Tars& t) {
    std::ostringstream os;
    auto itemset = [&](const std::vector<ItemId>& v) {
        os << '{';
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) os << ',';
            os << v[i];
        }
        os << '}';
    };
    itemset(t.seq.head);
    os << " --(" << t.alpha1 << ',' << t.alpha2 << ")-->[p=";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", static_cast<double>(t.p));
    os << buf << ",q=";
    std::snprintf(buf, sizeof buf, "%.2f", t.q);
    os << buf << "] ";
    itemset(t.seq.tail);
    return os.str();
}

} // namespace tars
