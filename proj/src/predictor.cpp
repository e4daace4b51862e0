#include "tars/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace tars {

namespace {

struct ScanState {
    std::size_t count = 0;  // Q
    Day last_head = 0;      // L: earliest head time seen so far (backward scan)
    bool active = true;     // still in the active set
    bool watched = true;    // still probed by the scan
};

} // namespace

ActiveTars get_active_tars(const PurchaseHistory& history, const TarsSet& tars) {
    ActiveTars out;
    if (history.size() < 2 || tars.tars.empty()) return out;

    // candidates are probed through a head-item index; a pattern is checked
    // against a pair only after every head item was seen in the earlier basket
    std::unordered_map<ItemId, std::vector<std::size_t>> by_head_item;
    for (std::size_t i = 0; i < tars.tars.size(); ++i)
        for (ItemId id : tars.tars[i].seq.head) by_head_item[id].push_back(i);

    std::vector<ScanState> state(tars.tars.size());
    for (auto& s : state) { s.active = false; s.watched = true; }
    std::size_t watched_left = tars.tars.size();

    std::vector<std::size_t> seen_count(tars.tars.size(), 0);
    std::vector<std::size_t> stamp(tars.tars.size(), 0);
    std::size_t pair_stamp = 0;

    for (std::size_t j = history.size(); j-- > 1 && watched_left > 0;) {
        const Basket& earlier = history.baskets[j - 1];
        const Basket& later = history.baskets[j];
        const Day gap = later.time - earlier.time;
        ++pair_stamp;

        std::vector<std::size_t> matched;
        for (ItemId id : earlier.items) {
            auto it = by_head_item.find(id);
            if (it == by_head_item.end()) continue;
            for (std::size_t idx : it->second) {
                if (!state[idx].watched) continue;
                if (stamp[idx] != pair_stamp) { stamp[idx] = pair_stamp; seen_count[idx] = 0; }
                if (++seen_count[idx] == tars.tars[idx].seq.head.size())
                    matched.push_back(idx);
            }
        }
        for (std::size_t idx : matched) {
            const Tars& t = tars.tars[idx];
            if (gap < t.alpha1 || gap > t.alpha2) continue;
            if (!later.contains_all(t.seq.tail)) continue;
            ScanState& s = state[idx];
            if (!s.active && s.count == 0) {
                s.active = true;
                s.count = 1;
                s.last_head = earlier.time;
            } else if (s.active) {
                // staleness is judged against the previous sighting before
                // the bookkeeping moves on
                if (static_cast<double>(s.last_head - earlier.time) >
                    t.q * static_cast<double>(t.alpha2)) {
                    s.watched = false;
                    --watched_left;
                    continue;
                }
                s.count += 1;
                s.last_head = earlier.time;
                if (static_cast<double>(s.count) > t.q) {
                    s.active = false;
                    if (s.watched) { s.watched = false; --watched_left; }
                }
            }
        }
    }

    for (std::size_t i = 0; i < tars.tars.size(); ++i)
        if (state[i].active) {
            out.active.push_back(&tars.tars[i]);
            out.counts[tars.tars[i].seq] = state[i].count;
        }
    return out;
}

ScoreTable calculate_item_scores(const PurchaseHistory& history, const ActiveTars& active) {
    ScoreTable scores;
    std::unordered_set<ItemId> in_tail;
    for (const Tars* t : active.active) {
        const double remaining =
            t->q - static_cast<double>(active.counts.at(t->seq));
        for (ItemId id : t->seq.tail) {
            scores[id] += remaining;
            in_tail.insert(id);
        }
    }
    for (ItemId id : in_tail)
        scores[id] += static_cast<double>(history.item_support(id));
    return scores;
}

std::vector<ItemId> rank_items(const PurchaseHistory& history, const ScoreTable& scores,
                               std::size_t k) {
    if (k < 1) throw DataError("k must be >= 1");
    struct Entry {
        ItemId id;
        double score;
        std::size_t support;
    };
    std::vector<Entry> positive;
    for (const auto& [id, score] : scores)
        if (score > 0.0) positive.push_back({id, score, history.item_support(id)});
    std::sort(positive.begin(), positive.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.support != b.support) return a.support > b.support;
        return a.id < b.id;
    });

    std::vector<ItemId> out;
    std::unordered_set<ItemId> chosen;
    for (const Entry& e : positive) {
        if (out.size() == k) break;
        out.push_back(e.id);
        chosen.insert(e.id);
    }
    if (out.size() < k) {
        // fill up with the customer's most frequent remaining items
        std::vector<Entry> rest;
        for (ItemId id : history.distinct_items())
            if (!chosen.count(id)) rest.push_back({id, 0.0, history.item_support(id)});
        std::sort(rest.begin(), rest.end(), [](const Entry& a, const Entry& b) {
            if (a.support != b.support) return a.support > b.support;
            return a.id < b.id;
        });
        for (const Entry& e : rest) {
            if (out.size() == k) break;
            out.push_back(e.id);
        }
    }
    return out;
}

std::vector<ItemId> predict_basket(const PurchaseHistory& history, const TarsSet& tars,
                                   std::size_t k) {
    ActiveTars active = get_active_tars(history, tars);
    ScoreTable scores = calculate_item_scores(history, active);
    return rank_items(history, scores, k);
}

std::size_t personalized_k(const PurchaseHistory& history) {
    if (history.empty()) throw DataError("personalized_k of an empty history");
    double total = 0;
    for (const auto& b : history.baskets) total += static_cast<double>(b.items.size());
    const double mean = total / static_cast<double>(history.size());
    const auto k = static_cast<std::size_t>(std::floor(mean + 0.5));
    return std::max<std::size_t>(1, k);
}

} // namespace tars
