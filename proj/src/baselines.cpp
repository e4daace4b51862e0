#include "tars/baselines.hpp"

#include <algorithm>

namespace tars {

namespace {

// frequency ranking shared by top and lst truncation: support desc, id asc
std::vector<ItemId> frequency_order(const PurchaseHistory& history) {
    std::vector<std::pair<std::size_t, ItemId>> freq;
    for (ItemId id : history.distinct_items()) freq.emplace_back(history.item_support(id), id);
    std::sort(freq.begin(), freq.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<ItemId> out;
    out.reserve(freq.size());
    for (const auto& [sup, id] : freq) out.push_back(id);
    return out;
}

} // namespace

std::vector<ItemId> predict_top(const PurchaseHistory& history, std::size_t k) {
    if (k < 1) throw DataError("k must be >= 1");
    auto order = frequency_order(history);
    if (order.size() > k) order.resize(k);
    return order;
}

std::vector<ItemId> predict_lst(const PurchaseHistory& history, std::size_t k) {
    if (history.empty()) throw DataError("predict_lst on an empty history");
    const auto& last = history.back().items;
    if (last.size() <= k) return last;
    std::vector<ItemId> out;
    for (ItemId id : frequency_order(history)) {
        if (out.size() == k) break;
        if (std::binary_search(last.begin(), last.end(), id)) out.push_back(id);
    }
    return out;
}

double TransitionModel::probability(ItemId from, ItemId to) const {
    auto row = counts.find(from);
    if (row == counts.end()) return 0.0;
    auto cell = row->second.find(to);
    if (cell == row->second.end()) return 0.0;
    return cell->second / row_totals.at(from);
}

TransitionModel build_transition_model(const PurchaseHistory& history) {
    TransitionModel m;
    for (std::size_t i = 0; i + 1 < history.size(); ++i)
        for (ItemId from : history.baskets[i].items)
            for (ItemId to : history.baskets[i + 1].items) {
                m.counts[from][to] += 1.0;
                m.row_totals[from] += 1.0;
            }
    return m;
}

std::map<ItemId, double> mc_scores(const PurchaseHistory& history) {
    if (history.size() < 2)
        throw DataError("markov-chain prediction needs at least 2 baskets");
    TransitionModel m = build_transition_model(history);
    const auto& last = history.back().items;
    std::map<ItemId, double> scores;
    for (ItemId id : history.distinct_items()) scores[id] = 0.0;
    for (ItemId from : last) {
        auto row = m.counts.find(from);
        if (row == m.counts.end()) continue;
        const double total = m.row_totals.at(from);
        for (const auto& [to, count] : row->second) scores[to] += count / total;
    }
    const double norm = static_cast<double>(last.size());
    for (auto& [id, s] : scores) s /= norm;
    return scores;
}

std::vector<ItemId> predict_mc(const PurchaseHistory& history, std::size_t k) {
    if (k < 1) throw DataError("k must be >= 1");
    auto scores = mc_scores(history);
    struct Entry {
        ItemId id;
        double score;
        std::size_t support;
    };
    std::vector<Entry> entries;
    for (const auto& [id, s] : scores) entries.push_back({id, s, history.item_support(id)});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.support != b.support) return a.support > b.support;
        return a.id < b.id;
    });
    std::vector<ItemId> out;
    for (const Entry& e : entries) {
        if (out.size() == k) break;
        out.push_back(e.id);
    }
    return out;
}

} // namespace tars
