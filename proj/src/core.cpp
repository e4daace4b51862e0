#include "tars/core.hpp"

namespace tars {

void PurchaseHistory::validate() const {
    if (baskets.empty())
        throw DataError("history for customer '" + customer + "' is empty");
    Day prev = baskets.front().time;
    for (std::size_t i = 0; i < baskets.size(); ++i) {
        const Basket& b = baskets[i];
        if (b.items.empty())
            throw DataError("customer '" + customer + "' has an empty basket at day " +
                            std::to_string(b.time));
        if (!std::is_sorted(b.items.begin(), b.items.end()) ||
            std::adjacent_find(b.items.begin(), b.items.end()) != b.items.end())
            throw DataError("customer '" + customer + "' has an unnormalized basket at day " +
                            std::to_string(b.time));
        if (i > 0 && b.time <= prev)
            throw DataError("customer '" + customer + "' has non-increasing basket times");
        prev = b.time;
    }
}

std::vector<ItemId> PurchaseHistory::distinct_items() const {
    std::vector<ItemId> out;
    for (const auto& b : baskets) out.insert(out.end(), b.items.begin(), b.items.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Day> PurchaseHistory::times_containing(const std::vector<ItemId>& itemset) const {
    std::vector<Day> out;
    for (const auto& b : baskets)
        if (b.contains_all(itemset)) out.push_back(b.time);
    return out;
}

void Dataset::validate() const {
    for (const auto& [id, h] : histories) {
        if (id != h.customer)
            throw DataError("history keyed under '" + id + "' carries customer '" + h.customer + "'");
        h.validate();
        for (const auto& b : h.baskets)
            for (ItemId item : b.items)
                if (!items.count(item))
                    throw DataError("item " + std::to_string(item) + " missing from dictionary");
    }
}

Dataset filter_min_baskets(const Dataset& ds, std::size_t min_count) {
    if (min_count < 1) throw DataError("min_count must be >= 1");
    Dataset out;
    for (const auto& [id, h] : ds.histories)
        if (h.size() >= min_count) out.histories.emplace(id, h);
    for (const auto& [id, h] : out.histories)
        for (const auto& b : h.baskets) out.register_items(b);
    // keep labels for retained items
    for (auto& [item, label] : out.items) {
        auto it = ds.items.find(item);
        if (it != ds.items.end()) label = it->second;
    }
    return out;
}

} // namespace tars
