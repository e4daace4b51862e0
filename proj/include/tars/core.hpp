#ifndef TARS_CORE_HPP
#define TARS_CORE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace tars {

using ItemId = std::uint32_t;
using Day = std::int32_t;
using CustomerId = std::string;

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A basket is the set of items a customer bought on one day.
// Items are kept sorted and unique so subset tests are linear merges.
struct Basket {
    Day time = 0;
    std::vector<ItemId> items;

    void normalize() {
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
    }
    bool contains(ItemId id) const {
        return std::binary_search(items.begin(), items.end(), id);
    }
    // true iff `sub` (sorted) is a subset of this basket's items
    bool contains_all(const std::vector<ItemId>& sub) const {
        return std::includes(items.begin(), items.end(), sub.begin(), sub.end());
    }
    bool operator==(const Basket& o) const { return time == o.time && items == o.items; }
};

// One customer's baskets, strictly increasing in time (one basket per day).
struct PurchaseHistory {
    CustomerId customer;
    std::vector<Basket> baskets;

    std::size_t size() const { return baskets.size(); }
    bool empty() const { return baskets.empty(); }
    const Basket& front() const { return baskets.front(); }
    const Basket& back() const { return baskets.back(); }

    void validate() const;

    // number of baskets containing the item
    std::size_t item_support(ItemId id) const {
        std::size_t n = 0;
        for (const auto& b : baskets)
            if (b.contains(id)) ++n;
        return n;
    }
    // distinct items, sorted
    std::vector<ItemId> distinct_items() const;
    // times of baskets containing every item of `itemset` (sorted input)
    std::vector<Day> times_containing(const std::vector<ItemId>& itemset) const;

    bool operator==(const PurchaseHistory& o) const {
        return customer == o.customer && baskets == o.baskets;
    }
};

struct Dataset {
    std::map<CustomerId, PurchaseHistory> histories;
    // item id -> optional label; every item appearing in a basket has an entry
    std::map<ItemId, std::string> items;

    std::size_t customer_count() const { return histories.size(); }
    void register_items(const Basket& b) {
        for (ItemId id : b.items) items.emplace(id, std::string{});
    }
    void validate() const;

    bool operator==(const Dataset& o) const {
        return histories == o.histories && items == o.items;
    }
};

// Keeps only customers with at least min_count baskets.
Dataset filter_min_baskets(const Dataset& ds, std::size_t min_count);

} // namespace tars

#endif
