#ifndef TARS_BASELINES_HPP
#define TARS_BASELINES_HPP

#include <map>

#include "tars/core.hpp"

namespace tars {

// top-k items by basket count, ties by lower item id
std::vector<ItemId> predict_top(const PurchaseHistory& history, std::size_t k);

// the last basket, truncated to the k most frequent items when larger than
// k; never padded
std::vector<ItemId> predict_lst(const PurchaseHistory& history, std::size_t k);

// Item-to-item transition counts over consecutive baskets.
struct TransitionModel {
    std::map<ItemId, std::map<ItemId, double>> counts;  // i -> j -> count
    std::map<ItemId, double> row_totals;

    double probability(ItemId from, ItemId to) const;
};

TransitionModel build_transition_model(const PurchaseHistory& history);

// Markov-chain prediction: items scored by their mean transition probability
// out of the last basket; ties by frequency, then lower id.
std::vector<ItemId> predict_mc(const PurchaseHistory& history, std::size_t k);
std::map<ItemId, double> mc_scores(const PurchaseHistory& history);

} // namespace tars

#endif
