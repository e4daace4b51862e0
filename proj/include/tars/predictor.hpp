#ifndef TARS_PREDICTOR_HPP
#define TARS_PREDICTOR_HPP

#include <map>

#include "tars/mining.hpp"

namespace tars {

// Result of the backward scan: the active patterns and how often each was
// seen in the recent window.
struct ActiveTars {
    std::vector<const Tars*> active;          // pointers into the scanned TarsSet
    std::map<Sequence, std::size_t> counts;   // sequence -> Q
};

// Scans consecutive basket pairs newest-first. A pattern matches a pair when
// its head fits the earlier basket, its tail the later one, and the gap lies
// inside [alpha1, alpha2]. The first match activates it; repeat matches
// increment its count unless the gap back to its previous sighting exceeds
// q * alpha2, which retires it from the scan. A pattern whose count would
// exceed q has filled its typical quota and is dropped from the active set.
ActiveTars get_active_tars(const PurchaseHistory& history, const TarsSet& tars);

using ScoreTable = std::map<ItemId, double>;

// Every item in an active tail scores the pattern's remaining quota (q - Q),
// summed over the active patterns naming it, plus the item's basket count in
// the history.
ScoreTable calculate_item_scores(const PurchaseHistory& history, const ActiveTars& active);

// Top-k items by score, ties broken by higher basket count then lower id.
// When fewer than k items score positive, the customer's most frequent
// remaining items fill the list.
std::vector<ItemId> predict_basket(const PurchaseHistory& history, const TarsSet& tars,
                                   std::size_t k);
std::vector<ItemId> rank_items(const PurchaseHistory& history, const ScoreTable& scores,
                               std::size_t k);

// the customer's mean basket size, rounded half-up, at least 1
std::size_t personalized_k(const PurchaseHistory& history);

} // namespace tars

#endif
