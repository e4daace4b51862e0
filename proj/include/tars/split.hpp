#ifndef TARS_SPLIT_HPP
#define TARS_SPLIT_HPP

#include <random>
#include <utility>

#include "tars/core.hpp"

namespace tars {

struct LeaveOneOut {
    PurchaseHistory train;
    Basket test;
};

// train = all but the last basket; test = the last basket
LeaveOneOut split_leave_one_out(const PurchaseHistory& history);

struct FractionSplit {
    PurchaseHistory train;          // chronological prefix, floor(fraction * n) baskets
    std::vector<Basket> holdout;    // the remainder, in order
};

FractionSplit split_fraction(const PurchaseHistory& history, double fraction);

// fraction drawn uniformly from [lo, hi] with the supplied generator
FractionSplit split_fraction(const PurchaseHistory& history, double lo, double hi,
                             std::mt19937_64& rng);

} // namespace tars

#endif
