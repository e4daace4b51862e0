#include "tars/split.hpp"

#include <cmath>

namespace tars {

LeaveOneOut split_leave_one_out(const PurchaseHistory& history) {
    if (history.size() < 2)
        throw DataError("customer '" + history.customer +
                        "': need at least 2 baskets for leave-one-out");
    LeaveOneOut out;
    out.train.customer = history.customer;
    out.train.baskets.assign(history.baskets.begin(), history.baskets.end() - 1);
    out.test = history.baskets.back();
    return out;
}

FractionSplit split_fraction(const PurchaseHistory& history, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw DataError("fraction must lie in (0,1)");
    const auto n = history.size();
    const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
    if (k < 1)
        throw DataError("customer '" + history.customer + "': fraction*length < 1");
    FractionSplit out;
    out.train.customer = history.customer;
    out.train.baskets.assign(history.baskets.begin(), history.baskets.begin() + k);
    out.holdout.assign(history.baskets.begin() + k, history.baskets.end());
    return out;
}

FractionSplit split_fraction(const PurchaseHistory& history, double lo, double hi,
                             std::mt19937_64& rng) {
    if (!(lo > 0.0 && hi < 1.0 && lo <= hi))
        throw DataError("fraction range must satisfy 0 < lo <= hi < 1");
    std::uniform_real_distribution<double> dist(lo, hi);
    return split_fraction(history, dist(rng));
}

} // namespace tars
