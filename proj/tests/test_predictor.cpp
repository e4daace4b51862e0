#include <doctest.h>

#include <algorithm>

#include "tars/predictor.hpp"
#include "testutil.hpp"

using namespace tars;

namespace {

PurchaseHistory history_of(std::vector<std::pair<Day, std::vector<ItemId>>> baskets) {
    PurchaseHistory h;
    h.customer = "p";
    for (auto& [t, items] : baskets) {
        Basket b;
        b.time = t;
        b.items = std::move(items);
        b.normalize();
        h.baskets.push_back(std::move(b));
    }
    return h;
}

Tars make_tars(Sequence seq, Day a1, Day a2, std::size_t p, double q) {
    Tars t;
    t.seq = std::move(seq);
    t.alpha1 = a1;
    t.alpha2 = a2;
    t.p = p;
    t.q = q;
    return t;
}

} // namespace

TEST_CASE("a single matching pair activates a pattern with count one") {
    auto h = history_of({{0, {9}}, {10, {1}}, {14, {2}}});
    TarsSet set;
    set.customer = "p";
    set.tars.push_back(make_tars(Sequence::pair(1, 2), 2, 6, 1, 2.0));

    ActiveTars active = get_active_tars(h, set);
    REQUIRE(active.active.size() == 1);
    CHECK(active.counts.at(Sequence::pair(1, 2)) == 1);
}

TEST_CASE("a gap outside the annotation window never activates") {
    auto h = history_of({{0, {9}}, {10, {1}}, {18, {2}}});
    TarsSet set;
    set.customer = "p";
    set.tars.push_back(make_tars(Sequence::pair(1, 2), 2, 6, 1, 2.0));
    CHECK(get_active_tars(h, set).active.empty());
}

TEST_CASE("a pattern over its typical quota is dropped from the active set") {
    // four matching pairs, newest first, against q = 3
    auto h = history_of({{0, {1}}, {3, {1}}, {6, {1}}, {9, {1}}, {12, {1}}});
    TarsSet set;
    set.customer = "p";
    set.tars.push_back(make_tars(Sequence::pair(1, 1), 3, 3, 1, 3.0));
    CHECK(get_active_tars(h, set).active.empty());

    // with q = 4 the same scan keeps it active at the full count
    set.tars[0].q = 4.0;
    ActiveTars active = get_active_tars(h, set);
    REQUIRE(active.active.size() == 1);
    CHECK(active.counts.at(Sequence::pair(1, 1)) == 4);
}

TEST_CASE("a stale earlier sighting stops the scan but keeps the pattern") {
    // recent pair at (90, 93), older pair at (10, 13); the 80-day reach back
    // exceeds q * alpha2 = 6
    auto h = history_of({{10, {1}}, {13, {2}}, {90, {1}}, {93, {2}}});
    TarsSet set;
    set.customer = "p";
    set.tars.push_back(make_tars(Sequence::pair(1, 2), 3, 3, 1, 2.0));
    ActiveTars active = get_active_tars(h, set);
    REQUIRE(active.active.size() == 1);
    CHECK(active.counts.at(Sequence::pair(1, 2)) == 1);
}

TEST_CASE("scores add remaining quota and support over active tails") {
    auto h = history_of({{0, {2}}, {3, {2}}, {6, {2}}, {9, {2}}, {12, {2}}, {15, {2}},
                         {18, {2}}, {30, {1}}, {34, {2}}});
    TarsSet set;
    set.customer = "p";
    set.tars.push_back(make_tars(Sequence::pair(1, 2), 2, 6, 1, 4.0));
    ActiveTars active = get_active_tars(h, set);
    REQUIRE(active.active.size() == 1);
    REQUIRE(active.counts.at(Sequence::pair(1, 2)) == 1);

    // q - Q = 3 plus support(2) = 8 baskets
    ScoreTable scores = calculate_item_scores(h, active);
    CHECK(scores.at(2) == doctest::Approx(3.0 + 8.0));
    CHECK(scores.count(1) == 0);

    // no active patterns: every score is zero
    ScoreTable none = calculate_item_scores(h, ActiveTars{});
    CHECK(none.empty());
}

TEST_CASE("overlapping active tails accumulate before the support boost") {
    auto h = history_of({{0, {5}}, {2, {5}}, {4, {5}}, {6, {5}}, {8, {5}},
                         {20, {1, 3}}, {24, {5}}});
    TarsSet set;
    set.customer = "p";
    set.tars.push_back(make_tars(Sequence::pair(1, 5), 3, 5, 1, 3.0));  // q - Q = 2
    set.tars.push_back(make_tars(Sequence::pair(3, 5), 3, 5, 1, 2.0));  // q - Q = 1
    ActiveTars active = get_active_tars(h, set);
    REQUIRE(active.active.size() == 2);
    ScoreTable scores = calculate_item_scores(h, active);
    CHECK(scores.at(5) == doctest::Approx(2.0 + 1.0 + 6.0));  // support(5) = 6
}

TEST_CASE("ranking prefers score, then support, then the lower id") {
    auto h = history_of({{0, {3}}, {1, {3}}, {2, {3}}, {3, {3, 2}}, {4, {3, 2}},
                         {5, {3, 2}}, {6, {3, 2, 1}}, {7, {3, 2, 1}}, {8, {3, 1, 4}}});
    // fabricated score table: a=10, b and c tie at 7, d=1
    ScoreTable scores{{1, 10.0}, {2, 7.0}, {3, 7.0}, {4, 1.0}};
    auto ranked = rank_items(h, scores, 3);
    // support(3)=9 beats support(2)=5, so 3 precedes 2
    CHECK(ranked == std::vector<ItemId>{1, 3, 2});
}

TEST_CASE("prediction falls back to frequency when scores run out") {
    auto h = history_of({{0, {4, 9}}, {2, {4}}, {4, {4, 7}}});
    TarsSet empty_model;
    empty_model.customer = "p";
    auto items = predict_basket(h, empty_model, 2);
    CHECK(items == std::vector<ItemId>{4, 7});  // 7 and 9 tie on support, lower id wins

    auto all = predict_basket(h, empty_model, 10);
    CHECK(all == std::vector<ItemId>{4, 7, 9});  // never longer than the universe
}

TEST_CASE("personalized prediction size rounds the mean basket length half-up") {
    auto h3 = history_of({{0, {1, 2, 3}}, {1, {1, 2, 3, 4}}, {2, {1, 2, 3, 4, 5, 6}}});
    CHECK(personalized_k(h3) == 4);  // mean 4.33

    auto h5 = history_of({{0, {1, 2, 3, 4, 5}}, {1, {1, 2, 3, 4, 5}}});
    CHECK(personalized_k(h5) == 5);

    auto h15 = history_of({{0, {1}}, {1, {1, 2}}});
    CHECK(personalized_k(h15) == 2);  // mean 1.5 rounds up
}

TEST_CASE("active counts stay within one and the quota") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 50; ++trial) {
        auto h = oracle::random_history(rng, 15, 6);
        TarsSet set = extract_tars(h);
        ActiveTars active = get_active_tars(h, set);
        for (const Tars* t : active.active) {
            const auto q = active.counts.at(t->seq);
            REQUIRE(q >= 1);
            REQUIRE(static_cast<double>(q) <= t->q);
        }
        for (const auto& [id, score] : calculate_item_scores(h, active))
            REQUIRE(score >= 0.0);
    }
}

TEST_CASE("prediction does not depend on the pattern storage order") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 30; ++trial) {
        auto h = oracle::random_history(rng, 15, 6);
        TarsSet set = extract_tars(h);
        if (set.tars.size() < 2) continue;
        const auto k = personalized_k(h);
        auto baseline = predict_basket(h, set, k);

        TarsSet shuffled = set;
        std::shuffle(shuffled.tars.begin(), shuffled.tars.end(), rng);
        CHECK(predict_basket(h, shuffled, k) == baseline);
    }
}

TEST_CASE("every active pattern has a matching pair in the scanned suffix") {
    std::mt19937_64 rng(2025);
    for (int trial = 0; trial < 50; ++trial) {
        auto h = oracle::random_history(rng, 15, 6);
        TarsSet set = extract_tars(h);
        ActiveTars active = get_active_tars(h, set);
        for (const Tars* t : active.active) {
            bool witnessed = false;
            for (std::size_t j = 1; j < h.size() && !witnessed; ++j) {
                const Day gap = h.baskets[j].time - h.baskets[j - 1].time;
                witnessed = gap >= t->alpha1 && gap <= t->alpha2 &&
                            h.baskets[j - 1].contains_all(t->seq.head) &&
                            h.baskets[j].contains_all(t->seq.tail);
            }
            REQUIRE(witnessed);
        }
    }
}
