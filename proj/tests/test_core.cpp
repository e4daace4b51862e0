#include <doctest.h>

#include <sstream>

#include "tars/io.hpp"
#include "tars/split.hpp"
#include "testutil.hpp"

using namespace tars;
using namespace oracle;

TEST_CASE("csv ingestion groups rows into day baskets") {
    std::istringstream in(example_csv());
    Dataset ds = parse_transactions(in, TransactionFormat::Csv);
    REQUIRE(ds.customer_count() == 1);
    const PurchaseHistory& h = ds.histories.at("X");
    REQUIRE(h.size() == 12);
    CHECK(h.baskets[0].time == 0);
    CHECK(h.baskets[0].items == std::vector<ItemId>{A, B, G, H});
    CHECK(h.baskets[1].time == 4);
    CHECK(h.baskets[1].items == std::vector<ItemId>{A, C, D});
    CHECK(h == example_history());
    CHECK(ds.items.size() == 9);
}

TEST_CASE("duplicate rows collapse into one item") {
    std::istringstream in("u,3,42\nu,3,42\n");
    Dataset ds = parse_transactions(in, TransactionFormat::Csv);
    const auto& h = ds.histories.at("u");
    REQUIRE(h.size() == 1);
    CHECK(h.baskets[0].items == std::vector<ItemId>{42});
}

TEST_CASE("customers partition into separate histories") {
    std::ostringstream os;
    os << example_csv();
    os << "Y,2015-03-01,5\n";
    std::istringstream in(os.str());
    Dataset ds = parse_transactions(in, TransactionFormat::Csv);
    REQUIRE(ds.customer_count() == 2);
    CHECK(ds.histories.at("X").size() == 12);
    CHECK(ds.histories.at("Y").size() == 1);
}

TEST_CASE("ingestion errors carry line numbers") {
    std::istringstream bad("u,3,42\nu,not-a-day,42\n");
    CHECK_THROWS_WITH_AS(parse_transactions(bad, TransactionFormat::Csv),
                         doctest::Contains("line 2"), ParseError);

    std::istringstream empty("");
    CHECK_THROWS_AS(parse_transactions(empty, TransactionFormat::Csv), DataError);

    std::istringstream short_row("u,3\n");
    CHECK_THROWS_AS(parse_transactions(short_row, TransactionFormat::Csv), ParseError);
}

TEST_CASE("json lines ingestion merges baskets on the same day") {
    std::istringstream in(
        R"({"customer": "u", "day": 1, "items": [3, 1]})"
        "\n"
        R"({"customer": "u", "day": 1, "items": [2]})"
        "\n"
        R"({"customer": 7, "day": "2015-01-05", "items": [9]})"
        "\n");
    Dataset ds = parse_transactions(in, TransactionFormat::JsonLines);
    REQUIRE(ds.customer_count() == 2);
    CHECK(ds.histories.at("u").baskets[0].items == std::vector<ItemId>{1, 2, 3});
    CHECK(ds.histories.count("7") == 1);
}

TEST_CASE("ingestion round-trips through both serializations") {
    std::ostringstream os;
    os << example_csv() << "Y,2015-01-02,5\nY,2015-01-09,6\n";
    std::istringstream in(os.str());
    Dataset ds = parse_transactions(in, TransactionFormat::Csv);

    for (auto format : {TransactionFormat::Csv, TransactionFormat::JsonLines}) {
        std::ostringstream out;
        serialize_transactions(ds, out, format);
        std::istringstream back(out.str());
        Dataset again = parse_transactions(back, format);
        CHECK(again == ds);
    }
}

TEST_CASE("every ingested history is strictly increasing with non-empty baskets") {
    std::istringstream in(example_csv());
    Dataset ds = parse_transactions(in, TransactionFormat::Csv);
    ds.validate();  // throws on violation
    for (const auto& [id, h] : ds.histories)
        for (std::size_t i = 1; i < h.size(); ++i)
            CHECK(h.baskets[i - 1].time < h.baskets[i].time);
}

TEST_CASE("filter_min_baskets keeps only long histories") {
    std::ostringstream os;
    os << example_csv() << "Y,2015-03-01,5\n";
    std::istringstream in(os.str());
    Dataset ds = parse_transactions(in, TransactionFormat::Csv);

    Dataset kept = filter_min_baskets(ds, 10);
    CHECK(kept.customer_count() == 1);
    CHECK(kept.histories.count("X") == 1);

    CHECK(filter_min_baskets(ds, 1) == ds);
    CHECK(filter_min_baskets(ds, 13).customer_count() == 0);
}

TEST_CASE("leave-one-out holds back the final basket") {
    auto h = example_history();
    auto split = split_leave_one_out(h);
    CHECK(split.train.size() == 11);
    CHECK(split.test.time == 52);
    CHECK(split.test.items == std::vector<ItemId>{A, B, G, H, I});

    // train ++ test reconstructs the original
    PurchaseHistory glued = split.train;
    glued.baskets.push_back(split.test);
    CHECK(glued == h);

    PurchaseHistory two;
    two.customer = "t";
    two.baskets = {h.baskets[0], h.baskets[1]};
    auto s2 = split_leave_one_out(two);
    CHECK(s2.train.size() == 1);
    CHECK(s2.test == h.baskets[1]);

    PurchaseHistory one;
    one.customer = "o";
    one.baskets = {h.baskets[0]};
    CHECK_THROWS_AS(split_leave_one_out(one), DataError);
}

TEST_CASE("fraction splits take a chronological prefix") {
    PurchaseHistory h;
    h.customer = "f";
    for (Day t = 0; t < 10; ++t) {
        Basket b;
        b.time = t * 3;
        b.items = {static_cast<ItemId>(t + 1)};
        h.baskets.push_back(b);
    }
    auto s = split_fraction(h, 0.7);
    CHECK(s.train.size() == 7);
    CHECK(s.holdout.size() == 3);
    CHECK(s.holdout.front().time == 21);

    PurchaseHistory h12 = h;
    Basket extra;
    extra.time = 100;
    extra.items = {99};
    h12.baskets.push_back(extra);
    extra.time = 101;
    h12.baskets.push_back(extra);
    auto s2 = split_fraction(h12, 0.5);
    CHECK(s2.train.size() == 6);
    CHECK(s2.holdout.size() == 6);
    for (std::size_t i = 0; i + 1 < s2.holdout.size(); ++i)
        CHECK(s2.holdout[i].time < s2.holdout[i + 1].time);

    CHECK_THROWS_AS(split_fraction(h, 0.0), DataError);
    CHECK_THROWS_AS(split_fraction(h, 1.0), DataError);
}

TEST_CASE("randomized fraction splits repeat under one seed") {
    auto h = example_history();
    std::mt19937_64 rng1(42), rng2(42);
    auto a = split_fraction(h, 0.7, 0.9, rng1);
    auto b = split_fraction(h, 0.7, 0.9, rng2);
    CHECK(a.train == b.train);
    CHECK(a.holdout.size() == b.holdout.size());
    CHECK(a.train.size() >= 8);  // at least 70% of 12
}
