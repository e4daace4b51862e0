#include "tars/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tars {

namespace {

struct RawRow {
    std::string customer;
    std::int64_t day = 0;   // raw: either day index or days-since-epoch
    bool is_date = false;
    std::vector<ItemId> items;
};

std::optional<std::int64_t> parse_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

// splits a csv line; no quoting needed for this format
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') { out.push_back(cur); cur.clear(); }
        else cur.push_back(c);
    }
    out.push_back(cur);
    for (auto& f : out) {
        while (!f.empty() && (f.back() == '\r' || f.back() == ' ' || f.back() == '\t')) f.pop_back();
        std::size_t i = 0;
        while (i < f.size() && (f[i] == ' ' || f[i] == '\t')) ++i;
        f.erase(0, i);
    }
    return out;
}

std::optional<std::pair<std::int64_t, bool>> parse_day_field(const std::string& s) {
    if (auto v = parse_int(s)) return std::make_pair(*v, false);
    if (auto d = parse_iso_date(s)) return std::make_pair(*d, true);
    return std::nullopt;
}

Dataset assemble(std::vector<RawRow>&& rows) {
    if (rows.empty()) throw DataError("input contains no transactions");

    bool any_date = false;
    for (const auto& r : rows) any_date |= r.is_date;
    std::int64_t base = 0;
    if (any_date) {
        base = std::numeric_limits<std::int64_t>::max();
        for (const auto& r : rows)
            if (r.is_date) base = std::min(base, r.day);
    }

    Dataset ds;
    std::map<CustomerId, std::map<Day, Basket>> grouped;
    for (auto& r : rows) {
        std::int64_t day = r.is_date ? r.day - base : r.day;
        Basket& b = grouped[r.customer][static_cast<Day>(day)];
        b.time = static_cast<Day>(day);
        b.items.insert(b.items.end(), r.items.begin(), r.items.end());
    }
    for (auto& [cust, by_day] : grouped) {
        PurchaseHistory h;
        h.customer = cust;
        for (auto& [day, basket] : by_day) {
            basket.normalize();
            ds.register_items(basket);
            h.baskets.push_back(std::move(basket));
        }
        ds.histories.emplace(cust, std::move(h));
    }
    ds.validate();
    return ds;
}

Dataset parse_csv(std::istream& in) {
    std::vector<RawRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv(line);
        if (fields.size() != 3)
            throw ParseError(line_no, "expected 3 fields customer_id,day,item_id");
        auto day = parse_day_field(fields[1]);
        auto item = parse_int(fields[2]);
        if (!day || !item || *item < 0) {
            // a header is only acceptable as the very first line
            if (line_no == 1) continue;
            throw ParseError(line_no, "unparseable day or item_id");
        }
        if (fields[0].empty()) throw ParseError(line_no, "empty customer_id");
        RawRow r;
        r.customer = fields[0];
        r.day = day->first;
        r.is_date = day->second;
        r.items.push_back(static_cast<ItemId>(*item));
        rows.push_back(std::move(r));
    }
    return assemble(std::move(rows));
}

Dataset parse_jsonl(std::istream& in) {
    std::vector<RawRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, std::string("invalid json: ") + e.what());
        }
        if (!j.is_object() || !j.contains("customer") || !j.contains("day") || !j.contains("items"))
            throw ParseError(line_no, "object must carry customer, day, items");
        RawRow r;
        if (j["customer"].is_string()) r.customer = j["customer"].get<std::string>();
        else if (j["customer"].is_number_integer())
            r.customer = std::to_string(j["customer"].get<std::int64_t>());
        else throw ParseError(line_no, "customer must be string or integer");
        if (j["day"].is_number_integer()) {
            r.day = j["day"].get<std::int64_t>();
        } else if (j["day"].is_string()) {
            auto d = parse_iso_date(j["day"].get<std::string>());
            if (!d) throw ParseError(line_no, "day string must be YYYY-MM-DD");
            r.day = *d;
            r.is_date = true;
        } else throw ParseError(line_no, "day must be integer or YYYY-MM-DD");
        if (!j["items"].is_array() || j["items"].empty())
            throw ParseError(line_no, "items must be a non-empty array");
        for (const auto& it : j["items"]) {
            if (!it.is_number_integer() || it.get<std::int64_t>() < 0)
                throw ParseError(line_no, "items must be non-negative integers");
            r.items.push_back(static_cast<ItemId>(it.get<std::int64_t>()));
        }
        rows.push_back(std::move(r));
    }
    return assemble(std::move(rows));
}

} // namespace

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::optional<std::int64_t> parse_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (s[i] < '0' || s[i] > '9') return std::nullopt;
            v = v * 10 + (s[i] - '0');
        }
        return v;
    };
    auto y = num(0, 4), m = num(5, 2), d = num(8, 2);
    if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > 31) return std::nullopt;
    return days_from_civil(*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
}

Dataset parse_transactions(std::istream& in, TransactionFormat format) {
    return format == TransactionFormat::Csv ? parse_csv(in) : parse_jsonl(in);
}

Dataset load_transactions(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open input file: " + path);
    TransactionFormat fmt = TransactionFormat::Csv;
    if (path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0) fmt = TransactionFormat::JsonLines;
    if (path.size() >= 7 && path.compare(path.size() - 7, 7, ".ndjson") == 0) fmt = TransactionFormat::JsonLines;
    return parse_transactions(f, fmt);
}

void serialize_transactions(const Dataset& ds, std::ostream& out, TransactionFormat format) {
    if (format == TransactionFormat::Csv) {
        out << "customer_id,day,item_id\n";
        for (const auto& [cust, h] : ds.histories)
            for (const auto& b : h.baskets)
                for (ItemId item : b.items)
                    out << cust << ',' << b.time << ',' << item << '\n';
    } else {
        for (const auto& [cust, h] : ds.histories)
            for (const auto& b : h.baskets) {
                nlohmann::json j;
                j["customer"] = cust;
                j["day"] = b.time;
                j["items"] = b.items;
                out << j.dump() << '\n';
            }
    }
}

void save_transactions(const Dataset& ds, const std::string& path, TransactionFormat format) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot open output file: " + path);
    serialize_transactions(ds, f, format);
}

} // namespace tars
