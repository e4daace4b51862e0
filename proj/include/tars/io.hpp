#ifndef TARS_IO_HPP
#define TARS_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "tars/core.hpp"

namespace tars {

struct ParseError : DataError {
    std::size_t line = 0;
    ParseError(std::size_t line_, const std::string& what_)
        : DataError("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

enum class TransactionFormat { Csv, JsonLines };

// CSV rows are `customer_id,day,item_id` (optional header); JSON lines are
// `{"customer": c, "day": t, "items": [..]}`. `day` may be an integer index
// or an ISO date; dates are rebased to offsets from the earliest date seen.
// Rows sharing (customer, day) merge into one basket by item-set union.
Dataset parse_transactions(std::istream& in, TransactionFormat format);
Dataset load_transactions(const std::string& path); // format from extension (.jsonl/.ndjson => json-lines)

void serialize_transactions(const Dataset& ds, std::ostream& out, TransactionFormat format);
void save_transactions(const Dataset& ds, const std::string& path, TransactionFormat format);

// days since 1970-01-01 for a proleptic Gregorian date
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
// parses "YYYY-MM-DD"; returns nullopt if not a date
std::optional<std::int64_t> parse_iso_date(const std::string& text);

} // namespace tars

#endif
