#pragma once

#include "liqspread/svensson.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace liqspread {

/// Minimal CSV table: header names and string cells. Blank lines and lines
/// starting with '#' are skipped.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index; InputError naming the column when absent.
    std::size_t column(std::string_view name) const;
    std::optional<std::size_t> find_column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in, std::string_view source = "csv");
CsvTable read_csv_file(const std::string& path);

double parse_number(std::string_view text, std::string_view what);

/// Curve CSV with `date,discount_factor` or `time_years,discount_factor`.
/// The time layout takes its reference date from `reference_date`.
DiscountCurve read_curve(const CsvTable& table, std::optional<Date> reference_date = std::nullopt);
DiscountCurve read_curve_file(const std::string& path, std::optional<Date> reference_date = std::nullopt);

/// Quote CSV: id,maturity_date,coupon_rate,coupon_freq_months,bid,ask,volume,
/// last_trade_date. Optional columns: issue_date, day_count, adjustment,
/// notional. coupon_rate is decimal per annum, prices are clean percent.
std::vector<BondQuote> read_quotes(const CsvTable& table);
std::vector<BondQuote> read_quotes_file(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

} // namespace liqspread
