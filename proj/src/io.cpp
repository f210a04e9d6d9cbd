#include "liqspread/io.hpp"

#include "liqspread/errors.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace liqspread {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            out.push_back(trim(cell));
            cell.clear();
        } else {
            cell.push_back(ch);
        }
    }
    out.push_back(trim(cell));
    return out;
}

// Bonds without an issue date roll their schedule back this far.
constexpr int kDefaultHistoryMonths = 12 * 50;

} // namespace

std::optional<std::size_t> CsvTable::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    return std::nullopt;
}

std::size_t CsvTable::column(std::string_view name) const {
    if (auto i = find_column(name))
        return *i;
    throw InputError("missing column '" + std::string(name) + "'");
}

CsvTable read_csv(std::istream& in, std::string_view source) {
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto content = trim(line);
        if (content.empty() || content[0] == '#')
            continue;
        auto cells = split_line(content);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw InputError(std::string(source) + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(t.header.size()) + " fields, found " + std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty())
        throw InputError(std::string(source) + ": empty CSV");
    return t;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    return read_csv(in, path);
}

double parse_number(std::string_view text, std::string_view what) {
    const auto s = trim(text);
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc{} || ptr != end)
        throw InputError("invalid number '" + s + "' for " + std::string(what));
    return v;
}

DiscountCurve read_curve(const CsvTable& table, std::optional<Date> reference_date) {
    const auto fcol = table.column("discount_factor");
    std::vector<double> factors;
    for (const auto& r : table.rows)
        factors.push_back(parse_number(r[fcol], "discount_factor"));
    if (auto dcol = table.find_column("date")) {
        std::vector<Date> dates;
        for (const auto& r : table.rows)
            dates.push_back(parse_date(r[*dcol]));
        if (reference_date && !dates.empty() && dates.front() != *reference_date)
            throw InputError("curve first pillar " + format_date(dates.front()) + " differs from reference date " +
                             format_date(*reference_date));
        return DiscountCurve::from_dates(dates, std::move(factors));
    }
    if (auto tcol = table.find_column("time_years")) {
        if (!reference_date)
            throw InputError("curve given in years needs a reference date");
        std::vector<double> times;
        for (const auto& r : table.rows)
            times.push_back(parse_number(r[*tcol], "time_years"));
        return DiscountCurve(*reference_date, std::move(times), std::move(factors));
    }
    throw InputError("missing column 'date' or 'time_years'");
}

DiscountCurve read_curve_file(const std::string& path, std::optional<Date> reference_date) {
    return read_curve(read_csv_file(path), reference_date);
}

std::vector<BondQuote> read_quotes(const CsvTable& table) {
    const auto c_id = table.column("id");
    const auto c_mat = table.column("maturity_date");
    const auto c_cpn = table.column("coupon_rate");
    const auto c_freq = table.column("coupon_freq_months");
    const auto c_bid = table.column("bid");
    const auto c_ask = table.column("ask");
    const auto c_vol = table.column("volume");
    const auto c_last = table.column("last_trade_date");
    const auto c_issue = table.find_column("issue_date");
    const auto c_dc = table.find_column("day_count");
    const auto c_adj = table.find_column("adjustment");
    const auto c_notional = table.find_column("notional");

    std::vector<BondQuote> out;
    for (const auto& r : table.rows) {
        BondQuote q;
        q.id = r[c_id];
        q.bond.id = q.id;
        q.bond.maturity_date = parse_date(r[c_mat]);
        q.bond.coupon_rate = parse_number(r[c_cpn], "coupon_rate");
        q.bond.frequency_months = static_cast<int>(parse_number(r[c_freq], "coupon_freq_months"));
        q.bond.issue_date = c_issue && !r[*c_issue].empty() ? parse_date(r[*c_issue])
                                                             : add_months(q.bond.maturity_date, -kDefaultHistoryMonths);
        if (c_dc && !r[*c_dc].empty())
            q.bond.day_count.convention = parse_day_count(r[*c_dc]);
        if (c_adj && !r[*c_adj].empty())
            q.bond.day_count.adjustment = parse_adjustment(r[*c_adj]);
        if (c_notional && !r[*c_notional].empty())
            q.bond.notional = parse_number(r[*c_notional], "notional");
        q.bid_price = parse_number(r[c_bid], "bid");
        q.ask_price = parse_number(r[c_ask], "ask");
        q.volume = parse_number(r[c_vol], "volume");
        q.as_of = parse_date(r[c_last]);
        if (!(q.bid_price > 0.0) || q.ask_price < q.bid_price)
            throw InputError("quote " + q.id + ": need ask >= bid > 0");
        if (q.volume < 0.0)
            throw InputError("quote " + q.id + ": negative volume");
        if (q.bond.frequency_months < 1)
            throw InputError("quote " + q.id + ": coupon frequency must be positive");
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<BondQuote> read_quotes_file(const std::string& path) {
    return read_quotes(read_csv_file(path));
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

} // namespace liqspread
