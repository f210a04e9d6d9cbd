#include "liqspread/dates.hpp"

#include "liqspread/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace liqspread {

namespace {

int to_int(std::string_view s, std::string_view whole) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InputError("invalid date '" + std::string(whole) + "'");
    return value;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

Date parse_date(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        y = to_int(text.substr(0, 4), text);
        m = to_int(text.substr(5, 2), text);
        d = to_int(text.substr(8, 2), text);
    } else if (auto first = text.find('/'); first != std::string_view::npos) {
        auto second = text.find('/', first + 1);
        if (second == std::string_view::npos)
            throw InputError("invalid date '" + std::string(text) + "'");
        d = to_int(text.substr(0, first), text);
        m = to_int(text.substr(first + 1, second - first - 1), text);
        y = to_int(text.substr(second + 1), text);
    } else {
        throw InputError("invalid date '" + std::string(text) + "'");
    }
    Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
              std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok())
        throw InputError("invalid date '" + std::string(text) + "'");
    return date;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

long day_number(Date d) {
    return std::chrono::sys_days{d}.time_since_epoch().count();
}

Date from_day_number(long n) {
    return Date{std::chrono::sys_days{std::chrono::days{n}}};
}

bool is_weekend(Date d) {
    const unsigned wd = std::chrono::weekday{std::chrono::sys_days{d}}.c_encoding();
    return wd == 0 || wd == 6;
}

Date add_months(Date d, int months) {
    const auto ym = std::chrono::year_month{d.year(), d.month()} + std::chrono::months{months};
    const auto last = std::chrono::year_month_day_last{ym.year(), std::chrono::month_day_last{ym.month()}};
    const auto day = std::min(d.day(), last.day());
    return Date{ym.year(), ym.month(), day};
}

Date adjust(Date d, BusinessDayAdjustment rule) {
    if (rule == BusinessDayAdjustment::None || !is_weekend(d))
        return d;
    long n = day_number(d);
    long fwd = n;
    while (is_weekend(from_day_number(fwd)))
        ++fwd;
    Date rolled = from_day_number(fwd);
    if (rolled.month() == d.month())
        return rolled;
    long back = n;
    while (is_weekend(from_day_number(back)))
        --back;
    return from_day_number(back);
}

double year_fraction(Date d1, Date d2, DayCountConvention convention) {
    if (day_number(d1) > day_number(d2))
        throw InputError("year_fraction: start " + format_date(d1) + " after end " + format_date(d2));
    switch (convention) {
    case DayCountConvention::Act365F:
        return static_cast<double>(day_number(d2) - day_number(d1)) / 365.0;
    case DayCountConvention::Thirty360: {
        int dd1 = static_cast<int>(static_cast<unsigned>(d1.day()));
        int dd2 = static_cast<int>(static_cast<unsigned>(d2.day()));
        if (dd1 == 31)
            dd1 = 30;
        if (dd2 == 31 && dd1 == 30)
            dd2 = 30;
        const int years = static_cast<int>(d2.year()) - static_cast<int>(d1.year());
        const int months = static_cast<int>(static_cast<unsigned>(d2.month())) -
                           static_cast<int>(static_cast<unsigned>(d1.month()));
        return (360.0 * years + 30.0 * months + (dd2 - dd1)) / 360.0;
    }
    }
    return 0.0;
}

double year_fraction(Date d1, Date d2, const DayCount& dc) {
    return year_fraction(d1, d2, dc.convention);
}

DayCountConvention parse_day_count(std::string_view text) {
    const auto s = lower(text);
    if (s == "30/360" || s == "thirty360" || s == "thirty_360")
        return DayCountConvention::Thirty360;
    if (s == "act/365f" || s == "act365f" || s == "act_365f" || s == "actual/365 (fixed)")
        return DayCountConvention::Act365F;
    throw InputError("unknown day count '" + std::string(text) + "'");
}

BusinessDayAdjustment parse_adjustment(std::string_view text) {
    const auto s = lower(text);
    if (s == "none" || s == "unadjusted")
        return BusinessDayAdjustment::None;
    if (s == "modified_following" || s == "modified following" || s == "mf")
        return BusinessDayAdjustment::ModifiedFollowing;
    throw InputError("unknown business-day adjustment '" + std::string(text) + "'");
}

} // namespace liqspread
