#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace liqspread {

using Date = std::chrono::year_month_day;

enum class DayCountConvention { Thirty360, Act365F };
enum class BusinessDayAdjustment { None, ModifiedFollowing };

struct DayCount {
    DayCountConvention convention = DayCountConvention::Thirty360;
    BusinessDayAdjustment adjustment = BusinessDayAdjustment::ModifiedFollowing;
};

/// Parses `YYYY-MM-DD` or `DD/MM/YYYY`.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// Serial day number (days since 1970-01-01).
long day_number(Date d);
Date from_day_number(long n);

bool is_weekend(Date d);

/// Adds calendar months, clamping the day to the end of the target month.
Date add_months(Date d, int months);

Date adjust(Date d, BusinessDayAdjustment rule);

/// Year fraction between d1 and d2 (d1 <= d2, otherwise InputError).
/// Thirty360 is the bond basis: a 31st start becomes the 30th, and a 31st end
/// becomes the 30th when the start is already on the 30th.
double year_fraction(Date d1, Date d2, DayCountConvention convention);
double year_fraction(Date d1, Date d2, const DayCount& dc);

DayCountConvention parse_day_count(std::string_view text);
BusinessDayAdjustment parse_adjustment(std::string_view text);

} // namespace liqspread
