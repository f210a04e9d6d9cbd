#include "liqspread/dates.hpp"
#include "liqspread/errors.hpp"

#include <gtest/gtest.h>

using namespace liqspread;

TEST(Dates, ParsesBothFormats) {
    EXPECT_EQ(parse_date("2024-05-31"), parse_date("31/05/2024"));
    EXPECT_EQ(format_date(parse_date("4/1/2027")), "2027-01-04");
    EXPECT_THROW(parse_date("2024-13-01"), InputError);
    EXPECT_THROW(parse_date("yesterday"), InputError);
}

TEST(Dates, DayNumberRoundTrip) {
    EXPECT_EQ(day_number(parse_date("1970-01-01")), 0);
    for (long n : {-1000L, 0L, 19874L, 40000L})
        EXPECT_EQ(day_number(from_day_number(n)), n);
}

TEST(Dates, AddMonthsClampsToMonthEnd) {
    EXPECT_EQ(add_months(parse_date("2024-01-31"), 1), parse_date("2024-02-29"));
    EXPECT_EQ(add_months(parse_date("2023-01-31"), 1), parse_date("2023-02-28"));
    EXPECT_EQ(add_months(parse_date("2027-11-15"), -6), parse_date("2027-05-15"));
    EXPECT_EQ(add_months(parse_date("2024-03-15"), -15), parse_date("2022-12-15"));
}

TEST(Dates, ModifiedFollowing) {
    // Saturday rolls forward to Monday.
    EXPECT_EQ(adjust(parse_date("2025-11-15"), BusinessDayAdjustment::ModifiedFollowing), parse_date("2025-11-17"));
    // Saturday at month end rolls back to Friday.
    EXPECT_EQ(adjust(parse_date("2025-05-31"), BusinessDayAdjustment::ModifiedFollowing), parse_date("2025-05-30"));
    EXPECT_EQ(adjust(parse_date("2025-05-31"), BusinessDayAdjustment::None), parse_date("2025-05-31"));
    EXPECT_EQ(adjust(parse_date("2024-05-31"), BusinessDayAdjustment::ModifiedFollowing), parse_date("2024-05-31"));
}

TEST(Dates, Thirty360) {
    const auto yf = [](const char* a, const char* b) {
        return year_fraction(parse_date(a), parse_date(b), DayCountConvention::Thirty360);
    };
    EXPECT_DOUBLE_EQ(yf("2023-11-15", "2024-05-15"), 0.5);
    EXPECT_DOUBLE_EQ(yf("2024-01-31", "2024-03-31"), 60.0 / 360.0);
    EXPECT_DOUBLE_EQ(yf("2024-01-30", "2024-03-31"), 60.0 / 360.0);
    EXPECT_DOUBLE_EQ(yf("2024-01-15", "2024-03-31"), 76.0 / 360.0);
    EXPECT_DOUBLE_EQ(yf("2024-02-29", "2024-03-31"), 32.0 / 360.0);
    EXPECT_THROW(yf("2024-03-31", "2024-01-31"), InputError);
}

TEST(Dates, Act365F) {
    EXPECT_DOUBLE_EQ(year_fraction(parse_date("2024-01-01"), parse_date("2025-01-01"), DayCountConvention::Act365F),
                     366.0 / 365.0);
}

TEST(Dates, ParsesConventionNames) {
    EXPECT_EQ(parse_day_count("30/360"), DayCountConvention::Thirty360);
    EXPECT_EQ(parse_adjustment("modified_following"), BusinessDayAdjustment::ModifiedFollowing);
    EXPECT_THROW(parse_day_count("ACT/ACT-ISMA"), InputError);
}
