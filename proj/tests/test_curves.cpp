#include "liqspread/curves.hpp"
#include "liqspread/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace liqspread;

namespace {

DiscountCurve small_curve() {
    return DiscountCurve(parse_date("2024-05-31"), {0.0, 0.5, 1.0, 2.0}, {1.0, 0.982, 0.965, 0.94});
}

BondSpec italy_bond() {
    BondSpec b;
    b.id = "IT";
    b.issue_date = parse_date("2023-11-15");
    b.maturity_date = parse_date("2027-11-15");
    b.coupon_rate = 0.045;
    b.frequency_months = 6;
    return b;
}

} // namespace

TEST(Curve, PillarsAreExact) {
    const auto c = small_curve();
    EXPECT_DOUBLE_EQ(c.discount(0.0), 1.0);
    EXPECT_DOUBLE_EQ(c.discount(1.0), 0.965);
    EXPECT_DOUBLE_EQ(c.discount(2.0), 0.94);
}

TEST(Curve, LogLinearBetweenPillars) {
    const auto c = small_curve();
    EXPECT_NEAR(c.discount(0.75), std::sqrt(0.982 * 0.965), 1e-15);
    EXPECT_NEAR(c.discount(1.25), std::pow(0.965, 0.75) * std::pow(0.94, 0.25), 1e-15);
}

TEST(Curve, RejectsExtrapolationAndBadInput) {
    const auto c = small_curve();
    EXPECT_THROW(c.discount(2.5), InputError);
    EXPECT_THROW(DiscountCurve(parse_date("2024-05-31"), {0.0, 1.0}, {0.99, 0.95}), InputError);
    EXPECT_THROW(DiscountCurve(parse_date("2024-05-31"), {0.0, 1.0, 0.5}, {1.0, 0.95, 0.97}), InputError);
    EXPECT_THROW(DiscountCurve(parse_date("2024-05-31"), {0.0, 1.0}, {1.0, -0.1}), InputError);
}

TEST(Curve, FromDatesUsesAct365) {
    const std::vector<Date> d{parse_date("2023-12-29"), parse_date("2024-12-29")};
    const auto c = DiscountCurve::from_dates(d, {1.0, 0.96});
    EXPECT_EQ(c.reference_date(), d[0]);
    EXPECT_NEAR(c.time_of(d[1]), 366.0 / 365.0, 1e-15);
}

TEST(Curve, ForwardSign) {
    EXPECT_TRUE(small_curve().nonnegative_forwards());
    const DiscountCurve up(parse_date("2024-05-31"), {0.0, 1.0, 2.0}, {1.0, 0.97, 0.98});
    EXPECT_FALSE(up.nonnegative_forwards());
}

TEST(Schedule, ItalyBondAfterValuation) {
    const auto flows = generate_schedule(italy_bond(), parse_date("2024-05-31"));
    const std::vector<const char*> expected{"2024-11-15", "2025-05-15", "2025-11-17", "2026-05-15",
                                            "2026-11-16", "2027-05-17", "2027-11-15"};
    ASSERT_EQ(flows.size(), expected.size());
    for (std::size_t i = 0; i < flows.size(); ++i) {
        EXPECT_EQ(flows[i].date, parse_date(expected[i])) << i;
        EXPECT_DOUBLE_EQ(flows[i].amount, i + 1 == flows.size() ? 102.25 : 2.25);
    }
}

TEST(Schedule, ShortFirstPeriod) {
    auto b = italy_bond();
    b.issue_date = parse_date("2024-02-01");
    const auto flows = generate_schedule(b);
    EXPECT_EQ(flows.front().date, parse_date("2024-05-15"));
    EXPECT_NEAR(flows.front().amount, 100.0 * 0.045 * 104.0 / 360.0, 1e-12);
}

TEST(Schedule, ZeroCouponAndEmpty) {
    auto b = italy_bond();
    b.coupon_rate = 0.0;
    const auto flows = generate_schedule(b);
    ASSERT_EQ(flows.size(), 1u);
    EXPECT_DOUBLE_EQ(flows[0].amount, 100.0);
    EXPECT_THROW(generate_schedule(italy_bond(), parse_date("2028-01-01")), InputError);
}

TEST(Schedule, AccruedInterest) {
    EXPECT_NEAR(accrued_interest(italy_bond(), parse_date("2024-05-31")), 4.5 * 16.0 / 360.0, 1e-12);
    EXPECT_NEAR(accrued_interest(italy_bond(), parse_date("2024-05-15")), 0.0, 1e-12);
}

TEST(Yield, RoundTrip) {
    TimedCashflows f{{0.5, 1.0, 1.5, 2.0}, {2.0, 2.0, 2.0, 102.0}};
    for (double y : {-0.01, 0.0, 0.03, 0.25}) {
        const double p = price_from_yield(y, f);
        EXPECT_NEAR(bond_yield(p, f), y, 1e-12);
    }
    EXPECT_THROW(bond_yield(1e6, f), NumericalError);
}

TEST(Yield, MacaulayDurationOfZero) {
    TimedCashflows f{{3.0}, {100.0}};
    EXPECT_NEAR(macaulay_duration(0.05, f), 3.0, 1e-14);
}
