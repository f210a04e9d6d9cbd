#pragma once

#include "liqspread/dates.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace liqspread {

/// Discount factors P(0, t) on pillars, log-linear in between.
///
/// Times are year fractions from the reference date (ACT/365F when built
/// from dates). The first pillar is the reference date with factor 1.
/// Queries beyond the last pillar are rejected rather than extrapolated.
class DiscountCurve {
public:
    DiscountCurve(Date reference_date, std::vector<double> times, std::vector<double> factors);

    /// Pillars given by date; the first pillar defines the reference date.
    static DiscountCurve from_dates(std::span<const Date> dates, std::vector<double> factors);

    double discount(double t) const;
    double discount(Date d) const { return discount(time_of(d)); }
    double log_discount(double t) const;

    /// ACT/365F year fraction from the reference date.
    double time_of(Date d) const;

    Date reference_date() const { return reference_; }
    std::span<const double> times() const { return times_; }
    std::span<const double> factors() const { return factors_; }
    double max_time() const { return times_.back(); }

    /// True when every pillar-to-pillar forward rate is >= 0.
    bool nonnegative_forwards() const;

private:
    Date reference_;
    std::vector<double> times_;
    std::vector<double> factors_;
    std::vector<double> logs_;
};

/// Fixed-coupon bullet bond.
struct BondSpec {
    std::string id;
    Date issue_date{};
    Date maturity_date{};
    double coupon_rate = 0.0;     ///< decimal per annum
    int frequency_months = 6;
    double notional = 100.0;
    DayCount day_count{};
};

struct Cashflow {
    Date date{};
    double amount = 0.0;
};

/// Coupon schedule rolled backwards from maturity; a short first period is
/// allowed. Amounts accrue on unadjusted dates, payment dates are adjusted.
/// The final cashflow carries the notional. A zero coupon rate yields the
/// single notional repayment. When `after` is given, only payments strictly
/// after that date are returned and an empty result is an InputError.
std::vector<Cashflow> generate_schedule(const BondSpec& bond, std::optional<Date> after = std::nullopt);

/// Accrued interest (currency units) at `settle` under the bond day count.
double accrued_interest(const BondSpec& bond, Date settle);

/// Cashflows expressed on the model time axis (ACT/365F from `t0`).
struct TimedCashflows {
    std::vector<double> times;
    std::vector<double> amounts;
};

TimedCashflows to_times(std::span<const Cashflow> flows, Date t0);

/// Sum of c_i exp(-y t_i).
double price_from_yield(double yield, const TimedCashflows& flows);

/// Continuously compounded flat yield solving price = sum c_i exp(-y t_i).
/// Searches [-0.5, 2.0]; throws NumericalError without a sign change there.
double bond_yield(double dirty_price, const TimedCashflows& flows);
double bond_yield(double dirty_price, std::span<const Cashflow> flows, Date t0);

/// Macaulay duration (years) at continuous yield `yield`.
double macaulay_duration(double yield, const TimedCashflows& flows);

} // namespace liqspread
