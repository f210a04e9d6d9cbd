#include "liqspread/curves.hpp"

#include "liqspread/errors.hpp"
#include "liqspread/roots.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liqspread {

namespace {
constexpr double kTimeTol = 1e-12;
}

DiscountCurve::DiscountCurve(Date reference_date, std::vector<double> times, std::vector<double> factors)
    : reference_(reference_date), times_(std::move(times)), factors_(std::move(factors)) {
    if (times_.size() != factors_.size() || times_.size() < 2)
        throw InputError("discount curve needs at least two pillars with matching factors");
    if (std::abs(times_.front()) > kTimeTol || std::abs(factors_.front() - 1.0) > 1e-12)
        throw InputError("discount curve must start at t=0 with factor 1");
    times_.front() = 0.0;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!(factors_[i] > 0.0) || !std::isfinite(factors_[i]))
            throw InputError("discount factors must be strictly positive");
        if (i > 0 && !(times_[i] > times_[i - 1]))
            throw InputError("discount curve pillars must be strictly increasing");
    }
    logs_.reserve(factors_.size());
    for (double f : factors_)
        logs_.push_back(std::log(f));
}

DiscountCurve DiscountCurve::from_dates(std::span<const Date> dates, std::vector<double> factors) {
    if (dates.empty())
        throw InputError("discount curve needs pillars");
    std::vector<double> times;
    times.reserve(dates.size());
    for (Date d : dates) {
        if (day_number(d) < day_number(dates.front()))
            throw InputError("discount curve pillar dates must be increasing");
        times.push_back(year_fraction(dates.front(), d, DayCountConvention::Act365F));
    }
    return DiscountCurve(dates.front(), std::move(times), std::move(factors));
}

double DiscountCurve::log_discount(double t) const {
    if (t < -kTimeTol || !std::isfinite(t))
        throw InputError("discount curve queried before reference date");
    if (t > times_.back() + kTimeTol) {
        std::ostringstream msg;
        msg << "discount curve queried at t=" << t << " beyond last pillar " << times_.back();
        throw InputError(msg.str());
    }
    if (t <= 0.0)
        return 0.0;
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it == times_.end())
        return logs_.back();
    const auto i = static_cast<std::size_t>(it - times_.begin());
    if (*it == t)
        return logs_[i];
    const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    return (1.0 - w) * logs_[i - 1] + w * logs_[i];
}

double DiscountCurve::discount(double t) const {
    const double l = log_discount(t);
    if (l == 0.0)
        return 1.0;
    // pillars return the stored value exactly
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it != times_.end() && *it == t)
        return factors_[static_cast<std::size_t>(it - times_.begin())];
    return std::exp(l);
}

double DiscountCurve::time_of(Date d) const {
    return year_fraction(reference_, d, DayCountConvention::Act365F);
}

bool DiscountCurve::nonnegative_forwards() const {
    for (std::size_t i = 1; i < factors_.size(); ++i)
        if (factors_[i] > factors_[i - 1])
            return false;
    return true;
}

std::vector<Cashflow> generate_schedule(const BondSpec& bond, std::optional<Date> after) {
    if (day_number(bond.issue_date) >= day_number(bond.maturity_date))
        throw InputError("bond " + bond.id + ": issue date must precede maturity");
    if (bond.frequency_months <= 0)
        throw InputError("bond " + bond.id + ": coupon frequency must be positive");
    if (!(bond.notional > 0.0))
        throw InputError("bond " + bond.id + ": notional must be positive");

    // unadjusted period ends, rolled back from maturity
    std::vector<Date> ends;
    for (int k = 0;; ++k) {
        Date d = add_months(bond.maturity_date, -k * bond.frequency_months);
        if (day_number(d) <= day_number(bond.issue_date))
            break;
        ends.push_back(d);
    }
    std::reverse(ends.begin(), ends.end());

    std::vector<Cashflow> flows;
    Date start = bond.issue_date;
    for (std::size_t i = 0; i < ends.size(); ++i) {
        const bool last = i + 1 == ends.size();
        double amount = bond.notional * bond.coupon_rate * year_fraction(start, ends[i], bond.day_count);
        if (last)
            amount += bond.notional;
        if (amount != 0.0)
            flows.push_back({adjust(ends[i], bond.day_count.adjustment), amount});
        start = ends[i];
    }
    if (after) {
        const long cut = day_number(*after);
        std::erase_if(flows, [cut](const Cashflow& c) { return day_number(c.date) <= cut; });
        if (flows.empty())
            throw InputError("bond " + bond.id + ": no payment after " + format_date(*after));
    }
    return flows;
}

double accrued_interest(const BondSpec& bond, Date settle) {
    if (day_number(settle) <= day_number(bond.issue_date) || day_number(settle) >= day_number(bond.maturity_date))
        return 0.0;
    for (int k = 1;; ++k) {
        const Date prev = add_months(bond.maturity_date, -k * bond.frequency_months);
        if (day_number(prev) <= day_number(settle)) {
            const Date start = day_number(prev) < day_number(bond.issue_date) ? bond.issue_date : prev;
            return bond.notional * bond.coupon_rate * year_fraction(start, settle, bond.day_count);
        }
    }
}

TimedCashflows to_times(std::span<const Cashflow> flows, Date t0) {
    TimedCashflows out;
    for (const auto& c : flows) {
        if (day_number(c.date) <= day_number(t0))
            continue;
        out.times.push_back(year_fraction(t0, c.date, DayCountConvention::Act365F));
        out.amounts.push_back(c.amount);
    }
    return out;
}

double price_from_yield(double yield, const TimedCashflows& flows) {
    double p = 0.0;
    for (std::size_t i = 0; i < flows.times.size(); ++i)
        p += flows.amounts[i] * std::exp(-yield * flows.times[i]);
    return p;
}

double bond_yield(double dirty_price, const TimedCashflows& flows) {
    if (!(dirty_price > 0.0))
        throw InputError("bond_yield: price must be positive");
    if (flows.times.empty())
        throw InputError("bond_yield: no future cashflow");
    auto f = [&](double y) {
        double p = 0.0, dp = 0.0;
        for (std::size_t i = 0; i < flows.times.size(); ++i) {
            const double v = flows.amounts[i] * std::exp(-y * flows.times[i]);
            p += v;
            dp -= flows.times[i] * v;
        }
        return std::pair{p - dirty_price, dp};
    };
    const auto r = safeguarded_newton(f, -0.5, 2.0, 1e-15, 1e-10, 200);
    return r.root;
}

double bond_yield(double dirty_price, std::span<const Cashflow> flows, Date t0) {
    return bond_yield(dirty_price, to_times(flows, t0));
}

double macaulay_duration(double yield, const TimedCashflows& flows) {
    double p = 0.0, tp = 0.0;
    for (std::size_t i = 0; i < flows.times.size(); ++i) {
        const double v = flows.amounts[i] * std::exp(-yield * flows.times[i]);
        p += v;
        tp += flows.times[i] * v;
    }
    return tp / p;
}

} // namespace liqspread
