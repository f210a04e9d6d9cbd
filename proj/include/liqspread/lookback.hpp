#pragma once

#include "liqspread/simulate.hpp"

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace liqspread {

/// Scenario cases: 1 deterministic spread, 2 stochastic spread, 3 and 4 the
/// same with default events.
enum class CaseId { Case1 = 1, Case2 = 2, Case3 = 3, Case4 = 4 };

/// Accepts "1".."4", "case1".."case4" (any case).
CaseId parse_case(std::string_view text);
int case_number(CaseId c);
CreditConfig credit_config(CaseId c, double recovery_rate = 0.4);

enum class ScheduleKind { Liquid, Illiquid };

struct ProbingSchedule {
    ScheduleKind kind = ScheduleKind::Illiquid;
    std::vector<double> dates;  ///< increasing, last date is the maturity
    int dt_days = 0;            ///< business-day spacing of illiquid schedules
};

/// Dates k * dt_days / 252 (k >= 1) strictly before T, closed with T.
ProbingSchedule illiquid_schedule(double T, int dt_days);
/// Dates m / steps_per_year (m >= 1) strictly before T, closed with T.
ProbingSchedule liquid_schedule(double T, int steps_per_year);
/// (liquid, illiquid); liquid_step is in years and must divide one year.
std::pair<ProbingSchedule, ProbingSchedule> make_schedules(double T, int dt_days, double liquid_step);

/// Treatment of probing dates at or after default: forfeit them (the
/// zero-coupon payoff as written) or receive the recovery value.
enum class PayoffKind { NoRecovery, Recovery };

struct OptionValue {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
};

/// Sample mean and standard error; identical samples give std_error 0.
OptionValue summarize(std::span<const double> values);

/// Evaluates the perfect-timing sale strategy over a probing schedule.
///
/// Per path and probing date t the strategy value, discounted to 0, is the
/// coupons already received plus the sale proceeds e^{-int_r(t)} V(t, T),
/// where V sums the remaining cash flows at liquidity-adjusted risky zero
/// prices. Coupons paid on a date are received before a sale on that date.
/// From the default node onward the path is worth the coupons received
/// before default plus, with PayoffKind::Recovery, RR times the remaining
/// cash flows valued in the pre-default state at the default time.
class LookbackValuer {
public:
    /// `flows` are relative to the simulation start and must lie on grid
    /// nodes, as must the schedule dates; the last flow must not be later
    /// than the last probing date.
    LookbackValuer(const PricingEnv& env, const CreditConfig& cfg, PayoffKind payoff, TimedCashflows flows,
                   std::shared_ptr<const TimeGrid> grid, const ProbingSchedule& schedule);

    /// Sorted grid nodes a scenario set must record.
    const std::vector<std::size_t>& required_nodes() const { return required_; }

    struct Layout {
        std::vector<std::size_t> probe;
        std::vector<std::size_t> cashflow;
    };
    Layout layout_for(const ScenarioSet& scn) const;

    /// Path-independent factors for a set of trial spreads.
    struct GammaTable {
        std::vector<double> gammas;
        std::vector<double> weights;  ///< [term][gamma]
    };
    GammaTable prepare(std::span<const double> gammas) const;

    /// Strategy values of path p, one per prepared gamma. `default_override`
    /// replaces the path's default record when given.
    void path_values(const ScenarioSet& scn, const Layout& layout, const GammaTable& table, std::size_t p,
                     std::span<double> out, const DefaultRecord* default_override = nullptr) const;
    double path_value(const ScenarioSet& scn, std::size_t p, double gamma) const;

    /// Model value of the remaining cash flows at time 0 with spread gamma.
    double bond_value(double gamma) const;

    const TimedCashflows& flows() const { return flows_; }
    const CreditConfig& credit() const { return cfg_; }
    PayoffKind payoff() const { return payoff_; }
    std::span<const double> probe_times() const { return probe_times_; }

private:
    struct Term {
        AffineZcb zcb;
        double horizon;
        double amount;
    };

    double recovery_value(const DefaultRecord& rec, double gamma) const;

    PricingEnv env_;
    CreditConfig cfg_;
    PayoffKind payoff_;
    TimedCashflows flows_;
    std::shared_ptr<const TimeGrid> grid_;
    std::vector<double> probe_times_;
    std::vector<std::size_t> probe_nodes_;
    std::vector<std::size_t> flow_nodes_;
    std::vector<std::size_t> required_;
    std::vector<std::size_t> term_offset_;  ///< terms of probe q: [offset[q], offset[q+1])
    std::vector<Term> terms_;
};

/// Strategy value of one path for a zero-coupon bond paying 1 at the last
/// schedule date, without recovery.
double strategy_value_zc(const ScenarioSet& scn, std::size_t p, const PricingEnv& env, const ProbingSchedule& sched,
                         double gamma, CaseId c);

/// Strategy value of one path for a coupon bond with recovery.
double strategy_value_coupon(const ScenarioSet& scn, std::size_t p, const PricingEnv& env,
                             const TimedCashflows& flows, const ProbingSchedule& sched, double gamma,
                             const CreditConfig& cfg);

/// Mean and standard error of the strategy value over all paths.
OptionValue value_option(const ScenarioSet& scn, const LookbackValuer& valuer, double gamma);

} // namespace liqspread
