#pragma once

#include "liqspread/lookback.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace liqspread {

struct SolverSettings {
    double lo = 0.0;          ///< bracket, decimal per annum
    double hi = 0.05;
    double x_tol = 1e-7;      ///< on gamma
    double f_tol = 1e-9;      ///< on the log-ratio residual
    double fd_step = 1e-4;    ///< central-difference step (1 bp)
    int max_iter = 50;
};

/// One liquidity-spread equation: illiquid option at gamma against the
/// liquid option at gamma = 0, matched to the bond value ratio.
struct GammaProblem {
    CreditConfig credit;
    PayoffKind payoff = PayoffKind::Recovery;
    TimedCashflows flows;  ///< per unit notional, years from the curve reference date
    ProbingSchedule liquid;
    ProbingSchedule illiquid;
};

struct RepeatEstimate {
    double gamma = 0.0;
    double residual = 0.0;
    double slope = 0.0;       ///< finite-difference dg/dgamma at the root
    int iterations = 0;
    OptionValue liquid;       ///< gamma = 0
    OptionValue illiquid;     ///< at the root
};

struct LiquiditySpreadResult {
    double gamma_mean = 0.0;
    double gamma_std = 0.0;   ///< sample std over repeats (0 for one repeat)
    std::vector<double> gammas;
    std::vector<RepeatEstimate> repeats;
    double max_residual = 0.0;
    std::size_t n_paths = 0;
    std::string error;        ///< nonempty when the solve failed

    bool ok() const { return error.empty(); }
    double gamma_mean_bps() const { return gamma_mean * 1e4; }
    double gamma_std_bps() const { return gamma_std * 1e4; }
};

/// Solves every problem on shared scenarios: each repeat r simulates
/// mc.n_paths paths with seed mix_seed(mc.seed, r) once per spread mode and
/// evaluates all problems of that mode on them. Failures are reported per
/// problem in LiquiditySpreadResult::error.
std::vector<LiquiditySpreadResult> solve_gamma_batch(const PricingEnv& env, std::span<const GammaProblem> problems,
                                                     const McConfig& mc, const SolverSettings& solver = {});

/// Zero-coupon bond paying 1 at T; the payoff forfeits probing dates at or
/// after default unless `payoff` says otherwise.
GammaProblem zc_problem(double T, int dt_days, CaseId c, const McConfig& mc, double recovery_rate = 0.4,
                        PayoffKind payoff = PayoffKind::NoRecovery);
/// Coupon bond valued at the curve reference date.
GammaProblem coupon_problem(const PricingEnv& env, const BondSpec& bond, int dt_days, const CreditConfig& credit,
                            const McConfig& mc);

/// Throws NumericalError when the equation has no root in the bracket.
LiquiditySpreadResult solve_gamma_zc(const PricingEnv& env, double T, int dt_days, CaseId c, const McConfig& mc);
LiquiditySpreadResult solve_gamma_coupon(const PricingEnv& env, const BondSpec& bond, int dt_days, CaseId c,
                                         const McConfig& mc);

struct SweepRow {
    double maturity = 0.0;
    int dt_days = 0;
    CaseId case_id = CaseId::Case1;
    LiquiditySpreadResult result;
};

/// Zero-coupon sweep over maturities x probing intervals x cases. Cells
/// sharing a maturity share scenarios. Failed cells keep their error.
std::vector<SweepRow> sweep(const PricingEnv& env, std::span<const double> maturities,
                            std::span<const int> dt_days, std::span<const CaseId> cases, const McConfig& mc);

/// Columns maturity_years,dt_days,case,gamma_bps,gamma_std_bps,n_paths,m.
/// Failed cells are written with empty gamma fields.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, int repeats);

} // namespace liqspread
