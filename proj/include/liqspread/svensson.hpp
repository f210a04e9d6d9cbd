#pragma once

#include "liqspread/curves.hpp"

#include <span>
#include <string>
#include <vector>

namespace liqspread {

struct SvenssonParams {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    double tau1 = 1.0;
    double tau2 = 10.0;
};

/// Continuously compounded Nelson-Siegel-Svensson zero yield at t >= 0.
double svensson_yield(const SvenssonParams& p, double t);
double svensson_discount(const SvenssonParams& p, double t);

/// Dirty model price of cashflows discounted on the Svensson zero curve.
double svensson_price(const SvenssonParams& p, const TimedCashflows& flows);

struct BondQuote {
    std::string id;
    BondSpec bond;
    double bid_price = 0.0;   ///< clean, percent of notional
    double ask_price = 0.0;
    double volume = 0.0;
    Date as_of{};             ///< date of the last trade carrying `volume`

    double mid() const { return 0.5 * (bid_price + ask_price); }
};

struct SvenssonFit {
    SvenssonParams params;
    double objective = 0.0;   ///< weighted sum of squared dirty-price errors
    int starts = 0;
};

/// Fits the curve to mid dirty prices at `valuation_date`, minimising
/// sum w_i (P_i - P_i^model)^2. Empty `weights` selects 1/duration.
/// Requires >= 6 quotes over >= 3 distinct maturities.
SvenssonFit fit_svensson(std::span<const BondQuote> quotes, Date valuation_date,
                         std::span<const double> weights = {});

} // namespace liqspread
