#pragma once

#include "liqspread/marketcal.hpp"

#include <set>
#include <string>
#include <vector>

namespace fixtures {

/// Synthetic sovereign issuer priced off a known Svensson curve.
struct Issuer {
    liqspread::Date valuation;
    liqspread::SvenssonParams curve;
    std::vector<liqspread::BondQuote> quotes;
    std::set<std::string> illiquid;  ///< bonds quoted with the planted spread
};

/// 40 bonds over buckets B..L; every bucket holds three tight, traded
/// representatives, further liquid bonds with small pricing noise, and at
/// least one bond whose yield carries `planted_bps` extra.
Issuer make_issuer(double planted_bps = 25.0);

/// Dirty price of `bond` on `curve` with every zero rate shifted by `shift`.
double shifted_dirty_price(const liqspread::BondSpec& bond, const liqspread::SvenssonParams& curve,
                           liqspread::Date valuation, double shift);

/// Parameters of the unquoted-bond study.
liqspread::PricingEnv italy_env();
liqspread::BondSpec italy_bond();

/// Zero-coupon analysis inputs (BB rating).
liqspread::PricingEnv bb_env();

std::string source_path(const std::string& relative);

} // namespace fixtures
