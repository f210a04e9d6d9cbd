#pragma once

#include "liqspread/spread.hpp"
#include "liqspread/svensson.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace liqspread {

/// Maturity bucket (lo, hi] in years; the last bucket is unbounded.
struct TimeBucket {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
};

/// Buckets A..R (no J, K) partitioning (0, inf).
const std::vector<TimeBucket>& time_buckets();
const TimeBucket& bucket_for(double ttm);

struct BucketedQuote {
    BondQuote quote;
    double ttm = 0.0;     ///< ACT/365F years from valuation to maturity
    std::string bucket;
};

/// InputError when a quote matures on or before `valuation`.
std::vector<BucketedQuote> assign_buckets(std::span<const BondQuote> quotes, Date valuation);

enum class VolumeWindow { LastDay, LastWeek };

struct LiquidSelection {
    std::vector<std::string> ids;                  ///< selected representatives
    std::map<std::string, std::vector<std::string>> by_bucket;
    std::vector<std::string> warnings;             ///< buckets without traded bonds
};

/// Per bucket: bonds traded (volume > 0) within the window ending at
/// `valuation` (1 or 5 business days), ranked by ask - bid, then larger
/// volume, then id; the first `per_bucket` are kept.
LiquidSelection select_liquid(std::span<const BucketedQuote> quotes, Date valuation,
                              VolumeWindow window = VolumeWindow::LastDay, int per_bucket = 3);

enum class LiquidityLabel { LiquidRep, Liquid, Illiquid };
std::string to_string(LiquidityLabel label);

struct BondClassification {
    std::string id;
    std::string bucket;
    double ttm = 0.0;
    double yield_bps = 0.0;         ///< yield of the mid dirty price
    double curve_yield_bps = 0.0;   ///< yield of the liquid-curve model price
    double spread_bps = 0.0;
    double sigma_bucket_bps = 0.0;  ///< NaN when the bucket is excluded
    LiquidityLabel label = LiquidityLabel::Liquid;
    bool stale = false;             ///< negative spread
    bool excluded = false;          ///< bucket has fewer than two bonds
};

struct LiquidityClassification {
    std::vector<BondClassification> bonds;
    std::map<std::string, double> sigma_bps;
    std::vector<std::string> notes;
};

/// Spreads are continuously compounded yield differences in bps; each
/// bucket's sigma is the population standard deviation of its spreads.
/// A bond is ILLIQUID when its spread exceeds its bucket sigma.
LiquidityClassification classify(std::span<const BucketedQuote> quotes, const SvenssonParams& liquid_curve,
                                 Date valuation, std::span<const std::string> liquid_ids = {});

enum class CalibrationStatus { Matched, FloorHit, Unreachable };
std::string to_string(CalibrationStatus status);

struct FrequencyCalibration {
    std::string id;
    std::string bucket;
    double ttm = 0.0;
    double market_spread_bps = 0.0;
    double model_spread_bps = 0.0;
    int dt_days = 1;
    CalibrationStatus status = CalibrationStatus::Matched;
    std::map<int, double> evaluated_bps;  ///< every probing interval tried
};

struct CalibrationOptions {
    CaseId case_id = CaseId::Case4;
    double ladder_ratio = 1.4;  ///< spacing of the first-pass intervals
    double floor_tolerance_bps = 1.0;
};

/// Integer probing interval whose model spread is closest to the market
/// spread; ties go to the smaller interval. A geometric ladder over
/// [1, 252 ttm] is evaluated first, then every interval between the ladder
/// neighbours of the best rung. All evaluations use the same master seed.
FrequencyCalibration calibrate_frequency(const BondSpec& bond, double market_spread_bps, const PricingEnv& env,
                                         const McConfig& mc, const CalibrationOptions& opts = {});

struct FrequencyRecommendation {
    int dt_1sd = 0;
    int dt_2sd = 0;
    int dt_max = 0;
    double mean = 0.0;
    double sd = 0.0;
    std::vector<int> kept;
    std::vector<int> removed;
};

/// Drops values more than two sample standard deviations from the mean of
/// all values, then reports mean + sd, mean + 2 sd and the maximum of the
/// rest, rounded to whole days. Needs at least three remaining values.
FrequencyRecommendation recommend_frequency(std::span<const int> dt_days);
FrequencyRecommendation recommend_frequency(std::span<const FrequencyCalibration> calibrations);

struct UnquotedPrice {
    double recovery_rate = 0.0;
    int dt_days = 0;
    LiquiditySpreadResult result;
};

/// Liquidity spread of `bond` for every (recovery rate, interval) pair on
/// shared scenarios. Empty `recovery_rates` uses env.recovery_rate.
std::vector<UnquotedPrice> price_unquoted(const BondSpec& bond, std::span<const int> dt_choices,
                                          const PricingEnv& env, const McConfig& mc, CaseId c = CaseId::Case4,
                                          std::span<const double> recovery_rates = {});

void write_classification_csv(std::ostream& out, const LiquidityClassification& cls);
void write_calibration_csv(std::ostream& out, std::span<const FrequencyCalibration> rows);
/// Rows labelled "1 std dev.", "2 std dev." and "Sample max." for the
/// recommended intervals; other intervals are labelled "custom".
void write_recommendation_csv(std::ostream& out, std::span<const UnquotedPrice> rows,
                              const std::optional<FrequencyRecommendation>& rec);

} // namespace liqspread
