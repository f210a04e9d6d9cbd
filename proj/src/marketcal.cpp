#include "liqspread/marketcal.hpp"

#include "liqspread/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

namespace liqspread {

const std::vector<TimeBucket>& time_buckets() {
    static const std::vector<TimeBucket> buckets = {
        {"A", 0.0, 0.25},  {"B", 0.25, 0.5}, {"C", 0.5, 0.75}, {"D", 0.75, 1.0},  {"E", 1.0, 1.5},   {"F", 1.5, 2.5},
        {"G", 2.5, 3.5},   {"H", 3.5, 5.0},  {"I", 5.0, 7.5},  {"L", 7.5, 10.0},  {"M", 10.0, 15.0}, {"N", 15.0, 20.0},
        {"O", 20.0, 25.0}, {"P", 25.0, 30.0}, {"Q", 30.0, 40.0},
        {"R", 40.0, std::numeric_limits<double>::infinity()},
    };
    return buckets;
}

const TimeBucket& bucket_for(double ttm) {
    if (!(ttm > 0.0))
        throw InputError("time to maturity must be positive");
    for (const auto& b : time_buckets())
        if (ttm > b.lo && ttm <= b.hi)
            return b;
    return time_buckets().back();
}

std::vector<BucketedQuote> assign_buckets(std::span<const BondQuote> quotes, Date valuation) {
    std::vector<BucketedQuote> out;
    out.reserve(quotes.size());
    for (const auto& q : quotes) {
        if (q.bond.maturity_date <= valuation)
            throw InputError("bond " + q.id + " matures on or before the valuation date");
        const double ttm = year_fraction(valuation, q.bond.maturity_date, DayCountConvention::Act365F);
        out.push_back({q, ttm, bucket_for(ttm).name});
    }
    return out;
}

namespace {

Date business_days_before(Date d, int n) {
    long day = day_number(d);
    while (n > 0) {
        --day;
        if (!is_weekend(from_day_number(day)))
            --n;
    }
    return from_day_number(day);
}

struct Priced {
    double yield = 0.0;
    double curve_yield = 0.0;
};

Priced price_quote(const BucketedQuote& bq, const SvenssonParams& curve, Date valuation) {
    const auto& q = bq.quote;
    const auto flows = to_times(generate_schedule(q.bond, valuation), valuation);
    const double scale = 100.0 / q.bond.notional;
    const double dirty = q.mid() + accrued_interest(q.bond, valuation) * scale;
    TimedCashflows pct = flows;
    for (auto& a : pct.amounts)
        a *= scale;
    return {bond_yield(dirty, pct), bond_yield(svensson_price(curve, pct), pct)};
}

} // namespace

LiquidSelection select_liquid(std::span<const BucketedQuote> quotes, Date valuation, VolumeWindow window,
                              int per_bucket) {
    if (per_bucket < 1)
        throw InputError("select at least one bond per bucket");
    const Date start = business_days_before(valuation, window == VolumeWindow::LastDay ? 1 : 5);
    std::map<std::string, std::vector<const BucketedQuote*>> traded;
    std::set<std::string> seen;
    for (const auto& bq : quotes) {
        seen.insert(bq.bucket);
        const auto& q = bq.quote;
        if (q.volume > 0.0 && q.as_of >= start && q.as_of <= valuation)
            traded[bq.bucket].push_back(&bq);
    }
    LiquidSelection out;
    for (const auto& b : time_buckets()) {
        if (!seen.count(b.name))
            continue;
        auto it = traded.find(b.name);
        if (it == traded.end()) {
            out.warnings.push_back("bucket " + b.name + ": no bond traded in the volume window, none selected");
            continue;
        }
        auto& list = it->second;
        std::sort(list.begin(), list.end(), [](const BucketedQuote* x, const BucketedQuote* y) {
            const double sx = x->quote.ask_price - x->quote.bid_price;
            const double sy = y->quote.ask_price - y->quote.bid_price;
            if (sx != sy)
                return sx < sy;
            if (x->quote.volume != y->quote.volume)
                return x->quote.volume > y->quote.volume;
            return x->quote.id < y->quote.id;
        });
        auto& ids = out.by_bucket[b.name];
        for (std::size_t k = 0; k < list.size() && k < static_cast<std::size_t>(per_bucket); ++k) {
            ids.push_back(list[k]->quote.id);
            out.ids.push_back(list[k]->quote.id);
        }
    }
    return out;
}

std::string to_string(LiquidityLabel label) {
    switch (label) {
    case LiquidityLabel::LiquidRep:
        return "LIQUID_REP";
    case LiquidityLabel::Liquid:
        return "LIQUID";
    case LiquidityLabel::Illiquid:
        return "ILLIQUID";
    }
    return "?";
}

LiquidityClassification classify(std::span<const BucketedQuote> quotes, const SvenssonParams& liquid_curve,
                                 Date valuation, std::span<const std::string> liquid_ids) {
    const std::set<std::string> reps(liquid_ids.begin(), liquid_ids.end());
    LiquidityClassification out;
    std::map<std::string, std::vector<std::size_t>> members;
    for (const auto& bq : quotes) {
        const auto priced = price_quote(bq, liquid_curve, valuation);
        BondClassification c;
        c.id = bq.quote.id;
        c.bucket = bq.bucket;
        c.ttm = bq.ttm;
        c.yield_bps = priced.yield * 1e4;
        c.curve_yield_bps = priced.curve_yield * 1e4;
        c.spread_bps = c.yield_bps - c.curve_yield_bps;
        c.stale = c.spread_bps < 0.0;
        c.label = reps.count(c.id) ? LiquidityLabel::LiquidRep : LiquidityLabel::Liquid;
        members[c.bucket].push_back(out.bonds.size());
        out.bonds.push_back(std::move(c));
    }
    for (const auto& [bucket, idx] : members) {
        if (idx.size() < 2) {
            out.notes.push_back("bucket " + bucket + ": fewer than two bonds, excluded from classification");
            for (auto i : idx) {
                out.bonds[i].excluded = true;
                out.bonds[i].sigma_bucket_bps = std::numeric_limits<double>::quiet_NaN();
            }
            continue;
        }
        double mean = 0.0;
        for (auto i : idx)
            mean += out.bonds[i].spread_bps;
        mean /= static_cast<double>(idx.size());
        double ss = 0.0;
        for (auto i : idx)
            ss += (out.bonds[i].spread_bps - mean) * (out.bonds[i].spread_bps - mean);
        const double sigma = std::sqrt(ss / static_cast<double>(idx.size()));
        out.sigma_bps[bucket] = sigma;
        for (auto i : idx) {
            auto& c = out.bonds[i];
            c.sigma_bucket_bps = sigma;
            if (c.spread_bps > sigma)
                c.label = LiquidityLabel::Illiquid;
        }
    }
    for (const auto& c : out.bonds)
        if (c.stale)
            out.notes.push_back("bond " + c.id + ": negative spread (" + std::to_string(c.spread_bps) +
                                " bps), flagged STALE");
    return out;
}

std::string to_string(CalibrationStatus status) {
    switch (status) {
    case CalibrationStatus::Matched:
        return "MATCHED";
    case CalibrationStatus::FloorHit:
        return "FLOOR_HIT";
    case CalibrationStatus::Unreachable:
        return "UNREACHABLE";
    }
    return "?";
}

namespace {

std::map<int, double> evaluate_intervals(const BondSpec& bond, const std::vector<int>& dts, const PricingEnv& env,
                                         const McConfig& mc, CaseId c) {
    std::vector<GammaProblem> problems;
    const auto credit = credit_config(c, env.recovery_rate);
    for (int dt : dts)
        problems.push_back(coupon_problem(env, bond, dt, credit, mc));
    const auto results = solve_gamma_batch(env, problems, mc);
    std::map<int, double> out;
    for (std::size_t k = 0; k < dts.size(); ++k) {
        if (!results[k].ok())
            throw NumericalError("calibration of " + bond.id + " at " + std::to_string(dts[k]) +
                                 " days: " + results[k].error);
        out[dts[k]] = results[k].gamma_mean_bps();
    }
    return out;
}

int best_interval(const std::map<int, double>& evaluated, double target) {
    int best = evaluated.begin()->first;
    double best_gap = std::numeric_limits<double>::infinity();
    for (const auto& [dt, g] : evaluated) {
        const double gap = std::abs(g - target);
        if (gap < best_gap) {
            best_gap = gap;
            best = dt;
        }
    }
    return best;
}

} // namespace

FrequencyCalibration calibrate_frequency(const BondSpec& bond, double market_spread_bps, const PricingEnv& env,
                                         const McConfig& mc, const CalibrationOptions& opts) {
    if (!std::isfinite(market_spread_bps))
        throw InputError("market spread must be finite");
    if (!(opts.ladder_ratio > 1.0))
        throw InputError("ladder ratio must exceed 1");
    const Date valuation = env.curve.reference_date();
    FrequencyCalibration out;
    out.id = bond.id;
    out.market_spread_bps = market_spread_bps;
    out.ttm = year_fraction(valuation, bond.maturity_date, DayCountConvention::Act365F);
    out.bucket = bucket_for(out.ttm).name;
    const int max_dt = std::max(1, static_cast<int>(std::floor(kBusinessDaysPerYear * out.ttm)));

    if (market_spread_bps < 0.0) {
        out.evaluated_bps = evaluate_intervals(bond, {1}, env, mc, opts.case_id);
        out.dt_days = 1;
        out.model_spread_bps = out.evaluated_bps.at(1);
        out.status = CalibrationStatus::Unreachable;
        return out;
    }

    std::vector<int> ladder;
    for (int r = 1; r < max_dt;) {
        ladder.push_back(r);
        r = std::max(r + 1, static_cast<int>(std::lround(r * opts.ladder_ratio)));
    }
    ladder.push_back(max_dt);
    out.evaluated_bps = evaluate_intervals(bond, ladder, env, mc, opts.case_id);

    const double floor_bps = out.evaluated_bps.at(1);
    if (market_spread_bps < floor_bps - opts.floor_tolerance_bps) {
        out.dt_days = 1;
        out.model_spread_bps = floor_bps;
        out.status = CalibrationStatus::FloorHit;
        return out;
    }

    const int rung = best_interval(out.evaluated_bps, market_spread_bps);
    const auto pos = static_cast<std::size_t>(std::find(ladder.begin(), ladder.end(), rung) - ladder.begin());
    const int lo = pos > 0 ? ladder[pos - 1] : rung;
    const int hi = pos + 1 < ladder.size() ? ladder[pos + 1] : rung;
    std::vector<int> window;
    for (int dt = lo + 1; dt < hi; ++dt)
        if (!out.evaluated_bps.count(dt))
            window.push_back(dt);
    if (!window.empty()) {
        const auto more = evaluate_intervals(bond, window, env, mc, opts.case_id);
        out.evaluated_bps.insert(more.begin(), more.end());
    }
    out.dt_days = best_interval(out.evaluated_bps, market_spread_bps);
    out.model_spread_bps = out.evaluated_bps.at(out.dt_days);
    out.status = CalibrationStatus::Matched;
    return out;
}

FrequencyRecommendation recommend_frequency(std::span<const int> dt_days) {
    if (dt_days.size() < 3)
        throw InputError("frequency recommendation needs at least three calibrated bonds");
    const double n = static_cast<double>(dt_days.size());
    const double mean_all = std::accumulate(dt_days.begin(), dt_days.end(), 0.0) / n;
    double ss = 0.0;
    for (int d : dt_days)
        ss += (d - mean_all) * (d - mean_all);
    const double sd_all = std::sqrt(ss / (n - 1.0));

    FrequencyRecommendation rec;
    for (int d : dt_days)
        (std::abs(d - mean_all) > 2.0 * sd_all ? rec.removed : rec.kept).push_back(d);
    if (rec.kept.size() < 3)
        throw InputError("fewer than three probing intervals remain after outlier removal");
    const double m = static_cast<double>(rec.kept.size());
    rec.mean = std::accumulate(rec.kept.begin(), rec.kept.end(), 0.0) / m;
    double ss_kept = 0.0;
    for (int d : rec.kept)
        ss_kept += (d - rec.mean) * (d - rec.mean);
    rec.sd = std::sqrt(ss_kept / (m - 1.0));
    rec.dt_1sd = static_cast<int>(std::lround(rec.mean + rec.sd));
    rec.dt_2sd = static_cast<int>(std::lround(rec.mean + 2.0 * rec.sd));
    rec.dt_max = *std::max_element(rec.kept.begin(), rec.kept.end());
    return rec;
}

FrequencyRecommendation recommend_frequency(std::span<const FrequencyCalibration> calibrations) {
    std::vector<int> dts;
    for (const auto& c : calibrations)
        if (c.status != CalibrationStatus::Unreachable)
            dts.push_back(c.dt_days);
    return recommend_frequency(dts);
}

std::vector<UnquotedPrice> price_unquoted(const BondSpec& bond, std::span<const int> dt_choices,
                                          const PricingEnv& env, const McConfig& mc, CaseId c,
                                          std::span<const double> recovery_rates) {
    if (dt_choices.empty())
        throw InputError("no probing intervals to price");
    std::vector<double> rrs(recovery_rates.begin(), recovery_rates.end());
    if (rrs.empty())
        rrs.push_back(env.recovery_rate);
    std::vector<GammaProblem> problems;
    std::vector<UnquotedPrice> rows;
    for (double rr : rrs)
        for (int dt : dt_choices) {
            problems.push_back(coupon_problem(env, bond, dt, credit_config(c, rr), mc));
            rows.push_back({rr, dt, {}});
        }
    auto results = solve_gamma_batch(env, problems, mc);
    for (std::size_t k = 0; k < rows.size(); ++k)
        rows[k].result = std::move(results[k]);
    return rows;
}

void write_classification_csv(std::ostream& out, const LiquidityClassification& cls) {
    out << "id,bucket,ttm,yield_bps,curve_yield_bps,spread_bps,label\n";
    out << std::fixed;
    for (const auto& c : cls.bonds)
        out << c.id << ',' << c.bucket << ',' << std::setprecision(4) << c.ttm << ',' << std::setprecision(2)
            << c.yield_bps << ',' << c.curve_yield_bps << ',' << c.spread_bps << ','
            << (c.excluded ? std::string("EXCLUDED") : to_string(c.label)) << (c.stale ? "|STALE" : "") << '\n';
    out << std::defaultfloat;
}

void write_calibration_csv(std::ostream& out, std::span<const FrequencyCalibration> rows) {
    out << "bond,time_bucket,time_to_maturity_years,market_liquidity_spread_bps,model_liquidity_spread_bps,"
           "probing_frequency_days,status\n";
    for (const auto& r : rows)
        out << r.id << ',' << r.bucket << ',' << std::fixed << std::setprecision(2) << r.ttm << std::defaultfloat
            << ',' << std::lround(r.market_spread_bps) << ',' << std::lround(r.model_spread_bps) << ',' << r.dt_days
            << ',' << to_string(r.status) << '\n';
}

void write_recommendation_csv(std::ostream& out, std::span<const UnquotedPrice> rows,
                              const std::optional<FrequencyRecommendation>& rec) {
    out << "distribution_ref,probing_frequency_days,liquidity_spread_bps,liquidity_spread_std_bps,recovery_rate\n";
    for (const auto& r : rows) {
        std::string ref = "custom";
        if (rec) {
            if (r.dt_days == rec->dt_1sd)
                ref = "1 std dev.";
            else if (r.dt_days == rec->dt_2sd)
                ref = "2 std dev.";
            else if (r.dt_days == rec->dt_max)
                ref = "Sample max.";
        }
        out << ref << ',' << r.dt_days << ',';
        if (r.result.ok())
            out << std::lround(r.result.gamma_mean_bps()) << ',' << std::fixed << std::setprecision(2)
                << r.result.gamma_std_bps() << std::defaultfloat;
        else
            out << ',';
        out << ',' << r.recovery_rate << '\n';
    }
}

} // namespace liqspread
