#include "fixtures.hpp"

#include "liqspread/io.hpp"

#include <cmath>

namespace fixtures {

using namespace liqspread;

std::string source_path(const std::string& relative) {
    return std::string(LIQSPREAD_SOURCE_DIR) + "/" + relative;
}

double shifted_dirty_price(const BondSpec& bond, const SvenssonParams& curve, Date valuation, double shift) {
    const auto flows = to_times(generate_schedule(bond, valuation), valuation);
    double v = 0.0;
    for (std::size_t i = 0; i < flows.times.size(); ++i) {
        const double t = flows.times[i];
        v += flows.amounts[i] * std::exp(-(svensson_yield(curve, t) + shift) * t);
    }
    return v;
}

Issuer make_issuer(double planted_bps) {
    Issuer is;
    is.valuation = parse_date("2024-05-31");
    is.curve = SvenssonParams{0.034, -0.006, 0.012, -0.008, 1.4, 7.5};

    // months to maturity, annual coupon, role: 'r' representative, 'l' liquid, 'i' illiquid
    struct Row {
        int months;
        double coupon;
        char role;
    };
    const std::vector<Row> rows{
        {4, 0.010, 'r'},   {5, 0.015, 'r'},   {5, 0.020, 'r'},   {4, 0.030, 'i'},                       // B
        {7, 0.020, 'r'},   {8, 0.025, 'r'},   {8, 0.030, 'r'},   {7, 0.045, 'i'},                       // C
        {10, 0.015, 'r'},  {11, 0.020, 'r'},  {11, 0.030, 'r'},  {10, 0.040, 'l'}, {11, 0.050, 'i'},    // D
        {14, 0.020, 'r'},  {16, 0.025, 'r'},  {17, 0.035, 'r'},  {15, 0.040, 'l'}, {16, 0.045, 'i'},    // E
        {20, 0.025, 'r'},  {24, 0.030, 'r'},  {28, 0.035, 'r'},  {22, 0.040, 'l'}, {26, 0.050, 'i'},    // F
        {32, 0.030, 'r'},  {36, 0.035, 'r'},  {40, 0.040, 'r'},  {38, 0.050, 'i'},                       // G
        {41, 0.025, 'i'},
        {45, 0.030, 'r'},  {50, 0.035, 'r'},  {57, 0.040, 'r'},  {54, 0.050, 'i'},                       // H
        {66, 0.030, 'r'},  {78, 0.035, 'r'},  {86, 0.040, 'r'},  {80, 0.045, 'i'},                       // I
        {95, 0.035, 'r'},  {102, 0.030, 'r'}, {110, 0.040, 'r'}, {118, 0.045, 'i'},                      // L
    };

    int n = 0;
    for (const auto& r : rows) {
        ++n;
        BondQuote q;
        q.id = "B" + std::to_string(n);
        q.bond.id = q.id;
        q.bond.maturity_date = add_months(is.valuation, r.months);
        q.bond.issue_date = add_months(q.bond.maturity_date, -12 * 10);
        q.bond.coupon_rate = r.coupon;
        q.bond.frequency_months = 6;
        // deterministic noise in [-1, 1] bp for liquid names
        const double noise = r.role == 'i' ? 0.0 : std::sin(1.7 * n) * 1e-4;
        const double shift = r.role == 'i' ? planted_bps * 1e-4 : noise;
        const double dirty = shifted_dirty_price(q.bond, is.curve, is.valuation, shift);
        const double mid = dirty - accrued_interest(q.bond, is.valuation);
        const double half = r.role == 'r' ? 0.01 : r.role == 'l' ? 0.08 : 0.25;
        q.bid_price = mid - half;
        q.ask_price = mid + half;
        q.volume = r.role == 'i' ? 0.0 : 1e6 * (1 + n % 3);
        q.as_of = r.role == 'i' ? parse_date("2024-05-20") : is.valuation;
        if (r.role == 'i')
            is.illiquid.insert(q.id);
        is.quotes.push_back(std::move(q));
    }
    return is;
}

PricingEnv italy_env() {
    return PricingEnv{G2ppParams{0.0195, 0.0062, 0.0193, 0.0062, 0.0962}, CirParams{0.0018, 0.01, 0.005, 0.0003},
                      read_curve_file(source_path("data/bund_curve_2024-05-31.csv"), parse_date("2024-05-31")), 0.4};
}

BondSpec italy_bond() {
    BondSpec b;
    b.id = "ITALY-4.5-2027";
    b.issue_date = parse_date("2023-11-15");
    b.maturity_date = parse_date("2027-11-15");
    b.coupon_rate = 0.045;
    b.frequency_months = 6;
    b.day_count = DayCount{DayCountConvention::Thirty360, BusinessDayAdjustment::ModifiedFollowing};
    return b;
}

PricingEnv bb_env() {
    return PricingEnv{G2ppParams{0.0693, 0.0116, 0.0531, 0.0057, 0.1209}, CirParams{0.7288, 0.0224, 0.1689, 0.0054},
                      read_curve_file(source_path("data/riskfree_curve_2023-12-29.csv")), 0.4};
}

} // namespace fixtures
