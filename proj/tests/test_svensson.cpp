#include "fixtures.hpp"

#include "liqspread/errors.hpp"
#include "liqspread/svensson.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace liqspread;

TEST(Svensson, ShortAndLongLimits) {
    const SvenssonParams p{0.04, -0.01, 0.02, 0.01, 1.5, 8.0};
    EXPECT_NEAR(svensson_yield(p, 0.0), 0.03, 1e-15);
    EXPECT_NEAR(svensson_yield(p, 1e-9), 0.03, 1e-10);
    EXPECT_NEAR(svensson_yield(p, 1e5), 0.04, 1e-4);
    EXPECT_NEAR(svensson_discount(p, 2.0), std::exp(-2.0 * svensson_yield(p, 2.0)), 1e-15);
}

TEST(Svensson, YieldFormula) {
    const SvenssonParams p{0.04, -0.01, 0.02, 0.01, 1.5, 8.0};
    const double t = 3.0;
    const double x1 = t / 1.5, x2 = t / 8.0;
    const double f1 = (1 - std::exp(-x1)) / x1;
    const double f2 = (1 - std::exp(-x2)) / x2;
    EXPECT_NEAR(svensson_yield(p, t), 0.04 - 0.01 * f1 + 0.02 * (f1 - std::exp(-x1)) + 0.01 * (f2 - std::exp(-x2)),
                1e-15);
}

TEST(Svensson, RecoversPlantedCurve) {
    auto issuer = fixtures::make_issuer(0.0);
    const auto fit = fit_svensson(issuer.quotes, issuer.valuation);
    // quotes carry at most 1 bp of noise
    for (double t : {0.5, 1.0, 2.0, 3.0, 5.0, 8.0})
        EXPECT_NEAR(svensson_yield(fit.params, t), svensson_yield(issuer.curve, t), 1.5e-4) << t;
    EXPECT_GT(fit.starts, 1);
}

TEST(Svensson, ExactPricesFitExactly) {
    auto issuer = fixtures::make_issuer(0.0);
    for (auto& q : issuer.quotes) {
        const double mid = fixtures::shifted_dirty_price(q.bond, issuer.curve, issuer.valuation, 0.0) -
                           accrued_interest(q.bond, issuer.valuation);
        q.bid_price = q.ask_price = mid;
    }
    const auto fit = fit_svensson(issuer.quotes, issuer.valuation);
    EXPECT_LT(fit.objective, 1e-8);
    for (double t : {0.5, 2.0, 8.0})
        EXPECT_NEAR(svensson_yield(fit.params, t), svensson_yield(issuer.curve, t), 2e-6) << t;
}

TEST(Svensson, RejectsThinInput) {
    auto issuer = fixtures::make_issuer();
    const std::vector<BondQuote> few(issuer.quotes.begin(), issuer.quotes.begin() + 5);
    EXPECT_THROW(fit_svensson(few, issuer.valuation), InputError);
    std::vector<BondQuote> same(6, issuer.quotes[0]);
    EXPECT_THROW(fit_svensson(same, issuer.valuation), InputError);
}
