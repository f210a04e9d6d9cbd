#include "liqspread/models.hpp"

#include "liqspread/errors.hpp"

#include <cmath>

namespace liqspread {

namespace {

void check_order(double t, double T) {
    if (!(t >= 0.0) || !(T >= t))
        throw InputError("bond pricing requires 0 <= t <= T");
}

// (1 - e^{-k tau}) / k
double b_factor(double k, double tau) {
    return -std::expm1(-k * tau) / k;
}

} // namespace

void G2ppParams::validate() const {
    if (!(a > 0.0) || !(b > 0.0))
        throw InputError("G2++ mean reversions a, b must be positive");
    if (!(sigma >= 0.0) || !(eta >= 0.0))
        throw InputError("G2++ volatilities must be nonnegative");
    if (!(std::abs(rho) <= 1.0))
        throw InputError("G2++ correlation must lie in [-1, 1]");
}

void CirParams::validate() const {
    if (!(kappa > 0.0) || !(theta > 0.0))
        throw InputError("CIR kappa and theta must be positive");
    if (!(sigma >= 0.0))
        throw InputError("CIR sigma must be nonnegative");
    if (!(s0 >= 0.0))
        throw InputError("CIR initial spread must be nonnegative");
}

void CreditConfig::validate() const {
    if (!(recovery_rate >= 0.0) || !(recovery_rate < 1.0))
        throw InputError("recovery rate must lie in [0, 1)");
}

double g2pp_variance(const G2ppParams& p, double t, double T) {
    check_order(t, T);
    const double tau = T - t;
    if (tau == 0.0)
        return 0.0;
    const double a = p.a, b = p.b;
    // tau - 2 B_a + B_{2a}, written with expm1 to survive small tau
    auto single = [tau](double k) {
        return tau - 2.0 * b_factor(k, tau) + b_factor(2.0 * k, tau);
    };
    const double cross = tau - b_factor(a, tau) - b_factor(b, tau) + b_factor(a + b, tau);
    return p.sigma * p.sigma / (a * a) * single(a) + p.eta * p.eta / (b * b) * single(b) +
           2.0 * p.rho * p.sigma * p.eta / (a * b) * cross;
}

double g2pp_phi_integral(const G2ppParams& p, const DiscountCurve& curve, double t) {
    return -curve.log_discount(t) + 0.5 * g2pp_variance(p, 0.0, t);
}

AffineZcb g2pp_coefficients(const G2ppParams& p, const DiscountCurve& curve, double t, double T) {
    check_order(t, T);
    AffineZcb c;
    if (T == t)
        return c;
    c.log_a = curve.log_discount(T) - curve.log_discount(t) +
              0.5 * (g2pp_variance(p, t, T) - g2pp_variance(p, 0.0, T) + g2pp_variance(p, 0.0, t));
    c.b_x = b_factor(p.a, T - t);
    c.b_y = b_factor(p.b, T - t);
    return c;
}

double g2pp_zcb(const G2ppParams& p, const DiscountCurve& curve, double t, double T, double x, double y) {
    const auto c = g2pp_coefficients(p, curve, t, T);
    if (t == 0.0 && x == 0.0 && y == 0.0)
        return curve.discount(T);
    return std::exp(c.log_price(x, y, 0.0));
}

AffineZcb cir_coefficients(const CirParams& p, double t, double T) {
    check_order(t, T);
    AffineZcb c;
    const double tau = T - t;
    if (tau == 0.0)
        return c;
    if (p.sigma == 0.0) {
        // deterministic ODE ds = kappa (theta - s) dt
        const double bk = b_factor(p.kappa, tau);
        c.b_s = bk;
        c.log_a = -p.theta * (tau - bk);
        return c;
    }
    const double h = std::sqrt(p.kappa * p.kappa + 2.0 * p.sigma * p.sigma);
    const double em1 = std::expm1(h * tau);
    c.b_s = 2.0 * em1 / (2.0 * h + (p.kappa + h) * em1);
    // log_a = -kappa theta int_0^tau B(u) du
    const double r = 2.0 * p.sigma * p.sigma / ((h + p.kappa) * (h + p.kappa));
    const double tail = r > 0.0 ? (1.0 + r) / (r * h) * (std::log1p(r) - std::log1p(r * std::exp(-h * tau)))
                                : -std::expm1(-h * tau) / h;
    c.log_a = -p.kappa * p.theta * 2.0 / (p.kappa + h) * (tau - tail);
    return c;
}

double cir_zcb(const CirParams& p, double t, double T, double s) {
    if (!(s >= 0.0))
        throw InputError("cir_zcb: spread must be nonnegative");
    const auto c = cir_coefficients(p, t, T);
    return std::exp(c.log_price(0.0, 0.0, s));
}

double cir_mean(const CirParams& p, double u) {
    return p.theta + (p.s0 - p.theta) * std::exp(-p.kappa * u);
}

double cir_mean_integral(const CirParams& p, double t, double T) {
    check_order(t, T);
    return p.theta * (T - t) + (p.s0 - p.theta) * std::exp(-p.kappa * t) * b_factor(p.kappa, T - t);
}

AffineZcb risky_coefficients(const G2ppParams& g2, const CirParams& cir, const DiscountCurve& curve,
                             const CreditConfig& cfg, double t, double T) {
    AffineZcb c = g2pp_coefficients(g2, curve, t, T);
    if (!cfg.spread_in_discounting)
        return c;
    if (cfg.spread == SpreadMode::Stochastic) {
        const auto s = cir_coefficients(cir, t, T);
        c.log_a += s.log_a;
        c.b_s = s.b_s;
    } else {
        c.log_a -= cir_mean_integral(cir, t, T);
    }
    return c;
}

double risky_zcb(const G2ppParams& g2, const CirParams& cir, const DiscountCurve& curve, const CreditConfig& cfg,
                 double gamma, double t, double T, double x, double y, double s) {
    if (!std::isfinite(gamma))
        throw InputError("risky_zcb: gamma must be finite");
    const auto c = risky_coefficients(g2, cir, curve, cfg, t, T);
    return std::exp(-gamma * (T - t) + c.log_price(x, y, s));
}

double feller_margin(const CirParams& p) {
    return 2.0 * p.kappa * p.theta - p.sigma * p.sigma;
}

} // namespace liqspread
