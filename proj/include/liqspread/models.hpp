#pragma once

#include "liqspread/curves.hpp"

namespace liqspread {

/// Two-factor additive Gaussian short rate r = x + y + phi(t).
/// a, b > 0; sigma, eta >= 0 (zero volatility gives the deterministic limit).
struct G2ppParams {
    double a = 0.1;
    double sigma = 0.01;
    double b = 0.1;
    double eta = 0.01;
    double rho = 0.0;

    void validate() const;
};

/// Square-root diffusion for the LGD-rescaled credit spread s = lambda * LGD.
/// Tables label the initial value r0; here it is `s0`.
struct CirParams {
    double kappa = 0.5;
    double theta = 0.02;
    double sigma = 0.1;
    double s0 = 0.01;

    void validate() const;
};

enum class SpreadMode { Deterministic, Stochastic };
enum class DefaultMode { NoDefaults, WithDefaults };

struct CreditConfig {
    double recovery_rate = 0.4;
    SpreadMode spread = SpreadMode::Stochastic;
    DefaultMode defaults = DefaultMode::WithDefaults;
    /// When false the credit factor is dropped from bond prices while the
    /// spread still drives default arrivals.
    bool spread_in_discounting = true;

    double lgd() const { return 1.0 - recovery_rate; }
    void validate() const;
};

/// Exponent of an affine bond price: price = exp(log_a - b_x x - b_y y - b_s s).
struct AffineZcb {
    double log_a = 0.0;
    double b_x = 0.0;
    double b_y = 0.0;
    double b_s = 0.0;

    double log_price(double x, double y, double s) const { return log_a - b_x * x - b_y * y - b_s * s; }
};

/// Integrated G2++ variance V(t, T) of int_t^T (x + y) du.
double g2pp_variance(const G2ppParams& p, double t, double T);

/// Deterministic part of the integrated short rate, int_0^t phi(u) du.
double g2pp_phi_integral(const G2ppParams& p, const DiscountCurve& curve, double t);

AffineZcb g2pp_coefficients(const G2ppParams& p, const DiscountCurve& curve, double t, double T);
double g2pp_zcb(const G2ppParams& p, const DiscountCurve& curve, double t, double T, double x, double y);

AffineZcb cir_coefficients(const CirParams& p, double t, double T);
double cir_zcb(const CirParams& p, double t, double T, double s);

/// Mean path theta + (s0 - theta) e^{-kappa u} and its integral over [t, T].
double cir_mean(const CirParams& p, double u);
double cir_mean_integral(const CirParams& p, double t, double T);

/// Affine coefficients of the defaultable bond price without the liquidity factor.
AffineZcb risky_coefficients(const G2ppParams& g2, const CirParams& cir, const DiscountCurve& curve,
                             const CreditConfig& cfg, double t, double T);

/// e^{-gamma (T - t)} times the defaultable bond price at state (x, y, s).
double risky_zcb(const G2ppParams& g2, const CirParams& cir, const DiscountCurve& curve, const CreditConfig& cfg,
                 double gamma, double t, double T, double x, double y, double s);

/// 2 kappa theta - sigma^2; positive means the origin is unattainable.
double feller_margin(const CirParams& p);

/// Everything the pricing engine needs besides Monte Carlo settings.
struct PricingEnv {
    G2ppParams g2;
    CirParams cir;
    DiscountCurve curve;
    double recovery_rate = 0.4;
};

} // namespace liqspread
