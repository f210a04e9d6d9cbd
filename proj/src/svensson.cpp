#include "liqspread/svensson.hpp"

#include "liqspread/errors.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <set>

namespace liqspread {

namespace {

// (1 - e^{-x}) / x, stable near 0
double loading(double x) {
    if (std::abs(x) < 1e-8)
        return 1.0 - 0.5 * x;
    return -std::expm1(-x) / x;
}

struct Instrument {
    TimedCashflows flows;
    double price = 0.0;
    double sqrt_weight = 1.0;
};

using Vec6 = Eigen::Matrix<double, 6, 1>;

SvenssonParams unpack(const Vec6& v) {
    return {v[0], v[1], v[2], v[3], std::exp(v[4]), std::exp(v[5])};
}

Eigen::VectorXd residuals(const std::vector<Instrument>& insts, const Vec6& v) {
    const SvenssonParams p = unpack(v);
    Eigen::VectorXd r(static_cast<Eigen::Index>(insts.size()));
    for (std::size_t i = 0; i < insts.size(); ++i)
        r[static_cast<Eigen::Index>(i)] = insts[i].sqrt_weight * (svensson_price(p, insts[i].flows) - insts[i].price);
    return r;
}

// Levenberg-Marquardt on (beta0..beta3, ln tau1, ln tau2)
Vec6 levenberg_marquardt(const std::vector<Instrument>& insts, Vec6 v, double& objective) {
    Eigen::VectorXd r = residuals(insts, v);
    double f = r.squaredNorm();
    double mu = 1e-3;
    const auto n = static_cast<Eigen::Index>(insts.size());
    for (int iter = 0; iter < 500; ++iter) {
        Eigen::MatrixXd jac(n, 6);
        for (int k = 0; k < 6; ++k) {
            const double h = 1e-6 * std::max(1.0, std::abs(v[k])) * (k < 4 ? 0.01 : 1.0);
            Vec6 up = v, dn = v;
            up[k] += h;
            dn[k] -= h;
            jac.col(k) = (residuals(insts, up) - residuals(insts, dn)) / (2 * h);
        }
        const Eigen::Matrix<double, 6, 6> jtj = jac.transpose() * jac;
        const Vec6 grad = jac.transpose() * r;
        bool improved = false;
        for (int tries = 0; tries < 30; ++tries) {
            Eigen::Matrix<double, 6, 6> a = jtj;
            for (int k = 0; k < 6; ++k)
                a(k, k) += mu * std::max(jtj(k, k), 1e-12);
            const Vec6 step = a.ldlt().solve(-grad);
            Vec6 trial = v + step;
            trial[4] = std::clamp(trial[4], std::log(0.05), std::log(50.0));
            trial[5] = std::clamp(trial[5], std::log(0.05), std::log(50.0));
            const Eigen::VectorXd r_trial = residuals(insts, trial);
            const double f_trial = r_trial.squaredNorm();
            if (std::isfinite(f_trial) && f_trial < f) {
                const double rel = (f - f_trial) / std::max(f, 1e-300);
                v = trial;
                r = r_trial;
                f = f_trial;
                mu = std::max(mu / 3.0, 1e-12);
                improved = true;
                if (rel < 1e-14 || step.norm() < 1e-14) {
                    objective = f;
                    return v;
                }
                break;
            }
            mu *= 4.0;
        }
        if (!improved)
            break;
    }
    objective = f;
    return v;
}

} // namespace

double svensson_yield(const SvenssonParams& p, double t) {
    if (t < 0.0)
        throw InputError("svensson_yield: negative maturity");
    const double x1 = t / p.tau1;
    const double x2 = t / p.tau2;
    const double l1 = loading(x1);
    const double l2 = loading(x2);
    return p.beta0 + p.beta1 * l1 + p.beta2 * (l1 - std::exp(-x1)) + p.beta3 * (l2 - std::exp(-x2));
}

double svensson_discount(const SvenssonParams& p, double t) {
    return std::exp(-svensson_yield(p, t) * t);
}

double svensson_price(const SvenssonParams& p, const TimedCashflows& flows) {
    double price = 0.0;
    for (std::size_t i = 0; i < flows.times.size(); ++i)
        price += flows.amounts[i] * svensson_discount(p, flows.times[i]);
    return price;
}

SvenssonFit fit_svensson(std::span<const BondQuote> quotes, Date valuation_date, std::span<const double> weights) {
    if (quotes.size() < 6)
        throw InputError("fit_svensson: need at least 6 quotes");
    if (!weights.empty() && weights.size() != quotes.size())
        throw InputError("fit_svensson: weights size mismatch");
    std::set<long> maturities;
    std::vector<Instrument> insts;
    double short_yield = 0.0, long_yield = 0.0, short_t = 1e9, long_t = -1.0;
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        const auto& q = quotes[i];
        Instrument inst;
        inst.flows = to_times(generate_schedule(q.bond, valuation_date), valuation_date);
        inst.price = q.mid() + accrued_interest(q.bond, valuation_date);
        const double y = bond_yield(inst.price, inst.flows);
        const double w = weights.empty() ? 1.0 / macaulay_duration(y, inst.flows) : weights[i];
        if (!(w >= 0.0) || !std::isfinite(w))
            throw InputError("fit_svensson: invalid weight for " + q.id);
        inst.sqrt_weight = std::sqrt(w);
        const double t_last = inst.flows.times.back();
        if (t_last < short_t) {
            short_t = t_last;
            short_yield = y;
        }
        if (t_last > long_t) {
            long_t = t_last;
            long_yield = y;
        }
        maturities.insert(day_number(q.bond.maturity_date));
        insts.push_back(std::move(inst));
    }
    if (maturities.size() < 3)
        throw InputError("fit_svensson: need at least 3 distinct maturities");

    SvenssonFit best;
    best.objective = std::numeric_limits<double>::infinity();
    constexpr std::array<double, 3> tau1s{0.5, 2.0, 5.0};
    constexpr std::array<double, 3> tau2s{5.0, 10.0, 15.0};
    for (double t1 : tau1s) {
        for (double t2 : tau2s) {
            Vec6 v;
            v << long_yield, short_yield - long_yield, 0.0, 0.0, std::log(t1), std::log(t2);
            double obj = 0.0;
            v = levenberg_marquardt(insts, v, obj);
            ++best.starts;
            if (std::isfinite(obj) && obj < best.objective) {
                best.objective = obj;
                best.params = unpack(v);
            }
        }
    }
    if (!std::isfinite(best.objective))
        throw NumericalError("fit_svensson: objective not finite at any start");
    return best;
}

} // namespace liqspread
