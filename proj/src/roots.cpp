#include "liqspread/roots.hpp"

#include "liqspread/errors.hpp"

#include <cmath>
#include <sstream>

namespace liqspread {

RootResult safeguarded_newton(const std::function<std::pair<double, double>(double)>& f_and_df,
                              double lo, double hi, double x_tol, double f_tol, int max_iter) {
    auto [f_lo, df_lo] = f_and_df(lo);
    if (std::abs(f_lo) <= f_tol)
        return {lo, f_lo, 0};
    auto [f_hi, df_hi] = f_and_df(hi);
    if (std::abs(f_hi) <= f_tol)
        return {hi, f_hi, 0};
    if (!std::isfinite(f_lo) || !std::isfinite(f_hi) || (f_lo > 0) == (f_hi > 0)) {
        std::ostringstream msg;
        msg << "no sign change on [" << lo << ", " << hi << "]: f(lo)=" << f_lo << ", f(hi)=" << f_hi;
        throw NumericalError(msg.str());
    }
    const bool increasing = f_hi > 0;
    // start from the endpoint with the smaller residual
    double x = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
    auto [fx, dfx] = std::abs(f_lo) < std::abs(f_hi) ? std::pair{f_lo, df_lo} : std::pair{f_hi, df_hi};
    double dx_old = hi - lo;
    for (int it = 1; it <= max_iter; ++it) {
        double next = 0.0;
        const bool newton_ok = dfx != 0.0 && std::isfinite(dfx);
        const double newton = newton_ok ? x - fx / dfx : 0.0;
        if (newton_ok && newton > lo && newton < hi && std::abs(newton - x) < 0.5 * std::abs(dx_old)) {
            next = newton;
        } else {
            next = 0.5 * (lo + hi);
        }
        dx_old = next - x;
        x = next;
        std::tie(fx, dfx) = f_and_df(x);
        if (!std::isfinite(fx))
            throw NumericalError("non-finite function value during root search");
        if (std::abs(fx) <= f_tol)
            return {x, fx, it};
        if ((fx > 0) == increasing)
            hi = x;
        else
            lo = x;
        if (std::abs(dx_old) <= x_tol && std::abs(hi - lo) <= 2 * x_tol)
            return {x, fx, it};
        if (hi - lo <= x_tol)
            return {x, fx, it};
    }
    return {x, fx, max_iter};
}

} // namespace liqspread
