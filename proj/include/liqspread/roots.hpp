#pragma once

#include <functional>

namespace liqspread {

struct RootResult {
    double root = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Newton iteration kept inside a sign-changing bracket; falls back to
/// bisection whenever the Newton step leaves the bracket or stalls.
/// `f_and_df` returns {f(x), f'(x)}. Stops when |f| <= f_tol or the step
/// is below x_tol. Throws NumericalError if [lo, hi] does not bracket a root.
RootResult safeguarded_newton(const std::function<std::pair<double, double>(double)>& f_and_df,
                              double lo, double hi, double x_tol, double f_tol, int max_iter = 100);

} // namespace liqspread
