#include "liqspread/spread.hpp"

#include "liqspread/errors.hpp"
#include "liqspread/rng.hpp"
#include "liqspread/roots.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace liqspread {

namespace {

// Budget for one block of fully recorded paths.
constexpr std::size_t kBlockBytes = std::size_t{96} << 20;

std::shared_ptr<const TimeGrid> batch_grid(std::span<const GammaProblem* const> problems, const McConfig& mc) {
    double horizon = 0.0;
    std::vector<double> required;
    for (const auto* pr : problems) {
        horizon = std::max({horizon, pr->liquid.dates.back(), pr->illiquid.dates.back()});
        required.insert(required.end(), pr->illiquid.dates.begin(), pr->illiquid.dates.end());
        required.insert(required.end(), pr->flows.times.begin(), pr->flows.times.end());
        if (pr->liquid.kind != ScheduleKind::Liquid || pr->liquid.dates.size() < 2 ||
            std::abs(pr->liquid.dates[0] * mc.steps_per_year() - 1.0) > 1e-9)
            required.insert(required.end(), pr->liquid.dates.begin(), pr->liquid.dates.end());
        else
            required.push_back(pr->liquid.dates.back());
    }
    return std::make_shared<const TimeGrid>(horizon, mc.steps_per_year(), required);
}

struct ProblemState {
    const GammaProblem* problem = nullptr;
    std::size_t index = 0;
    std::unique_ptr<LookbackValuer> liquid;
    std::unique_ptr<LookbackValuer> illiquid;
    std::vector<double> liquid_values;
    const ProblemState* liquid_source = nullptr;  ///< earlier problem with the same liquid leg
    ScenarioSet compact;
    std::string error;
};

std::vector<double> path_values(const LookbackValuer& valuer, const ScenarioSet& scn,
                                const LookbackValuer::Layout& layout, std::span<const double> gammas, int threads,
                                std::span<const DefaultRecord> defaults = {}) {
    const auto table = valuer.prepare(gammas);
    const std::size_t ng = gammas.size();
    std::vector<double> out(scn.n_paths() * ng);
    detail::parallel_for(scn.n_paths(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p)
            valuer.path_values(scn, layout, table, p, {out.data() + p * ng, ng},
                               defaults.empty() ? nullptr : &defaults[p]);
    });
    return out;
}

OptionValue column_summary(const std::vector<double>& values, std::size_t ng, std::size_t j) {
    std::vector<double> col(values.size() / ng);
    for (std::size_t p = 0; p < col.size(); ++p)
        col[p] = values[p * ng + j];
    return summarize(col);
}

RepeatEstimate solve_repeat(const ProblemState& st, const SolverSettings& solver, int threads) {
    const auto& valuer = *st.illiquid;
    const auto layout = valuer.layout_for(st.compact);
    const OptionValue liquid = summarize(st.liquid_values);
    const double log_liquid = std::log(liquid.value);
    const double bond0 = valuer.bond_value(0.0);
    if (!(liquid.value > 0.0) || !(bond0 > 0.0))
        throw NumericalError("liquid option or bond value is not positive");

    auto g_at = [&](double option_value, double gamma) {
        return std::log(option_value) - log_liquid - std::log(valuer.bond_value(gamma) / bond0);
    };
    OptionValue at_root{};
    auto f_and_df = [&](double gamma) {
        const double h = solver.fd_step;
        const double gs[3] = {gamma - h, gamma, gamma + h};
        const auto vals = path_values(valuer, st.compact, layout, gs, threads);
        const auto lo = column_summary(vals, 3, 0);
        const auto mid = column_summary(vals, 3, 1);
        const auto hi = column_summary(vals, 3, 2);
        at_root = mid;
        const double g = g_at(mid.value, gamma);
        const double dg = (g_at(hi.value, gamma + h) - g_at(lo.value, gamma - h)) / (2.0 * h);
        return std::pair{g, dg};
    };

    RepeatEstimate est;
    est.liquid = liquid;
    RootResult root;
    try {
        root = safeguarded_newton(f_and_df, solver.lo, solver.hi, solver.x_tol, solver.f_tol, solver.max_iter);
    } catch (const NumericalError&) {
        const double g_lo = f_and_df(solver.lo).first;
        const double g_hi = f_and_df(solver.hi).first;
        std::ostringstream msg;
        msg << "no liquidity spread in [" << solver.lo * 1e4 << ", " << solver.hi * 1e4
            << "] bps: option ratio / bond ratio = " << std::exp(g_lo) << " at the lower end, " << std::exp(g_hi)
            << " at the upper end";
        throw NumericalError(msg.str());
    }
    // re-evaluate at the accepted root for consistent diagnostics
    const auto [g, dg] = f_and_df(root.root);
    est.gamma = root.root;
    est.residual = g;
    est.slope = dg;
    est.iterations = root.iterations;
    est.illiquid = at_root;
    return est;
}

bool same_liquid_leg(const GammaProblem& a, const GammaProblem& b) {
    const auto& ca = a.credit;
    const auto& cb = b.credit;
    const bool defaults = ca.defaults == DefaultMode::WithDefaults;
    return ca.spread == cb.spread && ca.defaults == cb.defaults && ca.spread_in_discounting == cb.spread_in_discounting &&
           (!defaults || ca.recovery_rate == cb.recovery_rate) && (!defaults || a.payoff == b.payoff) &&
           a.flows.times == b.flows.times && a.flows.amounts == b.flows.amounts && a.liquid.dates == b.liquid.dates;
}

std::size_t block_size(const McConfig& mc, const TimeGrid& grid) {
    const std::size_t per_path = grid.size() * sizeof(PathState);
    const std::size_t cap = std::max<std::size_t>(8, kBlockBytes / std::max<std::size_t>(per_path, 1));
    return std::max<std::size_t>(1, std::min(mc.block_paths, cap));
}

void run_group(const PricingEnv& env, std::vector<ProblemState*>& group, SpreadMode mode,
               std::shared_ptr<const TimeGrid> grid, const McConfig& mc, int repeat,
               std::vector<std::vector<RepeatEstimate>>& estimates, const SolverSettings& solver) {
    McConfig mcr = mc;
    mcr.seed = mix_seed(mc.seed, static_cast<std::uint64_t>(repeat));
    const std::size_t block = block_size(mc, *grid);
    std::vector<std::size_t> live;
    for (std::size_t k = 0; k < group.size(); ++k) {
        auto* st = group[k];
        if (!st->error.empty())
            continue;
        st->liquid_values.assign(mc.n_paths, 0.0);
        st->compact = ScenarioSet{};
        live.push_back(k);
    }
    if (live.empty())
        return;
    // default records depend on (defaults flag, lgd) only
    std::map<std::pair<bool, double>, std::vector<DefaultRecord>> default_cache;
    std::vector<LookbackValuer::Layout> liquid_layouts(group.size());
    bool layouts_ready = false;
    for (std::size_t first = 0; first < mc.n_paths; first += block) {
        SimulationOptions opts;
        opts.lgd = 1.0;
        opts.spread_mode = mode;
        opts.first_path = first;
        opts.n_paths = std::min(block, mc.n_paths - first);
        const auto full = simulate(env.g2, env.cir, env.curve, grid, mcr, opts);
        default_cache.clear();
        if (!layouts_ready) {
            for (auto k : live)
                liquid_layouts[k] = group[k]->liquid->layout_for(full);
            layouts_ready = true;
        }
        for (auto k : live) {
            auto* st = group[k];
            const auto& cfg = st->problem->credit;
            const bool with = cfg.defaults == DefaultMode::WithDefaults;
            const auto key = std::pair{with, with ? cfg.lgd() : 0.0};
            auto it = default_cache.find(key);
            if (it == default_cache.end())
                it = default_cache.emplace(key, find_defaults(full, cfg)).first;
            const auto& defaults = it->second;
            if (st->liquid_source && st->liquid_source->error.empty()) {
                const auto& src = st->liquid_source->liquid_values;
                std::copy(src.begin() + static_cast<long>(first), src.begin() + static_cast<long>(first + opts.n_paths),
                          st->liquid_values.begin() + static_cast<long>(first));
            } else {
                const double zero[1] = {0.0};
                const auto vals = path_values(*st->liquid, full, liquid_layouts[k], zero, mc.threads, defaults);
                std::copy(vals.begin(), vals.end(), st->liquid_values.begin() + static_cast<long>(first));
            }
            st->compact.append(full.restrict_to(st->illiquid->required_nodes(), defaults));
        }
    }
    for (auto k : live) {
        auto* st = group[k];
        try {
            estimates[st->index].push_back(solve_repeat(*st, solver, mc.threads));
        } catch (const std::exception& e) {
            st->error = e.what();
        }
        st->compact = ScenarioSet{};
    }
}

} // namespace

std::vector<LiquiditySpreadResult> solve_gamma_batch(const PricingEnv& env, std::span<const GammaProblem> problems,
                                                     const McConfig& mc, const SolverSettings& solver) {
    mc.validate();
    env.g2.validate();
    env.cir.validate();
    std::vector<LiquiditySpreadResult> results(problems.size());
    if (problems.empty())
        return results;

    std::vector<ProblemState> states(problems.size());
    std::vector<const GammaProblem*> ptrs;
    for (const auto& pr : problems)
        ptrs.push_back(&pr);
    const auto grid = batch_grid(ptrs, mc);
    for (std::size_t k = 0; k < problems.size(); ++k) {
        auto& st = states[k];
        st.problem = &problems[k];
        st.index = k;
        try {
            const auto& pr = problems[k];
            st.liquid = std::make_unique<LookbackValuer>(env, pr.credit, pr.payoff, pr.flows, grid, pr.liquid);
            st.illiquid = std::make_unique<LookbackValuer>(env, pr.credit, pr.payoff, pr.flows, grid, pr.illiquid);
        } catch (const std::exception& e) {
            st.error = e.what();
        }
    }
    for (std::size_t k = 0; k < problems.size(); ++k)
        for (std::size_t j = 0; j < k; ++j)
            if (same_liquid_leg(problems[j], problems[k]) && !states[j].liquid_source) {
                states[k].liquid_source = &states[j];
                break;
            }
    std::vector<ProblemState*> stochastic, deterministic;
    for (auto& st : states)
        (st.problem->credit.spread == SpreadMode::Stochastic ? stochastic : deterministic).push_back(&st);

    std::vector<std::vector<RepeatEstimate>> estimates(problems.size());
    for (int r = 0; r < mc.n_repeats; ++r) {
        if (!deterministic.empty())
            run_group(env, deterministic, SpreadMode::Deterministic, grid, mc, r, estimates, solver);
        if (!stochastic.empty())
            run_group(env, stochastic, SpreadMode::Stochastic, grid, mc, r, estimates, solver);
    }

    for (std::size_t k = 0; k < problems.size(); ++k) {
        auto& res = results[k];
        res.n_paths = mc.n_paths;
        if (!states[k].error.empty()) {
            res.error = states[k].error;
            continue;
        }
        res.repeats = std::move(estimates[k]);
        double sum = 0.0;
        for (const auto& e : res.repeats) {
            res.gammas.push_back(e.gamma);
            sum += e.gamma;
            res.max_residual = std::max(res.max_residual, std::abs(e.residual));
        }
        const double m = static_cast<double>(res.gammas.size());
        res.gamma_mean = sum / m;
        if (res.gammas.size() > 1) {
            double ss = 0.0;
            for (double g : res.gammas)
                ss += (g - res.gamma_mean) * (g - res.gamma_mean);
            res.gamma_std = std::sqrt(ss / (m - 1.0));
        }
    }
    return results;
}

GammaProblem zc_problem(double T, int dt_days, CaseId c, const McConfig& mc, double recovery_rate,
                        PayoffKind payoff) {
    GammaProblem pr;
    pr.credit = credit_config(c, recovery_rate);
    pr.payoff = payoff;
    pr.flows = TimedCashflows{{T}, {1.0}};
    pr.liquid = liquid_schedule(T, mc.steps_per_year());
    pr.illiquid = illiquid_schedule(T, dt_days);
    return pr;
}

GammaProblem coupon_problem(const PricingEnv& env, const BondSpec& bond, int dt_days, const CreditConfig& credit,
                            const McConfig& mc) {
    const Date valuation = env.curve.reference_date();
    const auto schedule = generate_schedule(bond, valuation);
    GammaProblem pr;
    pr.credit = credit;
    pr.payoff = PayoffKind::Recovery;
    pr.flows = to_times(schedule, valuation);
    for (auto& a : pr.flows.amounts)
        a /= bond.notional;
    const double T = pr.flows.times.back();
    pr.liquid = liquid_schedule(T, mc.steps_per_year());
    pr.illiquid = illiquid_schedule(T, dt_days);
    return pr;
}

namespace {

LiquiditySpreadResult single(const PricingEnv& env, GammaProblem pr, const McConfig& mc) {
    const GammaProblem one[1] = {std::move(pr)};
    auto res = solve_gamma_batch(env, one, mc);
    if (!res[0].ok())
        throw NumericalError(res[0].error);
    return res[0];
}

} // namespace

LiquiditySpreadResult solve_gamma_zc(const PricingEnv& env, double T, int dt_days, CaseId c, const McConfig& mc) {
    return single(env, zc_problem(T, dt_days, c, mc, env.recovery_rate), mc);
}

LiquiditySpreadResult solve_gamma_coupon(const PricingEnv& env, const BondSpec& bond, int dt_days, CaseId c,
                                         const McConfig& mc) {
    return single(env, coupon_problem(env, bond, dt_days, credit_config(c, env.recovery_rate), mc), mc);
}

std::vector<SweepRow> sweep(const PricingEnv& env, std::span<const double> maturities,
                            std::span<const int> dt_days, std::span<const CaseId> cases, const McConfig& mc) {
    if (maturities.empty() || dt_days.empty() || cases.empty())
        throw InputError("sweep needs maturities, probing intervals and cases");
    std::vector<SweepRow> rows;
    for (double T : maturities) {
        std::vector<GammaProblem> problems;
        std::vector<SweepRow> cells;
        for (int dt : dt_days)
            for (CaseId c : cases) {
                SweepRow row;
                row.maturity = T;
                row.dt_days = dt;
                row.case_id = c;
                try {
                    problems.push_back(zc_problem(T, dt, c, mc, env.recovery_rate));
                } catch (const std::exception& e) {
                    row.result.error = e.what();
                }
                cells.push_back(std::move(row));
            }
        std::vector<LiquiditySpreadResult> results;
        try {
            results = solve_gamma_batch(env, problems, mc);
        } catch (const std::exception& e) {
            results.assign(problems.size(), LiquiditySpreadResult{});
            for (auto& r : results)
                r.error = e.what();
        }
        std::size_t k = 0;
        for (auto& cell : cells) {
            if (cell.result.error.empty())
                cell.result = std::move(results[k++]);
            rows.push_back(std::move(cell));
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, int repeats) {
    out << "maturity_years,dt_days,case,gamma_bps,gamma_std_bps,n_paths,m\n";
    for (const auto& row : rows) {
        out << std::setprecision(10) << row.maturity << ',' << row.dt_days << ',' << case_number(row.case_id) << ',';
        if (row.result.ok())
            out << std::fixed << std::setprecision(2) << row.result.gamma_mean_bps() << ','
                << row.result.gamma_std_bps() << std::defaultfloat;
        else
            out << ',';
        out << ',' << row.result.n_paths << ',' << repeats << '\n';
    }
}

} // namespace liqspread
