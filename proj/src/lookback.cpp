#include "liqspread/lookback.hpp"

#include "liqspread/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace liqspread {

namespace {

constexpr double kDateTol = 1e-9;
constexpr std::size_t kMaxGammas = 8;

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out)
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

} // namespace

CaseId parse_case(std::string_view text) {
    auto t = lower(text);
    if (t.rfind("case", 0) == 0)
        t = t.substr(4);
    if (t == "1")
        return CaseId::Case1;
    if (t == "2")
        return CaseId::Case2;
    if (t == "3")
        return CaseId::Case3;
    if (t == "4")
        return CaseId::Case4;
    throw InputError("unknown case '" + std::string(text) + "' (expected 1-4)");
}

int case_number(CaseId c) {
    return static_cast<int>(c);
}

CreditConfig credit_config(CaseId c, double recovery_rate) {
    CreditConfig cfg;
    cfg.recovery_rate = recovery_rate;
    cfg.spread = (c == CaseId::Case2 || c == CaseId::Case4) ? SpreadMode::Stochastic : SpreadMode::Deterministic;
    cfg.defaults = (c == CaseId::Case3 || c == CaseId::Case4) ? DefaultMode::WithDefaults : DefaultMode::NoDefaults;
    cfg.validate();
    return cfg;
}

ProbingSchedule illiquid_schedule(double T, int dt_days) {
    if (!(T > 0.0))
        throw InputError("probing schedule needs a positive maturity");
    if (dt_days < 1)
        throw InputError("probing interval must be at least one day");
    ProbingSchedule s;
    s.kind = ScheduleKind::Illiquid;
    s.dt_days = dt_days;
    for (long k = 1;; ++k) {
        const double t = static_cast<double>(k * dt_days) / kBusinessDaysPerYear;
        if (t >= T - kDateTol)
            break;
        s.dates.push_back(t);
    }
    s.dates.push_back(T);
    return s;
}

ProbingSchedule liquid_schedule(double T, int steps_per_year) {
    if (!(T > 0.0))
        throw InputError("probing schedule needs a positive maturity");
    if (steps_per_year < 1)
        throw InputError("liquid probing needs a positive step count");
    ProbingSchedule s;
    s.kind = ScheduleKind::Liquid;
    for (long m = 1;; ++m) {
        const double t = static_cast<double>(m) / steps_per_year;
        if (t >= T - kDateTol)
            break;
        s.dates.push_back(t);
    }
    s.dates.push_back(T);
    return s;
}

std::pair<ProbingSchedule, ProbingSchedule> make_schedules(double T, int dt_days, double liquid_step) {
    if (!(liquid_step > 0.0))
        throw InputError("liquid step must be positive");
    const double per_year = 1.0 / liquid_step;
    const long n = std::lround(per_year);
    if (n < 1 || std::abs(per_year - static_cast<double>(n)) > 1e-6 * per_year)
        throw InputError("liquid step must divide one year into whole steps");
    return {liquid_schedule(T, static_cast<int>(n)), illiquid_schedule(T, dt_days)};
}

OptionValue summarize(std::span<const double> values) {
    OptionValue out;
    out.n_paths = values.size();
    if (values.size() < 2)
        throw InputError("option value needs at least two paths");
    // shifted sums: exact zero variance for identical samples
    const double shift = values[0];
    double sum = 0.0, sum_sq = 0.0;
    for (double v : values) {
        const double d = v - shift;
        sum += d;
        sum_sq += d * d;
    }
    const double n = static_cast<double>(values.size());
    const double mean_d = sum / n;
    const double var = std::max(0.0, (sum_sq - sum * mean_d) / (n - 1.0));
    out.value = shift + mean_d;
    out.std_error = std::sqrt(var / n);
    return out;
}

LookbackValuer::LookbackValuer(const PricingEnv& env, const CreditConfig& cfg, PayoffKind payoff,
                               TimedCashflows flows, std::shared_ptr<const TimeGrid> grid,
                               const ProbingSchedule& schedule)
    : env_(env), cfg_(cfg), payoff_(payoff), flows_(std::move(flows)), grid_(std::move(grid)),
      probe_times_(schedule.dates) {
    cfg_.validate();
    if (!grid_)
        throw InputError("lookback valuer needs a time grid");
    if (flows_.times.empty() || flows_.times.size() != flows_.amounts.size())
        throw InputError("lookback valuer needs at least one cash flow");
    if (probe_times_.empty())
        throw InputError("probing schedule is empty");
    if (!std::is_sorted(flows_.times.begin(), flows_.times.end()) ||
        !std::is_sorted(probe_times_.begin(), probe_times_.end()))
        throw InputError("cash flows and probing dates must be increasing");
    if (flows_.times.back() > probe_times_.back() + kDateTol)
        throw InputError("last cash flow falls after the last probing date");
    for (double t : probe_times_)
        probe_nodes_.push_back(grid_->index_of(t));
    for (double t : flows_.times)
        flow_nodes_.push_back(grid_->index_of(t));
    if (std::adjacent_find(probe_nodes_.begin(), probe_nodes_.end()) != probe_nodes_.end())
        throw InputError("probing dates collapse onto the same grid node");

    required_ = probe_nodes_;
    required_.insert(required_.end(), flow_nodes_.begin(), flow_nodes_.end());
    std::sort(required_.begin(), required_.end());
    required_.erase(std::unique(required_.begin(), required_.end()), required_.end());

    term_offset_.reserve(probe_nodes_.size() + 1);
    for (std::size_t q = 0; q < probe_nodes_.size(); ++q) {
        term_offset_.push_back(terms_.size());
        const double t = (*grid_)[probe_nodes_[q]];
        for (std::size_t i = 0; i < flow_nodes_.size(); ++i) {
            if (flow_nodes_[i] <= probe_nodes_[q])
                continue;
            const double ti = (*grid_)[flow_nodes_[i]];
            terms_.push_back({risky_coefficients(env_.g2, env_.cir, env_.curve, cfg_, t, ti), ti - t,
                              flows_.amounts[i]});
        }
    }
    term_offset_.push_back(terms_.size());
}

LookbackValuer::Layout LookbackValuer::layout_for(const ScenarioSet& scn) const {
    if (scn.grid().size() != grid_->size() || scn.grid().horizon() != grid_->horizon())
        throw InputError("scenario set was simulated on a different grid");
    if (scn.spread_mode() != cfg_.spread)
        throw InputError("scenario spread mode does not match the credit configuration");
    Layout out;
    out.probe.reserve(probe_nodes_.size());
    for (auto node : probe_nodes_)
        out.probe.push_back(scn.position_of(node));
    for (auto node : flow_nodes_)
        out.cashflow.push_back(scn.position_of(node));
    return out;
}

LookbackValuer::GammaTable LookbackValuer::prepare(std::span<const double> gammas) const {
    if (gammas.empty() || gammas.size() > kMaxGammas)
        throw InputError("between 1 and 8 trial spreads per evaluation");
    GammaTable table;
    table.gammas.assign(gammas.begin(), gammas.end());
    const std::size_t ng = gammas.size();
    table.weights.resize(terms_.size() * ng);
    for (std::size_t k = 0; k < terms_.size(); ++k)
        for (std::size_t j = 0; j < ng; ++j)
            table.weights[k * ng + j] = terms_[k].amount * std::exp(terms_[k].zcb.log_a - gammas[j] * terms_[k].horizon);
    return table;
}

double LookbackValuer::recovery_value(const DefaultRecord& rec, double gamma) const {
    if (payoff_ == PayoffKind::NoRecovery || cfg_.recovery_rate == 0.0)
        return 0.0;
    const auto& st = rec.state;
    double v = 0.0;
    for (std::size_t i = 0; i < flow_nodes_.size(); ++i) {
        if (flow_nodes_[i] < rec.node)
            continue;
        const double ti = (*grid_)[flow_nodes_[i]];
        const auto c = risky_coefficients(env_.g2, env_.cir, env_.curve, cfg_, rec.time, ti);
        v += flows_.amounts[i] * std::exp(c.log_price(st.x, st.y, st.s) - gamma * (ti - rec.time));
    }
    return cfg_.recovery_rate * std::exp(-st.int_r) * v;
}

void LookbackValuer::path_values(const ScenarioSet& scn, const Layout& layout, const GammaTable& table,
                                 std::size_t p, std::span<double> out,
                                 const DefaultRecord* default_override) const {
    const std::size_t ng = table.gammas.size();
    std::fill(out.begin(), out.begin() + static_cast<long>(ng), -std::numeric_limits<double>::infinity());
    const bool defaults = cfg_.defaults == DefaultMode::WithDefaults;
    const DefaultRecord* rec = !defaults ? nullptr : default_override ? default_override : &scn.default_record(p);
    const std::size_t tau_node = (rec && rec->defaulted()) ? rec->node : DefaultRecord::kNone;

    double received = 0.0;
    std::size_t next_flow = 0;
    bool reached_default = false;
    double acc[kMaxGammas];
    for (std::size_t q = 0; q < probe_nodes_.size(); ++q) {
        const std::size_t node = probe_nodes_[q];
        if (node >= tau_node) {
            reached_default = true;
            break;
        }
        while (next_flow < flow_nodes_.size() && flow_nodes_[next_flow] <= node) {
            const auto& st = scn.state(p, layout.cashflow[next_flow]);
            received += flows_.amounts[next_flow] * std::exp(-st.int_r);
            ++next_flow;
        }
        const auto& st = scn.state(p, layout.probe[q]);
        const double disc = std::exp(-st.int_r);
        std::fill(acc, acc + ng, 0.0);
        const double* w = table.weights.data() + term_offset_[q] * ng;
        for (std::size_t k = term_offset_[q]; k < term_offset_[q + 1]; ++k, w += ng) {
            const auto& z = terms_[k].zcb;
            const double f = std::exp(-z.b_x * st.x - z.b_y * st.y - z.b_s * st.s);
            for (std::size_t j = 0; j < ng; ++j)
                acc[j] += w[j] * f;
        }
        for (std::size_t j = 0; j < ng; ++j)
            out[j] = std::max(out[j], received + disc * acc[j]);
    }
    if (reached_default) {
        double before = 0.0;
        for (std::size_t i = 0; i < flow_nodes_.size() && flow_nodes_[i] < tau_node; ++i)
            before += flows_.amounts[i] * std::exp(-scn.state(p, layout.cashflow[i]).int_r);
        for (std::size_t j = 0; j < ng; ++j)
            out[j] = std::max(out[j], before + recovery_value(*rec, table.gammas[j]));
    }
    for (std::size_t j = 0; j < ng; ++j)
        if (out[j] == -std::numeric_limits<double>::infinity())
            out[j] = 0.0;
}

double LookbackValuer::path_value(const ScenarioSet& scn, std::size_t p, double gamma) const {
    const double g[1] = {gamma};
    const auto table = prepare(g);
    double out = 0.0;
    path_values(scn, layout_for(scn), table, p, {&out, 1});
    return out;
}

double LookbackValuer::bond_value(double gamma) const {
    double v = 0.0;
    for (std::size_t i = 0; i < flows_.times.size(); ++i) {
        const double ti = (*grid_)[flow_nodes_[i]];
        if (ti <= 0.0)
            continue;
        const auto c = risky_coefficients(env_.g2, env_.cir, env_.curve, cfg_, 0.0, ti);
        v += flows_.amounts[i] * std::exp(c.log_price(0.0, 0.0, env_.cir.s0) - gamma * ti);
    }
    return v;
}

double strategy_value_zc(const ScenarioSet& scn, std::size_t p, const PricingEnv& env, const ProbingSchedule& sched,
                         double gamma, CaseId c) {
    TimedCashflows zc{{sched.dates.back()}, {1.0}};
    const LookbackValuer valuer(env, credit_config(c, env.recovery_rate), PayoffKind::NoRecovery, std::move(zc),
                                scn.grid_ptr(), sched);
    return valuer.path_value(scn, p, gamma);
}

double strategy_value_coupon(const ScenarioSet& scn, std::size_t p, const PricingEnv& env,
                             const TimedCashflows& flows, const ProbingSchedule& sched, double gamma,
                             const CreditConfig& cfg) {
    const LookbackValuer valuer(env, cfg, PayoffKind::Recovery, flows, scn.grid_ptr(), sched);
    return valuer.path_value(scn, p, gamma);
}

OptionValue value_option(const ScenarioSet& scn, const LookbackValuer& valuer, double gamma) {
    if (scn.n_paths() < 2)
        throw InputError("option value needs at least two paths");
    const auto layout = valuer.layout_for(scn);
    const double g[1] = {gamma};
    const auto table = valuer.prepare(g);
    std::vector<double> values(scn.n_paths());
    for (std::size_t p = 0; p < scn.n_paths(); ++p)
        valuer.path_values(scn, layout, table, p, {&values[p], 1});
    return summarize(values);
}

} // namespace liqspread
