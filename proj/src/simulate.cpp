#include "liqspread/simulate.hpp"

#include "liqspread/errors.hpp"
#include "parallel.hpp"
#include "liqspread/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

namespace liqspread {

namespace {

constexpr double kNodeTol = 1e-9;

struct StepCoefficients {
    double dt = 0.0;
    double decay_a = 1.0;
    double decay_b = 1.0;
    double sd_x = 0.0;
    double sd_y = 0.0;
    double corr = 0.0;
    double corr_perp = 1.0;
    double phi_next = 0.0;  ///< int_0^{t_{k+1}} phi
    double sqrt_dt = 0.0;
};

// Var of the OU innovation over dt: (1 - e^{-2 k dt}) / (2k)
double ou_variance(double k, double dt) {
    return -std::expm1(-2.0 * k * dt) / (2.0 * k);
}

std::vector<StepCoefficients> step_table(const G2ppParams& g2, const DiscountCurve& curve, const TimeGrid& grid) {
    std::vector<StepCoefficients> steps(grid.size() - 1);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        auto& c = steps[k];
        c.dt = grid[k + 1] - grid[k];
        c.sqrt_dt = std::sqrt(c.dt);
        c.decay_a = std::exp(-g2.a * c.dt);
        c.decay_b = std::exp(-g2.b * c.dt);
        c.sd_x = g2.sigma * std::sqrt(ou_variance(g2.a, c.dt));
        c.sd_y = g2.eta * std::sqrt(ou_variance(g2.b, c.dt));
        if (c.sd_x > 0.0 && c.sd_y > 0.0) {
            const double cov = g2.rho * g2.sigma * g2.eta * (-std::expm1(-(g2.a + g2.b) * c.dt)) / (g2.a + g2.b);
            c.corr = std::clamp(cov / (c.sd_x * c.sd_y), -1.0, 1.0);
            c.corr_perp = std::sqrt(std::max(0.0, 1.0 - c.corr * c.corr));
        }
        c.phi_next = g2pp_phi_integral(g2, curve, grid[k + 1]);
    }
    return steps;
}

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in)
        throw InputError("scenario file truncated");
    return v;
}

template <typename T>
void put_vector(std::ostream& out, const std::vector<T>& v) {
    put<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
std::vector<T> get_vector(std::istream& in) {
    const auto n = get<std::uint64_t>(in);
    if (n > (std::uint64_t{1} << 34))
        throw InputError("scenario file corrupt (array length)");
    std::vector<T> v(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
    if (!in)
        throw InputError("scenario file truncated");
    return v;
}

constexpr char kMagic[4] = {'L', 'Q', 'S', 'C'};
constexpr std::uint32_t kFormatVersion = 1;

} // namespace

TimeGrid::TimeGrid(double horizon, int steps_per_year, std::span<const double> required)
    : steps_per_year_(steps_per_year) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw InputError("time grid horizon must be positive");
    if (steps_per_year <= 0)
        throw InputError("time grid needs a positive step count");
    const auto n = static_cast<long>(std::floor(horizon * steps_per_year + kNodeTol));
    std::vector<double> all;
    all.reserve(static_cast<std::size_t>(n) + required.size() + 2);
    for (long k = 0; k <= n; ++k)
        all.push_back(static_cast<double>(k) / steps_per_year);
    for (double t : required) {
        if (t < -kNodeTol || t > horizon + kNodeTol)
            throw InputError("required grid time outside [0, horizon]");
        all.push_back(std::clamp(t, 0.0, horizon));
    }
    all.push_back(horizon);
    std::sort(all.begin(), all.end());
    for (double t : all) {
        if (t > horizon + kNodeTol)
            continue;
        if (!nodes_.empty() && t - nodes_.back() <= kNodeTol) {
            if (t == horizon)
                nodes_.back() = horizon;
            continue;
        }
        nodes_.push_back(t);
    }
}

std::size_t TimeGrid::index_of(double t) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - kNodeTol);
    if (it == nodes_.end() || std::abs(*it - t) > kNodeTol)
        throw InputError("time " + std::to_string(t) + " is not a grid node");
    return static_cast<std::size_t>(it - nodes_.begin());
}

void McConfig::validate() const {
    if (n_paths < 2)
        throw InputError("Monte Carlo needs at least two paths");
    if (n_repeats < 1)
        throw InputError("Monte Carlo needs at least one repeat");
    if (liquid_steps_per_day < 1)
        throw InputError("liquid_steps_per_day must be >= 1");
    if (block_paths < 1)
        throw InputError("block_paths must be >= 1");
}

std::size_t ScenarioSet::position_of(std::size_t node) const {
    if (records_all_nodes())
        return node;
    auto it = std::lower_bound(recorded_.begin(), recorded_.end(), node);
    if (it == recorded_.end() || *it != node)
        throw InputError("grid node " + std::to_string(node) + " not recorded in scenario set");
    return static_cast<std::size_t>(it - recorded_.begin());
}

ScenarioSet ScenarioSet::restrict_to(std::span<const std::size_t> nodes,
                                     std::span<const DefaultRecord> defaults) const {
    if (!defaults.empty() && defaults.size() != n_paths_)
        throw InputError("restrict_to: one default record per path required");
    ScenarioSet out;
    out.grid_ = grid_;
    out.recorded_.assign(nodes.begin(), nodes.end());
    if (!std::is_sorted(out.recorded_.begin(), out.recorded_.end()) ||
        std::adjacent_find(out.recorded_.begin(), out.recorded_.end()) != out.recorded_.end())
        throw InputError("restrict_to: nodes must be sorted and unique");
    std::vector<std::size_t> positions;
    positions.reserve(nodes.size());
    for (std::size_t node : nodes)
        positions.push_back(position_of(node));
    out.states_.resize(n_paths_ * nodes.size());
    for (std::size_t p = 0; p < n_paths_; ++p)
        for (std::size_t k = 0; k < positions.size(); ++k)
            out.states_[p * nodes.size() + k] = state(p, positions[k]);
    out.exp_draws_ = exp_draws_;
    if (defaults.empty())
        out.defaults_ = defaults_;
    else
        out.defaults_.assign(defaults.begin(), defaults.end());
    out.n_paths_ = n_paths_;
    out.first_path_ = first_path_;
    out.seed_ = seed_;
    out.lgd_ = lgd_;
    out.spread_mode_ = spread_mode_;
    return out;
}

void ScenarioSet::append(const ScenarioSet& more) {
    if (n_paths_ == 0 && states_.empty()) {
        *this = more;
        return;
    }
    if (more.recorded_ != recorded_ || more.seed_ != seed_ || more.first_path_ != first_path_ + n_paths_ ||
        (more.grid_ != grid_ && more.grid_->size() != grid_->size()))
        throw InputError("append: scenario blocks are not contiguous on the same layout");
    states_.insert(states_.end(), more.states_.begin(), more.states_.end());
    exp_draws_.insert(exp_draws_.end(), more.exp_draws_.begin(), more.exp_draws_.end());
    defaults_.insert(defaults_.end(), more.defaults_.begin(), more.defaults_.end());
    n_paths_ += more.n_paths_;
}

void ScenarioSet::write(std::ostream& out) const {
    out.write(kMagic, 4);
    put(out, kFormatVersion);
    put(out, seed_);
    put<std::uint64_t>(out, first_path_);
    put<std::uint64_t>(out, n_paths_);
    put(out, lgd_);
    put<std::int32_t>(out, spread_mode_ == SpreadMode::Stochastic ? 1 : 0);
    put<std::int32_t>(out, grid_->steps_per_year());
    put_vector(out, std::vector<double>(grid_->nodes().begin(), grid_->nodes().end()));
    std::vector<std::uint64_t> rec(recorded_.begin(), recorded_.end());
    put_vector(out, rec);
    put_vector(out, states_);
    put_vector(out, exp_draws_);
    put_vector(out, defaults_);
}

ScenarioSet ScenarioSet::read(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw InputError("not a scenario file");
    if (get<std::uint32_t>(in) != kFormatVersion)
        throw InputError("unsupported scenario file version");
    ScenarioSet s;
    s.seed_ = get<std::uint64_t>(in);
    s.first_path_ = get<std::uint64_t>(in);
    s.n_paths_ = get<std::uint64_t>(in);
    s.lgd_ = get<double>(in);
    s.spread_mode_ = get<std::int32_t>(in) == 1 ? SpreadMode::Stochastic : SpreadMode::Deterministic;
    const auto spy = get<std::int32_t>(in);
    const auto nodes = get_vector<double>(in);
    if (nodes.empty())
        throw InputError("scenario file has an empty grid");
    auto grid = std::make_shared<TimeGrid>(nodes.back(), spy, nodes);
    if (grid->size() != nodes.size())
        throw InputError("scenario file grid inconsistent");
    s.grid_ = std::move(grid);
    const auto rec = get_vector<std::uint64_t>(in);
    s.recorded_.assign(rec.begin(), rec.end());
    s.states_ = get_vector<PathState>(in);
    s.exp_draws_ = get_vector<double>(in);
    s.defaults_ = get_vector<DefaultRecord>(in);
    if (s.states_.size() != s.n_paths_ * s.recorded_.size() || s.exp_draws_.size() != s.n_paths_ ||
        s.defaults_.size() != s.n_paths_)
        throw InputError("scenario file arrays inconsistent");
    return s;
}

ScenarioSet simulate(const G2ppParams& g2, const CirParams& cir, const DiscountCurve& curve,
                     std::shared_ptr<const TimeGrid> grid, const McConfig& mc, const SimulationOptions& opts) {
    g2.validate();
    cir.validate();
    if (!grid)
        throw InputError("simulate: missing grid");
    if (grid->horizon() > curve.max_time() + 1e-12)
        throw InputError("simulate: grid horizon beyond the discount curve");
    if (!(opts.lgd > 0.0) || opts.lgd > 1.0)
        throw InputError("simulate: lgd must lie in (0, 1]");
    const std::size_t n_paths = opts.n_paths == 0 ? mc.n_paths : opts.n_paths;
    const std::size_t n_nodes = grid->size();

    ScenarioSet scn;
    scn.grid_ = grid;
    scn.recorded_.resize(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k)
        scn.recorded_[k] = k;
    scn.states_.resize(n_paths * n_nodes);
    scn.exp_draws_.resize(n_paths);
    scn.defaults_.assign(n_paths, DefaultRecord{});
    scn.n_paths_ = n_paths;
    scn.first_path_ = opts.first_path;
    scn.seed_ = mc.seed;
    scn.lgd_ = opts.lgd;
    scn.spread_mode_ = opts.spread_mode;

    const auto steps = step_table(g2, curve, *grid);
    const bool stochastic = opts.spread_mode == SpreadMode::Stochastic;
    std::vector<double> det_s, det_int_s;
    if (!stochastic) {
        det_s.resize(n_nodes);
        det_int_s.resize(n_nodes);
        for (std::size_t k = 0; k < n_nodes; ++k) {
            det_s[k] = cir_mean(cir, (*grid)[k]);
            det_int_s[k] = cir_mean_integral(cir, 0.0, (*grid)[k]);
        }
    }
    const Philox4x32 rng(mc.seed);
    const double inv_lgd = 1.0 / opts.lgd;

    auto run = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint64_t id = opts.first_path + i;
            const std::uint64_t base = mc.antithetic ? id / 2 : id;
            const double sign = mc.antithetic && (id % 2 == 1) ? -1.0 : 1.0;
            const auto lo32 = static_cast<std::uint32_t>(base);
            const auto hi32 = static_cast<std::uint32_t>(base >> 32);

            PathState* out = scn.states_.data() + i * n_nodes;
            double x = 0.0, y = 0.0, s_hat = cir.s0, s = cir.s0, int_xy = 0.0, int_r = 0.0, int_s = 0.0;
            if (!stochastic)
                s = det_s[0];
            out[0] = {x, y, s, 0.0, 0.0};
            for (std::size_t k = 0; k + 1 < n_nodes; ++k) {
                const auto& c = steps[k];
                const auto block = rng({static_cast<std::uint32_t>(k), lo32, hi32, 0u});
                double z1, z2, z3 = 0.0;
                if (stochastic) {
                    const auto z = normals4(block);
                    z1 = sign * z[0];
                    z2 = sign * z[1];
                    z3 = sign * z[2];
                } else {
                    const double r = std::sqrt(-2.0 * std::log(to_unit(block[0])));
                    const double phi = 2.0 * std::numbers::pi * to_unit(block[1]);
                    z1 = sign * r * std::cos(phi);
                    z2 = sign * r * std::sin(phi);
                }
                const double x_next = x * c.decay_a + c.sd_x * z1;
                const double y_next = y * c.decay_b + c.sd_y * (c.corr * z1 + c.corr_perp * z2);
                int_xy += 0.5 * (x + y + x_next + y_next) * c.dt;
                int_r = int_xy + c.phi_next;
                double s_next;
                if (stochastic) {
                    const double sp = std::max(s_hat, 0.0);
                    s_hat = s_hat + cir.kappa * (cir.theta - sp) * c.dt + cir.sigma * std::sqrt(sp) * c.sqrt_dt * z3;
                    s_next = std::max(s_hat, 0.0);
                    int_s += 0.5 * (s + s_next) * c.dt;
                } else {
                    s_next = det_s[k + 1];
                    int_s = det_int_s[k + 1];
                }
                x = x_next;
                y = y_next;
                s = s_next;
                out[k + 1] = {x, y, s, int_r, int_s * inv_lgd};
            }
            if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(s) || !std::isfinite(int_r))
                throw NumericalError("simulate: non-finite state on path " + std::to_string(id));
            const auto e = rng({0u, static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32), 1u});
            scn.exp_draws_[i] = -std::log(to_unit(e[0]));
        }
    };
    detail::parallel_for(n_paths, mc.threads, run);
    return scn;
}

std::vector<DefaultRecord> find_defaults(const ScenarioSet& scn, const CreditConfig& cfg) {
    cfg.validate();
    std::vector<DefaultRecord> out(scn.n_paths());
    if (cfg.defaults == DefaultMode::NoDefaults)
        return out;
    if (!scn.records_all_nodes())
        throw InputError("default sampling needs a scenario set recording every grid node");
    // int_lambda stores int s / scn.lgd(); the cfg intensity is int s / cfg.lgd()
    const double scale = scn.lgd() / cfg.lgd();
    for (std::size_t p = 0; p < scn.n_paths(); ++p) {
        const auto states = scn.path(p);
        const double e = scn.exp_draw(p);
        auto it = std::partition_point(states.begin(), states.end(),
                                       [scale, e](const PathState& st) { return st.int_lambda * scale < e; });
        if (it == states.end())
            continue;
        const auto node = static_cast<std::size_t>(it - states.begin());
        out[p] = DefaultRecord{scn.grid()[node], node, *it};
    }
    return out;
}

ScenarioSet sample_defaults(const ScenarioSet& scn, const CreditConfig& cfg) {
    ScenarioSet out = scn;
    out.defaults_ = find_defaults(scn, cfg);
    return out;
}

} // namespace liqspread
