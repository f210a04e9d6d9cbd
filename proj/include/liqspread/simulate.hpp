#pragma once

#include "liqspread/models.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace liqspread {

inline constexpr int kBusinessDaysPerYear = 252;

/// Simulation time nodes: a uniform lattice k / steps_per_year plus any
/// required times (coupon and probing dates), merged and strictly increasing.
class TimeGrid {
public:
    TimeGrid(double horizon, int steps_per_year, std::span<const double> required = {});

    std::span<const double> nodes() const { return nodes_; }
    double operator[](std::size_t i) const { return nodes_[i]; }
    std::size_t size() const { return nodes_.size(); }
    double horizon() const { return nodes_.back(); }
    double step() const { return 1.0 / steps_per_year_; }
    int steps_per_year() const { return steps_per_year_; }

    /// Index of the node equal to t (within 1e-9); InputError otherwise.
    std::size_t index_of(double t) const;

private:
    std::vector<double> nodes_;
    int steps_per_year_;
};

struct McConfig {
    std::size_t n_paths = 10000;
    int n_repeats = 20;
    std::uint64_t seed = 20240531;
    int liquid_steps_per_day = 8;   ///< hourly probing of the liquid market
    int threads = 1;
    bool antithetic = false;
    std::size_t block_paths = 256;  ///< paths simulated per memory block

    double grid_step() const { return 1.0 / (kBusinessDaysPerYear * liquid_steps_per_day); }
    int steps_per_year() const { return kBusinessDaysPerYear * liquid_steps_per_day; }
    void validate() const;
};

struct PathState {
    double x = 0.0;
    double y = 0.0;
    double s = 0.0;           ///< credit spread, >= 0
    double int_r = 0.0;       ///< int_0^t r du
    double int_lambda = 0.0;  ///< int_0^t s / lgd du
};

struct DefaultRecord {
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    double time = std::numeric_limits<double>::infinity();
    std::size_t node = kNone;  ///< grid node of the default, kNone if it never happens
    PathState state{};         ///< pre-default state at that node

    bool defaulted() const { return node != kNone; }
};

struct SimulationOptions {
    double lgd = 1.0;
    SpreadMode spread_mode = SpreadMode::Stochastic;
    std::size_t first_path = 0;
    std::size_t n_paths = 0;  ///< 0 selects McConfig::n_paths
};

/// Simulated paths. Full sets record every grid node; restricted sets keep
/// only selected nodes but retain each path's default record.
class ScenarioSet {
public:
    ScenarioSet() = default;

    std::size_t n_paths() const { return n_paths_; }
    std::size_t first_path() const { return first_path_; }
    std::uint64_t seed() const { return seed_; }
    double lgd() const { return lgd_; }
    SpreadMode spread_mode() const { return spread_mode_; }
    const TimeGrid& grid() const { return *grid_; }
    const std::shared_ptr<const TimeGrid>& grid_ptr() const { return grid_; }

    std::span<const std::size_t> recorded() const { return recorded_; }
    bool records_all_nodes() const { return recorded_.size() == grid_->size(); }
    /// Position of grid node `node` among recorded nodes; InputError if absent.
    std::size_t position_of(std::size_t node) const;

    std::span<const PathState> path(std::size_t p) const {
        return {states_.data() + p * recorded_.size(), recorded_.size()};
    }
    const PathState& state(std::size_t p, std::size_t pos) const { return states_[p * recorded_.size() + pos]; }
    double exp_draw(std::size_t p) const { return exp_draws_[p]; }
    const DefaultRecord& default_record(std::size_t p) const { return defaults_[p]; }

    /// Copy keeping only the given grid nodes (sorted, unique, already recorded).
    /// A nonempty `defaults` replaces the default records (one per path).
    ScenarioSet restrict_to(std::span<const std::size_t> nodes, std::span<const DefaultRecord> defaults = {}) const;
    /// Appends paths that continue this set's path range on the same layout.
    void append(const ScenarioSet& more);

    void write(std::ostream& out) const;
    static ScenarioSet read(std::istream& in);

private:
    friend ScenarioSet simulate(const G2ppParams&, const CirParams&, const DiscountCurve&,
                                std::shared_ptr<const TimeGrid>, const McConfig&, const SimulationOptions&);
    friend ScenarioSet sample_defaults(const ScenarioSet&, const CreditConfig&);

    std::shared_ptr<const TimeGrid> grid_;
    std::vector<std::size_t> recorded_;
    std::vector<PathState> states_;
    std::vector<double> exp_draws_;
    std::vector<DefaultRecord> defaults_;
    std::size_t n_paths_ = 0;
    std::size_t first_path_ = 0;
    std::uint64_t seed_ = 0;
    double lgd_ = 1.0;
    SpreadMode spread_mode_ = SpreadMode::Stochastic;
};

/// Joint G2++/CIR paths on every grid node. G2++ factors use the exact
/// Gaussian transition, the spread full-truncation Euler (or the CIR mean
/// path in deterministic mode); integrals are trapezoidal in the factors plus
/// the exact deterministic curve term. Path p depends only on (seed, p).
ScenarioSet simulate(const G2ppParams& g2, const CirParams& cir, const DiscountCurve& curve,
                     std::shared_ptr<const TimeGrid> grid, const McConfig& mc, const SimulationOptions& opts = {});

/// Default records for `cfg`: first node where the integrated intensity
/// int_0^t s / cfg.lgd() du reaches the path's Exp(1) draw. Paths simulated
/// with a different lgd are rescaled, so one set serves several recovery
/// rates. Requires a full set; NoDefaults gives no defaults.
std::vector<DefaultRecord> find_defaults(const ScenarioSet& scn, const CreditConfig& cfg);

/// Copy of `scn` carrying the default records of find_defaults.
ScenarioSet sample_defaults(const ScenarioSet& scn, const CreditConfig& cfg);

} // namespace liqspread
