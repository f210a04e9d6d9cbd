#include "liqspread/cli.hpp"

#include "liqspread/errors.hpp"
#include "liqspread/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace liqspread {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key))
        throw InputError("config: missing '" + where + "." + key + "'");
    return j.at(key);
}

double number(const json& j, const char* key, const std::string& where) {
    const auto& v = require(j, key, where);
    if (!v.is_number())
        throw InputError("config: '" + where + "." + key + "' must be a number");
    return v.get<double>();
}

std::string resolve(const std::string& base, const std::string& path) {
    if (path.empty() || fs::path(path).is_absolute())
        return path;
    return (fs::path(base) / path).lexically_normal().string();
}

CaseId case_from(const json& v) {
    if (v.is_number_integer())
        return parse_case(std::to_string(v.get<int>()));
    if (v.is_string())
        return parse_case(v.get<std::string>());
    throw InputError("config: case must be 1-4");
}

void apply(RunConfig& cfg, const json& root, const std::string& base) {
    const auto& curve = require(root, "curve", "");
    cfg.curve_file = resolve(base, require(curve, "file", "curve").get<std::string>());
    if (curve.contains("reference_date"))
        cfg.curve_reference = parse_date(curve.at("reference_date").get<std::string>());

    const auto& g2 = require(root, "g2pp", "");
    cfg.g2 = G2ppParams{number(g2, "a", "g2pp"), number(g2, "sigma", "g2pp"), number(g2, "b", "g2pp"),
                        number(g2, "eta", "g2pp"), number(g2, "rho", "g2pp")};
    cfg.g2.validate();
    const auto& cir = require(root, "cir", "");
    cfg.cir = CirParams{number(cir, "kappa", "cir"), number(cir, "theta", "cir"), number(cir, "sigma", "cir"),
                        number(cir, "r0", "cir")};
    cfg.cir.validate();

    if (root.contains("credit")) {
        const auto& c = root.at("credit");
        if (c.contains("recovery_rate"))
            cfg.recovery_rate = number(c, "recovery_rate", "credit");
        if (c.contains("recovery_sensitivity"))
            cfg.recovery_sensitivity = c.at("recovery_sensitivity").get<std::vector<double>>();
    }
    CreditConfig{cfg.recovery_rate}.validate();
    for (double rr : cfg.recovery_sensitivity)
        CreditConfig{rr}.validate();

    if (root.contains("monte_carlo")) {
        const auto& m = root.at("monte_carlo");
        cfg.mc.n_paths = m.value("n_paths", cfg.mc.n_paths);
        cfg.mc.n_repeats = m.value("n_repeats", cfg.mc.n_repeats);
        cfg.mc.seed = m.value("seed", cfg.mc.seed);
        cfg.mc.liquid_steps_per_day = m.value("liquid_steps_per_day", cfg.mc.liquid_steps_per_day);
        cfg.mc.threads = m.value("threads", cfg.mc.threads);
        cfg.mc.antithetic = m.value("antithetic", cfg.mc.antithetic);
    }

    if (root.contains("sweep")) {
        const auto& s = root.at("sweep");
        cfg.maturities = s.value("maturities", std::vector<double>{});
        cfg.dt_days = s.value("dt_days", std::vector<int>{});
        for (const auto& c : s.value("cases", json::array()))
            cfg.cases.push_back(case_from(c));
    }

    if (root.contains("bond")) {
        const auto& b = root.at("bond");
        BondSpec bond;
        bond.id = b.value("id", std::string("bond"));
        bond.issue_date = parse_date(require(b, "issue_date", "bond").get<std::string>());
        bond.maturity_date = parse_date(require(b, "maturity_date", "bond").get<std::string>());
        bond.coupon_rate = number(b, "coupon_rate", "bond");
        bond.frequency_months = b.value("frequency_months", 6);
        bond.notional = b.value("notional", 100.0);
        bond.day_count.convention = parse_day_count(b.value("day_count", std::string("30/360")));
        bond.day_count.adjustment = parse_adjustment(b.value("adjustment", std::string("modified_following")));
        if (!(bond.issue_date < bond.maturity_date) || bond.frequency_months < 1)
            throw InputError("config: bond needs issue < maturity and a positive frequency");
        cfg.bond = bond;
    }
    if (root.contains("unquoted")) {
        const auto& u = root.at("unquoted");
        cfg.unquoted_dt_days = u.value("dt_days", std::vector<int>{});
        if (u.contains("case"))
            cfg.unquoted_case = case_from(u.at("case"));
    }
    if (root.contains("market")) {
        const auto& m = root.at("market");
        cfg.quotes_file = resolve(base, m.value("quotes_file", std::string{}));
        const auto window = m.value("volume_window", std::string("day"));
        if (window == "day")
            cfg.volume_window = VolumeWindow::LastDay;
        else if (window == "week")
            cfg.volume_window = VolumeWindow::LastWeek;
        else
            throw InputError("config: market.volume_window must be 'day' or 'week'");
        cfg.per_bucket = m.value("per_bucket", 3);
        cfg.calibrate_buckets = m.value("calibrate_buckets", std::vector<std::string>{});
        if (m.contains("case"))
            cfg.market_case = case_from(m.at("case"));
    }
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<int> repeats;
    std::optional<int> threads;
};

RunConfig load_with_overrides(const std::string& path, const Overrides& ov) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open config " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    json root;
    try {
        root = json::parse(buf.str());
    } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    auto& m = root["monte_carlo"];
    if (ov.seed)
        m["seed"] = *ov.seed;
    if (ov.paths)
        m["n_paths"] = *ov.paths;
    if (ov.repeats)
        m["n_repeats"] = *ov.repeats;
    // threads never change results and stay out of the hash
    RunConfig cfg;
    try {
        apply(cfg, root, fs::path(path).parent_path().string());
    } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    if (ov.threads)
        cfg.mc.threads = *ov.threads;
    cfg.mc.validate();
    if (m.contains("threads"))
        m.erase("threads");
    cfg.canonical = root.dump();
    return cfg;
}

std::string header_line(const RunConfig& cfg) {
    return "# liqspread " + std::string(kToolVersion) + " seed=" + std::to_string(cfg.mc.seed) +
           " config=" + hex64(fnv1a64(cfg.canonical)) + "\n";
}

class Output {
public:
    Output(const std::string& dir, const RunConfig& cfg) : dir_(dir.empty() ? "." : dir), header_(header_line(cfg)) {
        fs::create_directories(dir_);
    }
    std::ofstream open(const std::string& name) const {
        const auto path = (fs::path(dir_) / name).string();
        std::ofstream f(path);
        if (!f)
            throw InputError("cannot write " + path);
        f << header_;
        return f;
    }
    std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

private:
    std::string dir_;
    std::string header_;
};

DiscountCurve load_curve(const RunConfig& cfg) {
    return read_curve_file(cfg.curve_file, cfg.curve_reference);
}

struct Fitted {
    std::vector<BucketedQuote> bucketed;
    LiquidSelection selection;
    SvenssonFit fit;
    Date valuation;
};

Fitted fit_liquid_curve(const RunConfig& cfg, Date valuation) {
    if (cfg.quotes_file.empty())
        throw InputError("config: market.quotes_file is required");
    const auto quotes = read_quotes_file(cfg.quotes_file);
    Fitted f;
    f.valuation = valuation;
    f.bucketed = assign_buckets(quotes, valuation);
    f.selection = select_liquid(f.bucketed, valuation, cfg.volume_window, cfg.per_bucket);
    std::vector<BondQuote> reps;
    for (const auto& bq : f.bucketed)
        if (std::find(f.selection.ids.begin(), f.selection.ids.end(), bq.quote.id) != f.selection.ids.end())
            reps.push_back(bq.quote);
    if (reps.size() < 6)
        throw InputError("only " + std::to_string(reps.size()) + " liquid quotes selected; at least 6 are needed");
    f.fit = fit_svensson(reps, valuation);
    return f;
}

void write_curve_params(std::ostream& out, const SvenssonFit& fit) {
    const auto& p = fit.params;
    out << "parameter,value\n" << std::setprecision(12);
    out << "beta0," << p.beta0 << "\nbeta1," << p.beta1 << "\nbeta2," << p.beta2 << "\nbeta3," << p.beta3
        << "\ntau1," << p.tau1 << "\ntau2," << p.tau2 << "\nobjective," << fit.objective << '\n';
}

int cmd_sweep(const RunConfig& cfg, const Output& output, std::ostream& out) {
    if (cfg.maturities.empty() || cfg.dt_days.empty() || cfg.cases.empty())
        throw CLI::ValidationError("sweep", "sweep.maturities, sweep.dt_days and sweep.cases must be nonempty");
    const auto env = cfg.pricing_env();
    const auto rows = sweep(env, cfg.maturities, cfg.dt_days, cfg.cases, cfg.mc);
    auto f = output.open("sweep.csv");
    write_sweep_csv(f, rows, cfg.mc.n_repeats);
    int failed = 0;
    for (const auto& r : rows)
        if (!r.result.ok()) {
            ++failed;
            out << "cell T=" << r.maturity << " dt=" << r.dt_days << " case=" << case_number(r.case_id)
                << " failed: " << r.result.error << '\n';
        }
    out << "wrote " << output.path("sweep.csv") << " (" << rows.size() << " cells, " << failed << " failed)\n";
    return failed ? kExitNumerical : kExitOk;
}

std::vector<double> recovery_rates(const RunConfig& cfg) {
    return cfg.recovery_sensitivity.empty() ? std::vector<double>{cfg.recovery_rate} : cfg.recovery_sensitivity;
}

int report_prices(const std::vector<UnquotedPrice>& rows, std::ostream& out) {
    int failed = 0;
    for (const auto& r : rows) {
        out << "RR=" << r.recovery_rate << " dt=" << r.dt_days << " days: ";
        if (r.result.ok()) {
            out << std::fixed << std::setprecision(2) << r.result.gamma_mean_bps() << " bps (std "
                << r.result.gamma_std_bps() << ")" << std::defaultfloat << '\n';
        } else {
            out << "failed: " << r.result.error << '\n';
            ++failed;
        }
    }
    return failed ? kExitNumerical : kExitOk;
}

int cmd_price_unquoted(const RunConfig& cfg, const Output& output, std::ostream& out) {
    if (!cfg.bond)
        throw InputError("config: 'bond' section is required");
    if (cfg.unquoted_dt_days.empty())
        throw CLI::ValidationError("price-unquoted", "unquoted.dt_days must be nonempty");
    const auto env = cfg.pricing_env();
    const auto rrs = recovery_rates(cfg);
    const auto rows = price_unquoted(*cfg.bond, cfg.unquoted_dt_days, env, cfg.mc, cfg.unquoted_case, rrs);
    std::optional<FrequencyRecommendation> labels;
    const auto& d = cfg.unquoted_dt_days;
    if (d.size() == 3 && d[0] <= d[1] && d[1] <= d[2])
        labels = FrequencyRecommendation{d[0], d[1], d[2], 0.0, 0.0, {}, {}};
    auto f = output.open("unquoted.csv");
    write_recommendation_csv(f, rows, labels);
    const int rc = report_prices(rows, out);
    out << "wrote " << output.path("unquoted.csv") << '\n';
    return rc;
}

int cmd_market(const RunConfig& cfg, const Output& output, std::ostream& out) {
    const auto env = cfg.pricing_env();
    const Date valuation = env.curve.reference_date();
    const auto fitted = fit_liquid_curve(cfg, valuation);
    for (const auto& w : fitted.selection.warnings)
        out << "warning: " << w << '\n';
    {
        auto f = output.open("liquid_curve.csv");
        write_curve_params(f, fitted.fit);
    }
    const auto cls = classify(fitted.bucketed, fitted.fit.params, valuation, fitted.selection.ids);
    for (const auto& n : cls.notes)
        out << "note: " << n << '\n';
    {
        auto f = output.open("classification.csv");
        write_classification_csv(f, cls);
    }

    std::vector<std::string> buckets = cfg.calibrate_buckets;
    std::string target;
    if (cfg.bond)
        target = bucket_for(env.curve.time_of(cfg.bond->maturity_date)).name;
    if (buckets.empty() && !target.empty())
        buckets.push_back(target);

    std::vector<FrequencyCalibration> calibrations;
    CalibrationOptions copts;
    copts.case_id = cfg.market_case;
    for (std::size_t i = 0; i < cls.bonds.size(); ++i) {
        const auto& c = cls.bonds[i];
        if (c.excluded || std::find(buckets.begin(), buckets.end(), c.bucket) == buckets.end())
            continue;
        const bool candidate = c.label == LiquidityLabel::Illiquid || (c.stale && -c.spread_bps > c.sigma_bucket_bps);
        if (!candidate)
            continue;
        auto cal = calibrate_frequency(fitted.bucketed[i].quote.bond, c.spread_bps, env, cfg.mc, copts);
        out << "calibrated " << cal.id << ": market " << std::lround(cal.market_spread_bps) << " bps, model "
            << std::lround(cal.model_spread_bps) << " bps at " << cal.dt_days << " days (" << to_string(cal.status)
            << ")\n";
        calibrations.push_back(std::move(cal));
    }
    {
        auto f = output.open("calibration.csv");
        write_calibration_csv(f, calibrations);
    }
    int rc = kExitOk;
    if (cfg.bond) {
        std::vector<FrequencyCalibration> in_target;
        for (const auto& c : calibrations)
            if (c.bucket == target)
                in_target.push_back(c);
        try {
            const auto rec = recommend_frequency(in_target);
            const int dts[3] = {rec.dt_1sd, rec.dt_2sd, rec.dt_max};
            const auto rows = price_unquoted(*cfg.bond, dts, env, cfg.mc, cfg.unquoted_case, recovery_rates(cfg));
            auto f = output.open("recommendation.csv");
            write_recommendation_csv(f, rows, rec);
            rc = report_prices(rows, out);
        } catch (const InputError& e) {
            out << "no recommendation for bucket " << target << ": " << e.what() << '\n';
        }
    }
    out << "wrote market outputs to " << output.path("") << '\n';
    return rc;
}

int cmd_fit_curve(const RunConfig& cfg, const Output& output, std::ostream& out) {
    const auto curve = load_curve(cfg);
    const auto fitted = fit_liquid_curve(cfg, curve.reference_date());
    for (const auto& w : fitted.selection.warnings)
        out << "warning: " << w << '\n';
    auto f = output.open("liquid_curve.csv");
    write_curve_params(f, fitted.fit);
    out << "fitted " << fitted.selection.ids.size() << " liquid bonds, objective " << fitted.fit.objective << '\n';
    return kExitOk;
}

struct Check {
    std::string name;
    double value;
    double reference;
    double tolerance;
    bool pass;
    bool data = false;  ///< failure is a data problem rather than numerical
};

int cmd_validate(const RunConfig& cfg, const Output& output, std::ostream& out) {
    std::vector<Check> checks;
    const auto curve = load_curve(cfg);
    const auto times = curve.times();
    const auto factors = curve.factors();
    double max_factor = 0.0;
    for (std::size_t i = 1; i < factors.size(); ++i)
        max_factor = std::max(max_factor, factors[i]);
    checks.push_back({"curve_factors_at_most_one", max_factor, 1.0, 0.0, max_factor <= 1.0, true});
    checks.push_back({"curve_nonincreasing", curve.nonnegative_forwards() ? 1.0 : 0.0, 1.0, 0.0,
                      curve.nonnegative_forwards(), true});
    const double feller = feller_margin(cfg.cir);
    checks.push_back({"cir_feller_margin", feller, 0.0, 0.0, true});
    out << "Feller margin 2*kappa*theta - sigma^2 = " << feller << (feller > 0 ? " (positive)" : " (non-positive)")
        << '\n';

    std::vector<double> horizons;
    for (double T : {1.0, 5.0, 10.0})
        if (T <= times.back())
            horizons.push_back(T);
    if (!horizons.empty()) {
        McConfig mc = cfg.mc;
        auto grid = std::make_shared<const TimeGrid>(horizons.back(), kBusinessDaysPerYear, horizons);
        SimulationOptions opts;
        opts.spread_mode = SpreadMode::Stochastic;
        opts.n_paths = mc.n_paths;
        const auto scn = simulate(cfg.g2, cfg.cir, curve, grid, mc, opts);
        for (double T : horizons) {
            const auto pos = grid->index_of(T);
            std::vector<double> disc(scn.n_paths()), surv(scn.n_paths());
            for (std::size_t p = 0; p < scn.n_paths(); ++p) {
                disc[p] = std::exp(-scn.state(p, pos).int_r);
                surv[p] = std::exp(-scn.state(p, pos).int_lambda);
            }
            const auto d = summarize(disc);
            const auto s = summarize(surv);
            const double pd = curve.discount(T);
            const double ps = cir_zcb(cfg.cir, 0.0, T, cfg.cir.s0);
            const double td = 3.0 * d.std_error + 1e-12;
            const double ts = 3.0 * s.std_error + 1e-12;
            checks.push_back({"mc_discount_T" + std::to_string(static_cast<int>(T)), d.value, pd, td,
                              std::abs(d.value - pd) <= td});
            checks.push_back({"mc_cir_survival_T" + std::to_string(static_cast<int>(T)), s.value, ps, ts,
                              std::abs(s.value - ps) <= ts});
        }
    }
    checks.push_back({"seed", static_cast<double>(cfg.mc.seed), static_cast<double>(cfg.mc.seed), 0.0, true});

    auto f = output.open("validate.csv");
    f << "check,value,reference,tolerance,status\n" << std::setprecision(12);
    bool data_fail = false, num_fail = false;
    for (const auto& c : checks) {
        f << c.name << ',' << c.value << ',' << c.reference << ',' << c.tolerance << ','
          << (c.pass ? "PASS" : "FAIL") << '\n';
        out << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << c.value << " reference=" << c.reference
            << '\n';
        if (!c.pass)
            (c.data ? data_fail : num_fail) = true;
    }
    out << "seed " << cfg.mc.seed << '\n';
    return data_fail ? kExitData : num_fail ? kExitNumerical : kExitOk;
}

} // namespace

PricingEnv RunConfig::pricing_env() const {
    return PricingEnv{g2, cir, read_curve_file(curve_file, curve_reference), recovery_rate};
}

RunConfig parse_config(const std::string& json_text, const std::string& base_dir) {
    RunConfig cfg;
    json root;
    try {
        root = json::parse(json_text);
        apply(cfg, root, base_dir);
    } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    cfg.canonical = root.dump();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    return load_with_overrides(path, {});
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Liquidity spread estimation for defaultable bonds", "liqspread"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string config_path, out_dir = "out";
    Overrides ov;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    int repeats = 0, threads = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "master seed override");
        sub->add_option("--paths", paths, "paths per repeat override")->check(CLI::PositiveNumber);
        sub->add_option("--repeats", repeats, "number of repeats override")->check(CLI::PositiveNumber);
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "output directory");
    };
    auto* s_sweep = app.add_subcommand("sweep", "zero-coupon liquidity spread sweep");
    auto* s_market = app.add_subcommand("market", "classification, probing-interval calibration, recommendation");
    auto* s_price = app.add_subcommand("price-unquoted", "liquidity spread of the configured bond");
    auto* s_validate = app.add_subcommand("validate", "parameter and simulation diagnostics");
    auto* s_fit = app.add_subcommand("fit-curve", "fit the liquid Svensson curve");
    for (auto* s : {s_sweep, s_market, s_price, s_validate, s_fit})
        add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, eo;
        const int rc = app.exit(e, o, eo);
        out << o.str();
        err << eo.str();
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        for (auto* s : {s_sweep, s_market, s_price, s_validate, s_fit}) {
            if (s->count("--seed"))
                ov.seed = seed;
            if (s->count("--paths"))
                ov.paths = paths;
            if (s->count("--repeats"))
                ov.repeats = repeats;
            if (s->count("--threads"))
                ov.threads = threads;
        }
        const auto cfg = load_with_overrides(config_path, ov);
        if (cfg.mc.n_paths < 1000)
            err << "warning: " << cfg.mc.n_paths << " paths per repeat is below the 1000-path floor for reported results\n";
        const Output output(out_dir, cfg);
        if (s_sweep->parsed())
            return cmd_sweep(cfg, output, out);
        if (s_market->parsed())
            return cmd_market(cfg, output, out);
        if (s_price->parsed())
            return cmd_price_unquoted(cfg, output, out);
        if (s_validate->parsed())
            return cmd_validate(cfg, output, out);
        if (s_fit->parsed())
            return cmd_fit_curve(cfg, output, out);
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InputError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitUsage;
}

} // namespace liqspread
