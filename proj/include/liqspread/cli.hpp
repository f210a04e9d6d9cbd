#pragma once

#include "liqspread/lookback.hpp"
#include "liqspread/marketcal.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace liqspread {

inline constexpr const char* kToolVersion = "1.0.0";

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

/// Parsed run configuration. File paths are resolved against the directory
/// of the configuration file.
struct RunConfig {
    std::string curve_file;
    std::optional<Date> curve_reference;  ///< needed for curves in years
    G2ppParams g2;
    CirParams cir;
    double recovery_rate = 0.4;
    std::vector<double> recovery_sensitivity;

    McConfig mc;

    std::vector<double> maturities;
    std::vector<int> dt_days;
    std::vector<CaseId> cases;

    std::optional<BondSpec> bond;
    std::vector<int> unquoted_dt_days;
    CaseId unquoted_case = CaseId::Case4;

    std::string quotes_file;
    VolumeWindow volume_window = VolumeWindow::LastDay;
    int per_bucket = 3;
    std::vector<std::string> calibrate_buckets;  ///< empty: the bucket of `bond`
    CaseId market_case = CaseId::Case4;

    std::string canonical;  ///< normalised JSON used for the config hash

    PricingEnv pricing_env() const;
};

/// Parses the JSON configuration; InputError on missing or invalid keys.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");

/// Entry point of the `liqspread` tool; returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace liqspread
