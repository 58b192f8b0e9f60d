#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "usma/harness.hpp"

namespace usma {

inline constexpr const char* kSoftwareVersion = "1.0.0";

/// A grid of simulation cells read from a flat `key = value` file.
///
///     profile    = aiot-paper, aiot-single
///     channel    = rayleigh-2rx
///     csi        = ideal, estimated
///     ka_list    = 5, 15
///     ebn0_list  = 0, 2, 4
///     trials     = 1000
///     min_trials = 1000
///     target_errors = 0
///     seed       = 1
///
/// Lists are comma separated, `#` starts a comment. Every key is required
/// unless the file holds no keys at all, which yields an empty grid.
/// Cells run in the order profile, channel, csi, ka, ebn0.
struct SweepPlan {
    std::vector<std::string> profiles;
    std::vector<std::string> channels;
    std::vector<Csi> csi;
    std::vector<std::size_t> ka;
    std::vector<double> ebn0_db;
    std::size_t trials = 0;
    std::size_t min_trials = 0;
    std::size_t target_errors = 0;
    std::uint64_t seed = 0;

    bool empty() const { return profiles.empty(); }
    std::size_t n_cells() const;
};

SweepPlan parse_plan(std::istream& in);
SweepPlan load_plan(const std::string& path);

/// Header lines: a `#` comment carrying the version and energy convention,
/// then the column names.
std::string csv_header();
std::string csv_row(const SweepRecord& r);

/// Runs every cell; rows are streamed to `out` as cells finish.
std::vector<SweepRecord> run_sweep(const SweepPlan& plan, std::ostream& out, const RunOptions& run = {});

/// Plan file to CSV file. Throws ConfigError on a malformed plan and
/// std::runtime_error on an unwritable path.
std::vector<SweepRecord> sweep_to_csv(const std::string& plan_path, const std::string& csv_path,
                                      const RunOptions& run = {});

}  // namespace usma
