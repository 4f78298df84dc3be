#pragma once

#include "funreg/regression.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace funreg::app {

struct RunConfig {
    std::string command; ///< simulate | fit | cv | check | compare
    std::filesystem::path x_path;
    std::filesystem::path y_path;
    std::filesystem::path out_dir = ".";
    std::string method;  ///< fcr | fpr | both; empty picks the command default
    std::vector<double> bandwidths;
    std::vector<long> truncations;
    double ridge = 0.0;
    std::uint64_t seed = 1;
    SigmaMode sigma_mode = SigmaMode::smooth;

    // simulate
    std::string model = "standard"; ///< standard | inverse-square
    long subjects = 400;
    double noise = 0.05; ///< noise sd as a fraction of the signal scale
    long points = 40;
    long components = 6; ///< inverse-square model only

    // check
    long random_models = 5;

    // compare
    long trajectories = 4;
    bool svg = false;
};

/// Rejects configurations that would fail a module precondition, before any
/// file is read or written.
void validate(const RunConfig& config);

/// Bandwidths used when none are given: multiples of the widest grid spacing.
std::vector<double> default_bandwidths(const Grid& x, const Grid& y, bool single);

/// Runs one subcommand. Returns the process exit status (0, or 3 when a
/// `check` verification fails); module errors propagate as funreg::Error.
int run(const RunConfig& config, std::ostream& log);

/// 2 for input and validation errors, 3 for numerical failures.
int exit_code(const Error& error) noexcept;

} // namespace funreg::app
