#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "screenrev/distribution.hpp"
#include "screenrev/kernels.hpp"

namespace screenrev
{
//! Which posterior family the conditioning values refer to
enum class SignalType
{
    //! Z = z
    point,
    //! S >= b for the threshold signal of the kernel
    transform,
    //! X + e >= b with the kernel's noise
    additive,
    //! Z >= b
    kernel,
};

char const* to_string(SignalType t);

/*!
 * Parsed scenario file.
 *
 * Format: "[section]" headers and "key = value" lines; '#' starts a comment.
 * Sections: scenario, prior, kernel, signal, conditions, checks. See
 * docs/scenario-format.md for every key.
 */
struct Scenario
{
    std::string name;
    std::string description;
    std::string prior_spec;
    Distribution prior;
    std::string kernel_spec;
    SignalKernel kernel;
    SignalType signal = SignalType::point;

    std::vector<double> z;
    std::vector<double> cutoffs;
    std::vector<double> w;
    std::vector<std::pair<double, double>> pairs;

    //! Requested checks in file order: (name, argument)
    std::vector<std::pair<std::string, std::string>> checks;

    double tol = 1e-9;
    int grid = 10000;
    std::size_t mc_n = 1000000;
    std::uint64_t seed = 1;
    double bandwidth = 1e-3;
    bool fosd_probes = false;
    bool oracle_samples = false;
};

Scenario parse_scenario(std::string_view text);

std::vector<std::string> builtin_names();
//! Config text of a builtin; empty when the name is unknown
std::string builtin_text(std::string_view name);

//! Builtin name or path to a config file
Scenario load_scenario(std::string const& target);

struct RunOptions
{
    std::string out_dir = "reports";
    std::optional<int> grid;
    std::optional<double> tol;
    std::optional<std::size_t> mc_n;
    std::optional<std::uint64_t> seed;
    bool timestamp = true;
};

struct CheckRecord
{
    std::string check;
    //! Space separated key=value fields
    std::string fields;
    bool pass = false;
};

struct RunResult
{
    std::string name;
    std::string directory;
    bool pass = false;
    std::vector<CheckRecord> records;
};

//! Run every requested check and write the report directory <out_dir>/<name>
RunResult run_scenario(Scenario const& s, RunOptions const& options);

}  // namespace screenrev
