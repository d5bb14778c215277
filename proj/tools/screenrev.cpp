#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "screenrev/screenrev.h"

namespace
{
constexpr int exit_pass = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

struct Outcome
{
    sr_status status = SR_OK;
    int passed = 0;
    std::string summary;
    std::string error;
};

Outcome run_one(std::string const& target, sr_run_options const& options)
{
    Outcome o;
    size_t needed = 0;
    std::string buf(1 << 16, '\0');
    o.status = sr_run_scenario(target.c_str(), &options, &o.passed, buf.data(), buf.size(), &needed);
    if (o.status != SR_OK)
    {
        o.error = sr_last_error();
        return o;
    }
    if (needed > buf.size())
    {
        // Rerunning is deterministic; only the summary text was truncated
        buf.assign(needed, '\0');
        o.status = sr_run_scenario(target.c_str(), &options, &o.passed, buf.data(), buf.size(), &needed);
        if (o.status != SR_OK)
        {
            o.error = sr_last_error();
            return o;
        }
    }
    o.summary = buf.c_str();
    return o;
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Posterior ordering checks for noisy screening signals"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List builtin scenarios");
    auto* run = app.add_subcommand("run", "Run builtin scenarios or config files");

    std::vector<std::string> targets;
    bool all = false;
    int grid = 0;
    double tol = 0;
    std::uint64_t mc_n = 0;
    std::uint64_t seed = 0;
    std::string out_dir = "reports";
    bool no_timestamp = false;
    bool quiet = false;

    run->add_option("targets", targets, "Builtin names or config paths");
    run->add_flag("--all", all, "Run every builtin scenario");
    run->add_option("--grid", grid, "Probe grid size")->check(CLI::PositiveNumber);
    run->add_option("--tol", tol, "Comparison tolerance")->check(CLI::PositiveNumber);
    run->add_option("--mc-n", mc_n, "Monte Carlo sample count")->check(CLI::PositiveNumber);
    auto* seed_opt = run->add_option("--seed", seed, "Base seed for the Monte Carlo oracle");
    run->add_option("--out", out_dir, "Report root directory");
    run->add_flag("--no-timestamp", no_timestamp, "Omit the generated-at header line");
    run->add_flag("-q,--quiet", quiet, "Print only one status line per target");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e)
    {
        app.exit(e);
        return exit_usage;
    }

    if (list->parsed())
    {
        for (size_t i = 0; i < sr_builtin_count(); ++i)
            std::cout << sr_builtin_name(i) << '\n';
        return exit_pass;
    }

    if (all)
        for (size_t i = 0; i < sr_builtin_count(); ++i)
            targets.emplace_back(sr_builtin_name(i));
    if (targets.empty())
    {
        std::cerr << "run: no targets given\n";
        return exit_usage;
    }

    sr_run_options options;
    sr_run_options_default(&options);
    options.out_dir = out_dir.c_str();
    options.grid = grid;
    options.tol = tol;
    options.mc_n = mc_n;
    options.override_seed = seed_opt->count() > 0 ? 1 : 0;
    options.seed = seed;
    options.timestamp = no_timestamp ? 0 : 1;

    std::vector<Outcome> outcomes(targets.size());
    {
        std::vector<std::jthread> workers;
        for (size_t i = 0; i < targets.size(); ++i)
            workers.emplace_back([&, i] { outcomes[i] = run_one(targets[i], options); });
    }

    int code = exit_pass;
    for (size_t i = 0; i < targets.size(); ++i)
    {
        Outcome const& o = outcomes[i];
        if (o.status != SR_OK)
        {
            std::cerr << targets[i] << ": " << o.error << '\n';
            code = o.status == SR_CONFIG_ERROR ? exit_usage : std::max(code, exit_failed);
            continue;
        }
        if (!quiet)
            std::cout << "== " << targets[i] << '\n' << o.summary;
        else
            std::cout << targets[i] << ' ' << (o.passed ? "pass" : "fail") << '\n';
        if (!o.passed && code == exit_pass)
            code = exit_failed;
    }
    return code;
}
