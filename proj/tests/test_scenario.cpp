#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "screenrev/error.hpp"
#include "screenrev/scenario.hpp"

using namespace screenrev;
namespace fs = std::filesystem;

namespace
{
std::string const minimal = R"([scenario]
name = minimal

[prior]
family = uniform 0 1

[kernel]
kind = triangle_rectangle

[signal]
type = point

[conditions]
z = 1 2
pairs = 1 2

[checks]
fosd = strict_dominates
)";

std::string config_message(std::string const& text)
{
    try
    {
        parse_scenario(text);
    }
    catch (Error const& e)
    {
        EXPECT_EQ(e.code(), ErrorCode::config_error) << e.what();
        return e.what();
    }
    ADD_FAILURE() << "expected ConfigError for:\n" << text;
    return {};
}

std::string replace(std::string text, std::string const& from, std::string const& to)
{
    auto at = text.find(from);
    EXPECT_NE(at, std::string::npos) << from;
    return text.replace(at, from.size(), to);
}

std::string slurp(fs::path const& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path scratch(std::string const& name)
{
    auto p = fs::temp_directory_path() / ("screenrev_scenario_" + name);
    fs::remove_all(p);
    return p;
}

RunOptions quick(fs::path const& dir)
{
    RunOptions o;
    o.out_dir = dir.string();
    o.mc_n = 200000;
    o.timestamp = false;
    return o;
}
}  // namespace

TEST(ParseScenario, Minimal)
{
    auto s = parse_scenario(minimal);
    EXPECT_EQ(s.name, "minimal");
    EXPECT_EQ(s.signal, SignalType::point);
    EXPECT_EQ(s.z, (std::vector<double>{1, 2}));
    ASSERT_EQ(s.pairs.size(), 1u);
    EXPECT_EQ(s.pairs[0], std::make_pair(1.0, 2.0));
    ASSERT_EQ(s.checks.size(), 1u);
    EXPECT_EQ(s.checks[0].first, "fosd");
    EXPECT_EQ(s.tol, 1e-9);
    EXPECT_EQ(s.grid, 10000);
    EXPECT_DOUBLE_EQ(s.prior.cdf(0.25), 0.25);
}

TEST(ParseScenario, FractionsSchemaAndSettings)
{
    auto text = replace(minimal, "family = uniform 0 1", "piece = 0 1 poly 0 2\n");
    text = replace(text, "z = 1 2", "z = 1/2 3/2");
    text = replace(text, "pairs = 1 2", "pairs = 1/2 3/2");
    text += "tol = 1e-7\ngrid = 2000\nseed = 42\n";
    auto s = parse_scenario(text);
    EXPECT_DOUBLE_EQ(s.z[0], 0.5);
    EXPECT_DOUBLE_EQ(s.z[1], 1.5);
    EXPECT_DOUBLE_EQ(s.prior.cdf(0.5), 0.25);
    EXPECT_EQ(s.tol, 1e-7);
    EXPECT_EQ(s.grid, 2000);
    EXPECT_EQ(s.seed, 42u);
}

TEST(ParseScenario, Errors)
{
    auto bogus_line = "line " + std::to_string(std::count(minimal.begin(), minimal.end(), '\n') + 1);
    EXPECT_NE(config_message(minimal + "[bogus]\n").find(bogus_line), std::string::npos);
    config_message(replace(minimal, "name = minimal", ""));
    config_message(replace(minimal, "name = minimal", "name = ../up"));
    config_message(replace(minimal, "fosd = strict_dominates", ""));
    config_message(replace(minimal, "fosd = strict_dominates", "fosd = sideways"));
    config_message(replace(minimal, "fosd = strict_dominates", "sparkle = on"));
    config_message(replace(minimal, "z = 1 2", "z = 1 two"));
    config_message(replace(minimal, "z = 1 2", "z = 1/0"));
    config_message(replace(minimal, "pairs = 1 2", "pairs = 1 2 3"));
    config_message(replace(minimal, "pairs = 1 2", "pairs = 2 1"));
    config_message(replace(minimal, "kind = triangle_rectangle", "kind = wobbly"));
    config_message(replace(minimal, "kind = triangle_rectangle", "kind = three_piece\niota = 0.1"));
    config_message(replace(minimal, "type = point", "type = sideways"));
    config_message(replace(minimal, "family = uniform 0 1", "family = uniform 0 1\npiece = 0 1 poly 1"));
    config_message(replace(minimal, "family = uniform 0 1", "family = uniform 1 0"));
    config_message(replace(minimal, "[checks]", "orphan\n[checks]"));
    // Checks needing data the scenario lacks
    config_message(minimal + "curve = on\n");
    config_message(minimal + "tax = holds\n");
    config_message(minimal + "derivative = positive\n");
    auto additive = replace(minimal, "kind = triangle_rectangle",
                            "kind = evasion\np = constant 0.3\nnoise = exponential 1");
    config_message(replace(additive, "type = point", "type = additive"));
}

TEST(ParseScenario, ErrorsBeforeAnySection)
{
    EXPECT_NE(config_message("name = x\n").find("line 1"), std::string::npos);
}

TEST(LoadScenario, BuiltinsAndFiles)
{
    auto names = builtin_names();
    std::vector<std::string> expected{"thm1",         "cor1",       "cor2_continuous",
                                      "lemma_ruleout", "cor3_ruleout", "thm2_pareto",
                                      "cor5_exponential", "tax_mixture", "footnote2"};
    EXPECT_EQ(names, expected);
    for (auto const& n : names)
        EXPECT_EQ(load_scenario(n).name, n);
    EXPECT_TRUE(builtin_text("nope").empty());

    auto dir = scratch("load");
    fs::create_directories(dir);
    auto file = dir / "minimal.ini";
    std::ofstream(file) << minimal;
    EXPECT_EQ(load_scenario(file.string()).name, "minimal");
    try
    {
        load_scenario((dir / "missing.ini").string());
        FAIL() << "expected ConfigError";
    }
    catch (Error const& e)
    {
        EXPECT_EQ(e.code(), ErrorCode::config_error);
    }
    fs::remove_all(dir);
}

TEST(RunScenario, MinimalReport)
{
    auto dir = scratch("minimal");
    auto r = run_scenario(parse_scenario(minimal), quick(dir));
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(fs::path(r.directory), dir / "minimal");
    auto verdicts = slurp(dir / "minimal" / "verdicts.txt");
    EXPECT_EQ(verdicts.rfind("scenario=minimal\n", 0), 0u) << verdicts;
    EXPECT_NE(verdicts.find("check=fosd "), std::string::npos);
    EXPECT_NE(verdicts.find("status=pass\n"), std::string::npos);

    auto post = slurp(dir / "minimal" / "posterior_1.csv");
    EXPECT_EQ(post.rfind("# evidence ", 0), 0u);
    EXPECT_NE(post.find("w,cdf,density\n"), std::string::npos);
    EXPECT_EQ(std::count(post.begin(), post.end(), '\n'), 2 + 10001);
    EXPECT_TRUE(fs::exists(dir / "minimal" / "posterior_2.csv"));
    fs::remove_all(dir);
}

TEST(RunScenario, FailedExpectationIsReported)
{
    auto dir = scratch("fail");
    auto r = run_scenario(parse_scenario(replace(minimal, "fosd = strict_dominates", "fosd = dominated")),
                          quick(dir));
    EXPECT_FALSE(r.pass);
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_NE(r.records[0].fields.find("relation=strict_dominates"), std::string::npos) << r.records[0].fields;
    EXPECT_NE(slurp(dir / "minimal" / "verdicts.txt").find("status=fail\n"), std::string::npos);
    fs::remove_all(dir);
}

TEST(RunScenario, CheckErrorsAreRecorded)
{
    auto text = replace(minimal, "type = point", "type = transform");
    text = replace(text, "z = 1 2", "cutoffs = 1 5");
    text = replace(text, "pairs = 1 2\n", "");
    text = replace(text, "fosd = strict_dominates", "curve = on");
    auto dir = scratch("error");
    auto r = run_scenario(parse_scenario(text), quick(dir));
    EXPECT_FALSE(r.pass);
    bool seen = false;
    for (auto const& rec : r.records)
        seen = seen || (rec.check == "curve" && rec.fields.find("error=ZeroEvidence") != std::string::npos);
    EXPECT_TRUE(seen);
    fs::remove_all(dir);
}

TEST(RunScenario, DeterministicWithoutTimestamp)
{
    auto a = scratch("det_a"), b = scratch("det_b");
    auto s = load_scenario("thm1");
    run_scenario(s, quick(a));
    run_scenario(s, quick(b));
    std::size_t files = 0;
    for (auto const& entry : fs::directory_iterator(a / "thm1"))
    {
        auto other = b / "thm1" / entry.path().filename();
        ASSERT_TRUE(fs::exists(other)) << other;
        EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
        ++files;
    }
    EXPECT_GE(files, 4u);

    auto with_time = quick(a);
    with_time.timestamp = true;
    run_scenario(s, with_time);
    EXPECT_EQ(slurp(a / "thm1" / "verdicts.txt").rfind("# generated ", 0), 0u);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(RunScenario, SeedOverrideChangesOracleOnly)
{
    auto a = scratch("seed_a"), b = scratch("seed_b");
    auto s = load_scenario("thm1");
    auto oa = quick(a), ob = quick(b);
    ob.seed = 777;
    run_scenario(s, oa);
    run_scenario(s, ob);
    EXPECT_EQ(slurp(a / "thm1" / "posterior_1.csv"), slurp(b / "thm1" / "posterior_1.csv"));
    EXPECT_NE(slurp(a / "thm1" / "oracle.csv"), slurp(b / "thm1" / "oracle.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(RunScenario, EveryBuiltinPasses)
{
    auto dir = scratch("builtins");
    for (auto const& name : builtin_names())
    {
        auto r = run_scenario(load_scenario(name), quick(dir));
        std::string detail;
        for (auto const& rec : r.records)
            if (!rec.pass)
                detail += rec.check + " " + rec.fields + "\n";
        EXPECT_TRUE(r.pass) << name << ":\n" << detail;
        EXPECT_TRUE(fs::exists(dir / name / "verdicts.txt"));
    }
    fs::remove_all(dir);
}
