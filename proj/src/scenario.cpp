#include "screenrev/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "screenrev/bayes.hpp"
#include "screenrev/checks.hpp"
#include "screenrev/dist_text.hpp"
#include "screenrev/error.hpp"
#include "screenrev/mc.hpp"
#include "screenrev/named.hpp"
#include "screenrev/ordering.hpp"

namespace screenrev
{
namespace fs = std::filesystem;

namespace
{
[[noreturn]] void config_error(std::string const& what)
{
    fail(ErrorCode::config_error, what);
}

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(std::string const& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s)
    {
        if (ch == ' ' || ch == '\t' || ch == ',')
        {
            if (!cur.empty())
                out.push_back(std::move(cur));
            cur.clear();
        }
        else
        {
            cur.push_back(ch);
        }
    }
    if (!cur.empty())
        out.push_back(std::move(cur));
    return out;
}

//! Number with optional "a/b" fraction form
double number(std::string const& word, std::string const& where)
{
    auto slash = word.find('/');
    auto one = [&](std::string const& s) {
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size() || std::isnan(v))
            config_error(where + ": expected a number, got '" + word + "'");
        return v;
    };
    if (slash == std::string::npos)
        return one(word);
    double den = one(word.substr(slash + 1));
    if (den == 0)
        config_error(where + ": zero denominator in '" + word + "'");
    return one(word.substr(0, slash)) / den;
}

std::vector<double> numbers(std::string const& value, std::string const& where)
{
    std::vector<double> out;
    for (auto const& w : words(value))
        out.push_back(number(w, where));
    return out;
}

bool flag(std::string const& value, std::string const& where)
{
    if (value == "on" || value == "true" || value == "yes" || value == "1")
        return true;
    if (value == "off" || value == "false" || value == "no" || value == "0")
        return false;
    config_error(where + ": expected on/off, got '" + value + "'");
}

struct Entry
{
    std::string key;
    std::string value;
    int line = 0;
};

using Sections = std::map<std::string, std::vector<Entry>>;

Sections split_sections(std::string_view text)
{
    static std::set<std::string> const known{"scenario", "prior", "kernel", "signal", "conditions", "checks"};
    Sections out;
    std::string current;
    std::istringstream is{std::string(text)};
    std::string line;
    int no = 0;
    while (std::getline(is, line))
    {
        ++no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::string t = trim(line);
        if (t.empty())
            continue;
        if (t.front() == '[')
        {
            if (t.back() != ']')
                config_error("line " + std::to_string(no) + ": unterminated section header");
            current = trim(std::string_view(t).substr(1, t.size() - 2));
            if (!known.count(current))
                config_error("line " + std::to_string(no) + ": unknown section [" + current + "]");
            out[current];
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            config_error("line " + std::to_string(no) + ": expected key = value");
        if (current.empty())
            config_error("line " + std::to_string(no) + ": entry before any section header");
        out[current].push_back({trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)), no});
    }
    return out;
}

std::string where(std::string const& section, Entry const& e)
{
    return "line " + std::to_string(e.line) + " [" + section + "] " + e.key;
}

//! Distribution from family / piece / atom / tail / normalize / truncate entries
Distribution build_distribution(std::string const& section, std::vector<Entry> const& entries,
                                std::string const& prefix, std::string& spec)
{
    std::optional<Distribution> family;
    std::string schema;
    std::optional<std::pair<double, double>> cut;
    std::ostringstream desc;
    for (auto const& e : entries)
    {
        if (e.key.rfind(prefix, 0) != 0)
            continue;
        std::string key = e.key.substr(prefix.size());
        std::string at = where(section, e);
        if (key == (prefix.empty() ? "family" : ""))
        {
            auto w = words(e.value);
            if (w.empty())
                config_error(at + ": missing family name");
            std::vector<double> params;
            for (std::size_t i = 1; i < w.size(); ++i)
                params.push_back(number(w[i], at));
            try
            {
                family = make_named_prior(w[0], params);
            }
            catch (Error const& err)
            {
                config_error(at + ": " + err.what());
            }
            desc << e.value << "; ";
        }
        else if (key == "_piece" || key == "piece" || key == "_atom" || key == "atom" || key == "_tail"
                 || key == "tail")
        {
            std::string k = key.front() == '_' ? key.substr(1) : key;
            schema += k + " " + e.value + "\n";
            desc << k << ' ' << e.value << "; ";
        }
        else if (key == "normalize" || key == "_normalize")
        {
            if (flag(e.value, at))
                schema += "normalize\n";
        }
        else if (key == "truncate" || key == "_truncate")
        {
            auto v = numbers(e.value, at);
            if (v.size() != 2)
                config_error(at + ": truncate needs lo hi");
            cut = std::make_pair(v[0], v[1]);
            desc << "truncate " << e.value << "; ";
        }
    }
    if (family && !schema.empty())
        config_error("[" + section + "]: give either a family or schema lines, not both");
    Distribution d;
    try
    {
        if (family)
            d = *family;
        else if (!schema.empty())
            d = parse_distribution(schema).dist;
        else
            config_error("[" + section + "]: no distribution given");
        if (cut)
            d = truncate(d, cut->first, cut->second);
    }
    catch (Error const& err)
    {
        if (err.code() == ErrorCode::config_error)
            throw;
        config_error("[" + section + "]: " + err.what());
    }
    spec = desc.str();
    if (spec.size() >= 2)
        spec.resize(spec.size() - 2);
    return d;
}

std::set<std::string> const check_names{"fosd",        "prior_equal",     "curve",     "curve_expect",
                                        "reversal",    "ruleout_lemma",   "ruleout_corollary",
                                        "thm2",        "derivative",      "noise_threshold",
                                        "tax",         "kernel_mass",     "oracle"};

FosdRelation relation_from(std::string const& s, std::string const& at)
{
    for (auto r : {FosdRelation::strict_dominates, FosdRelation::weak_dominates, FosdRelation::equal,
                   FosdRelation::dominated, FosdRelation::incomparable})
        if (s == to_string(r))
            return r;
    config_error(at + ": unknown relation '" + s + "'");
}

RuleoutTrigger trigger_from(std::string const& s, std::string const& at)
{
    for (auto t : {RuleoutTrigger::none, RuleoutTrigger::lemma_high_values, RuleoutTrigger::lemma_low_values,
                   RuleoutTrigger::corollary_i, RuleoutTrigger::corollary_ii, RuleoutTrigger::corollary_iii})
        if (s == to_string(t))
            return t;
    config_error(at + ": unknown trigger '" + s + "'");
}

Monotonicity monotonicity_from(std::string const& s, std::string const& at)
{
    for (auto m : {Monotonicity::strictly_decreasing, Monotonicity::weakly_decreasing, Monotonicity::violated})
        if (s == to_string(m))
            return m;
    config_error(at + ": unknown monotonicity '" + s + "'");
}

//! Acceptable relations for "fosd = [not] rel rel ..."
std::vector<FosdRelation> allowed_relations(std::string const& value, std::string const& at)
{
    auto w = words(value);
    bool negate = !w.empty() && w.front() == "not";
    if (negate)
        w.erase(w.begin());
    if (w.empty())
        config_error(at + ": no relation given");
    std::set<FosdRelation> listed;
    for (auto const& s : w)
        listed.insert(relation_from(s, at));
    std::vector<FosdRelation> out;
    for (auto r : {FosdRelation::strict_dominates, FosdRelation::weak_dominates, FosdRelation::equal,
                   FosdRelation::dominated, FosdRelation::incomparable})
        if (listed.count(r) != negate)
            out.push_back(r);
    return out;
}

void validate_check(std::string const& name, std::string const& value, std::string const& at)
{
    if (name == "fosd")
        allowed_relations(value, at);
    else if (name == "prior_equal" || name == "curve_expect" || name == "noise_threshold")
        numbers(value, at);
    else if (name == "reversal" && value != "present" && value != "absent")
        config_error(at + ": expected present or absent");
    else if (name == "ruleout_lemma" || name == "ruleout_corollary")
        trigger_from(value, at);
    else if (name == "thm2")
        monotonicity_from(value, at);
    else if (name == "derivative" && value != "positive" && value != "zero" && value != "negative")
        config_error(at + ": expected positive, zero or negative");
    else if (name == "tax" && value != "holds")
        config_error(at + ": expected holds");
    else if (name == "curve" || name == "kernel_mass" || name == "oracle")
        flag(value, at);
}
}  // namespace

char const* to_string(SignalType t)
{
    switch (t)
    {
        case SignalType::point:
            return "point";
        case SignalType::transform:
            return "transform";
        case SignalType::additive:
            return "additive";
        case SignalType::kernel:
            return "kernel";
    }
    return "unknown";
}

//---------------------------------------------------------------------------//
// Parsing
//---------------------------------------------------------------------------//
Scenario parse_scenario(std::string_view text)
{
    Sections sec = split_sections(text);
    Scenario s;

    for (auto const& e : sec["scenario"])
    {
        if (e.key == "name")
            s.name = e.value;
        else if (e.key == "description")
            s.description = e.value;
        else
            config_error(where("scenario", e) + ": unknown key");
    }
    if (s.name.empty())
        config_error("[scenario] needs a name");
    if (s.name.find_first_of("/\\ ") != std::string::npos || s.name == "." || s.name == "..")
        config_error("[scenario] name must be a plain directory name");

    for (auto const& e : sec["prior"])
    {
        static std::set<std::string> const keys{"family", "piece", "atom", "tail", "normalize", "truncate"};
        if (!keys.count(e.key))
            config_error(where("prior", e) + ": unknown key");
    }
    s.prior = build_distribution("prior", sec["prior"], "", s.prior_spec);

    // Kernel
    std::map<std::string, Entry> kv;
    std::vector<Entry> noise_entries;
    for (auto const& e : sec["kernel"])
    {
        static std::set<std::string> const keys{"kind", "iota", "xi", "p", "noise"};
        if (e.key.rfind("noise_", 0) == 0)
        {
            noise_entries.push_back(e);
            continue;
        }
        if (!keys.count(e.key))
            config_error(where("kernel", e) + ": unknown key");
        kv[e.key] = e;
    }
    if (!kv.count("kind"))
        config_error("[kernel] needs a kind");
    std::string kind = kv["kind"].value;
    auto noise = [&]() {
        std::vector<Entry> entries = noise_entries;
        if (kv.count("noise"))
        {
            Entry e = kv["noise"];
            e.key = "family";
            entries.push_back(e);
        }
        for (auto& e : entries)
            if (e.key.rfind("noise_", 0) == 0)
                e.key = e.key.substr(6);
        std::string spec;
        Distribution d = build_distribution("kernel", entries, "", spec);
        return std::make_pair(d, spec);
    };
    auto param = [&](char const* key) {
        if (!kv.count(key))
            config_error(std::string("[kernel] ") + kind + " needs " + key);
        return number(kv[key].value, where("kernel", kv[key]));
    };
    try
    {
        if (kind == "triangle_rectangle")
        {
            s.kernel = triangle_rectangle_kernel();
        }
        else if (kind == "three_piece")
        {
            s.kernel = three_piece_kernel(param("iota"), param("xi"));
        }
        else if (kind == "additive")
        {
            auto [d, spec] = noise();
            s.kernel = additive_kernel(d);
            s.kernel_spec = spec;
        }
        else if (kind == "evasion")
        {
            auto [d, spec] = noise();
            if (!kv.count("p"))
                config_error("[kernel] evasion needs p");
            auto w = words(kv["p"].value);
            std::string at = where("kernel", kv["p"]);
            EvasionProbability p;
            if (w.size() == 2 && w[0] == "constant")
                p = EvasionProbability::constant(number(w[1], at));
            else if (w.size() == 3 && w[0] == "logistic")
                p = EvasionProbability::logistic(number(w[1], at), number(w[2], at));
            else
                config_error(at + ": expected 'constant c' or 'logistic k x0'");
            s.kernel = evasion_kernel(p, d);
            s.kernel_spec = spec;
        }
        else
        {
            config_error("[kernel] unknown kind '" + kind + "'");
        }
    }
    catch (Error const& err)
    {
        if (err.code() == ErrorCode::config_error)
            throw;
        config_error(std::string("[kernel] ") + err.what());
    }
    s.kernel_spec = s.kernel.describe() + (s.kernel_spec.empty() ? "" : " noise: " + s.kernel_spec);

    for (auto const& e : sec["signal"])
    {
        if (e.key != "type")
            config_error(where("signal", e) + ": unknown key");
        if (e.value == "point")
            s.signal = SignalType::point;
        else if (e.value == "transform")
            s.signal = SignalType::transform;
        else if (e.value == "additive")
            s.signal = SignalType::additive;
        else if (e.value == "kernel")
            s.signal = SignalType::kernel;
        else
            config_error(where("signal", e) + ": unknown signal type '" + e.value + "'");
    }

    for (auto const& e : sec["conditions"])
    {
        std::string at = where("conditions", e);
        if (e.key == "z")
            s.z = numbers(e.value, at);
        else if (e.key == "cutoffs")
            s.cutoffs = numbers(e.value, at);
        else if (e.key == "w")
            s.w = numbers(e.value, at);
        else if (e.key == "pairs")
        {
            auto v = numbers(e.value, at);
            if (v.size() % 2 != 0 || v.empty())
                config_error(at + ": pairs need an even count of values");
            for (std::size_t i = 0; i < v.size(); i += 2)
            {
                if (!(v[i] < v[i + 1]))
                    config_error(at + ": each pair needs first < second");
                s.pairs.emplace_back(v[i], v[i + 1]);
            }
        }
        else
            config_error(at + ": unknown key");
    }

    for (auto const& e : sec["checks"])
    {
        std::string at = where("checks", e);
        if (e.key == "tol")
            s.tol = number(e.value, at);
        else if (e.key == "grid")
            s.grid = static_cast<int>(number(e.value, at));
        else if (e.key == "mc_n")
            s.mc_n = static_cast<std::size_t>(number(e.value, at));
        else if (e.key == "seed")
            s.seed = static_cast<std::uint64_t>(number(e.value, at));
        else if (e.key == "bandwidth")
            s.bandwidth = number(e.value, at);
        else if (e.key == "fosd_probes")
            s.fosd_probes = flag(e.value, at);
        else if (e.key == "oracle_samples")
            s.oracle_samples = flag(e.value, at);
        else if (check_names.count(e.key))
        {
            validate_check(e.key, e.value, at);
            s.checks.emplace_back(e.key, e.value);
        }
        else
            config_error(at + ": unknown check");
    }
    if (s.checks.empty())
        config_error("scenario '" + s.name + "' requests no checks");
    if (!(s.tol > 0) || s.grid < 2 || s.mc_n < 1 || !(s.bandwidth > 0))
        config_error("scenario '" + s.name + "' has invalid settings");

    bool threshold = s.signal != SignalType::point;
    for (auto const& [name, value] : s.checks)
    {
        if ((name == "curve" || name == "curve_expect" || name == "reversal") && !threshold)
            config_error("check '" + name + "' needs a threshold signal type");
        if ((name == "curve" || name == "curve_expect" || name == "reversal") && s.cutoffs.empty())
            config_error("check '" + name + "' needs cutoffs");
        if ((name == "fosd" || name == "ruleout_lemma") && s.pairs.empty())
            config_error("check '" + name + "' needs pairs");
        if ((name == "derivative" || name == "tax") && (s.w.empty() || s.z.empty()))
            config_error("check '" + name + "' needs w and z values");
        if (name == "prior_equal" && numbers(value, name).empty())
            config_error("check 'prior_equal' needs values");
        if (name == "tax" && !s.kernel.evasion())
            config_error("check 'tax' needs an evasion kernel");
        if (name == "thm2" && s.pairs.empty() && s.z.empty())
            config_error("check 'thm2' needs z values or pairs");
    }
    if (s.signal == SignalType::additive && s.kernel.evasion())
        config_error("additive threshold signal needs noise independent of x");
    return s;
}

Scenario load_scenario(std::string const& target)
{
    std::string text = builtin_text(target);
    if (text.empty())
    {
        std::ifstream is(target);
        if (!is)
            config_error("'" + target + "' is neither a builtin nor a readable config file");
        std::ostringstream os;
        os << is.rdbuf();
        text = os.str();
    }
    return parse_scenario(text);
}

//---------------------------------------------------------------------------//
// Running
//---------------------------------------------------------------------------//
namespace
{
class Runner
{
  public:
    Runner(Scenario const& s, RunOptions const& o) : s_(s), o_(o)
    {
        tol_ = o.tol.value_or(s.tol);
        grid_ = o.grid.value_or(s.grid);
        mc_n_ = o.mc_n.value_or(s.mc_n);
        seed_ = o.seed.value_or(s.seed);
        dir_ = (fs::path(o.out_dir) / s.name).string();
        if (s.signal == SignalType::transform)
        {
            try
            {
                ts_ = threshold_transform(s.kernel);
            }
            catch (Error const& e)
            {
                transform_error_ = e.what();
            }
        }
    }

    RunResult run()
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec)
            fail(ErrorCode::io_error, "cannot create report directory '" + dir_ + "': " + ec.message());
        for (auto const& [name, value] : s_.checks)
            guarded(name, value);
        write_posteriors();
        RunResult r;
        r.name = s_.name;
        r.directory = dir_;
        r.records = records_;
        r.pass = std::all_of(records_.begin(), records_.end(), [](CheckRecord const& c) { return c.pass; });
        write_verdicts(r.pass);
        return r;
    }

  private:
    Scenario const& s_;
    RunOptions const& o_;
    double tol_;
    int grid_;
    std::size_t mc_n_;
    std::uint64_t seed_;
    std::string dir_;
    std::optional<ThresholdSignal> ts_;
    std::string transform_error_;
    std::map<double, Posterior> point_cache_;
    std::map<double, Posterior> threshold_cache_;
    std::vector<CheckRecord> records_;

    std::string header() const
    {
        if (!o_.timestamp)
            return {};
        auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        std::ostringstream os;
        os << "# generated " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n';
        return os.str();
    }

    std::ofstream open(std::string const& file) const
    {
        std::string path = (fs::path(dir_) / file).string();
        std::ofstream os(path, std::ios::binary);
        if (!os)
            fail(ErrorCode::io_error, "cannot write '" + path + "'");
        os << header();
        return os;
    }

    void record(std::string check, std::string fields, bool pass)
    {
        records_.push_back({std::move(check), std::move(fields), pass});
    }

    void guarded(std::string const& name, std::string const& value)
    {
        try
        {
            dispatch(name, value);
        }
        catch (Error const& e)
        {
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            record(name, std::string("error=") + to_string(e.code()) + " message=\"" + msg + "\"", false);
        }
    }

    Posterior const& point(double z)
    {
        auto it = point_cache_.find(z);
        if (it == point_cache_.end())
            it = point_cache_.emplace(z, posterior_point(s_.prior, s_.kernel, z)).first;
        return it->second;
    }

    Posterior const& threshold(double b)
    {
        auto it = threshold_cache_.find(b);
        if (it != threshold_cache_.end())
            return it->second;
        Posterior p;
        switch (s_.signal)
        {
            case SignalType::transform:
                p = posterior_threshold(s_.prior, transform(), b);
                break;
            case SignalType::additive:
                p = posterior_threshold_additive(s_.prior, s_.kernel.noise(), b);
                break;
            case SignalType::kernel:
                p = posterior_threshold_kernel(s_.prior, s_.kernel, b);
                break;
            case SignalType::point:
                return point(b);
        }
        return threshold_cache_.emplace(b, std::move(p)).first->second;
    }

    ThresholdSignal const& transform()
    {
        if (!ts_)
            fail(ErrorCode::not_a_cdf, transform_error_);
        return *ts_;
    }

    //! Posterior that conditioning values (pairs, prior_equal) refer to
    Posterior const& posterior(double v) { return s_.signal == SignalType::point ? point(v) : threshold(v); }

    std::vector<double> x_probe_grid(int n) const
    {
        double lo = s_.prior.support_lo(), hi = s_.prior.support_hi();
        if (!std::isfinite(lo))
            lo = s_.prior.quantile(1e-9);
        if (!std::isfinite(hi))
            hi = s_.prior.quantile(1 - 1e-9);
        std::vector<double> g;
        for (int i = 0; i < n; ++i)
            g.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        return g;
    }

    void dispatch(std::string const& name, std::string const& value)
    {
        if (name == "fosd")
            check_fosd(value);
        else if (name == "prior_equal")
            check_prior_equal(value);
        else if (name == "curve")
            check_curve(value);
        else if (name == "curve_expect")
            check_curve_expect(value);
        else if (name == "reversal")
            check_reversal(value);
        else if (name == "ruleout_lemma")
            check_ruleout_lemma(value);
        else if (name == "ruleout_corollary")
            check_ruleout_corollary(value);
        else if (name == "thm2")
            check_thm2(value);
        else if (name == "derivative")
            check_derivative(value);
        else if (name == "noise_threshold")
            check_noise_threshold(value);
        else if (name == "tax")
            check_tax();
        else if (name == "kernel_mass")
            check_kernel_mass(value);
        else if (name == "oracle")
            check_oracle(value);
    }

    FosdOptions fosd_options() const
    {
        FosdOptions f;
        f.tol = tol_;
        f.grid = grid_;
        return f;
    }

    void check_fosd(std::string const& value)
    {
        auto allowed = allowed_relations(value, "fosd");
        for (auto [a, b] : s_.pairs)
        {
            std::vector<FosdProbe> probes;
            auto v = fosd_compare(posterior(a).dist, posterior(b).dist, fosd_options(),
                                  s_.fosd_probes ? &probes : nullptr);
            bool pass = std::find(allowed.begin(), allowed.end(), v.relation) != allowed.end();
            std::ostringstream os;
            os << "z1=" << format_number(a) << " z2=" << format_number(b) << " relation=" << to_string(v.relation)
               << " expected=\"" << value << "\" max_gap_pos=" << format_number(v.max_gap_pos)
               << " max_gap_neg=" << format_number(v.max_gap_neg)
               << " min_interior_gap=" << format_number(v.min_interior_gap) << " tol=" << format_number(v.tol)
               << " probes=" << v.n_probes << " witnesses=";
            for (std::size_t i = 0; i < v.witnesses.size(); ++i)
                os << (i ? ";" : "") << format_number(v.witnesses[i]);
            record("fosd", os.str(), pass);
            if (s_.fosd_probes)
            {
                auto out = open("fosd_" + format_number(a) + "_" + format_number(b) + ".csv");
                out << "w,left,F1,F2\n";
                for (auto const& p : probes)
                    out << format_number(p.w) << ',' << (p.left ? 1 : 0) << ',' << format_number(p.f1) << ','
                        << format_number(p.f2) << '\n';
            }
        }
    }

    void check_prior_equal(std::string const& value)
    {
        for (double v : numbers(value, "prior_equal"))
        {
            auto verdict = fosd_compare(posterior(v).dist, s_.prior, fosd_options());
            double sup = std::max(verdict.max_gap_pos, verdict.max_gap_neg);
            std::ostringstream os;
            os << "value=" << format_number(v) << " sup_gap=" << format_number(sup) << " tol=" << format_number(tol_);
            record("prior_equal", os.str(), verdict.relation == FosdRelation::equal);
        }
    }

    ScreeningCurve curve()
    {
        ScreeningCurve c;
        c.cutoffs = s_.cutoffs;
        for (double b : s_.cutoffs)
        {
            auto const& p = threshold(b);
            c.values.push_back(mean(p.dist));
            c.evidences.push_back(p.evidence);
        }
        return c;
    }

    void check_curve(std::string const& value)
    {
        if (!flag(value, "curve"))
            return;
        auto c = curve();
        auto out = open("curve.csv");
        out << "b,value,evidence\n";
        bool monotone_evidence = true;
        for (std::size_t i = 0; i < c.cutoffs.size(); ++i)
        {
            out << format_number(c.cutoffs[i]) << ',' << format_number(c.values[i]) << ','
                << format_number(c.evidences[i]) << '\n';
            if (i > 0 && c.evidences[i] > c.evidences[i - 1] + 1e-12)
                monotone_evidence = false;
        }
        std::ostringstream os;
        os << "cutoffs=" << c.cutoffs.size() << " evidence_nonincreasing=" << (monotone_evidence ? "true" : "false");
        record("curve", os.str(), monotone_evidence);
    }

    void check_curve_expect(std::string const& value)
    {
        auto expected = numbers(value, "curve_expect");
        auto c = curve();
        if (expected.size() != c.values.size())
            config_error("curve_expect needs one value per cutoff");
        for (std::size_t i = 0; i < expected.size(); ++i)
        {
            double err = std::abs(c.values[i] - expected[i]);
            std::ostringstream os;
            os << "b=" << format_number(c.cutoffs[i]) << " value=" << format_number(c.values[i])
               << " expected=" << format_number(expected[i]) << " error=" << format_number(err);
            record("curve_expect", os.str(), err <= tol_);
        }
    }

    void check_reversal(std::string const& value)
    {
        auto c = curve();
        auto rev = detect_reversals(c, tol_);
        std::ostringstream os;
        os << "count=" << rev.size() << " expected=" << value;
        for (auto const& r : rev)
            os << " pair=" << format_number(c.cutoffs[r.i]) << ";" << format_number(c.cutoffs[r.j])
               << " gap=" << format_number(r.gap);
        record("reversal", os.str(), (value == "present") == !rev.empty());
    }

    std::pair<double, double> noise_range() const { return s_.kernel.noise_range(); }

    void check_ruleout_lemma(std::string const& value)
    {
        auto expected = trigger_from(value, "ruleout_lemma");
        auto [lo, hi] = noise_range();
        for (auto [a, b] : s_.pairs)
        {
            auto v = ruleout_lemma(s_.prior, lo, hi, a, b);
            bool pass = v.trigger == expected;
            std::ostringstream os;
            os << "z1=" << format_number(a) << " z2=" << format_number(b) << " trigger=" << to_string(v.trigger)
               << " expected=" << value;
            if (v.precluded)
            {
                os << " witness=" << (v.witness.lo_closed ? "[" : "(") << format_number(v.witness.lo) << ";"
                   << format_number(v.witness.hi) << (v.witness.hi_closed ? "]" : ")")
                   << " witness_mass=" << format_number(v.witness.mass);
                auto f = fosd_compare(posterior(a).dist, posterior(b).dist, fosd_options());
                bool sound = f.relation != FosdRelation::strict_dominates
                             && f.relation != FosdRelation::weak_dominates;
                os << " fosd=" << to_string(f.relation) << " sound=" << (sound ? "true" : "false");
                pass = pass && sound;
            }
            record("ruleout_lemma", os.str(), pass);
        }
    }

    void check_ruleout_corollary(std::string const& value)
    {
        auto expected = trigger_from(value, "ruleout_corollary");
        auto [lo, hi] = noise_range();
        auto v = ruleout_corollary(s_.prior, lo, hi);
        bool pass = v.trigger == expected;
        std::ostringstream os;
        os << "trigger=" << to_string(v.trigger) << " expected=" << value << " noise_range=" << format_number(lo)
           << ";" << format_number(hi) << " support=" << format_number(s_.prior.support_lo()) << ";"
           << format_number(s_.prior.support_hi());
        if (v.precluded)
        {
            bool sound = true;
            for (auto [a, b] : s_.pairs)
            {
                auto f = fosd_compare(posterior(a).dist, posterior(b).dist, fosd_options());
                if (f.relation == FosdRelation::strict_dominates || f.relation == FosdRelation::weak_dominates)
                    sound = false;
            }
            os << " pairs_checked=" << s_.pairs.size() << " sound=" << (sound ? "true" : "false");
            pass = pass && sound;
        }
        record("ruleout_corollary", os.str(), pass);
    }

    std::pair<double, double> z_range() const
    {
        std::vector<double> zs = s_.z;
        for (auto [a, b] : s_.pairs)
        {
            zs.push_back(a);
            zs.push_back(b);
        }
        auto [mn, mx] = std::minmax_element(zs.begin(), zs.end());
        return {*mn, *mx};
    }

    void check_thm2(std::string const& value)
    {
        auto expected = monotonicity_from(value, "thm2");
        auto [z1, z2] = z_range();
        auto r = check_h_monotone_range(s_.kernel, z1, z2, x_probe_grid(101), 11);
        std::size_t skipped = 0, violations = 0;
        for (auto const& rep : r.reports)
        {
            skipped += rep.skipped_points.size();
            violations += rep.violation_points.size();
        }
        std::ostringstream os;
        os << "monotone=" << to_string(r.monotone) << " expected=" << value << " scope=z_range["
           << format_number(z1) << ";" << format_number(z2) << "] z_probes=" << r.reports.size()
           << " violations=" << violations << " skipped=" << skipped;
        record("thm2", os.str(), r.monotone == expected);
    }

    void check_derivative(std::string const& value)
    {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double z : s_.z)
        {
            for (double w : s_.w)
            {
                double d = posterior_z_derivative(s_.prior, s_.kernel, w, z);
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
        }
        bool pass = value == "positive" ? lo > 0 : value == "negative" ? hi < 0 : std::max(-lo, hi) <= 1e-8;
        std::ostringstream os;
        os << "expected=" << value << " min=" << format_number(lo) << " max=" << format_number(hi)
           << " probes=" << s_.z.size() * s_.w.size();
        record("derivative", os.str(), pass);
    }

    void check_noise_threshold(std::string const& value)
    {
        double expected = numbers(value, "noise_threshold").at(0);
        auto t = independent_noise_threshold(s_.kernel.noise());
        double err = std::abs(t.eps_hat - expected);
        double xbar = s_.prior.support_hi();
        double start = xbar + t.eps_hat;
        bool in_region = true;
        for (auto [a, b] : s_.pairs)
            if (a < start)
                in_region = false;
        std::ostringstream os;
        os << "eps_hat=" << format_number(t.eps_hat) << " expected=" << format_number(expected)
           << " strict=" << (t.strict ? "true" : "false") << " region_start=" << format_number(start)
           << " pairs_in_region=" << (in_region ? "true" : "false");
        record("noise_threshold", os.str(), err <= 1e-9 * std::max(1.0, std::abs(expected)));
    }

    void check_tax()
    {
        auto const& zero = point(0.0);
        std::size_t probes = 0;
        bool holds = true;
        double worst = std::numeric_limits<double>::infinity();
        for (double z : s_.z)
        {
            if (z <= 0)
                continue;
            auto const& p = point(z);
            for (double w : s_.w)
            {
                double diff = p.dist.cdf(w) - zero.dist.cdf(w);
                worst = std::min(worst, diff);
                holds = holds && diff > 0;
                ++probes;
            }
        }
        double implied = (*s_.kernel.evasion())(0.0) * s_.prior.density(0.0) / zero.evidence;
        double atom = zero.dist.atom_at(0.0);
        bool atom_ok = std::abs(atom - implied) <= tol_;
        auto zbar = tax_zbar(s_.prior, s_.kernel, s_.w, z_range().second, 10);
        std::ostringstream os;
        os << "probes=" << probes << " min_gap=" << format_number(worst) << " atom=" << format_number(atom)
           << " implied_atom=" << format_number(implied) << " zbar_lower_bound=" << format_number(zbar.lower_bound)
           << " zbar_unbounded_in_scan=" << (zbar.unbounded ? "true" : "false");
        record("tax", os.str(), holds && probes > 0 && atom_ok);
    }

    void check_kernel_mass(std::string const& value)
    {
        if (!flag(value, "kernel_mass"))
            return;
        double worst = 0;
        auto xs = x_probe_grid(100);
        for (double x : xs)
            worst = std::max(worst, std::abs(s_.kernel.total_mass(x) - 1));
        std::ostringstream os;
        os << "x_probes=" << xs.size() << " max_error=" << format_number(worst);
        record("kernel_mass", os.str(), worst <= 1e-9);
    }

    BandSide band_side(double z) const
    {
        if (s_.kernel.evasion())
        {
            if (z == s_.prior.support_hi())
                return BandSide::left;
            if (z == s_.prior.support_lo())
                return BandSide::right;
        }
        return BandSide::centered;
    }

    void check_oracle(std::string const& value)
    {
        if (!flag(value, "oracle"))
            return;
        auto out = open("oracle.csv");
        out << "conditioning,value,n,seed,sup_gap,window_gap,band,acceptance,pass\n";
        std::uint64_t seed = seed_;
        constexpr double confidence = 1 - 1e-6;
        auto emit = [&](char const* kind, double v, EmpiricalCdf const& e, Posterior const& p,
                        std::vector<AtomWindow> const& windows) {
            auto c = compare_to_cdf(e, p.dist, confidence, windows);
            double acc = e.proposed ? static_cast<double>(e.accepted) / static_cast<double>(e.proposed) : 0.0;
            out << kind << ',' << format_number(v) << ',' << e.n() << ',' << e.seed << ',' << format_number(c.sup_gap)
                << ',' << format_number(c.window_gap) << ',' << format_number(c.band) << ',' << format_number(acc)
                << ',' << (c.pass ? 1 : 0) << '\n';
            std::ostringstream os;
            os << "conditioning=" << kind << " value=" << format_number(v) << " n=" << e.n()
               << " sup_gap=" << format_number(c.sup_gap) << " window_gap=" << format_number(c.window_gap)
               << " band=" << format_number(c.band);
            record("oracle", os.str(), c.pass);
            if (s_.oracle_samples)
                write_samples((fs::path(dir_) / (std::string("samples_") + kind + "_" + format_number(v) + ".bin")).string(), e);
        };
        for (double z : s_.z)
        {
            auto const& p = point(z);
            auto cond = McCondition::band(z, s_.bandwidth, band_side(z));
            auto e = sample_conditional(s_.prior, s_.kernel, cond, mc_n_, seed++);
            emit("point", z, e, p, kernel_atom_windows(p.dist, s_.prior, cond));
        }
        if (s_.signal == SignalType::point)
            return;
        for (double b : s_.cutoffs)
        {
            auto const& p = threshold(b);
            EmpiricalCdf e;
            if (s_.signal == SignalType::transform)
                e = sample_conditional(s_.prior, transform(), b, mc_n_, seed++);
            else if (s_.signal == SignalType::additive)
                e = sample_conditional(s_.prior, additive_kernel(s_.kernel.noise()), McCondition::threshold(b), mc_n_, seed++);
            else
                e = sample_conditional(s_.prior, s_.kernel, McCondition::threshold(b), mc_n_, seed++);
            emit("threshold", b, e, p, {});
        }
    }

    void write_posterior(std::string const& file, Posterior const& p)
    {
        Distribution const& d = p.dist;
        double lo = d.support_lo(), hi = d.support_hi();
        if (!std::isfinite(lo))
            lo = d.quantile(1e-12);
        if (!std::isfinite(hi))
            hi = d.quantile(1 - 1e-12);
        auto out = open(file);
        out << "# evidence " << format_number(p.evidence) << '\n';
        out << "w,cdf,density\n";
        for (int i = 0; i <= grid_; ++i)
        {
            double w = lo + (hi - lo) * i / grid_;
            out << format_number(w) << ',' << format_number(d.cdf(w)) << ',' << format_number(d.density(w)) << '\n';
        }
    }

    void write_posteriors()
    {
        for (double z : s_.z)
        {
            try
            {
                write_posterior("posterior_" + format_number(z) + ".csv", point(z));
            }
            catch (Error const& e)
            {
                record("posterior", "z=" + format_number(z) + " error=" + to_string(e.code()), false);
            }
        }
        if (s_.signal == SignalType::point)
            return;
        for (double b : s_.cutoffs)
        {
            try
            {
                write_posterior("posterior_ge_" + format_number(b) + ".csv", threshold(b));
            }
            catch (Error const& e)
            {
                record("posterior", "b=" + format_number(b) + " error=" + to_string(e.code()), false);
            }
        }
    }

    void write_verdicts(bool pass)
    {
        auto out = open("verdicts.txt");
        out << "scenario=" << s_.name << '\n';
        out << "prior=\"" << s_.prior_spec << "\"\n";
        out << "kernel=\"" << s_.kernel_spec << "\"\n";
        out << "signal=" << to_string(s_.signal) << '\n';
        for (auto const& r : records_)
            out << "check=" << r.check << ' ' << r.fields << " pass=" << (r.pass ? "true" : "false") << '\n';
        out << "status=" << (pass ? "pass" : "fail") << '\n';
    }
};
}  // namespace

RunResult run_scenario(Scenario const& s, RunOptions const& options)
{
    return Runner(s, options).run();
}

}  // namespace screenrev
