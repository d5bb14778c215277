#include "screenrev/dist_text.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "screenrev/error.hpp"

namespace screenrev
{
namespace
{
std::vector<std::string> split_words(std::string_view line)
{
    std::vector<std::string> words;
    std::istringstream is{std::string(line)};
    std::string w;
    while (is >> w)
        words.push_back(w);
    return words;
}

[[noreturn]] void syntax(int line_no, std::string const& what)
{
    fail(ErrorCode::config_error, "line " + std::to_string(line_no) + ": " + what);
}

double to_number(std::string const& word, int line_no)
{
    char* end = nullptr;
    double v = std::strtod(word.c_str(), &end);
    if (word.empty() || end != word.c_str() + word.size() || std::isnan(v))
        syntax(line_no, "expected a number, got '" + word + "'");
    return v;
}

Term parse_term(std::vector<std::string> const& w, std::size_t& i, double origin, int line_no)
{
    if (i >= w.size())
        syntax(line_no, "missing term");
    std::string kind = w[i++];
    auto take = [&]() {
        if (i >= w.size() || w[i] == "+")
            syntax(line_no, "missing parameter for " + kind + " term");
        return to_number(w[i++], line_no);
    };
    if (kind == "poly")
    {
        std::vector<double> c;
        while (i < w.size() && w[i] != "+")
            c.push_back(to_number(w[i++], line_no));
        if (c.empty())
            syntax(line_no, "poly term needs coefficients");
        if (c.size() > static_cast<std::size_t>(Polynomial::max_degree) + 1)
            syntax(line_no, "poly degree exceeds " + std::to_string(Polynomial::max_degree));
        return PolyTerm{origin, Polynomial(std::move(c))};
    }
    if (kind == "exp")
    {
        double a = take(), r = take(), anchor = take();
        return ExpTerm{a, r, anchor};
    }
    if (kind == "power")
    {
        double a = take(), c = take(), k = take();
        return PowerTerm{a, c, k};
    }
    syntax(line_no, "unknown term kind '" + kind + "'");
}
}  // namespace

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ParsedDistribution parse_distribution(std::string_view text)
{
    std::vector<Piece> pieces;
    std::vector<Atom> atoms;
    std::vector<TailDescriptor> tails;
    BuildOptions opts;
    std::optional<double> evidence;

    std::istringstream is{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(is, line))
    {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        auto w = split_words(line);
        if (w.empty())
            continue;
        std::string const& key = w[0];
        if (key == "piece")
        {
            if (w.size() < 4)
                syntax(line_no, "piece needs lo, hi and at least one term");
            Piece p{to_number(w[1], line_no), to_number(w[2], line_no), {}};
            double origin = std::isfinite(p.lo) ? p.lo : p.hi;
            std::size_t i = 3;
            while (true)
            {
                p.terms.push_back(parse_term(w, i, origin, line_no));
                if (i >= w.size())
                    break;
                if (w[i] != "+")
                    syntax(line_no, "expected '+' between terms");
                ++i;
            }
            pieces.push_back(std::move(p));
        }
        else if (key == "atom")
        {
            if (w.size() != 3)
                syntax(line_no, "atom needs location and mass");
            atoms.push_back({to_number(w[1], line_no), to_number(w[2], line_no)});
        }
        else if (key == "tail")
        {
            if (w.size() < 5 || w.size() > 7)
                syntax(line_no, "tail needs kind, side, rate or shape, anchor");
            TailDescriptor td;
            if (w[1] == "exponential")
                td.kind = TailKind::exponential;
            else if (w[1] == "pareto")
                td.kind = TailKind::pareto;
            else
                syntax(line_no, "unknown tail kind '" + w[1] + "'");
            if (w[2] == "lower")
                td.side = TailSide::lower;
            else if (w[2] == "upper")
                td.side = TailSide::upper;
            else
                syntax(line_no, "tail side must be lower or upper");
            td.rate_or_shape = to_number(w[3], line_no);
            td.anchor = to_number(w[4], line_no);
            if (w.size() > 5)
                td.mass = to_number(w[5], line_no);
            if (w.size() > 6)
                td.center = to_number(w[6], line_no);
            tails.push_back(td);
        }
        else if (key == "normalize")
        {
            opts.normalize = true;
        }
        else if (key == "evidence")
        {
            if (w.size() != 2)
                syntax(line_no, "evidence needs one value");
            evidence = to_number(w[1], line_no);
        }
        else
        {
            syntax(line_no, "unknown record '" + key + "'");
        }
    }
    return {make_distribution(std::move(pieces), std::move(atoms), tails, opts), evidence};
}

std::string to_text(Distribution const& d, std::optional<double> evidence)
{
    std::ostringstream os;
    for (auto const& p : d.pieces())
    {
        double origin = std::isfinite(p.lo) ? p.lo : p.hi;
        os << "piece " << format_number(p.lo) << ' ' << format_number(p.hi);
        bool first = true;
        for (auto const& t : p.terms)
        {
            os << (first ? " " : " + ");
            first = false;
            if (auto const* poly = std::get_if<PolyTerm>(&t))
            {
                auto r = std::get<PolyTerm>(rebased(*poly, origin));
                os << "poly";
                if (r.poly.is_zero())
                    os << " 0";
                for (double c : r.poly.coeffs())
                    os << ' ' << format_number(c);
            }
            else if (auto const* e = std::get_if<ExpTerm>(&t))
            {
                os << "exp " << format_number(e->amplitude) << ' ' << format_number(e->rate) << ' '
                   << format_number(e->anchor);
            }
            else if (auto const* w = std::get_if<PowerTerm>(&t))
            {
                os << "power " << format_number(w->amplitude) << ' ' << format_number(w->center)
                   << ' ' << format_number(w->exponent);
            }
        }
        os << '\n';
    }
    for (auto const& a : d.atoms())
        os << "atom " << format_number(a.location) << ' ' << format_number(a.mass) << '\n';
    if (evidence)
        os << "evidence " << format_number(*evidence) << '\n';
    return os.str();
}

}  // namespace screenrev
