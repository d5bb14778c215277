#include "screenrev/mc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "screenrev/dist_text.hpp"
#include "screenrev/error.hpp"
#include "screenrev/philox.hpp"

namespace screenrev
{
namespace
{
constexpr double inf = std::numeric_limits<double>::infinity();

//! Uniforms for draw i of a block; \c sub selects independent streams per draw
struct Stream
{
    Philox4x32::Key key;
    std::uint32_t block;

    std::array<double, 2> open_pair(std::uint32_t i, std::uint32_t sub) const
    {
        auto r = Philox4x32::generate({i, block, sub, 0x5c2ee7u}, key);
        // Shift into (0, 1) so quantiles never see an endpoint
        auto open = [](std::uint32_t hi, std::uint32_t lo) {
            std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
            return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
        };
        return {open(r[0], r[1]), open(r[2], r[3])};
    }
};

using BlockFn = std::function<void(Stream const&, std::uint32_t, std::vector<double>&)>;

EmpiricalCdf run_blocks(std::size_t n, std::uint64_t seed, McOptions const& options, std::string conditioning,
                        BlockFn const& fn)
{
    if (n == 0)
        fail(ErrorCode::invalid_argument, "sample count must be positive");
    if (options.block == 0)
        fail(ErrorCode::invalid_argument, "block size must be positive");
    Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());

    EmpiricalCdf e;
    e.seed = seed;
    e.conditioning = std::move(conditioning);
    std::uint32_t next = 0;
    auto starved = [&]() {
        std::ostringstream os;
        os << "acceptance rate " << (e.proposed ? static_cast<double>(e.accepted) / e.proposed : 0.0)
           << " below " << options.min_acceptance << " for " << e.conditioning;
        fail(ErrorCode::acceptance_starved, os.str());
    };
    while (e.samples.size() < n)
    {
        // The first block runs alone as the probe batch
        unsigned batch = next == 0 ? 1 : workers;
        std::vector<std::vector<double>> out(batch);
        auto work = [&](unsigned w) { fn(Stream{key, next + w}, options.block, out[w]); };
        if (batch == 1)
        {
            work(0);
        }
        else
        {
            std::vector<std::thread> threads;
            for (unsigned w = 0; w < batch; ++w)
                threads.emplace_back(work, w);
            for (auto& t : threads)
                t.join();
        }
        for (auto& v : out)
        {
            if (e.samples.size() >= n)
                break;
            e.proposed += options.block;
            e.accepted += v.size();
            std::size_t take = std::min(v.size(), n - e.samples.size());
            e.samples.insert(e.samples.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(take));
        }
        next += batch;
        if (static_cast<double>(e.accepted) < options.min_acceptance * static_cast<double>(e.proposed))
            starved();
    }
    std::sort(e.samples.begin(), e.samples.end());
    return e;
}

struct Band
{
    double lo;
    double hi;
};

Band band_of(McCondition const& c)
{
    double bw = c.bandwidth;
    if (!(bw > 0))
        fail(ErrorCode::invalid_argument, "bandwidth must be positive");
    switch (c.side)
    {
        case BandSide::centered:
            return {c.value - bw, c.value + bw};
        case BandSide::left:
            return {c.value - 2 * bw, c.value};
        case BandSide::right:
            return {c.value, c.value + 2 * bw};
    }
    return {c.value - bw, c.value + bw};
}

//! Envelope cells over x for band conditioning
struct Cells
{
    std::vector<double> edges;
    std::vector<double> base;     // prior cdf below the cell
    std::vector<double> pmass;    // prior mass of the cell
    std::vector<double> glo;      // noise cdf below the cell window
    std::vector<double> gmass;    // noise mass of the cell window
    std::vector<double> atom;     // 1 when the cell meets the band (evasion atom)
    std::vector<double> cum;      // cumulative envelope weight
};

Cells build_cells(Distribution const& prior, SignalKernel const& k, Band band, double bw, int max_cells)
{
    Distribution const& g = k.noise();
    double gl = g.support_lo(), gh = g.support_hi();
    bool evasion = k.evasion().has_value();
    double xl = band.lo - gh, xh = band.hi - gl;
    if (evasion)
    {
        xl = std::min(xl, band.lo);
        xh = std::max(xh, band.hi);
    }
    xl = std::max(xl, prior.support_lo());
    xh = std::min(xh, prior.support_hi());
    Cells c;
    if (!(xl <= xh))
        return c;
    double a = std::isfinite(xl) ? xl : prior.quantile(1e-12);
    double b = std::isfinite(xh) ? xh : prior.quantile(1 - 1e-12);
    a = std::min(a, xh);
    b = std::max(b, xl);
    if (std::isinf(xl))
        c.edges.push_back(-inf);
    double width = std::max(bw, (b - a) / std::max(max_cells, 1));
    auto count = static_cast<std::size_t>(std::ceil((b - a) / width));
    count = std::max<std::size_t>(count, 1);
    for (std::size_t i = 0; i <= count; ++i)
        c.edges.push_back(i == count ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(count));
    if (std::isinf(xh))
        c.edges.push_back(inf);
    c.edges.erase(std::unique(c.edges.begin(), c.edges.end()), c.edges.end());
    if (c.edges.size() == 1)
        c.edges.push_back(c.edges.front());

    double total = 0;
    for (std::size_t i = 0; i + 1 < c.edges.size(); ++i)
    {
        double c0 = c.edges[i], c1 = c.edges[i + 1];
        double lo = i == 0 ? prior.cdf_left(c0) : prior.cdf(c0);
        double pm = std::max(prior.cdf(c1) - lo, 0.0);
        double g0 = g.cdf_left(band.lo - c1);
        double gm = std::max(g.cdf(band.hi - c0) - g0, 0.0);
        double at = evasion && c0 <= band.hi && c1 >= band.lo ? 1.0 : 0.0;
        c.base.push_back(lo);
        c.pmass.push_back(pm);
        c.glo.push_back(g0);
        c.gmass.push_back(gm);
        c.atom.push_back(at);
        total += pm * (gm + at);
        c.cum.push_back(total);
    }
    return c;
}
}  // namespace

//---------------------------------------------------------------------------//
double EmpiricalCdf::cdf(double x) const
{
    auto it = std::upper_bound(samples.begin(), samples.end(), x);
    return static_cast<double>(it - samples.begin()) / static_cast<double>(samples.size());
}

double EmpiricalCdf::cdf_left(double x) const
{
    auto it = std::lower_bound(samples.begin(), samples.end(), x);
    return static_cast<double>(it - samples.begin()) / static_cast<double>(samples.size());
}

std::string McCondition::describe() const
{
    std::ostringstream os;
    if (kind == Kind::threshold)
    {
        os << "threshold b=" << format_number(value);
    }
    else
    {
        Band b = band_of(*this);
        os << "band z in [" << format_number(b.lo) << ", " << format_number(b.hi) << "]";
    }
    return os.str();
}

EmpiricalCdf sample_conditional(Distribution const& prior, SignalKernel const& k, McCondition const& c,
                                std::size_t n, std::uint64_t seed, McOptions const& options)
{
    Distribution const& g = k.noise();
    auto const& p = k.evasion();
    if (c.kind == McCondition::Kind::threshold)
    {
        double b = c.value;
        return run_blocks(n, seed, options, c.describe(),
                          [&](Stream const& s, std::uint32_t count, std::vector<double>& out) {
                              for (std::uint32_t i = 0; i < count; ++i)
                              {
                                  auto [ux, up] = s.open_pair(i, 0);
                                  double x = prior.quantile(ux);
                                  double z = x;
                                  if (!p || up >= (*p)(x))
                                  {
                                      auto [ue, unused] = s.open_pair(i, 1);
                                      (void)unused;
                                      z = x + g.quantile(ue);
                                  }
                                  if (z >= b)
                                      out.push_back(x);
                              }
                          });
    }

    Band band = band_of(c);
    Cells cells = build_cells(prior, k, band, c.bandwidth, options.max_cells);
    if (cells.cum.empty() || !(cells.cum.back() > 0))
        fail(ErrorCode::acceptance_starved, "band " + c.describe() + " has zero probability under the prior");
    double total = cells.cum.back();
    return run_blocks(n, seed, options, c.describe(),
                      [&](Stream const& s, std::uint32_t count, std::vector<double>& out) {
                          for (std::uint32_t i = 0; i < count; ++i)
                          {
                              auto [uc, ux] = s.open_pair(i, 0);
                              auto it = std::upper_bound(cells.cum.begin(), cells.cum.end(), uc * total);
                              auto j = static_cast<std::size_t>(
                                  std::min<std::ptrdiff_t>(it - cells.cum.begin(),
                                                           static_cast<std::ptrdiff_t>(cells.cum.size()) - 1));
                              double x = prior.quantile(cells.base[j] + ux * cells.pmass[j]);
                              auto [um, ue] = s.open_pair(i, 1);
                              double env = cells.gmass[j] + cells.atom[j];
                              if (!(env > 0))
                                  continue;
                              bool exact_report = um * env < cells.atom[j];
                              double px = p ? (*p)(x) : 0.0;
                              double z;
                              if (exact_report)
                              {
                                  auto [ua, unused] = s.open_pair(i, 2);
                                  (void)unused;
                                  if (!(ua < px))
                                      continue;
                                  z = x;
                              }
                              else
                              {
                                  if (p)
                                  {
                                      auto [ua, unused] = s.open_pair(i, 2);
                                      (void)unused;
                                      if (ua < px)
                                          continue;
                                  }
                                  z = x + g.quantile(cells.glo[j] + ue * cells.gmass[j]);
                              }
                              if (z >= band.lo && z <= band.hi)
                                  out.push_back(x);
                          }
                      });
}

EmpiricalCdf sample_conditional(Distribution const& prior, ThresholdSignal const& ts, double b, std::size_t n,
                                std::uint64_t seed, McOptions const& options)
{
    std::ostringstream os;
    os << "threshold signal S >= " << format_number(b);
    return run_blocks(n, seed, options, os.str(),
                      [&](Stream const& s, std::uint32_t count, std::vector<double>& out) {
                          for (std::uint32_t i = 0; i < count; ++i)
                          {
                              auto [ux, us] = s.open_pair(i, 0);
                              double x = prior.quantile(ux);
                              if (ts.sample(x, us) >= b)
                                  out.push_back(x);
                          }
                      });
}

double dkw_band(std::size_t n, double confidence)
{
    if (n == 0 || !(confidence > 0 && confidence < 1))
        fail(ErrorCode::invalid_argument, "dkw band needs n >= 1 and confidence in (0, 1)");
    double eps = std::sqrt(std::log(2 / (1 - confidence)) / (2 * static_cast<double>(n)));
    return std::min(eps, 1.0);
}

OracleComparison compare_to_cdf(EmpiricalCdf const& e, Distribution const& analytic, double confidence,
                                std::vector<AtomWindow> const& windows)
{
    if (e.samples.empty())
        fail(ErrorCode::invalid_argument, "empirical cdf has no samples");
    OracleComparison r;
    r.band = dkw_band(e.n(), confidence);
    auto excluded = [&](double x) {
        for (auto const& w : windows)
            if (x >= w.lo && x <= w.hi)
                return true;
        return false;
    };
    auto const& s = e.samples;
    double nn = static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size();)
    {
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i])
            ++j;
        double v = s[i];
        if (!excluded(v))
        {
            double right = std::abs(static_cast<double>(j) / nn - analytic.cdf(v));
            double left = std::abs(static_cast<double>(i) / nn - analytic.cdf_left(v));
            r.sup_gap = std::max({r.sup_gap, right, left});
        }
        i = j;
    }
    for (auto const& w : windows)
    {
        r.sup_gap = std::max(r.sup_gap, std::abs(e.cdf_left(w.lo) - analytic.cdf_left(w.lo)));
        r.sup_gap = std::max(r.sup_gap, std::abs(e.cdf(w.hi) - analytic.cdf(w.hi)));
        double emp = e.cdf(w.hi) - e.cdf_left(w.lo);
        double ana = analytic.cdf(w.hi) - analytic.cdf_left(w.lo);
        r.window_gap = std::max(r.window_gap, std::abs(emp - ana));
    }
    r.pass = r.sup_gap <= r.band && r.window_gap <= 2 * r.band;
    return r;
}

std::vector<AtomWindow> kernel_atom_windows(Distribution const& posterior, Distribution const& prior,
                                            McCondition const& c)
{
    std::vector<AtomWindow> out;
    if (c.kind != McCondition::Kind::band)
        return out;
    Band band = band_of(c);
    double below = c.value - band.lo, above = band.hi - c.value;
    double pad = 1e-12 * std::max(1.0, std::abs(c.value));
    for (auto const& a : posterior.atoms())
        if (prior.atom_at(a.location) == 0)
            out.push_back({a.location - below - pad, a.location + above + pad});
    return out;
}

void write_samples(std::string const& path, EmpiricalCdf const& e)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        fail(ErrorCode::io_error, "cannot open '" + path + "' for writing");
    for (double v : e.samples)
    {
        auto bits = std::bit_cast<std::uint64_t>(v);
        if constexpr (std::endian::native == std::endian::big)
            bits = __builtin_bswap64(bits);
        char buf[8];
        std::memcpy(buf, &bits, 8);
        os.write(buf, 8);
    }
    if (!os)
        fail(ErrorCode::io_error, "failed writing samples to '" + path + "'");
}

}  // namespace screenrev
