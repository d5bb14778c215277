#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "screenrev/bayes.hpp"
#include "screenrev/kernels.hpp"

namespace screenrev
{
struct EmpiricalCdf
{
    std::vector<double> samples;  // sorted
    std::uint64_t seed = 0;
    std::string conditioning;
    std::uint64_t proposed = 0;
    std::uint64_t accepted = 0;

    std::size_t n() const { return samples.size(); }
    double cdf(double x) const;
    double cdf_left(double x) const;
};

enum class BandSide
{
    centered,
    //! [z - 2 bw, z]: for z on the edge of the signal support
    left,
    //! [z, z + 2 bw]
    right,
};

struct McCondition
{
    enum class Kind
    {
        band,
        threshold,
    };
    Kind kind = Kind::threshold;
    double value = 0;
    double bandwidth = 1e-3;
    BandSide side = BandSide::centered;

    static McCondition threshold(double b) { return {Kind::threshold, b, 0, BandSide::centered}; }
    static McCondition band(double z, double bw = 1e-3, BandSide side = BandSide::centered)
    {
        return {Kind::band, z, bw, side};
    }
    std::string describe() const;
};

struct McOptions
{
    //! Proposals per counter block; results are merged block by block
    std::uint32_t block = 65536;
    //! 0 picks the hardware concurrency
    unsigned workers = 0;
    //! Acceptance rate below which sampling stops on the first block
    double min_acceptance = 1e-6;
    int max_cells = 20000;
};

//! Draws of X given the conditioning event, with the signal simulated from the kernel
EmpiricalCdf sample_conditional(Distribution const& prior, SignalKernel const& k, McCondition const& c,
                                std::size_t n, std::uint64_t seed, McOptions const& options = {});
//! Draws of X given S >= b for a threshold signal
EmpiricalCdf sample_conditional(Distribution const& prior, ThresholdSignal const& ts, double b, std::size_t n,
                                std::uint64_t seed, McOptions const& options = {});

//! DKW half-width sqrt(ln(2 / (1 - confidence)) / (2 n)), capped at 1
double dkw_band(std::size_t n, double confidence);

//! Window excluded from the sup comparison, compared by mass instead
struct AtomWindow
{
    double lo = 0;
    double hi = 0;
};

struct OracleComparison
{
    //! Kolmogorov distance outside the atom windows
    double sup_gap = 0;
    double band = 0;
    //! Largest |empirical - analytic| probability of an atom window
    double window_gap = 0;
    bool pass = false;
};

OracleComparison compare_to_cdf(EmpiricalCdf const& e, Distribution const& analytic, double confidence,
                                std::vector<AtomWindow> const& windows = {});

//! Windows around posterior atoms that the prior does not carry
std::vector<AtomWindow> kernel_atom_windows(Distribution const& posterior, Distribution const& prior,
                                            McCondition const& c);

//! Raw little-endian float64 dump of the samples
void write_samples(std::string const& path, EmpiricalCdf const& e);

}  // namespace screenrev
