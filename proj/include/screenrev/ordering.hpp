#pragma once

#include <vector>

#include "screenrev/bayes.hpp"

namespace screenrev
{
enum class FosdRelation
{
    strict_dominates,
    weak_dominates,
    equal,
    //! The second distribution dominates the first (weakly or strictly)
    dominated,
    incomparable,
};

char const* to_string(FosdRelation r);

/*!
 * Outcome of comparing F1 and F2 through the gap F2 - F1.
 *
 * d1 dominates d2 when the gap is never negative beyond \c tol; strictness
 * needs the gap above \c tol at every interior probe, where endpoints of
 * the common support and atoms shared by both laws are not interior.
 */
struct FosdVerdict
{
    FosdRelation relation = FosdRelation::incomparable;
    //! Probes at the largest gap, the most negative gap and the smallest interior gap
    std::vector<double> witnesses;
    double max_gap_pos = 0;
    //! Magnitude of the most negative gap
    double max_gap_neg = 0;
    double min_interior_gap = 0;
    double tol = 0;
    std::size_t n_probes = 0;
};

struct FosdProbe
{
    double w = 0;
    //! Evaluated as a left limit (just below an atom)
    bool left = false;
    double f1 = 0;
    double f2 = 0;
};

struct FosdOptions
{
    double tol = 1e-9;
    int grid = 10000;
    //! Tail probability at which unbounded supports are cut for the grid
    double tail = 1e-12;
};

FosdVerdict fosd_compare(Distribution const& d1, Distribution const& d2, FosdOptions const& options = {},
                         std::vector<FosdProbe>* probes = nullptr);

struct ScreeningCurve
{
    std::vector<double> cutoffs;
    //! E[X | signal >= b]
    std::vector<double> values;
    //! P(signal >= b)
    std::vector<double> evidences;
};

ScreeningCurve screening_curve(Distribution const& prior, ThresholdSignal const& ts,
                               std::vector<double> const& cutoffs);
ScreeningCurve screening_curve(Distribution const& prior, Distribution const& noise,
                               std::vector<double> const& cutoffs);
ScreeningCurve screening_curve(Distribution const& prior, SignalKernel const& k,
                               std::vector<double> const& cutoffs);

struct Reversal
{
    std::size_t i = 0;
    std::size_t j = 0;
    double gap = 0;
};

//! Pairs i < j with values[i] > values[j] + tol, largest gap first
std::vector<Reversal> detect_reversals(ScreeningCurve const& c, double tol = 1e-9);

}  // namespace screenrev
