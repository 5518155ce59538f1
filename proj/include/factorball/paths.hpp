#pragma once

#include <functional>

#include "factorball/quotient.hpp"

namespace factorball {

enum class SpaceTag { ball, quotient };

/// Default refinement threshold: consecutive metric gaps are split until
/// they fall below this.
inline constexpr double kDefaultRefineGap = 1e-3;

/// A path sampled at strictly increasing parameters. Ball-space paths store
/// points of B^n; quotient paths store orbit representatives plus the group.
/// The trace between samples is the Euclidean segment of the stored
/// coordinates, so refinement inserts midpoints without changing the trace.
class SampledPath {
public:
    static SampledPath from_points(std::vector<double> params,
                                   std::vector<Vec> points);
    static SampledPath from_function(const std::function<Vec(double)>& f,
                                     double a, double b, int initial_samples);
    /// Segment from x to y sampled linearly.
    static SampledPath segment(const Vec& x, const Vec& y, int initial_samples);

    /// Projection to B^n/G: same parameters, points become representatives.
    SampledPath projected(GroupHandle g) const;

    SpaceTag space() const { return group_ ? SpaceTag::quotient : SpaceTag::ball; }
    const GroupHandle& group() const { return group_; }
    int dim() const { return static_cast<int>(points_[0].size()); }
    std::size_t size() const { return points_.size(); }
    double param(std::size_t i) const { return params_[i]; }
    const Vec& point(std::size_t i) const { return points_[i]; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<Vec>& points() const { return points_; }
    QuotientPoint quotient_point(std::size_t i) const;

    /// Metric gap between samples i and i+1 (hyperbolic, or quotient
    /// distance with the given word budget).
    double gap(std::size_t i, int word_budget = kDefaultWordBudget) const;

    /// Bisect segments (Euclidean midpoints of stored coordinates) until
    /// every metric gap is below max_gap.
    SampledPath refined(double max_gap = kDefaultRefineGap,
                        int word_budget = kDefaultWordBudget) const;

    /// Apply a coordinate transform to every sample (same parameters).
    SampledPath mapped(const std::function<Vec(const Vec&)>& f) const;

private:
    SampledPath() = default;
    std::vector<double> params_;
    std::vector<Vec> points_;
    GroupHandle group_;  // null for ball space
};

// ---------------------------------------------------------------------------
// Length
// ---------------------------------------------------------------------------

struct PathLength {
    double value = 0.0;
    bool budget_incomplete = false;
};

/// Hyperbolic length: partition sum of h over consecutive samples after
/// refinement; converges from below to the supremum as the gap threshold
/// shrinks.
PathLength hyp_length(const SampledPath& p,
                      double refine_gap = kDefaultRefineGap);

/// Quotient length: partition sum of quotient distances; at most the
/// hyperbolic length of any lift. budget_incomplete is set when any gap's
/// orbit search did not close.
PathLength quotient_length(const SampledPath& p,
                           int max_word_len = kDefaultWordBudget,
                           double refine_gap = kDefaultRefineGap);

/// Nondecreasing cumulative-length table t -> l(t) with l(t_0) = 0.
class LengthFunction {
public:
    LengthFunction(std::vector<double> params, std::vector<double> lengths);

    double operator()(double t) const;
    double inverse(double s) const;  // smallest t with l(t) = s
    double total() const { return lengths_.back(); }
    const std::vector<double>& params() const { return params_; }
    const std::vector<double>& lengths() const { return lengths_; }

private:
    std::vector<double> params_;
    std::vector<double> lengths_;
};

/// Cumulative length along the path as sampled (no refinement).
LengthFunction cumulative_length(const SampledPath& p,
                                 int word_budget = kDefaultWordBudget);

/// The monotone correspondence s -> length of the image path at the
/// parameter where the source path has length s (table composition of two
/// cumulative-length functions over a common parameter grid).
LengthFunction length_correspondence(const LengthFunction& source,
                                     const LengthFunction& image);

/// Arc-length reparametrization: parameters become cumulative lengths, the
/// trace is unchanged; duplicate (zero-gap) samples are collapsed. A
/// zero-length path degenerates to its single-point representation.
SampledPath normal_representation(const SampledPath& p,
                                  double refine_gap = kDefaultRefineGap,
                                  int word_budget = kDefaultWordBudget);

// ---------------------------------------------------------------------------
// Line integrals
// ---------------------------------------------------------------------------

/// Composite-trapezoid quadrature of rho along the refined path against the
/// metric arc element (ds_h for ball paths, ds_h~ for quotient paths). The
/// density is evaluated at the stored coordinates/representatives.
PathLength line_integral(const SampledPath& p,
                         const std::function<double(const Vec&)>& rho,
                         double refine_gap = kDefaultRefineGap,
                         int word_budget = kDefaultWordBudget);

/// Same against a density on quotient points.
PathLength line_integral(const SampledPath& p,
                         const std::function<double(const QuotientPoint&)>& rho,
                         double refine_gap = kDefaultRefineGap,
                         int word_budget = kDefaultWordBudget);

}  // namespace factorball
