#pragma once

#include "factorball/paths.hpp"

namespace factorball {

/// A nonnegative density over a chart (and, when it lives on a quotient,
/// over quotient points).
struct DensityField {
    std::function<double(const Vec&)> chart;              // chart coordinates
    std::function<double(const QuotientPoint&)> quotient;  // may be null
};

/// A concrete family of paths: a named generator realized as a finite path
/// sample (the modulus of the sample is what the solver estimates).
struct PathFamily {
    int dim = 2;
    SpaceTag space = SpaceTag::ball;
    std::vector<SampledPath> paths;

    /// Radial segments joining the spheres |x - center| = r1 and = r2 at
    /// `count` directions (uniform angles for n = 2, a Fibonacci sphere for
    /// n = 3). Every generated path joins the boundary components inside
    /// the annulus.
    static PathFamily annulus_joining(int n, const Vec& center, double r1,
                                      double r2, int count,
                                      int samples_per_path = 33);
    static PathFamily explicit_paths(std::vector<SampledPath> paths);

    /// Transport the family through a coordinate map.
    PathFamily mapped(const std::function<Vec(const Vec&)>& f) const;
};

// ---------------------------------------------------------------------------
// Admissibility
// ---------------------------------------------------------------------------

struct AdmissibilityReport {
    double min_integral = 0.0;
    std::size_t paths_checked = 0;
    bool pass = false;  // min_integral >= 1 - 1e-3 (quadrature slack)
    bool budget_incomplete = false;
};

/// Checks the defining inequality of admissible densities over up to
/// sample_count representative paths of the family.
AdmissibilityReport is_admissible(const DensityField& rho, const PathFamily& fam,
                                  std::size_t sample_count,
                                  double refine_gap = kDefaultRefineGap,
                                  int word_budget = kDefaultWordBudget);

// ---------------------------------------------------------------------------
// Modulus bounds
// ---------------------------------------------------------------------------

enum class VolumeElement { euclidean, hyperbolic };

/// Monte Carlo estimate of the n-energy of an admissible density over the
/// domain (an upper bound for the modulus of any family the density is
/// admissible for). The volume element choice is explicit: mixing elements
/// within one comparison corrupts it.
McResult modulus_upper_bound(const DensityField& rho, const Region& domain,
                             int n, VolumeElement element,
                             const SamplerSpec& sampler, std::uint64_t samples,
                             std::uint64_t seed, int threads = 1);

/// Test density of ring families: rho(p) = eta(quotient_dist(p0, p)) on the
/// ring r1 < dist < r2, zero outside. eta must be nonnegative with
/// integral >= 1 over (r1, r2) (checked by quadrature to 1e-6).
DensityField ring_test_density(const QuotientPoint& p0, double r1, double r2,
                               const std::function<double(double)>& eta,
                               int word_budget = kDefaultWordBudget);

/// omega_{n-1} * (log(r2/r1))^{1-n}: modulus of the family joining the
/// boundary spheres of the Euclidean annulus r1 < |x| < r2.
double annulus_modulus_reference(int n, double r1, double r2);

/// The weight eta(t) = 1/(sinh(t) log(tanh(r2/2)/tanh(r1/2))) whose ring
/// density is extremal for the hyperbolic-radius ring r1 < dist < r2 in
/// n = 2 (its integral over (r1, r2) is exactly 1).
std::function<double(double)> ring_extremal_weight(double r1, double r2);

// ---------------------------------------------------------------------------
// Discrete modulus (grid extremal length)
// ---------------------------------------------------------------------------

struct GridSpec {
    Vec lo;
    Vec hi;
    std::vector<int> resolution;  // cells per axis
    VolumeElement element = VolumeElement::euclidean;
};

struct ModulusOptions {
    int max_iterations = 10000;
    double rel_tol = 1e-6;  // stop when best value moves less than this ...
    int patience = 100;     // ... over this many iterations
    double step0 = 0.5;     // dual step scale, decays as 1/sqrt(iter)
};

struct DiscreteModulusResult {
    double estimate = 0.0;    // best feasible (scaled) primal value
    double dual_bound = 0.0;  // certified lower bound for the grid problem
    int iterations = 0;
    double residual = 0.0;    // 1 - min path length at the last iterate
    bool converged = false;
    std::size_t active_cells = 0;
    std::size_t paths = 0;
};

/// Estimates the modulus of the sampled family on a grid: minimize
/// sum rho_c^n vol_c subject to sum_{cells of each path} rho_c ds_c >= 1,
/// rho >= 0, by multiplicative dual ascent with step decay 1/sqrt(iter).
/// The estimate is the best feasible primal value (an upper bound of the
/// grid optimum; the grid optimum itself estimates the sampled family's
/// modulus). Throws BudgetExceeded-style convergence failure only via the
/// `converged` flag; the best-so-far value is always returned.
DiscreteModulusResult discrete_modulus(const PathFamily& fam, const GridSpec& grid,
                                       const ModulusOptions& opts = {});

}  // namespace factorball
