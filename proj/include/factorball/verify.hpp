#pragma once

#include <nlohmann/json.hpp>

#include "factorball/maps.hpp"
#include "factorball/modulus.hpp"

namespace factorball {

/// Outcome of one inequality experiment. pass holds iff
/// lhs <= rhs * (1 + tol_effective), where tol_effective is the declared
/// tolerance raised to at least the uncertainty implied by the caveats
/// (a caveated report can never pass at a tighter tolerance than its
/// caveats warrant).
struct InequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    double tol = 0.0;    // declared
    double tol_effective = 0.0;
    bool pass = false;
    std::vector<std::string> caveats;
    nlohmann::json fingerprint;
    nlohmann::json details;
};

nlohmann::json report_to_json(const InequalityReport& rep);

/// Shared experiment budgets: MC sampling, grid, path-search word budget.
struct ExperimentBudget {
    std::uint64_t mc_samples = 200000;
    std::uint64_t seed = 1;
    int threads = 1;
    int word_budget = kDefaultWordBudget;
    double refine_gap = kDefaultRefineGap;
    GridSpec grid;  // for the discrete-modulus side
    ModulusOptions modulus_options;
    std::size_t admissibility_paths = 32;
};

/// Modulus-distortion bound: the image family's modulus against
/// (1/m_tilde) * integral of K_I(p, f) rho^n(p) over the domain, both in
/// chart coordinates of the given charts with the hyperbolic element.
/// fam and rho live on the source chart; domain is a chart-coordinate
/// region contained in the sampler ball.
InequalityReport check_poletsky(const QuotientMap& f, const Chart& source_chart,
                                const Chart& target_chart, const PathFamily& fam,
                                const DensityField& rho, int m_tilde,
                                const Region& domain, const SamplerSpec& sampler,
                                double tol, const ExperimentBudget& budget);

/// Inverse bound: modulus of the source family against the integral
/// over the image domain of K_O(f^{-1}(p_*), f) rho_*^n(p_*). rho_* and
/// image_domain live on the target chart; f must be invertible.
InequalityReport check_inverse_inequality(
    const QuotientMap& f, const Chart& source_chart, const Chart& target_chart,
    const PathFamily& fam, const DensityField& rho_star,
    const Region& image_domain, const SamplerSpec& sampler, double tol,
    const ExperimentBudget& budget);

// ---------------------------------------------------------------------------
// Finite mean oscillation
// ---------------------------------------------------------------------------

struct FmoLevel {
    double eps = 0.0;
    double mean = 0.0;        // hyperbolic-measure average of Q over the ball
    double value = 0.0;       // average of |Q - mean|
    double std_error = 0.0;   // batch-mean error estimate of `value`
};

struct FmoResult {
    std::vector<FmoLevel> levels;       // in the order of eps_list
    double tail_max = 0.0;              // max value over the last 4 levels
    double tail_trend = 0.0;            // value(last) - value(first of tail)
    bool increasing_tail = false;       // trend exceeds 3x combined noise
};

/// Mean oscillation of Q (given in chart coordinates at p0) over the balls
/// B~(p0, eps): for each eps the hyperbolic-measure mean of |Q - Q_eps|.
/// Deterministic given the seed. eps_list must be decreasing and below the
/// chart radius.
FmoResult fmo_functional(const std::function<double(const Vec&)>& q,
                         const QuotientPoint& p0,
                         const std::vector<double>& eps_list,
                         std::uint64_t samples_per_level, std::uint64_t seed,
                         int word_budget = kDefaultWordBudget);

// ---------------------------------------------------------------------------
// Equicontinuity probe
// ---------------------------------------------------------------------------

struct EquicontinuityRow {
    double radius = 0.0;
    double sup_omega = 0.0;               // max over the family
    std::vector<double> omega_per_map;
};

/// For each radius r: omega_f(r) = max over sampled p with h~(p, p0) < r of
/// h~_*(f(p), f(p0)); rows report sup over the family. Sample points are a
/// deterministic polar grid in the chart at p0.
std::vector<EquicontinuityRow> equicontinuity_probe(
    const std::vector<std::shared_ptr<QuotientMap>>& family,
    const QuotientPoint& p0, const std::vector<double>& radii,
    int directions = 16, int rings = 4,
    int word_budget = kDefaultWordBudget);

}  // namespace factorball
