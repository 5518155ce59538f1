#pragma once

#include <functional>

#include "factorball/group.hpp"
#include "factorball/montecarlo.hpp"
#include "factorball/region.hpp"

namespace factorball {

/// Default word-length budget for quotient-distance searches.
inline constexpr int kDefaultWordBudget = 8;

/// A point of B^n/G: an orbit, stored as one representative plus the group.
/// Equality is metric (quotient distance below tolerance), not canonical:
/// the user-supplied representative is kept as given.
struct QuotientPoint {
    Point rep;
    GroupHandle group;

    QuotientPoint(Point r, GroupHandle g) : rep(std::move(r)), group(std::move(g)) {
        if (!group) throw std::invalid_argument("QuotientPoint: null group");
        if (rep.dim() != group->dimension())
            throw std::invalid_argument("QuotientPoint: dimension mismatch");
    }
};

inline QuotientPoint project(const Point& z, const GroupHandle& g) {
    return QuotientPoint(z, g);
}

struct QuotientDist {
    double value = 0.0;
    bool budget_incomplete = false;  // value is then only an upper bound
    Word word;                       // witness: value = h(word(rep1), rep2)
    Vec lift;                        // word(rep1)
};

/// Quotient distance h~(p1, p2) = min over words w, |w| <= max_word_len, of
/// h(w(rep1), rep2) (the one-sided orbit infimum; the two-sided form reduces
/// to it by invariance). Always <= h(rep1, rep2).
QuotientDist quotient_dist_detail(const QuotientPoint& p1,
                                  const QuotientPoint& p2,
                                  int max_word_len = kDefaultWordBudget);
double quotient_dist(const QuotientPoint& p1, const QuotientPoint& p2,
                     int max_word_len = kDefaultWordBudget);

/// d(z1, z2) = h~(pi(z1), pi(z2)); satisfies d <= h.
double projected_pseudo_dist(const Point& z1, const Point& z2,
                             const GroupHandle& g,
                             int max_word_len = kDefaultWordBudget);

bool quotient_equal(const QuotientPoint& p1, const QuotientPoint& p2,
                    int max_word_len = kDefaultWordBudget,
                    double tol = kDefaultTol);

/// Minimum over nontrivial words |w| <= max_word_len of h(z, w(z)).
/// Returns +infinity for the trivial group.
double min_nontrivial_displacement(const GroupPresentation& g, const Vec& z,
                                   int max_word_len);

/// Half the minimal displacement of nontrivial words over the sample:
/// within any subset of the sample of diameter below the returned radius the
/// projection is an isometry (d = h). +infinity for the trivial group.
double local_isometry_radius(const GroupPresentation& g,
                             const std::vector<Point>& compact_sample,
                             int max_word_len = kDefaultWordBudget);

// ---------------------------------------------------------------------------
// Dirichlet (normal fundamental) polyhedron
// ---------------------------------------------------------------------------

enum class DirichletPosition { interior, boundary, exterior };

struct DirichletClass {
    DirichletPosition position = DirichletPosition::interior;
    bool budget_incomplete = false;  // "interior" then means: in the partial polyhedron
};

/// Strict test h(p, p0) < h(p, w(p0)) over nontrivial enumerated words.
bool in_dirichlet_domain(const GroupPresentation& g, const Point& p0,
                         const Point& p, int max_word_len = kDefaultWordBudget);

/// Same test with a boundary band: within tie_margin of equality reports
/// `boundary` (bisector points are excluded from tiling arguments).
DirichletClass classify_dirichlet(const GroupPresentation& g, const Point& p0,
                                  const Point& p,
                                  int max_word_len = kDefaultWordBudget,
                                  double tie_margin = kDefaultTol);

// ---------------------------------------------------------------------------
// Hyperbolic measure (Monte Carlo)
// ---------------------------------------------------------------------------

/// V(A) = integral over A of 2^n dm / (1 - |x|^2)^n, estimated by uniform
/// sampling over the declared Euclidean sampler ball, which must contain the
/// region and stay inside |x| <= 1 - 1e-6 (the integrand is unbounded at the
/// boundary). Deterministic given the seed.
McResult hyp_measure(const std::function<bool(const Vec&)>& region, int n,
                     const SamplerSpec& sampler, std::uint64_t samples,
                     std::uint64_t seed, int threads = 1);

McResult hyp_measure(const Region& region, int n, const SamplerSpec& sampler,
                     std::uint64_t samples, std::uint64_t seed, int threads = 1);

/// Hyperbolic measure of a subset of B^n/G: V(P(p0) ∩ pi^{-1}(A)) with P the
/// Dirichlet polyhedron centered at p0.
McResult quotient_measure(const GroupHandle& g, const Point& dirichlet_center,
                          const std::function<bool(const QuotientPoint&)>& set_pred,
                          const SamplerSpec& sampler, std::uint64_t samples,
                          std::uint64_t seed,
                          int max_word_len = kDefaultWordBudget,
                          int threads = 1);

// ---------------------------------------------------------------------------
// Quotient set predicates
// ---------------------------------------------------------------------------

/// Composable set predicate on B^n/G built from metric balls and annuli
/// about quotient points, plus complement and intersection; serializable as
/// JSON (no arbitrary code is accepted from config files).
class QuotientRegion {
public:
    static QuotientRegion ball(QuotientPoint center, double radius,
                               int word_budget = kDefaultWordBudget);
    static QuotientRegion annulus(QuotientPoint center, double r1, double r2,
                                  int word_budget = kDefaultWordBudget);
    static QuotientRegion complement(QuotientRegion r);
    static QuotientRegion intersection(std::vector<QuotientRegion> parts);
    static QuotientRegion everything();

    bool contains(const QuotientPoint& p) const;

    /// {"type":"ball"|"annulus"|"complement"|"intersection"|"all", ...};
    /// centers are representative coordinates resolved against the group.
    static QuotientRegion from_json(const nlohmann::json& spec,
                                    const GroupHandle& group,
                                    int word_budget = kDefaultWordBudget);
    nlohmann::json to_json() const;

private:
    struct Node;
    std::shared_ptr<const Node> root_;
};

// ---------------------------------------------------------------------------
// Normal neighborhoods and charts
// ---------------------------------------------------------------------------

/// The conformal chart at a quotient point: the projection restricted to
/// B_h(rep, radius) inverted, composed with the ball automorphism taking rep
/// to the origin. Chart coordinates live in B(0, tanh(radius/2)).
class Chart {
public:
    Chart(QuotientPoint center, double radius, int word_budget);

    const QuotientPoint& center() const { return center_; }
    double radius() const { return radius_; }

    /// Lift p into B_h(rep, radius) and move rep to the origin. Throws
    /// std::domain_error when p is not within the chart.
    Vec to_chart(const QuotientPoint& p) const;
    QuotientPoint from_chart(const Vec& x) const;

    /// The orbit representative of p nearest to the chart center's rep.
    Vec lift(const QuotientPoint& p) const;

    const MobiusMap& to_origin() const { return to_origin_; }
    const MobiusMap& from_origin() const { return from_origin_; }

private:
    QuotientPoint center_;
    double radius_;
    int word_budget_;
    MobiusMap to_origin_;
    MobiusMap from_origin_;
};

struct NormalNeighborhood {
    QuotientPoint center;
    double radius;  // the epsilon_0 of the construction
    Chart chart;
};

/// Neighborhood on which the projection is injective: radius = 90% of the
/// local isometry radius of a small compact around the representative,
/// capped by the hyperbolic distance from the representative to the
/// boundary guard sphere.
NormalNeighborhood normal_neighborhood(const QuotientPoint& p0,
                                       int max_word_len = kDefaultWordBudget);

}  // namespace factorball
