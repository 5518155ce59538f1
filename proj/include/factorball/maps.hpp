#pragma once

#include <memory>

#include "factorball/quotient.hpp"

namespace factorball {

/// A differentiable map on (a ball subset of) R^n, with an optional analytic
/// Jacobian. Evaluators must be pure.
struct SmoothMap {
    int dim = 0;
    std::function<Vec(const Vec&)> eval;
    std::function<Mat(const Vec&)> jac;  // null: use finite differences
    double domain_radius = 1.0;          // domain is B(0, domain_radius)
};

/// Central finite differences per column, step scaled by (1 - |x|) so the
/// truncation/roundoff balance survives near the boundary; the analytic
/// Jacobian is used when present.
Mat jacobian(const SmoothMap& m, const Vec& x, double step = 1e-6);

/// Extended-real dilatation value; never serialized as IEEE infinity.
struct Dilatation {
    double value = 1.0;
    bool finite = true;

    static Dilatation infinite() { return {0.0, false}; }
    bool operator<=(double bound) const { return finite && value <= bound; }
};

/// K_I = |det J| / sigma_min^n for det != 0; 1 for J = 0; infinite otherwise.
Dilatation inner_dilatation(const Mat& j);
/// K_O = sigma_max^n / |det J| for det != 0; 1 for J = 0; infinite otherwise.
Dilatation outer_dilatation(const Mat& j);

/// Largest singular value of the Jacobian at x (the limsup stretch for
/// differentiable maps).
double max_stretch(const SmoothMap& m, const Vec& x);

SmoothMap identity_map(int n);
SmoothMap linear_map(Mat a);
SmoothMap mobius_as_smooth(const MobiusMap& m);

// ---------------------------------------------------------------------------
// The two-branch radial stretch family
// ---------------------------------------------------------------------------

/// Radial profile of the family: s(r) = |map(x)| at |x| = r. Linear
/// c * r on [0, (m-1)/m] with c chosen for continuity, and
/// e * exp(-log^alpha(e/r)) outside.
double radial_profile(double alpha, int m, double r);
double radial_profile_inverse(double alpha, int m, double s);
/// d s / d r.
double radial_profile_derivative(double alpha, int m, double r);
/// The bound alpha * log^{alpha-1}(e/r) the inner dilatation satisfies.
double radial_dilatation_bound(double alpha, double r);

/// The homeomorphism of B^n with the radial profile above: linear inside
/// B(0,(m-1)/m), radial stretch outside, continuous across the seam.
/// Carries an analytic Jacobian.
SmoothMap radial_example_map(double alpha, int m, int n);

/// The rescaled automorphism of B(0, R): y -> R * map(y/R). Fixes S(0, R)
/// pointwise.
SmoothMap radial_example_scaled(double alpha, int m, int n, double R);
SmoothMap radial_example_scaled_inverse(double alpha, int m, int n, double R);

// ---------------------------------------------------------------------------
// Quotient maps
// ---------------------------------------------------------------------------

/// A map between factor spaces, with chart representatives for dilatation
/// computations.
class QuotientMap {
public:
    virtual ~QuotientMap() = default;

    virtual const GroupHandle& source_group() const = 0;
    virtual const GroupHandle& target_group() const = 0;

    virtual QuotientPoint apply(const QuotientPoint& p) const = 0;
    virtual QuotientPoint apply_inverse(const QuotientPoint& p) const = 0;

    /// A smooth representative psi o f o phi^{-1} around p, together with
    /// the source chart coordinate of p.
    struct ChartRep {
        SmoothMap map;
        Vec x;
    };
    virtual ChartRep chart_rep(const QuotientPoint& p) const = 0;
};

/// K_I / K_O of the chart representative at p; independent of the chart
/// choice because transitions are conformal.
Dilatation chart_inner_dilatation(const QuotientMap& f, const QuotientPoint& p);
Dilatation chart_outer_dilatation(const QuotientMap& f, const QuotientPoint& p);

class IdentityQuotientMap final : public QuotientMap {
public:
    explicit IdentityQuotientMap(GroupHandle g) : group_(std::move(g)) {}
    const GroupHandle& source_group() const override { return group_; }
    const GroupHandle& target_group() const override { return group_; }
    QuotientPoint apply(const QuotientPoint& p) const override { return p; }
    QuotientPoint apply_inverse(const QuotientPoint& p) const override { return p; }
    ChartRep chart_rep(const QuotientPoint& p) const override;

private:
    GroupHandle group_;
};

/// The map pi(z) -> pi_*(g0(z)) induced by a Moebius automorphism g0; the
/// target group is the conjugate g0 G g0^{-1}, so the map is well-defined on
/// orbits. Conformal: K_I = K_O = 1.
class MobiusQuotientMap final : public QuotientMap {
public:
    MobiusQuotientMap(MobiusMap g0, GroupHandle source);
    const GroupHandle& source_group() const override { return source_; }
    const GroupHandle& target_group() const override { return target_; }
    QuotientPoint apply(const QuotientPoint& p) const override;
    QuotientPoint apply_inverse(const QuotientPoint& p) const override;
    ChartRep chart_rep(const QuotientPoint& p) const override;
    const MobiusMap& mobius() const { return g0_; }

private:
    MobiusMap g0_;
    MobiusMap g0_inv_;
    GroupHandle source_;
    GroupHandle target_;
};

/// Quotient self-map equal to a chart-conjugated automorphism of the ball
/// B~(p0, r0) and the identity outside. The chart map must take the
/// coordinate ball B(0, r0') into itself and fix its boundary sphere
/// pointwise for the seam to be continuous (the radial-stretch family does).
class ChartLocalQuotientMap final : public QuotientMap {
public:
    /// Throws when r0 is not below the normal-neighborhood radius at p0.
    ChartLocalQuotientMap(QuotientPoint p0, double r0, SmoothMap chart_map,
                          SmoothMap chart_map_inverse,
                          int word_budget = kDefaultWordBudget);

    const GroupHandle& source_group() const override { return group_; }
    const GroupHandle& target_group() const override { return group_; }
    QuotientPoint apply(const QuotientPoint& p) const override;
    QuotientPoint apply_inverse(const QuotientPoint& p) const override;
    ChartRep chart_rep(const QuotientPoint& p) const override;

    const Chart& chart() const { return chart_; }
    double quotient_ball_radius() const { return r0_; }
    double coordinate_ball_radius() const { return r0_prime_; }

private:
    GroupHandle group_;
    QuotientPoint p0_;
    double r0_;
    double r0_prime_;
    int word_budget_;
    Chart chart_;
    SmoothMap fwd_;
    SmoothMap inv_;
};

/// The distortion-example family: the rescaled radial stretch acting inside
/// B~(p0, r0), identity outside. r0' = (e^{r0}-1)/(e^{r0}+1).
std::shared_ptr<ChartLocalQuotientMap> build_fm_family(
    const GroupHandle& g, const QuotientPoint& p0, double r0, double alpha,
    int m, int word_budget = kDefaultWordBudget);

/// A plain self-map of the ball viewed as a map of the trivial quotient
/// (rejects nontrivial groups: an arbitrary ball map is not equivariant).
class BallQuotientMap final : public QuotientMap {
public:
    BallQuotientMap(GroupHandle trivial_group, SmoothMap fwd, SmoothMap inv);
    const GroupHandle& source_group() const override { return group_; }
    const GroupHandle& target_group() const override { return group_; }
    QuotientPoint apply(const QuotientPoint& p) const override;
    QuotientPoint apply_inverse(const QuotientPoint& p) const override;
    ChartRep chart_rep(const QuotientPoint& p) const override;

private:
    GroupHandle group_;
    SmoothMap fwd_;
    SmoothMap inv_;
};

}  // namespace factorball
