#pragma once

#include <variant>
#include <vector>

#include "factorball/point.hpp"

namespace factorball {

// ---------------------------------------------------------------------------
// Primitive conformal building blocks. Every Moebius automorphism of the unit
// ball used here is a finite chain of these three primitives.
// ---------------------------------------------------------------------------

/// x -> Q x with Q orthogonal (fixes the origin, preserves the ball).
struct Orthogonal {
    Mat q;
};

/// Inversion in the sphere S(center, r): x -> center + r^2 (x-center)/|x-center|^2.
/// Preserves the unit ball iff S(center, r) is orthogonal to S^{n-1},
/// i.e. |center|^2 = 1 + r^2. Constructors enforce this.
struct SphereInversion {
    Vec center;
    double radius_sq;
};

/// Reflection in the hyperplane through the origin with the given unit normal:
/// x -> x - 2 (x . u) u.
struct PlaneReflection {
    Vec unit_normal;
};

using Primitive = std::variant<Orthogonal, SphereInversion, PlaneReflection>;

Vec apply_primitive(const Primitive& p, const Vec& x);
Primitive invert_primitive(const Primitive& p);

// ---------------------------------------------------------------------------
// MobiusMap
// ---------------------------------------------------------------------------

/// A Moebius automorphism of B^n stored as an ordered chain of primitives.
/// chain()[0] is applied first. Composition concatenates chains; no normal
/// form is computed, so chains grow under composition.
class MobiusMap {
public:
    static MobiusMap identity(int n);

    /// The map T_{z0} = p_{z0} o sigma_{z0}: inversion in the sphere centered
    /// at z0* = z0/|z0|^2 with r^2 = |z0*|^2 - 1 (orthogonal to S^{n-1}),
    /// followed by reflection in the hyperplane through 0 orthogonal to z0.
    /// Maps z0 to the origin, preserves the ball, has no fixed point in B^n
    /// for z0 != 0. For z0 = 0 returns the identity.
    static MobiusMap translation_to_origin(const Point& z0);

    static MobiusMap from_primitives(int n, std::vector<Primitive> chain);

    int dim() const { return dim_; }
    const std::vector<Primitive>& chain() const { return chain_; }
    bool trivially_identity() const { return chain_.empty(); }

    Vec apply_vec(Vec x) const;
    Point apply(const Point& x) const { return Point(apply_vec(x.v())); }

    MobiusMap inverse() const;

private:
    MobiusMap(int n, std::vector<Primitive> chain)
        : dim_(n), chain_(std::move(chain)) {}

    int dim_ = 0;
    std::vector<Primitive> chain_;
};

/// compose(a, b): the map x -> a(b(x)).
MobiusMap compose(const MobiusMap& a, const MobiusMap& b);

// ---------------------------------------------------------------------------
// Hyperbolic metric of the ball
// ---------------------------------------------------------------------------

/// Hyperbolic distance on B^n:
///   h(x,y) = log((1+t)/(1-t)),  t = |x-y| / sqrt(|x-y|^2 + (1-|x|^2)(1-|y|^2)).
/// Invariant under every Moebius automorphism of the ball.
double hyp_dist(const Vec& x, const Vec& y);
inline double hyp_dist(const Point& x, const Point& y) {
    return hyp_dist(x.v(), y.v());
}

/// Membership in the open hyperbolic ball B_h(y0, r) = { y : h(y0,y) < r }.
bool in_hyp_ball(const Point& y0, double r, const Point& y);

/// Euclidean radius of B_h(0, r): (e^r - 1)/(e^r + 1) = tanh(r/2).
double euclidean_radius_of_hyp_ball(double r);

/// Hyperbolic radius of B(0, re): log((1+re)/(1-re)).
double hyp_radius_of_euclidean_ball(double re);

/// The hyperbolic ball B_h(center, r) is a Euclidean ball; returns its
/// Euclidean center and radius in closed form.
struct EuclideanBall {
    Vec center;
    double radius;
};
EuclideanBall hyp_ball_as_euclidean(const Point& center, double r);

/// A constant C with C * h(z1, z2) <= |z1 - z2| for z1, z2 in B(0, r0):
/// the sampled infimum of |z1 - z2| / h(z1, z2) over pairs in the ball,
/// including the coincident-pair limit (1 - r0^2)/2 where it is attained,
/// shrunk by a 1% safety margin. Deterministic.
double comparison_constant(int n, double r0);

}  // namespace factorball
