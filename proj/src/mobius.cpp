#include "factorball/mobius.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace factorball {

Vec apply_primitive(const Primitive& p, const Vec& x) {
    if (const auto* o = std::get_if<Orthogonal>(&p)) {
        return o->q * x;
    }
    if (const auto* s = std::get_if<SphereInversion>(&p)) {
        Vec d = x - s->center;
        double n2 = d.squaredNorm();
        if (n2 == 0.0)
            throw std::domain_error("sphere inversion evaluated at its center");
        return s->center + (s->radius_sq / n2) * d;
    }
    const auto& r = std::get<PlaneReflection>(p);
    return x - 2.0 * x.dot(r.unit_normal) * r.unit_normal;
}

Primitive invert_primitive(const Primitive& p) {
    if (const auto* o = std::get_if<Orthogonal>(&p))
        return Orthogonal{o->q.transpose()};
    return p;  // inversions and reflections are involutions
}

MobiusMap MobiusMap::identity(int n) { return MobiusMap(n, {}); }

MobiusMap MobiusMap::from_primitives(int n, std::vector<Primitive> chain) {
    for (const auto& p : chain) {
        if (const auto* o = std::get_if<Orthogonal>(&p)) {
            if (o->q.rows() != n || o->q.cols() != n)
                throw std::invalid_argument("orthogonal primitive has wrong shape");
            if ((o->q * o->q.transpose() - Mat::Identity(n, n)).norm() > 1e-9)
                throw std::invalid_argument("matrix primitive is not orthogonal");
        } else if (const auto* s = std::get_if<SphereInversion>(&p)) {
            if (s->center.size() != n)
                throw std::invalid_argument("inversion center has wrong dimension");
            if (s->radius_sq <= 0.0)
                throw std::invalid_argument("inversion radius must be positive");
            // Ball preservation requires orthogonality to the unit sphere.
            if (std::abs(s->center.squaredNorm() - 1.0 - s->radius_sq) > 1e-9)
                throw std::invalid_argument(
                    "inversion sphere is not orthogonal to the unit sphere");
        } else {
            const auto& r = std::get<PlaneReflection>(p);
            if (r.unit_normal.size() != n)
                throw std::invalid_argument("reflection normal has wrong dimension");
            if (std::abs(r.unit_normal.norm() - 1.0) > 1e-9)
                throw std::invalid_argument("reflection normal is not unit length");
        }
    }
    return MobiusMap(n, std::move(chain));
}

MobiusMap MobiusMap::translation_to_origin(const Point& z0) {
    const int n = z0.dim();
    const double nz = z0.norm();
    if (nz == 0.0) return identity(n);

    Vec center = z0.v() / (nz * nz);             // z0* = z0/|z0|^2
    double radius_sq = center.squaredNorm() - 1.0;  // orthogonality to S^{n-1}
    Vec normal = z0.v() / nz;

    std::vector<Primitive> chain;
    chain.push_back(SphereInversion{std::move(center), radius_sq});
    chain.push_back(PlaneReflection{std::move(normal)});
    return MobiusMap(n, std::move(chain));
}

Vec MobiusMap::apply_vec(Vec x) const {
    for (const auto& p : chain_) x = apply_primitive(p, x);
    return x;
}

MobiusMap MobiusMap::inverse() const {
    std::vector<Primitive> inv;
    inv.reserve(chain_.size());
    for (auto it = chain_.rbegin(); it != chain_.rend(); ++it)
        inv.push_back(invert_primitive(*it));
    return MobiusMap(dim_, std::move(inv));
}

MobiusMap compose(const MobiusMap& a, const MobiusMap& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("compose: dimension mismatch");
    std::vector<Primitive> chain = b.chain();
    chain.insert(chain.end(), a.chain().begin(), a.chain().end());
    return MobiusMap::from_primitives(a.dim(), std::move(chain));
}

double hyp_dist(const Vec& x, const Vec& y) {
    const double d2 = (x - y).squaredNorm();
    if (d2 == 0.0) return 0.0;
    const double denom = d2 + (1.0 - x.squaredNorm()) * (1.0 - y.squaredNorm());
    const double t = std::sqrt(d2 / denom);
    // log((1+t)/(1-t)) = log1p(2t/(1-t)), stable for small t
    return std::log1p(2.0 * t / (1.0 - t));
}

bool in_hyp_ball(const Point& y0, double r, const Point& y) {
    if (r < 0.0) throw std::invalid_argument("in_hyp_ball: negative radius");
    return hyp_dist(y0, y) < r;
}

double euclidean_radius_of_hyp_ball(double r) { return std::tanh(r / 2.0); }

double hyp_radius_of_euclidean_ball(double re) {
    return std::log((1.0 + re) / (1.0 - re));
}

double comparison_constant(int n, double r0) {
    if (!(0.0 < r0 && r0 < 1.0))
        throw std::invalid_argument("comparison_constant: need 0 < r0 < 1");
    double inf_ratio = std::numeric_limits<double>::infinity();
    auto consider = [&](const Vec& a, const Vec& b) {
        double num = (a - b).norm();
        if (num == 0.0) return;
        inf_ratio = std::min(inf_ratio, num / hyp_dist(a, b));
    };
    // Radial/antipodal/near-coincident pairs on a radius grid; the ratio is
    // smallest for coincident pairs at the outer radius.
    const int radii = 64;
    for (int i = 1; i <= radii; ++i) {
        double rho = r0 * i / radii;
        Vec e1 = Vec::Zero(n);
        e1(0) = rho;
        consider(e1, -e1);
        consider(e1, Vec::Zero(n));
        Vec eps_rad = e1 * (1.0 - 1e-7);
        consider(e1, eps_rad);
        Vec tangent = e1;
        tangent(1) += rho * 1e-7;
        consider(e1, tangent);
    }
    // A deterministic scatter of generic pairs.
    std::uint64_t state = 0x853c49e6748fea9bull;
    auto next = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 11) / 9007199254740992.0;
    };
    for (int k = 0; k < 4096; ++k) {
        Vec a(n), b(n);
        do {
            for (int i = 0; i < n; ++i) a(i) = (2.0 * next() - 1.0) * r0;
        } while (a.norm() >= r0);
        do {
            for (int i = 0; i < n; ++i) b(i) = (2.0 * next() - 1.0) * r0;
        } while (b.norm() >= r0);
        consider(a, b);
    }
    return 0.99 * inf_ratio;
}

EuclideanBall hyp_ball_as_euclidean(const Point& center, double r) {
    const int n = center.dim();
    const double h0 = hyp_dist(Point::origin(n), center);
    // Extreme points of the ball along the geodesic (diameter) through 0
    // and the center, as signed radii.
    const double lo = std::tanh((h0 - r) / 2.0);
    const double hi = std::tanh((h0 + r) / 2.0);
    Vec dir;
    if (center.norm() > 0.0)
        dir = center.v() / center.norm();
    else {
        dir = Vec::Zero(n);
        dir(0) = 1.0;
    }
    return EuclideanBall{0.5 * (lo + hi) * dir, 0.5 * (hi - lo)};
}

}  // namespace factorball
