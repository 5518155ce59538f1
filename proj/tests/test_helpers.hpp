#pragma once

#include <random>

#include "factorball/group.hpp"
#include "factorball/mobius.hpp"

namespace factorball::testing {

inline Vec random_in_ball(std::mt19937_64& rng, int n, double rmax) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vec x(n);
    double norm2 = 0.0;
    do {
        for (int i = 0; i < n; ++i) x(i) = gauss(rng);
        norm2 = x.squaredNorm();
    } while (norm2 == 0.0);
    double r = rmax * std::pow(unif(rng), 1.0 / n);
    return (r / std::sqrt(norm2)) * x;
}

inline Mat random_rotation(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    return q;
}

/// Generic ball automorphism: rotation composed with a translation moving
/// the origin to a random point.
inline MobiusMap random_mobius(std::mt19937_64& rng, int n, double rmax = 0.6) {
    Vec z = random_in_ball(rng, n, rmax);
    MobiusMap trans = MobiusMap::translation_to_origin(Point(z)).inverse();
    MobiusMap rot =
        MobiusMap::from_primitives(n, {Orthogonal{random_rotation(rng, n)}});
    return compose(trans, rot);
}

/// Canonical two-pair Schottky configuration used across tests: geodesic
/// circles centered at +-1.25 e1 and +-1.25 e2 (pairwise disjoint disks).
inline GroupHandle schottky_two_pairs() {
    Vec a(2), b(2), c(2), d(2);
    a << -1.25, 0.0;
    b << 1.25, 0.0;
    c << 0.0, -1.25;
    d << 0.0, 1.25;
    return make_schottky_2d({CirclePair{a, b}, CirclePair{c, d}});
}

/// One-pair (cyclic) Schottky group translating along the e1 axis.
inline GroupHandle schottky_one_pair(double center = 3.0) {
    Vec a(2), b(2);
    a << -center, 0.0;
    b << center, 0.0;
    return make_schottky_2d({CirclePair{a, b}});
}

/// Euclidean coordinate of the axis point at hyperbolic distance s from 0
/// along +e1.
inline Vec axis_point(double s, int n = 2) {
    Vec x = Vec::Zero(n);
    x(0) = std::tanh(s / 2.0);
    return x;
}

}  // namespace factorball::testing
