#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace factorball {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Margin below which a coordinate vector is considered to have left the
/// open unit ball. Constructors reject |x| >= 1 - kBoundaryGuard.
inline constexpr double kBoundaryGuard = 1e-12;

/// Default comparison tolerance for metric identities.
inline constexpr double kDefaultTol = 1e-9;

/// A point of the open unit ball B^n, n >= 2. Immutable after construction.
class Point {
public:
    explicit Point(Vec coords) : x_(std::move(coords)) {
        if (x_.size() < 2)
            throw std::invalid_argument("Point: dimension must be >= 2");
        if (x_.norm() >= 1.0 - kBoundaryGuard)
            throw std::invalid_argument(
                "Point: |coords| = " + std::to_string(x_.norm()) +
                " violates the open-ball boundary guard");
    }

    Point(std::initializer_list<double> coords)
        : Point(Eigen::Map<const Vec>(coords.begin(),
                                      static_cast<Eigen::Index>(coords.size()))) {}

    const Vec& v() const { return x_; }
    int dim() const { return static_cast<int>(x_.size()); }
    double norm() const { return x_.norm(); }

    static Point origin(int n) { return Point(Vec::Zero(n)); }

private:
    Vec x_;
};

/// True when the raw vector is admissible as a Point.
inline bool inside_ball(const Vec& x) {
    return x.norm() < 1.0 - kBoundaryGuard;
}

}  // namespace factorball
