#pragma once

#include <memory>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "factorball/point.hpp"

namespace factorball {

enum class Metric { euclidean, hyperbolic };

/// Composable region predicate on ball coordinates, serializable as JSON.
/// Primitives: ball, annulus (both in either metric), half-space; combinators:
/// complement, intersection. No arbitrary code is accepted from config files.
class Region {
public:
    static Region ball(Vec center, double radius, Metric m = Metric::euclidean);
    static Region annulus(Vec center, double r1, double r2,
                          Metric m = Metric::euclidean);
    /// { x : x . normal >= offset }
    static Region halfspace(Vec normal, double offset);
    static Region complement(Region r);
    static Region intersection(std::vector<Region> parts);
    static Region everything();

    bool contains(const Vec& x) const;

    static Region from_json(const nlohmann::json& spec);
    nlohmann::json to_json() const;

private:
    struct Node;
    std::shared_ptr<const Node> root_;
};

}  // namespace factorball
