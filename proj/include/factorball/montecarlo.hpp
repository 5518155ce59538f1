#pragma once

#include <cstdint>
#include <functional>

#include "factorball/point.hpp"

namespace factorball {

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

/// Euclidean ball to draw uniform samples from. The integration region must
/// be contained in it; its radius bounds how close sampling gets to the unit
/// sphere (callers keep center.norm() + radius <= 1 - 1e-6 when integrating
/// hyperbolic densities).
struct SamplerSpec {
    Vec center;
    double radius = 0.0;
};

/// Euclidean volume of the n-ball of the given radius.
double ball_volume(int n, double radius);

/// Monte Carlo integral of f over the sampler ball: vol * mean(f(X)).
/// Deterministic for a fixed seed, independent of thread count: samples are
/// drawn in fixed-size batches with per-batch generators derived from the
/// root seed, and batch sums are merged in index order.
McResult mc_integrate(const SamplerSpec& sampler,
                      const std::function<double(const Vec&)>& f,
                      std::uint64_t samples, std::uint64_t seed,
                      int threads = 1);

}  // namespace factorball
