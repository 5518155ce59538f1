#include "factorball/montecarlo.hpp"

#include <cmath>
#include <random>
#include <thread>
#include <vector>

namespace factorball {

double ball_volume(int n, double radius) {
    return std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0) *
           std::pow(radius, n);
}

namespace {

constexpr std::uint64_t kBatch = 8192;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

struct BatchSums {
    double sum = 0.0;
    double sum_sq = 0.0;
};

}  // namespace

McResult mc_integrate(const SamplerSpec& sampler,
                      const std::function<double(const Vec&)>& f,
                      std::uint64_t samples, std::uint64_t seed, int threads) {
    const int n = static_cast<int>(sampler.center.size());
    if (n < 1) throw std::invalid_argument("mc_integrate: bad sampler dimension");
    if (sampler.radius <= 0.0)
        throw std::invalid_argument("mc_integrate: sampler radius must be positive");
    if (samples == 0) throw std::invalid_argument("mc_integrate: zero samples");
    if (threads < 1) threads = 1;

    const std::uint64_t n_batches = (samples + kBatch - 1) / kBatch;
    std::vector<BatchSums> sums(n_batches);

    auto run_batch = [&](std::uint64_t b) {
        std::mt19937_64 rng(splitmix64(seed ^ (b * 0x2545F4914F6CDD1Dull + 1)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const std::uint64_t count =
            std::min(kBatch, samples - b * kBatch);
        BatchSums s;
        Vec x(n);
        for (std::uint64_t i = 0; i < count; ++i) {
            // Uniform point in the ball: gaussian direction, radius u^(1/n).
            double norm2 = 0.0;
            do {
                for (int j = 0; j < n; ++j) x(j) = gauss(rng);
                norm2 = x.squaredNorm();
            } while (norm2 == 0.0);
            double r = sampler.radius * std::pow(unif(rng), 1.0 / n);
            x = sampler.center + (r / std::sqrt(norm2)) * x;
            double v = f(x);
            s.sum += v;
            s.sum_sq += v * v;
        }
        sums[b] = s;
    };

    if (threads == 1 || n_batches == 1) {
        for (std::uint64_t b = 0; b < n_batches; ++b) run_batch(b);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t per = (n_batches + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            std::uint64_t lo = t * per, hi = std::min(n_batches, lo + per);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (std::uint64_t b = lo; b < hi; ++b) run_batch(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    double sum = 0.0, sum_sq = 0.0;
    for (const auto& s : sums) {
        sum += s.sum;
        sum_sq += s.sum_sq;
    }
    const double vol = ball_volume(n, sampler.radius);
    const double mean = sum / static_cast<double>(samples);
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(samples) - mean * mean);
    McResult res;
    res.estimate = vol * mean;
    res.std_error = vol * std::sqrt(var / static_cast<double>(samples));
    res.samples = samples;
    return res;
}

}  // namespace factorball
