#include "factorball/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace factorball {

PathFamily PathFamily::annulus_joining(int n, const Vec& center, double r1,
                                       double r2, int count,
                                       int samples_per_path) {
    if (!(0.0 < r1 && r1 < r2))
        throw std::invalid_argument("annulus_joining: need 0 < r1 < r2");
    if (center.size() != n)
        throw std::invalid_argument("annulus_joining: center dimension mismatch");
    PathFamily fam;
    fam.dim = n;
    fam.space = SpaceTag::ball;
    for (int k = 0; k < count; ++k) {
        Vec dir(n);
        if (n == 2) {
            double theta = 2.0 * M_PI * k / count;
            dir << std::cos(theta), std::sin(theta);
        } else if (n == 3) {
            // Fibonacci sphere
            double z = 1.0 - 2.0 * (k + 0.5) / count;
            double phi = M_PI * (1.0 + std::sqrt(5.0)) * k;
            double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            dir << rho * std::cos(phi), rho * std::sin(phi), z;
        } else {
            throw std::invalid_argument("annulus_joining: n must be 2 or 3");
        }
        fam.paths.push_back(SampledPath::segment(center + r1 * dir,
                                                 center + r2 * dir,
                                                 samples_per_path));
    }
    return fam;
}

PathFamily PathFamily::explicit_paths(std::vector<SampledPath> paths) {
    if (paths.empty())
        throw std::invalid_argument("explicit_paths: empty family");
    PathFamily fam;
    fam.dim = paths[0].dim();
    fam.space = paths[0].space();
    fam.paths = std::move(paths);
    return fam;
}

PathFamily PathFamily::mapped(const std::function<Vec(const Vec&)>& f) const {
    PathFamily out;
    out.dim = dim;
    out.space = space;
    out.paths.reserve(paths.size());
    for (const auto& p : paths) out.paths.push_back(p.mapped(f));
    return out;
}

// ---------------------------------------------------------------------------
// Admissibility
// ---------------------------------------------------------------------------

AdmissibilityReport is_admissible(const DensityField& rho, const PathFamily& fam,
                                  std::size_t sample_count, double refine_gap,
                                  int word_budget) {
    if (!rho.chart && !rho.quotient)
        throw std::invalid_argument("is_admissible: density has no evaluator");
    AdmissibilityReport rep;
    rep.min_integral = std::numeric_limits<double>::infinity();
    std::size_t stride = std::max<std::size_t>(
        1, fam.paths.size() / std::max<std::size_t>(1, sample_count));
    for (std::size_t i = 0; i < fam.paths.size(); i += stride) {
        const auto& path = fam.paths[i];
        PathLength integral =
            (path.space() == SpaceTag::quotient && rho.quotient)
                ? line_integral(path, rho.quotient, refine_gap, word_budget)
                : line_integral(path, rho.chart, refine_gap, word_budget);
        rep.min_integral = std::min(rep.min_integral, integral.value);
        rep.budget_incomplete |= integral.budget_incomplete;
        ++rep.paths_checked;
    }
    rep.pass = rep.min_integral >= 1.0 - 1e-3;
    return rep;
}

// ---------------------------------------------------------------------------
// Bounds and reference values
// ---------------------------------------------------------------------------

McResult modulus_upper_bound(const DensityField& rho, const Region& domain,
                             int n, VolumeElement element,
                             const SamplerSpec& sampler, std::uint64_t samples,
                             std::uint64_t seed, int threads) {
    if (!rho.chart)
        throw std::invalid_argument("modulus_upper_bound: need a chart evaluator");
    const double exponent = static_cast<double>(n);
    return mc_integrate(
        sampler,
        [&](const Vec& x) {
            if (!domain.contains(x)) return 0.0;
            double w = 1.0;
            if (element == VolumeElement::hyperbolic)
                w = std::pow(2.0 / (1.0 - x.squaredNorm()), exponent);
            return std::pow(rho.chart(x), exponent) * w;
        },
        samples, seed, threads);
}

DensityField ring_test_density(const QuotientPoint& p0, double r1, double r2,
                               const std::function<double(double)>& eta,
                               int word_budget) {
    if (!(0.0 < r1 && r1 < r2))
        throw std::invalid_argument("ring_test_density: need 0 < r1 < r2");
    // Normalization check by composite Simpson quadrature.
    const int k = 512;  // even
    double h = (r2 - r1) / k;
    double integral = 0.0;
    for (int i = 0; i <= k; ++i) {
        double t = r1 + i * h;
        double v = eta(t);
        if (v < 0.0)
            throw std::invalid_argument("ring_test_density: eta must be nonnegative");
        double w = (i == 0 || i == k) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        integral += w * v;
    }
    integral *= h / 3.0;
    if (integral < 1.0 - 1e-6)
        throw std::invalid_argument(
            "ring_test_density: eta integrates to " + std::to_string(integral) +
            " < 1 over the ring");

    DensityField rho;
    QuotientPoint center = p0;
    rho.quotient = [center, r1, r2, eta, word_budget](const QuotientPoint& p) {
        double t = quotient_dist(center, p, word_budget);
        return (r1 < t && t < r2) ? eta(t) : 0.0;
    };
    // In the chart anchored at p0 the quotient distance to p0 is the
    // hyperbolic distance to the origin.
    rho.chart = [r1, r2, eta](const Vec& x) {
        double t = hyp_dist(Vec::Zero(x.size()), x);
        return (r1 < t && t < r2) ? eta(t) : 0.0;
    };
    return rho;
}

std::function<double(double)> ring_extremal_weight(double r1, double r2) {
    if (!(0.0 < r1 && r1 < r2))
        throw std::invalid_argument("ring_extremal_weight: need 0 < r1 < r2");
    double norm = std::log(std::tanh(r2 / 2.0) / std::tanh(r1 / 2.0));
    return [norm](double t) { return 1.0 / (std::sinh(t) * norm); };
}

double annulus_modulus_reference(int n, double r1, double r2) {
    if (!(0.0 < r1 && r1 < r2))
        throw std::invalid_argument("annulus_modulus_reference: need 0 < r1 < r2");
    const double omega =
        2.0 * std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0);  // area of S^{n-1}
    return omega * std::pow(std::log(r2 / r1), 1.0 - n);
}

// ---------------------------------------------------------------------------
// Discrete modulus
// ---------------------------------------------------------------------------

namespace {

struct Raster {
    // Per path: (cell index, ds) pairs, cell indices into the compacted list.
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows;
    std::vector<double> cell_volume;
    std::size_t active_cells = 0;
};

class GridIndexer {
public:
    explicit GridIndexer(const GridSpec& g) : g_(g) {
        n_ = static_cast<int>(g.lo.size());
        if (g.hi.size() != n_ || static_cast<int>(g.resolution.size()) != n_)
            throw std::invalid_argument("GridSpec: inconsistent dimensions");
        strides_.assign(n_, 1);
        for (int i = n_ - 2; i >= 0; --i)
            strides_[i] = strides_[i + 1] * g.resolution[i + 1];
        for (int i = 0; i < n_; ++i) {
            if (g.resolution[i] <= 0 || !(g.lo(i) < g.hi(i)))
                throw std::invalid_argument("GridSpec: bad box or resolution");
            widths_.push_back((g.hi(i) - g.lo(i)) / g.resolution[i]);
        }
    }

    int dims() const { return n_; }
    double cell_euclidean_volume() const {
        double v = 1.0;
        for (double w : widths_) v *= w;
        return v;
    }

    // Parameters t in (0,1) where a + t(b-a) crosses a grid plane of axis d.
    void plane_crossings(double a, double b, int d, std::vector<double>& ts) const {
        if (a == b) return;
        double lo = g_.lo(d), w = widths_[d];
        double fa = (a - lo) / w, fb = (b - lo) / w;
        int k0 = static_cast<int>(std::ceil(std::min(fa, fb)));
        int k1 = static_cast<int>(std::floor(std::max(fa, fb)));
        for (int k = k0; k <= k1; ++k) {
            double t = (lo + k * w - a) / (b - a);
            if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
    }

    // Linear cell index; -1 outside the box.
    std::int64_t index(const Vec& x) const {
        std::int64_t idx = 0;
        for (int i = 0; i < n_; ++i) {
            double f = (x(i) - g_.lo(i)) / widths_[i];
            int c = static_cast<int>(std::floor(f));
            if (c < 0 || c >= g_.resolution[i]) return -1;
            idx += static_cast<std::int64_t>(c) * strides_[i];
        }
        return idx;
    }

    Vec cell_center(std::int64_t idx) const {
        Vec c(n_);
        for (int i = 0; i < n_; ++i) {
            std::int64_t q = idx / strides_[i];
            idx -= q * strides_[i];
            c(i) = g_.lo(i) + (q + 0.5) * widths_[i];
        }
        return c;
    }

private:
    GridSpec g_;
    int n_ = 0;
    std::vector<std::int64_t> strides_;
    std::vector<double> widths_;
};

// Walk each path's polyline across the grid, accumulating arc length per
// cell. Segment-cell intersections are computed exactly by collecting the
// parametric crossings of every grid plane; hyperbolic arc elements use the
// midpoint conformal factor on each clipped piece.
Raster rasterize(const PathFamily& fam, const GridSpec& grid) {
    GridIndexer indexer(grid);
    const bool hyperbolic = grid.element == VolumeElement::hyperbolic;
    const int n = indexer.dims();

    std::map<std::int64_t, std::int32_t> cell_ids;
    Raster raster;

    std::vector<double> ts;
    for (const auto& path : fam.paths) {
        std::map<std::int64_t, double> row;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const Vec& a = path.point(i);
            const Vec& b = path.point(i + 1);
            double seg_len = (b - a).norm();
            if (seg_len == 0.0) continue;
            ts.clear();
            ts.push_back(0.0);
            ts.push_back(1.0);
            for (int d = 0; d < n; ++d)
                indexer.plane_crossings(a(d), b(d), d, ts);
            std::sort(ts.begin(), ts.end());
            for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
                double span = ts[k + 1] - ts[k];
                if (span <= 0.0) continue;
                Vec mid = a + (0.5 * (ts[k] + ts[k + 1])) * (b - a);
                double ds = seg_len * span;
                if (hyperbolic) ds *= 2.0 / (1.0 - mid.squaredNorm());
                std::int64_t idx = indexer.index(mid);
                if (idx >= 0) row[idx] += ds;
            }
        }
        std::vector<std::pair<std::int32_t, double>> compact;
        compact.reserve(row.size());
        for (const auto& [idx, ds] : row) {
            auto [it, fresh] =
                cell_ids.emplace(idx, static_cast<std::int32_t>(cell_ids.size()));
            (void)fresh;
            compact.emplace_back(it->second, ds);
        }
        raster.rows.push_back(std::move(compact));
    }

    raster.active_cells = cell_ids.size();
    raster.cell_volume.assign(raster.active_cells, 0.0);
    const double vol = indexer.cell_euclidean_volume();
    const double exponent = static_cast<double>(indexer.dims());
    for (const auto& [idx, id] : cell_ids) {
        double v = vol;
        if (hyperbolic) {
            Vec c = indexer.cell_center(idx);
            v *= std::pow(2.0 / (1.0 - c.squaredNorm()), exponent);
        }
        raster.cell_volume[id] = v;
    }
    return raster;
}

}  // namespace

DiscreteModulusResult discrete_modulus(const PathFamily& fam,
                                       const GridSpec& grid,
                                       const ModulusOptions& opts) {
    if (fam.paths.empty())
        throw std::invalid_argument("discrete_modulus: empty family");
    const double n = static_cast<double>(fam.dim);

    Raster raster = rasterize(fam, grid);
    const std::size_t cells = raster.active_cells;
    const std::size_t paths = raster.rows.size();
    for (const auto& row : raster.rows)
        if (row.empty())
            throw std::invalid_argument(
                "discrete_modulus: a path does not touch the grid box");

    DiscreteModulusResult res;
    res.active_cells = cells;
    res.paths = paths;
    res.estimate = std::numeric_limits<double>::infinity();
    res.dual_bound = 0.0;

    std::vector<double> lambda(paths, 1.0);
    std::vector<double> score(cells);  // sum_j lambda_j ds_{jc}
    std::vector<double> rho(cells);
    std::vector<double> lengths(paths);

    double best_at_patience_start = std::numeric_limits<double>::infinity();
    int window_start = 0;

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        std::fill(score.begin(), score.end(), 0.0);
        for (std::size_t j = 0; j < paths; ++j)
            for (const auto& [c, ds] : raster.rows[j]) score[c] += lambda[j] * ds;

        // Lagrangian minimizer: rho_c = (score_c / (n vol_c))^{1/(n-1)}.
        double energy = 0.0;
        for (std::size_t c = 0; c < cells; ++c) {
            rho[c] = std::pow(score[c] / (n * raster.cell_volume[c]),
                              1.0 / (n - 1.0));
            energy += raster.cell_volume[c] * std::pow(rho[c], n);
        }

        double min_len = std::numeric_limits<double>::infinity();
        double lambda_sum = 0.0;
        for (std::size_t j = 0; j < paths; ++j) {
            double len = 0.0;
            for (const auto& [c, ds] : raster.rows[j]) len += rho[c] * ds;
            lengths[j] = len;
            min_len = std::min(min_len, len);
            lambda_sum += lambda[j];
        }
        res.residual = 1.0 - min_len;
        res.iterations = iter;

        // Dual value (a certified lower bound of the grid optimum).
        res.dual_bound = std::max(res.dual_bound, lambda_sum - (n - 1.0) * energy);

        // Feasible primal by scaling to min length 1.
        if (min_len > 0.0) {
            double feasible = energy / std::pow(min_len, n);
            res.estimate = std::min(res.estimate, feasible);
        }

        // The dual is scale-covariant: g(c lambda) is maximized in closed
        // form at c = (sum lambda / (n energy))^{n-1}. Rescaling every
        // iteration keeps the multiplicative reshaping well-conditioned.
        if (energy > 0.0 && lambda_sum > 0.0) {
            double c_opt = std::pow(lambda_sum / (n * energy), n - 1.0);
            double len_scale = std::pow(c_opt, 1.0 / (n - 1.0));
            double step = opts.step0 / std::sqrt(static_cast<double>(iter));
            for (std::size_t j = 0; j < paths; ++j)
                lambda[j] *= c_opt * std::exp(step * (1.0 - lengths[j] * len_scale));
        } else {
            // Degenerate start (all-zero scores): nudge everything up.
            for (std::size_t j = 0; j < paths; ++j) lambda[j] += 1.0;
        }

        if (iter - window_start >= opts.patience) {
            if (best_at_patience_start - res.estimate <=
                opts.rel_tol * std::abs(res.estimate)) {
                res.converged = true;
                break;
            }
            best_at_patience_start = res.estimate;
            window_start = iter;
        }
    }
    return res;
}

}  // namespace factorball
