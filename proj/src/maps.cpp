#include "factorball/maps.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace factorball {

Mat jacobian(const SmoothMap& m, const Vec& x, double step) {
    if (m.jac) return m.jac(x);
    if (!m.eval) throw std::invalid_argument("jacobian: map has no evaluator");
    const int n = m.dim;
    double h = step * std::max(1.0 - x.norm(), 1e-9);
    if (x.norm() + 2.0 * h >= m.domain_radius)
        throw std::domain_error("jacobian: point too close to the domain boundary");
    Mat j(n, n);
    Vec xp = x, xm = x;
    for (int col = 0; col < n; ++col) {
        xp(col) += h;
        xm(col) -= h;
        j.col(col) = (m.eval(xp) - m.eval(xm)) / (2.0 * h);
        xp(col) = x(col);
        xm(col) = x(col);
    }
    return j;
}

namespace {

struct SingularData {
    double sigma_max;
    double sigma_min;
    double abs_det;
    bool zero;
};

SingularData singular_data(const Mat& j) {
    Eigen::JacobiSVD<Mat> svd(j);
    const auto& s = svd.singularValues();
    SingularData d;
    d.sigma_max = s(0);
    d.sigma_min = s(s.size() - 1);
    d.abs_det = s.prod();
    d.zero = d.sigma_max == 0.0;
    return d;
}

}  // namespace

Dilatation inner_dilatation(const Mat& j) {
    SingularData d = singular_data(j);
    if (d.zero) return {1.0, true};
    if (d.abs_det == 0.0 || d.sigma_min == 0.0) return Dilatation::infinite();
    const double n = static_cast<double>(j.rows());
    return {d.abs_det / std::pow(d.sigma_min, n), true};
}

Dilatation outer_dilatation(const Mat& j) {
    SingularData d = singular_data(j);
    if (d.zero) return {1.0, true};
    if (d.abs_det == 0.0) return Dilatation::infinite();
    const double n = static_cast<double>(j.rows());
    return {std::pow(d.sigma_max, n) / d.abs_det, true};
}

double max_stretch(const SmoothMap& m, const Vec& x) {
    return singular_data(jacobian(m, x)).sigma_max;
}

SmoothMap identity_map(int n) {
    SmoothMap m;
    m.dim = n;
    m.eval = [](const Vec& x) { return x; };
    m.jac = [n](const Vec&) { return Mat(Mat::Identity(n, n)); };
    return m;
}

SmoothMap linear_map(Mat a) {
    SmoothMap m;
    m.dim = static_cast<int>(a.rows());
    auto mat = std::make_shared<Mat>(std::move(a));
    m.eval = [mat](const Vec& x) { return Vec(*mat * x); };
    m.jac = [mat](const Vec&) { return *mat; };
    return m;
}

SmoothMap mobius_as_smooth(const MobiusMap& mob) {
    SmoothMap m;
    m.dim = mob.dim();
    auto copy = std::make_shared<MobiusMap>(mob);
    m.eval = [copy](const Vec& x) { return copy->apply_vec(x); };
    return m;  // finite-difference Jacobian; the map is conformal anyway
}

// ---------------------------------------------------------------------------
// Radial stretch family
// ---------------------------------------------------------------------------

namespace {

double seam_radius(int m) { return (m - 1.0) / m; }

// log^alpha(e/r) = (1 - log r)^alpha ; r in (0, 1].
double log_pow(double alpha, double r) {
    return std::pow(1.0 - std::log(r), alpha);
}

// Linear factor of the inner branch, s(b)/b with b the seam radius.
double inner_factor(double alpha, int m) {
    double b = seam_radius(m);
    return std::exp(1.0 - log_pow(alpha, b)) / b;
}

void check_radial_params(double alpha, int m) {
    if (alpha < 1.0)
        throw std::invalid_argument("radial map: alpha must be >= 1");
    if (m < 1) throw std::invalid_argument("radial map: m must be >= 1");
}

}  // namespace

double radial_profile(double alpha, int m, double r) {
    check_radial_params(alpha, m);
    if (r < 0.0) throw std::invalid_argument("radial_profile: negative radius");
    if (r == 0.0) return 0.0;
    double b = seam_radius(m);
    if (m > 1 && r <= b) return inner_factor(alpha, m) * r;
    return std::exp(1.0 - log_pow(alpha, r));
}

double radial_profile_inverse(double alpha, int m, double s) {
    check_radial_params(alpha, m);
    if (s < 0.0) throw std::invalid_argument("radial_profile_inverse: negative value");
    if (s == 0.0) return 0.0;
    double b = seam_radius(m);
    if (m > 1 && s <= radial_profile(alpha, m, b))
        return s / inner_factor(alpha, m);
    // s = exp(1 - (1 - log r)^alpha)  =>  r = exp(1 - (1 - log s)^{1/alpha})
    return std::exp(1.0 - std::pow(1.0 - std::log(s), 1.0 / alpha));
}

double radial_profile_derivative(double alpha, int m, double r) {
    check_radial_params(alpha, m);
    double b = seam_radius(m);
    if (m > 1 && r <= b) return inner_factor(alpha, m);
    // s'(r) = (s(r)/r) * alpha * log^{alpha-1}(e/r)
    double s = std::exp(1.0 - log_pow(alpha, r));
    return s / r * alpha * std::pow(1.0 - std::log(r), alpha - 1.0);
}

double radial_dilatation_bound(double alpha, double r) {
    return alpha * std::pow(1.0 - std::log(r), alpha - 1.0);
}

namespace {

SmoothMap radial_map_impl(double alpha, int m, int n, double scale) {
    check_radial_params(alpha, m);
    SmoothMap map;
    map.dim = n;
    map.domain_radius = scale;
    map.eval = [alpha, m, scale](const Vec& y) {
        double rho = y.norm();
        if (rho == 0.0) return Vec(Vec::Zero(y.size()));
        double r = rho / scale;
        double s = radial_profile(alpha, m, r);
        return Vec((scale * s / rho) * y);
    };
    map.jac = [alpha, m, n, scale](const Vec& y) {
        double rho = y.norm();
        double r = rho / scale;
        double b = seam_radius(m);
        if (m == 1 && rho == 0.0) {
            // Derivative at the origin of the pure stretch: I for alpha = 1,
            // zero otherwise (the profile flattens out completely).
            if (alpha == 1.0) return Mat(Mat::Identity(n, n));
            return Mat(Mat::Zero(n, n));
        }
        if (rho == 0.0 || (m > 1 && r < b))
            return Mat(inner_factor(alpha, m) * Mat::Identity(n, n));
        // J = (s/r)(I - u u^T) + s'(r) u u^T in the unscaled variable; the
        // scale cancels through the chain rule.
        Vec u = y / rho;
        double s = radial_profile(alpha, m, r);
        double ds = radial_profile_derivative(alpha, m, r);
        Mat uut = u * u.transpose();
        return Mat((s / r) * (Mat::Identity(n, n) - uut) + ds * uut);
    };
    return map;
}

}  // namespace

SmoothMap radial_example_map(double alpha, int m, int n) {
    return radial_map_impl(alpha, m, n, 1.0);
}

SmoothMap radial_example_scaled(double alpha, int m, int n, double R) {
    if (!(R > 0.0 && R <= 1.0))
        throw std::invalid_argument("radial_example_scaled: need 0 < R <= 1");
    return radial_map_impl(alpha, m, n, R);
}

SmoothMap radial_example_scaled_inverse(double alpha, int m, int n, double R) {
    if (!(R > 0.0 && R <= 1.0))
        throw std::invalid_argument("radial_example_scaled_inverse: need 0 < R <= 1");
    check_radial_params(alpha, m);
    SmoothMap map;
    map.dim = n;
    map.domain_radius = R;
    map.eval = [alpha, m, R](const Vec& y) {
        double rho = y.norm();
        if (rho == 0.0) return Vec(Vec::Zero(y.size()));
        double r = radial_profile_inverse(alpha, m, rho / R);
        return Vec((R * r / rho) * y);
    };
    return map;
}

// ---------------------------------------------------------------------------
// Quotient maps
// ---------------------------------------------------------------------------

Dilatation chart_inner_dilatation(const QuotientMap& f, const QuotientPoint& p) {
    auto rep = f.chart_rep(p);
    return inner_dilatation(jacobian(rep.map, rep.x));
}

Dilatation chart_outer_dilatation(const QuotientMap& f, const QuotientPoint& p) {
    auto rep = f.chart_rep(p);
    return outer_dilatation(jacobian(rep.map, rep.x));
}

QuotientMap::ChartRep IdentityQuotientMap::chart_rep(const QuotientPoint& p) const {
    return {identity_map(group_->dimension()), p.rep.v()};
}

MobiusQuotientMap::MobiusQuotientMap(MobiusMap g0, GroupHandle source)
    : g0_(std::move(g0)), g0_inv_(g0_.inverse()), source_(std::move(source)) {
    if (g0_.dim() != source_->dimension())
        throw std::invalid_argument("MobiusQuotientMap: dimension mismatch");
    std::vector<MobiusMap> conj;
    for (const auto& gen : source_->generators())
        conj.push_back(compose(g0_, compose(gen, g0_inv_)));
    target_ = std::make_shared<GroupPresentation>(
        source_->dimension(), std::move(conj), source_->label() + "^mobius");
}

QuotientPoint MobiusQuotientMap::apply(const QuotientPoint& p) const {
    if (p.group.get() != source_.get())
        throw std::invalid_argument("MobiusQuotientMap: wrong source group");
    return QuotientPoint(g0_.apply(p.rep), target_);
}

QuotientPoint MobiusQuotientMap::apply_inverse(const QuotientPoint& p) const {
    if (p.group.get() != target_.get())
        throw std::invalid_argument("MobiusQuotientMap: wrong target group");
    return QuotientPoint(g0_inv_.apply(p.rep), source_);
}

QuotientMap::ChartRep MobiusQuotientMap::chart_rep(const QuotientPoint& p) const {
    return {mobius_as_smooth(g0_), p.rep.v()};
}

ChartLocalQuotientMap::ChartLocalQuotientMap(QuotientPoint p0, double r0,
                                             SmoothMap chart_map,
                                             SmoothMap chart_map_inverse,
                                             int word_budget)
    : group_(p0.group),
      p0_(std::move(p0)),
      r0_(r0),
      r0_prime_(euclidean_radius_of_hyp_ball(r0)),
      word_budget_(word_budget),
      chart_(p0_, normal_neighborhood(p0_, word_budget).radius, word_budget),
      fwd_(std::move(chart_map)),
      inv_(std::move(chart_map_inverse)) {
    if (!(r0_ > 0.0))
        throw std::invalid_argument("ChartLocalQuotientMap: r0 must be positive");
    if (r0_ >= chart_.radius())
        throw std::invalid_argument(
            "ChartLocalQuotientMap: r0 must lie below the normal-neighborhood "
            "radius " + std::to_string(chart_.radius()));
}

QuotientPoint ChartLocalQuotientMap::apply(const QuotientPoint& p) const {
    auto d = quotient_dist_detail(p, p0_, word_budget_);
    if (d.value >= r0_) return p;
    Vec x = chart_.to_origin().apply_vec(d.lift);
    Vec y = fwd_.eval(x);
    return QuotientPoint(Point(chart_.from_origin().apply_vec(y)), group_);
}

QuotientPoint ChartLocalQuotientMap::apply_inverse(const QuotientPoint& p) const {
    if (!inv_.eval)
        throw std::logic_error("ChartLocalQuotientMap: no inverse supplied");
    auto d = quotient_dist_detail(p, p0_, word_budget_);
    if (d.value >= r0_) return p;
    Vec y = chart_.to_origin().apply_vec(d.lift);
    Vec x = inv_.eval(y);
    return QuotientPoint(Point(chart_.from_origin().apply_vec(x)), group_);
}

QuotientMap::ChartRep ChartLocalQuotientMap::chart_rep(const QuotientPoint& p) const {
    auto d = quotient_dist_detail(p, p0_, word_budget_);
    if (d.value < r0_)
        return {fwd_, chart_.to_origin().apply_vec(d.lift)};
    return {identity_map(group_->dimension()), Vec::Zero(group_->dimension())};
}

BallQuotientMap::BallQuotientMap(GroupHandle trivial_group, SmoothMap fwd,
                                 SmoothMap inv)
    : group_(std::move(trivial_group)), fwd_(std::move(fwd)), inv_(std::move(inv)) {
    if (!group_->is_trivial())
        throw std::invalid_argument(
            "BallQuotientMap: plain ball maps require the trivial group");
}

QuotientPoint BallQuotientMap::apply(const QuotientPoint& p) const {
    return QuotientPoint(Point(fwd_.eval(p.rep.v())), group_);
}

QuotientPoint BallQuotientMap::apply_inverse(const QuotientPoint& p) const {
    if (!inv_.eval)
        throw std::logic_error("BallQuotientMap: no inverse supplied");
    return QuotientPoint(Point(inv_.eval(p.rep.v())), group_);
}

QuotientMap::ChartRep BallQuotientMap::chart_rep(const QuotientPoint& p) const {
    return {fwd_, p.rep.v()};
}

std::shared_ptr<ChartLocalQuotientMap> build_fm_family(
    const GroupHandle& g, const QuotientPoint& p0, double r0, double alpha,
    int m, int word_budget) {
    if (p0.group.get() != g.get())
        throw std::invalid_argument("build_fm_family: p0 not in the given group");
    const int n = g->dimension();
    const double r0p = euclidean_radius_of_hyp_ball(r0);
    return std::make_shared<ChartLocalQuotientMap>(
        p0, r0, radial_example_scaled(alpha, m, n, r0p),
        radial_example_scaled_inverse(alpha, m, n, r0p), word_budget);
}

}  // namespace factorball
