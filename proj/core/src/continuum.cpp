#include "ortholap/continuum.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "ortholap/errors.hpp"
#include "ortholap/format.hpp"

namespace ortholap {

namespace {

constexpr double kPi = std::numbers::pi;

// Integer power by repeated multiplication: exact branch handling at z = 0
// (std::pow on complex arguments goes through log and produces NaN there).
std::complex<double> cpow_int(std::complex<double> z, int n) {
    std::complex<double> acc{1.0, 0.0};
    for (int i = 0; i < n; ++i) acc *= z;
    return acc;
}

double simpson_rule(double fa, double fm, double fb, double width) {
    return width / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth, bool& failed) {
    // Once any interval has exhausted the depth budget the overall result is
    // rejected, so further refinement anywhere is wasted work.
    if (failed) return whole;
    const double m = 0.5 * (a + b);
    const double flm = f(0.5 * (a + m));
    const double frm = f(0.5 * (m + b));
    const double left = simpson_rule(fa, flm, fm, m - a);
    const double right = simpson_rule(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) {
        failed = true;
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, failed) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, failed);
}

double integrate_panel(const std::function<double(double)>& f, double a, double b,
                       double tol, bool& failed) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = simpson_rule(fa, fm, fb, b - a);
    // Depth 96 leaves room for algebraic cusps in the data (error decays ~
    // 2^(-1.5 L) per level against a tolerance budget that halves per level),
    // while genuine jumps still fail cleanly: their estimate never decays
    // relative to the shrinking budget.
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 96, failed);
}

}  // namespace

HarmonicOracle harmonic_polynomial(int degree, HarmonicPart part) {
    require(degree >= 0 && degree <= 8, "DegreeOutOfRange",
            "harmonic polynomial degree must lie in [0, 8], got " + std::to_string(degree));
    const bool real_part = (part == HarmonicPart::Real);
    HarmonicOracle oracle;
    oracle.name = std::string(real_part ? "re_z" : "im_z") + std::to_string(degree);
    oracle.kind = OracleKind::Polynomial;
    oracle.accuracy = 0.0;
    oracle.value = [degree, real_part](Vec2 p) {
        const std::complex<double> zk = cpow_int(p.to_complex(), degree);
        return real_part ? zk.real() : zk.imag();
    };
    oracle.gradient = [degree, real_part](Vec2 p) {
        if (degree == 0) return Vec2{0.0, 0.0};
        const std::complex<double> dz =
            static_cast<double>(degree) * cpow_int(p.to_complex(), degree - 1);
        // For f = Re F: grad f = (Re F', -Im F'); for f = Im F: (Im F', Re F').
        return real_part ? Vec2{dz.real(), -dz.imag()} : Vec2{dz.imag(), dz.real()};
    };
    oracle.sup_bound = (degree == 0 && !real_part) ? 0.0 : 1.0;
    oracle.grad_bound = degree;
    oracle.hess_bound = static_cast<double>(degree) * (degree - 1);
    oracle.third_bound = static_cast<double>(degree) * (degree - 1) * (degree - 2);
    return oracle;
}

HolderData holder_distance_data(Vec2 anchor, double alpha) {
    require(alpha > 0.0 && alpha <= 1.0, "DomainError",
            "Hoelder exponent must lie in (0, 1], got " + fmt_g12(alpha));
    HolderData data;
    data.g = [anchor, alpha](Vec2 w) { return std::pow(dist(w, anchor), alpha); };
    data.alpha = alpha;
    // |d(x)^a - d(y)^a| <= |d(x) - d(y)|^a <= |x - y|^a, so the constant is 1.
    data.holder_norm = 1.0;
    data.sup_norm = std::pow(1.0 + anchor.norm(), alpha);
    return data;
}

double poisson_disk(const HolderData& data, Vec2 z, double tol) {
    require(static_cast<bool>(data.g), "DomainError",
            "boundary data callback is empty");
    require(tol > 0.0, "DomainError", "quadrature tolerance must be positive");
    const double r = z.norm();
    const double gap = 1.0 - r;
    require(gap > 1e-6, "TooCloseToBoundary",
            "evaluation point is " + fmt_g12(gap) +
                " from the unit circle; the kernel integral needs a gap above 1e-06");

    const double r2 = r * r;
    auto integrand = [&](double t) {
        const double cx = std::cos(t);
        const double cy = std::sin(t);
        const double dx = cx - z.x;
        const double dy = cy - z.y;
        return (1.0 - r2) / (dx * dx + dy * dy) * data.g(Vec2{cx, cy});
    };

    // Panel edges fan out geometrically from the kernel peak at arg(z), so the
    // first panels resolve the O(gap)-wide spike and the far side stays coarse.
    const double theta0 = (r > 0.0) ? std::atan2(z.y, z.x) : 0.0;
    std::vector<double> offsets{0.0};
    for (double edge = std::min(gap, kPi); edge < kPi; edge *= 2.0) offsets.push_back(edge);
    offsets.push_back(kPi);

    const std::size_t panel_count = 2 * (offsets.size() - 1);
    const double panel_tol = tol * (2.0 * kPi) / (2.0 * static_cast<double>(panel_count));
    bool failed = false;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
        total += integrate_panel(integrand, theta0 + offsets[i], theta0 + offsets[i + 1],
                                 panel_tol, failed);
        total += integrate_panel(integrand, theta0 - offsets[i + 1], theta0 - offsets[i],
                                 panel_tol, failed);
    }
    require(!failed, "QuadratureFailure",
            "adaptive refinement hit the depth limit before reaching tolerance " +
                fmt_g12(tol));
    return total / (2.0 * kPi);
}

HarmonicOracle holder_oracle(const HolderData& data, double quad_tol) {
    require(static_cast<bool>(data.g), "DomainError", "boundary data callback is empty");
    require(data.alpha > 0.0 && data.alpha <= 1.0, "DomainError",
            "Hoelder exponent must lie in (0, 1], got " + fmt_g12(data.alpha));
    require(quad_tol > 0.0, "DomainError", "quadrature tolerance must be positive");
    HarmonicOracle oracle;
    oracle.name = "holder_a" + fmt_g12(data.alpha);
    oracle.kind = OracleKind::PoissonQuadrature;
    oracle.accuracy = quad_tol;
    oracle.value = [data, quad_tol](Vec2 z) { return poisson_disk(data, z, quad_tol); };
    // Max principle: the extension is bounded by the largest boundary value.
    oracle.sup_bound = data.sup_norm;
    return oracle;
}

double beurling_tail_bound(double d, double r, double diam, double alpha) {
    require(alpha > 0.0 && alpha <= 1.0, "DomainError",
            "Hoelder exponent must lie in (0, 1], got " + fmt_g12(alpha));
    require(d > 0.0, "BadOrdering", "depth must be positive, got " + fmt_g12(d));
    require(d <= r && r <= diam, "BadOrdering",
            "scales must satisfy d <= r <= diam, got d = " + fmt_g12(d) +
                ", r = " + fmt_g12(r) + ", diam = " + fmt_g12(diam));
    if (std::abs(alpha - 0.5) <= 1e-12)
        return alpha * std::pow(d, alpha) * std::log(diam / d);
    if (alpha < 0.5) return alpha / (1.0 - 2.0 * alpha) * std::pow(d, alpha);
    return alpha / (2.0 * alpha - 1.0) * std::pow(diam, alpha) * std::sqrt(d / diam);
}

HarnackCheck harnack_bound_check(const SampledField& field, Vec2 x1, Vec2 x2, double d,
                                 double c0) {
    require(static_cast<bool>(field.h), "DomainError", "sampled field has no value callback");
    require(static_cast<bool>(field.boundary_distance), "DomainError",
            "sampled field has no boundary-distance callback");
    require(c0 > 0.0, "DomainError", "bound constant must be positive");
    require(d > 0.0, "DomainError", "depth must be positive, got " + fmt_g12(d));
    for (const Vec2 x : {x1, x2}) {
        const double margin = field.boundary_distance(x);
        require(margin >= d, "OutOfSampledRegion",
                "point (" + fmt_g12(x.x) + ", " + fmt_g12(x.y) + ") is only " +
                    fmt_g12(margin) + " from the sampling boundary; the check runs at depth " +
                    fmt_g12(d));
    }
    HarnackCheck out;
    out.depth = d;
    out.separation = dist(x1, x2);
    out.lhs = std::abs(field.h(x2) - field.h(x1));
    out.rhs = c0 * (field.sup_norm * out.separation / d +
                    field.laplacian_bound * d * out.separation);
    out.ok = out.lhs <= out.rhs;
    return out;
}

SmoothFunction quadratic_radial() {
    SmoothFunction f;
    f.name = "abs_z_sq";
    f.value = [](Vec2 p) { return p.x * p.x + p.y * p.y; };
    f.laplacian = [](Vec2) { return 4.0; };
    f.second_bound = 2.0;
    f.third_bound = 0.0;
    return f;
}

SmoothFunction smooth_from(const HarmonicOracle& oracle) {
    SmoothFunction f;
    f.name = oracle.name;
    f.value = oracle.value;
    f.laplacian = [](Vec2) { return 0.0; };
    f.second_bound = oracle.hess_bound;
    f.third_bound = oracle.third_bound;
    return f;
}

}  // namespace ortholap
