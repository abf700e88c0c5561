#pragma once
// Continuum reference solutions used to judge discrete fields: harmonic
// polynomials with derivative bounds, Poisson-integral extensions of rough
// (Hoelder) boundary data on the unit disk, escape-probability tail bounds,
// and an interior difference-bound check for near-harmonic samples.

#include <functional>
#include <string>

#include "ortholap/geometry.hpp"

namespace ortholap {

enum class HarmonicPart { Real, Imag };

/// Where an oracle's values come from, and hence how exact they are.
enum class OracleKind { Polynomial, PoissonQuadrature };

/// Closed-form (or quadrature-backed) reference function together with the
/// derivative bounds needed to budget discretization error against it.
/// All bounds are sups over the closed unit disk.
struct HarmonicOracle {
    std::string name;
    OracleKind kind = OracleKind::Polynomial;
    std::function<double(Vec2)> value;
    std::function<Vec2(Vec2)> gradient;  ///< empty when only values are available
    double accuracy = 0.0;  ///< declared absolute value error (0 = exact)
    double sup_bound = 1.0;
    double grad_bound = 0.0;
    double hess_bound = 0.0;   ///< bound on second-derivative magnitudes
    double third_bound = 0.0;  ///< bound on third-derivative magnitudes
    bool has_gradient() const { return static_cast<bool>(gradient); }
};

/// Real or imaginary part of z^degree; degree must lie in [0, 8].
HarmonicOracle harmonic_polynomial(int degree, HarmonicPart part);

/// Boundary data of known Hoelder class: an evaluator over boundary points
/// together with the exponent and the norms entering the error bounds.
struct HolderData {
    std::function<double(Vec2)> g;
    double alpha = 0.5;
    double holder_norm = 1.0;  ///< constant in |g(x)-g(y)| <= holder_norm |x-y|^alpha
    double sup_norm = 1.0;     ///< sup |g| over the boundary
};

/// Distance data g(w) = |w - anchor|^alpha.  For alpha in (0, 1] this is
/// Hoelder continuous with constant exactly 1; the sup norm is recorded for
/// the unit circle.
HolderData holder_distance_data(Vec2 anchor, double alpha);

/// Harmonic extension of unit-circle data to an interior point z:
///   u(z) = (1/2pi) * integral over angles of (1-|z|^2)/|w-z|^2 * g(w).
/// Integration panels are concentrated around the kernel peak at arg(z) and
/// each panel is handled by adaptive Simpson refinement, so the cost stays
/// modest even when z is close to the circle.
double poisson_disk(const HolderData& data, Vec2 z, double tol = 1e-10);

/// Oracle whose values come from the Poisson integral of Hoelder data.
/// Valid strictly inside the unit disk; no gradient is provided.
HarmonicOracle holder_oracle(const HolderData& data, double quad_tol = 1e-9);

/// Boundary-regime error bound for data of Hoelder exponent alpha at depth d:
/// piecewise in alpha with a logarithmic middle regime at alpha = 1/2.  The
/// scales must satisfy 0 < d <= r <= diam (r is the probe radius the bound is
/// quoted at); the returned value is the bound shape with unit constant.
double beurling_tail_bound(double d, double r, double diam, double alpha);

/// Scalar field sampled over some region, with the global bounds needed for
/// interior difference estimates.
struct SampledField {
    std::function<double(Vec2)> h;
    double sup_norm = 0.0;
    double laplacian_bound = 0.0;  ///< sup of |Laplacian| over the region
    std::function<double(Vec2)> boundary_distance;
};

struct HarnackCheck {
    double lhs = 0.0;         ///< |h(x2) - h(x1)|
    double rhs = 0.0;         ///< c0 * (sup * sep / depth + lap * depth * sep)
    double separation = 0.0;  ///< |x2 - x1|
    double depth = 0.0;       ///< the depth d the bound was evaluated at
    bool ok = false;          ///< lhs <= rhs
};

/// Checks the interior difference bound
///   |h(x2) - h(x1)| <= c0 * (sup_norm * |x2-x1| / d + laplacian_bound * d * |x2-x1|)
/// at the caller-supplied depth d (typically min of the two boundary
/// distances).  Both points must be at least d away from the sampling
/// boundary, else OutOfSampledRegion.
HarnackCheck harnack_bound_check(const SampledField& field, Vec2 x1, Vec2 x2,
                                 double d, double c0 = 16.0);

/// Twice-differentiable test function with the bounds used by averaging and
/// mollification error budgets.
struct SmoothFunction {
    std::string name;
    std::function<double(Vec2)> value;
    std::function<double(Vec2)> laplacian;
    double second_bound = 0.0;  ///< sup of second-derivative magnitudes
    double third_bound = 0.0;   ///< sup of third-derivative magnitudes
};

/// f(z) = |z|^2 with Laplacian identically 4.
SmoothFunction quadratic_radial();

/// Wraps a harmonic oracle as a smooth test function (Laplacian zero).
SmoothFunction smooth_from(const HarmonicOracle& oracle);

}  // namespace ortholap
