#pragma once
// Turning discrete primal fields into functions of a continuous variable:
// piecewise-linear extension over the quads, smooth compactly supported
// bumps for convolution, and local averages of the discrete Laplacian.

#include <functional>
#include <vector>

#include "ortholap/continuum.hpp"
#include "ortholap/map.hpp"
#include "ortholap/network.hpp"

namespace ortholap {

/// Normalizer for the standard bump exp(-1/(1-r^2)) on the unit disk,
/// 1 / (2 pi * integral_0^1 r exp(-1/(1-r^2)) dr), frozen from 30-digit
/// quadrature so the bump integrates to one.
inline constexpr double kBumpNormalizer = 2.1435657757922366;

/// Piecewise-linear extension of a primal field to the union of all quads.
/// Each quad is split into two triangles by its primal diagonal; primal
/// corners carry the field values and each dual corner carries the average of
/// the field over the primal endpoints of its incident quads.  The result is
/// continuous across quad boundaries.
class ExtendedField {
public:
    /// The field must be primal and cover every primal vertex of the map.
    ExtendedField(const OrthodiagonalMap& map, DiscreteField field);

    /// Value at a point of the meshed region; OutOfSampledRegion outside it.
    double value(Vec2 z) const;

    /// True when z lies in some quad (the domain of the extension).
    bool covers(Vec2 z) const;

    /// Distance from z to the outer boundary polyline of the mesh.
    double boundary_distance(Vec2 z) const;

    /// Sup of the extension, which the corner values attain.
    double sup_norm() const;

    /// Field value at a primal vertex, or the incident-primal average at a
    /// dual vertex.
    double corner_value(int vertex_id) const;

    const OrthodiagonalMap& map() const { return *map_; }

private:
    int locate(Vec2 z) const;
    double value_in_quad(const Quad& q, Vec2 z) const;

    const OrthodiagonalMap* map_;
    DiscreteField field_;
    std::vector<double> corner_values_;
    Vec2 grid_lo_{0.0, 0.0};
    Vec2 grid_hi_{0.0, 0.0};
    double cell_ = 1.0;
    int grid_nx_ = 0, grid_ny_ = 0;
    std::vector<std::vector<int>> buckets_;
};

/// Radially symmetric bump of unit mass supported on the disk of radius
/// delta, with its gradient and Laplacian in closed form.
struct Mollifier {
    double delta = 1.0;
    double value(Vec2 z) const;
    Vec2 gradient(Vec2 z) const;
    double laplacian(Vec2 z) const;
};

Mollifier make_mollifier(double delta);

/// Mass-normalized midpoint-rule convolution (bump * extension)(z) on a
/// uniform grid of pitch quad_step across the support square.  quad_step must
/// not exceed delta/8 (0 selects the default pitch delta/16), and the point
/// must keep delta + quad_step clear of the meshed boundary.
double convolve_value(const ExtendedField& field, const Mollifier& bump, Vec2 z,
                      double quad_step = 0.0);

/// Laplacian of the convolution, evaluated by moving both derivatives onto
/// the bump:  sum of lap(bump)(z - w) * (field(w) - field(z)) over the same
/// midpoint grid.  Subtracting field(z) costs nothing (the bump Laplacian has
/// zero mean) and removes the quadrature bias on constants.
double convolved_laplacian(const ExtendedField& field, const Mollifier& bump, Vec2 z,
                           double quad_step = 0.0);

/// Declared scale of the midpoint-rule error of convolved_laplacian: the
/// integrand's second derivatives carry delta^-4, so the error budget is
/// quad_step^2 * delta^-4 * field sup (unit constant).
double quadrature_error_bound(const Mollifier& bump, double quad_step, double field_sup);

struct LaplacianResidual {
    double discrete_sum = 0.0;  ///< sum of discrete Laplacians over the square
    double integral = 0.0;      ///< integral of the continuous Laplacian
    double residual = 0.0;      ///< |discrete_sum - integral|
    int vertex_count = 0;       ///< primal vertices that contributed
};

/// Samples the function on the primal lattice and compares the summed discrete
/// Laplacian over the axis-aligned square of the given side centered at
/// center against the integral of the true Laplacian over the same square.
/// The square (via its circumscribed disk) must lie inside the meshed region
/// and must contain at least one primal vertex.
LaplacianResidual averaged_laplacian_residual(const OrthodiagonalMap& map,
                                              const SmoothFunction& f, Vec2 center,
                                              double side);

/// Average of a smooth function over the same square, by an 8x8 tensor
/// Gauss-Legendre rule (exact through polynomial degree 15 per axis).
double square_average(const std::function<double(Vec2)>& f, Vec2 center, double side);

}  // namespace ortholap
