#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ortholap/map.hpp"

namespace ortholap {

// The two vertex families carry separate electrical networks: each quad
// contributes one primal edge (its primal diagonal) weighted by the ratio of
// diagonal lengths, and the reciprocal weight on the dual diagonal.

enum class Side : int { Primal, Dual };

// Scalar values on the vertices of one side. `ids` are map vertex ids in
// ascending order; `values` is parallel to `ids`.
struct DiscreteField {
    Side side = Side::Primal;
    std::vector<int> ids;
    std::vector<double> values;

    int try_slot(int map_id) const;          // -1 when absent
    int slot_of(int map_id) const;           // throws SideMismatch when absent
    double value_at(int map_id) const { return values[static_cast<size_t>(slot_of(map_id))]; }
    double sup_norm() const;
};

void save_field(const DiscreteField& f, const std::string& path);
DiscreteField load_field(const std::string& path);

// Samples a scalar function of position on every vertex of the given side.
DiscreteField sample_scalar(const OrthodiagonalMap& map, Side side,
                            const std::function<double(Vec2)>& f);

struct WeightedNetwork {
    Side side = Side::Primal;
    std::vector<int> ids;        // map ids on this side, ascending
    std::vector<int> net_index;  // by map id; -1 for the other side
    std::vector<Vec2> positions;           // by network index
    std::vector<char> absorbing;           // by network index
    std::vector<std::vector<std::pair<int, double>>> adj;  // (neighbor index, conductance)
    std::vector<double> pi;                // total conductance per vertex
    std::vector<int> interior;             // network indices, ascending
    std::vector<int> boundary;             // network indices, ascending

    int size() const { return static_cast<int>(ids.size()); }
};

// Validates the map (InvalidMap on failure) and assembles one side's network.
WeightedNetwork build_network(const OrthodiagonalMap& map, Side side);

// Weighted graph Laplacian: (Lf)(x) = sum_y c(x,y) (f(y) - f(x)), evaluated at
// every vertex of the network (boundary rows use only existing edges).
std::vector<double> laplacian_apply(const WeightedNetwork& net, const DiscreteField& f);

struct SolveOptions {
    double tol = 1e-10;        // per-vertex: |r_x| <= tol * pi_x * max|g|
    int max_iter_factor = 20;  // iteration cap = factor * #unknowns
    bool allow_dense_fallback = true;
    bool force_dense = false;
};

struct SolveStats {
    int iterations = 0;
    double max_scaled_residual = 0.0;
    bool used_dense = false;
};

// Solves the Dirichlet problem: harmonic on interior vertices, equal to
// `boundary_values` (parallel to net.boundary) on absorbing vertices.
// Conjugate gradients with Jacobi scaling; small systems can fall back to a
// dense factorization when the iteration stalls. Throws NonConvergence.
DiscreteField solve_dirichlet(const WeightedNetwork& net,
                              const std::vector<double>& boundary_values,
                              const SolveOptions& opts = {}, SolveStats* stats = nullptr);

// Evaluates g at the positions of the network's boundary vertices.
std::vector<double> boundary_values_from(const WeightedNetwork& net,
                                         const std::function<double(Vec2)>& g);

// Conjugate field on the dual side: across each quad [u,r,v,s] the increment
// is value(s) - value(r) = c_primal * (h(v) - h(u)), anchored to 0 at the
// smallest dual id. Requires h to be discretely harmonic on interior primal
// vertices up to `tol * pi_x * max(1, |h|_inf)` (NotHarmonic otherwise);
// harmonicity is exactly the condition that makes the increments consistent
// around closed loops.
DiscreteField harmonic_conjugate(const OrthodiagonalMap& map, const DiscreteField& h,
                                 double tol = 1e-8);

// Complex values on every vertex of the map (indexed by map id).
struct ComplexField {
    std::vector<std::complex<double>> values;
};

ComplexField sample_complex(const OrthodiagonalMap& map,
                            const std::function<std::complex<double>(std::complex<double>)>& f);

// Real part on primal vertices, i * conjugate on dual vertices: the discrete
// analytic combination of a harmonic field and its conjugate.
ComplexField combine_analytic(const OrthodiagonalMap& map, const DiscreteField& h,
                              const DiscreteField& conj);

// Trapezoid contour sum along a closed cycle of vertices joined by quad
// sides: sum (F(a)+F(b)) (z_b - z_a). This approximates twice the continuum
// contour integral of F; around a single quad with F(z) = conj(z) it equals
// 4i times the quad area exactly. Throws NotAPath when consecutive vertices
// do not share a quad side.
std::complex<double> contour_sum(const OrthodiagonalMap& map, const ComplexField& F,
                                 const std::vector<int>& cycle);

// Per-quad difference-quotient mismatch between the two diagonals:
// |(F(v)-F(u))/(z_v-z_u) - (F(s)-F(r))/(z_s-z_r)|.
std::vector<double> cauchy_riemann_residuals(const OrthodiagonalMap& map,
                                             const ComplexField& F);

}  // namespace ortholap
