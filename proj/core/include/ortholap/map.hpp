#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ortholap/geometry.hpp"

namespace ortholap {

// A planar quad mesh with two interleaved vertex families ("primal" and
// "dual"). Every inner face is a quadrilateral whose diagonals — one primal,
// one dual — are orthogonal; the ratio of diagonal lengths gives each diagonal
// its conductance. The union of the closed quads is the polygonal region the
// mesh covers; its outer boundary must be a simple closed curve.

enum class VertexKind : std::uint8_t { Primal, Dual };

struct Vertex {
    int id = -1;
    Vec2 pos;
    VertexKind kind = VertexKind::Primal;
    // True for vertices on the outer-face boundary, and for any vertex
    // re-flagged as absorbing (e.g. slit vertices). These carry Dirichlet data
    // and absorb random walks.
    bool boundary = false;
};

struct Quad {
    // Corner ids in counterclockwise order [u, r, v, s]; u and v are primal,
    // r and s dual. The primal diagonal is u->v, the dual diagonal r->s.
    std::array<int, 4> corner{-1, -1, -1, -1};

    double primal_diag_len = 0.0;
    double dual_diag_len = 0.0;
    double area = 0.0;  // ½·|primal diag|·|dual diag|

    int u() const { return corner[0]; }
    int r() const { return corner[1]; }
    int v() const { return corner[2]; }
    int s() const { return corner[3]; }

    // Conductance of the primal diagonal: |dual diag| / |primal diag|.
    double primal_conductance() const { return dual_diag_len / primal_diag_len; }
    // Conductance of the dual diagonal (reciprocal of the primal one).
    double dual_conductance() const { return primal_diag_len / dual_diag_len; }
};

struct DomainDescriptor {
    enum class Kind { Disk, Rect, Unknown };

    Kind kind = Kind::Unknown;
    Vec2 center;          // disk
    double radius = 0.0;  // disk
    Vec2 lo, hi;          // rect

    static DomainDescriptor disk(Vec2 center, double radius);
    static DomainDescriptor rect(Vec2 lo, Vec2 hi);
    static DomainDescriptor unknown();

    bool known() const { return kind != Kind::Unknown; }
    bool contains(const Vec2& p) const;          // closed containment
    double boundary_distance(const Vec2& p) const;  // distance to the domain boundary
    double diameter() const;
    std::string describe() const;
};

struct AdjacencyEntry {
    int neighbor = -1;  // same-kind neighbor across a quad diagonal
    int quad = -1;
};

struct OrthodiagonalMap {
    std::vector<Vertex> vertices;
    std::vector<Quad> quads;
    double mesh_eps = 0.0;  // declared bound on quad side lengths
    DomainDescriptor domain;

    // Indexed by vertex id; entries only for vertices of the matching kind.
    std::vector<std::vector<AdjacencyEntry>> primal_adjacency;
    std::vector<std::vector<AdjacencyEntry>> dual_adjacency;

    // Outer-face boundary walk: vertex ids in cyclic order (closed, first not
    // repeated). Alternates primal/dual because the quad graph is bipartite.
    std::vector<int> boundary_cycle;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int quad_count() const { return static_cast<int>(quads.size()); }
    const Vec2& pos(int id) const { return vertices[static_cast<size_t>(id)].pos; }
    bool is_primal(int id) const {
        return vertices[static_cast<size_t>(id)].kind == VertexKind::Primal;
    }
    bool is_boundary(int id) const { return vertices[static_cast<size_t>(id)].boundary; }

    std::vector<int> interior_primal_ids() const;
    std::vector<int> boundary_primal_ids() const;

    // Distance from p to the outer boundary polyline of the meshed region.
    double boundary_distance(const Vec2& p) const;
    // Point-in-region test against the outer boundary polygon (closed region).
    bool region_contains(const Vec2& p) const;
};

struct ValidationIssue {
    std::string rule;    // which invariant failed
    int id = -1;         // offending quad or vertex id (-1 when global)
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string summary() const;
};

// Square-lattice generator: primal vertices on a·Z², dual on a·Z²+(a/2,a/2),
// pitch a = eps/2, so quad sides are eps/(2√2) and every boundary vertex lies
// within eps of the domain boundary. All conductances are exactly 1. A quad is
// kept iff all four corners lie in the (closed) domain.
OrthodiagonalMap generate_square(const DomainDescriptor& domain, double eps);

// Tensor-grid generator: primal vertices at grid line crossings, dual at cell
// centers. Unequal spacings give genuinely unequal diagonal ratios, hence a
// non-isoradial mesh. Quads clipped by the same all-corners rule. When
// eps_declared > 0 it becomes the map's side-length bound (MeshTooCoarse if
// any side exceeds it); otherwise the observed maximum side is declared.
OrthodiagonalMap generate_rect_nonuniform(const DomainDescriptor& domain,
                                          const std::vector<double>& x_lines,
                                          const std::vector<double>& y_lines,
                                          double eps_declared = 0.0);

ValidationReport validate(const OrthodiagonalMap& map);

// Recompute cached diagonal lengths/areas, same-kind adjacency, and the
// outer-face walk from `vertices` and `quads`. Boundary flags are left alone.
void rebuild_topology(OrthodiagonalMap& map);

void save(const OrthodiagonalMap& map, const std::string& path);
OrthodiagonalMap load(const std::string& path);

// Copy of the map with the given vertices re-flagged as boundary/absorbing
// (used to realize slits and other hitting sets).
OrthodiagonalMap with_absorbing_vertices(const OrthodiagonalMap& map,
                                         const std::vector<int>& ids);

// Nearest primal vertex to a point (ties broken by lower id).
int nearest_primal_vertex(const OrthodiagonalMap& map, const Vec2& p);

}  // namespace ortholap
