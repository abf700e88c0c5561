#include "ortholap/map.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "ortholap/errors.hpp"
#include "ortholap/format.hpp"

namespace ortholap {

namespace {

constexpr double kContainTol = 1e-12;

long lfloor(double v) { return static_cast<long>(std::floor(v)); }
long lceil(double v) { return static_cast<long>(std::ceil(v)); }

}  // namespace

// ---------------------------------------------------------------------------
// DomainDescriptor
// ---------------------------------------------------------------------------

DomainDescriptor DomainDescriptor::disk(Vec2 center, double radius) {
    require(radius > 0.0, "DomainError", "disk radius must be positive");
    DomainDescriptor d;
    d.kind = Kind::Disk;
    d.center = center;
    d.radius = radius;
    return d;
}

DomainDescriptor DomainDescriptor::rect(Vec2 lo, Vec2 hi) {
    require(hi.x > lo.x && hi.y > lo.y, "DomainError",
            "rectangle corners must satisfy lo < hi componentwise");
    DomainDescriptor d;
    d.kind = Kind::Rect;
    d.lo = lo;
    d.hi = hi;
    return d;
}

DomainDescriptor DomainDescriptor::unknown() { return DomainDescriptor{}; }

bool DomainDescriptor::contains(const Vec2& p) const {
    switch (kind) {
        case Kind::Disk:
            return dist(p, center) <= radius * (1.0 + kContainTol);
        case Kind::Rect: {
            const double tol =
                kContainTol * (1.0 + std::max(lo.norm(), hi.norm()));
            return p.x >= lo.x - tol && p.x <= hi.x + tol && p.y >= lo.y - tol &&
                   p.y <= hi.y + tol;
        }
        case Kind::Unknown:
            break;
    }
    fail("DomainError", "containment query on an unknown domain");
}

double DomainDescriptor::boundary_distance(const Vec2& p) const {
    switch (kind) {
        case Kind::Disk:
            return std::abs(radius - dist(p, center));
        case Kind::Rect: {
            const bool inside = p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
            if (inside) {
                return std::min(std::min(p.x - lo.x, hi.x - p.x),
                                std::min(p.y - lo.y, hi.y - p.y));
            }
            const double dx = std::max(std::max(lo.x - p.x, p.x - hi.x), 0.0);
            const double dy = std::max(std::max(lo.y - p.y, p.y - hi.y), 0.0);
            return std::hypot(dx, dy);
        }
        case Kind::Unknown:
            break;
    }
    fail("DomainError", "boundary distance query on an unknown domain");
}

double DomainDescriptor::diameter() const {
    switch (kind) {
        case Kind::Disk:
            return 2.0 * radius;
        case Kind::Rect:
            return (hi - lo).norm();
        case Kind::Unknown:
            break;
    }
    fail("DomainError", "diameter query on an unknown domain");
}

std::string DomainDescriptor::describe() const {
    switch (kind) {
        case Kind::Disk:
            return "disk r=" + fmt_g12(radius) + " center=(" + fmt_g12(center.x) +
                   "," + fmt_g12(center.y) + ")";
        case Kind::Rect:
            return "rect x=[" + fmt_g12(lo.x) + "," + fmt_g12(hi.x) + "] y=[" +
                   fmt_g12(lo.y) + "," + fmt_g12(hi.y) + "]";
        case Kind::Unknown:
            break;
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// OrthodiagonalMap accessors
// ---------------------------------------------------------------------------

std::vector<int> OrthodiagonalMap::interior_primal_ids() const {
    std::vector<int> out;
    for (const Vertex& v : vertices)
        if (v.kind == VertexKind::Primal && !v.boundary) out.push_back(v.id);
    return out;
}

std::vector<int> OrthodiagonalMap::boundary_primal_ids() const {
    std::vector<int> out;
    for (const Vertex& v : vertices)
        if (v.kind == VertexKind::Primal && v.boundary) out.push_back(v.id);
    return out;
}

double OrthodiagonalMap::boundary_distance(const Vec2& p) const {
    require(!boundary_cycle.empty(), "InvalidMap",
            "outer boundary walk unavailable on this map");
    double best = std::numeric_limits<double>::infinity();
    const size_t m = boundary_cycle.size();
    for (size_t k = 0; k < m; ++k) {
        const Vec2& a = pos(boundary_cycle[k]);
        const Vec2& b = pos(boundary_cycle[(k + 1) % m]);
        best = std::min(best, dist_point_segment(p, a, b));
    }
    return best;
}

bool OrthodiagonalMap::region_contains(const Vec2& p) const {
    const double tol = 1e-9 * (mesh_eps > 0.0 ? mesh_eps : 1.0);
    if (boundary_distance(p) <= tol) return true;
    // Even-odd crossing test against the outer boundary polygon.
    bool inside = false;
    const size_t m = boundary_cycle.size();
    for (size_t k = 0; k < m; ++k) {
        const Vec2& a = pos(boundary_cycle[k]);
        const Vec2& b = pos(boundary_cycle[(k + 1) % m]);
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

// ---------------------------------------------------------------------------
// Topology construction shared by generators and load()
// ---------------------------------------------------------------------------

namespace {

// Rebuilds cached diagonal lengths, areas, same-kind adjacency, and the
// outer-face walk. Returns outer-face membership flags (callers that generate
// a map from scratch use them to set the boundary flags; load() keeps the
// flags from the file). Throws InvalidMap on structural defects that make the
// mesh unusable (bad corner kinds, degenerate diagonals).
std::vector<char> build_topology_impl(OrthodiagonalMap& m) {
    const int n = m.vertex_count();
    m.primal_adjacency.assign(static_cast<size_t>(n), {});
    m.dual_adjacency.assign(static_cast<size_t>(n), {});
    m.boundary_cycle.clear();

    std::unordered_map<std::uint64_t, int> directed;
    directed.reserve(m.quads.size() * 5);
    auto dkey = [](int a, int b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    };

    for (size_t qi = 0; qi < m.quads.size(); ++qi) {
        Quad& q = m.quads[qi];
        for (int c = 0; c < 4; ++c) {
            require(q.corner[c] >= 0 && q.corner[c] < n, "InvalidMap",
                    "quad " + std::to_string(qi) + " references unknown vertex");
        }
        require(q.corner[0] != q.corner[2] && q.corner[1] != q.corner[3] &&
                    q.corner[0] != q.corner[1] && q.corner[0] != q.corner[3] &&
                    q.corner[2] != q.corner[1] && q.corner[2] != q.corner[3],
                "InvalidMap", "quad " + std::to_string(qi) + " repeats a corner");
        require(m.is_primal(q.u()) && m.is_primal(q.v()) && !m.is_primal(q.r()) &&
                    !m.is_primal(q.s()),
                "InvalidMap",
                "quad " + std::to_string(qi) +
                    " must list primal,dual,primal,dual corners");
        q.primal_diag_len = dist(m.pos(q.u()), m.pos(q.v()));
        q.dual_diag_len = dist(m.pos(q.r()), m.pos(q.s()));
        require(q.primal_diag_len > 0.0 && q.dual_diag_len > 0.0, "InvalidMap",
                "quad " + std::to_string(qi) + " has a degenerate diagonal");
        q.area = 0.5 * q.primal_diag_len * q.dual_diag_len;

        const int qint = static_cast<int>(qi);
        m.primal_adjacency[static_cast<size_t>(q.u())].push_back({q.v(), qint});
        m.primal_adjacency[static_cast<size_t>(q.v())].push_back({q.u(), qint});
        m.dual_adjacency[static_cast<size_t>(q.r())].push_back({q.s(), qint});
        m.dual_adjacency[static_cast<size_t>(q.s())].push_back({q.r(), qint});

        for (int c = 0; c < 4; ++c)
            ++directed[dkey(q.corner[c], q.corner[(c + 1) % 4])];
    }

    // Outer-face sides are those whose reversed twin is absent.
    std::vector<int> next_on_boundary(static_cast<size_t>(n), -1);
    std::vector<char> outer(static_cast<size_t>(n), 0);
    for (const auto& [key, cnt] : directed) {
        const int a = static_cast<int>(key >> 32);
        const int b = static_cast<int>(key & 0xffffffffu);
        if (directed.find(dkey(b, a)) == directed.end()) {
            outer[static_cast<size_t>(a)] = 1;
            outer[static_cast<size_t>(b)] = 1;
            int& nx = next_on_boundary[static_cast<size_t>(a)];
            if (nx == -1 || b < nx) nx = b;  // deterministic pick
        }
    }

    int start = -1;
    for (int i = 0; i < n; ++i)
        if (outer[static_cast<size_t>(i)]) {
            start = i;
            break;
        }
    if (start >= 0) {
        std::vector<char> visited(static_cast<size_t>(n), 0);
        int cur = start;
        while (cur != -1 && !visited[static_cast<size_t>(cur)]) {
            m.boundary_cycle.push_back(cur);
            visited[static_cast<size_t>(cur)] = 1;
            cur = next_on_boundary[static_cast<size_t>(cur)];
        }
        // A walk that does not close up signals a defective boundary; leave
        // the cycle empty and let validate() report the specifics.
        if (cur != start) m.boundary_cycle.clear();
    }
    return outer;
}

}  // namespace

void rebuild_topology(OrthodiagonalMap& map) { build_topology_impl(map); }

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

namespace {

using Key = std::int64_t;

Key make_key(VertexKind kind, long i, long j) {
    const long off = 1L << 27;
    return (static_cast<Key>(kind == VertexKind::Dual) << 56) |
           (static_cast<Key>(i + off) << 28) | static_cast<Key>(j + off);
}

struct RawVertex {
    long i = 0, j = 0;
    Vec2 pos;
    VertexKind kind = VertexKind::Primal;
};

struct RawQuad {
    std::array<Key, 4> k{};  // [u, r, v, s]
};

struct KeyPairHash {
    size_t operator()(const std::pair<Key, Key>& p) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::uint64_t v :
             {static_cast<std::uint64_t>(p.first), static_cast<std::uint64_t>(p.second)}) {
            h ^= v;
            h *= 0x100000001b3ULL;
            h ^= h >> 29;
        }
        return static_cast<size_t>(h);
    }
};

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] =
                parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    // Always attach the larger root below the smaller one, so each component's
    // root is its smallest member index (deterministic tie-breaking).
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
    }
};

OrthodiagonalMap finalize_map(std::vector<RawQuad>& raw,
                              std::unordered_map<Key, RawVertex>& verts,
                              const DomainDescriptor& domain, double eps_value) {
    require(!raw.empty(), "DomainTooSmall",
            "no quad fits inside the domain at this resolution");

    // Keep the largest side-connected family of quads; clipping against a
    // curved boundary can leave stray fragments.
    Dsu dsu(raw.size());
    std::unordered_map<std::pair<Key, Key>, int, KeyPairHash> side_owner;
    side_owner.reserve(raw.size() * 4);
    for (size_t qi = 0; qi < raw.size(); ++qi) {
        for (int c = 0; c < 4; ++c) {
            Key a = raw[qi].k[static_cast<size_t>(c)];
            Key b = raw[qi].k[static_cast<size_t>((c + 1) % 4)];
            if (a > b) std::swap(a, b);
            auto [it, fresh] = side_owner.try_emplace({a, b}, static_cast<int>(qi));
            if (!fresh) dsu.unite(static_cast<int>(qi), it->second);
        }
    }
    std::unordered_map<int, int> comp_size;
    for (size_t qi = 0; qi < raw.size(); ++qi) ++comp_size[dsu.find(static_cast<int>(qi))];
    int best_root = -1, best_size = -1;
    for (const auto& [root, size] : comp_size) {
        if (size > best_size || (size == best_size && root < best_root)) {
            best_root = root;
            best_size = size;
        }
    }

    std::vector<RawQuad> kept;
    kept.reserve(static_cast<size_t>(best_size));
    for (size_t qi = 0; qi < raw.size(); ++qi)
        if (dsu.find(static_cast<int>(qi)) == best_root) kept.push_back(raw[qi]);

    // Dense ids: primal family first, each family ordered by (y, x).
    std::vector<std::pair<std::pair<long, long>, Key>> prim, dual;
    std::unordered_map<Key, int> id_of;
    id_of.reserve(verts.size());
    for (const RawQuad& q : kept) {
        for (Key k : q.k) {
            if (id_of.count(k)) continue;
            id_of.emplace(k, -1);
            const RawVertex& rv = verts.at(k);
            auto entry = std::make_pair(std::make_pair(rv.j, rv.i), k);
            (rv.kind == VertexKind::Primal ? prim : dual).push_back(entry);
        }
    }
    std::sort(prim.begin(), prim.end());
    std::sort(dual.begin(), dual.end());

    OrthodiagonalMap map;
    map.mesh_eps = eps_value;
    map.domain = domain;
    map.vertices.reserve(prim.size() + dual.size());
    int next_id = 0;
    for (const auto& family : {prim, dual}) {
        for (const auto& [key_ji, k] : family) {
            const RawVertex& rv = verts.at(k);
            Vertex v;
            v.id = next_id;
            v.pos = rv.pos;
            v.kind = rv.kind;
            map.vertices.push_back(v);
            id_of[k] = next_id++;
        }
    }
    map.quads.reserve(kept.size());
    for (const RawQuad& rq : kept) {
        Quad q;
        for (int c = 0; c < 4; ++c)
            q.corner[static_cast<size_t>(c)] = id_of.at(rq.k[static_cast<size_t>(c)]);
        map.quads.push_back(q);
    }

    const std::vector<char> outer = build_topology_impl(map);
    for (Vertex& v : map.vertices) v.boundary = outer[static_cast<size_t>(v.id)] != 0;

    require(!map.interior_primal_ids().empty(), "DomainTooSmall",
            "mesh has no interior primal vertex at this resolution");
    return map;
}

void domain_bounds(const DomainDescriptor& domain, Vec2& blo, Vec2& bhi) {
    if (domain.kind == DomainDescriptor::Kind::Disk) {
        blo = domain.center - Vec2{domain.radius, domain.radius};
        bhi = domain.center + Vec2{domain.radius, domain.radius};
    } else {
        blo = domain.lo;
        bhi = domain.hi;
    }
}

}  // namespace

OrthodiagonalMap generate_square(const DomainDescriptor& domain, double eps) {
    require(domain.known(), "DomainError", "generator needs a concrete domain");
    require(eps > 0.0, "DomainError", "eps must be positive");
    const double a = 0.5 * eps;

    Vec2 blo, bhi;
    domain_bounds(domain, blo, bhi);
    const long i0 = lfloor(blo.x / a) - 2, i1 = lceil(bhi.x / a) + 2;
    const long j0 = lfloor(blo.y / a) - 2, j1 = lceil(bhi.y / a) + 2;
    require(i1 - i0 < (1L << 24) && j1 - j0 < (1L << 24), "DomainError",
            "requested resolution is out of the supported range");

    auto ppos = [a](long i, long j) {
        return Vec2{a * static_cast<double>(i), a * static_cast<double>(j)};
    };
    auto dpos = [a](long i, long j) {
        return Vec2{a * (static_cast<double>(i) + 0.5), a * (static_cast<double>(j) + 0.5)};
    };

    std::unordered_map<Key, RawVertex> verts;
    std::vector<RawQuad> raw;
    auto consider = [&](std::array<std::pair<VertexKind, std::pair<long, long>>, 4> corners) {
        std::array<Vec2, 4> pos;
        for (int c = 0; c < 4; ++c) {
            const auto& [kind, ij] = corners[static_cast<size_t>(c)];
            pos[static_cast<size_t>(c)] = kind == VertexKind::Primal
                                              ? ppos(ij.first, ij.second)
                                              : dpos(ij.first, ij.second);
            if (!domain.contains(pos[static_cast<size_t>(c)])) return;
        }
        RawQuad rq;
        for (int c = 0; c < 4; ++c) {
            const auto& [kind, ij] = corners[static_cast<size_t>(c)];
            const Key k = make_key(kind, ij.first, ij.second);
            rq.k[static_cast<size_t>(c)] = k;
            verts.try_emplace(k, RawVertex{ij.first, ij.second,
                                           pos[static_cast<size_t>(c)], kind});
        }
        raw.push_back(rq);
    };

    constexpr auto P = VertexKind::Primal;
    constexpr auto D = VertexKind::Dual;
    // One quad per lattice edge: the edge is the primal diagonal and the two
    // flanking cell centers form the dual diagonal, listed counterclockwise.
    for (long j = j0; j <= j1; ++j)
        for (long i = i0; i < i1; ++i)
            consider({{{P, {i, j}}, {D, {i, j - 1}}, {P, {i + 1, j}}, {D, {i, j}}}});
    for (long j = j0; j < j1; ++j)
        for (long i = i0; i <= i1; ++i)
            consider({{{P, {i, j}}, {D, {i, j}}, {P, {i, j + 1}}, {D, {i - 1, j}}}});

    return finalize_map(raw, verts, domain, eps);
}

OrthodiagonalMap generate_rect_nonuniform(const DomainDescriptor& domain,
                                          const std::vector<double>& x_lines,
                                          const std::vector<double>& y_lines,
                                          double eps_declared) {
    require(domain.known(), "DomainError", "generator needs a concrete domain");
    require(eps_declared >= 0.0, "DomainError", "declared side bound must be nonnegative");
    require(x_lines.size() >= 2 && y_lines.size() >= 2, "DomainTooSmall",
            "need at least two grid lines per axis");
    for (size_t k = 1; k < x_lines.size(); ++k)
        require(x_lines[k] > x_lines[k - 1], "SpacingNonMonotone",
                "x grid lines must be strictly increasing (index " + std::to_string(k) + ")");
    for (size_t k = 1; k < y_lines.size(); ++k)
        require(y_lines[k] > y_lines[k - 1], "SpacingNonMonotone",
                "y grid lines must be strictly increasing (index " + std::to_string(k) + ")");

    const long nx = static_cast<long>(x_lines.size());
    const long ny = static_cast<long>(y_lines.size());
    auto ppos = [&](long i, long j) {
        return Vec2{x_lines[static_cast<size_t>(i)], y_lines[static_cast<size_t>(j)]};
    };
    auto cpos = [&](long i, long j) {
        return Vec2{0.5 * (x_lines[static_cast<size_t>(i)] + x_lines[static_cast<size_t>(i + 1)]),
                    0.5 * (y_lines[static_cast<size_t>(j)] + y_lines[static_cast<size_t>(j + 1)])};
    };

    std::unordered_map<Key, RawVertex> verts;
    std::vector<RawQuad> raw;
    double max_side = 0.0;
    auto consider = [&](std::array<std::pair<VertexKind, std::pair<long, long>>, 4> corners) {
        std::array<Vec2, 4> pos;
        for (int c = 0; c < 4; ++c) {
            const auto& [kind, ij] = corners[static_cast<size_t>(c)];
            pos[static_cast<size_t>(c)] = kind == VertexKind::Primal
                                              ? ppos(ij.first, ij.second)
                                              : cpos(ij.first, ij.second);
            if (!domain.contains(pos[static_cast<size_t>(c)])) return;
        }
        RawQuad rq;
        for (int c = 0; c < 4; ++c) {
            const auto& [kind, ij] = corners[static_cast<size_t>(c)];
            const Key k = make_key(kind, ij.first, ij.second);
            rq.k[static_cast<size_t>(c)] = k;
            verts.try_emplace(k, RawVertex{ij.first, ij.second,
                                           pos[static_cast<size_t>(c)], kind});
            max_side = std::max(max_side, dist(pos[static_cast<size_t>(c)],
                                               pos[static_cast<size_t>((c + 3) % 4)]));
        }
        raw.push_back(rq);
    };

    constexpr auto P = VertexKind::Primal;
    constexpr auto D = VertexKind::Dual;
    // Horizontal grid edges (both flanking cells must exist: 1 <= j <= ny-2).
    for (long j = 1; j + 1 < ny; ++j)
        for (long i = 0; i + 1 < nx; ++i)
            consider({{{P, {i, j}}, {D, {i, j - 1}}, {P, {i + 1, j}}, {D, {i, j}}}});
    // Vertical grid edges (1 <= i <= nx-2).
    for (long i = 1; i + 1 < nx; ++i)
        for (long j = 0; j + 1 < ny; ++j)
            consider({{{P, {i, j}}, {D, {i, j}}, {P, {i, j + 1}}, {D, {i - 1, j}}}});

    double eps_value = max_side;
    if (eps_declared > 0.0) {
        require(max_side <= eps_declared * (1.0 + 1e-12), "MeshTooCoarse",
                "observed quad side " + fmt_g12(max_side) +
                    " exceeds the declared bound " + fmt_g12(eps_declared));
        eps_value = eps_declared;
    }
    return finalize_map(raw, verts, domain, eps_value);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

ValidationReport validate(const OrthodiagonalMap& map) {
    ValidationReport rep;
    auto add = [&rep](const char* rule, int id, std::string detail) {
        rep.issues.push_back({rule, id, std::move(detail)});
    };

    const int n = map.vertex_count();
    for (int i = 0; i < n; ++i)
        if (map.vertices[static_cast<size_t>(i)].id != i) {
            add("vertex_ids", i, "vertex ids must be dense and stored in order");
            return rep;
        }
    if (map.mesh_eps <= 0.0) add("eps_positive", -1, "declared side bound must be positive");
    if (map.quads.empty()) {
        add("empty", -1, "map has no quads");
        return rep;
    }

    std::vector<int> quad_count(static_cast<size_t>(n), 0);
    std::unordered_map<std::uint64_t, int> directed;
    directed.reserve(map.quads.size() * 5);
    auto dkey = [](int a, int b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    };

    for (size_t qi = 0; qi < map.quads.size(); ++qi) {
        const Quad& q = map.quads[qi];
        const int qid = static_cast<int>(qi);
        bool corners_ok = true;
        for (int c = 0; c < 4; ++c) {
            const int id = q.corner[static_cast<size_t>(c)];
            if (id < 0 || id >= n) corners_ok = false;
        }
        if (corners_ok) {
            for (int c = 0; c < 4 && corners_ok; ++c)
                for (int d = c + 1; d < 4; ++d)
                    if (q.corner[static_cast<size_t>(c)] == q.corner[static_cast<size_t>(d)])
                        corners_ok = false;
        }
        if (!corners_ok) {
            add("corner_ids", qid, "corners must be four distinct valid vertex ids");
            continue;
        }
        for (int c = 0; c < 4; ++c) ++quad_count[static_cast<size_t>(q.corner[static_cast<size_t>(c)])];

        if (!(map.is_primal(q.u()) && map.is_primal(q.v()) && !map.is_primal(q.r()) &&
              !map.is_primal(q.s())))
            add("bipartite_corners", qid, "corner kinds must alternate primal,dual,primal,dual");

        const std::array<Vec2, 4> p = {map.pos(q.u()), map.pos(q.r()), map.pos(q.v()),
                                       map.pos(q.s())};
        const double plen = dist(p[0], p[2]);
        const double dlen = dist(p[1], p[3]);
        if (!(plen > 0.0) || !(dlen > 0.0)) {
            add("positive_area", qid, "degenerate diagonal");
        } else {
            const double dp = std::abs(dot(p[2] - p[0], p[3] - p[1]));
            if (dp > 1e-9 * plen * dlen)
                add("orthogonality", qid,
                    "diagonal dot product " + fmt_g12(dp / (plen * dlen)) +
                        " relative to diagonal lengths");
            if (std::abs(q.primal_diag_len - plen) > 1e-12 * std::max(1.0, plen) ||
                std::abs(q.dual_diag_len - dlen) > 1e-12 * std::max(1.0, dlen) ||
                std::abs(q.area - 0.5 * plen * dlen) > 1e-12 * std::max(1.0, 0.5 * plen * dlen))
                add("cached_lengths", qid, "stored lengths disagree with positions");
            const double rec = q.primal_conductance() * q.dual_conductance();
            if (std::abs(rec - 1.0) > 1e-12)
                add("reciprocity", qid, "conductance product " + fmt_g17(rec));
        }
        for (int c = 0; c < 4; ++c) {
            const Vec2 e1 = p[static_cast<size_t>((c + 1) % 4)] - p[static_cast<size_t>(c)];
            const Vec2 e2 = p[static_cast<size_t>((c + 2) % 4)] - p[static_cast<size_t>((c + 1) % 4)];
            if (!(cross(e1, e2) > 0.0)) {
                add("ccw_order", qid, "corners are not in strictly convex ccw position");
                break;
            }
        }
        if (map.mesh_eps > 0.0) {
            for (int c = 0; c < 4; ++c) {
                const double side =
                    dist(p[static_cast<size_t>(c)], p[static_cast<size_t>((c + 1) % 4)]);
                if (side > map.mesh_eps * (1.0 + 1e-12)) {
                    add("side_length", qid,
                        "side " + fmt_g12(side) + " exceeds bound " + fmt_g12(map.mesh_eps));
                    break;
                }
            }
        }
        for (int c = 0; c < 4; ++c)
            ++directed[dkey(q.corner[static_cast<size_t>(c)],
                            q.corner[static_cast<size_t>((c + 1) % 4)])];
    }

    for (int i = 0; i < n; ++i)
        if (quad_count[static_cast<size_t>(i)] == 0)
            add("isolated_vertex", i, "vertex belongs to no quad");

    // Planarity / orientation via side multiplicities.
    std::vector<int> outdeg(static_cast<size_t>(n), 0), indeg(static_cast<size_t>(n), 0);
    std::vector<int> next_on_boundary(static_cast<size_t>(n), -1);
    long boundary_sides = 0;
    for (const auto& [key, cnt] : directed) {
        const int a = static_cast<int>(key >> 32);
        const int b = static_cast<int>(key & 0xffffffffu);
        if (cnt > 1) add("orientation", a, "side traversed twice in the same direction");
        const auto rev = directed.find(dkey(b, a));
        if (rev == directed.end()) {
            boundary_sides += cnt;
            ++outdeg[static_cast<size_t>(a)];
            ++indeg[static_cast<size_t>(b)];
            int& nx = next_on_boundary[static_cast<size_t>(a)];
            if (nx == -1 || b < nx) nx = b;
        } else if (a < b && cnt + rev->second > 2) {
            add("planarity", a, "side shared by more than two quads");
        }
    }
    int bstart = -1;
    for (int i = 0; i < n; ++i) {
        const bool touches = outdeg[static_cast<size_t>(i)] > 0 || indeg[static_cast<size_t>(i)] > 0;
        if (!touches) continue;
        if (bstart == -1) bstart = i;
        if (outdeg[static_cast<size_t>(i)] != 1 || indeg[static_cast<size_t>(i)] != 1)
            add("boundary_simplicity", i, "boundary vertex without exactly one in/out side");
        if (!map.vertices[static_cast<size_t>(i)].boundary)
            add("boundary_flags", i, "outer-face vertex not flagged as boundary");
    }
    if (bstart == -1) {
        add("boundary_simplicity", -1, "map has no outer boundary side");
    } else {
        std::vector<char> visited(static_cast<size_t>(n), 0);
        long covered = 0;
        int cur = bstart;
        while (cur != -1 && !visited[static_cast<size_t>(cur)]) {
            visited[static_cast<size_t>(cur)] = 1;
            cur = next_on_boundary[static_cast<size_t>(cur)];
            ++covered;
        }
        if (cur != bstart || covered != boundary_sides)
            add("boundary_simplicity", -1, "outer boundary is not a single closed walk");
    }

    // Connectivity of each family through quads.
    auto family_connected = [&](VertexKind kind) {
        std::vector<std::vector<int>> adj(static_cast<size_t>(n));
        for (const Quad& q : map.quads) {
            const int a = kind == VertexKind::Primal ? q.u() : q.r();
            const int b = kind == VertexKind::Primal ? q.v() : q.s();
            if (a < 0 || b < 0 || a >= n || b >= n) continue;
            adj[static_cast<size_t>(a)].push_back(b);
            adj[static_cast<size_t>(b)].push_back(a);
        }
        int first = -1;
        long total = 0;
        for (int i = 0; i < n; ++i)
            if (map.vertices[static_cast<size_t>(i)].kind == kind) {
                ++total;
                if (first == -1) first = i;
            }
        if (first == -1) return total == 0;
        std::vector<char> seen(static_cast<size_t>(n), 0);
        std::vector<int> stack{first};
        seen[static_cast<size_t>(first)] = 1;
        long reached = 0;
        while (!stack.empty()) {
            const int x = stack.back();
            stack.pop_back();
            ++reached;
            for (int y : adj[static_cast<size_t>(x)])
                if (!seen[static_cast<size_t>(y)]) {
                    seen[static_cast<size_t>(y)] = 1;
                    stack.push_back(y);
                }
        }
        return reached == total;
    };
    if (!family_connected(VertexKind::Primal))
        add("connectivity", -1, "primal graph is disconnected");
    if (!family_connected(VertexKind::Dual))
        add("connectivity", -1, "dual graph is disconnected");

    return rep;
}

std::string ValidationReport::summary() const {
    if (issues.empty()) return "valid";
    std::string out = std::to_string(issues.size()) + " issue(s): ";
    const size_t show = std::min<size_t>(issues.size(), 5);
    for (size_t k = 0; k < show; ++k) {
        if (k) out += "; ";
        out += issues[k].rule + "(" + std::to_string(issues[k].id) + "): " + issues[k].detail;
    }
    if (issues.size() > show) out += "; ...";
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void save(const OrthodiagonalMap& map, const std::string& path) {
    std::string out;
    out.reserve(map.vertices.size() * 64 + map.quads.size() * 24 + 64);
    out += "odmap v1 eps=" + fmt_g17(map.mesh_eps) + "\n";
    for (const Vertex& v : map.vertices) {
        out += "v " + std::to_string(v.id) + " " + fmt_g17(v.pos.x) + " " +
               fmt_g17(v.pos.y) + " " + (v.kind == VertexKind::Primal ? "p" : "d") +
               " " + (v.boundary ? "b" : "i") + "\n";
    }
    for (const Quad& q : map.quads) {
        out += "q " + std::to_string(q.u()) + " " + std::to_string(q.r()) + " " +
               std::to_string(q.v()) + " " + std::to_string(q.s()) + "\n";
    }
    write_text_file(path, out);
}

namespace {

double parse_number(const std::string& tok, int lineno) {
    if (tok.empty()) fail("FormatError", "line " + std::to_string(lineno) + ": missing number");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || errno == ERANGE || !std::isfinite(v))
        fail("FormatError", "line " + std::to_string(lineno) + ": bad number '" + tok + "'");
    return v;
}

long parse_integer(const std::string& tok, int lineno) {
    if (tok.empty()) fail("FormatError", "line " + std::to_string(lineno) + ": missing integer");
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (end != tok.c_str() + tok.size() || errno == ERANGE)
        fail("FormatError", "line " + std::to_string(lineno) + ": bad integer '" + tok + "'");
    return v;
}

}  // namespace

OrthodiagonalMap load(const std::string& path) {
    const std::string text = read_text_file(path);
    std::istringstream iss(text);
    std::string line;
    int lineno = 0;

    double eps = 0.0;
    bool saw_header = false;
    std::vector<Vertex> file_vertices;
    std::vector<Quad> file_quads;
    std::vector<int> quad_lines;

    while (std::getline(iss, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream h(line);
        std::string tag;
        if (!(h >> tag)) continue;  // blank line

        if (!saw_header) {
            std::string ver, epstok, extra;
            if (tag != "odmap" || !(h >> ver >> epstok) || ver != "v1" ||
                epstok.rfind("eps=", 0) != 0 || (h >> extra))
                fail("FormatError",
                     "line " + std::to_string(lineno) + ": expected 'odmap v1 eps=<value>'");
            eps = parse_number(epstok.substr(4), lineno);
            saw_header = true;
            continue;
        }

        if (tag == "v") {
            std::string id_tok, x_tok, y_tok, kind_tok, flag_tok, extra;
            if (!(h >> id_tok >> x_tok >> y_tok >> kind_tok >> flag_tok) || (h >> extra))
                fail("FormatError", "line " + std::to_string(lineno) +
                                        ": expected 'v <id> <x> <y> <p|d> <i|b>'");
            Vertex v;
            const long id = parse_integer(id_tok, lineno);
            if (id < 0 || id > (1L << 30))
                fail("FormatError", "line " + std::to_string(lineno) + ": vertex id out of range");
            v.id = static_cast<int>(id);
            v.pos = {parse_number(x_tok, lineno), parse_number(y_tok, lineno)};
            if (kind_tok == "p")
                v.kind = VertexKind::Primal;
            else if (kind_tok == "d")
                v.kind = VertexKind::Dual;
            else
                fail("FormatError",
                     "line " + std::to_string(lineno) + ": vertex kind must be 'p' or 'd'");
            if (flag_tok == "b")
                v.boundary = true;
            else if (flag_tok == "i")
                v.boundary = false;
            else
                fail("FormatError",
                     "line " + std::to_string(lineno) + ": vertex flag must be 'i' or 'b'");
            file_vertices.push_back(v);
        } else if (tag == "q") {
            std::string c_tok[4], extra;
            if (!(h >> c_tok[0] >> c_tok[1] >> c_tok[2] >> c_tok[3]) || (h >> extra))
                fail("FormatError",
                     "line " + std::to_string(lineno) + ": expected 'q <u> <r> <v> <s>'");
            Quad q;
            for (int c = 0; c < 4; ++c)
                q.corner[static_cast<size_t>(c)] =
                    static_cast<int>(parse_integer(c_tok[c], lineno));
            file_quads.push_back(q);
            quad_lines.push_back(lineno);
        } else {
            fail("FormatError",
                 "line " + std::to_string(lineno) + ": unknown record '" + tag + "'");
        }
    }
    if (!saw_header) fail("FormatError", "missing 'odmap v1' header");

    const size_t nv = file_vertices.size();
    OrthodiagonalMap map;
    map.mesh_eps = eps;
    map.domain = DomainDescriptor::unknown();
    map.vertices.resize(nv);
    std::vector<char> seen(nv, 0);
    for (const Vertex& v : file_vertices) {
        if (v.id < 0 || static_cast<size_t>(v.id) >= nv || seen[static_cast<size_t>(v.id)])
            fail("FormatError", "vertex ids must be exactly 0.." + std::to_string(nv ? nv - 1 : 0) +
                                    " with no repeats (got " + std::to_string(v.id) + ")");
        seen[static_cast<size_t>(v.id)] = 1;
        map.vertices[static_cast<size_t>(v.id)] = v;
    }
    for (size_t k = 0; k < file_quads.size(); ++k) {
        for (int c = 0; c < 4; ++c) {
            const int id = file_quads[k].corner[static_cast<size_t>(c)];
            if (id < 0 || static_cast<size_t>(id) >= nv)
                fail("FormatError", "line " + std::to_string(quad_lines[k]) +
                                        ": quad references unknown vertex " + std::to_string(id));
        }
    }
    map.quads = std::move(file_quads);

    build_topology_impl(map);
    const ValidationReport rep = validate(map);
    require(rep.ok(), "InvalidMap", rep.summary());
    return map;
}

// ---------------------------------------------------------------------------
// Derived maps and queries
// ---------------------------------------------------------------------------

OrthodiagonalMap with_absorbing_vertices(const OrthodiagonalMap& map,
                                         const std::vector<int>& ids) {
    OrthodiagonalMap out = map;
    for (int id : ids) {
        require(id >= 0 && id < out.vertex_count(), "InvalidMap",
                "absorbing vertex id " + std::to_string(id) + " out of range");
        out.vertices[static_cast<size_t>(id)].boundary = true;
    }
    return out;
}

int nearest_primal_vertex(const OrthodiagonalMap& map, const Vec2& p) {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const Vertex& v : map.vertices) {
        if (v.kind != VertexKind::Primal) continue;
        const double d2 = (v.pos - p).norm2();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = v.id;
        }
    }
    require(best >= 0, "InvalidMap", "map has no primal vertex");
    return best;
}

}  // namespace ortholap
