#include "ortholap/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ortholap/errors.hpp"
#include "ortholap/format.hpp"

namespace ortholap {

namespace {

std::string point_str(Vec2 p) {
    return "(" + fmt_g12(p.x) + ", " + fmt_g12(p.y) + ")";
}

struct Barycentric {
    double wa, wb, wc;
    double lowest() const { return std::min(wa, std::min(wb, wc)); }
};

Barycentric barycentric(Vec2 a, Vec2 b, Vec2 c, Vec2 z) {
    const double area2 = cross(b - a, c - a);
    return Barycentric{cross(b - z, c - z) / area2, cross(c - z, a - z) / area2,
                       cross(a - z, b - z) / area2};
}

}  // namespace

ExtendedField::ExtendedField(const OrthodiagonalMap& map, DiscreteField field)
    : map_(&map), field_(std::move(field)) {
    require(field_.side == Side::Primal, "SideMismatch",
            "the extension takes a primal field");
    int primal_count = 0;
    for (const Vertex& v : map.vertices)
        if (v.kind == VertexKind::Primal) ++primal_count;
    const bool full = static_cast<int>(field_.ids.size()) == primal_count &&
                      (primal_count == 0 || (field_.ids.front() == 0 &&
                                             field_.ids.back() == primal_count - 1));
    require(full, "SideMismatch", "the field must cover every primal vertex of the map");

    // Corner values: primal vertices carry the field; each dual vertex gets
    // the average of the field over the distinct primal endpoints of its
    // incident quads.
    corner_values_.assign(map.vertices.size(), 0.0);
    std::vector<std::vector<int>> dual_primal_ends(map.vertices.size());
    for (const Quad& q : map.quads) {
        for (int dual : {q.r(), q.s()}) {
            dual_primal_ends[dual].push_back(q.u());
            dual_primal_ends[dual].push_back(q.v());
        }
    }
    for (const Vertex& v : map.vertices) {
        if (v.kind == VertexKind::Primal) {
            corner_values_[v.id] = field_.values[field_.slot_of(v.id)];
        } else {
            std::vector<int>& ends = dual_primal_ends[v.id];
            std::sort(ends.begin(), ends.end());
            ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
            require(!ends.empty(), "InvalidMap",
                    "dual vertex " + std::to_string(v.id) + " touches no quad");
            double sum = 0.0;
            for (int p : ends) sum += corner_values_[p];
            corner_values_[v.id] = sum / static_cast<double>(ends.size());
        }
    }

    // Bucket grid over the quad bounding boxes.  Cells are two mesh pitches
    // wide; a quad's diameter is at most two quad sides, so any quad that
    // contains a point also overlaps that point's cell.
    Vec2 lo = map.vertices.front().pos;
    Vec2 hi = lo;
    for (const Vertex& v : map.vertices) {
        lo.x = std::min(lo.x, v.pos.x);
        lo.y = std::min(lo.y, v.pos.y);
        hi.x = std::max(hi.x, v.pos.x);
        hi.y = std::max(hi.y, v.pos.y);
    }
    grid_lo_ = lo;
    grid_hi_ = hi;
    cell_ = 2.0 * map.mesh_eps;
    grid_nx_ = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / cell_)));
    grid_ny_ = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / cell_)));
    buckets_.assign(static_cast<std::size_t>(grid_nx_) * grid_ny_, {});
    auto cell_of = [&](double coord, double origin, int n) {
        int c = static_cast<int>(std::floor((coord - origin) / cell_));
        return std::clamp(c, 0, n - 1);
    };
    for (std::size_t qi = 0; qi < map.quads.size(); ++qi) {
        const Quad& q = map.quads[qi];
        Vec2 qlo = map.pos(q.u());
        Vec2 qhi = qlo;
        for (int corner : q.corner) {
            const Vec2 p = map.pos(corner);
            qlo.x = std::min(qlo.x, p.x);
            qlo.y = std::min(qlo.y, p.y);
            qhi.x = std::max(qhi.x, p.x);
            qhi.y = std::max(qhi.y, p.y);
        }
        const int x0 = cell_of(qlo.x, lo.x, grid_nx_);
        const int x1 = cell_of(qhi.x, lo.x, grid_nx_);
        const int y0 = cell_of(qlo.y, lo.y, grid_ny_);
        const int y1 = cell_of(qhi.y, lo.y, grid_ny_);
        for (int ix = x0; ix <= x1; ++ix)
            for (int iy = y0; iy <= y1; ++iy)
                buckets_[static_cast<std::size_t>(iy) * grid_nx_ + ix].push_back(
                    static_cast<int>(qi));
    }
}

int ExtendedField::locate(Vec2 z) const {
    const double slack = 1e-9 * map_->mesh_eps;
    if (z.x < grid_lo_.x - slack || z.y < grid_lo_.y - slack ||
        z.x > grid_hi_.x + slack || z.y > grid_hi_.y + slack)
        return -1;
    // Clamp so points on the box edge land in the outermost cell; the exact
    // per-quad test below rules out false positives.
    const int ix = std::clamp(
        static_cast<int>(std::floor((z.x - grid_lo_.x) / cell_)), 0, grid_nx_ - 1);
    const int iy = std::clamp(
        static_cast<int>(std::floor((z.y - grid_lo_.y) / cell_)), 0, grid_ny_ - 1);
    const double tol = 1e-9 * map_->mesh_eps * map_->mesh_eps;
    for (int qi : buckets_[static_cast<std::size_t>(iy) * grid_nx_ + ix]) {
        const Quad& q = map_->quads[qi];
        bool inside = true;
        for (int k = 0; k < 4 && inside; ++k) {
            const Vec2 a = map_->pos(q.corner[k]);
            const Vec2 b = map_->pos(q.corner[(k + 1) % 4]);
            if (cross(b - a, z - a) < -tol) inside = false;
        }
        if (inside) return qi;
    }
    return -1;
}

double ExtendedField::value_in_quad(const Quad& q, Vec2 z) const {
    const Vec2 pu = map_->pos(q.u());
    const Vec2 pr = map_->pos(q.r());
    const Vec2 pv = map_->pos(q.v());
    const Vec2 ps = map_->pos(q.s());
    // Two triangles cut by the primal diagonal; take the one that holds z
    // most comfortably (on the diagonal both give the same value).
    const Barycentric t1 = barycentric(pu, pr, pv, z);
    const Barycentric t2 = barycentric(pv, ps, pu, z);
    if (t1.lowest() >= t2.lowest()) {
        return t1.wa * corner_values_[q.u()] + t1.wb * corner_values_[q.r()] +
               t1.wc * corner_values_[q.v()];
    }
    return t2.wa * corner_values_[q.v()] + t2.wb * corner_values_[q.s()] +
           t2.wc * corner_values_[q.u()];
}

double ExtendedField::value(Vec2 z) const {
    const int qi = locate(z);
    require(qi >= 0, "OutOfSampledRegion",
            "point " + point_str(z) + " lies outside the meshed region");
    return value_in_quad(map_->quads[qi], z);
}

bool ExtendedField::covers(Vec2 z) const { return locate(z) >= 0; }

double ExtendedField::boundary_distance(Vec2 z) const {
    return map_->boundary_distance(z);
}

double ExtendedField::sup_norm() const { return field_.sup_norm(); }

double ExtendedField::corner_value(int vertex_id) const {
    require(vertex_id >= 0 && vertex_id < static_cast<int>(corner_values_.size()),
            "InvalidMap", "vertex id " + std::to_string(vertex_id) + " out of range");
    return corner_values_[vertex_id];
}

double Mollifier::value(Vec2 z) const {
    const double r2 = z.norm2() / (delta * delta);
    if (r2 >= 1.0) return 0.0;
    const double s = 1.0 - r2;
    return kBumpNormalizer / (delta * delta) * std::exp(-1.0 / s);
}

Vec2 Mollifier::gradient(Vec2 z) const {
    const double r2 = z.norm2() / (delta * delta);
    if (r2 >= 1.0) return Vec2{0.0, 0.0};
    const double s = 1.0 - r2;
    if (s < 1e-3) return Vec2{0.0, 0.0};
    const double d2 = delta * delta;
    const double scale = -2.0 * kBumpNormalizer / (d2 * d2 * s * s) * std::exp(-1.0 / s);
    return Vec2{scale * z.x, scale * z.y};
}

double Mollifier::laplacian(Vec2 z) const {
    const double r2 = z.norm2() / (delta * delta);
    if (r2 >= 1.0) return 0.0;
    const double s = 1.0 - r2;
    // The closed form carries s^-4; past s < 1e-3 the exp factor is below
    // 1e-400, so the product is an exact zero in double precision.  Returning
    // early avoids overflowing the polynomial part.
    if (s < 1e-3) return 0.0;
    const double shape = 4.0 * r2 / (s * s * s * s) - 8.0 * r2 / (s * s * s) -
                         4.0 / (s * s);
    const double d2 = delta * delta;
    return kBumpNormalizer / (d2 * d2) * std::exp(-1.0 / s) * shape;
}

Mollifier make_mollifier(double delta) {
    require(std::isfinite(delta) && delta > 0.0, "DomainError",
            "bump radius must be positive, got " + fmt_g12(delta));
    return Mollifier{delta};
}

namespace {

// Resolves the pitch (0 selects delta/16), validates it, and checks that the
// support disk plus one pitch of clearance stays inside the meshed region.
double check_convolution_site(const ExtendedField& field, const Mollifier& bump, Vec2 z,
                              double quad_step) {
    require(bump.delta > 0.0, "DomainError", "bump radius must be positive");
    const double step = (quad_step == 0.0) ? bump.delta / 16.0 : quad_step;
    require(std::isfinite(step) && step > 0.0, "DomainError",
            "quadrature pitch must be positive, got " + fmt_g12(step));
    require(step <= bump.delta / 8.0 + 1e-12 * bump.delta, "DomainError",
            "quadrature pitch " + fmt_g12(step) + " exceeds an eighth of the bump radius " +
                fmt_g12(bump.delta));
    require(field.covers(z), "OutOfSampledRegion",
            "convolution center " + point_str(z) + " lies outside the meshed region");
    const double bd = field.boundary_distance(z);
    require(bd >= bump.delta + step, "TooCloseToBoundary",
            "support radius " + fmt_g12(bump.delta) + " plus pitch " + fmt_g12(step) +
                " exceeds the boundary distance " + fmt_g12(bd) + " at " + point_str(z));
    return step;
}

}  // namespace

double convolve_value(const ExtendedField& field, const Mollifier& bump, Vec2 z,
                      double quad_step) {
    const double step = check_convolution_site(field, bump, z, quad_step);
    const int n = std::max(1, static_cast<int>(std::lround(2.0 * bump.delta / step)));
    const double q = 2.0 * bump.delta / n;
    const double d2 = bump.delta * bump.delta;
    double mass = 0.0;
    double weighted = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Vec2 offset{-bump.delta + (i + 0.5) * q, -bump.delta + (j + 0.5) * q};
            if (offset.norm2() >= d2) continue;
            const double phi = bump.value(offset);
            mass += phi;
            weighted += phi * field.value(z + offset);
        }
    }
    require(mass > 0.0, "QuadratureFailure",
            "the bump mass vanished on the convolution grid");
    return weighted / mass;
}

double convolved_laplacian(const ExtendedField& field, const Mollifier& bump, Vec2 z,
                           double quad_step) {
    const double step = check_convolution_site(field, bump, z, quad_step);
    const int n = std::max(1, static_cast<int>(std::lround(2.0 * bump.delta / step)));
    const double q = 2.0 * bump.delta / n;
    const double d2 = bump.delta * bump.delta;
    const double center = field.value(z);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Vec2 offset{-bump.delta + (i + 0.5) * q, -bump.delta + (j + 0.5) * q};
            if (offset.norm2() >= d2) continue;
            acc += bump.laplacian(offset) * (field.value(z + offset) - center);
        }
    }
    return acc * q * q;
}

double quadrature_error_bound(const Mollifier& bump, double quad_step, double field_sup) {
    require(bump.delta > 0.0 && quad_step > 0.0 && field_sup >= 0.0, "DomainError",
            "error bound needs positive radius and pitch and a nonnegative sup");
    const double d2 = bump.delta * bump.delta;
    return quad_step * quad_step / (d2 * d2) * field_sup;
}

LaplacianResidual averaged_laplacian_residual(const OrthodiagonalMap& map,
                                              const SmoothFunction& f, Vec2 center,
                                              double side) {
    require(static_cast<bool>(f.value) && static_cast<bool>(f.laplacian), "DomainError",
            "the test function needs value and Laplacian callbacks");
    require(std::isfinite(side) && side > 0.0, "DomainError",
            "square side must be positive, got " + fmt_g12(side));
    const double circumradius = side * std::numbers::sqrt2 / 2.0;
    const bool inside = map.region_contains(center) &&
                        map.boundary_distance(center) > circumradius;
    require(inside, "SquareNotContained",
            "square of side " + fmt_g12(side) + " centered at " + point_str(center) +
                " does not fit inside the meshed region");

    const DiscreteField sampled = sample_scalar(map, Side::Primal, f.value);
    const WeightedNetwork net = build_network(map, Side::Primal);
    const std::vector<double> lap = laplacian_apply(net, sampled);
    const double half = side / 2.0;
    LaplacianResidual out;
    double sum = 0.0;
    for (int k = 0; k < net.size(); ++k) {
        const Vec2 p = net.positions[k];
        if (std::abs(p.x - center.x) <= half && std::abs(p.y - center.y) <= half) {
            sum += lap[k];
            ++out.vertex_count;
        }
    }
    require(out.vertex_count > 0, "MeshTooCoarse",
            "no primal vertex falls inside the square; side " + fmt_g12(side) +
                " is below the mesh resolution " + fmt_g12(map.mesh_eps));
    out.discrete_sum = sum;
    out.integral = square_average(f.laplacian, center, side) * side * side;
    out.residual = std::abs(out.discrete_sum - out.integral);
    return out;
}

double square_average(const std::function<double(Vec2)>& f, Vec2 center, double side) {
    require(static_cast<bool>(f), "DomainError", "average of an empty callback");
    require(std::isfinite(side) && side > 0.0, "DomainError",
            "square side must be positive, got " + fmt_g12(side));
    // 8-point Gauss-Legendre nodes and weights on [-1, 1].
    static constexpr double kNode[4] = {0.1834346424956498, 0.5255324099163290,
                                        0.7966664774136267, 0.9602898564975363};
    static constexpr double kWeight[4] = {0.3626837833783620, 0.3137066458778873,
                                          0.2223810344533745, 0.1012285362903763};
    double nodes[8], weights[8];
    for (int i = 0; i < 4; ++i) {
        nodes[i] = -kNode[3 - i];
        nodes[4 + i] = kNode[i];
        weights[i] = kWeight[3 - i];
        weights[4 + i] = kWeight[i];
    }
    const double half = side / 2.0;
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            const Vec2 p{center.x + half * nodes[i], center.y + half * nodes[j]};
            acc += weights[i] * weights[j] * f(p);
        }
    }
    // Axis weights each sum to 2, so dividing by 4 yields the average.
    return acc / 4.0;
}

}  // namespace ortholap
