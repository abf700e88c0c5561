#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "ortholap/format.hpp"
#include "ortholap/map.hpp"

using namespace ortholap;
using ortholap::testing::thrown_code;

namespace {

std::string temp_path(const char* name) {
    return std::string("odmap_test_") + name;
}

}  // namespace

TEST_CASE("square generator on the unit square produces a valid bipartite quad mesh") {
    const auto dom = DomainDescriptor::rect({0.0, 0.0}, {1.0, 1.0});
    const OrthodiagonalMap m = generate_square(dom, 0.8);

    CHECK(validate(m).ok());
    CHECK(m.quad_count() == 8);
    // 8 primal + 8 dual: lattice points in no quad (the domain corners) are dropped.
    CHECK(m.vertex_count() == 16);
    CHECK(m.interior_primal_ids().size() == 1);
    CHECK(m.pos(m.interior_primal_ids()[0]).x == doctest::Approx(0.4));
    CHECK(m.pos(m.interior_primal_ids()[0]).y == doctest::Approx(0.4));

    for (const Quad& q : m.quads) {
        // Equal diagonals on the square lattice (up to rounding in 0.4*k).
        CHECK(q.primal_conductance() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(q.dual_conductance() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(q.area == doctest::Approx(0.5 * 0.4 * 0.4));
    }
}

TEST_CASE("square generator on a disk: validity, side bound, boundary proximity") {
    const auto dom = DomainDescriptor::disk({0.0, 0.0}, 1.0);
    const double eps = 0.125;
    const OrthodiagonalMap m = generate_square(dom, eps);

    const ValidationReport rep = validate(m);
    INFO(rep.summary());
    CHECK(rep.ok());
    CHECK(m.mesh_eps == eps);
    CHECK(m.quad_count() > 100);

    // Quad sides on the square lattice are eps/(2*sqrt(2)).
    const double expect_side = eps / (2.0 * std::sqrt(2.0));
    for (const Quad& q : m.quads) {
        const Vec2 pu = m.pos(q.u()), pr = m.pos(q.r()), pv = m.pos(q.v()), ps = m.pos(q.s());
        for (double side : {dist(pu, pr), dist(pr, pv), dist(pv, ps), dist(ps, pu)})
            CHECK(side == doctest::Approx(expect_side).epsilon(1e-12));
    }

    // Every outer-face vertex sits within eps of the true domain boundary.
    for (int id : m.boundary_cycle)
        CHECK(dom.boundary_distance(m.pos(id)) <= eps);

    // The outer walk alternates primal/dual and is closed by construction.
    const size_t bn = m.boundary_cycle.size();
    CHECK(bn % 2 == 0);
    for (size_t k = 0; k < bn; ++k)
        CHECK(m.is_primal(m.boundary_cycle[k]) != m.is_primal(m.boundary_cycle[(k + 1) % bn]));

    // Ids are dense with the primal family first.
    const int n = m.vertex_count();
    bool seen_dual = false;
    for (int i = 0; i < n; ++i) {
        if (!m.is_primal(i)) seen_dual = true;
        if (seen_dual) CHECK(!m.is_primal(i));
    }
}

TEST_CASE("generation is deterministic") {
    const auto dom = DomainDescriptor::disk({0.25, -0.5}, 0.9);
    const OrthodiagonalMap a = generate_square(dom, 0.21);
    const OrthodiagonalMap b = generate_square(dom, 0.21);
    const std::string pa = temp_path("det_a.odmap"), pb = temp_path("det_b.odmap");
    save(a, pa);
    save(b, pb);
    CHECK(fnv1a64(read_text_file(pa)) == fnv1a64(read_text_file(pb)));
    std::remove(pa.c_str());
    std::remove(pb.c_str());
}

TEST_CASE("tensor-grid generator computes unequal conductances from the spacings") {
    const auto dom = DomainDescriptor::rect({0.0, 0.0}, {4.0, 5.0});
    const std::vector<double> xs{0.0, 1.0, 3.0, 4.0};
    const std::vector<double> ys{0.0, 2.0, 3.0, 5.0};
    const OrthodiagonalMap m = generate_rect_nonuniform(dom, xs, ys);

    const ValidationReport rep = validate(m);
    INFO(rep.summary());
    CHECK(rep.ok());
    CHECK(m.quad_count() == 12);
    CHECK(m.vertex_count() == 12 + 9);  // the four grid corners belong to no quad
    CHECK(m.interior_primal_ids().size() == 4);
    // Observed maximum quad side is sqrt(2) (cells of size 2 meet cells of size 1).
    CHECK(m.mesh_eps == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    // The quad whose primal diagonal joins (0,2)-(1,2) has dual diagonal
    // (0.5,1)-(0.5,2.5): conductance 1.5/1, area 0.75.
    bool found = false;
    for (const Quad& q : m.quads) {
        const Vec2 pu = m.pos(q.u()), pv = m.pos(q.v());
        if (std::min(pu.x, pv.x) == 0.0 && std::max(pu.x, pv.x) == 1.0 && pu.y == 2.0 &&
            pv.y == 2.0) {
            found = true;
            CHECK(q.primal_conductance() == doctest::Approx(1.5).epsilon(1e-15));
            CHECK(q.dual_conductance() == doctest::Approx(1.0 / 1.5).epsilon(1e-15));
            CHECK(q.area == doctest::Approx(0.75).epsilon(1e-15));
        }
    }
    CHECK(found);
}

TEST_CASE("tensor-grid generator rejects bad spacings and too-coarse declarations") {
    const auto dom = DomainDescriptor::rect({0.0, 0.0}, {4.0, 5.0});
    const std::vector<double> xs{0.0, 1.0, 3.0, 4.0};
    const std::vector<double> ys{0.0, 2.0, 3.0, 5.0};

    CHECK(thrown_code([&] {
              generate_rect_nonuniform(dom, {0.0, 2.0, 2.0, 4.0}, ys);
          }) == "SpacingNonMonotone");
    CHECK(thrown_code([&] {
              generate_rect_nonuniform(dom, {0.0, 3.0, 1.0, 4.0}, ys);
          }) == "SpacingNonMonotone");
    CHECK(thrown_code([&] { generate_rect_nonuniform(dom, xs, ys, 1.0); }) == "MeshTooCoarse");

    // A generous declared bound is kept as the map's eps.
    const OrthodiagonalMap m = generate_rect_nonuniform(dom, xs, ys, 1.5);
    CHECK(m.mesh_eps == 1.5);
    CHECK(validate(m).ok());
}

TEST_CASE("domains that cannot hold an interior vertex are rejected") {
    CHECK(thrown_code([] {
              generate_square(DomainDescriptor::disk({0.0, 0.0}, 0.05), 1.0);
          }) == "DomainTooSmall");
    CHECK(thrown_code([] {
              generate_rect_nonuniform(DomainDescriptor::rect({0.0, 0.0}, {1.0, 1.0}),
                                       {0.0, 1.0}, {0.0, 1.0});
          }) == "DomainTooSmall");
}

TEST_CASE("save/load round trip preserves the map exactly") {
    const auto dom = DomainDescriptor::disk({0.0, 0.0}, 1.0);
    const OrthodiagonalMap m = generate_square(dom, 0.25);
    const std::string path = temp_path("roundtrip.odmap");
    save(m, path);
    const OrthodiagonalMap r = load(path);

    CHECK(r.vertex_count() == m.vertex_count());
    CHECK(r.quad_count() == m.quad_count());
    CHECK(r.mesh_eps == m.mesh_eps);
    for (int i = 0; i < m.vertex_count(); ++i) {
        CHECK(r.pos(i).x == m.pos(i).x);  // 17 significant digits round-trip exactly
        CHECK(r.pos(i).y == m.pos(i).y);
        CHECK(r.is_primal(i) == m.is_primal(i));
        CHECK(r.is_boundary(i) == m.is_boundary(i));
    }
    for (int qi = 0; qi < m.quad_count(); ++qi) {
        CHECK(r.quads[qi].corner == m.quads[qi].corner);
        CHECK(r.quads[qi].primal_diag_len == m.quads[qi].primal_diag_len);
        CHECK(r.quads[qi].area == m.quads[qi].area);
    }
    CHECK(r.boundary_cycle == m.boundary_cycle);
    // The loaded map does not know which continuum domain it came from.
    CHECK(!r.domain.known());
    std::remove(path.c_str());
}

TEST_CASE("loader reports malformed files with FormatError") {
    const std::string path = temp_path("bad.odmap");
    auto load_text = [&](const std::string& text) {
        write_text_file(path, text);
        return thrown_code([&] { load(path); });
    };

    CHECK(load_text("not a header\n") == "FormatError");
    CHECK(load_text("odmap v2 eps=0.5\n") == "FormatError");
    CHECK(load_text("odmap v1 eps=abc\n") == "FormatError");
    CHECK(load_text("odmap v1 eps=0.5\nv 0 0 0 x i\n") == "FormatError");
    CHECK(load_text("odmap v1 eps=0.5\nv 0 0 0 p q\n") == "FormatError");
    CHECK(load_text("odmap v1 eps=0.5\nv 0 0 0 p i extra\n") == "FormatError");
    CHECK(load_text("odmap v1 eps=0.5\nw 0 0 0 p i\n") == "FormatError");
    // duplicate / non-dense ids
    CHECK(load_text("odmap v1 eps=0.5\nv 0 0 0 p i\nv 0 1 0 d i\n") == "FormatError");
    CHECK(load_text("odmap v1 eps=0.5\nv 0 0 0 p i\nv 2 1 0 d i\n") == "FormatError");
    // quad referencing a vertex that does not exist
    CHECK(load_text("odmap v1 eps=0.5\nv 0 0 0 p b\nq 0 1 2 3\n") == "FormatError");
    CHECK(thrown_code([] { load("does_not_exist.odmap"); }) == "IoError");
    std::remove(path.c_str());
}

TEST_CASE("loader rejects structurally invalid maps with InvalidMap") {
    const auto dom = DomainDescriptor::rect({0.0, 0.0}, {1.0, 1.0});
    OrthodiagonalMap m = generate_square(dom, 0.8);
    const std::string path = temp_path("invalid.odmap");

    // Break orthogonality by nudging one interior primal vertex.
    OrthodiagonalMap broken = m;
    broken.vertices[static_cast<size_t>(broken.interior_primal_ids()[0])].pos.x += 0.05;
    save(broken, path);
    CHECK(thrown_code([&] { load(path); }) == "InvalidMap");

    // Unflag a boundary vertex.
    broken = m;
    broken.vertices[static_cast<size_t>(broken.boundary_cycle[0])].boundary = false;
    save(broken, path);
    CHECK(thrown_code([&] { load(path); }) == "InvalidMap");
    std::remove(path.c_str());
}

TEST_CASE("validate pinpoints specific defects") {
    const auto dom = DomainDescriptor::rect({0.0, 0.0}, {1.0, 1.0});
    const OrthodiagonalMap m = generate_square(dom, 0.8);

    auto has_rule = [](const ValidationReport& rep, const std::string& rule) {
        return std::any_of(rep.issues.begin(), rep.issues.end(),
                           [&](const ValidationIssue& is) { return is.rule == rule; });
    };

    {
        OrthodiagonalMap bad = m;  // reverse one quad's orientation
        std::swap(bad.quads[0].corner[1], bad.quads[0].corner[3]);
        const ValidationReport rep = validate(bad);
        CHECK(!rep.ok());
        CHECK(has_rule(rep, "ccw_order"));
    }
    {
        OrthodiagonalMap bad = m;  // skew a diagonal
        bad.vertices[static_cast<size_t>(bad.interior_primal_ids()[0])].pos.y += 0.03;
        const ValidationReport rep = validate(bad);
        CHECK(!rep.ok());
        CHECK(has_rule(rep, "orthogonality"));
    }
    {
        OrthodiagonalMap bad = m;  // shrink the declared side bound
        bad.mesh_eps = 0.1;
        CHECK(has_rule(validate(bad), "side_length"));
    }
    {
        OrthodiagonalMap bad = m;  // drop a quad: its private vertices become isolated
        bad.quads.pop_back();
        const ValidationReport rep = validate(bad);
        CHECK(!rep.ok());
        CHECK(has_rule(rep, "isolated_vertex"));
    }
    {
        OrthodiagonalMap bad = m;
        bad.mesh_eps = -1.0;
        CHECK(has_rule(validate(bad), "eps_positive"));
    }
}

TEST_CASE("absorbing re-flagging keeps geometry but shrinks the interior") {
    const auto dom = DomainDescriptor::disk({0.0, 0.0}, 1.0);
    const OrthodiagonalMap m = generate_square(dom, 0.25);
    const std::vector<int> interior = m.interior_primal_ids();
    const std::vector<int> chosen{interior[0], interior[2]};

    const OrthodiagonalMap a = with_absorbing_vertices(m, chosen);
    CHECK(validate(a).ok());  // extra absorbing flags are allowed
    CHECK(a.interior_primal_ids().size() == interior.size() - 2);
    for (int id : chosen) CHECK(a.is_boundary(id));
    CHECK(a.boundary_cycle == m.boundary_cycle);  // outer walk unchanged

    CHECK(thrown_code([&] { with_absorbing_vertices(m, {99999}); }) == "InvalidMap");
}

TEST_CASE("region queries and nearest-vertex lookup") {
    const auto dom = DomainDescriptor::disk({0.0, 0.0}, 1.0);
    const OrthodiagonalMap m = generate_square(dom, 0.25);

    CHECK(m.region_contains({0.0, 0.0}));
    CHECK(m.region_contains({0.5, 0.3}));
    CHECK(!m.region_contains({2.0, 0.0}));
    CHECK(!m.region_contains({0.99, 0.99}));

    // Center of the disk: boundary polyline distance close to 1 (within eps).
    CHECK(m.boundary_distance({0.0, 0.0}) > 1.0 - 0.25);
    CHECK(m.boundary_distance({0.0, 0.0}) <= 1.0 + 1e-12);

    const int id = nearest_primal_vertex(m, {0.01, 0.02});
    CHECK(m.pos(id).x == 0.0);
    CHECK(m.pos(id).y == 0.0);
    CHECK(m.is_primal(id));
}

TEST_CASE("domain descriptors answer geometric queries") {
    const auto disk = DomainDescriptor::disk({1.0, 2.0}, 3.0);
    CHECK(disk.contains({1.0, 2.0}));
    CHECK(disk.contains({4.0, 2.0}));
    CHECK(!disk.contains({4.5, 2.0}));
    CHECK(disk.boundary_distance({1.0, 2.0}) == doctest::Approx(3.0));
    CHECK(disk.boundary_distance({5.0, 2.0}) == doctest::Approx(1.0));
    CHECK(disk.diameter() == 6.0);

    const auto rect = DomainDescriptor::rect({0.0, 0.0}, {2.0, 1.0});
    CHECK(rect.contains({0.0, 0.0}));
    CHECK(rect.contains({2.0, 1.0}));
    CHECK(!rect.contains({2.1, 0.5}));
    CHECK(rect.boundary_distance({1.0, 0.5}) == doctest::Approx(0.5));
    CHECK(rect.boundary_distance({3.0, 0.5}) == doctest::Approx(1.0));
    CHECK(rect.diameter() == doctest::Approx(std::sqrt(5.0)));

    CHECK(thrown_code([] { DomainDescriptor::disk({0, 0}, -1.0); }) == "DomainError");
    CHECK(thrown_code([] { DomainDescriptor::rect({1, 1}, {0, 0}); }) == "DomainError");
    CHECK(thrown_code([] { DomainDescriptor::unknown().diameter(); }) == "DomainError");
}
