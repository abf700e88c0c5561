#include "ortholap/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <unordered_set>

#include "ortholap/errors.hpp"
#include "ortholap/format.hpp"

namespace ortholap {

// ---------------------------------------------------------------------------
// DiscreteField
// ---------------------------------------------------------------------------

int DiscreteField::try_slot(int map_id) const {
    const auto it = std::lower_bound(ids.begin(), ids.end(), map_id);
    if (it == ids.end() || *it != map_id) return -1;
    return static_cast<int>(it - ids.begin());
}

int DiscreteField::slot_of(int map_id) const {
    const int s = try_slot(map_id);
    require(s >= 0, "SideMismatch",
            "vertex " + std::to_string(map_id) + " is not carried by this field");
    return s;
}

double DiscreteField::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

void save_field(const DiscreteField& f, const std::string& path) {
    require(f.ids.size() == f.values.size(), "SideMismatch",
            "field ids and values have different lengths");
    std::string out = "field v1 side=";
    out += (f.side == Side::Primal ? "p" : "d");
    out += "\n";
    for (size_t k = 0; k < f.ids.size(); ++k)
        out += std::to_string(f.ids[k]) + " " + fmt_g17(f.values[k]) + "\n";
    write_text_file(path, out);
}

DiscreteField load_field(const std::string& path) {
    const std::string text = read_text_file(path);
    std::istringstream iss(text);
    std::string line;
    int lineno = 0;
    DiscreteField f;
    bool saw_header = false;
    while (std::getline(iss, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream h(line);
        std::string tok;
        if (!(h >> tok)) continue;
        if (!saw_header) {
            std::string ver, sidetok, extra;
            if (tok != "field" || !(h >> ver >> sidetok) || ver != "v1" || (h >> extra) ||
                (sidetok != "side=p" && sidetok != "side=d"))
                fail("FormatError",
                     "line " + std::to_string(lineno) + ": expected 'field v1 side=<p|d>'");
            f.side = sidetok == "side=p" ? Side::Primal : Side::Dual;
            saw_header = true;
            continue;
        }
        std::string val_tok, extra;
        if (!(h >> val_tok) || (h >> extra))
            fail("FormatError", "line " + std::to_string(lineno) + ": expected '<id> <value>'");
        char* end = nullptr;
        const long id = std::strtol(tok.c_str(), &end, 10);
        if (end != tok.c_str() + tok.size() || id < 0)
            fail("FormatError", "line " + std::to_string(lineno) + ": bad vertex id '" + tok + "'");
        end = nullptr;
        const double v = std::strtod(val_tok.c_str(), &end);
        if (end != val_tok.c_str() + val_tok.size() || !std::isfinite(v))
            fail("FormatError", "line " + std::to_string(lineno) + ": bad value '" + val_tok + "'");
        f.ids.push_back(static_cast<int>(id));
        f.values.push_back(v);
    }
    if (!saw_header) fail("FormatError", "missing 'field v1' header");
    for (size_t k = 1; k < f.ids.size(); ++k)
        if (f.ids[k] <= f.ids[k - 1])
            fail("FormatError", "vertex ids must be strictly increasing");
    return f;
}

DiscreteField sample_scalar(const OrthodiagonalMap& map, Side side,
                            const std::function<double(Vec2)>& f) {
    DiscreteField out;
    out.side = side;
    for (const Vertex& v : map.vertices) {
        const bool primal = v.kind == VertexKind::Primal;
        if (primal != (side == Side::Primal)) continue;
        out.ids.push_back(v.id);
        out.values.push_back(f(v.pos));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Network assembly and the Laplacian
// ---------------------------------------------------------------------------

WeightedNetwork build_network(const OrthodiagonalMap& map, Side side) {
    const ValidationReport rep = validate(map);
    require(rep.ok(), "InvalidMap", rep.summary());

    WeightedNetwork net;
    net.side = side;
    const int n = map.vertex_count();
    net.net_index.assign(static_cast<size_t>(n), -1);
    for (const Vertex& v : map.vertices) {
        const bool primal = v.kind == VertexKind::Primal;
        if (primal != (side == Side::Primal)) continue;
        net.net_index[static_cast<size_t>(v.id)] = static_cast<int>(net.ids.size());
        net.ids.push_back(v.id);
        net.positions.push_back(v.pos);
        net.absorbing.push_back(v.boundary ? 1 : 0);
    }
    const int m = net.size();
    net.adj.assign(static_cast<size_t>(m), {});
    net.pi.assign(static_cast<size_t>(m), 0.0);
    for (const Quad& q : map.quads) {
        const int a_id = side == Side::Primal ? q.u() : q.r();
        const int b_id = side == Side::Primal ? q.v() : q.s();
        const double c = side == Side::Primal ? q.primal_conductance() : q.dual_conductance();
        const int a = net.net_index[static_cast<size_t>(a_id)];
        const int b = net.net_index[static_cast<size_t>(b_id)];
        net.adj[static_cast<size_t>(a)].push_back({b, c});
        net.adj[static_cast<size_t>(b)].push_back({a, c});
        net.pi[static_cast<size_t>(a)] += c;
        net.pi[static_cast<size_t>(b)] += c;
    }
    for (int k = 0; k < m; ++k) {
        require(!net.adj[static_cast<size_t>(k)].empty(), "IsolatedVertex",
                "vertex " + std::to_string(net.ids[static_cast<size_t>(k)]) +
                    " has no incident conductance");
        (net.absorbing[static_cast<size_t>(k)] ? net.boundary : net.interior).push_back(k);
    }
    return net;
}

namespace {

void check_field_matches(const WeightedNetwork& net, const DiscreteField& f) {
    require(f.side == net.side, "SideMismatch", "field lives on the other vertex family");
    require(f.ids == net.ids, "SideMismatch",
            "field does not cover exactly this network's vertices");
}

}  // namespace

std::vector<double> laplacian_apply(const WeightedNetwork& net, const DiscreteField& f) {
    check_field_matches(net, f);
    const int m = net.size();
    std::vector<double> out(static_cast<size_t>(m), 0.0);
    for (int x = 0; x < m; ++x) {
        double acc = 0.0;
        const double fx = f.values[static_cast<size_t>(x)];
        for (const auto& [y, c] : net.adj[static_cast<size_t>(x)])
            acc += c * (f.values[static_cast<size_t>(y)] - fx);
        out[static_cast<size_t>(x)] = acc;
    }
    return out;
}

std::vector<double> boundary_values_from(const WeightedNetwork& net,
                                         const std::function<double(Vec2)>& g) {
    std::vector<double> out;
    out.reserve(net.boundary.size());
    for (int b : net.boundary) out.push_back(g(net.positions[static_cast<size_t>(b)]));
    return out;
}

// ---------------------------------------------------------------------------
// Harmonic conjugate
// ---------------------------------------------------------------------------

DiscreteField harmonic_conjugate(const OrthodiagonalMap& map, const DiscreteField& h,
                                 double tol) {
    require(h.side == Side::Primal, "SideMismatch",
            "conjugate construction starts from a primal field");
    const WeightedNetwork net = build_network(map, Side::Primal);
    check_field_matches(net, h);

    // Path independence of the increments around any closed dual loop is the
    // discrete harmonicity of h at the enclosed interior primal vertices, so
    // check that first.
    const std::vector<double> lap = laplacian_apply(net, h);
    const double scale = std::max(1.0, h.sup_norm());
    for (int x : net.interior) {
        const double r = std::abs(lap[static_cast<size_t>(x)]);
        require(r <= tol * net.pi[static_cast<size_t>(x)] * scale, "NotHarmonic",
                "field is not discretely harmonic at vertex " +
                    std::to_string(net.ids[static_cast<size_t>(x)]) + " (residual " +
                    fmt_g12(r) + ")");
    }

    DiscreteField out;
    out.side = Side::Dual;
    for (const Vertex& v : map.vertices)
        if (v.kind == VertexKind::Dual) out.ids.push_back(v.id);
    std::sort(out.ids.begin(), out.ids.end());
    out.values.assign(out.ids.size(), 0.0);
    require(!out.ids.empty(), "InvalidMap", "map has no dual vertices");

    std::vector<char> known(map.vertices.size(), 0);
    std::deque<int> queue;
    const int anchor = out.ids.front();
    known[static_cast<size_t>(anchor)] = 1;
    queue.push_back(anchor);
    std::vector<double> value_by_id(map.vertices.size(), 0.0);
    while (!queue.empty()) {
        const int x = queue.front();
        queue.pop_front();
        for (const AdjacencyEntry& e : map.dual_adjacency[static_cast<size_t>(x)]) {
            if (known[static_cast<size_t>(e.neighbor)]) continue;
            const Quad& q = map.quads[static_cast<size_t>(e.quad)];
            const double inc =
                q.primal_conductance() * (h.value_at(q.v()) - h.value_at(q.u()));
            const double sign = x == q.r() ? 1.0 : -1.0;  // r -> s carries +inc
            value_by_id[static_cast<size_t>(e.neighbor)] =
                value_by_id[static_cast<size_t>(x)] + sign * inc;
            known[static_cast<size_t>(e.neighbor)] = 1;
            queue.push_back(e.neighbor);
        }
    }
    for (size_t k = 0; k < out.ids.size(); ++k) {
        require(known[static_cast<size_t>(out.ids[k])] != 0, "InvalidMap",
                "dual graph did not reach vertex " + std::to_string(out.ids[k]));
        out.values[k] = value_by_id[static_cast<size_t>(out.ids[k])];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Complex fields, contour sums, difference-quotient residuals
// ---------------------------------------------------------------------------

ComplexField sample_complex(
    const OrthodiagonalMap& map,
    const std::function<std::complex<double>(std::complex<double>)>& f) {
    ComplexField out;
    out.values.reserve(map.vertices.size());
    for (const Vertex& v : map.vertices) out.values.push_back(f(v.pos.to_complex()));
    return out;
}

ComplexField combine_analytic(const OrthodiagonalMap& map, const DiscreteField& h,
                              const DiscreteField& conj) {
    require(h.side == Side::Primal && conj.side == Side::Dual, "SideMismatch",
            "expected a primal field and its dual conjugate");
    ComplexField out;
    out.values.assign(map.vertices.size(), {0.0, 0.0});
    for (const Vertex& v : map.vertices) {
        if (v.kind == VertexKind::Primal)
            out.values[static_cast<size_t>(v.id)] = {h.value_at(v.id), 0.0};
        else
            out.values[static_cast<size_t>(v.id)] = {0.0, conj.value_at(v.id)};
    }
    return out;
}

std::complex<double> contour_sum(const OrthodiagonalMap& map, const ComplexField& F,
                                 const std::vector<int>& cycle) {
    require(F.values.size() == map.vertices.size(), "SideMismatch",
            "complex field must cover every vertex of the map");
    require(cycle.size() >= 3, "NotAPath", "a closed contour needs at least three vertices");

    std::unordered_set<std::uint64_t> sides;
    sides.reserve(map.quads.size() * 4);
    auto skey = [](int a, int b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    };
    for (const Quad& q : map.quads)
        for (int c = 0; c < 4; ++c)
            sides.insert(skey(q.corner[static_cast<size_t>(c)],
                              q.corner[static_cast<size_t>((c + 1) % 4)]));

    std::complex<double> acc{0.0, 0.0};
    const size_t m = cycle.size();
    for (size_t k = 0; k < m; ++k) {
        const int a = cycle[k];
        const int b = cycle[(k + 1) % m];
        require(a >= 0 && b >= 0 && a < map.vertex_count() && b < map.vertex_count(),
                "NotAPath", "contour references an unknown vertex");
        require(sides.count(skey(a, b)) != 0, "NotAPath",
                "vertices " + std::to_string(a) + " and " + std::to_string(b) +
                    " are not joined by a quad side");
        const std::complex<double> za = map.pos(a).to_complex();
        const std::complex<double> zb = map.pos(b).to_complex();
        acc += (F.values[static_cast<size_t>(a)] + F.values[static_cast<size_t>(b)]) * (zb - za);
    }
    return acc;
}

std::vector<double> cauchy_riemann_residuals(const OrthodiagonalMap& map,
                                             const ComplexField& F) {
    require(F.values.size() == map.vertices.size(), "SideMismatch",
            "complex field must cover every vertex of the map");
    std::vector<double> out;
    out.reserve(map.quads.size());
    for (const Quad& q : map.quads) {
        const std::complex<double> zu = map.pos(q.u()).to_complex();
        const std::complex<double> zv = map.pos(q.v()).to_complex();
        const std::complex<double> zr = map.pos(q.r()).to_complex();
        const std::complex<double> zs = map.pos(q.s()).to_complex();
        const std::complex<double> qp =
            (F.values[static_cast<size_t>(q.v())] - F.values[static_cast<size_t>(q.u())]) /
            (zv - zu);
        const std::complex<double> qd =
            (F.values[static_cast<size_t>(q.s())] - F.values[static_cast<size_t>(q.r())]) /
            (zs - zr);
        out.push_back(std::abs(qp - qd));
    }
    return out;
}

}  // namespace ortholap
