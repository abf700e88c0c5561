#include "ortholap/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ortholap/errors.hpp"
#include "ortholap/format.hpp"
#include "ortholap/mollify.hpp"
#include "ortholap/network.hpp"
#include "ortholap/rates.hpp"
#include "ortholap/walk.hpp"

namespace ortholap {

namespace {

// Errors below this are indistinguishable from solver round-off; a slope fit
// over them measures the solver, not the discretization.
constexpr double kSolverFloor = 1e-7;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        require(used == text.size(), "FormatError", what + ": trailing characters in '" + text + "'");
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        fail("FormatError", what + ": cannot parse number '" + text + "'");
    }
}

long parse_long(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(text, &used);
        require(used == text.size(), "FormatError", what + ": trailing characters in '" + text + "'");
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        fail("FormatError", what + ": cannot parse integer '" + text + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

ExperimentKind parse_kind(const std::string& name) {
    if (name == "converge") return ExperimentKind::Converge;
    if (name == "beurling") return ExperimentKind::Beurling;
    if (name == "prop41") return ExperimentKind::Prop41;
    if (name == "prop42") return ExperimentKind::Prop42;
    if (name == "harnack") return ExperimentKind::Harnack;
    if (name == "exponents") return ExperimentKind::Exponents;
    if (name == "walkcheck") return ExperimentKind::WalkCheck;
    fail("FormatError", "unknown experiment kind '" + name + "'");
}

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Converge: return "converge";
        case ExperimentKind::Beurling: return "beurling";
        case ExperimentKind::Prop41: return "prop41";
        case ExperimentKind::Prop42: return "prop42";
        case ExperimentKind::Harnack: return "harnack";
        case ExperimentKind::Exponents: return "exponents";
        case ExperimentKind::WalkCheck: return "walkcheck";
    }
    return "unknown";
}

DomainDescriptor parse_domain(const std::string& text) {
    const auto head = text.find(':');
    require(head != std::string::npos, "FormatError",
            "domain must be disk:R or rect:w,h, got '" + text + "'");
    const std::string shape = text.substr(0, head);
    const std::string args = text.substr(head + 1);
    if (shape == "disk") {
        const double r = parse_double(args, "disk radius");
        require(r > 0.0, "FormatError", "disk radius must be positive");
        return DomainDescriptor::disk({0.0, 0.0}, r);
    }
    if (shape == "rect") {
        const auto parts = split(args, ',');
        require(parts.size() == 2, "FormatError", "rect needs w,h, got '" + args + "'");
        const double w = parse_double(trim(parts[0]), "rect width");
        const double h = parse_double(trim(parts[1]), "rect height");
        require(w > 0.0 && h > 0.0, "FormatError", "rect sides must be positive");
        return DomainDescriptor::rect({-w / 2.0, -h / 2.0}, {w / 2.0, h / 2.0});
    }
    fail("FormatError", "unknown domain shape '" + shape + "'");
}

BoundaryDescriptor parse_boundary(const std::string& text) {
    const auto parts = split(text, ':');
    BoundaryDescriptor b;
    if (parts[0] == "poly") {
        require(parts.size() == 3, "FormatError", "boundary data must be poly:k:re|im");
        b.kind = BoundaryDescriptor::Kind::Polynomial;
        b.degree = static_cast<int>(parse_long(trim(parts[1]), "polynomial degree"));
        const std::string part = trim(parts[2]);
        if (part == "re") {
            b.part = HarmonicPart::Real;
        } else if (part == "im") {
            b.part = HarmonicPart::Imag;
        } else {
            fail("FormatError", "polynomial part must be re or im, got '" + part + "'");
        }
        return b;
    }
    if (parts[0] == "holder") {
        require(parts.size() == 3, "FormatError", "boundary data must be holder:alpha:x,y");
        b.kind = BoundaryDescriptor::Kind::Holder;
        b.alpha = parse_double(trim(parts[1]), "Hoelder exponent");
        const auto xy = split(parts[2], ',');
        require(xy.size() == 2, "FormatError", "Hoelder anchor needs x,y");
        b.anchor = Vec2{parse_double(trim(xy[0]), "anchor x"), parse_double(trim(xy[1]), "anchor y")};
        return b;
    }
    fail("FormatError", "boundary data must start with poly: or holder:, got '" + text + "'");
}

}  // namespace

std::string BoundaryDescriptor::describe() const {
    if (kind == Kind::Polynomial) {
        return std::string("poly:") + std::to_string(degree) + ":" +
               (part == HarmonicPart::Real ? "re" : "im");
    }
    return "holder:" + fmt_g12(alpha) + ":" + fmt_g12(anchor.x) + "," + fmt_g12(anchor.y);
}

std::string ExperimentSpec::describe() const {
    std::vector<std::string> parts;
    parts.push_back("kind = " + kind_name(kind));
    parts.push_back("domain = " + domain.describe());
    parts.push_back(std::string("generator = ") +
                    (generator == GeneratorKind::Square ? "square" : "rectnu"));
    std::vector<std::string> eps;
    eps.reserve(eps_list.size());
    for (double e : eps_list) eps.push_back(fmt_g12(e));
    parts.push_back("eps = " + join(eps, ","));
    parts.push_back("g = " + boundary.describe());
    parts.push_back("seed = " + std::to_string(seed));
    parts.push_back("trials = " + std::to_string(trials));
    parts.push_back("tol = " + fmt_g12(tol));
    parts.push_back("guide_beta = " + fmt_g12(guide_beta));
    return join(parts, "; ");
}

void validate_spec(const ExperimentSpec& spec) {
    for (double e : spec.eps_list)
        require(std::isfinite(e) && e > 0.0, "DomainError",
                "every eps must be positive, got " + fmt_g12(e));
    for (std::size_t i = 1; i < spec.eps_list.size(); ++i)
        require(spec.eps_list[i] < spec.eps_list[i - 1], "DomainError",
                "the eps list must be strictly decreasing; " + fmt_g12(spec.eps_list[i]) +
                    " follows " + fmt_g12(spec.eps_list[i - 1]));
    require(spec.domain.known(), "DomainError", "the experiment needs a known domain");
    require(spec.trials > 0, "DomainError", "trial count must be positive");
    require(spec.tol > 0.0, "DomainError", "tolerance must be positive");
    require(spec.guide_beta > 0.0 && spec.guide_beta < 0.5, "DomainError",
            "the guide escape exponent must lie in (0, 1/2)");
    if (spec.boundary.kind == BoundaryDescriptor::Kind::Polynomial) {
        require(spec.boundary.degree >= 0 && spec.boundary.degree <= 8, "DomainError",
                "polynomial boundary data supports degrees 0..8");
    } else {
        require(spec.boundary.alpha > 0.0 && spec.boundary.alpha <= 1.0, "DomainError",
                "Hoelder exponent must lie in (0, 1]");
        require(std::abs(spec.boundary.anchor.norm() - 1.0) <= 1e-9, "DomainError",
                "the Hoelder anchor must lie on the unit circle");
    }
}

ExperimentSpec parse_config(const std::string& text) {
    ExperimentSpec spec;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, "FormatError",
                "line " + std::to_string(line_no) + ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        require(!key.empty() && !value.empty(), "FormatError",
                "line " + std::to_string(line_no) + ": empty key or value");
        if (key == "kind") {
            spec.kind = parse_kind(value);
        } else if (key == "domain") {
            spec.domain = parse_domain(value);
        } else if (key == "gen") {
            if (value == "square") {
                spec.generator = GeneratorKind::Square;
            } else if (value == "rectnu") {
                spec.generator = GeneratorKind::RectNonuniform;
            } else {
                fail("FormatError", "generator must be square or rectnu, got '" + value + "'");
            }
        } else if (key == "eps") {
            spec.eps_list.clear();
            for (const std::string& item : split(value, ','))
                spec.eps_list.push_back(parse_double(trim(item), "eps entry"));
        } else if (key == "g") {
            spec.boundary = parse_boundary(value);
        } else if (key == "seed") {
            spec.seed = static_cast<std::uint64_t>(parse_long(value, "seed"));
        } else if (key == "trials") {
            spec.trials = parse_long(value, "trials");
        } else if (key == "tol") {
            spec.tol = parse_double(value, "tol");
        } else if (key == "guide_beta") {
            spec.guide_beta = parse_double(value, "guide_beta");
        } else if (key == "out") {
            spec.outdir = value;
        } else {
            fail("FormatError", "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    validate_spec(spec);
    return spec;
}

ExperimentSpec load_config(const std::string& path) {
    return parse_config(read_text_file(path));
}

RateFit fit_rate_points(const std::vector<double>& xs, const std::vector<double>& ys) {
    require(xs.size() == ys.size(), "DomainError", "fit inputs must be parallel");
    require(xs.size() >= 3, "DomainError",
            "a slope fit needs at least 3 points, got " + std::to_string(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        require(xs[i] > 0.0 && ys[i] > 0.0, "DomainError",
                "log-log fit needs positive coordinates, got (" + fmt_g12(xs[i]) + ", " +
                    fmt_g12(ys[i]) + ")");
    }
    const bool all_equal = std::all_of(ys.begin(), ys.end(), [&](double y) { return y == ys[0]; });
    require(!all_equal, "DegenerateFit", "all errors are equal; no slope information");

    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        lx[i] = std::log10(xs[i]);
        ly[i] = std::log10(ys[i]);
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    require(sxx > 0.0, "DomainError", "all abscissae are equal; cannot fit a slope");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.n_points = static_cast<int>(lx.size());
    double ss_res = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double pred = fit.intercept + fit.slope * lx[i];
        ss_res += (ly[i] - pred) * (ly[i] - pred);
    }
    fit.r2 = (syy > 0.0) ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

RateFit fit_rate(const std::vector<SweepRecord>& records) {
    require(records.size() >= 3, "DomainError",
            "a slope fit needs at least 3 sweep records, got " + std::to_string(records.size()));
    std::vector<double> xs, ys;
    xs.reserve(records.size());
    ys.reserve(records.size());
    for (const SweepRecord& r : records) {
        require(r.max_err > 0.0, "DomainError",
                "slope fit needs positive errors; eps " + fmt_g12(r.eps) + " has max_err " +
                    fmt_g12(r.max_err));
        xs.push_back(r.eps);
        ys.push_back(r.max_err);
    }
    return fit_rate_points(xs, ys);
}

namespace {

// Non-uniform tensor grid lines spanning [lo, hi]: spacings cycle through
// 0.9/1.3/0.7 of eps so the diagonal ratios genuinely vary, while every quad
// side hypot(dx, dy)/2 stays below eps.
std::vector<double> tensor_lines(double lo, double hi, double eps) {
    static constexpr double kCycle[3] = {0.9, 1.3, 0.7};
    std::vector<double> lines{lo};
    int k = 0;
    while (lines.back() < hi) {
        lines.push_back(lines.back() + kCycle[k % 3] * eps);
        ++k;
    }
    return lines;
}

}  // namespace

OrthodiagonalMap build_experiment_mesh(const ExperimentSpec& spec, double eps) {
    if (spec.generator == GeneratorKind::Square) return generate_square(spec.domain, eps);
    Vec2 lo, hi;
    if (spec.domain.kind == DomainDescriptor::Kind::Disk) {
        lo = Vec2{spec.domain.center.x - spec.domain.radius,
                  spec.domain.center.y - spec.domain.radius};
        hi = Vec2{spec.domain.center.x + spec.domain.radius,
                  spec.domain.center.y + spec.domain.radius};
    } else {
        lo = spec.domain.lo;
        hi = spec.domain.hi;
    }
    return generate_rect_nonuniform(spec.domain, tensor_lines(lo.x, hi.x, eps),
                                    tensor_lines(lo.y, hi.y, eps), eps);
}

namespace {

OrthodiagonalMap generate_mesh(const ExperimentSpec& spec, double eps) {
    return build_experiment_mesh(spec, eps);
}

struct OracleBundle {
    std::function<double(Vec2)> boundary_g;  // Dirichlet data, any point
    std::function<double(Vec2)> continuum_h; // exact solution (oracle)
    double data_alpha = 1.0;                 // regularity used for guide lines
    std::string name;
};

// Builds the boundary data and its continuum solution.  Polynomials are
// exact on any domain; Hoelder data has an oracle only on the unit disk.
OracleBundle make_oracle(const ExperimentSpec& spec) {
    OracleBundle out;
    if (spec.boundary.kind == BoundaryDescriptor::Kind::Polynomial) {
        const HarmonicOracle oracle = harmonic_polynomial(spec.boundary.degree, spec.boundary.part);
        out.boundary_g = oracle.value;
        out.continuum_h = oracle.value;
        out.data_alpha = 1.0;
        out.name = oracle.name;
        return out;
    }
    const bool unit_disk = spec.domain.kind == DomainDescriptor::Kind::Disk &&
                           spec.domain.center.norm() == 0.0 && spec.domain.radius == 1.0;
    require(unit_disk, "OracleUnavailable",
            "Hoelder boundary data has a continuum oracle only on the unit disk; domain is " +
                spec.domain.describe());
    const HolderData data = holder_distance_data(spec.boundary.anchor, spec.boundary.alpha);
    const HarmonicOracle oracle = holder_oracle(data, spec.tol);
    out.boundary_g = data.g;
    // Mesh vertices can sit exactly on the unit circle, where the kernel
    // integral is undefined but the extension continuously equals the data.
    out.continuum_h = [data, oracle](Vec2 p) {
        if (p.norm() >= 1.0 - 1e-6) return data.g(p);
        return oracle.value(p);
    };
    out.data_alpha = data.alpha;
    out.name = oracle.name;
    return out;
}

// Used by probes that only need Dirichlet data, not a continuum oracle.
std::function<double(Vec2)> boundary_data_only(const ExperimentSpec& spec) {
    if (spec.boundary.kind == BoundaryDescriptor::Kind::Polynomial)
        return harmonic_polynomial(spec.boundary.degree, spec.boundary.part).value;
    return holder_distance_data(spec.boundary.anchor, spec.boundary.alpha).g;
}

}  // namespace

ConvergenceResult run_convergence(const ExperimentSpec& spec) {
    validate_spec(spec);
    require(!spec.eps_list.empty(), "DomainError", "a convergence sweep needs an eps list");
    const OracleBundle oracle = make_oracle(spec);

    ConvergenceResult out;
    for (double eps : spec.eps_list) {
        try {
            const auto t0 = std::chrono::steady_clock::now();
            const OrthodiagonalMap map = generate_mesh(spec, eps);
            const WeightedNetwork net = build_network(map, Side::Primal);
            SolveStats stats;
            const DiscreteField solved =
                solve_dirichlet(net, boundary_values_from(net, oracle.boundary_g), {}, &stats);

            SweepRecord rec;
            rec.eps = eps;
            rec.solver_iterations = stats.iterations;
            for (const Vertex& v : map.vertices) {
                if (v.kind != VertexKind::Primal) continue;
                const double err = std::abs(solved.value_at(v.id) - oracle.continuum_h(v.pos));
                rec.point_errors.push_back(err);
                rec.max_err = std::max(rec.max_err, err);
                if (spec.domain.boundary_distance(v.pos) < 4.0 * eps) {
                    rec.boundary_err = std::max(rec.boundary_err, err);
                } else {
                    rec.bulk_err = std::max(rec.bulk_err, err);
                }
            }
            rec.vertex_count = static_cast<int>(rec.point_errors.size());
            rec.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            out.records.push_back(std::move(rec));
        } catch (const Error& e) {
            fail(e.code(), "at eps = " + fmt_g12(eps) + ": " + e.what());
        }
    }

    const bool at_floor = std::all_of(out.records.begin(), out.records.end(),
                                      [](const SweepRecord& r) { return r.max_err <= kSolverFloor; });
    if (out.records.size() < 3) {
        out.fit_note = "too few sweep points for a slope fit";
    } else if (at_floor) {
        out.fit_note = "errors at solver floor";
    } else {
        std::vector<double> xs, ys;
        for (const SweepRecord& r : out.records) {
            if (r.bulk_err > 0.0) {
                xs.push_back(r.eps);
                ys.push_back(r.bulk_err);
            }
        }
        if (xs.size() < 3) {
            out.fit_note = "too few positive bulk errors for a slope fit";
        } else {
            try {
                out.fit = fit_rate_points(xs, ys);
                out.fit_note = "fitted on bulk errors";
            } catch (const Error& e) {
                out.fit_note = e.code() == "DegenerateFit" ? "degenerate fit: all errors equal"
                                                          : std::string(e.what());
            }
        }
    }
    return out;
}

std::string to_string(ProbeStatus status) {
    switch (status) {
        case ProbeStatus::Pass: return "pass";
        case ProbeStatus::Recorded: return "recorded";
        case ProbeStatus::Finding: return "finding";
        case ProbeStatus::Error: return "error";
    }
    return "unknown";
}

namespace {

std::string csv_row(const std::vector<std::string>& cells) { return join(cells, ",") + "\n"; }

// ---------------------------------------------------------------- walkcheck

ProbeReport probe_walkcheck(const ExperimentSpec& spec) {
    ProbeReport rep;
    rep.probe = "walkcheck";
    rep.csv_name = "probe_walkcheck.csv";
    require(!spec.eps_list.empty(), "DomainError", "walkcheck needs at least one eps");
    const double eps = spec.eps_list.front();
    const auto g = boundary_data_only(spec);

    const OrthodiagonalMap map = generate_mesh(spec, eps);
    const WeightedNetwork net = build_network(map, Side::Primal);
    const WalkEngine engine(net);
    const DiscreteField solved = solve_dirichlet(net, boundary_values_from(net, g));
    require(!net.interior.empty(), "MeshTooCoarse", "no interior vertices at eps " + fmt_g12(eps));

    // Deterministic distinct interior starts.
    SplitMix64 rng(trial_seed(spec.seed, 7001));
    std::vector<int> starts;
    while (starts.size() < 5 && starts.size() < net.interior.size()) {
        const int cand = net.interior[static_cast<std::size_t>(
            rng.next() % static_cast<std::uint64_t>(net.interior.size()))];
        if (std::find(starts.begin(), starts.end(), cand) == starts.end()) starts.push_back(cand);
    }

    std::string csv = "check,start_x,start_y,reference,estimate,std_err,n,ok\n";
    bool all_ok = true;
    int ordinal = 0;
    for (int start : starts) {
        WalkConfig cfg;
        cfg.seed = trial_seed(spec.seed, 100 + ordinal);
        cfg.trials = spec.trials;
        const Vec2 pos = net.positions[static_cast<std::size_t>(start)];
        const EstimateWithError est = walk_estimate(
            engine, start, [&](int idx) { return g(net.positions[static_cast<std::size_t>(idx)]); },
            cfg);
        const double reference = solved.value_at(net.ids[static_cast<std::size_t>(start)]);
        const bool ok = (est.std_err > 0.0) ? std::abs(est.mean - reference) <= 4.0 * est.std_err
                                            : std::abs(est.mean - reference) <= 1e-12;
        all_ok = all_ok && ok;
        csv += csv_row({"dirichlet", fmt_g17(pos.x), fmt_g17(pos.y), fmt_g17(reference),
                        fmt_g17(est.mean), fmt_g17(est.std_err), std::to_string(est.n),
                        ok ? "1" : "0"});
        ++ordinal;
    }

    // Coordinate martingale: the expected absorption x-coordinate is the
    // start's x-coordinate.
    {
        WalkConfig cfg;
        cfg.seed = trial_seed(spec.seed, 99);
        cfg.trials = spec.trials;
        const int start = starts.front();
        const Vec2 pos = net.positions[static_cast<std::size_t>(start)];
        const EstimateWithError est = walk_estimate(
            engine, start,
            [&](int idx) { return net.positions[static_cast<std::size_t>(idx)].x; }, cfg);
        const bool ok = std::abs(est.mean - pos.x) <= 3.0 * est.std_err;
        all_ok = all_ok && ok;
        csv += csv_row({"martingale", fmt_g17(pos.x), fmt_g17(pos.y), fmt_g17(pos.x),
                        fmt_g17(est.mean), fmt_g17(est.std_err), std::to_string(est.n),
                        ok ? "1" : "0"});
    }

    rep.csv = csv;
    rep.status = all_ok ? ProbeStatus::Pass : ProbeStatus::Finding;
    rep.note = all_ok ? "solver-vs-walk and martingale checks within noise"
                      : "solver-vs-walk deviation beyond the noise band";
    return rep;
}

// ----------------------------------------------------------------- beurling

ProbeReport probe_beurling(const ExperimentSpec& spec) {
    ProbeReport rep;
    rep.probe = "beurling";
    rep.csv_name = "probe_beurling.csv";
    require(spec.domain.kind == DomainDescriptor::Kind::Disk, "DomainError",
            "the escape-tail probe runs on disk domains");
    require(!spec.eps_list.empty(), "DomainError", "the escape-tail probe needs an eps");
    const double eps = spec.eps_list.front();
    const double a = eps / 2.0;
    const double R = spec.domain.radius;
    const Vec2 c = spec.domain.center;

    OrthodiagonalMap map = generate_mesh(spec, eps);
    // Absorbing slit along the radius from (R/2, 0) to (R, 0).
    const Vec2 tip{c.x + R / 2.0, c.y};
    const Vec2 rim{c.x + R, c.y};
    std::vector<int> slit;
    for (const Vertex& v : map.vertices)
        if (v.kind == VertexKind::Primal && dist_point_segment(v.pos, tip, rim) <= 0.5 * a)
            slit.push_back(v.id);
    require(slit.size() >= 3, "MeshTooCoarse", "the slit captured fewer than 3 vertices");
    map = with_absorbing_vertices(map, slit);

    const WeightedNetwork net = build_network(map, Side::Primal);
    const WalkEngine engine(net);
    const int start_id = nearest_primal_vertex(map, {tip.x - 8.0 * a, tip.y});
    const int start = net.net_index[static_cast<std::size_t>(start_id)];
    require(start >= 0 && !net.absorbing[static_cast<std::size_t>(start)], "MeshTooCoarse",
            "the walk start landed on an absorbing vertex");

    // Radii log-spaced between 4 eps and R/4.
    std::vector<double> radii;
    const double r_lo = 4.0 * eps;
    const double r_hi = R / 4.0;
    require(r_hi > r_lo, "DomainError", "eps too large for the radius window");
    for (int k = 0; k < 6; ++k)
        radii.push_back(r_lo * std::pow(r_hi / r_lo, static_cast<double>(k) / 5.0));

    WalkConfig cfg;
    cfg.seed = trial_seed(spec.seed, 101);
    cfg.trials = spec.trials;
    const BeurlingResult res = beurling_probe(engine, start, tip, radii, cfg);

    std::string csv = "r,p_hat,std_err,n\n";
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < res.fit_radii.size(); ++k) {
        const EstimateWithError& e = res.estimates[k];
        csv += csv_row({fmt_g17(res.fit_radii[k]), fmt_g17(e.mean), fmt_g17(e.std_err),
                        std::to_string(e.n)});
        if (e.mean > 0.0) {
            xs.push_back(res.fit_radii[k]);
            ys.push_back(e.mean);
        }
    }
    rep.csv = csv;
    for (std::size_t i = 0; i < xs.size(); ++i) rep.plot_points.emplace_back(xs[i], ys[i]);
    if (xs.size() >= 3) rep.fit = fit_rate_points(xs, ys);

    bool monotone = true;
    for (std::size_t k = 1; k < res.exceedances.size(); ++k)
        monotone = monotone && res.exceedances[k] <= res.exceedances[k - 1];
    const bool significant = res.beta_hat > 1.96 * res.beta_se;
    rep.status = (monotone && significant) ? ProbeStatus::Pass : ProbeStatus::Finding;
    rep.note = "beta_hat = " + fmt_g12(res.beta_hat) + " +/- " + fmt_g12(res.beta_se) +
               (monotone ? "; tail monotone" : "; tail NOT monotone");

    SweepRecord row;
    row.eps = eps;
    row.max_err = res.beta_hat;
    row.vertex_count = net.size();
    rep.records.push_back(row);
    return rep;
}

// --------------------------------------------------------------- property_s

ProbeReport probe_property_s(const ExperimentSpec& spec) {
    ProbeReport rep;
    rep.probe = "property_s";
    rep.csv_name = "probe_property_s.csv";
    require(!spec.eps_list.empty(), "DomainError", "the exit-quadrant probe needs an eps");
    const double eps = spec.eps_list.front();
    const OrthodiagonalMap map = generate_mesh(spec, eps);
    const WeightedNetwork net = build_network(map, Side::Primal);
    const WalkEngine engine(net);

    const Vec2 center = (spec.domain.kind == DomainDescriptor::Kind::Disk)
                            ? spec.domain.center
                            : Vec2{(spec.domain.lo.x + spec.domain.hi.x) / 2.0,
                                   (spec.domain.lo.y + spec.domain.hi.y) / 2.0};
    const int center_id = nearest_primal_vertex(map, center);
    // As large as the mesh-resolution floor demands, as big as an eighth of
    // the domain, but always clear of the meshed boundary.
    const double cap = map.boundary_distance(map.pos(center_id)) - 2.0 * eps;
    const double radius = std::min(cap, std::max(spec.domain.diameter() / 8.0, 4.0 * eps));

    WalkConfig cfg;
    cfg.seed = trial_seed(spec.seed, 202);
    cfg.trials = spec.trials;
    const QuadrantExitResult res = property_s_probe(map, engine, center_id, radius, cfg);

    std::string csv = "quadrant,count,p_hat,std_err,n\n";
    bool ok = true;
    for (int q = 0; q < 4; ++q) {
        csv += csv_row({std::to_string(q), std::to_string(res.counts[static_cast<std::size_t>(q)]),
                        fmt_g17(res.probs[static_cast<std::size_t>(q)]), fmt_g17(res.std_err),
                        std::to_string(res.trials)});
        ok = ok && std::abs(res.probs[static_cast<std::size_t>(q)] - 0.25) <= 4.0 * res.std_err;
    }
    rep.csv = csv;
    rep.status = ok ? ProbeStatus::Pass : ProbeStatus::Finding;
    rep.note = ok ? "exit quadrants balanced within 4 standard errors"
                  : "exit-quadrant imbalance beyond 4 standard errors";
    return rep;
}

// ------------------------------------------------------------------ annulus

ProbeReport probe_annulus(const ExperimentSpec& spec) {
    ProbeReport rep;
    rep.probe = "annulus";
    rep.csv_name = "probe_annulus.csv";
    require(spec.domain.kind == DomainDescriptor::Kind::Disk, "DomainError",
            "the annulus-crossing probe runs on disk domains");
    require(!spec.eps_list.empty(), "DomainError", "the annulus-crossing probe needs an eps");
    const double eps = spec.eps_list.front();
    const double R = spec.domain.radius;
    const Vec2 c = spec.domain.center;
    const OrthodiagonalMap map = generate_mesh(spec, eps);
    const WeightedNetwork net = build_network(map, Side::Primal);
    const WalkEngine engine(net);
    const int center_id = nearest_primal_vertex(map, c);
    const int start = net.net_index[static_cast<std::size_t>(center_id)];
    const double r_out = R / 2.0;

    WalkConfig cfg;
    cfg.seed = trial_seed(spec.seed, 303);
    cfg.trials = spec.trials;

    // Without a barrier every walk reaches r_out before the rim absorbs it.
    const EstimateWithError open_case = annulus_crossing_probe(engine, start, c, r_out, cfg);

    // A closed absorbing ring strictly inside r_out blocks every crossing.
    std::vector<int> ring;
    for (const Vertex& v : map.vertices)
        if (v.kind == VertexKind::Primal && dist(v.pos, c) > 0.3 * R && dist(v.pos, c) < 0.42 * R)
            ring.push_back(v.id);
    const OrthodiagonalMap blocked_map = with_absorbing_vertices(map, ring);
    const WeightedNetwork blocked_net = build_network(blocked_map, Side::Primal);
    const WalkEngine blocked_engine(blocked_net);
    const int blocked_start = blocked_net.net_index[static_cast<std::size_t>(center_id)];
    const EstimateWithError blocked_case =
        annulus_crossing_probe(blocked_engine, blocked_start, c, r_out, cfg);

    std::string csv = "case,r_out,p_hat,std_err,n\n";
    csv += csv_row({"open", fmt_g17(r_out), fmt_g17(open_case.mean), fmt_g17(open_case.std_err),
                    std::to_string(open_case.n)});
    csv += csv_row({"blocked", fmt_g17(r_out), fmt_g17(blocked_case.mean),
                    fmt_g17(blocked_case.std_err), std::to_string(blocked_case.n)});
    rep.csv = csv;
    const bool ok = open_case.mean == 1.0 && blocked_case.mean == 0.0;
    rep.status = ok ? ProbeStatus::Pass : ProbeStatus::Finding;
    rep.note = ok ? "crossing certain without a barrier, impossible through a closed ring"
                  : "annulus-crossing probabilities off their exact values";
    return rep;
}

// ------------------------------------------------------------------- prop41

ProbeReport probe_prop41(const ExperimentSpec& spec) {
    ProbeReport rep;
    rep.probe = "prop41";
    rep.csv_name = "probe_prop41.csv";
    require(spec.eps_list.size() >= 3, "DomainError",
            "the window-residual probe needs at least 3 eps values for its fit");
    const double side = 0.5;

    std::string csv = "eps,vertex_count,discrete_sum,integral,residual\n";
    std::vector<double> xs, ys;
    for (double eps : spec.eps_list) {
        const OrthodiagonalMap map = generate_mesh(spec, eps);
        // Snap the window center to a lattice vertex: centering between
        // lattice columns makes the row counts exactly cancel and the
        // residual collapse to zero, which carries no rate information.
        const Vec2 center = map.pos(nearest_primal_vertex(map, spec.domain.kind ==
                                                                   DomainDescriptor::Kind::Disk
                                                               ? spec.domain.center
                                                               : Vec2{0.0, 0.0}));
        const LaplacianResidual res =
            averaged_laplacian_residual(map, quadratic_radial(), center, side);
        csv += csv_row({fmt_g17(eps), std::to_string(res.vertex_count), fmt_g17(res.discrete_sum),
                        fmt_g17(res.integral), fmt_g17(res.residual)});
        if (res.residual > 0.0) {
            xs.push_back(eps);
            ys.push_back(res.residual);
        }
        SweepRecord row;
        row.eps = eps;
        row.max_err = res.residual;
        row.bulk_err = res.residual;
        row.vertex_count = res.vertex_count;
        rep.records.push_back(row);
    }
    rep.csv = csv;
    for (std::size_t i = 0; i < xs.size(); ++i) rep.plot_points.emplace_back(xs[i], ys[i]);
    require(xs.size() >= 3, "DegenerateFit",
            "window residuals vanished; no rate information at these eps");
    rep.fit = fit_rate_points(xs, ys);
    const bool ok = rep.fit->slope >= 0.7 && rep.fit->slope <= 1.3;
    rep.status = ok ? ProbeStatus::Pass : ProbeStatus::Finding;
    rep.note = "residual slope = " + fmt_g12(rep.fit->slope) + " over " +
               std::to_string(xs.size()) + " mesh sizes";
    return rep;
}

// ------------------------------------------------------------------- prop42

ProbeReport probe_prop42(const ExperimentSpec& spec) {
    ProbeReport rep;
    rep.probe = "prop42";
    rep.csv_name = "probe_prop42.csv";
    require(spec.eps_list.size() >= 3, "DomainError",
            "the mollified-Laplacian probe needs at least 3 eps values");
    const double delta = 0.2;
    const double scale = spec.domain.kind == DomainDescriptor::Kind::Disk ? spec.domain.radius : 1.0;
    const Vec2 c = spec.domain.kind == DomainDescriptor::Kind::Disk ? spec.domain.center
                                                                    : Vec2{0.0, 0.0};
    const std::vector<Vec2> points{
        {c.x, c.y},
        {c.x + 0.3 * scale, c.y},
        {c.x - 0.3 * scale, c.y},
        {c.x, c.y + 0.3 * scale},
        {c.x, c.y - 0.3 * scale},
    };
    const auto g = boundary_data_only(spec);
    const Mollifier bump = make_mollifier(delta);
    // Pitch delta/64: the convolved Laplacian is converged in the quadrature
    // there, so the recorded decay tracks the mesh, not the midpoint rule.
    const double step = bump.delta / 64.0;

    std::string csv = "eps,delta,d,point_x,point_y,lap_value,quad_err\n";
    std::vector<double> xs, ys;
    for (double eps : spec.eps_list) {
        const OrthodiagonalMap map = generate_mesh(spec, eps);
        const WeightedNetwork net = build_network(map, Side::Primal);
        const DiscreteField solved = solve_dirichlet(net, boundary_values_from(net, g));
        const ExtendedField ext(map, solved);
        const double quad_err = quadrature_error_bound(bump, step, ext.sup_norm());
        double max_lap = 0.0;
        for (const Vec2& p : points) {
            const double lap = convolved_laplacian(ext, bump, p, step);
            max_lap = std::max(max_lap, std::abs(lap));
            csv += csv_row({fmt_g17(eps), fmt_g17(delta),
                            fmt_g17(spec.domain.boundary_distance(p)), fmt_g17(p.x), fmt_g17(p.y),
                            fmt_g17(lap), fmt_g17(quad_err)});
        }
        if (max_lap > 0.0) {
            xs.push_back(eps);
            ys.push_back(max_lap);
        }
        SweepRecord row;
        row.eps = eps;
        row.max_err = max_lap;
        row.bulk_err = max_lap;
        row.vertex_count = net.size();
        rep.records.push_back(row);
    }
    rep.csv = csv;
    for (std::size_t i = 0; i < xs.size(); ++i) rep.plot_points.emplace_back(xs[i], ys[i]);

    bool monotone = true;
    for (std::size_t i = 1; i < rep.records.size(); ++i)
        monotone = monotone && rep.records[i].max_err <= 1.1 * rep.records[i - 1].max_err;
    require(xs.size() >= 3, "DegenerateFit", "mollified Laplacians vanished; nothing to fit");
    rep.fit = fit_rate_points(xs, ys);
    const bool ok = monotone && rep.fit->slope >= 0.25;
    rep.status = ok ? ProbeStatus::Pass : ProbeStatus::Finding;
    rep.note = "max |mollified Laplacian| slope = " + fmt_g12(rep.fit->slope) +
               (monotone ? "; decay monotone within 10%" : "; decay NOT monotone within 10%");
    return rep;
}

// ------------------------------------------------------------------ harnack

ProbeReport probe_harnack(const ExperimentSpec& spec) {
    ProbeReport rep;
    rep.probe = "harnack";
    rep.csv_name = "probe_harnack.csv";
    require(!spec.eps_list.empty(), "DomainError", "the difference-bound probe needs an eps");
    const double eps = spec.eps_list.front();
    const double delta = 0.2;
    const double c0 = 16.0;
    const int n_pairs = 100;

    const auto g = boundary_data_only(spec);
    const OrthodiagonalMap map = generate_mesh(spec, eps);
    const WeightedNetwork net = build_network(map, Side::Primal);
    const DiscreteField solved = solve_dirichlet(net, boundary_values_from(net, g));
    const ExtendedField ext(map, solved);
    const Mollifier bump = make_mollifier(delta);

    // Random bulk pairs: both points at domain distance >= diam/4, which keeps
    // the mollifier support well inside the meshed region.
    const double d_min = spec.domain.diameter() / 4.0;
    SplitMix64 rng(trial_seed(spec.seed, 404));
    const Vec2 c = spec.domain.kind == DomainDescriptor::Kind::Disk ? spec.domain.center
                                                                    : Vec2{0.0, 0.0};
    auto draw_bulk = [&]() {
        for (;;) {
            const double r = 0.5 * spec.domain.diameter() * std::sqrt(rng.uniform());
            const double t = 2.0 * std::numbers::pi * rng.uniform();
            const Vec2 p{c.x + r * std::cos(t), c.y + r * std::sin(t)};
            if (spec.domain.contains(p) && spec.domain.boundary_distance(p) >= d_min) return p;
        }
    };
    std::vector<std::pair<Vec2, Vec2>> pairs;
    pairs.reserve(static_cast<std::size_t>(n_pairs));
    for (int i = 0; i < n_pairs; ++i) pairs.emplace_back(draw_bulk(), draw_bulk());

    // Measured sup of the mollified Laplacian over all sampled points serves
    // as the field's Laplacian bound.
    double lap_sup = 0.0;
    for (const auto& [x1, x2] : pairs) {
        lap_sup = std::max(lap_sup, std::abs(convolved_laplacian(ext, bump, x1)));
        lap_sup = std::max(lap_sup, std::abs(convolved_laplacian(ext, bump, x2)));
    }

    SampledField field;
    field.h = [&](Vec2 p) { return convolve_value(ext, bump, p); };
    field.sup_norm = ext.sup_norm();
    field.laplacian_bound = lap_sup;
    field.boundary_distance = [&](Vec2 p) { return spec.domain.boundary_distance(p); };

    std::string csv = "pair,x1_x,x1_y,x2_x,x2_y,d,lhs,rhs,ok\n";
    int ok_count = 0;
    for (int i = 0; i < n_pairs; ++i) {
        const auto& [x1, x2] = pairs[static_cast<std::size_t>(i)];
        const double d = std::min(spec.domain.boundary_distance(x1),
                                  spec.domain.boundary_distance(x2));
        const HarnackCheck check = harnack_bound_check(field, x1, x2, d, c0);
        ok_count += check.ok ? 1 : 0;
        csv += csv_row({std::to_string(i), fmt_g17(x1.x), fmt_g17(x1.y), fmt_g17(x2.x),
                        fmt_g17(x2.y), fmt_g17(d), fmt_g17(check.lhs), fmt_g17(check.rhs),
                        check.ok ? "1" : "0"});
    }
    rep.csv = csv;
    const bool all_ok = ok_count == n_pairs;
    rep.status = all_ok ? ProbeStatus::Pass : ProbeStatus::Finding;
    rep.note = "fraction_ok = " + fmt_g12(static_cast<double>(ok_count) / n_pairs) + " (" +
               std::to_string(ok_count) + "/" + std::to_string(n_pairs) +
               "), C0 = " + fmt_g12(c0) + ", measured |lap| sup = " + fmt_g12(lap_sup);
    return rep;
}

// ---------------------------------------------------------------- exponents

ProbeReport probe_exponents(const ExperimentSpec& spec) {
    (void)spec;
    ProbeReport rep;
    rep.probe = "exponents";
    rep.csv_name = "probe_exponents.csv";
    const std::vector<double> alphas{0.1, 0.3, 0.5, 0.7, 0.9};
    const std::vector<double> betas{0.1, 0.2, 0.3, 0.4};
    rep.csv = exponent_table_csv(alphas, betas);

    // The closed-form lower bound is proved for alpha < beta <= 1/2 only;
    // outside that wedge lambda saturates in alpha and the bound keeps growing.
    bool ok = true;
    for (double alpha : alphas)
        for (double beta : betas) {
            if (!(alpha < beta && beta <= 0.5)) continue;
            const RateResult res = lambda_rate(alpha, beta);
            ok = ok && res.lambda >= alpha * beta / (8.0 + 12.0 * beta);
        }
    rep.status = ok ? ProbeStatus::Pass : ProbeStatus::Finding;
    rep.note = ok ? "lambda >= alpha*beta/(8+12*beta) on the alpha < beta wedge"
                  : "lambda lower bound violated on the alpha < beta wedge";
    return rep;
}

using ProbeFn = ProbeReport (*)(const ExperimentSpec&);

}  // namespace

int BatteryResult::exit_code() const {
    bool finding = false;
    for (const ProbeReport& p : probes) {
        if (p.status == ProbeStatus::Error) return 1;
        finding = finding || p.status == ProbeStatus::Finding;
    }
    return finding ? 2 : 0;
}

BatteryResult run_probe_battery(const ExperimentSpec& spec) {
    validate_spec(spec);
    require(spec.kind != ExperimentKind::Converge, "DomainError",
            "convergence sweeps run through run_convergence, not the probe battery");

    std::vector<std::pair<std::string, ProbeFn>> plan;
    plan.emplace_back("walkcheck", &probe_walkcheck);
    switch (spec.kind) {
        case ExperimentKind::Beurling:
            plan.emplace_back("beurling", &probe_beurling);
            plan.emplace_back("property_s", &probe_property_s);
            plan.emplace_back("annulus", &probe_annulus);
            break;
        case ExperimentKind::Prop41: plan.emplace_back("prop41", &probe_prop41); break;
        case ExperimentKind::Prop42: plan.emplace_back("prop42", &probe_prop42); break;
        case ExperimentKind::Harnack: plan.emplace_back("harnack", &probe_harnack); break;
        case ExperimentKind::Exponents: plan.emplace_back("exponents", &probe_exponents); break;
        case ExperimentKind::WalkCheck:
        case ExperimentKind::Converge: break;
    }

    BatteryResult out;
    for (const auto& [name, fn] : plan) {
        try {
            out.probes.push_back(fn(spec));
        } catch (const Error& e) {
            ProbeReport rep;
            rep.probe = name;
            rep.status = ProbeStatus::Error;
            rep.note = e.what();
            out.probes.push_back(std::move(rep));
        } catch (const std::exception& e) {
            ProbeReport rep;
            rep.probe = name;
            rep.status = ProbeStatus::Error;
            rep.note = e.what();
            out.probes.push_back(std::move(rep));
        }
    }
    return out;
}

std::string exponent_table_csv(const std::vector<double>& alphas,
                               const std::vector<double>& betas, int grid_n) {
    std::string csv = "alpha,beta,lambda,theta,bootstrap_limit\n";
    for (double alpha : alphas)
        for (double beta : betas) {
            const RateResult lam = lambda_rate(alpha, beta, grid_n);
            const ThetaResult th = theta(alpha, beta);
            const BootstrapResult boot = bootstrap(beta, 1);
            csv += csv_row({fmt_g17(alpha), fmt_g17(beta), fmt_g17(lam.lambda),
                            fmt_g17(th.value), fmt_g17(boot.limit)});
        }
    return csv;
}

namespace {

std::string protocol_notes(const ExperimentSpec& spec) {
    std::string s;
    s += "spec: " + spec.describe() + "\n";
    s += "protocol: error sup taken over all primal vertices; near-boundary band is domain distance < 4*eps\n";
    s += "protocol: domain diameter computed analytically from the descriptor\n";
    s += "protocol: linear solver tolerance fixed at 1e-10 (scaled residual); spec tol drives the continuum oracle\n";
    return s;
}

}  // namespace

ReportInputs report_inputs(const ConvergenceResult& result, const ExperimentSpec& spec) {
    ReportInputs in;
    for (const SweepRecord& r : result.records) {
        in.records.push_back({"converge", r.eps, r.max_err, r.bulk_err, r.boundary_err,
                              r.vertex_count, r.solver_iterations});
    }
    ReportInputs::FitRow fit_row;
    fit_row.probe = "converge";
    fit_row.fit = result.fit;
    fit_row.status = result.fit ? "fitted" : result.fit_note;
    in.fits.push_back(fit_row);

    ReportInputs::PlotSeries plot;
    plot.probe = "converge";
    plot.x_label = "eps";
    plot.y_label = "bulk max error";
    for (const SweepRecord& r : result.records)
        if (r.bulk_err > 0.0) plot.points.emplace_back(r.eps, r.bulk_err);
    plot.fit = result.fit;
    const double alpha = spec.boundary.kind == BoundaryDescriptor::Kind::Holder
                             ? spec.boundary.alpha
                             : 1.0;
    const RateResult guide = lambda_rate(alpha, spec.guide_beta, 512);
    plot.guide_slope = guide.lambda;
    plot.guide_label = "guide slope lambda(alpha=" + fmt_g12(alpha) + ", beta=" +
                       fmt_g12(spec.guide_beta) + ") = " + fmt_g12(guide.lambda) +
                       " (beta configurable)";
    if (!plot.points.empty()) in.plots.push_back(std::move(plot));

    for (const std::string& line : split(protocol_notes(spec), '\n'))
        if (!line.empty()) in.metadata.push_back(line);
    if (!result.fit) in.metadata.push_back("converge fit skipped: " + result.fit_note);
    return in;
}

ReportInputs report_inputs(const BatteryResult& result, const ExperimentSpec& spec) {
    ReportInputs in;
    for (const ProbeReport& p : result.probes) {
        for (const SweepRecord& r : p.records)
            in.records.push_back({p.probe, r.eps, r.max_err, r.bulk_err, r.boundary_err,
                                  r.vertex_count, r.solver_iterations});
        ReportInputs::FitRow fit_row;
        fit_row.probe = p.probe;
        fit_row.fit = p.fit;
        fit_row.status = p.fit ? to_string(p.status) : "no fit (" + to_string(p.status) + ")";
        in.fits.push_back(fit_row);
        if (!p.csv.empty()) in.extras.push_back({p.csv_name, p.csv});
        if (!p.plot_points.empty()) {
            ReportInputs::PlotSeries plot;
            plot.probe = p.probe;
            plot.x_label = p.probe == "beurling" ? "r" : "eps";
            plot.y_label = p.probe == "beurling" ? "tail probability" : "statistic";
            plot.points = p.plot_points;
            plot.fit = p.fit;
            in.plots.push_back(std::move(plot));
        }
    }
    for (const std::string& line : split(protocol_notes(spec), '\n'))
        if (!line.empty()) in.metadata.push_back(line);
    for (const ProbeReport& p : result.probes)
        in.metadata.push_back("probe " + p.probe + ": " + to_string(p.status) +
                              (p.note.empty() ? "" : " - " + p.note));
    if (spec.kind == ExperimentKind::Prop42) {
        // Record the bump's higher radial-derivative sups (sampled), since the
        // decay constant in the mollified-Laplacian bound scales with them.
        const Mollifier bump = make_mollifier(0.2);
        double sup2 = 0.0, sup3 = 0.0;
        const int n = 4096;
        const double h = bump.delta / n;
        auto radial = [&](double r) { return bump.value({r, 0.0}); };
        for (int i = 1; i < n - 2; ++i) {
            const double r = i * h;
            const double d2 = (radial(r + h) - 2.0 * radial(r) + radial(r - h)) / (h * h);
            const double d3 =
                (radial(r + 2 * h) - 2.0 * radial(r + h) + 2.0 * radial(r - h) -
                 radial(r - 2 * h)) /
                (2.0 * h * h * h);
            sup2 = std::max(sup2, std::abs(d2));
            sup3 = std::max(sup3, std::abs(d3));
        }
        in.metadata.push_back("prop42 bump (delta=0.2): sampled sup|phi''| = " + fmt_g12(sup2) +
                              ", sup|phi'''| = " + fmt_g12(sup3));
    }
    return in;
}

}  // namespace ortholap
