// Command-line front end: mesh generation, Dirichlet solves, random-walk
// cross-checks, convergence sweeps, probe batteries, exponent tables, and
// report regeneration from config files.
//
// Exit codes: 0 = all checked invariants passed, 2 = findings were logged,
// 1 = hard error (bad input, I/O failure, numerical failure).

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ortholap/errors.hpp"
#include "ortholap/format.hpp"
#include "ortholap/harness.hpp"
#include "ortholap/map.hpp"
#include "ortholap/network.hpp"

namespace {

using namespace ortholap;

// Options shared by the experiment-driving subcommands.  They are folded
// into config-file syntax and parsed by the same code path as --config, so
// flags and files can never drift apart.
struct SpecFlags {
    std::string config;
    std::string domain;
    std::string gen;
    std::string eps;
    std::string g;
    std::string seed;
    std::string trials;
    std::string tol;
    std::string guide_beta;
    std::string out;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f, bool with_config = true) {
    if (with_config)
        cmd->add_option("--config", f.config, "config file; explicit flags override its keys");
    cmd->add_option("--domain", f.domain, "domain: disk:R or rect:w,h (default disk:1)");
    cmd->add_option("--gen", f.gen, "mesh generator: square or rectnu");
    cmd->add_option("--eps", f.eps, "comma-separated mesh sizes, strictly decreasing");
    cmd->add_option("--g", f.g, "boundary data: poly:k:re|im or holder:alpha:x,y");
    cmd->add_option("--seed", f.seed, "base RNG seed (default 1)");
    cmd->add_option("--trials", f.trials, "Monte Carlo walks per estimate (default 10000)");
    cmd->add_option("--tol", f.tol, "oracle / quadrature tolerance (default 1e-8)");
    cmd->add_option("--guide-beta", f.guide_beta, "escape exponent for plot guide lines");
    cmd->add_option("--out", f.out, "output directory for the emitted report");
}

// Folds the flags into `key = value` lines appended after any config file
// content; the parser applies keys in order, so flags win.
ExperimentSpec spec_from(const SpecFlags& f, const std::string& forced_kind = "") {
    std::string text;
    if (!f.config.empty()) text = read_text_file(f.config) + "\n";
    if (!forced_kind.empty()) text += "kind = " + forced_kind + "\n";
    if (!f.domain.empty()) text += "domain = " + f.domain + "\n";
    if (!f.gen.empty()) text += "gen = " + f.gen + "\n";
    if (!f.eps.empty()) text += "eps = " + f.eps + "\n";
    if (!f.g.empty()) text += "g = " + f.g + "\n";
    if (!f.seed.empty()) text += "seed = " + f.seed + "\n";
    if (!f.trials.empty()) text += "trials = " + f.trials + "\n";
    if (!f.tol.empty()) text += "tol = " + f.tol + "\n";
    if (!f.guide_beta.empty()) text += "guide_beta = " + f.guide_beta + "\n";
    if (!f.out.empty()) text += "out = " + f.out + "\n";
    return parse_config(text);
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::string cur;
    auto push = [&] {
        require(!cur.empty(), "FormatError", what + ": empty entry in '" + text + "'");
        try {
            out.push_back(std::stod(cur));
        } catch (const std::exception&) {
            fail("FormatError", what + ": cannot parse '" + cur + "'");
        }
        cur.clear();
    };
    for (char c : text) {
        if (c == ',') {
            push();
        } else if (c != ' ') {
            cur.push_back(c);
        }
    }
    push();
    return out;
}

int emit_and_report(const ReportInputs& inputs, const ExperimentSpec& spec) {
    if (spec.outdir.empty()) return 0;
    const std::vector<std::string> manifest = emit_report(inputs, spec.outdir);
    std::printf("report written to %s (%zu files)\n", spec.outdir.c_str(), manifest.size());
    return 0;
}

int run_converge(const SpecFlags& flags) {
    ExperimentSpec spec = spec_from(flags, "converge");
    if (spec.eps_list.empty()) spec.eps_list = {0.125, 0.0625, 0.03125, 0.015625};
    const ConvergenceResult res = run_convergence(spec);
    std::printf("eps,max_err,bulk_err,boundary_err,n_vertices,solver_iters\n");
    for (const SweepRecord& r : res.records)
        std::printf("%s,%s,%s,%s,%d,%d\n", fmt_g12(r.eps).c_str(), fmt_g12(r.max_err).c_str(),
                    fmt_g12(r.bulk_err).c_str(), fmt_g12(r.boundary_err).c_str(), r.vertex_count,
                    r.solver_iterations);
    if (res.fit) {
        std::printf("fit: slope = %s, R2 = %s over %d points\n", fmt_g12(res.fit->slope).c_str(),
                    fmt_g12(res.fit->r2).c_str(), res.fit->n_points);
    } else {
        std::printf("fit skipped: %s\n", res.fit_note.c_str());
    }
    emit_and_report(report_inputs(res, spec), spec);
    return 0;
}

int run_battery_cmd(const SpecFlags& flags, const std::string& kind) {
    ExperimentSpec spec = spec_from(flags, kind);
    if (spec.eps_list.empty()) spec.eps_list = {0.0625};
    const BatteryResult res = run_probe_battery(spec);
    for (const ProbeReport& p : res.probes)
        std::printf("[%s] %s: %s\n", to_string(p.status).c_str(), p.probe.c_str(),
                    p.note.c_str());
    emit_and_report(report_inputs(res, spec), spec);
    return res.exit_code();
}

int run_mesh_gen(const SpecFlags& flags) {
    ExperimentSpec spec = spec_from(flags);
    if (spec.eps_list.empty()) spec.eps_list = {0.0625};
    const OrthodiagonalMap map = build_experiment_mesh(spec, spec.eps_list.front());
    const ValidationReport report = validate(map);
    int primal = 0;
    for (const Vertex& v : map.vertices)
        if (v.kind == VertexKind::Primal) ++primal;
    std::printf("mesh: %d vertices (%d primal, %d dual), %d quads, boundary cycle %zu, eps %s\n",
                map.vertex_count(), primal, map.vertex_count() - primal, map.quad_count(),
                map.boundary_cycle.size(), fmt_g12(map.mesh_eps).c_str());
    std::printf("validation: %s\n", report.ok() ? "ok" : report.summary().c_str());
    if (!spec.outdir.empty()) {
        save(map, spec.outdir);
        std::printf("mesh written to %s\n", spec.outdir.c_str());
    }
    return report.ok() ? 0 : 2;
}

int run_solve(const SpecFlags& flags) {
    ExperimentSpec spec = spec_from(flags);
    if (spec.eps_list.empty()) spec.eps_list = {0.0625};
    const OrthodiagonalMap map = build_experiment_mesh(spec, spec.eps_list.front());
    const WeightedNetwork net = build_network(map, Side::Primal);

    std::function<double(Vec2)> g;
    if (spec.boundary.kind == BoundaryDescriptor::Kind::Polynomial) {
        g = harmonic_polynomial(spec.boundary.degree, spec.boundary.part).value;
    } else {
        g = holder_distance_data(spec.boundary.anchor, spec.boundary.alpha).g;
    }
    SolveStats stats;
    const DiscreteField h = solve_dirichlet(net, boundary_values_from(net, g), {}, &stats);
    std::printf("solved %zu interior unknowns in %d iterations (max scaled residual %s%s)\n",
                net.interior.size(), stats.iterations,
                fmt_g12(stats.max_scaled_residual).c_str(),
                stats.used_dense ? ", dense fallback" : "");
    if (!spec.outdir.empty()) {
        std::string csv = "x,y,value\n";
        for (int id : net.ids) {
            const Vec2 p = map.pos(id);
            csv += fmt_g17(p.x) + "," + fmt_g17(p.y) + "," + fmt_g17(h.value_at(id)) + "\n";
        }
        write_text_file(spec.outdir, csv);
        std::printf("field written to %s (%zu vertices)\n", spec.outdir.c_str(),
                    net.ids.size());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "ortholap: discrete harmonic functions on orthodiagonal maps.\n"
        "Meshes, Dirichlet solves, random-walk probes, convergence rates."};
    app.require_subcommand(1);

    SpecFlags mesh_flags, solve_flags, walk_flags, conv_flags, probe_flags, report_flags;
    std::string probe_kind = "walkcheck";
    std::string alphas_text = "0.1,0.3,0.5,0.7,0.9";
    std::string betas_text = "0.1,0.2,0.3,0.4";
    int grid_n = 512;

    CLI::App* mesh_cmd = app.add_subcommand("mesh-gen", "generate a mesh and validate it");
    add_spec_flags(mesh_cmd, mesh_flags);

    CLI::App* solve_cmd =
        app.add_subcommand("solve", "solve the Dirichlet problem for the given boundary data");
    add_spec_flags(solve_cmd, solve_flags);

    CLI::App* walk_cmd = app.add_subcommand(
        "walk", "cross-validate the solver against the absorbed random walk");
    add_spec_flags(walk_cmd, walk_flags);

    CLI::App* conv_cmd =
        app.add_subcommand("converge", "sweep mesh sizes against a continuum oracle and fit a rate");
    add_spec_flags(conv_cmd, conv_flags);

    CLI::App* probe_cmd = app.add_subcommand("probes", "run a probe battery");
    probe_cmd
        ->add_option("--kind", probe_kind,
                     "battery: beurling, prop41, prop42, harnack, exponents, walkcheck")
        ->required();
    add_spec_flags(probe_cmd, probe_flags);

    CLI::App* rates_cmd =
        app.add_subcommand("rates", "print the exponent table (lambda, theta, bootstrap limit)");
    rates_cmd->add_option("--alphas", alphas_text, "comma-separated alpha values");
    rates_cmd->add_option("--betas", betas_text, "comma-separated beta values");
    rates_cmd->add_option("--grid-n", grid_n, "grid resolution for the min-max search");

    CLI::App* report_cmd =
        app.add_subcommand("report", "re-run the experiment in a config file and emit its report");
    report_cmd->add_option("--config", report_flags.config, "experiment config file")->required();
    report_cmd->add_option("--out", report_flags.out, "override the config's output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*mesh_cmd) return run_mesh_gen(mesh_flags);
        if (*solve_cmd) return run_solve(solve_flags);
        if (*walk_cmd) return run_battery_cmd(walk_flags, "walkcheck");
        if (*conv_cmd) return run_converge(conv_flags);
        if (*probe_cmd) return run_battery_cmd(probe_flags, probe_kind);
        if (*rates_cmd) {
            const std::vector<double> alphas = parse_list(alphas_text, "--alphas");
            const std::vector<double> betas = parse_list(betas_text, "--betas");
            std::fputs(exponent_table_csv(alphas, betas, grid_n).c_str(), stdout);
            return 0;
        }
        if (*report_cmd) {
            const ExperimentSpec spec = spec_from(report_flags);
            require(!spec.outdir.empty(), "DomainError",
                    "the report command needs an output directory (config `out` or --out)");
            if (spec.kind == ExperimentKind::Converge) return run_converge(report_flags);
            const BatteryResult res = run_probe_battery(spec);
            for (const ProbeReport& p : res.probes)
                std::printf("[%s] %s: %s\n", to_string(p.status).c_str(), p.probe.c_str(),
                            p.note.c_str());
            emit_and_report(report_inputs(res, spec), spec);
            return res.exit_code();
        }
    } catch (const ortholap::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
