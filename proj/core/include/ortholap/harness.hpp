#pragma once
// Experiment orchestration: configuration parsing, convergence sweeps, probe
// batteries, log-log rate fitting, and CSV/SVG report emission.  Every run is
// a pure function of (spec, seeds): repeated runs emit byte-identical files.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ortholap/continuum.hpp"
#include "ortholap/map.hpp"

namespace ortholap {

enum class ExperimentKind {
    Converge,
    Beurling,
    Prop41,
    Prop42,
    Harnack,
    Exponents,
    WalkCheck,
};

enum class GeneratorKind { Square, RectNonuniform };

/// Boundary-data descriptor: a harmonic polynomial part (exact oracle on any
/// domain) or Hoelder distance-power data anchored on the unit circle
/// (Poisson-quadrature oracle, disk only).
struct BoundaryDescriptor {
    enum class Kind { Polynomial, Holder };
    Kind kind = Kind::Polynomial;
    int degree = 1;                       // polynomial
    HarmonicPart part = HarmonicPart::Real;
    double alpha = 0.5;                   // holder
    Vec2 anchor{1.0, 0.0};

    std::string describe() const;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Converge;
    DomainDescriptor domain = DomainDescriptor::disk({0.0, 0.0}, 1.0);
    GeneratorKind generator = GeneratorKind::Square;
    std::vector<double> eps_list;     // strictly decreasing
    BoundaryDescriptor boundary;
    std::uint64_t seed = 1;
    long trials = 10000;
    double tol = 1e-8;                // oracle / solver tolerance
    double guide_beta = 0.1;          // escape exponent for the plot guide line
    std::string outdir;               // empty: no files emitted

    std::string describe() const;
};

/// Validates field ranges and the eps ordering (DomainError on violation).
void validate_spec(const ExperimentSpec& spec);

/// Parses the line-oriented `key = value` config format (`#` starts a
/// comment; no nesting).  Unknown keys or malformed values raise FormatError.
ExperimentSpec parse_config(const std::string& text);
ExperimentSpec load_config(const std::string& path);

/// One mesh size of a convergence sweep.
struct SweepRecord {
    double eps = 0.0;
    double max_err = 0.0;       // sup of per-point errors (all primal vertices)
    double bulk_err = 0.0;      // sup over vertices with domain distance >= 4 eps
    double boundary_err = 0.0;  // sup over the near-boundary band (< 4 eps)
    std::vector<double> point_errors;  // by primal vertex, id order
    double wall_seconds = 0.0;  // console only; never emitted
    int solver_iterations = 0;
    int vertex_count = 0;
};

/// Least-squares line over (log10 eps, log10 err).  Positive slope means the
/// error shrinks as eps does.
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;  // decimal log of the prefactor
    double r2 = 0.0;         // in [0, 1]
    int n_points = 0;
};

/// OLS on (log10 eps, log10 max_err).  Needs >= 3 records with positive
/// errors (DomainError otherwise); all-equal errors raise DegenerateFit.
RateFit fit_rate(const std::vector<SweepRecord>& records);
/// Same fit on raw (x, y) pairs; used for bulk errors and probe statistics.
RateFit fit_rate_points(const std::vector<double>& xs, const std::vector<double>& ys);

struct ConvergenceResult {
    std::vector<SweepRecord> records;
    std::optional<RateFit> fit;   // absent when skipped
    std::string fit_note;         // skip reason, e.g. "errors at solver floor"
};

/// The mesh every runner works on: the square generator directly, or the
/// non-uniform tensor grid with spacings cycling 0.9/1.3/0.7 of eps (every
/// quad side still below eps).
OrthodiagonalMap build_experiment_mesh(const ExperimentSpec& spec, double eps);

/// For each eps: generate the mesh, solve the Dirichlet problem for the
/// spec's boundary data, and measure |h_mesh - h| against the continuum
/// oracle at every primal vertex; fits the bulk error slope.
/// Errors: OracleUnavailable (no continuum oracle for this data/domain);
/// module errors propagated with eps context.
ConvergenceResult run_convergence(const ExperimentSpec& spec);

enum class ProbeStatus { Pass, Recorded, Finding, Error };
std::string to_string(ProbeStatus status);

/// Outcome of one probe: a status, a one-line note, the probe's CSV payload,
/// and optional log-log plot data.
struct ProbeReport {
    std::string probe;
    ProbeStatus status = ProbeStatus::Recorded;
    std::string note;
    std::string csv_name;                             // e.g. "probe_beurling.csv"
    std::string csv;                                  // full file content
    std::vector<std::pair<double, double>> plot_points;  // raw (x, y), plotted log-log
    std::optional<RateFit> fit;
    std::vector<SweepRecord> records;                 // convergence-style rows, may be empty
};

struct BatteryResult {
    std::vector<ProbeReport> probes;
    /// 0 all asserted invariants passed; 2 findings logged; 1 a probe errored.
    int exit_code() const;
};

/// Runs the probe set named by spec.kind.  The solver-vs-walk smoke gate
/// (walkcheck) is prepended to every battery.  Per-probe failures are
/// isolated as Error entries; the battery continues.
BatteryResult run_probe_battery(const ExperimentSpec& spec);

/// Everything emit_report writes, assembled by the run_* wrappers.
struct ReportInputs {
    struct RecordRow {
        std::string probe;
        double eps = 0.0;
        double max_err = 0.0;
        double bulk_err = 0.0;
        double boundary_err = 0.0;
        int n_vertices = 0;
        int solver_iters = 0;
    };
    struct FitRow {
        std::string probe;
        std::optional<RateFit> fit;
        std::string status;  // "fitted" or the skip/failure reason
    };
    struct ExtraFile {
        std::string name;
        std::string content;
    };
    struct PlotSeries {
        std::string probe;
        std::string x_label;
        std::string y_label;
        std::vector<std::pair<double, double>> points;  // raw; plotted log-log
        std::optional<RateFit> fit;
        std::optional<double> guide_slope;  // rates guide line when configured
        std::string guide_label;
    };
    std::vector<RecordRow> records;
    std::vector<FitRow> fits;
    std::vector<ExtraFile> extras;
    std::vector<PlotSeries> plots;
    std::vector<std::string> metadata;  // protocol notes, emitted as # comments
};

ReportInputs report_inputs(const ConvergenceResult& result, const ExperimentSpec& spec);
ReportInputs report_inputs(const BatteryResult& result, const ExperimentSpec& spec);

/// Writes records.csv, fit.csv, per-probe CSVs, and plot_<probe>.svg into
/// outdir, plus manifest.txt listing every emitted file with its FNV-1a 64
/// content hash.  Returns the manifest lines ("<hash>  <name>", sorted by
/// name).  Raises IoError when the directory cannot be created or written.
std::vector<std::string> emit_report(const ReportInputs& inputs, const std::string& outdir);

/// CSV table of the rate exponents over an (alpha, beta) grid:
/// `alpha,beta,lambda,theta,bootstrap_limit` (header included).
std::string exponent_table_csv(const std::vector<double>& alphas,
                               const std::vector<double>& betas, int grid_n = 512);

}  // namespace ortholap
