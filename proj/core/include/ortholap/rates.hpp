#pragma once
// Exponent arithmetic for convergence-rate bounds: the escape-exponent
// min-max kernel and its value lambda, a closed form for the inner maximum,
// the improved exponent theta, the bootstrap recursion for interior
// regularity exponents, and the assembled numeric error bound.

#include <optional>
#include <vector>

namespace ortholap {

/// Inputs for a rate-bound evaluation.  alpha is the Hoelder exponent of the
/// boundary data; beta is the walk escape exponent of the mesh family.
struct RateQuery {
    double alpha = 0.5;              ///< in (0, 1]
    double beta = 0.25;              ///< in (0, 1)
    std::optional<double> eps;       ///< mesh pitch
    std::optional<double> diam;      ///< region diameter
    std::optional<double> g_sup;     ///< sup norm of the boundary data
    std::optional<double> g_holder;  ///< Hoelder seminorm of the boundary data
};

enum class BoundCase { AlphaBelow, AlphaEqual, AlphaAbove };

struct RateResult {
    double lambda = 0.0;    ///< value of the min-max
    double argmin_r = 0.0;  ///< outer minimizer in [0, 1]
    double argmax_s = 0.0;  ///< inner maximizer in (argmin_r, 1)
    double accuracy = 0.0;  ///< grid accuracy bound, 8 / grid_n
    BoundCase bound_case = BoundCase::AlphaBelow;
};

/// Kernel of the min-max:
///   max{ (a^b) r, min{ b (s-r), b/(1+b) - (2 + b/(1+b)) s + r/2, (a^b) s } }
/// with a^b = min(alpha, beta).  Raw arithmetic; the value may be negative.
double xi(double alpha, double beta, double r, double s);

/// Closed form for max over s in (r, 1) of the kernel, valid for
/// alpha < beta; CaseOutOfScope otherwise (callers fall back to the grid).
double inner_max_closed(double alpha, double beta, double r);

/// lambda(alpha, beta) = min over r in [0,1] of max over s in (r,1) of the
/// kernel, via nested uniform grids plus one golden-section refinement of the
/// outer minimum.  The kernel depends on alpha only through min(alpha, beta),
/// so alpha = 1 is admitted.
RateResult lambda_rate(double alpha, double beta, int grid_n = 1024);

enum class ThetaBranch { First, Second, Tie };

struct ThetaResult {
    double value = 0.0;
    ThetaBranch branch = ThetaBranch::First;
};

/// theta = min{ m/(5+2m), m/(4+7m) } with m = min(alpha, beta); the branches
/// cross exactly at m = 1/5.
ThetaResult theta(double alpha, double beta);

struct BootstrapResult {
    std::vector<double> sequence;  ///< alpha_0 .. alpha_n
    double limit = 0.0;            ///< beta / (1 + 3 beta)
};

/// Interior-regularity exponent recursion
///   alpha_0 = beta^2 / (2 (1+beta)),
///   alpha_{k+1} = (1-beta) alpha_k + beta min{ 1/5, (beta + alpha_k - beta alpha_k) / (2 (1+beta)) },
/// which increases strictly to beta / (1 + 3 beta).
BootstrapResult bootstrap(double beta, int n);

/// Numeric error bound (c1 |g| + c2 * case-factor * |g|_alpha diam^alpha)
/// * (eps/diam)^lambda, with a log(diam/eps) factor on the whole sum when
/// alpha = beta.  All optional query fields must be present.
double rate_bound(const RateQuery& query, double c1, double c2, int grid_n = 1024);

}  // namespace ortholap
