#include "ortholap/rates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ortholap/errors.hpp"
#include "ortholap/format.hpp"

namespace ortholap {

namespace {

void check_exponents_open(double alpha, double beta) {
    require(alpha > 0.0 && alpha < 1.0, "DomainError",
            "alpha must lie in (0, 1), got " + fmt_g12(alpha));
    require(beta > 0.0 && beta < 1.0, "DomainError",
            "beta must lie in (0, 1), got " + fmt_g12(beta));
}

// Exponent kernel without argument validation, for grid sweeps whose
// arguments are constructed in-range.  Building the diagnostic strings of the
// public precondition checks on every call would dominate the sweep cost.
double xi_kernel(double m, double beta, double b, double r, double s) {
    const double mid = b - (2.0 + b) * s + r / 2.0;
    return std::max(m * r, std::min(beta * (s - r), std::min(mid, m * s)));
}

// Inner maximum over the s-grid s_j = r + (1-r) j/(n+1), j = 1..n.  At r = 1
// the s-interval is empty and the kernel's first branch gives the value m*r.
struct InnerMax {
    double value;
    double argmax;
};

InnerMax inner_max_grid(double m, double beta, double r, int grid_n) {
    if (r >= 1.0) return {m, 1.0};
    const double b = beta / (1.0 + beta);
    InnerMax best{-1e300, r};
    for (int j = 1; j <= grid_n; ++j) {
        const double s = r + (1.0 - r) * j / (grid_n + 1.0);
        const double v = xi_kernel(m, beta, b, r, s);
        if (v > best.value) best = {v, s};
    }
    return best;
}

}  // namespace

double xi(double alpha, double beta, double r, double s) {
    check_exponents_open(alpha, beta);
    require(r >= 0.0 && r <= 1.0, "DomainError",
            "r must lie in [0, 1], got " + fmt_g12(r));
    require(s > r && s < 1.0, "DomainError",
            "s must lie in (r, 1), got s = " + fmt_g12(s) + " with r = " + fmt_g12(r));
    const double m = std::min(alpha, beta);
    return xi_kernel(m, beta, beta / (1.0 + beta), r, s);
}

double inner_max_closed(double alpha, double beta, double r) {
    check_exponents_open(alpha, beta);
    require(alpha < beta, "CaseOutOfScope",
            "the closed form covers alpha < beta only; got alpha = " + fmt_g12(alpha) +
                ", beta = " + fmt_g12(beta));
    require(r >= 0.0 && r <= 1.0, "DomainError",
            "r must lie in [0, 1], got " + fmt_g12(r));
    const double b = beta / (1.0 + beta);
    const double first = alpha * ((r / 2.0 + b) / (2.0 + alpha + b));
    const double second = beta * (((beta + 0.5) * r + b) / (2.0 + beta + b) - r);
    return std::max(alpha * r, std::min(first, second));
}

RateResult lambda_rate(double alpha, double beta, int grid_n) {
    require(grid_n >= 64, "DomainError",
            "grid must have at least 64 cells, got " + std::to_string(grid_n));
    require(alpha > 0.0 && alpha <= 1.0, "DomainError",
            "alpha must lie in (0, 1], got " + fmt_g12(alpha));
    require(beta > 0.0 && beta < 1.0, "DomainError",
            "beta must lie in (0, 1), got " + fmt_g12(beta));
    const double m = std::min(alpha, beta);

    auto outer = [&](double r) { return inner_max_grid(m, beta, r, grid_n); };

    double best_r = 0.0;
    double best_value = outer(0.0).value;
    for (int i = 1; i <= grid_n; ++i) {
        const double r = static_cast<double>(i) / grid_n;
        const double v = outer(r).value;
        if (v < best_value) {
            best_value = v;
            best_r = r;
        }
    }

    // One golden-section sweep in r around the grid argmin.
    double lo = std::max(0.0, best_r - 1.0 / grid_n);
    double hi = std::min(1.0, best_r + 1.0 / grid_n);
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - golden * (hi - lo);
    double x2 = lo + golden * (hi - lo);
    double f1 = outer(x1).value;
    double f2 = outer(x2).value;
    for (int it = 0; it < 64; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = outer(x1).value;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = outer(x2).value;
        }
    }
    const double refined_r = (f1 <= f2) ? x1 : x2;
    const double refined_value = std::min(f1, f2);
    RateResult out;
    if (refined_value < best_value) {
        best_value = refined_value;
        best_r = refined_r;
    }
    const InnerMax at_min = outer(best_r);
    out.lambda = at_min.value;
    out.argmin_r = best_r;
    out.argmax_s = at_min.argmax;
    out.accuracy = 8.0 / grid_n;
    out.bound_case = (alpha < beta)   ? BoundCase::AlphaBelow
                     : (alpha > beta) ? BoundCase::AlphaAbove
                                      : BoundCase::AlphaEqual;
    return out;
}

ThetaResult theta(double alpha, double beta) {
    require(alpha > 0.0 && alpha <= 1.0, "DomainError",
            "alpha must lie in (0, 1], got " + fmt_g12(alpha));
    require(beta > 0.0 && beta < 1.0, "DomainError",
            "beta must lie in (0, 1), got " + fmt_g12(beta));
    const double m = std::min(alpha, beta);
    const double first = m / (5.0 + 2.0 * m);
    const double second = m / (4.0 + 7.0 * m);
    ThetaResult out;
    if (std::abs(m - 0.2) <= 1e-13) {
        out.branch = ThetaBranch::Tie;
        out.value = first;
    } else if (first < second) {
        out.branch = ThetaBranch::First;
        out.value = first;
    } else {
        out.branch = ThetaBranch::Second;
        out.value = second;
    }
    return out;
}

BootstrapResult bootstrap(double beta, int n) {
    require(beta > 0.0 && beta < 0.5, "BetaOutOfRange",
            "the recursion needs beta in (0, 1/2), got " + fmt_g12(beta));
    require(n >= 1, "DomainError", "need at least one iteration, got " + std::to_string(n));
    BootstrapResult out;
    out.limit = beta / (1.0 + 3.0 * beta);
    out.sequence.reserve(static_cast<std::size_t>(n) + 1);
    double a = beta * beta / (2.0 * (1.0 + beta));
    out.sequence.push_back(a);
    for (int k = 0; k < n; ++k) {
        const double candidate = (beta + a - beta * a) / (2.0 * (1.0 + beta));
        a = (1.0 - beta) * a + beta * std::min(0.2, candidate);
        out.sequence.push_back(a);
    }
    return out;
}

double rate_bound(const RateQuery& query, double c1, double c2, int grid_n) {
    auto need = [&](const std::optional<double>& field, const char* name) {
        require(field.has_value(), "MissingFields",
                std::string("rate bound needs the query field '") + name + "'");
        return *field;
    };
    const double eps = need(query.eps, "eps");
    const double diam = need(query.diam, "diam");
    const double g_sup = need(query.g_sup, "g_sup");
    const double g_holder = need(query.g_holder, "g_holder");
    require(c1 > 0.0 && c2 > 0.0, "DomainError", "the constants c1, c2 must be positive");
    require(eps > 0.0 && diam > 0.0, "DomainError",
            "eps and diam must be positive");
    require(eps <= diam, "DomainError",
            "mesh pitch " + fmt_g12(eps) + " exceeds the diameter " + fmt_g12(diam));
    require(g_sup >= 0.0 && g_holder >= 0.0, "DomainError",
            "norms must be nonnegative");

    const RateResult rate = lambda_rate(query.alpha, query.beta, grid_n);
    const double power = std::pow(eps / diam, rate.lambda);
    const double data_scale = g_holder * std::pow(diam, query.alpha);
    switch (rate.bound_case) {
        case BoundCase::AlphaBelow:
            return (c1 * g_sup +
                    c2 * (query.beta / (query.beta - query.alpha)) * data_scale) *
                   power;
        case BoundCase::AlphaEqual:
            return (c1 * g_sup + c2 * data_scale) * std::log(diam / eps) * power;
        case BoundCase::AlphaAbove:
            // The factor that balances the saturated Hoelder exponent; written
            // with alpha - beta > 0 so it stays positive.
            return (c1 * g_sup +
                    c2 * (query.alpha / (query.alpha - query.beta)) * data_scale) *
                   power;
    }
    fail("DomainError", "unreachable bound case");
}

}  // namespace ortholap
