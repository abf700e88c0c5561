#include <algorithm>
#include <cmath>
#include <vector>

#include "ortholap/errors.hpp"
#include "ortholap/format.hpp"
#include "ortholap/network.hpp"

namespace ortholap {

namespace {

constexpr int kDenseLimit = 4000;

inline size_t packed_index(int i, int j) {  // j <= i
    return static_cast<size_t>(i) * (static_cast<size_t>(i) + 1) / 2 + static_cast<size_t>(j);
}

// In-place Cholesky of a packed lower-triangular SPD matrix. Returns false
// when a pivot is not strictly positive.
bool cholesky_factor(std::vector<double>& a, int n) {
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[packed_index(i, j)];
            for (int k = 0; k < j; ++k) s -= a[packed_index(i, k)] * a[packed_index(j, k)];
            if (i == j) {
                if (!(s > 0.0)) return false;
                a[packed_index(i, i)] = std::sqrt(s);
            } else {
                a[packed_index(i, j)] = s / a[packed_index(j, j)];
            }
        }
    }
    return true;
}

void cholesky_solve(const std::vector<double>& l, int n, std::vector<double>& x) {
    for (int i = 0; i < n; ++i) {
        double s = x[static_cast<size_t>(i)];
        for (int k = 0; k < i; ++k) s -= l[packed_index(i, k)] * x[static_cast<size_t>(k)];
        x[static_cast<size_t>(i)] = s / l[packed_index(i, i)];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[static_cast<size_t>(i)];
        for (int k = i + 1; k < n; ++k) s -= l[packed_index(k, i)] * x[static_cast<size_t>(k)];
        x[static_cast<size_t>(i)] = s / l[packed_index(i, i)];
    }
}

struct InteriorSystem {
    int n = 0;
    std::vector<double> diag;  // pi over all incident edges = diagonal of A
    std::vector<double> rhs;   // conductance-weighted boundary data
    // CSR over interior-interior couplings.
    std::vector<int> row_start;
    std::vector<int> col;
    std::vector<double> weight;

    void apply(const std::vector<double>& x, std::vector<double>& out) const {
        for (int i = 0; i < n; ++i) {
            double acc = diag[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
            for (int t = row_start[static_cast<size_t>(i)];
                 t < row_start[static_cast<size_t>(i) + 1]; ++t)
                acc -= weight[static_cast<size_t>(t)] *
                       x[static_cast<size_t>(col[static_cast<size_t>(t)])];
            out[static_cast<size_t>(i)] = acc;
        }
    }
};

InteriorSystem assemble(const WeightedNetwork& net, const std::vector<double>& full) {
    InteriorSystem sys;
    sys.n = static_cast<int>(net.interior.size());
    sys.diag.reserve(static_cast<size_t>(sys.n));
    sys.rhs.assign(static_cast<size_t>(sys.n), 0.0);
    sys.row_start.assign(static_cast<size_t>(sys.n) + 1, 0);

    std::vector<int> int_index(static_cast<size_t>(net.size()), -1);
    for (int k = 0; k < sys.n; ++k)
        int_index[static_cast<size_t>(net.interior[static_cast<size_t>(k)])] = k;

    for (int k = 0; k < sys.n; ++k) {
        const int x = net.interior[static_cast<size_t>(k)];
        sys.diag.push_back(net.pi[static_cast<size_t>(x)]);
        for (const auto& [y, c] : net.adj[static_cast<size_t>(x)]) {
            if (net.absorbing[static_cast<size_t>(y)]) {
                sys.rhs[static_cast<size_t>(k)] += c * full[static_cast<size_t>(y)];
            } else {
                sys.col.push_back(int_index[static_cast<size_t>(y)]);
                sys.weight.push_back(c);
                ++sys.row_start[static_cast<size_t>(k) + 1];
            }
        }
    }
    for (int k = 0; k < sys.n; ++k)
        sys.row_start[static_cast<size_t>(k) + 1] += sys.row_start[static_cast<size_t>(k)];
    return sys;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

void dense_solve(const InteriorSystem& sys, std::vector<double>& x) {
    require(sys.n <= kDenseLimit, "NonConvergence",
            "system too large for the dense fallback (" + std::to_string(sys.n) + " unknowns)");
    std::vector<double> a(packed_index(sys.n, 0), 0.0);
    for (int i = 0; i < sys.n; ++i) {
        a[packed_index(i, i)] = sys.diag[static_cast<size_t>(i)];
        for (int t = sys.row_start[static_cast<size_t>(i)];
             t < sys.row_start[static_cast<size_t>(i) + 1]; ++t) {
            const int j = sys.col[static_cast<size_t>(t)];
            if (j < i) a[packed_index(i, j)] -= sys.weight[static_cast<size_t>(t)];
        }
    }
    require(cholesky_factor(a, sys.n), "NonConvergence",
            "dense factorization met a nonpositive pivot");
    x = sys.rhs;
    cholesky_solve(a, sys.n, x);
}

}  // namespace

DiscreteField solve_dirichlet(const WeightedNetwork& net,
                              const std::vector<double>& boundary_values,
                              const SolveOptions& opts, SolveStats* stats) {
    require(boundary_values.size() == net.boundary.size(), "SideMismatch",
            "boundary values must be parallel to the network's boundary list");
    require(!net.boundary.empty(), "InvalidMap",
            "Dirichlet problem needs at least one absorbing vertex");
    require(opts.tol > 0.0, "DomainError", "solver tolerance must be positive");

    std::vector<double> full(static_cast<size_t>(net.size()), 0.0);
    double gnorm = 0.0;
    for (size_t k = 0; k < net.boundary.size(); ++k) {
        full[static_cast<size_t>(net.boundary[k])] = boundary_values[k];
        gnorm = std::max(gnorm, std::abs(boundary_values[k]));
    }

    SolveStats st;
    const int n = static_cast<int>(net.interior.size());
    if (n > 0 && gnorm > 0.0) {
        const InteriorSystem sys = assemble(net, full);
        std::vector<double> x(static_cast<size_t>(n), 0.0);

        auto scaled_max_residual = [&](const std::vector<double>& r) {
            double worst = 0.0;
            for (int k = 0; k < n; ++k)
                worst = std::max(worst, std::abs(r[static_cast<size_t>(k)]) /
                                            (sys.diag[static_cast<size_t>(k)] * gnorm));
            return worst;
        };

        bool done = false;
        if (opts.force_dense) {
            dense_solve(sys, x);
            std::vector<double> ax(static_cast<size_t>(n)), r(static_cast<size_t>(n));
            sys.apply(x, ax);
            for (int k = 0; k < n; ++k)
                r[static_cast<size_t>(k)] = sys.rhs[static_cast<size_t>(k)] - ax[static_cast<size_t>(k)];
            st.max_scaled_residual = scaled_max_residual(r);
            st.used_dense = true;
            done = true;
        }

        if (!done) {
            // Jacobi-scaled conjugate gradients on the interior block.
            std::vector<double> r = sys.rhs, z(static_cast<size_t>(n)), p(static_cast<size_t>(n)),
                                ap(static_cast<size_t>(n));
            for (int k = 0; k < n; ++k)
                z[static_cast<size_t>(k)] = r[static_cast<size_t>(k)] / sys.diag[static_cast<size_t>(k)];
            p = z;
            double rz = dot(r, z);
            const long cap = std::max(50L, static_cast<long>(opts.max_iter_factor) * n);
            st.max_scaled_residual = scaled_max_residual(r);
            done = st.max_scaled_residual <= opts.tol;
            while (!done && st.iterations < cap) {
                sys.apply(p, ap);
                const double pap = dot(p, ap);
                if (!(pap > 0.0)) break;  // loss of positivity; bail to fallback
                const double alpha = rz / pap;
                for (int k = 0; k < n; ++k) {
                    x[static_cast<size_t>(k)] += alpha * p[static_cast<size_t>(k)];
                    r[static_cast<size_t>(k)] -= alpha * ap[static_cast<size_t>(k)];
                }
                ++st.iterations;
                st.max_scaled_residual = scaled_max_residual(r);
                if (st.max_scaled_residual <= opts.tol) {
                    done = true;
                    break;
                }
                for (int k = 0; k < n; ++k)
                    z[static_cast<size_t>(k)] =
                        r[static_cast<size_t>(k)] / sys.diag[static_cast<size_t>(k)];
                const double rz_new = dot(r, z);
                const double beta = rz_new / rz;
                rz = rz_new;
                for (int k = 0; k < n; ++k)
                    p[static_cast<size_t>(k)] =
                        z[static_cast<size_t>(k)] + beta * p[static_cast<size_t>(k)];
            }
            if (!done) {
                if (opts.allow_dense_fallback && n <= kDenseLimit) {
                    dense_solve(sys, x);
                    std::vector<double> ax(static_cast<size_t>(n));
                    sys.apply(x, ax);
                    for (int k = 0; k < n; ++k)
                        r[static_cast<size_t>(k)] =
                            sys.rhs[static_cast<size_t>(k)] - ax[static_cast<size_t>(k)];
                    st.max_scaled_residual = scaled_max_residual(r);
                    st.used_dense = true;
                } else {
                    fail("NonConvergence",
                         "iteration cap reached with scaled residual " +
                             fmt_g12(st.max_scaled_residual) + " > tol " + fmt_g12(opts.tol));
                }
            }
        }

        for (int k = 0; k < n; ++k)
            full[static_cast<size_t>(net.interior[static_cast<size_t>(k)])] =
                x[static_cast<size_t>(k)];
    }

    DiscreteField out;
    out.side = net.side;
    out.ids = net.ids;
    out.values = std::move(full);  // network index order equals ascending id order
    if (stats) *stats = st;
    return out;
}

}  // namespace ortholap
