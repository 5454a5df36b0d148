#include "ellipvmo/whole_space.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace ellipvmo {

namespace {

bool dirichlet_row(const BoxGrid& g, int i0) {
    return !g.periodic(0) && (i0 == 0 || i0 == g.size(0) - 1);
}

// 1D difference stencil along one axis as (absolute index, weight)
// pairs; identical coefficients to the grid module's diff.
void line_stencil(const BoxGrid& g, int ax, int i, int order,
                  std::vector<std::pair<int, double>>& out) {
    out.clear();
    const int n = g.size(ax);
    const double h = g.spacing(ax);
    if (order == 1) {
        const double c = 1.0 / (2.0 * h);
        if (g.periodic(ax)) {
            out.push_back({(i + n - 1) % n, -c});
            out.push_back({(i + 1) % n, c});
        } else if (i == 0) {
            out.push_back({0, -3.0 * c});
            out.push_back({1, 4.0 * c});
            out.push_back({2, -c});
        } else if (i == n - 1) {
            out.push_back({n - 1, 3.0 * c});
            out.push_back({n - 2, -4.0 * c});
            out.push_back({n - 3, c});
        } else {
            out.push_back({i - 1, -c});
            out.push_back({i + 1, c});
        }
    } else {
        const double c = 1.0 / (h * h);
        if (g.periodic(ax)) {
            out.push_back({(i + n - 1) % n, c});
            out.push_back({i, -2.0 * c});
            out.push_back({(i + 1) % n, c});
        } else if (i == 0) {
            out.push_back({0, 2.0 * c});
            out.push_back({1, -5.0 * c});
            out.push_back({2, 4.0 * c});
            out.push_back({3, -c});
        } else if (i == n - 1) {
            out.push_back({n - 1, 2.0 * c});
            out.push_back({n - 2, -5.0 * c});
            out.push_back({n - 3, 4.0 * c});
            out.push_back({n - 4, -c});
        } else {
            out.push_back({i - 1, c});
            out.push_back({i, -2.0 * c});
            out.push_back({i + 1, c});
        }
    }
}

}  // namespace

SparseSystem assemble(const EllipticOperator& op, const BoxGrid& grid, double lambda) {
    const int d = grid.dim();
    if (d != op.dim()) throw std::invalid_argument("assemble: dimension mismatch");

    SparseSystem sys{grid, grid.num_points(), {}, {}};
    sys.rhs.assign(sys.dimension, cplx(0.0, 0.0));
    sys.entries.reserve(sys.dimension * (1 + 2 * d + 2 * d * (d - 1)));

    std::vector<std::vector<std::pair<int, double>>> s1(d), s2(d);
    std::vector<std::pair<std::ptrdiff_t, double>> row_acc;
    std::vector<double> a(static_cast<std::size_t>(d) * d), b(d);
    const bool use_b = op.has_b();
    const bool use_c = op.has_c();

    std::vector<int> mi(d, 0);
    std::vector<double> x(d);
    for (std::size_t row = 0; row < sys.dimension; ++row) {
        if (dirichlet_row(grid, mi[0])) {
            sys.entries.push_back({row, row, cplx(1.0, 0.0)});
        } else {
            for (int ax = 0; ax < d; ++ax) {
                x[ax] = grid.coord(ax, mi[ax]);
                line_stencil(grid, ax, mi[ax], 1, s1[ax]);
                line_stencil(grid, ax, mi[ax], 2, s2[ax]);
            }
            op.a_at(x, a.data());
            if (use_b) op.b_at(x, b.data());
            const double c0 = (use_c ? op.c_at(x) : 0.0) - lambda;

            row_acc.clear();
            auto add = [&row_acc](std::ptrdiff_t off, double w) {
                for (auto& e : row_acc)
                    if (e.first == off) {
                        e.second += w;
                        return;
                    }
                row_acc.push_back({off, w});
            };

            add(0, c0);
            for (int j = 0; j < d; ++j) {
                const std::ptrdiff_t stj = static_cast<std::ptrdiff_t>(grid.stride(j));
                for (const auto& [t, w] : s2[j]) add((t - mi[j]) * stj, a[j * d + j] * w);
                if (use_b)
                    for (const auto& [t, w] : s1[j]) add((t - mi[j]) * stj, b[j] * w);
                for (int k = 0; k < d; ++k) {
                    if (k == j) continue;
                    const double ajk = a[j * d + k];
                    const std::ptrdiff_t stk = static_cast<std::ptrdiff_t>(grid.stride(k));
                    for (const auto& [tj, wj] : s1[j])
                        for (const auto& [tk, wk] : s1[k])
                            add((tj - mi[j]) * stj + (tk - mi[k]) * stk, ajk * wj * wk);
                }
            }
            for (const auto& [off, w] : row_acc)
                sys.entries.push_back(
                    {row, static_cast<std::size_t>(static_cast<std::ptrdiff_t>(row) + off),
                     cplx(w, 0.0)});
        }
        for (int ax = d - 1; ax >= 0; --ax) {
            if (++mi[ax] < grid.size(ax)) break;
            mi[ax] = 0;
        }
    }
    return sys;
}

void set_rhs(SparseSystem& sys, const GridFunction& f) {
    if (f.grid() != sys.grid || f.rank() != Rank::scalar)
        throw std::invalid_argument("set_rhs: f must be scalar on the system grid");
    const int n0 = sys.grid.size(0);
    const std::size_t st0 = sys.grid.stride(0);
    for (std::size_t i = 0; i < sys.dimension; ++i) {
        const int i0 = static_cast<int>(i / st0) % n0;
        sys.rhs[i] = dirichlet_row(sys.grid, i0) ? cplx(0.0, 0.0) : f.value(i);
    }
}

SparseSystem assemble(const EllipticOperator& op, const BoxGrid& grid, double lambda,
                      const GridFunction& f) {
    SparseSystem sys = assemble(op, grid, lambda);
    set_rhs(sys, f);
    return sys;
}

SolveResult solve(const SparseSystem& sys, double tol, long maxiter) {
    if (!(tol > 0.0)) throw std::invalid_argument("solve: tol must be > 0");
    if (sys.rhs.size() != sys.dimension)
        throw std::invalid_argument("solve: rhs length must match the system dimension");
    if (maxiter < 0) maxiter = 10 * static_cast<long>(sys.dimension);

    const Eigen::Index n = static_cast<Eigen::Index>(sys.dimension);
    Eigen::SparseMatrix<cplx> A(n, n);
    {
        std::vector<Eigen::Triplet<cplx>> trip;
        trip.reserve(sys.entries.size());
        for (const SparseEntry& e : sys.entries)
            trip.emplace_back(static_cast<Eigen::Index>(e.row),
                              static_cast<Eigen::Index>(e.col), e.value);
        A.setFromTriplets(trip.begin(), trip.end());
    }
    Eigen::Map<const Eigen::VectorXcd> rhs(sys.rhs.data(), n);

    SolveResult out{GridFunction(sys.grid), 0.0, 0, "gmres"};
    const double bnorm = rhs.norm();
    if (bnorm == 0.0) return out;

    Eigen::VectorXcd x;
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd best_x = Eigen::VectorXcd::Zero(n);
    std::string best_method = "gmres";
    long best_iters = 0;

    {
        Eigen::GMRES<Eigen::SparseMatrix<cplx>, Eigen::DiagonalPreconditioner<cplx>> gm(A);
        gm.set_restart(64);
        gm.setTolerance(tol);
        gm.setMaxIterations(maxiter);
        x = gm.solve(rhs);
        const double r = (A * x - rhs).norm() / bnorm;
        if (r < best) {
            best = r;
            best_x = x;
            best_method = "gmres";
            best_iters = gm.iterations();
        }
    }
    if (best > tol) {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<cplx>, Eigen::DiagonalPreconditioner<cplx>> bi(A);
        bi.setTolerance(tol);
        bi.setMaxIterations(maxiter);
        x = bi.solve(rhs);
        const double r = (A * x - rhs).norm() / bnorm;
        if (r < best) {
            best = r;
            best_x = x;
            best_method = "bicgstab";
            best_iters = bi.iterations();
        }
    }
    if (!(best <= tol))
        throw SolveError("sparse solve: no Krylov method reached tolerance " +
                             format_double(tol) + " (best residual " + format_double(best) +
                             ")",
                         best);

    for (std::size_t i = 0; i < sys.dimension; ++i) out.u.value(i) = best_x[i];
    out.residual = best;
    out.iterations = best_iters;
    out.method = best_method;
    return out;
}

double apriori_ratio(const GridFunction& u, const GridFunction& f, double lambda, double p,
                     const Region& region) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("apriori_ratio: lambda must be >= 0");
    const double fn = lp_norm(f, p, region);
    if (!(fn > 0.0)) throw std::invalid_argument("apriori_ratio: ||f||_p must be positive");
    const double un = lp_norm(u, p, region);
    const double gn = lp_norm(gradient(u), p, region);
    const double hn = lp_norm(hessian(u), p, region);
    return (lambda * un + std::sqrt(lambda) * gn + hn) / fn;
}

double apriori_ratio(const GridFunction& u, const GridFunction& f, double lambda, double p) {
    return apriori_ratio(u, f, lambda, p, Region::whole(u.grid()));
}

}  // namespace ellipvmo
