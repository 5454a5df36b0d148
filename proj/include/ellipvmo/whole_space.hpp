#ifndef ELLIPVMO_WHOLE_SPACE_HPP
#define ELLIPVMO_WHOLE_SPACE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "ellipvmo/coefficients.hpp"
#include "ellipvmo/grid.hpp"

namespace ellipvmo {

struct SparseEntry {
    std::size_t row = 0;
    std::size_t col = 0;
    cplx value;
};

/** Flat sparse image of L - lambda on a box grid.  Entries within a row
 * are merged, rows are emitted in flat-index order.  Rows at the two
 * ends of a non-periodic axis 0 are homogeneous Dirichlet identities
 * (diagonal 1, rhs 0); every other row carries the same stencil as
 * apply(), so assembled * flatten(u) matches flatten(apply(op, u,
 * lambda)) on those rows to roundoff.
 */
struct SparseSystem {
    BoxGrid grid;
    std::size_t dimension = 0;
    std::vector<SparseEntry> entries;
    std::vector<cplx> rhs;
};

/// Assemble the stencil; rhs starts at zero.
SparseSystem assemble(const EllipticOperator& op, const BoxGrid& grid, double lambda);
/// Assemble and load f as the right-hand side in one step.
SparseSystem assemble(const EllipticOperator& op, const BoxGrid& grid, double lambda,
                      const GridFunction& f);
/// Load f into sys.rhs, zeroing the Dirichlet rows.
void set_rhs(SparseSystem& sys, const GridFunction& f);

struct SolveResult {
    GridFunction u;
    double residual = 0.0;  // achieved ||A u - rhs|| / ||rhs||
    long iterations = 0;
    std::string method;  // "gmres" or "bicgstab" (fallback)
};

/** Preconditioned Krylov solve (restarted GMRES with a diagonal
 * preconditioner, BiCGSTAB fallback) to relative residual <= tol.
 * maxiter < 0 selects 10 * dimension.  Throws SolveError carrying the
 * best residual when neither method converges.
 */
SolveResult solve(const SparseSystem& sys, double tol = 1e-10, long maxiter = -1);

/** Ratio of the second-order a-priori bound:
 *
 *   [ lambda ||u||_p + sqrt(lambda) ||u_x||_p + ||u_xx||_p ] / ||f||_p
 *
 * with difference-quotient derivatives; |u_x| is the Euclidean and
 * |u_xx| the Frobenius pointwise magnitude.  ||f||_p = 0 is invalid.
 */
double apriori_ratio(const GridFunction& u, const GridFunction& f, double lambda, double p);
double apriori_ratio(const GridFunction& u, const GridFunction& f, double lambda, double p,
                     const Region& region);

}  // namespace ellipvmo

#endif
