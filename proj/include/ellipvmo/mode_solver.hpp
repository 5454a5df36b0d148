#ifndef ELLIPVMO_MODE_SOLVER_HPP
#define ELLIPVMO_MODE_SOLVER_HPP

#include <utility>
#include <vector>

#include "ellipvmo/coefficients.hpp"
#include "ellipvmo/grid.hpp"

namespace ellipvmo {

/// Non-periodic 1D node line on [lo, hi], both ends included.
struct LineGrid {
    double lo = 0.0;
    double hi = 1.0;
    int n = 2;

    LineGrid() = default;
    LineGrid(double lo_, double hi_, int n_);
    /// Axis 0 of a box grid (must be non-periodic there).
    static LineGrid x1_axis(const BoxGrid& g);

    double h() const { return (hi - lo) / (n - 1); }
    double coord(int i) const { return lo + h() * i; }
};

/** One Fourier mode of the constant-in-x' reduction: the two-point ODE
 *
 *   u'' + 2 i (b/a) u' - (c/a) u = f/a
 *
 * with coefficient functions of x^1 alone,
 *
 *   a(x^1)      = a^11(x^1)
 *   b(x^1, xi)  = sum_{j>=2} a^{1j}(x^1) s_j
 *   c(x^1, xi)  = sum_{j,k>=2} a^{jk}(x^1) sym_{jk} + lambda
 *
 * where s_j and sym_jk are the frequency symbols of the x' derivatives.
 * With the continuum symbols s_j = xi_j, sym_jk = xi_j xi_k this is the
 * exact Fourier reduction; with the discrete central-difference symbols
 * (sin and 1-cos forms) it reproduces the finite-difference operator on
 * the box exactly, mode by mode.  xi_sq stores the effective |xi|^2 =
 * sum of the second-difference symbols, which is the quantity entering
 * the coercivity and energy bounds in either case.
 */
struct ModeProblem {
    LineGrid line;
    std::vector<double> a, b, c;  // sampled at the line nodes; c includes lambda
    std::vector<cplx> rhs;        // f tilde at the line nodes
    std::vector<double> xi;       // reported frequency vector, d-1 entries
    double lambda = 0.0;
    double xi_sq = 0.0;           // effective |xi|^2 for the bound checks
};

/** Continuum-symbol assembly.  Requires a depending on x^1 only
 * (probed by sampling; x'-variation above 1e-12 is rejected), b and c
 * absent, and lambda >= 0.
 */
ModeProblem assemble_mode(const EllipticOperator& op, const std::vector<double>& xi,
                          double lambda, std::vector<cplx> f_slice, const LineGrid& line);

/** Assembly with caller-chosen per-axis symbols: s[j] multiplies a^{1j}
 * and the off-diagonal a^{jk} products, q2[j] multiplies the diagonal
 * a^{jj}.  Passing s = xi, q2 = xi^2 recovers assemble_mode.  The
 * whole-space driver passes the central-difference symbols
 * s = sin(xi h)/h, q2 = 2(1 - cos(xi h))/h^2; |s_j| <= sqrt(q2_j) holds
 * for them, which is what keeps every coercivity bound valid with
 * xi_sq = sum q2.
 */
ModeProblem assemble_mode_symbols(const EllipticOperator& op, const std::vector<double>& xi,
                                  const std::vector<double>& s, const std::vector<double>& q2,
                                  double lambda, std::vector<cplx> f_slice,
                                  const LineGrid& line);

/** Nodewise check of the four coercivity bounds
 *
 *   delta <= a <= 1/delta
 *   |b| <= |xi_eff| / delta
 *   delta |xi_eff|^2 + lambda <= c <= (|xi_eff|^2 + lambda) / delta
 *   a c - b^2 >= delta^2 (|xi_eff|^2 + lambda)
 *
 * Margins are the worst (most negative when violated) slack of each
 * bound over all nodes; pass allows a 1e-12 relative tolerance so exact
 * equality cases count as satisfied.
 */
struct CoercivityReport {
    bool pass = false;
    double margin_a_lo = 0.0, margin_a_hi = 0.0;
    double margin_b = 0.0;
    double margin_c_lo = 0.0, margin_c_hi = 0.0;
    double margin_det = 0.0;
};

CoercivityReport check_coercivity(const ModeProblem& mp, double delta);

struct ModeSolution {
    std::vector<cplx> u;     // mode amplitude at the line nodes, zero at both ends
    double residual = 0.0;   // sup over interior nodes of the discrete equation defect
    double n1_emp = 0.0;     // energy ratios, see energy_check
    double n2_emp = 0.0;
};

/** Direct solve of the central-difference discretization with
 * homogeneous Dirichlet values at both ends.  Elimination is tridiagonal
 * with adjacent-row partial pivoting; a vanishing pivot after pivoting
 * raises SingularSystemError.  The discrete residual and the energy
 * ratios are recorded on the solution.
 */
ModeSolution solve_mode(const ModeProblem& mp);

/** Empirical constants of the two mode energy estimates:
 *
 *   N1 = [ (|xi|^2+lambda) int |u'|^2
 *          + (|xi|^4 + lambda |xi|^2 + lambda^2) int |u|^2 ] / int |f|^2
 *   N2 = int |u''|^2 / int |f|^2
 *
 * with |xi|^2 = mp.xi_sq, trapezoid integrals, and difference quotients
 * for u' and u''.  A zero rhs gives (0, 0) when u vanishes and is a
 * hard error otherwise.
 */
std::pair<double, double> energy_check(const ModeSolution& sol, const ModeProblem& mp);

/** Integrating factor phi with phi(0) = 0 and phi' = b/a (cumulative
 * trapezoid), and the rotated amplitude rho = u e^{i phi}.  mag_defect
 * records max | |rho| - |u| |, which vanishes up to roundoff.
 */
struct FactorResult {
    std::vector<double> phi;
    std::vector<cplx> rho;
    double mag_defect = 0.0;
};

FactorResult integrating_factor(const ModeProblem& mp, const ModeSolution& sol);

/** Spectral whole-space solve for x^1-only coefficients: DFT along the
 * periodic x' axes, one tridiagonal mode solve per discrete frequency
 * with the central-difference symbols, inverse DFT.  Solves exactly the
 * linear system the sparse path assembles, so the two agree to solver
 * tolerance.  Requires lambda > 0 (the zero mode at lambda = 0 has no
 * decay on the line), axis 0 non-periodic, all other axes periodic.
 */
struct WholeSpaceX1Result {
    GridFunction u;
    /// Relative l2 defect of apply(op, u, lambda) against f over the
    /// rows where the equation is imposed (x^1 interior).
    double residual_rel = 0.0;
    double max_mode_residual = 0.0;
};

WholeSpaceX1Result solve_whole_space_x1(const EllipticOperator& op, const GridFunction& f,
                                        double lambda);

}  // namespace ellipvmo

#endif
