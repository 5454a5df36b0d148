#ifndef ELLIPVMO_HALFSPACE_HPP
#define ELLIPVMO_HALFSPACE_HPP

#include <functional>
#include <vector>

#include "ellipvmo/coefficients.hpp"
#include "ellipvmo/grid.hpp"

namespace ellipvmo {

enum class BcKind { dirichlet, neumann, oblique, robin };

/** Boundary-value problem on the half-box x^1 in [0, L].
 *
 * The grid of f has axis 0 non-periodic starting at exactly 0; the x'
 * axes must be periodic for the oblique/robin paths and for trace data
 * (the reflections shear along x', which is done spectrally).  g holds
 * boundary data on the wall plane x^1 = 0, laid out flat with the x'
 * strides (size grid.stride(0)); empty means g = 0.
 */
struct HalfSpaceProblem {
    EllipticOperator op;      // coefficients read at x^1 >= 0 only
    GridFunction f;
    double lambda = 1.0;
    BcKind bc = BcKind::dirichlet;
    std::vector<double> ell;  // oblique/robin direction, ell[0] > 0
    double sigma = 0.0;       // robin zero-order boundary coefficient
    std::vector<cplx> g;      // boundary data (empty = zero)
    double tol = 1e-10;       // whole-space solver tolerance
    long maxiter = -1;
};

struct TraceLift {
    GridFunction v;           // half-box lift with v(0,.) = 0 exactly
    std::vector<cplx> g;
    double lambda_bar = 1.0;  // max(lambda, 1)
    double lhs = 0.0;         // lambda||v||_p + sqrt(lambda)||v_x||_p + ||v_xx||_p
};

struct HalfSpaceSolution {
    GridFunction u;      // restriction to the half-box
    GridFunction whole;  // auxiliary whole-space solution
    double residual = 0.0;
    long iterations = 0;
    double symmetry_defect = 0.0;    // wrong-parity fraction of `whole` (dirichlet/neumann)
    double wall_trace = 0.0;         // dirichlet: max |u(0,.)|
    double wall_derivative = 0.0;    // neumann: max |one-sided du/dx^1(0,.)|
    double mirror_defect = 0.0;      // oblique: sup |whole - u(phi(.))| over x^1 < 0
    double boundary_residual = 0.0;  // oblique: L2 wall norm of l^j u_{x^j} - g
};

/// Box [-L, L] x (x' box): 2n-1 nodes along axis 0 at the same spacing,
/// so the wall x^1 = 0 is the middle node plane.  Axis 0 of `half` must
/// be non-periodic with lo = 0.
BoxGrid mirror_grid(const BoxGrid& half);

/// Index-space reflections onto mirror_grid(f.grid()).  Odd zeroes the
/// wall node plane, even copies it; both are linear and are inverted by
/// restrict_half at every node with x^1 > 0.
GridFunction extend_odd(const GridFunction& f);
GridFunction extend_even(const GridFunction& f);
GridFunction restrict_half(const BoxGrid& half, const GridFunction& full);

/** Shear along x': (shear u)(x^1, x') = u(x^1, x' + sign * 2 l' x^1)
 * layer by layer, computed spectrally (band-limited interpolation, so
 * exact for trigonometric data).  sign=+1 turns a half-box function
 * into its mirror-parameterized oblique reflection u(phi(-x^1, x'));
 * sign=-1 undoes it, so the round trip is the identity to roundoff.
 * ell must have ell[0] == 1 and the x' axes must be periodic.
 */
GridFunction shear_x1(const GridFunction& u, const std::vector<double>& ell, double sign);

/// Dirichlet problem: odd extension of f, parity extension of the
/// coefficients, whole-space solve, restriction.  The whole-space
/// solution is odd up to solver tolerance (reported as symmetry_defect,
/// the even fraction) and its wall trace is reported.
HalfSpaceSolution solve_dirichlet(const HalfSpaceProblem& p);

/// Neumann problem: even extension of f, same extended coefficients.
/// symmetry_defect is the odd fraction; wall_derivative reports the
/// second-order one-sided normal derivative at the wall.
HalfSpaceSolution solve_neumann(const HalfSpaceProblem& p);

/** Trace lift v(x^1, x') = x^1 * eta(sqrt(lambda v 1) x^1) * (S_t g)(x'),
 * eta a fixed smooth cutoff (1 on [0,1/2], 0 from 1 on) and S_t Gaussian
 * smoothing of width t along x', applied spectrally.  The width is
 * t = max(0, x^1 - 2h): it vanishes on the first two node layers, so the
 * second-order one-sided wall stencil recovers g exactly (up to the
 * cutoff, which is inactive there whenever 2 sqrt(lambda v 1) h <= 1/2),
 * and grows like x^1 beyond.  lhs reports the measured
 * lambda||v||_p + sqrt(lambda)||v_x||_p + ||v_xx||_p.
 */
TraceLift lift_trace(const BoxGrid& half, const std::vector<cplx>& g, double lambda,
                     double p_exp);

/** Oblique problem l^j u_{x^j} = g on the wall, l normalized so l^1 = 1
 * (l and g are divided by l[0]; l[0] <= 0 is invalid).  Pipeline: trace
 * lift v, reflected coefficients, right side f - 2(Lv - lambda v) on
 * x^1 > 0 and f(phi(x)) on x^1 < 0 (the wall node takes the mean of the
 * two one-sided limits), whole-space solve for w, u = w + 2v.
 * mirror_defect reports sup |w - u(phi(.))| over the reflected layers
 * and boundary_residual the wall L2 norm of l^j u_{x^j} - g.
 */
HalfSpaceSolution solve_oblique(const HalfSpaceProblem& p);

/** Robin-to-oblique reduction for l^j u_{x^j} + sigma u = g.  With
 * h(x^1) = exp(-sigma x^1 chi(x^1)), chi a smooth cutoff, h'(0) =
 * -sigma h(0) and u = h v turns the problem into an oblique one for v
 * with coefficients b^j + 2 a^{j1} h'/h and c + (a^11 h'' + b^1 h')/h,
 * the same f/h, and unchanged g (h(0) = 1).  The declared K of the
 * transformed operator comes from a sampled sup of |h'/h| and |h''/h|.
 */
struct RobinReduction {
    HalfSpaceProblem problem;  // oblique problem solved by v
    std::function<double(double)> h, h_prime, h_second;
};
RobinReduction robin_reduce(const HalfSpaceProblem& p);

/// robin_reduce, solve_oblique, then recover u = h v.
HalfSpaceSolution solve_robin(const HalfSpaceProblem& p);

/** Boundary-aware a-priori ratio
 *
 *   (lambda||u||_p + sqrt(lambda)||u_x||_p + ||u_xx||_p)
 *   / (||f||_p + (lambda v 1)^{s/2} ||g||_{p,wall} + [g]_s),  s = 1 - 1/p,
 *
 * with the Slobodeckij seminorm from the diagnostics module.  Empty g
 * drops the boundary terms, reducing to the interior ratio.  Throws on
 * a zero denominator or p <= 1.
 */
double oblique_estimate_ratio(const GridFunction& u, const GridFunction& f,
                              const std::vector<cplx>& g, double lambda, double p_exp);

}  // namespace ellipvmo

#endif
