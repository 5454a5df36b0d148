#ifndef ELLIPVMO_DIAGNOSTICS_HPP
#define ELLIPVMO_DIAGNOSTICS_HPP

#include <cstdint>
#include <vector>

#include "ellipvmo/coefficients.hpp"
#include "ellipvmo/grid.hpp"

namespace ellipvmo {

/// Geometric radius ladder (ratio 3/2) from twice the coarsest spacing up
/// to half the shortest box extent.  Never empty: a grid too coarse for
/// that range gets the single radius min(2 h_max, extent/2).
std::vector<double> radius_ladder(const BoxGrid& grid);

/** Maximal function of g at x, restricted to the given radius ladder.
 *
 * Each value is the cell-volume weighted average of |g| over the grid
 * nodes inside the closed ball B_r(x); distances use the minimal image
 * on periodic axes.  Balls reaching past a non-periodic face are
 * truncated to the box, and *clipped (when non-null) reports whether
 * any ladder radius did so.  A lower bound of the true sup over r > 0.
 */
double maximal_fn(const GridFunction& g, const Point& x, const std::vector<double>& radii,
                  bool* clipped = nullptr);

/// Sharp function: same ladder, but each ball averages |g - (g)_B| with
/// (g)_B the weighted mean over the ball.  Scalar fields only.
double sharp_fn(const GridFunction& g, const Point& x, const std::vector<double>& radii,
                bool* clipped = nullptr);

/** Slobodeckij seminorm of boundary data sampled on the x' plane of
 * `grid` (axes 1..d-1; values laid out flat with the grid's strides, so
 * values.size() == grid.stride(0)).
 *
 *   [g]_s = ( sum sum  w_y w_z |g(y') - g(z')|^p / |y'-z'|^{(d-1)+sp} )^{1/p}
 *
 * over node pairs with |y'-z'| >= min plane spacing (this keeps every
 * nearest-neighbour pair and drops only the diagonal); periodic axes use
 * the minimal-image distance.  Requires s in (0,1) and p >= 1.
 */
double slobodeckij_seminorm(const BoxGrid& grid, const std::vector<cplx>& values, double s,
                            double p);

/// mu for the sharp-function inequality at exponent p: 2 when p > 4,
/// p/2 * (1 - 1e-3) when p in (2, 4] (the chain needs p > 2 mu > 2).
/// Throws std::invalid_argument for p <= 2.
double choose_mu(double p);

/** Configuration for the pointwise sharp-function inequality check.
 * Unset (zero / empty) derived fields are filled in from mu and the
 * grid: nu = mu/(mu-1), alpha = 1/(nu(d+2)), beta = 1/(2 mu), radii
 * from radius_ladder.  Explicitly set values must be consistent.
 */
struct SharpCheckConfig {
    double R = 1.0;    // oscillation window for the coefficient modulus
    double mu = 2.0;   // > 1
    double nu = 0.0;   // conjugate exponent, 1/mu + 1/nu = 1
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<Point> sample_points;  // where the inequality is probed
    std::vector<double> radii;         // ladder for the maximal/sharp sups
    int vmo_samples = 2048;
    std::uint64_t seed = 1;
};

struct SharpCheckReport {
    std::vector<double> n_per_point;  // min admissible N at each sample point
    double n_max = 0.0;               // max over sample points
    double a_sharp = 0.0;             // sampled coefficient modulus at R
    double alpha = 0.0;
    double beta = 0.0;
};

/** Empirical constant in the pointwise bound
 *
 *   (u_{xx'})^#(x0) <= N (a^{#(x')}_R)^alpha [M(|u_xx|^{2mu})(x0)]^beta
 *                      + N [M(|Lu|^2)(x0)]^{1/(d+2)} [M(|u_xx|^2)(x0)]^{d/(2d+4)}
 *
 * with the left side the worst sharp function among the second
 * derivatives u_{x^j x^k} having k >= 2.  Requires an operator without
 * lower-order terms and a scalar u on a grid matching op.dim().
 * Returns the smallest N satisfying the bound at each sample point and
 * their max; a point with zero right side and nonzero left side reports
 * +infinity rather than failing.
 */
SharpCheckReport sharp_inequality_check(const GridFunction& u, const EllipticOperator& op,
                                        const SharpCheckConfig& cfg);

struct LpCheckResult {
    double ratio = 0.0;     // ||u_xx||_p / ||Lu||_p, 0 when flagged
    double uxx_norm = 0.0;
    double lu_norm = 0.0;
    bool anomaly = false;   // ||Lu||_p vanished, ratio meaningless
};

/// Ratio ||u_xx||_p / ||Lu||_p for an operator without lower-order
/// terms.  The caller keeps u supported in a small ball; a vanishing
/// denominator is flagged instead of thrown.
LpCheckResult lp_estimate_check(const EllipticOperator& op, const GridFunction& u, double p);

}  // namespace ellipvmo

#endif
