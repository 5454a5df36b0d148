#ifndef ELLIPVMO_VMO_HPP
#define ELLIPVMO_VMO_HPP

#include <cstdint>
#include <vector>

#include "ellipvmo/coefficients.hpp"

namespace ellipvmo {

/// Cylinder Q_r(x) = (x^1 - r, x^1 + r) x B'_r(x'), the window the
/// x'-oscillation is averaged over.
struct Cylinder {
    Point center;
    double radius = 1.0;
};

struct OscEstimate {
    double value = 0.0;
    double stderr_est = 0.0;
    int samples = 0;
};

/** Mean oscillation of a in the x' directions over Q:
 *
 *   r^{-1} |B'_r|^{-2} int int int |a(t, y') - a(t, z')|_F dy' dz' dt
 *
 * which equals twice the mean of |a(t, y') - a(t, z')|_F over uniform
 * t in (x^1 - r, x^1 + r) and y', z' in B'_r(x').  Estimated by a
 * shifted Halton sequence (the shift is seeded, so results are
 * reproducible); points outside the ball are rejected pairwise.  The
 * reported standard error is 2 * sd / sqrt(M).  Requires samples >= 64.
 */
OscEstimate osc_xprime(const MatrixField& a, int dim, const Cylinder& Q, int samples,
                       std::uint64_t seed = 0);
OscEstimate osc_xprime(const EllipticOperator& op, const Cylinder& Q, int samples,
                       std::uint64_t seed = 0);

/** Sampled stand-in for sup_x sup_{r <= R} osc: the max over the given
 * centers and radii.  A lower bound of the true sup; callers pick
 * centers that cover the computational box.  All radii must be positive
 * and <= R.
 */
double vmo_modulus(const MatrixField& a, int dim, double R, const std::vector<Point>& centers,
                   const std::vector<double>& radii, int samples, std::uint64_t seed = 0);

/** Least monotone non-decreasing majorant of a sampled modulus table,
 * left-constant between sample radii (omega(r) equals the majorant value
 * at the smallest sampled radius >= r, constant beyond the largest).
 * omega(0) comes from the linear extrapolation through the two smallest
 * sampled radii, clamped into [0, value at the smallest radius].
 */
class OmegaFit {
  public:
    OmegaFit(std::vector<double> radii, std::vector<double> values);

    double operator()(double r) const;
    double at_zero() const { return omega0_; }

  private:
    std::vector<double> r_, v_;  // increasing radii, running-max values
    double omega0_ = 0.0;
};

OmegaFit fit_omega(const std::vector<double>& radii, const std::vector<double>& values);

struct VMOReport {
    std::vector<double> radii;       // decreasing
    std::vector<double> modulus;     // nested max of osc over r <= radii[i]
    std::vector<double> stderr_est;  // standard error of the max-attaining cell
    std::vector<double> omega;       // fitted envelope at each radius
};

/** Evaluate osc over every (center, radius) cell, then report the nested
 * maxima: modulus[i] = max over cells with radius <= radii[i].  The
 * nesting makes the reported modulus non-decreasing in R by
 * construction, matching its definition as a sup over a growing set.
 */
VMOReport vmo_scan(const MatrixField& a, int dim, std::vector<double> radii,
                   const std::vector<Point>& centers, int samples, std::uint64_t seed = 0);

}  // namespace ellipvmo

#endif
