#ifndef ELLIPVMO_COEFFICIENTS_HPP
#define ELLIPVMO_COEFFICIENTS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ellipvmo/grid.hpp"

namespace ellipvmo {

using Point = std::vector<double>;
using ScalarField = std::function<double(const Point&)>;
/// Writes d entries at out.
using VectorField = std::function<void(const Point&, double*)>;
/// Writes d*d row-major entries at out; callers may assume symmetry.
using MatrixField = std::function<void(const Point&, double*)>;

/** Second-order operator a^{jk} D_jk + b^j D_j + c.  The principal part
 * is uniformly elliptic with constant delta: delta |v|^2 <= a v.v <=
 * delta^{-1} |v|^2; lower-order coefficients are bounded by K.  Null b
 * or c closures mean identically zero.  Fields are pure functions of the
 * point, immutable and shareable across threads.
 */
class EllipticOperator {
  public:
    EllipticOperator(int dim, MatrixField a, VectorField b, ScalarField c, double delta,
                     double K);

    int dim() const { return dim_; }
    double delta() const { return delta_; }
    double K() const { return K_; }
    bool has_b() const { return static_cast<bool>(b_); }
    bool has_c() const { return static_cast<bool>(c_); }

    void a_at(const Point& x, double* out) const { a_(x, out); }
    /// Single entry; evaluates the full matrix, prefer a_at in loops.
    double a_entry(const Point& x, int j, int k) const;
    void b_at(const Point& x, double* out) const;
    double c_at(const Point& x) const { return c_ ? c_(x) : 0.0; }

  private:
    int dim_;
    MatrixField a_;
    VectorField b_;
    ScalarField c_;
    double delta_, K_;
};

/// a = identity, b = c = 0, delta = 1, K = 0.
EllipticOperator make_identity(int dim);

/// Constant coefficients; matrix given row-major, must lie in [delta, 1/delta].
EllipticOperator make_constant(int dim, const std::vector<double>& a, double delta, double K);

enum class FamilyKind { constant, measurable_x1, vmo_oscillatory, checkerboard_x1 };

FamilyKind family_kind_from_string(const std::string& s);
std::string to_string(FamilyKind kind);

/** Seeded coefficient family.
 *
 * constant:        one random symmetric matrix, eigenvalues clamped into
 *                  [delta, 1/delta].
 * measurable_x1:   piecewise-constant in x^1 (64 random pieces across the
 *                  declared x^1 range), each piece clamped as above.
 * vmo_oscillatory: a(x) = A(x^1) + epsilon * B(x'/R0) with A piecewise
 *                  constant clamped into [delta + epsilon*d, 1/delta -
 *                  epsilon*d] and B_jk(y') = sin(u_jk . y' + phase_jk)
 *                  for unit vectors u_jk, so each entry of a has exact
 *                  x'-Lipschitz constant epsilon / R0.
 * checkerboard_x1: stripes of width R0 alternating between two clamped
 *                  random matrices.
 *
 * Piece and stripe boundaries sit at x1_lo + (k + 1/pi) * width, never on
 * a grid node.  When K > 0, b and c are drawn with the same x^1 structure,
 * uniform in (-K, K); K = 0 leaves them null.  Every draw passes validate
 * with the declared delta and K.
 */
struct CoefficientFamily {
    FamilyKind kind = FamilyKind::constant;
    std::uint64_t seed = 1;
    double delta = 0.5;
    double epsilon = 0.0;
    double R0 = 1.0;
    double K = 0.0;
};

/// Build the operator for a family; x1_lo/x1_hi bound the piecewise
/// tables in x^1 (lookups clamp outside).  Throws invalid_argument when
/// the parameters cannot satisfy the ellipticity bounds (for example
/// epsilon too large for vmo_oscillatory).
EllipticOperator make_operator(const CoefficientFamily& fam, int dim, double x1_lo,
                               double x1_hi);

/// Parse a family from config keys kind, seed, delta, epsilon, R0, K
/// (missing keys keep defaults).  Throws invalid_argument naming the
/// offending key on malformed values.
CoefficientFamily family_from_map(const std::map<std::string, std::string>& kv);

struct ValidationReport {
    double rayleigh_min = 0.0;
    double rayleigh_max = 0.0;
    double symmetry_defect = 0.0;
    double b_sup = 0.0;
    double c_sup = 0.0;
    bool pass = false;
};

/// Worst-case Rayleigh quotients v.a(x)v / |v|^2 over the sample sets,
/// symmetry defect max |a_jk - a_kj|, and lower-order sup norms.  pass
/// iff quotients lie in [delta, 1/delta] and |b|, |c| <= K, up to 1e-12
/// relative slack.  Empty sample sets are invalid.
ValidationReport validate(const EllipticOperator& op, const std::vector<Point>& points,
                          const std::vector<Point>& directions);

/// a^{jk} u_{x^j x^k} + b^j u_{x^j} + c u - lambda u with the grid
/// module's stencils.  u must be scalar with u.grid().dim() == op.dim().
GridFunction apply(const EllipticOperator& op, const GridFunction& u, double lambda);

/** Parity extension across x^1 = 0 of an operator defined on x^1 >= 0:
 * a^{jk} extends evenly when j = k = 1 or j, k >= 2 and oddly when
 * exactly one index is 1; b^1 odd, b^j (j >= 2) even, c even.  The
 * congruence by diag(-1, I) preserves the ellipticity bounds, so the
 * result validates with the same delta and K.
 *
 * Odd components vanish identically on the reflection plane in the
 * continuum limit; they are zeroed wherever |x^1| <= zero_band so the
 * discrete operator commutes with the reflection exactly (callers pass a
 * small fraction of the grid spacing).
 */
EllipticOperator extend_odd_even(const EllipticOperator& op, double zero_band = 0.0);

/// (x^1, x') -> (-x^1, x' - 2 l' x^1), an involution.  Requires l[0] == 1.
Point phi_map(const std::vector<double>& ell, const Point& x);

/// Jacobian of phi_map: row 0 is (-1, 0, ..., 0), row j >= 1 is
/// -2 l_j e_0 + e_j.  Satisfies J*J = I.
std::vector<double> phi_jacobian(const std::vector<double>& ell, int dim);

/** Pull-back of an operator on x^1 >= 0 through phi_map on the lower
 * half space: for x^1 < 0, a(x) = J a(phi(x)) J^T, b(x) = J b(phi(x)),
 * c(x) = c(phi(x)); the original fields are kept on x^1 >= 0.  The
 * declared delta shrinks by the squared spectral norm of J and K grows
 * by the max absolute row sum of J; both factors depend only on ell.
 */
EllipticOperator oblique_transform(const EllipticOperator& op,
                                   const std::vector<double>& ell);

}  // namespace ellipvmo

#endif
