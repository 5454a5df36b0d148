#ifndef ELLIPVMO_GRID_HPP
#define ELLIPVMO_GRID_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ellipvmo/common.hpp"

namespace ellipvmo {

/** Truncated computational box with per-axis periodicity.
 *
 * Periodic axes carry n equispaced nodes on [lo, hi) with spacing
 * (hi-lo)/n; non-periodic axes carry n nodes on [lo, hi] inclusive with
 * spacing (hi-lo)/(n-1).  Storage order is row-major with axis 0 slowest.
 */
class BoxGrid {
  public:
    BoxGrid(std::vector<double> lo, std::vector<double> hi, std::vector<int> sizes,
            std::vector<bool> periodic);

    int dim() const { return dim_; }
    int size(int axis) const { return n_[axis]; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    double length(int axis) const { return hi_[axis] - lo_[axis]; }
    bool periodic(int axis) const { return periodic_[axis] != 0; }
    double spacing(int axis) const { return h_[axis]; }
    double coord(int axis, int i) const { return lo_[axis] + h_[axis] * i; }

    std::size_t num_points() const { return npts_; }
    std::size_t stride(int axis) const { return stride_[axis]; }

    std::size_t flat(const std::vector<int>& mi) const;
    std::vector<int> unflatten(std::size_t flat) const;
    std::vector<double> point(std::size_t flat) const;

    /// Quadrature weight along one axis: h on periodic axes, trapezoid
    /// (half weight at the two end nodes) on non-periodic axes, so that
    /// constant fields integrate to the exact box volume.
    double node_weight(int axis, int i) const;
    double cell_volume() const;  // product of spacings
    double volume() const;       // product of lengths

    bool operator==(const BoxGrid& o) const;
    bool operator!=(const BoxGrid& o) const { return !(*this == o); }

  private:
    int dim_;
    std::vector<double> lo_, hi_, h_;
    std::vector<int> n_;
    std::vector<std::uint8_t> periodic_;
    std::vector<std::size_t> stride_;
    std::size_t npts_;
};

enum class Rank { scalar, vector, matrix };

/** Sampled scalar/vector/matrix field on a BoxGrid, stored as complex. */
class GridFunction {
  public:
    GridFunction(BoxGrid grid, Rank rank = Rank::scalar, bool symmetric = false);

    static GridFunction sample(const BoxGrid& grid,
                               const std::function<cplx(const std::vector<double>&)>& fn);

    const BoxGrid& grid() const { return grid_; }
    Rank rank() const { return rank_; }
    bool symmetric() const { return symmetric_; }
    int num_components() const { return static_cast<int>(comp_.size()); }

    std::vector<cplx>& component(int c) { return comp_[c]; }
    const std::vector<cplx>& component(int c) const { return comp_[c]; }

    cplx& at(int c, std::size_t i) { return comp_[c][i]; }
    const cplx& at(int c, std::size_t i) const { return comp_[c][i]; }

    /// Scalar-rank value accessor.
    cplx& value(std::size_t i) { return comp_[0][i]; }
    const cplx& value(std::size_t i) const { return comp_[0][i]; }

    /// Pointwise magnitude: |u| for scalars, Euclidean norm for vectors,
    /// Frobenius norm for matrices.
    double magnitude(std::size_t i) const;

  private:
    BoxGrid grid_;
    Rank rank_;
    bool symmetric_;
    std::vector<std::vector<cplx>> comp_;
};

/// Half-open index ranges, one [begin, end) pair per axis.
struct Region {
    std::vector<std::array<int, 2>> range;

    static Region whole(const BoxGrid& grid);
    bool empty() const;
    std::size_t count() const;
};

/// Finite differences: second-order central stencils in the interior,
/// wrap-around on periodic axes, second-order one-sided stencils at
/// non-periodic edges.  order must be 1 or 2.
GridFunction diff(const GridFunction& u, int axis, int order);

/// All first derivatives as a vector-rank field.
GridFunction gradient(const GridFunction& u);

/// All second derivatives as a matrix-rank field; mixed entries are
/// composed first-order differences, H[j][k] = diff(diff(u,j,1),k,1).
GridFunction hessian(const GridFunction& u);

double lp_norm(const GridFunction& u, double p);
double lp_norm(const GridFunction& u, double p, const Region& region);
double sup_norm(const GridFunction& u);
double sup_norm(const GridFunction& u, const Region& region);
double max_imag(const GridFunction& u);

/// alpha*x + y, gridwise.
GridFunction axpy(cplx alpha, const GridFunction& x, const GridFunction& y);
GridFunction scale(cplx alpha, const GridFunction& x);

/// Discrete Fourier transform along the given periodic axes.  Forward
/// normalizes by 1/prod(n) so a pure mode e^{i xi x} has unit coefficient;
/// inverse_modes(forward_modes(u)) == u to roundoff.
GridFunction forward_modes(const GridFunction& u, const std::vector<int>& axes);
GridFunction inverse_modes(const GridFunction& u, const std::vector<int>& axes);

/// Signed integer frequency index in (-n/2, n/2] for storage index k.
int signed_mode(int k, int n);
/// Continuum frequency 2*pi*signed_mode/L along a periodic axis.
double fourier_freq(const BoxGrid& grid, int axis, int k);

void save_grid_function(const std::string& path, const GridFunction& u);
GridFunction load_grid_function(const std::string& path);
/// CSV dump (coordinates + re + im per component); d <= 2 only.
void write_csv(const std::string& path, const GridFunction& u);

/// Iterate every node: fn(flat_index, multi_index).
void for_each_point(const BoxGrid& grid,
                    const std::function<void(std::size_t, const std::vector<int>&)>& fn);

}  // namespace ellipvmo

#endif
