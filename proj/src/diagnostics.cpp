#include "ellipvmo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ellipvmo/parallel.hpp"
#include "ellipvmo/vmo.hpp"

namespace ellipvmo {

namespace {

// Minimal-image displacement along one axis.
double axis_delta(const BoxGrid& g, int axis, double a, double b) {
    double d = a - b;
    if (g.periodic(axis)) {
        const double L = g.length(axis);
        d -= L * std::round(d / L);
    }
    return d;
}

struct BallNode {
    double dist2;
    double weight;
    cplx value;
    double mag;
};

/** Sup over the radius ladder of ball averages around x.  comp >= 0
 * averages |g_comp - mean| when centered, |g_comp| otherwise; comp < 0
 * averages the pointwise magnitude (centered must be false).  Nodes are
 * gathered once for the largest radius, sorted by distance, so each
 * smaller ball is a prefix.
 */
double ball_sup(const GridFunction& g, int comp, const Point& x, const std::vector<double>& radii,
                bool centered, bool* clipped) {
    const BoxGrid& grid = g.grid();
    const int d = grid.dim();
    if (static_cast<int>(x.size()) != d)
        throw std::invalid_argument("ball average: point dimension mismatch");
    if (radii.empty()) throw std::invalid_argument("ball average: radius ladder is empty");
    for (double r : radii)
        if (!(r > 0.0)) throw std::invalid_argument("ball average: radii must be positive");
    if (centered && comp < 0)
        throw std::invalid_argument("ball average: centered form needs a component");

    const double rmax = *std::max_element(radii.begin(), radii.end());
    const double rmax2 = rmax * rmax;

    std::vector<BallNode> nodes;
    std::vector<int> mi(d, 0);
    const std::size_t n = grid.num_points();
    for (std::size_t i = 0; i < n; ++i) {
        double dist2 = 0.0;
        for (int ax = 0; ax < d; ++ax) {
            const double dx = axis_delta(grid, ax, grid.coord(ax, mi[ax]), x[ax]);
            dist2 += dx * dx;
        }
        if (dist2 <= rmax2) {
            double w = 1.0;
            for (int ax = 0; ax < d; ++ax) w *= grid.node_weight(ax, mi[ax]);
            const cplx v = comp >= 0 ? g.at(comp, i) : cplx(0.0);
            const double m = comp >= 0 ? std::abs(v) : g.magnitude(i);
            nodes.push_back({dist2, w, v, m});
        }
        for (int ax = d - 1; ax >= 0; --ax) {
            if (++mi[ax] < grid.size(ax)) break;
            mi[ax] = 0;
        }
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const BallNode& a, const BallNode& b) { return a.dist2 < b.dist2; });

    if (clipped) {
        *clipped = false;
        for (double r : radii) {
            for (int ax = 0; ax < d; ++ax) {
                if (grid.periodic(ax)) continue;
                if (x[ax] - r < grid.lo(ax) || x[ax] + r > grid.hi(ax)) *clipped = true;
            }
        }
    }

    std::vector<double> sorted(radii);
    std::sort(sorted.begin(), sorted.end());

    double best = 0.0;
    std::size_t k = 0;        // nodes[0..k) lie inside the current ball
    double wsum = 0.0, msum = 0.0;
    cplx vsum = 0.0;
    for (double r : sorted) {
        const double r2 = r * r;
        while (k < nodes.size() && nodes[k].dist2 <= r2) {
            wsum += nodes[k].weight;
            msum += nodes[k].weight * nodes[k].mag;
            vsum += nodes[k].weight * nodes[k].value;
            ++k;
        }
        if (wsum <= 0.0) continue;
        double avg;
        if (!centered) {
            avg = msum / wsum;
        } else {
            const cplx mean = vsum / wsum;
            double s = 0.0;
            for (std::size_t i = 0; i < k; ++i)
                s += nodes[i].weight * std::abs(nodes[i].value - mean);
            avg = s / wsum;
        }
        best = std::max(best, avg);
    }
    return best;
}

}  // namespace

std::vector<double> radius_ladder(const BoxGrid& grid) {
    double hmax = 0.0, lmin = std::numeric_limits<double>::infinity();
    for (int ax = 0; ax < grid.dim(); ++ax) {
        hmax = std::max(hmax, grid.spacing(ax));
        lmin = std::min(lmin, grid.length(ax));
    }
    const double r0 = 2.0 * hmax;
    const double rmax = 0.5 * lmin;
    std::vector<double> out;
    if (r0 >= rmax) {
        out.push_back(std::min(r0, rmax));
        return out;
    }
    for (double r = r0; r <= rmax * (1.0 + 1e-12); r *= 1.5) out.push_back(r);
    return out;
}

double maximal_fn(const GridFunction& g, const Point& x, const std::vector<double>& radii,
                  bool* clipped) {
    return ball_sup(g, -1, x, radii, false, clipped);
}

double sharp_fn(const GridFunction& g, const Point& x, const std::vector<double>& radii,
                bool* clipped) {
    if (g.rank() != Rank::scalar)
        throw std::invalid_argument("sharp_fn: scalar fields only");
    return ball_sup(g, 0, x, radii, true, clipped);
}

double slobodeckij_seminorm(const BoxGrid& grid, const std::vector<cplx>& values, double s,
                            double p) {
    const int d = grid.dim();
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("slobodeckij: s must lie in (0,1)");
    if (!(p >= 1.0)) throw std::invalid_argument("slobodeckij: p must be >= 1");
    if (values.size() != grid.stride(0))
        throw std::invalid_argument("slobodeckij: values must cover the x' plane");

    const int dp = d - 1;
    const std::size_t m = values.size();

    // Plane node coordinates and quadrature weights, axes 1..d-1.
    std::vector<double> coords(m * dp), weights(m, 1.0);
    for (std::size_t off = 0; off < m; ++off) {
        for (int ax = 1; ax < d; ++ax) {
            const int idx = static_cast<int>(off / grid.stride(ax)) % grid.size(ax);
            coords[off * dp + (ax - 1)] = grid.coord(ax, idx);
            weights[off] *= grid.node_weight(ax, idx);
        }
    }

    double hmin = std::numeric_limits<double>::infinity();
    for (int ax = 1; ax < d; ++ax) hmin = std::min(hmin, grid.spacing(ax));
    const double cutoff2 = hmin * hmin * (1.0 - 1e-9);
    const double expo = dp + s * p;

    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            double dist2 = 0.0;
            for (int ax = 1; ax < d; ++ax) {
                double dx = coords[i * dp + (ax - 1)] - coords[j * dp + (ax - 1)];
                if (grid.periodic(ax)) {
                    const double L = grid.length(ax);
                    dx -= L * std::round(dx / L);
                }
                dist2 += dx * dx;
            }
            if (dist2 < cutoff2) continue;
            const double diff = std::abs(values[i] - values[j]);
            if (diff == 0.0) continue;
            total += 2.0 * weights[i] * weights[j] * std::pow(diff, p) /
                     std::pow(dist2, 0.5 * expo);
        }
    }
    return std::pow(total, 1.0 / p);
}

double choose_mu(double p) {
    if (p > 4.0) return 2.0;
    if (p > 2.0) return 0.5 * p * (1.0 - 1e-3);
    throw std::invalid_argument("choose_mu: the sharp-function chain needs p > 2");
}

SharpCheckReport sharp_inequality_check(const GridFunction& u, const EllipticOperator& op,
                                        const SharpCheckConfig& cfg) {
    const int d = op.dim();
    if (u.grid().dim() != d)
        throw std::invalid_argument("sharp check: grid dimension mismatch");
    if (u.rank() != Rank::scalar) throw std::invalid_argument("sharp check: u must be scalar");
    if (op.has_b() || op.has_c())
        throw std::invalid_argument("sharp check: lower-order coefficients must be absent");
    if (!(cfg.R > 0.0)) throw std::invalid_argument("sharp check: R must be positive");
    if (cfg.sample_points.empty())
        throw std::invalid_argument("sharp check: no sample points");

    const double mu = cfg.mu;
    if (!(mu > 1.0)) throw std::invalid_argument("sharp check: mu must exceed 1");
    const double nu = cfg.nu != 0.0 ? cfg.nu : mu / (mu - 1.0);
    if (std::abs(1.0 / mu + 1.0 / nu - 1.0) > 1e-9)
        throw std::invalid_argument("sharp check: mu and nu are not conjugate");
    const double alpha_want = 1.0 / (nu * (d + 2));
    const double beta_want = 1.0 / (2.0 * mu);
    const double alpha = cfg.alpha != 0.0 ? cfg.alpha : alpha_want;
    const double beta = cfg.beta != 0.0 ? cfg.beta : beta_want;
    if (std::abs(alpha - alpha_want) > 1e-9 * (1.0 + alpha_want) ||
        std::abs(beta - beta_want) > 1e-9 * (1.0 + beta_want))
        throw std::invalid_argument("sharp check: alpha/beta inconsistent with mu, nu, d");

    const std::vector<double> radii =
        cfg.radii.empty() ? radius_ladder(u.grid()) : cfg.radii;

    const GridFunction lu = apply(op, u, 0.0);
    const GridFunction hess = hessian(u);
    const std::size_t n = u.grid().num_points();

    GridFunction uxx2(u.grid()), uxx2mu(u.grid()), lu2(u.grid());
    for (std::size_t i = 0; i < n; ++i) {
        const double m = hess.magnitude(i);
        uxx2.value(i) = m * m;
        uxx2mu.value(i) = std::pow(m, 2.0 * mu);
        const double l = lu.magnitude(i);
        lu2.value(i) = l * l;
    }

    const MatrixField af = [&op](const Point& x, double* out) { op.a_at(x, out); };
    std::vector<double> vradii;
    for (double r = cfg.R; vradii.size() < 4; r *= 2.0 / 3.0) vradii.push_back(r);
    const double a_sharp =
        vmo_modulus(af, d, cfg.R, cfg.sample_points, vradii, cfg.vmo_samples, cfg.seed);

    SharpCheckReport rep;
    rep.a_sharp = a_sharp;
    rep.alpha = alpha;
    rep.beta = beta;
    rep.n_per_point.assign(cfg.sample_points.size(), 0.0);

    parallel_for(cfg.sample_points.size(), [&](std::size_t ip) {
        const Point& x0 = cfg.sample_points[ip];
        double lhs = 0.0;
        for (int j = 0; j < d; ++j)
            for (int k = 1; k < d; ++k)
                lhs = std::max(lhs, ball_sup(hess, j * d + k, x0, radii, true, nullptr));
        const double m_mu = ball_sup(uxx2mu, -1, x0, radii, false, nullptr);
        const double m_lu = ball_sup(lu2, -1, x0, radii, false, nullptr);
        const double m_2 = ball_sup(uxx2, -1, x0, radii, false, nullptr);
        const double t1 = std::pow(a_sharp, alpha) * std::pow(m_mu, beta);
        const double t2 = std::pow(m_lu, 1.0 / (d + 2)) *
                          std::pow(m_2, d / (2.0 * d + 4.0));
        const double denom = t1 + t2;
        double npt;
        if (lhs <= 0.0)
            npt = 0.0;
        else if (denom > 0.0)
            npt = lhs / denom;
        else
            npt = std::numeric_limits<double>::infinity();
        rep.n_per_point[ip] = npt;
    });

    rep.n_max = 0.0;
    for (double v : rep.n_per_point) rep.n_max = std::max(rep.n_max, v);
    return rep;
}

LpCheckResult lp_estimate_check(const EllipticOperator& op, const GridFunction& u, double p) {
    if (u.grid().dim() != op.dim())
        throw std::invalid_argument("lp check: grid dimension mismatch");
    if (u.rank() != Rank::scalar) throw std::invalid_argument("lp check: u must be scalar");
    if (op.has_b() || op.has_c())
        throw std::invalid_argument("lp check: lower-order coefficients must be absent");

    LpCheckResult res;
    res.uxx_norm = lp_norm(hessian(u), p);
    res.lu_norm = lp_norm(apply(op, u, 0.0), p);
    if (res.lu_norm == 0.0) {
        res.anomaly = true;
        res.ratio = 0.0;
    } else {
        res.ratio = res.uxx_norm / res.lu_norm;
    }
    return res;
}

}  // namespace ellipvmo
