#include "ellipvmo/halfspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ellipvmo/diagnostics.hpp"
#include "ellipvmo/whole_space.hpp"

namespace ellipvmo {

namespace {

void check_half_grid(const BoxGrid& g, bool need_periodic_xprime) {
    if (g.periodic(0))
        throw std::invalid_argument("half-box: axis 0 must be non-periodic");
    if (g.lo(0) != 0.0)
        throw std::invalid_argument("half-box: axis 0 must start at x^1 = 0");
    if (need_periodic_xprime)
        for (int ax = 1; ax < g.dim(); ++ax)
            if (!g.periodic(ax))
                throw std::invalid_argument("half-box: the x' axes must be periodic here");
}

std::vector<int> xprime_axes(const BoxGrid& g) {
    std::vector<int> axes;
    for (int ax = 1; ax < g.dim(); ++ax) axes.push_back(ax);
    return axes;
}

// Quintic smoothstep ramp on [0,1]: S(0)=0, S(1)=1, S', S'' vanish at
// both ends, so the cutoffs below are C^2.
double ramp(double s) { return ((6.0 * s - 15.0) * s + 10.0) * s * s * s; }
double ramp1(double s) { return ((30.0 * s - 60.0) * s + 30.0) * s * s; }
double ramp2(double s) { return ((120.0 * s - 180.0) * s + 60.0) * s; }

// Cutoff: 1 on (-inf, 1/2], 0 on [1, inf).
double cutoff(double x) {
    if (x <= 0.5) return 1.0;
    if (x >= 1.0) return 0.0;
    return 1.0 - ramp(2.0 * x - 1.0);
}
double cutoff1(double x) {
    if (x <= 0.5 || x >= 1.0) return 0.0;
    return -2.0 * ramp1(2.0 * x - 1.0);
}
double cutoff2(double x) {
    if (x <= 0.5 || x >= 1.0) return 0.0;
    return -4.0 * ramp2(2.0 * x - 1.0);
}

double plane_weight(const BoxGrid& g, std::size_t off) {
    double w = 1.0;
    for (int ax = 1; ax < g.dim(); ++ax) {
        const int idx = static_cast<int>(off / g.stride(ax)) % g.size(ax);
        w *= g.node_weight(ax, idx);
    }
    return w;
}

GridFunction extend_impl(const GridFunction& f, double sgn, bool zero_wall) {
    const BoxGrid& half = f.grid();
    check_half_grid(half, false);
    GridFunction out(mirror_grid(half), f.rank(), f.symmetric());
    const std::size_t s0 = half.stride(0);
    const int k = half.size(0) - 1;
    for (int c = 0; c < f.num_components(); ++c) {
        const std::vector<cplx>& src = f.component(c);
        std::vector<cplx>& dst = out.component(c);
        for (int j = 0; j <= k; ++j) {
            for (std::size_t off = 0; off < s0; ++off) {
                const cplx v = src[j * s0 + off];
                dst[(k + j) * s0 + off] = (j == 0 && zero_wall) ? cplx(0.0) : v;
                if (j > 0) dst[(k - j) * s0 + off] = sgn * v;
            }
        }
    }
    return out;
}

// Second-order one-sided normal derivative on the wall plane.
cplx wall_deriv(const GridFunction& u, std::size_t off) {
    const std::size_t s0 = u.grid().stride(0);
    const double c = 1.0 / (2.0 * u.grid().spacing(0));
    return (-3.0 * u.value(off) + 4.0 * u.value(s0 + off) - u.value(2 * s0 + off)) * c;
}

struct ParityScan {
    double defect = 0.0;  // wrong-parity fraction of the L2 mass
    double wall_max = 0.0;
};

// sgn=+1 measures the even part (solution expected odd), sgn=-1 the odd
// part (solution expected even).
ParityScan parity_scan(const GridFunction& w, double sgn) {
    const BoxGrid& g = w.grid();
    const std::size_t s0 = g.stride(0);
    const int n0 = g.size(0);
    const int k = (n0 - 1) / 2;
    double num = 0.0, den = 0.0;
    ParityScan out;
    for (int i = 0; i < n0; ++i) {
        for (std::size_t off = 0; off < s0; ++off) {
            const cplx a = w.value(i * s0 + off);
            const cplx b = w.value((n0 - 1 - i) * s0 + off);
            const cplx part = 0.5 * (a + sgn * b);
            num += std::norm(part);
            den += std::norm(a);
            if (i == k) out.wall_max = std::max(out.wall_max, std::abs(a));
        }
    }
    out.defect = den > 0.0 ? std::sqrt(num / den) : 0.0;
    return out;
}

HalfSpaceSolution solve_reflect(const HalfSpaceProblem& p, bool odd) {
    const BoxGrid& half = p.f.grid();
    check_half_grid(half, false);
    if (p.f.rank() != Rank::scalar)
        throw std::invalid_argument("half-space solve: f must be scalar");
    if (!(p.lambda > 0.0))
        throw std::invalid_argument("half-space solve: lambda must be positive");

    const GridFunction fe = odd ? extend_odd(p.f) : extend_even(p.f);
    const EllipticOperator ophat = extend_odd_even(p.op, 1e-6 * half.spacing(0));
    const SparseSystem sys = assemble(ophat, fe.grid(), p.lambda, fe);
    SolveResult sr = solve(sys, p.tol, p.maxiter);

    const ParityScan scan = parity_scan(sr.u, odd ? +1.0 : -1.0);

    HalfSpaceSolution sol{restrict_half(half, sr.u), std::move(sr.u)};
    sol.residual = sr.residual;
    sol.iterations = sr.iterations;
    sol.symmetry_defect = scan.defect;
    if (odd) {
        sol.wall_trace = scan.wall_max;
    } else {
        for (std::size_t off = 0; off < half.stride(0); ++off)
            sol.wall_derivative = std::max(sol.wall_derivative, std::abs(wall_deriv(sol.u, off)));
    }
    return sol;
}

}  // namespace

BoxGrid mirror_grid(const BoxGrid& half) {
    check_half_grid(half, false);
    const int d = half.dim();
    std::vector<double> lo(d), hi(d);
    std::vector<int> sz(d);
    std::vector<bool> per(d);
    for (int ax = 0; ax < d; ++ax) {
        lo[ax] = half.lo(ax);
        hi[ax] = half.hi(ax);
        sz[ax] = half.size(ax);
        per[ax] = half.periodic(ax);
    }
    lo[0] = -half.hi(0);
    sz[0] = 2 * half.size(0) - 1;  // same spacing, wall at the middle node
    return BoxGrid(lo, hi, sz, per);
}

GridFunction extend_odd(const GridFunction& f) { return extend_impl(f, -1.0, true); }
GridFunction extend_even(const GridFunction& f) { return extend_impl(f, 1.0, false); }

GridFunction restrict_half(const BoxGrid& half, const GridFunction& full) {
    if (!(mirror_grid(half) == full.grid()))
        throw std::invalid_argument("restrict_half: full grid does not mirror the half grid");
    GridFunction out(half, full.rank(), full.symmetric());
    const std::size_t s0 = half.stride(0);
    const int k = half.size(0) - 1;
    for (int c = 0; c < full.num_components(); ++c)
        for (int j = 0; j <= k; ++j)
            for (std::size_t off = 0; off < s0; ++off)
                out.component(c)[j * s0 + off] = full.component(c)[(k + j) * s0 + off];
    return out;
}

GridFunction shear_x1(const GridFunction& u, const std::vector<double>& ell, double sign) {
    const BoxGrid& g = u.grid();
    const int d = g.dim();
    if (u.rank() != Rank::scalar) throw std::invalid_argument("shear_x1: scalar fields only");
    if (static_cast<int>(ell.size()) != d)
        throw std::invalid_argument("shear_x1: direction dimension mismatch");
    if (ell[0] != 1.0) throw std::invalid_argument("shear_x1: ell must be normalized, ell[0] = 1");
    for (int ax = 1; ax < d; ++ax)
        if (!g.periodic(ax))
            throw std::invalid_argument("shear_x1: the x' axes must be periodic");

    GridFunction m = forward_modes(u, xprime_axes(g));
    const std::size_t s0 = g.stride(0);
    std::vector<double> wdot(s0, 0.0);
    for (std::size_t off = 0; off < s0; ++off)
        for (int ax = 1; ax < d; ++ax) {
            const int kidx = static_cast<int>(off / g.stride(ax)) % g.size(ax);
            wdot[off] += fourier_freq(g, ax, kidx) * 2.0 * ell[ax];
        }
    for (int i = 0; i < g.size(0); ++i) {
        const double x1 = g.coord(0, i);
        for (std::size_t off = 0; off < s0; ++off)
            m.value(i * s0 + off) *= std::polar(1.0, sign * x1 * wdot[off]);
    }
    return inverse_modes(m, xprime_axes(g));
}

HalfSpaceSolution solve_dirichlet(const HalfSpaceProblem& p) {
    if (p.bc != BcKind::dirichlet)
        throw std::invalid_argument("solve_dirichlet: problem is not Dirichlet");
    return solve_reflect(p, true);
}

HalfSpaceSolution solve_neumann(const HalfSpaceProblem& p) {
    if (p.bc != BcKind::neumann)
        throw std::invalid_argument("solve_neumann: problem is not Neumann");
    return solve_reflect(p, false);
}

TraceLift lift_trace(const BoxGrid& half, const std::vector<cplx>& g, double lambda,
                     double p_exp) {
    check_half_grid(half, true);
    if (!(lambda >= 0.0)) throw std::invalid_argument("lift_trace: lambda must be >= 0");
    if (!(p_exp >= 1.0)) throw std::invalid_argument("lift_trace: p must be >= 1");
    const std::size_t s0 = half.stride(0);
    if (!g.empty() && g.size() != s0)
        throw std::invalid_argument("lift_trace: boundary data must cover the x' plane");

    TraceLift out{GridFunction(half), g, std::max(lambda, 1.0), 0.0};
    out.g.resize(s0, cplx(0.0));
    bool zero = true;
    for (const cplx& v : out.g)
        if (v != cplx(0.0)) { zero = false; break; }
    if (zero) return out;

    const int d = half.dim();
    const int n0 = half.size(0);
    GridFunction m(half);
    for (int i = 0; i < n0; ++i)
        for (std::size_t off = 0; off < s0; ++off) m.value(i * s0 + off) = out.g[off];
    m = forward_modes(m, xprime_axes(half));

    std::vector<double> xi2(s0, 0.0);
    for (std::size_t off = 0; off < s0; ++off)
        for (int ax = 1; ax < d; ++ax) {
            const int kidx = static_cast<int>(off / half.stride(ax)) % half.size(ax);
            const double w = fourier_freq(half, ax, kidx);
            xi2[off] += w * w;
        }

    const double sq = std::sqrt(out.lambda_bar);
    const double h0 = half.spacing(0);
    for (int i = 0; i < n0; ++i) {
        const double x1 = half.coord(0, i);
        const double amp = x1 * cutoff(sq * x1);
        const double t = std::max(0.0, x1 - 2.0 * h0);  // unsmoothed first two layers
        for (std::size_t off = 0; off < s0; ++off)
            m.value(i * s0 + off) *= amp * std::exp(-0.5 * t * t * xi2[off]);
    }
    out.v = inverse_modes(m, xprime_axes(half));

    out.lhs = lambda * lp_norm(out.v, p_exp) +
              std::sqrt(lambda) * lp_norm(gradient(out.v), p_exp) +
              lp_norm(hessian(out.v), p_exp);
    return out;
}

HalfSpaceSolution solve_oblique(const HalfSpaceProblem& p) {
    if (p.bc != BcKind::oblique)
        throw std::invalid_argument("solve_oblique: problem is not oblique");
    const BoxGrid& half = p.f.grid();
    check_half_grid(half, true);
    const int d = half.dim();
    if (p.f.rank() != Rank::scalar)
        throw std::invalid_argument("half-space solve: f must be scalar");
    if (!(p.lambda > 0.0))
        throw std::invalid_argument("half-space solve: lambda must be positive");
    if (static_cast<int>(p.ell.size()) != d)
        throw std::invalid_argument("solve_oblique: direction dimension mismatch");
    if (!(p.ell[0] > 0.0))
        throw std::invalid_argument("solve_oblique: ell[0] must be positive");

    std::vector<double> ell(p.ell);
    const double l0 = ell[0];
    for (double& v : ell) v /= l0;  // ell[0] becomes exactly 1
    std::vector<cplx> gn(p.g);
    for (cplx& v : gn) v /= l0;

    const TraceLift lift = lift_trace(half, gn, p.lambda, 2.0);
    const EllipticOperator ophat = oblique_transform(p.op, ell);
    const GridFunction lv = apply(p.op, lift.v, p.lambda);  // L v - lambda v on the half-box
    const GridFunction fsh = shear_x1(p.f, ell, +1.0);

    const BoxGrid full = mirror_grid(half);
    GridFunction fhat(full);
    const std::size_t s0 = half.stride(0);
    const int k = half.size(0) - 1;
    for (int j = 0; j <= k; ++j) {
        for (std::size_t off = 0; off < s0; ++off) {
            const std::size_t hidx = j * s0 + off;
            // Wall node: mean of the two one-sided limits of the extended
            // right side (the lift term enters with weight 1, not 2).
            fhat.value((k + j) * s0 + off) =
                j == 0 ? p.f.value(hidx) - lv.value(hidx)
                       : p.f.value(hidx) - 2.0 * lv.value(hidx);
            if (j > 0) fhat.value((k - j) * s0 + off) = fsh.value(hidx);
        }
    }

    const SparseSystem sys = assemble(ophat, full, p.lambda, fhat);
    SolveResult sr = solve(sys, p.tol, p.maxiter);

    GridFunction u = axpy(2.0, lift.v, restrict_half(half, sr.u));

    HalfSpaceSolution sol{u, std::move(sr.u)};
    sol.residual = sr.residual;
    sol.iterations = sr.iterations;

    const GridFunction ush = shear_x1(u, ell, +1.0);
    for (int j = 0; j <= k; ++j)
        for (std::size_t off = 0; off < s0; ++off)
            sol.mirror_defect =
                std::max(sol.mirror_defect,
                         std::abs(sol.whole.value((k - j) * s0 + off) - ush.value(j * s0 + off)));

    double br = 0.0;
    for (std::size_t off = 0; off < s0; ++off) {
        cplx defect = wall_deriv(u, off) - gn[off];
        for (int ax = 1; ax < d; ++ax) {
            const std::ptrdiff_t st = static_cast<std::ptrdiff_t>(half.stride(ax));
            const int n = half.size(ax);
            const int idx = static_cast<int>(off / half.stride(ax)) % n;
            const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(off);
            const std::size_t up = base + ((idx + 1) % n - idx) * st;
            const std::size_t dn = base + ((idx + n - 1) % n - idx) * st;
            defect += ell[ax] * (u.value(up) - u.value(dn)) / (2.0 * half.spacing(ax));
        }
        br += plane_weight(half, off) * std::norm(defect);
    }
    sol.boundary_residual = std::sqrt(br);
    return sol;
}

RobinReduction robin_reduce(const HalfSpaceProblem& p) {
    if (p.bc != BcKind::robin)
        throw std::invalid_argument("robin_reduce: problem is not Robin");
    const int d = p.op.dim();
    if (static_cast<int>(p.ell.size()) != d)
        throw std::invalid_argument("robin_reduce: direction dimension mismatch");
    if (!(p.ell[0] > 0.0))
        throw std::invalid_argument("robin_reduce: ell[0] must be positive");

    std::vector<double> ell(p.ell);
    const double l0 = ell[0];
    for (double& v : ell) v /= l0;
    const double sig = p.sigma / l0;
    std::vector<cplx> gn(p.g);
    for (cplx& v : gn) v /= l0;

    // h = exp(-sig * x * chi(x)); hp = h'/h and hs = h''/h stay finite.
    const auto Hp = [sig](double x) { return sig * (cutoff(x) + x * cutoff1(x)); };
    const auto Hpp = [sig](double x) { return sig * (2.0 * cutoff1(x) + x * cutoff2(x)); };
    const auto h = [sig](double x) { return std::exp(-sig * x * cutoff(x)); };
    const auto hp = [Hp](double x) { return -Hp(x); };
    const auto hs = [Hp, Hpp](double x) { return Hp(x) * Hp(x) - Hpp(x); };

    RobinReduction out{
        HalfSpaceProblem{p.op, p.f, p.lambda, BcKind::oblique, ell, 0.0, gn, p.tol, p.maxiter},
        [h](double x) { return h(x); },
        [h, hp](double x) { return hp(x) * h(x); },
        [h, hs](double x) { return hs(x) * h(x); }};
    if (sig == 0.0) return out;  // h = 1: identity reduction

    const EllipticOperator base = p.op;
    const MatrixField abar = [base](const Point& x, double* o) { base.a_at(x, o); };
    const VectorField bbar = [base, hp, d](const Point& x, double* o) {
        if (base.has_b())
            base.b_at(x, o);
        else
            std::fill(o, o + d, 0.0);
        const double r = hp(x[0]);
        for (int j = 0; j < d; ++j) o[j] += 2.0 * base.a_entry(x, j, 0) * r;
    };
    const ScalarField cbar = [base, hp, hs](const Point& x) {
        double c = base.c_at(x) + base.a_entry(x, 0, 0) * hs(x[0]);
        if (base.has_b()) {
            std::vector<double> b(base.dim());
            base.b_at(x, b.data());
            c += b[0] * hp(x[0]);
        }
        return c;
    };

    // Declared bound audit: dense sup of |h'/h| and |h''/h| over the
    // support of the cutoff.
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i <= 4096; ++i) {
        const double x = i / 4096.0;
        s1 = std::max(s1, std::abs(hp(x)));
        s2 = std::max(s2, std::abs(hs(x)));
    }
    const double inv_delta = 1.0 / p.op.delta();
    const double kbar = std::max(p.op.K() + 2.0 * inv_delta * s1,
                                 p.op.K() + inv_delta * s2 + p.op.K() * s1);
    out.problem.op = EllipticOperator(d, abar, bbar, cbar, p.op.delta(), kbar);

    const BoxGrid& half = p.f.grid();
    const std::size_t s0 = half.stride(0);
    for (int j = 0; j < half.size(0); ++j) {
        const double scale = 1.0 / h(half.coord(0, j));
        for (std::size_t off = 0; off < s0; ++off) out.problem.f.value(j * s0 + off) *= scale;
    }
    return out;
}

HalfSpaceSolution solve_robin(const HalfSpaceProblem& p) {
    const RobinReduction rr = robin_reduce(p);
    HalfSpaceSolution sol = solve_oblique(rr.problem);
    const BoxGrid& half = sol.u.grid();
    const std::size_t s0 = half.stride(0);
    for (int j = 0; j < half.size(0); ++j) {
        const cplx scale = rr.h(half.coord(0, j));
        for (std::size_t off = 0; off < s0; ++off) sol.u.value(j * s0 + off) *= scale;
    }
    return sol;
}

double oblique_estimate_ratio(const GridFunction& u, const GridFunction& f,
                              const std::vector<cplx>& g, double lambda, double p_exp) {
    const BoxGrid& grid = u.grid();
    if (!(grid == f.grid()))
        throw std::invalid_argument("oblique ratio: u and f live on different grids");
    if (!(p_exp > 1.0)) throw std::invalid_argument("oblique ratio: p must exceed 1");
    if (!(lambda >= 0.0)) throw std::invalid_argument("oblique ratio: lambda must be >= 0");

    const double s = 1.0 - 1.0 / p_exp;
    const double num = lambda * lp_norm(u, p_exp) +
                       std::sqrt(lambda) * lp_norm(gradient(u), p_exp) +
                       lp_norm(hessian(u), p_exp);
    double den = lp_norm(f, p_exp);
    if (!g.empty()) {
        if (g.size() != grid.stride(0))
            throw std::invalid_argument("oblique ratio: boundary data must cover the x' plane");
        double gp = 0.0;
        for (std::size_t off = 0; off < g.size(); ++off)
            gp += plane_weight(grid, off) * std::pow(std::abs(g[off]), p_exp);
        den += std::pow(std::max(lambda, 1.0), 0.5 * s) * std::pow(gp, 1.0 / p_exp) +
               slobodeckij_seminorm(grid, g, s, p_exp);
    }
    if (!(den > 0.0)) throw std::invalid_argument("oblique ratio: zero denominator");
    return num / den;
}

}  // namespace ellipvmo
