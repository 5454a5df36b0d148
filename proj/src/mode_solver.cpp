#include "ellipvmo/mode_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "ellipvmo/parallel.hpp"

namespace ellipvmo {

LineGrid::LineGrid(double lo_, double hi_, int n_) : lo(lo_), hi(hi_), n(n_) {
    if (!(lo < hi)) throw std::invalid_argument("LineGrid: need lo < hi");
    if (n < 4) throw std::invalid_argument("LineGrid: need at least 4 nodes");
}

LineGrid LineGrid::x1_axis(const BoxGrid& g) {
    if (g.periodic(0))
        throw std::invalid_argument("LineGrid::x1_axis: axis 0 must be non-periodic");
    return LineGrid(g.lo(0), g.hi(0), g.size(0));
}

namespace {

// Sampled x'-independence probe: compares a at a few off-axis points
// against the x' = 0 column.  Heuristic by necessity; the probe offsets
// are fixed irrationals so periodic ripples cannot hide on them.
void require_x1_only(const EllipticOperator& op, const LineGrid& line) {
    const int d = op.dim();
    std::vector<double> base(static_cast<std::size_t>(d) * d),
        probe(static_cast<std::size_t>(d) * d);
    constexpr double offs[2] = {0.731913, -2.417331};
    for (int i = 0; i < 8; ++i) {
        Point x(d, 0.0);
        x[0] = line.lo + (line.hi - line.lo) * i / 7.0;
        op.a_at(x, base.data());
        for (int ax = 1; ax < d; ++ax)
            for (double o : offs) {
                Point y = x;
                y[ax] = o;
                op.a_at(y, probe.data());
                for (int e = 0; e < d * d; ++e)
                    if (std::abs(probe[e] - base[e]) > 1e-12)
                        throw std::invalid_argument(
                            "mode solver: coefficients must depend on x^1 only");
            }
    }
}

std::vector<cplx> line_diff(const std::vector<cplx>& v, double h, int order) {
    const int n = static_cast<int>(v.size());
    std::vector<cplx> out(n);
    if (order == 1) {
        for (int i = 1; i + 1 < n; ++i) out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
        out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    } else {
        const double h2 = h * h;
        for (int i = 1; i + 1 < n; ++i) out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
        out[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
    }
    return out;
}

double trapz_sq(const std::vector<cplx>& v, double h) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double w = (i == 0 || i + 1 == v.size()) ? 0.5 * h : h;
        s += w * std::norm(v[i]);
    }
    return s;
}

/** Tridiagonal elimination with adjacent-row partial pivoting.  Row i
 * holds (sub[i], dia[i], sup[i]); pivoting introduces the second
 * superdiagonal sup2.  Falls back to plain Thomas sweeps whenever the
 * diagonal already dominates.  All inputs are overwritten.
 */
std::vector<cplx> tridiag_solve(std::vector<cplx> sub, std::vector<cplx> dia,
                                std::vector<cplx> sup, std::vector<cplx> rhs) {
    const int m = static_cast<int>(dia.size());
    std::vector<cplx> sup2(m, cplx(0.0, 0.0));
    double scale = 0.0;
    for (int i = 0; i < m; ++i)
        scale = std::max({scale, std::abs(sub[i]), std::abs(dia[i]), std::abs(sup[i])});
    const double tiny = scale * 1e-300 + std::numeric_limits<double>::min();

    for (int i = 0; i < m; ++i) {
        if (i + 1 < m && std::abs(sub[i + 1]) > std::abs(dia[i])) {
            std::swap(dia[i], sub[i + 1]);
            std::swap(sup[i], dia[i + 1]);
            std::swap(sup2[i], sup[i + 1]);
            std::swap(rhs[i], rhs[i + 1]);
        }
        if (std::abs(dia[i]) <= tiny)
            throw SingularSystemError("mode solve: zero pivot in tridiagonal elimination");
        if (i + 1 < m) {
            const cplx f = sub[i + 1] / dia[i];
            sub[i + 1] = 0.0;
            dia[i + 1] -= f * sup[i];
            sup[i + 1] -= f * sup2[i];
            rhs[i + 1] -= f * rhs[i];
        }
    }
    std::vector<cplx> x(m);
    for (int i = m - 1; i >= 0; --i) {
        cplx acc = rhs[i];
        if (i + 1 < m) acc -= sup[i] * x[i + 1];
        if (i + 2 < m) acc -= sup2[i] * x[i + 2];
        x[i] = acc / dia[i];
    }
    return x;
}

}  // namespace

ModeProblem assemble_mode_symbols(const EllipticOperator& op, const std::vector<double>& xi,
                                  const std::vector<double>& s, const std::vector<double>& q2,
                                  double lambda, std::vector<cplx> f_slice,
                                  const LineGrid& line) {
    const int d = op.dim();
    if (xi.size() != static_cast<std::size_t>(d - 1) || s.size() != xi.size() ||
        q2.size() != xi.size())
        throw std::invalid_argument("assemble_mode: frequency vectors must have d-1 entries");
    if (lambda < 0.0) throw std::invalid_argument("assemble_mode: lambda must be >= 0");
    if (f_slice.size() != static_cast<std::size_t>(line.n))
        throw std::invalid_argument("assemble_mode: rhs length must match the line");
    if (op.has_b() || op.has_c())
        throw std::invalid_argument("assemble_mode: lower-order coefficients must be absent");
    require_x1_only(op, line);

    ModeProblem mp;
    mp.line = line;
    mp.xi = xi;
    mp.lambda = lambda;
    mp.rhs = std::move(f_slice);
    mp.xi_sq = 0.0;
    for (double q : q2) {
        if (q < 0.0) throw std::invalid_argument("assemble_mode: q2 symbols must be >= 0");
        mp.xi_sq += q;
    }
    mp.a.resize(line.n);
    mp.b.resize(line.n);
    mp.c.resize(line.n);
    std::vector<double> am(static_cast<std::size_t>(d) * d);
    Point x(d, 0.0);
    for (int i = 0; i < line.n; ++i) {
        x[0] = line.coord(i);
        op.a_at(x, am.data());
        mp.a[i] = am[0];
        double bb = 0.0, cc = 0.0;
        for (int j = 1; j < d; ++j) {
            bb += am[j] * s[j - 1];
            cc += am[static_cast<std::size_t>(j) * d + j] * q2[j - 1];
            for (int k = 1; k < d; ++k)
                if (k != j) cc += am[static_cast<std::size_t>(j) * d + k] * s[j - 1] * s[k - 1];
        }
        mp.b[i] = bb;
        mp.c[i] = cc + lambda;
    }
    return mp;
}

ModeProblem assemble_mode(const EllipticOperator& op, const std::vector<double>& xi,
                          double lambda, std::vector<cplx> f_slice, const LineGrid& line) {
    std::vector<double> q2(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j) q2[j] = xi[j] * xi[j];
    return assemble_mode_symbols(op, xi, xi, q2, lambda, std::move(f_slice), line);
}

CoercivityReport check_coercivity(const ModeProblem& mp, double delta) {
    if (mp.a.empty()) throw std::invalid_argument("check_coercivity: empty problem");
    const double xs = mp.xi_sq, la = mp.lambda;
    const double inv = 1.0 / delta;
    CoercivityReport rep;
    const double inf = std::numeric_limits<double>::infinity();
    rep.margin_a_lo = rep.margin_a_hi = rep.margin_b = inf;
    rep.margin_c_lo = rep.margin_c_hi = rep.margin_det = inf;
    for (std::size_t i = 0; i < mp.a.size(); ++i) {
        const double a = mp.a[i], b = mp.b[i], c = mp.c[i];
        rep.margin_a_lo = std::min(rep.margin_a_lo, a - delta);
        rep.margin_a_hi = std::min(rep.margin_a_hi, inv - a);
        rep.margin_b = std::min(rep.margin_b, inv * std::sqrt(xs) - std::abs(b));
        rep.margin_c_lo = std::min(rep.margin_c_lo, c - (delta * xs + la));
        rep.margin_c_hi = std::min(rep.margin_c_hi, inv * (xs + la) - c);
        rep.margin_det = std::min(rep.margin_det, a * c - b * b - delta * delta * (xs + la));
    }
    const double tol = 1e-12 * (1.0 + xs + la) / (delta * delta);
    rep.pass = rep.margin_a_lo >= -tol && rep.margin_a_hi >= -tol && rep.margin_b >= -tol &&
               rep.margin_c_lo >= -tol && rep.margin_c_hi >= -tol && rep.margin_det >= -tol;
    return rep;
}

ModeSolution solve_mode(const ModeProblem& mp) {
    const int n = mp.line.n;
    if (static_cast<int>(mp.a.size()) != n || static_cast<int>(mp.rhs.size()) != n)
        throw std::invalid_argument("solve_mode: problem arrays must match the line");
    const double h = mp.line.h();
    const double h2 = h * h;
    const cplx iu(0.0, 1.0);

    const int m = n - 2;
    std::vector<cplx> sub(m), dia(m), sup(m), rhs(m);
    for (int k = 0; k < m; ++k) {
        const int i = k + 1;
        const double bh = mp.b[i] / mp.a[i];
        const double ch = mp.c[i] / mp.a[i];
        const cplx g = mp.rhs[i] / mp.a[i];
        sub[k] = 1.0 / h2 - iu * bh / h;
        dia[k] = -2.0 / h2 - ch;
        sup[k] = 1.0 / h2 + iu * bh / h;
        rhs[k] = g;
    }
    std::vector<cplx> inner = tridiag_solve(sub, dia, sup, rhs);

    ModeSolution sol;
    sol.u.assign(n, cplx(0.0, 0.0));
    for (int k = 0; k < m; ++k) sol.u[k + 1] = inner[k];

    sol.residual = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const double bh = mp.b[i] / mp.a[i];
        const double ch = mp.c[i] / mp.a[i];
        const cplx g = mp.rhs[i] / mp.a[i];
        const cplx defect = (sol.u[i + 1] - 2.0 * sol.u[i] + sol.u[i - 1]) / h2 +
                            iu * bh * (sol.u[i + 1] - sol.u[i - 1]) / h - ch * sol.u[i] - g;
        sol.residual = std::max(sol.residual, std::abs(defect));
    }
    const auto [n1, n2] = energy_check(sol, mp);
    sol.n1_emp = n1;
    sol.n2_emp = n2;
    return sol;
}

std::pair<double, double> energy_check(const ModeSolution& sol, const ModeProblem& mp) {
    const double h = mp.line.h();
    const double ff = trapz_sq(mp.rhs, h);
    if (ff == 0.0) {
        if (trapz_sq(sol.u, h) == 0.0) return {0.0, 0.0};
        throw std::runtime_error("energy_check: zero rhs with nonzero solution");
    }
    const std::vector<cplx> du = line_diff(sol.u, h, 1);
    const std::vector<cplx> ddu = line_diff(sol.u, h, 2);
    const double xs = mp.xi_sq, la = mp.lambda;
    const double n1 =
        ((xs + la) * trapz_sq(du, h) + (xs * xs + la * xs + la * la) * trapz_sq(sol.u, h)) / ff;
    const double n2 = trapz_sq(ddu, h) / ff;
    return {n1, n2};
}

FactorResult integrating_factor(const ModeProblem& mp, const ModeSolution& sol) {
    const int n = mp.line.n;
    const double h = mp.line.h();
    std::vector<double> bh(n);
    for (int i = 0; i < n; ++i) bh[i] = mp.b[i] / mp.a[i];

    std::vector<double> T(n, 0.0);
    for (int i = 1; i < n; ++i) T[i] = T[i - 1] + 0.5 * h * (bh[i - 1] + bh[i]);

    // Anchor phi(0) = 0 by subtracting the trapezoid value at x^1 = 0
    // (clamped to the nearer end when 0 lies outside the line).
    double Tz;
    if (0.0 <= mp.line.lo) {
        Tz = T[0];
    } else if (0.0 >= mp.line.hi) {
        Tz = T[n - 1];
    } else {
        int j = static_cast<int>(std::floor((0.0 - mp.line.lo) / h));
        j = std::clamp(j, 0, n - 2);
        const double w = 0.0 - mp.line.coord(j);
        const double b0 = bh[j] + (bh[j + 1] - bh[j]) * (w / h);
        Tz = T[j] + 0.5 * w * (bh[j] + b0);
    }

    FactorResult out;
    out.phi.resize(n);
    out.rho.resize(n);
    for (int i = 0; i < n; ++i) {
        out.phi[i] = T[i] - Tz;
        out.rho[i] = sol.u[i] * std::exp(cplx(0.0, out.phi[i]));
        out.mag_defect =
            std::max(out.mag_defect, std::abs(std::abs(out.rho[i]) - std::abs(sol.u[i])));
    }
    return out;
}

WholeSpaceX1Result solve_whole_space_x1(const EllipticOperator& op, const GridFunction& f,
                                        double lambda) {
    const BoxGrid& g = f.grid();
    const int d = g.dim();
    if (d != op.dim()) throw std::invalid_argument("solve_whole_space_x1: dimension mismatch");
    if (f.rank() != Rank::scalar)
        throw std::invalid_argument("solve_whole_space_x1: f must be scalar");
    if (!(lambda > 0.0)) throw std::invalid_argument("solve_whole_space_x1: lambda must be > 0");
    if (g.periodic(0))
        throw std::invalid_argument("solve_whole_space_x1: axis 0 must be non-periodic");
    std::vector<int> xaxes;
    for (int ax = 1; ax < d; ++ax) {
        if (!g.periodic(ax))
            throw std::invalid_argument("solve_whole_space_x1: x' axes must be periodic");
        xaxes.push_back(ax);
    }
    const LineGrid line = LineGrid::x1_axis(g);

    GridFunction fhat = forward_modes(f, xaxes);
    GridFunction uhat(g);
    const std::size_t nmodes = g.stride(0);
    const int n1 = g.size(0);

    double max_resid = 0.0;
    std::mutex resid_mutex;
    parallel_chunks(nmodes, [&](std::size_t begin, std::size_t end) {
        std::vector<double> xi(d - 1), s(d - 1), q2(d - 1);
        std::vector<cplx> slice(n1);
        double local_resid = 0.0;
        for (std::size_t off = begin; off < end; ++off) {
            for (int ax = 1; ax < d; ++ax) {
                const int k = static_cast<int>(off / g.stride(ax)) % g.size(ax);
                const double freq = fourier_freq(g, ax, k);
                const double hh = g.spacing(ax);
                xi[ax - 1] = freq;
                s[ax - 1] = std::sin(freq * hh) / hh;
                q2[ax - 1] = 2.0 * (1.0 - std::cos(freq * hh)) / (hh * hh);
            }
            for (int i = 0; i < n1; ++i) slice[i] = fhat.value(off + i * g.stride(0));
            ModeProblem mp = assemble_mode_symbols(op, xi, s, q2, lambda, slice, line);
            ModeSolution sol = solve_mode(mp);
            local_resid = std::max(local_resid, sol.residual);
            for (int i = 0; i < n1; ++i) uhat.value(off + i * g.stride(0)) = sol.u[i];
        }
        std::lock_guard<std::mutex> lock(resid_mutex);
        max_resid = std::max(max_resid, local_resid);
    });

    WholeSpaceX1Result out{inverse_modes(uhat, xaxes), 0.0, max_resid};

    Region interior = Region::whole(g);
    interior.range[0] = {1, g.size(0) - 1};
    const GridFunction defect = axpy(cplx(-1.0, 0.0), f, apply(op, out.u, lambda));
    const double fn = lp_norm(f, 2.0, interior);
    out.residual_rel = fn > 0.0 ? lp_norm(defect, 2.0, interior) / fn : lp_norm(defect, 2.0, interior);
    return out;
}

}  // namespace ellipvmo
