// Command-line front end: experiment orchestration and report emission.
// Subcommands share one config format (see include/ellipvmo/config.hpp);
// every run writes CSV reports plus a JSON manifest into the output
// directory.  Exit codes: 0 ok, 1 solver failure, 2 config error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ellipvmo/common.hpp"
#include "ellipvmo/config.hpp"
#include "ellipvmo/diagnostics.hpp"
#include "ellipvmo/grid.hpp"
#include "ellipvmo/halfspace.hpp"
#include "ellipvmo/mode_solver.hpp"
#include "ellipvmo/parallel.hpp"
#include "ellipvmo/rng.hpp"
#include "ellipvmo/vmo.hpp"
#include "ellipvmo/whole_space.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ellipvmo;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunContext {
    ExperimentConfig cfg;
    std::string config_path;
    std::string subcommand;
    fs::path outdir;
    std::map<std::string, double> timings_ms;
    std::vector<std::string> outputs;
};

class Stopwatch {
  public:
    Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point t0_;
};

std::string iso_utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const RunContext& ctx, const std::string& status, double residual) {
    json j;
    j["tool"] = "ellipvmo";
    j["version"] = kVersion;
    j["subcommand"] = ctx.subcommand;
    j["config"] = ctx.config_path;
    j["config_hash"] = hash_hex(config_hash(ctx.cfg));
    j["family"] = to_string(ctx.cfg.family.kind);
    j["seed"] = ctx.cfg.seed;
    j["status"] = status;
    if (residual == residual) j["residual"] = residual;
    json t = json::object();
    for (const auto& [name, ms] : ctx.timings_ms) t[name] = ms;
    j["timings_ms"] = t;
    j["outputs"] = ctx.outputs;
    j["generated_at"] = iso_utc_now();  // the one timestamp any output carries
    std::ofstream out(ctx.outdir / "manifest.json", std::ios::binary);
    out << j.dump(2) << "\n";
}

// RFC-4180 CSV: header row, CRLF, no quoting needed for our fields.
class Csv {
  public:
    Csv(const fs::path& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        row(header);
    }
    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << "\r\n";
    }

  private:
    std::ofstream out_;
};

std::string grid_label(const BoxGrid& g) {
    std::string s;
    for (int ax = 0; ax < g.dim(); ++ax) {
        if (ax) s += 'x';
        s += std::to_string(g.size(ax));
    }
    return s;
}

BoxGrid grid_from(const ExperimentConfig& cfg) {
    return BoxGrid(cfg.lo, cfg.hi, cfg.n, cfg.periodic);
}

EllipticOperator op_from(const ExperimentConfig& cfg) {
    return make_operator(cfg.family, cfg.dim, cfg.lo[0], cfg.hi[0]);
}

void require_axis0_truncated(const ExperimentConfig& cfg, const char* sub) {
    if (cfg.periodic[0])
        throw ConfigError(std::string("config: grid.periodic: axis 0 must be 0 for ") + sub);
}

void require_xprime_periodic(const ExperimentConfig& cfg, const char* sub) {
    for (int ax = 1; ax < cfg.dim; ++ax)
        if (!cfg.periodic[ax])
            throw ConfigError(std::string("config: grid.periodic: the x' axes must be 1 for ") +
                              sub);
}

struct TrigTerm {
    double coeff;
    std::vector<double> freq, phase;  // per axis
};

// Seeded band-limited field: a few products of per-axis waves.  On
// non-periodic axes the waves vanish at both ends, matching the
// homogeneous truncation rows of the solvers.
std::vector<TrigTerm> draw_terms(const BoxGrid& g, std::uint64_t seed, int count) {
    Rng rng(splitmix64(seed));
    std::vector<TrigTerm> terms;
    for (int m = 0; m < count; ++m) {
        TrigTerm t;
        t.coeff = rng.uniform(-1.0, 1.0);
        for (int ax = 0; ax < g.dim(); ++ax) {
            const int k = 1 + static_cast<int>(rng.bits() % 3);
            t.freq.push_back(k);
            t.phase.push_back(g.periodic(ax) ? rng.uniform(0.0, 2.0 * pi) : 0.0);
        }
        terms.push_back(t);
    }
    return terms;
}

double eval_terms(const BoxGrid& g, const std::vector<TrigTerm>& terms, const Point& x) {
    double sum = 0.0;
    for (const TrigTerm& t : terms) {
        double prod = t.coeff;
        for (int ax = 0; ax < g.dim(); ++ax) {
            const double s = (x[ax] - g.lo(ax)) / g.length(ax);
            prod *= g.periodic(ax) ? std::cos(2.0 * pi * t.freq[ax] * s + t.phase[ax])
                                   : std::sin(pi * t.freq[ax] * s);
        }
        sum += prod;
    }
    return sum;
}

GridFunction build_rhs(const BoxGrid& g, const ExperimentConfig& cfg) {
    if (cfg.rhs == "zero") return GridFunction(g);
    if (cfg.rhs == "gaussian") {
        std::vector<double> c(g.dim());
        double w = g.length(0);
        for (int ax = 0; ax < g.dim(); ++ax) {
            c[ax] = 0.5 * (g.lo(ax) + g.hi(ax));
            w = std::min(w, g.length(ax));
        }
        w /= 6.0;
        return GridFunction::sample(g, [c, w](const Point& x) {
            double r2 = 0.0;
            for (std::size_t ax = 0; ax < c.size(); ++ax)
                r2 += (x[ax] - c[ax]) * (x[ax] - c[ax]);
            return cplx(std::exp(-r2 / (w * w)));
        });
    }
    const std::vector<TrigTerm> terms = draw_terms(g, cfg.seed, 6);
    return GridFunction::sample(
        g, [&g, terms](const Point& x) { return cplx(eval_terms(g, terms, x)); });
}

// Smooth compact bump, B(0) = 1, support |t| < 1.
double bump(double t) {
    const double s = t * t;
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s));
}

// Manufactured field: compact bump along x^1 centred in the box, smooth
// periodic waves in x'.  Supported away from the truncation faces, so a
// solver fed f = apply(op, u, lambda) should reproduce it.
GridFunction manufactured_u(const BoxGrid& g) {
    return GridFunction::sample(g, [&g](const Point& x) {
        const double mid = 0.5 * (g.lo(0) + g.hi(0));
        double v = bump((x[0] - mid) / (0.4 * g.length(0)));
        for (int ax = 1; ax < g.dim(); ++ax) {
            const double s = (x[ax] - g.lo(ax)) / g.length(ax);
            v *= 0.6 + 0.4 * std::sin(2.0 * pi * s + 0.7 * ax);
        }
        return cplx(v);
    });
}

std::vector<cplx> build_boundary(const BoxGrid& g, const ExperimentConfig& cfg) {
    if (cfg.boundary == "zero") return {};
    const std::vector<TrigTerm> terms = draw_terms(g, cfg.seed ^ 0x9e3779b97f4a7c15ull, 3);
    std::vector<cplx> out(g.stride(0));
    Point x(g.dim(), 0.0);
    for (std::size_t off = 0; off < out.size(); ++off) {
        for (int ax = 1; ax < g.dim(); ++ax) {
            const int idx = static_cast<int>(off / g.stride(ax)) % g.size(ax);
            x[ax] = g.coord(ax, idx);
        }
        x[0] = 0.0;
        out[off] = eval_terms(g, terms, x);
    }
    return out;
}

Region interior_region(const BoxGrid& g) {
    Region r = Region::whole(g);
    if (!g.periodic(0)) r.range[0] = {1, g.size(0) - 1};
    return r;
}

double sup_error(const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.grid().num_points(); ++i)
        m = std::max(m, std::abs(a.value(i) - b.value(i)));
    return m;
}

void run_solve(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    require_axis0_truncated(cfg, "solve");
    if (cfg.rhs == "zero" && cfg.solution == "none")
        throw ConfigError("config: rhs: solve needs a nonzero right-hand side");
    const BoxGrid grid = grid_from(cfg);
    const EllipticOperator op = op_from(cfg);
    const bool man = cfg.solution == "product_bump";
    const GridFunction uman = man ? manufactured_u(grid) : GridFunction(grid);
    const GridFunction fbase = man ? GridFunction(grid) : build_rhs(grid, cfg);

    Csv csv(ctx.outdir / "solve.csv", {"family", "seed", "p", "lambda", "grid", "rho", "residual",
                                       "iterations", "err_sup"});
    ctx.outputs.push_back("solve.csv");
    const Region inner = interior_region(grid);

    double assemble_ms = 0.0, solve_ms = 0.0;
    for (std::size_t il = 0; il < cfg.lambdas.size(); ++il) {
        const double lambda = cfg.lambdas[il];
        const GridFunction f = man ? apply(op, uman, lambda) : fbase;
        Stopwatch sa;
        const SparseSystem sys = assemble(op, grid, lambda, f);
        assemble_ms += sa.ms();
        Stopwatch ss;
        const SolveResult sr = solve(sys, cfg.tol);
        solve_ms += ss.ms();

        const std::string uname = "u_" + std::to_string(il) + ".evgf";
        save_grid_function((ctx.outdir / uname).string(), sr.u);
        ctx.outputs.push_back(uname);

        for (double p : cfg.ps) {
            const double rho = apriori_ratio(sr.u, f, lambda, p, inner);
            csv.row({to_string(cfg.family.kind), std::to_string(cfg.seed), format_double(p),
                     format_double(lambda), grid_label(grid), format_double(rho),
                     format_double(sr.residual), std::to_string(sr.iterations),
                     man ? format_double(sup_error(sr.u, uman)) : ""});
        }
    }
    ctx.timings_ms["assemble"] = assemble_ms;
    ctx.timings_ms["solve"] = solve_ms;
}

void run_modes(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    require_axis0_truncated(cfg, "modes");
    require_xprime_periodic(cfg, "modes");
    if (cfg.family.kind == FamilyKind::vmo_oscillatory)
        throw ConfigError("config: family.kind: modes needs coefficients depending on x^1 only");
    if (cfg.rhs == "zero")
        throw ConfigError("config: rhs: modes needs a nonzero right-hand side");
    const BoxGrid grid = grid_from(cfg);
    const EllipticOperator op = op_from(cfg);
    const GridFunction f = build_rhs(grid, cfg);
    const int d = cfg.dim;

    std::vector<std::string> header = {"lambda"};
    for (int ax = 1; ax < d; ++ax) header.push_back("k" + std::to_string(ax + 1));
    for (const char* c : {"xi_abs", "residual", "n1", "n2"}) header.push_back(c);
    Csv csv(ctx.outdir / "modes.csv", header);
    ctx.outputs.push_back("modes.csv");

    std::vector<int> axes;
    for (int ax = 1; ax < d; ++ax) axes.push_back(ax);
    const GridFunction fhat = forward_modes(f, axes);
    const LineGrid line = LineGrid::x1_axis(grid);
    const std::size_t s0 = grid.stride(0);

    double spectral_ms = 0.0, modes_ms = 0.0;
    for (std::size_t il = 0; il < cfg.lambdas.size(); ++il) {
        const double lambda = cfg.lambdas[il];
        Stopwatch sw;
        const WholeSpaceX1Result ws = solve_whole_space_x1(op, f, lambda);
        spectral_ms += sw.ms();
        const std::string uname = "u_" + std::to_string(il) + ".evgf";
        save_grid_function((ctx.outdir / uname).string(), ws.u);
        ctx.outputs.push_back(uname);

        Stopwatch sm;
        Rng rng(splitmix64(cfg.seed ^ (0xA5A5ull + il)));
        for (int im = 0; im < cfg.xi_count; ++im) {
            const std::size_t off = rng.bits() % s0;
            std::vector<double> xi, s, q2;
            std::vector<int> kidx;
            for (int ax = 1; ax < d; ++ax) {
                const int k = static_cast<int>(off / grid.stride(ax)) % grid.size(ax);
                kidx.push_back(signed_mode(k, grid.size(ax)));
                const double w = fourier_freq(grid, ax, k);
                const double h = grid.spacing(ax);
                xi.push_back(w);
                s.push_back(std::sin(w * h) / h);
                q2.push_back(2.0 * (1.0 - std::cos(w * h)) / (h * h));
            }
            std::vector<cplx> slice(line.n);
            for (int i = 0; i < line.n; ++i) slice[i] = fhat.value(i * s0 + off);
            const ModeProblem mp = assemble_mode_symbols(op, xi, s, q2, lambda, slice, line);
            const ModeSolution ms = solve_mode(mp);
            double xa = 0.0;
            for (double w : xi) xa += w * w;
            std::vector<std::string> row = {format_double(lambda)};
            for (int k : kidx) row.push_back(std::to_string(k));
            row.push_back(format_double(std::sqrt(xa)));
            row.push_back(format_double(ms.residual));
            row.push_back(format_double(ms.n1_emp));
            row.push_back(format_double(ms.n2_emp));
            csv.row(row);
        }
        modes_ms += sm.ms();
    }
    ctx.timings_ms["spectral_solve"] = spectral_ms;
    ctx.timings_ms["mode_table"] = modes_ms;
}

void run_halfspace(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    require_axis0_truncated(cfg, "halfspace");
    if (cfg.lo[0] != 0.0)
        throw ConfigError("config: grid.lo: axis 0 must start at 0 for halfspace");
    const bool needs_xprime =
        cfg.bc == "oblique" || cfg.bc == "robin" || cfg.boundary != "zero";
    if (needs_xprime) require_xprime_periodic(cfg, "halfspace");
    if ((cfg.bc == "dirichlet" || cfg.bc == "neumann") && cfg.boundary != "zero")
        throw ConfigError("config: boundary: dirichlet/neumann take no boundary data");
    if (cfg.rhs == "zero" && cfg.solution == "none" && cfg.boundary == "zero")
        throw ConfigError("config: rhs: halfspace needs a nonzero right-hand side or data");

    const BoxGrid half = grid_from(cfg);
    const EllipticOperator op = op_from(cfg);
    const bool man = cfg.solution == "product_bump";
    const GridFunction uman = man ? manufactured_u(half) : GridFunction(half);
    const GridFunction fbase = man ? GridFunction(half) : build_rhs(half, cfg);
    const std::vector<cplx> g = build_boundary(half, cfg);
    std::vector<double> ell = cfg.ell;
    if (ell.empty()) {
        ell.assign(cfg.dim, 0.0);
        ell[0] = 1.0;
    }
    const std::map<std::string, BcKind> kinds = {{"dirichlet", BcKind::dirichlet},
                                                 {"neumann", BcKind::neumann},
                                                 {"oblique", BcKind::oblique},
                                                 {"robin", BcKind::robin}};
    const BcKind bc = kinds.at(cfg.bc);

    Csv csv(ctx.outdir / "halfspace.csv",
            {"bc", "lambda", "p", "grid", "residual", "iterations", "symmetry_defect",
             "wall_trace", "wall_derivative", "mirror_defect", "boundary_residual", "rho",
             "err_sup"});
    ctx.outputs.push_back("halfspace.csv");

    double solve_ms = 0.0;
    for (std::size_t il = 0; il < cfg.lambdas.size(); ++il) {
        const double lambda = cfg.lambdas[il];
        const GridFunction f = man ? apply(op, uman, lambda) : fbase;
        const HalfSpaceProblem hp{op, f, lambda, bc, ell, cfg.sigma, g, cfg.tol, -1};
        Stopwatch sw;
        HalfSpaceSolution sol = [&] {
            switch (bc) {
                case BcKind::dirichlet: return solve_dirichlet(hp);
                case BcKind::neumann: return solve_neumann(hp);
                case BcKind::oblique: return solve_oblique(hp);
                default: return solve_robin(hp);
            }
        }();
        solve_ms += sw.ms();

        const std::string uname = "u_" + std::to_string(il) + ".evgf";
        save_grid_function((ctx.outdir / uname).string(), sol.u);
        ctx.outputs.push_back(uname);

        for (double p : cfg.ps) {
            const double rho = oblique_estimate_ratio(sol.u, f, g, lambda, p);
            csv.row({cfg.bc, format_double(lambda), format_double(p), grid_label(half),
                     format_double(sol.residual), std::to_string(sol.iterations),
                     format_double(sol.symmetry_defect), format_double(sol.wall_trace),
                     format_double(sol.wall_derivative), format_double(sol.mirror_defect),
                     format_double(sol.boundary_residual), format_double(rho),
                     man ? format_double(sup_error(sol.u, uman)) : ""});
        }
    }
    ctx.timings_ms["solve"] = solve_ms;
}

void run_vmo(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const EllipticOperator op = op_from(cfg);
    const MatrixField af = [op](const Point& x, double* out) { op.a_at(x, out); };

    Rng rng(splitmix64(cfg.seed ^ 0xC0FFEEull));
    std::vector<Point> centers;
    for (int i = 0; i < cfg.vmo_centers; ++i) {
        Point x(cfg.dim);
        for (int ax = 0; ax < cfg.dim; ++ax) x[ax] = rng.uniform(cfg.lo[ax], cfg.hi[ax]);
        centers.push_back(x);
    }

    Stopwatch sw;
    const VMOReport rep =
        vmo_scan(af, cfg.dim, cfg.vmo_radii, centers, cfg.vmo_samples, cfg.seed);
    ctx.timings_ms["scan"] = sw.ms();

    Csv csv(ctx.outdir / "vmo.csv", {"R", "modulus", "stderr", "omega_fit"});
    ctx.outputs.push_back("vmo.csv");
    for (std::size_t i = 0; i < rep.radii.size(); ++i)
        csv.row({format_double(rep.radii[i]), format_double(rep.modulus[i]),
                 format_double(rep.stderr_est[i]), format_double(rep.omega[i])});
}

void run_verify(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    require_axis0_truncated(cfg, "verify");
    if (cfg.family.K != 0.0)
        throw ConfigError("config: family.K: verify needs b = c = 0 (set family.K = 0)");
    for (double p : cfg.ps)
        if (!(p > 2.0))
            throw ConfigError("config: p: verify needs p > 2 for the sharp-function exponents");
    if (cfg.rhs == "zero")
        throw ConfigError("config: rhs: verify needs a nonzero right-hand side");

    const BoxGrid grid = grid_from(cfg);
    const EllipticOperator op = op_from(cfg);
    const GridFunction f = build_rhs(grid, cfg);
    const GridFunction utest = manufactured_u(grid);
    const Region inner = interior_region(grid);

    // Sample points in the middle half of the box.
    Rng rng(splitmix64(cfg.seed ^ 0x5eedull));
    std::vector<Point> pts;
    for (int i = 0; i < cfg.verify_points; ++i) {
        Point x(cfg.dim);
        for (int ax = 0; ax < cfg.dim; ++ax) {
            const double c = 0.5 * (cfg.lo[ax] + cfg.hi[ax]);
            const double w = 0.25 * (cfg.hi[ax] - cfg.lo[ax]);
            x[ax] = c + rng.uniform(-w, w);
        }
        pts.push_back(x);
    }

    double solve_ms = 0.0, sharp_ms = 0.0;
    std::vector<SolveResult> sols;
    for (double lambda : cfg.lambdas) {
        Stopwatch sw;
        sols.push_back(solve(assemble(op, grid, lambda, f), cfg.tol));
        solve_ms += sw.ms();
    }

    Csv csv(ctx.outdir / "verify.csv",
            {"family", "seed", "p", "lambda", "grid", "rho", "N_emp"});
    ctx.outputs.push_back("verify.csv");
    for (double p : cfg.ps) {
        SharpCheckConfig scc;
        scc.R = cfg.verify_R;
        scc.mu = cfg.mu != 0.0 ? cfg.mu : choose_mu(p);
        scc.sample_points = pts;
        scc.vmo_samples = cfg.vmo_samples;
        scc.seed = cfg.seed;
        Stopwatch sw;
        const SharpCheckReport rep = sharp_inequality_check(utest, op, scc);
        sharp_ms += sw.ms();
        for (std::size_t il = 0; il < cfg.lambdas.size(); ++il) {
            const double rho = apriori_ratio(sols[il].u, f, cfg.lambdas[il], p, inner);
            csv.row({to_string(cfg.family.kind), std::to_string(cfg.seed), format_double(p),
                     format_double(cfg.lambdas[il]), grid_label(grid), format_double(rho),
                     format_double(rep.n_max)});
        }
    }
    ctx.timings_ms["solve"] = solve_ms;
    ctx.timings_ms["sharp_check"] = sharp_ms;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elliptic solver and estimate harness for coefficients rough in x^1"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    int workers = -1;
    const char* names[] = {"solve", "modes", "halfspace", "vmo", "verify"};
    const char* descs[] = {"whole-space sparse solve and a-priori ratios",
                           "spectral x^1-only solve and per-mode energy table",
                           "half-space boundary-value solve",
                           "coefficient oscillation scan",
                           "estimate sweeps: a-priori ratios and sharp-function constants"};
    for (int i = 0; i < 5; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_override, "output directory (overrides config)");
        sub->add_option("--workers", workers, "worker threads (0 = hardware)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    RunContext ctx;
    try {
        ctx.cfg = load_config(config_path);
        ctx.config_path = config_path;
        ctx.subcommand = app.get_subcommands().front()->get_name();
        if (!out_override.empty())
            ctx.cfg.out = out_override;
        else if (const char* env = std::getenv("ELLIPVMO_OUT"))
            ctx.cfg.out = env;
        if (workers >= 0) ctx.cfg.workers = workers;
        set_worker_count(static_cast<unsigned>(ctx.cfg.workers));
        ctx.outdir = ctx.cfg.out;
        fs::create_directories(ctx.outdir);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        Stopwatch total;
        if (ctx.subcommand == "solve")
            run_solve(ctx);
        else if (ctx.subcommand == "modes")
            run_modes(ctx);
        else if (ctx.subcommand == "halfspace")
            run_halfspace(ctx);
        else if (ctx.subcommand == "vmo")
            run_vmo(ctx);
        else
            run_verify(ctx);
        ctx.timings_ms["total"] = total.ms();
        write_manifest(ctx, "ok", std::nan(""));
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const SolveError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        write_manifest(ctx, "solver_failure", e.best_residual());
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_manifest(ctx, "error", std::nan(""));
        return 1;
    }
}
