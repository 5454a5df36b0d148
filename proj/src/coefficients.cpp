#include "ellipvmo/coefficients.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "ellipvmo/parallel.hpp"
#include "ellipvmo/rng.hpp"

namespace ellipvmo {

EllipticOperator::EllipticOperator(int dim, MatrixField a, VectorField b, ScalarField c,
                                   double delta, double K)
    : dim_(dim), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), delta_(delta), K_(K) {
    if (dim_ < 2) throw std::invalid_argument("EllipticOperator: dim must be >= 2");
    if (!a_) throw std::invalid_argument("EllipticOperator: principal part required");
    if (!(delta_ > 0.0 && delta_ <= 1.0))
        throw std::invalid_argument("EllipticOperator: delta must lie in (0, 1]");
    if (!(K_ >= 0.0)) throw std::invalid_argument("EllipticOperator: K must be >= 0");
}

double EllipticOperator::a_entry(const Point& x, int j, int k) const {
    std::vector<double> buf(static_cast<std::size_t>(dim_) * dim_);
    a_(x, buf.data());
    return buf[static_cast<std::size_t>(j) * dim_ + k];
}

void EllipticOperator::b_at(const Point& x, double* out) const {
    if (b_) {
        b_(x, out);
    } else {
        std::fill(out, out + dim_, 0.0);
    }
}

EllipticOperator make_identity(int dim) {
    MatrixField a = [dim](const Point&, double* out) {
        std::fill(out, out + dim * dim, 0.0);
        for (int j = 0; j < dim; ++j) out[j * dim + j] = 1.0;
    };
    return EllipticOperator(dim, std::move(a), nullptr, nullptr, 1.0, 0.0);
}

EllipticOperator make_constant(int dim, const std::vector<double>& a, double delta, double K) {
    if (a.size() != static_cast<std::size_t>(dim) * dim)
        throw std::invalid_argument("make_constant: matrix must have dim*dim entries");
    MatrixField af = [a](const Point&, double* out) { std::copy(a.begin(), a.end(), out); };
    return EllipticOperator(dim, std::move(af), nullptr, nullptr, delta, K);
}

FamilyKind family_kind_from_string(const std::string& s) {
    if (s == "constant") return FamilyKind::constant;
    if (s == "measurable_x1") return FamilyKind::measurable_x1;
    if (s == "vmo_oscillatory") return FamilyKind::vmo_oscillatory;
    if (s == "checkerboard_x1") return FamilyKind::checkerboard_x1;
    throw std::invalid_argument("unknown coefficient family kind: " + s);
}

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::constant: return "constant";
        case FamilyKind::measurable_x1: return "measurable_x1";
        case FamilyKind::vmo_oscillatory: return "vmo_oscillatory";
        case FamilyKind::checkerboard_x1: return "checkerboard_x1";
    }
    return "constant";
}

namespace {

// Symmetrize and clamp the eigenvalues into [lo, hi].
void clamp_sym(int d, double* m, double lo, double hi) {
    Eigen::MatrixXd A(d, d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) A(j, k) = 0.5 * (m[j * d + k] + m[k * d + j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(lo).cwiseMin(hi);
    Eigen::MatrixXd R = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) m[j * d + k] = 0.5 * (R(j, k) + R(k, j));
}

// Piecewise-constant table in x^1.  Cut points sit at lo + (k + 1/pi)*w,
// so they never coincide with grid nodes (which are rational in the
// spacing).  Lookups clamp to the first/last piece outside the range.
struct Table {
    double lo = 0.0;
    double w = 1.0;
    int np = 1;
    int vals = 1;  // doubles per piece
    std::vector<double> v;

    const double* piece(double x1) const {
        int idx = static_cast<int>(std::floor((x1 - lo) / w - 1.0 / pi)) + 1;
        idx = std::clamp(idx, 0, np - 1);
        return v.data() + static_cast<std::size_t>(idx) * vals;
    }
};

using TablePtr = std::shared_ptr<const Table>;

TablePtr draw_matrix_table(Rng& rng, int d, int np, double lo, double hi, double x1_lo,
                           double width) {
    auto t = std::make_shared<Table>();
    t->lo = x1_lo;
    t->w = width;
    t->np = np;
    t->vals = d * d;
    t->v.resize(static_cast<std::size_t>(np) * d * d);
    const double spread = 0.6 * hi;
    for (int p = 0; p < np; ++p) {
        double* m = t->v.data() + static_cast<std::size_t>(p) * d * d;
        for (int j = 0; j < d; ++j)
            for (int k = j; k < d; ++k) {
                double e = rng.uniform(-spread, spread);
                m[j * d + k] = e;
                m[k * d + j] = e;
            }
        clamp_sym(d, m, lo, hi);
    }
    return t;
}

TablePtr draw_scalar_table(Rng& rng, int vals, int np, double amp, double x1_lo, double width) {
    auto t = std::make_shared<Table>();
    t->lo = x1_lo;
    t->w = width;
    t->np = np;
    t->vals = vals;
    t->v.resize(static_cast<std::size_t>(np) * vals);
    for (double& e : t->v) e = rng.uniform(-amp, amp);
    return t;
}

MatrixField matrix_table_field(TablePtr t) {
    return [t](const Point& x, double* out) {
        const double* m = t->piece(x[0]);
        std::copy(m, m + t->vals, out);
    };
}

VectorField vector_table_field(TablePtr t) {
    return [t](const Point& x, double* out) {
        const double* m = t->piece(x[0]);
        std::copy(m, m + t->vals, out);
    };
}

ScalarField scalar_table_field(TablePtr t) {
    return [t](const Point& x) { return *t->piece(x[0]); };
}

// Smooth symmetric ripple: B_jk(x) = sign_jk * sin(u_jk . x'/R0 + phase_jk)
// with |u_jk| = 1, so each entry is 1-Lipschitz in x'/R0.
struct Ripple {
    int d = 2;
    double R0 = 1.0;
    std::vector<double> u;      // (d*d) x (d-1), row-major per entry
    std::vector<double> phase;  // d*d
    std::vector<double> sgn;    // d*d

    void eval(const Point& x, double* out) const {
        for (int j = 0; j < d; ++j)
            for (int k = j; k < d; ++k) {
                const int e = j * d + k;
                double arg = phase[e];
                for (int m = 1; m < d; ++m)
                    arg += u[static_cast<std::size_t>(e) * (d - 1) + (m - 1)] * x[m] / R0;
                const double val = sgn[e] * std::sin(arg);
                out[j * d + k] = val;
                out[k * d + j] = val;
            }
    }
};

std::shared_ptr<const Ripple> draw_ripple(Rng& rng, int d, double R0) {
    auto r = std::make_shared<Ripple>();
    r->d = d;
    r->R0 = R0;
    r->u.assign(static_cast<std::size_t>(d) * d * (d - 1), 0.0);
    r->phase.assign(static_cast<std::size_t>(d) * d, 0.0);
    r->sgn.assign(static_cast<std::size_t>(d) * d, 1.0);
    for (int j = 0; j < d; ++j)
        for (int k = j; k < d; ++k) {
            const int e = j * d + k;
            double norm2 = 0.0;
            std::vector<double> dir(d - 1);
            do {
                norm2 = 0.0;
                for (double& c : dir) {
                    c = rng.uniform(-1.0, 1.0);
                    norm2 += c * c;
                }
            } while (norm2 < 1e-2);
            const double inv = 1.0 / std::sqrt(norm2);
            for (int m = 0; m < d - 1; ++m)
                r->u[static_cast<std::size_t>(e) * (d - 1) + m] = dir[m] * inv;
            r->phase[e] = rng.uniform(0.0, 2.0 * pi);
            r->sgn[e] = rng.sign();
            const int et = k * d + j;
            for (int m = 0; m < d - 1; ++m)
                r->u[static_cast<std::size_t>(et) * (d - 1) + m] =
                    r->u[static_cast<std::size_t>(e) * (d - 1) + m];
            r->phase[et] = r->phase[e];
            r->sgn[et] = r->sgn[e];
        }
    return r;
}

constexpr int kPieces = 64;

}  // namespace

EllipticOperator make_operator(const CoefficientFamily& fam, int dim, double x1_lo,
                               double x1_hi) {
    if (!(fam.delta > 0.0 && fam.delta <= 1.0))
        throw std::invalid_argument("coefficient family: delta must lie in (0, 1]");
    if (!(fam.K >= 0.0)) throw std::invalid_argument("coefficient family: K must be >= 0");
    if (!(fam.R0 > 0.0)) throw std::invalid_argument("coefficient family: R0 must be > 0");
    if (!(fam.epsilon >= 0.0))
        throw std::invalid_argument("coefficient family: epsilon must be >= 0");
    if (!(x1_lo < x1_hi)) throw std::invalid_argument("coefficient family: need x1_lo < x1_hi");

    Rng rng(fam.seed);
    const double margin = 1e-9 / fam.delta;
    const double lo_base = fam.delta + margin;
    const double hi_base = 1.0 / fam.delta - margin;

    MatrixField a;
    switch (fam.kind) {
        case FamilyKind::constant: {
            a = matrix_table_field(
                draw_matrix_table(rng, dim, 1, lo_base, hi_base, x1_lo, x1_hi - x1_lo));
            break;
        }
        case FamilyKind::measurable_x1: {
            a = matrix_table_field(draw_matrix_table(rng, dim, kPieces, lo_base, hi_base, x1_lo,
                                                     (x1_hi - x1_lo) / kPieces));
            break;
        }
        case FamilyKind::vmo_oscillatory: {
            const double pad = fam.epsilon * dim;
            if (!(lo_base + pad < hi_base - pad))
                throw std::invalid_argument(
                    "coefficient family: epsilon too large for the delta bound "
                    "(need epsilon * dim < (1/delta - delta) / 2)");
            TablePtr A = draw_matrix_table(rng, dim, kPieces, lo_base + pad, hi_base - pad,
                                           x1_lo, (x1_hi - x1_lo) / kPieces);
            auto B = draw_ripple(rng, dim, fam.R0);
            const double eps = fam.epsilon;
            a = [A, B, eps, dim](const Point& x, double* out) {
                const double* m = A->piece(x[0]);
                std::copy(m, m + dim * dim, out);
                if (eps == 0.0) return;
                std::vector<double> rip(static_cast<std::size_t>(dim) * dim);
                B->eval(x, rip.data());
                for (int e = 0; e < dim * dim; ++e) out[e] += eps * rip[e];
            };
            break;
        }
        case FamilyKind::checkerboard_x1: {
            TablePtr two =
                draw_matrix_table(rng, dim, 2, lo_base, hi_base, x1_lo, fam.R0);
            const double R0 = fam.R0;
            const int d2 = dim * dim;
            a = [two, x1_lo, R0, d2](const Point& x, double* out) {
                const long cell =
                    static_cast<long>(std::floor((x[0] - x1_lo) / R0 - 1.0 / pi)) + 1;
                const double* m = two->v.data() + ((cell % 2 + 2) % 2) * d2;
                std::copy(m, m + d2, out);
            };
            break;
        }
    }

    VectorField b;
    ScalarField c;
    if (fam.K > 0.0) {
        const int np = (fam.kind == FamilyKind::constant) ? 1 : kPieces;
        const double w = (x1_hi - x1_lo) / np;
        b = vector_table_field(draw_scalar_table(rng, dim, np, fam.K, x1_lo, w));
        c = scalar_table_field(draw_scalar_table(rng, 1, np, fam.K, x1_lo, w));
    }

    return EllipticOperator(dim, std::move(a), std::move(b), std::move(c), fam.delta, fam.K);
}

CoefficientFamily family_from_map(const std::map<std::string, std::string>& kv) {
    CoefficientFamily fam;
    auto get = [&kv](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    auto parse_double = [](const std::string& s, const char* key) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size())
            throw std::invalid_argument(std::string("family config: bad value for '") + key +
                                        "': " + s);
        return v;
    };
    if (const std::string* s = get("kind")) fam.kind = family_kind_from_string(*s);
    if (const std::string* s = get("seed")) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(*s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s->size())
            throw std::invalid_argument("family config: bad value for 'seed': " + *s);
        fam.seed = v;
    }
    if (const std::string* s = get("delta")) fam.delta = parse_double(*s, "delta");
    if (const std::string* s = get("epsilon")) fam.epsilon = parse_double(*s, "epsilon");
    if (const std::string* s = get("R0")) fam.R0 = parse_double(*s, "R0");
    if (const std::string* s = get("K")) fam.K = parse_double(*s, "K");
    if (!(fam.delta > 0.0 && fam.delta <= 1.0))
        throw std::invalid_argument("family config: delta must lie in (0, 1]");
    if (!(fam.K >= 0.0)) throw std::invalid_argument("family config: K must be >= 0");
    if (!(fam.R0 > 0.0)) throw std::invalid_argument("family config: R0 must be > 0");
    if (!(fam.epsilon >= 0.0))
        throw std::invalid_argument("family config: epsilon must be >= 0");
    return fam;
}

ValidationReport validate(const EllipticOperator& op, const std::vector<Point>& points,
                          const std::vector<Point>& directions) {
    if (points.empty() || directions.empty())
        throw std::invalid_argument("validate: sample sets must be nonempty");
    const int d = op.dim();
    ValidationReport rep;
    rep.rayleigh_min = std::numeric_limits<double>::infinity();
    rep.rayleigh_max = -std::numeric_limits<double>::infinity();
    std::vector<double> a(static_cast<std::size_t>(d) * d), b(d);
    for (const Point& x : points) {
        if (x.size() != static_cast<std::size_t>(d))
            throw std::invalid_argument("validate: point dimension mismatch");
        op.a_at(x, a.data());
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                rep.symmetry_defect =
                    std::max(rep.symmetry_defect, std::abs(a[j * d + k] - a[k * d + j]));
        for (const Point& v : directions) {
            if (v.size() != static_cast<std::size_t>(d))
                throw std::invalid_argument("validate: direction dimension mismatch");
            double vv = 0.0, vav = 0.0;
            for (int j = 0; j < d; ++j) {
                vv += v[j] * v[j];
                for (int k = 0; k < d; ++k) vav += v[j] * a[j * d + k] * v[k];
            }
            if (vv == 0.0) throw std::invalid_argument("validate: zero direction");
            const double q = vav / vv;
            rep.rayleigh_min = std::min(rep.rayleigh_min, q);
            rep.rayleigh_max = std::max(rep.rayleigh_max, q);
        }
        op.b_at(x, b.data());
        for (int j = 0; j < d; ++j) rep.b_sup = std::max(rep.b_sup, std::abs(b[j]));
        rep.c_sup = std::max(rep.c_sup, std::abs(op.c_at(x)));
    }
    const double tol = 1e-12 * (1.0 + 1.0 / op.delta());
    const double tol_k = 1e-12 * (1.0 + op.K());
    rep.pass = rep.rayleigh_min >= op.delta() - tol &&
               rep.rayleigh_max <= 1.0 / op.delta() + tol && rep.b_sup <= op.K() + tol_k &&
               rep.c_sup <= op.K() + tol_k && rep.symmetry_defect <= 1e-10 * (1.0 + 1.0 / op.delta());
    return rep;
}

GridFunction apply(const EllipticOperator& op, const GridFunction& u, double lambda) {
    if (u.rank() != Rank::scalar) throw std::invalid_argument("apply: u must be scalar");
    const BoxGrid& g = u.grid();
    const int d = g.dim();
    if (d != op.dim()) throw std::invalid_argument("apply: grid dimension mismatch");

    const GridFunction H = hessian(u);
    const bool use_b = op.has_b();
    const bool use_c = op.has_c();
    std::unique_ptr<GridFunction> G;
    if (use_b) G = std::make_unique<GridFunction>(gradient(u));

    GridFunction out(g);
    parallel_chunks(g.num_points(), [&](std::size_t begin, std::size_t end) {
        std::vector<double> a(static_cast<std::size_t>(d) * d), b(d);
        std::vector<int> mi = g.unflatten(begin);
        std::vector<double> x(d);
        for (std::size_t f = begin; f < end; ++f) {
            for (int ax = 0; ax < d; ++ax) x[ax] = g.coord(ax, mi[ax]);
            op.a_at(x, a.data());
            cplx acc(0.0, 0.0);
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) acc += a[j * d + k] * H.at(j * d + k, f);
            if (use_b) {
                op.b_at(x, b.data());
                for (int j = 0; j < d; ++j) acc += b[j] * G->at(j, f);
            }
            const double c0 = use_c ? op.c_at(x) : 0.0;
            acc += (c0 - lambda) * u.value(f);
            out.value(f) = acc;
            for (int ax = d - 1; ax >= 0; --ax) {
                if (++mi[ax] < g.size(ax)) break;
                mi[ax] = 0;
            }
        }
    });
    return out;
}

EllipticOperator extend_odd_even(const EllipticOperator& op, double zero_band) {
    const int d = op.dim();
    const EllipticOperator base = op;

    MatrixField a = [base, d, zero_band](const Point& x, double* out) {
        Point y = x;
        y[0] = std::abs(x[0]);
        base.a_at(y, out);
        if (x[0] < 0.0)
            for (int j = 1; j < d; ++j) {
                out[j] = -out[j];
                out[j * d] = -out[j * d];
            }
        if (std::abs(x[0]) <= zero_band)
            for (int j = 1; j < d; ++j) {
                out[j] = 0.0;
                out[j * d] = 0.0;
            }
    };
    VectorField b;
    if (op.has_b())
        b = [base, d, zero_band](const Point& x, double* out) {
            Point y = x;
            y[0] = std::abs(x[0]);
            base.b_at(y, out);
            if (x[0] < 0.0) out[0] = -out[0];
            if (std::abs(x[0]) <= zero_band) out[0] = 0.0;
        };
    ScalarField c;
    if (op.has_c())
        c = [base](const Point& x) {
            Point y = x;
            y[0] = std::abs(x[0]);
            return base.c_at(y);
        };
    return EllipticOperator(d, std::move(a), std::move(b), std::move(c), op.delta(), op.K());
}

Point phi_map(const std::vector<double>& ell, const Point& x) {
    if (ell.size() != x.size()) throw std::invalid_argument("phi_map: dimension mismatch");
    if (ell.empty() || ell[0] != 1.0)
        throw std::invalid_argument("phi_map: ell[0] must equal 1");
    Point y(x.size());
    y[0] = -x[0];
    for (std::size_t j = 1; j < x.size(); ++j) y[j] = x[j] - 2.0 * ell[j] * x[0];
    return y;
}

std::vector<double> phi_jacobian(const std::vector<double>& ell, int dim) {
    if (ell.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("phi_jacobian: dimension mismatch");
    if (ell[0] != 1.0) throw std::invalid_argument("phi_jacobian: ell[0] must equal 1");
    std::vector<double> J(static_cast<std::size_t>(dim) * dim, 0.0);
    J[0] = -1.0;
    for (int j = 1; j < dim; ++j) {
        J[static_cast<std::size_t>(j) * dim] = -2.0 * ell[j];
        J[static_cast<std::size_t>(j) * dim + j] = 1.0;
    }
    return J;
}

EllipticOperator oblique_transform(const EllipticOperator& op,
                                   const std::vector<double>& ell) {
    const int d = op.dim();
    const std::vector<double> J = phi_jacobian(ell, d);
    const EllipticOperator base = op;
    const std::vector<double> ell_copy = ell;

    MatrixField a = [base, J, ell_copy, d](const Point& x, double* out) {
        if (x[0] >= 0.0) {
            base.a_at(x, out);
            return;
        }
        const Point y = phi_map(ell_copy, x);
        std::vector<double> t(static_cast<std::size_t>(d) * d);
        base.a_at(y, t.data());
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double s = 0.0;
                for (int r = 0; r < d; ++r)
                    for (int l = 0; l < d; ++l)
                        s += J[static_cast<std::size_t>(j) * d + r] * t[r * d + l] *
                             J[static_cast<std::size_t>(k) * d + l];
                out[j * d + k] = s;
            }
    };
    VectorField b;
    if (op.has_b())
        b = [base, J, ell_copy, d](const Point& x, double* out) {
            if (x[0] >= 0.0) {
                base.b_at(x, out);
                return;
            }
            const Point y = phi_map(ell_copy, x);
            std::vector<double> t(d);
            base.b_at(y, t.data());
            for (int j = 0; j < d; ++j) {
                double s = 0.0;
                for (int r = 0; r < d; ++r) s += J[static_cast<std::size_t>(j) * d + r] * t[r];
                out[j] = s;
            }
        };
    ScalarField c;
    if (op.has_c())
        c = [base, ell_copy](const Point& x) {
            return x[0] >= 0.0 ? base.c_at(x) : base.c_at(phi_map(ell_copy, x));
        };

    Eigen::MatrixXd JM(d, d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) JM(j, k) = J[static_cast<std::size_t>(j) * d + k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(JM.transpose() * JM);
    const double norm2 = es.eigenvalues().maxCoeff();  // squared spectral norm
    const double delta_new = op.delta() / norm2;
    double row_sum_max = 1.0;
    for (int j = 1; j < d; ++j) row_sum_max = std::max(row_sum_max, 1.0 + 2.0 * std::abs(ell[j]));
    return EllipticOperator(d, std::move(a), std::move(b), std::move(c), delta_new,
                            op.K() * row_sum_max);
}

}  // namespace ellipvmo
