#include "ellipvmo/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>

namespace ellipvmo {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

BoxGrid::BoxGrid(std::vector<double> lo, std::vector<double> hi, std::vector<int> sizes,
                 std::vector<bool> periodic)
    : dim_(static_cast<int>(sizes.size())), lo_(std::move(lo)), hi_(std::move(hi)),
      n_(std::move(sizes)) {
    if (dim_ < 2) throw std::invalid_argument("BoxGrid: dim must be >= 2");
    if (lo_.size() != static_cast<std::size_t>(dim_) ||
        hi_.size() != static_cast<std::size_t>(dim_) ||
        periodic.size() != static_cast<std::size_t>(dim_))
        throw std::invalid_argument("BoxGrid: per-axis arrays must match dim");
    periodic_.resize(dim_);
    h_.resize(dim_);
    for (int a = 0; a < dim_; ++a) {
        if (!(lo_[a] < hi_[a])) throw std::invalid_argument("BoxGrid: need lo < hi on every axis");
        if (n_[a] < 4) throw std::invalid_argument("BoxGrid: need at least 4 points per axis");
        periodic_[a] = periodic[a] ? 1 : 0;
        h_[a] = periodic[a] ? (hi_[a] - lo_[a]) / n_[a] : (hi_[a] - lo_[a]) / (n_[a] - 1);
    }
    stride_.assign(dim_, 1);
    for (int a = dim_ - 2; a >= 0; --a) stride_[a] = stride_[a + 1] * n_[a + 1];
    npts_ = stride_[0] * n_[0];
}

std::size_t BoxGrid::flat(const std::vector<int>& mi) const {
    std::size_t f = 0;
    for (int a = 0; a < dim_; ++a) f += stride_[a] * mi[a];
    return f;
}

std::vector<int> BoxGrid::unflatten(std::size_t flat) const {
    std::vector<int> mi(dim_);
    for (int a = 0; a < dim_; ++a) {
        mi[a] = static_cast<int>(flat / stride_[a]);
        flat %= stride_[a];
    }
    return mi;
}

std::vector<double> BoxGrid::point(std::size_t flat) const {
    std::vector<int> mi = unflatten(flat);
    std::vector<double> x(dim_);
    for (int a = 0; a < dim_; ++a) x[a] = coord(a, mi[a]);
    return x;
}

double BoxGrid::node_weight(int axis, int i) const {
    if (periodic(axis)) return h_[axis];
    return (i == 0 || i == n_[axis] - 1) ? 0.5 * h_[axis] : h_[axis];
}

double BoxGrid::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= h_[a];
    return v;
}

double BoxGrid::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= length(a);
    return v;
}

bool BoxGrid::operator==(const BoxGrid& o) const {
    return dim_ == o.dim_ && lo_ == o.lo_ && hi_ == o.hi_ && n_ == o.n_ &&
           periodic_ == o.periodic_;
}

static int components_for(Rank rank, int d) {
    switch (rank) {
        case Rank::scalar: return 1;
        case Rank::vector: return d;
        case Rank::matrix: return d * d;
    }
    return 1;
}

GridFunction::GridFunction(BoxGrid grid, Rank rank, bool symmetric)
    : grid_(std::move(grid)), rank_(rank), symmetric_(symmetric) {
    comp_.assign(components_for(rank, grid_.dim()),
                 std::vector<cplx>(grid_.num_points(), cplx(0.0, 0.0)));
}

GridFunction GridFunction::sample(const BoxGrid& grid,
                                  const std::function<cplx(const std::vector<double>&)>& fn) {
    GridFunction u(grid);
    const int d = grid.dim();
    std::vector<int> mi(d, 0);
    std::vector<double> x(d);
    for (std::size_t f = 0; f < grid.num_points(); ++f) {
        for (int a = 0; a < d; ++a) x[a] = grid.coord(a, mi[a]);
        u.value(f) = fn(x);
        for (int a = d - 1; a >= 0; --a) {
            if (++mi[a] < grid.size(a)) break;
            mi[a] = 0;
        }
    }
    return u;
}

double GridFunction::magnitude(std::size_t i) const {
    if (comp_.size() == 1) return std::abs(comp_[0][i]);
    double s = 0.0;
    for (const auto& c : comp_) s += std::norm(c[i]);
    return std::sqrt(s);
}

Region Region::whole(const BoxGrid& grid) {
    Region r;
    for (int a = 0; a < grid.dim(); ++a) r.range.push_back({0, grid.size(a)});
    return r;
}

bool Region::empty() const {
    if (range.empty()) return true;
    for (const auto& pr : range)
        if (pr[1] <= pr[0]) return true;
    return false;
}

std::size_t Region::count() const {
    if (empty()) return 0;
    std::size_t c = 1;
    for (const auto& pr : range) c *= static_cast<std::size_t>(pr[1] - pr[0]);
    return c;
}

void for_each_point(const BoxGrid& grid,
                    const std::function<void(std::size_t, const std::vector<int>&)>& fn) {
    const int d = grid.dim();
    std::vector<int> mi(d, 0);
    for (std::size_t f = 0; f < grid.num_points(); ++f) {
        fn(f, mi);
        for (int a = d - 1; a >= 0; --a) {
            if (++mi[a] < grid.size(a)) break;
            mi[a] = 0;
        }
    }
}

// One line along `axis`: n entries spaced by `stride` in memory.
static void diff_line(const cplx* in, cplx* out, int n, std::size_t stride, double h, int order,
                      bool periodic) {
    auto v = [&](int i) { return in[static_cast<std::size_t>(i) * stride]; };
    auto& o = [&](int i) -> cplx& { return out[static_cast<std::size_t>(i) * stride]; };
    if (order == 1) {
        const double c = 1.0 / (2.0 * h);
        if (periodic) {
            for (int i = 0; i < n; ++i)
                o(i) = (v((i + 1) % n) - v((i + n - 1) % n)) * c;
        } else {
            o(0) = (-3.0 * v(0) + 4.0 * v(1) - v(2)) * c;
            for (int i = 1; i < n - 1; ++i) o(i) = (v(i + 1) - v(i - 1)) * c;
            o(n - 1) = (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) * c;
        }
    } else {
        const double c = 1.0 / (h * h);
        if (periodic) {
            for (int i = 0; i < n; ++i)
                o(i) = (v((i + 1) % n) - 2.0 * v(i) + v((i + n - 1) % n)) * c;
        } else {
            o(0) = (2.0 * v(0) - 5.0 * v(1) + 4.0 * v(2) - v(3)) * c;
            for (int i = 1; i < n - 1; ++i) o(i) = (v(i + 1) - 2.0 * v(i) + v(i - 1)) * c;
            o(n - 1) = (2.0 * v(n - 1) - 5.0 * v(n - 2) + 4.0 * v(n - 3) - v(n - 4)) * c;
        }
    }
}

GridFunction diff(const GridFunction& u, int axis, int order) {
    if (u.rank() != Rank::scalar) throw std::invalid_argument("diff: scalar fields only");
    const BoxGrid& g = u.grid();
    if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("diff: axis out of range");
    if (order != 1 && order != 2) throw std::invalid_argument("diff: order must be 1 or 2");

    GridFunction out(g);
    const int n = g.size(axis);
    const std::size_t stride = g.stride(axis);
    const std::size_t nlines = g.num_points() / n;
    const std::size_t block = stride * n;
    const cplx* in = u.component(0).data();
    cplx* dst = out.component(0).data();
    for (std::size_t line = 0; line < nlines; ++line) {
        const std::size_t outer = line / stride;
        const std::size_t inner = line % stride;
        const std::size_t base = outer * block + inner;
        diff_line(in + base, dst + base, n, stride, g.spacing(axis), order, g.periodic(axis));
    }
    return out;
}

GridFunction gradient(const GridFunction& u) {
    const BoxGrid& g = u.grid();
    GridFunction out(g, Rank::vector);
    for (int a = 0; a < g.dim(); ++a) out.component(a) = diff(u, a, 1).component(0);
    return out;
}

GridFunction hessian(const GridFunction& u) {
    const BoxGrid& g = u.grid();
    const int d = g.dim();
    GridFunction out(g, Rank::matrix);
    std::vector<GridFunction> first;
    first.reserve(d);
    for (int a = 0; a < d; ++a) first.push_back(diff(u, a, 1));
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
            if (j == k)
                out.component(j * d + k) = diff(u, j, 2).component(0);
            else
                out.component(j * d + k) = diff(first[j], k, 1).component(0);
        }
    }
    return out;
}

double lp_norm(const GridFunction& u, double p) { return lp_norm(u, p, Region::whole(u.grid())); }

double lp_norm(const GridFunction& u, double p, const Region& region) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (region.empty() || region.range.size() != static_cast<std::size_t>(u.grid().dim()))
        throw std::invalid_argument("lp_norm: empty or mismatched region");
    const BoxGrid& g = u.grid();
    const int d = g.dim();
    std::vector<int> mi(d);
    for (int a = 0; a < d; ++a) {
        if (region.range[a][0] < 0 || region.range[a][1] > g.size(a))
            throw std::invalid_argument("lp_norm: region exceeds grid");
        mi[a] = region.range[a][0];
    }
    double acc = 0.0;
    while (true) {
        double w = 1.0;
        for (int a = 0; a < d; ++a) w *= g.node_weight(a, mi[a]);
        acc += w * std::pow(u.magnitude(g.flat(mi)), p);
        int a = d - 1;
        for (; a >= 0; --a) {
            if (++mi[a] < region.range[a][1]) break;
            mi[a] = region.range[a][0];
        }
        if (a < 0) break;
    }
    return std::pow(acc, 1.0 / p);
}

double sup_norm(const GridFunction& u) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.grid().num_points(); ++i) m = std::max(m, u.magnitude(i));
    return m;
}

double sup_norm(const GridFunction& u, const Region& region) {
    if (region.empty()) throw std::invalid_argument("sup_norm: empty region");
    const BoxGrid& g = u.grid();
    const int d = g.dim();
    std::vector<int> mi(d);
    for (int a = 0; a < d; ++a) mi[a] = region.range[a][0];
    double m = 0.0;
    while (true) {
        m = std::max(m, u.magnitude(g.flat(mi)));
        int a = d - 1;
        for (; a >= 0; --a) {
            if (++mi[a] < region.range[a][1]) break;
            mi[a] = region.range[a][0];
        }
        if (a < 0) break;
    }
    return m;
}

double max_imag(const GridFunction& u) {
    double m = 0.0;
    for (int c = 0; c < u.num_components(); ++c)
        for (const cplx& z : u.component(c)) m = std::max(m, std::abs(z.imag()));
    return m;
}

GridFunction axpy(cplx alpha, const GridFunction& x, const GridFunction& y) {
    if (x.grid() != y.grid() || x.num_components() != y.num_components())
        throw std::invalid_argument("axpy: grid/rank mismatch");
    GridFunction out = y;
    for (int c = 0; c < x.num_components(); ++c)
        for (std::size_t i = 0; i < x.grid().num_points(); ++i)
            out.at(c, i) += alpha * x.at(c, i);
    return out;
}

GridFunction scale(cplx alpha, const GridFunction& x) {
    GridFunction out = x;
    for (int c = 0; c < x.num_components(); ++c)
        for (auto& z : out.component(c)) z *= alpha;
    return out;
}

namespace {

std::mutex g_plan_mutex;
std::map<std::pair<int, int>, fftw_plan> g_plans;

fftw_plan fft_plan(int n, int sign) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;
    std::vector<cplx> dummy(n);
    auto* ptr = reinterpret_cast<fftw_complex*>(dummy.data());
    fftw_plan p = fftw_plan_dft_1d(n, ptr, ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    g_plans.emplace(key, p);
    return p;
}

void transform_axis(GridFunction& u, int axis, int sign) {
    const BoxGrid& g = u.grid();
    const int n = g.size(axis);
    const std::size_t stride = g.stride(axis);
    const std::size_t nlines = g.num_points() / n;
    const std::size_t block = stride * n;
    fftw_plan plan = fft_plan(n, sign);
    const double norm = (sign == FFTW_FORWARD) ? 1.0 / n : 1.0;
    std::vector<cplx> line(n);
    auto* lp = reinterpret_cast<fftw_complex*>(line.data());
    for (int c = 0; c < u.num_components(); ++c) {
        cplx* data = u.component(c).data();
        for (std::size_t l = 0; l < nlines; ++l) {
            const std::size_t base = (l / stride) * block + (l % stride);
            for (int i = 0; i < n; ++i) line[i] = data[base + i * stride];
            fftw_execute_dft(plan, lp, lp);
            for (int i = 0; i < n; ++i) data[base + i * stride] = line[i] * norm;
        }
    }
}

GridFunction transform(const GridFunction& u, const std::vector<int>& axes, int sign) {
    const BoxGrid& g = u.grid();
    for (int a : axes) {
        if (a < 0 || a >= g.dim()) throw std::invalid_argument("modes: axis out of range");
        if (!g.periodic(a)) throw std::invalid_argument("modes: axis is not periodic");
    }
    GridFunction out = u;
    for (int a : axes) transform_axis(out, a, sign);
    return out;
}

}  // namespace

GridFunction forward_modes(const GridFunction& u, const std::vector<int>& axes) {
    return transform(u, axes, FFTW_FORWARD);
}

GridFunction inverse_modes(const GridFunction& u, const std::vector<int>& axes) {
    return transform(u, axes, FFTW_BACKWARD);
}

int signed_mode(int k, int n) { return (k <= n / 2) ? k : k - n; }

double fourier_freq(const BoxGrid& grid, int axis, int k) {
    return 2.0 * pi * signed_mode(k, grid.size(axis)) / grid.length(axis);
}

namespace {

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void save_grid_function(const std::string& path, const GridFunction& u) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_grid_function: cannot open " + path);
    const BoxGrid& g = u.grid();
    os.write("EVGF", 4);
    put<std::uint32_t>(os, 1u);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(u.rank()));
    put<std::uint8_t>(os, u.symmetric() ? 1 : 0);
    for (int a = 0; a < g.dim(); ++a) {
        put<std::uint32_t>(os, static_cast<std::uint32_t>(g.size(a)));
        put<double>(os, g.lo(a));
        put<double>(os, g.hi(a));
        put<std::uint8_t>(os, g.periodic(a) ? 1 : 0);
    }
    for (int c = 0; c < u.num_components(); ++c)
        for (const cplx& z : u.component(c)) {
            put<double>(os, z.real());
            put<double>(os, z.imag());
        }
}

GridFunction load_grid_function(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_grid_function: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (std::memcmp(magic, "EVGF", 4) != 0)
        throw std::runtime_error("load_grid_function: bad magic in " + path);
    if (get<std::uint32_t>(is) != 1u)
        throw std::runtime_error("load_grid_function: unsupported version");
    const int d = static_cast<int>(get<std::uint32_t>(is));
    const Rank rank = static_cast<Rank>(get<std::uint32_t>(is));
    const bool symmetric = get<std::uint8_t>(is) != 0;
    std::vector<double> lo(d), hi(d);
    std::vector<int> n(d);
    std::vector<bool> per(d);
    for (int a = 0; a < d; ++a) {
        n[a] = static_cast<int>(get<std::uint32_t>(is));
        lo[a] = get<double>(is);
        hi[a] = get<double>(is);
        per[a] = get<std::uint8_t>(is) != 0;
    }
    GridFunction u(BoxGrid(lo, hi, n, per), rank, symmetric);
    for (int c = 0; c < u.num_components(); ++c)
        for (cplx& z : u.component(c)) {
            double re = get<double>(is);
            double im = get<double>(is);
            z = cplx(re, im);
        }
    if (!is) throw std::runtime_error("load_grid_function: truncated file " + path);
    return u;
}

void write_csv(const std::string& path, const GridFunction& u) {
    const BoxGrid& g = u.grid();
    if (g.dim() > 2) throw std::invalid_argument("write_csv: d <= 2 only");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    os << "x1";
    if (g.dim() == 2) os << ",x2";
    for (int c = 0; c < u.num_components(); ++c) os << ",re" << c << ",im" << c;
    os << "\r\n";
    for_each_point(g, [&](std::size_t f, const std::vector<int>& mi) {
        os << format_double(g.coord(0, mi[0]));
        if (g.dim() == 2) os << "," << format_double(g.coord(1, mi[1]));
        for (int c = 0; c < u.num_components(); ++c)
            os << "," << format_double(u.at(c, f).real()) << ","
               << format_double(u.at(c, f).imag());
        os << "\r\n";
    });
}

}  // namespace ellipvmo
