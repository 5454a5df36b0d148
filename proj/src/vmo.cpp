#include "ellipvmo/vmo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ellipvmo/rng.hpp"

namespace ellipvmo {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

}  // namespace

OscEstimate osc_xprime(const MatrixField& a, int dim, const Cylinder& Q, int samples,
                       std::uint64_t seed) {
    if (samples < 64) throw std::invalid_argument("osc_xprime: need at least 64 samples");
    if (dim < 2) throw std::invalid_argument("osc_xprime: dim must be >= 2");
    if (!(Q.radius > 0.0)) throw std::invalid_argument("osc_xprime: radius must be > 0");
    if (Q.center.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("osc_xprime: center dimension mismatch");

    const int dp = dim - 1;
    const int qdims = 2 * dp + 1;
    if (qdims > static_cast<int>(sizeof(kPrimes) / sizeof(kPrimes[0])))
        throw std::invalid_argument("osc_xprime: dimension too large for the Halton bases");

    std::vector<double> shift(qdims);
    Rng rng(splitmix64(seed));
    for (double& s : shift) s = rng.uniform();

    const double r = Q.radius;
    const double r2 = r * r;
    std::vector<double> u(qdims), ay(static_cast<std::size_t>(dim) * dim),
        az(static_cast<std::size_t>(dim) * dim);
    Point py(dim), pz(dim);

    // Welford accumulation of |a(t,y') - a(t,z')|_F over accepted draws.
    double mean = 0.0, m2 = 0.0;
    int n = 0;
    const std::uint64_t idx_cap = 10000ull * static_cast<std::uint64_t>(samples);
    for (std::uint64_t idx = 1; n < samples; ++idx) {
        if (idx > idx_cap)
            throw std::runtime_error("osc_xprime: rejection sampling failed to converge");
        for (int q = 0; q < qdims; ++q) {
            double x = radical_inverse(idx, kPrimes[q]) + shift[q];
            u[q] = x - std::floor(x);
        }
        double ny = 0.0, nz = 0.0;
        for (int m = 0; m < dp; ++m) {
            const double yy = (2.0 * u[1 + m] - 1.0) * r;
            const double zz = (2.0 * u[1 + dp + m] - 1.0) * r;
            py[1 + m] = Q.center[1 + m] + yy;
            pz[1 + m] = Q.center[1 + m] + zz;
            ny += yy * yy;
            nz += zz * zz;
        }
        if (dp > 1 && (ny > r2 || nz > r2)) continue;
        const double t = Q.center[0] + (2.0 * u[0] - 1.0) * r;
        py[0] = t;
        pz[0] = t;
        a(py, ay.data());
        a(pz, az.data());
        double fro2 = 0.0;
        for (int e = 0; e < dim * dim; ++e) {
            const double diff = ay[e] - az[e];
            fro2 += diff * diff;
        }
        const double val = std::sqrt(fro2);
        ++n;
        const double d1 = val - mean;
        mean += d1 / n;
        m2 += d1 * (val - mean);
    }

    OscEstimate est;
    est.samples = samples;
    est.value = 2.0 * mean;
    est.stderr_est = 2.0 * std::sqrt(m2 / (samples - 1)) / std::sqrt(double(samples));
    return est;
}

OscEstimate osc_xprime(const EllipticOperator& op, const Cylinder& Q, int samples,
                       std::uint64_t seed) {
    MatrixField a = [&op](const Point& x, double* out) { op.a_at(x, out); };
    return osc_xprime(a, op.dim(), Q, samples, seed);
}

double vmo_modulus(const MatrixField& a, int dim, double R, const std::vector<Point>& centers,
                   const std::vector<double>& radii, int samples, std::uint64_t seed) {
    if (centers.empty() || radii.empty())
        throw std::invalid_argument("vmo_modulus: sample sets must be nonempty");
    for (double r : radii)
        if (!(r > 0.0 && r <= R))
            throw std::invalid_argument("vmo_modulus: radii must lie in (0, R]");
    double best = 0.0;
    std::uint64_t cell = 0;
    for (const Point& c : centers)
        for (double r : radii) {
            const OscEstimate est =
                osc_xprime(a, dim, Cylinder{c, r}, samples, splitmix64(seed) ^ ++cell);
            best = std::max(best, est.value);
        }
    return best;
}

OmegaFit::OmegaFit(std::vector<double> radii, std::vector<double> values) {
    if (radii.empty() || radii.size() != values.size())
        throw std::invalid_argument("OmegaFit: need matching nonempty radii and values");
    std::vector<std::size_t> order(radii.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&radii](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });
    for (std::size_t i : order) {
        if (!(radii[i] > 0.0)) throw std::invalid_argument("OmegaFit: radii must be > 0");
        if (!r_.empty() && radii[i] == r_.back()) {
            v_.back() = std::max(v_.back(), values[i]);
        } else {
            r_.push_back(radii[i]);
            v_.push_back(values[i]);
        }
    }
    for (std::size_t i = 1; i < v_.size(); ++i) v_[i] = std::max(v_[i], v_[i - 1]);
    if (r_.size() >= 2) {
        const double slope = (v_[1] - v_[0]) / (r_[1] - r_[0]);
        omega0_ = std::clamp(v_[0] - slope * r_[0], 0.0, v_[0]);
    } else {
        omega0_ = v_[0];
    }
}

double OmegaFit::operator()(double r) const {
    if (r <= 0.0) return omega0_;
    auto it = std::lower_bound(r_.begin(), r_.end(), r);
    if (it == r_.end()) return v_.back();
    const std::size_t i = static_cast<std::size_t>(it - r_.begin());
    if (i == 0 && r < r_[0]) return omega0_ + (v_[0] - omega0_) * (r / r_[0]);
    return v_[i];
}

OmegaFit fit_omega(const std::vector<double>& radii, const std::vector<double>& values) {
    return OmegaFit(radii, values);
}

VMOReport vmo_scan(const MatrixField& a, int dim, std::vector<double> radii,
                   const std::vector<Point>& centers, int samples, std::uint64_t seed) {
    if (radii.empty() || centers.empty())
        throw std::invalid_argument("vmo_scan: need nonempty radii and centers");
    std::sort(radii.begin(), radii.end(), std::greater<double>());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    for (double r : radii)
        if (!(r > 0.0)) throw std::invalid_argument("vmo_scan: radii must be > 0");

    const std::size_t nr = radii.size();
    std::vector<double> cell_max(nr, 0.0), cell_err(nr, 0.0);
    std::uint64_t cell = 0;
    for (const Point& c : centers)
        for (std::size_t ir = 0; ir < nr; ++ir) {
            const OscEstimate est =
                osc_xprime(a, dim, Cylinder{c, radii[ir]}, samples, splitmix64(seed) ^ ++cell);
            if (est.value >= cell_max[ir]) {
                cell_max[ir] = est.value;
                cell_err[ir] = est.stderr_est;
            }
        }

    VMOReport rep;
    rep.radii = radii;
    rep.modulus.assign(nr, 0.0);
    rep.stderr_est.assign(nr, 0.0);
    // Nested sup: radii are sorted decreasing, so accumulate from the tail.
    double best = 0.0, best_err = 0.0;
    for (std::size_t i = nr; i-- > 0;) {
        if (cell_max[i] >= best) {
            best = cell_max[i];
            best_err = cell_err[i];
        }
        rep.modulus[i] = best;
        rep.stderr_est[i] = best_err;
    }
    const OmegaFit fit(rep.radii, rep.modulus);
    rep.omega.resize(nr);
    for (std::size_t i = 0; i < nr; ++i) rep.omega[i] = fit(rep.radii[i]);
    return rep;
}

}  // namespace ellipvmo
