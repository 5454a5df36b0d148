#ifndef ELLIPVMO_COMMON_HPP
#define ELLIPVMO_COMMON_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ellipvmo {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

/// Thrown when an iterative solve exhausts its budget; carries the best
/// residual reached so callers can report it.
class SolveError : public std::runtime_error {
  public:
    SolveError(const std::string& msg, double best_residual)
        : std::runtime_error(msg), best_residual_(best_residual) {}
    double best_residual() const { return best_residual_; }

  private:
    double best_residual_;
};

class SingularSystemError : public std::runtime_error {
  public:
    explicit SingularSystemError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Locale-independent double formatting for CSV output (deterministic bytes).
std::string format_double(double v);

/// FNV-1a 64-bit hash, used for config fingerprints in run manifests.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace ellipvmo

#endif
