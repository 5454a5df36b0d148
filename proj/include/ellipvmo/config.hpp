#ifndef ELLIPVMO_CONFIG_HPP
#define ELLIPVMO_CONFIG_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ellipvmo/coefficients.hpp"

namespace ellipvmo {

/// Config parse or validation failure; the message names the offending
/// key.  The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/** One experiment, loaded from a `key = value` file (lists are
 * whitespace-separated, `#` starts a comment).  Unknown keys are
 * rejected so typos surface as errors rather than silent defaults.
 */
struct ExperimentConfig {
    int dim = 2;
    std::vector<double> lo, hi;       // grid.lo, grid.hi (default -8 / 8 per axis)
    std::vector<int> n;               // grid.n (default 64 per axis)
    std::vector<bool> periodic;       // grid.periodic (default: axis 0 no, x' yes)

    CoefficientFamily family;

    std::vector<double> lambdas{4.0};  // lambda ladder
    std::vector<double> ps{2.0};       // p list
    std::uint64_t seed = 1;            // right-hand-side / sampling seed

    std::string bc = "dirichlet";      // dirichlet | neumann | oblique | robin
    std::vector<double> ell;           // boundary direction (default e_1)
    double sigma = 0.0;

    std::string rhs = "smooth_random";  // smooth_random | gaussian | zero
    std::string solution = "none";      // none | product_bump (manufactured f)
    std::string boundary = "zero";      // zero | trig

    std::string out = "out";
    double tol = 1e-10;
    int workers = 0;  // 0 = hardware concurrency

    std::vector<double> vmo_radii{1.0, 0.5, 0.25, 0.125};
    int vmo_samples = 4096;
    int vmo_centers = 8;

    int xi_count = 16;       // modes: number of sampled frequencies
    int verify_points = 32;  // verify: sample points for the sharp check
    double verify_R = 1.0;   // verify: oscillation window
    double mu = 0.0;         // verify: 0 = choose from p

    std::string raw;  // file bytes, hashed into the run manifest
};

/// Parse `key = value` lines; throws ConfigError on malformed lines or
/// duplicate keys.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Load and validate; throws ConfigError naming the bad key.
ExperimentConfig load_config(const std::string& path);

/// FNV-1a over the raw config bytes; stable across runs of one file.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace ellipvmo

#endif
