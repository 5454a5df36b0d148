#include "ellipvmo/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ellipvmo/common.hpp"

namespace ellipvmo {

namespace {

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& key, const std::string& tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw ConfigError("config: " + key + ": not a number: '" + tok + "'");
    return v;
}

long long parse_int(const std::string& key, const std::string& tok) {
    char* end = nullptr;
    const long long v = std::strtoll(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
        throw ConfigError("config: " + key + ": not an integer: '" + tok + "'");
    return v;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& val) {
    std::vector<double> out;
    for (const std::string& tok : split_ws(val)) out.push_back(parse_double(key, tok));
    if (out.empty()) throw ConfigError("config: " + key + ": empty list");
    return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + ": empty key");
        if (kv.count(key))
            throw ConfigError("config: duplicate key '" + key + "'");
        kv[key] = val;
    }
    return kv;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();

    ExperimentConfig cfg;
    cfg.raw = buf.str();
    std::map<std::string, std::string> kv = parse_key_values(cfg.raw);

    const auto take = [&kv](const char* key) -> const std::string* {
        const auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        return &it->second;
    };

    if (const std::string* v = take("dim")) {
        const long long d = parse_int("dim", *v);
        if (d < 2 || d > 4) throw ConfigError("config: dim must be 2, 3, or 4");
        cfg.dim = static_cast<int>(d);
    }
    const int d = cfg.dim;

    cfg.lo.assign(d, -8.0);
    cfg.hi.assign(d, 8.0);
    cfg.n.assign(d, 64);
    cfg.periodic.assign(d, true);
    cfg.periodic[0] = false;

    const auto vec_key = [d](const char* key, const std::vector<std::string>& toks) {
        if (static_cast<int>(toks.size()) != d)
            throw ConfigError(std::string("config: ") + key + ": expected " +
                              std::to_string(d) + " values");
    };
    if (const std::string* v = take("grid.lo")) {
        const auto toks = split_ws(*v);
        vec_key("grid.lo", toks);
        for (int i = 0; i < d; ++i) cfg.lo[i] = parse_double("grid.lo", toks[i]);
    }
    if (const std::string* v = take("grid.hi")) {
        const auto toks = split_ws(*v);
        vec_key("grid.hi", toks);
        for (int i = 0; i < d; ++i) cfg.hi[i] = parse_double("grid.hi", toks[i]);
    }
    if (const std::string* v = take("grid.n")) {
        const auto toks = split_ws(*v);
        vec_key("grid.n", toks);
        for (int i = 0; i < d; ++i) {
            const long long n = parse_int("grid.n", toks[i]);
            if (n < 4 || n > 100000) throw ConfigError("config: grid.n: need 4 <= n <= 100000");
            cfg.n[i] = static_cast<int>(n);
        }
    }
    if (const std::string* v = take("grid.periodic")) {
        const auto toks = split_ws(*v);
        vec_key("grid.periodic", toks);
        for (int i = 0; i < d; ++i) {
            const long long b = parse_int("grid.periodic", toks[i]);
            if (b != 0 && b != 1) throw ConfigError("config: grid.periodic: entries are 0 or 1");
            cfg.periodic[i] = b != 0;
        }
    }
    for (int i = 0; i < d; ++i)
        if (!(cfg.lo[i] < cfg.hi[i]))
            throw ConfigError("config: grid.lo/grid.hi: need lo < hi on every axis");

    std::map<std::string, std::string> fam;
    for (const char* key : {"kind", "seed", "delta", "epsilon", "R0", "K"}) {
        if (const std::string* v = take((std::string("family.") + key).c_str()))
            fam[key] = *v;
    }
    try {
        cfg.family = family_from_map(fam);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: family: ") + e.what());
    }

    if (const std::string* v = take("lambda")) {
        cfg.lambdas = parse_doubles("lambda", *v);
        for (double l : cfg.lambdas)
            if (!(l > 0.0)) throw ConfigError("config: lambda: values must be positive");
    }
    if (const std::string* v = take("p")) {
        cfg.ps = parse_doubles("p", *v);
        for (double p : cfg.ps)
            if (!(p > 1.0))
                throw ConfigError("config: p: values must exceed 1 (got " + format_double(p) +
                                  ")");
    }
    if (const std::string* v = take("seed"))
        cfg.seed = static_cast<std::uint64_t>(parse_int("seed", *v));

    if (const std::string* v = take("bc")) {
        static const char* kinds[] = {"dirichlet", "neumann", "oblique", "robin"};
        if (std::find(std::begin(kinds), std::end(kinds), *v) == std::end(kinds))
            throw ConfigError("config: bc: unknown kind '" + *v + "'");
        cfg.bc = *v;
    }
    if (const std::string* v = take("ell")) {
        cfg.ell = parse_doubles("ell", *v);
        if (static_cast<int>(cfg.ell.size()) != d)
            throw ConfigError("config: ell: expected " + std::to_string(d) + " components");
        if (!(cfg.ell[0] > 0.0)) throw ConfigError("config: ell: first component must be positive");
    }
    if (const std::string* v = take("sigma")) cfg.sigma = parse_double("sigma", *v);

    const auto enum_key = [&take](const char* key, std::string& slot,
                                  std::initializer_list<const char*> allowed) {
        if (const std::string* v = take(key)) {
            if (std::find(allowed.begin(), allowed.end(), *v) == allowed.end())
                throw ConfigError(std::string("config: ") + key + ": unknown value '" + *v + "'");
            slot = *v;
        }
    };
    enum_key("rhs", cfg.rhs, {"smooth_random", "gaussian", "zero"});
    enum_key("solution", cfg.solution, {"none", "product_bump"});
    enum_key("boundary", cfg.boundary, {"zero", "trig"});

    if (const std::string* v = take("out")) cfg.out = *v;
    if (const std::string* v = take("tol")) {
        cfg.tol = parse_double("tol", *v);
        if (!(cfg.tol > 0.0)) throw ConfigError("config: tol must be positive");
    }
    if (const std::string* v = take("workers")) {
        const long long w = parse_int("workers", *v);
        if (w < 0 || w > 1024) throw ConfigError("config: workers: need 0 <= workers <= 1024");
        cfg.workers = static_cast<int>(w);
    }

    if (const std::string* v = take("vmo.radii")) {
        cfg.vmo_radii = parse_doubles("vmo.radii", *v);
        for (double r : cfg.vmo_radii)
            if (!(r > 0.0)) throw ConfigError("config: vmo.radii: radii must be positive");
    }
    if (const std::string* v = take("vmo.samples")) {
        const long long s = parse_int("vmo.samples", *v);
        if (s < 64) throw ConfigError("config: vmo.samples must be >= 64");
        cfg.vmo_samples = static_cast<int>(s);
    }
    if (const std::string* v = take("vmo.centers")) {
        const long long c = parse_int("vmo.centers", *v);
        if (c < 1) throw ConfigError("config: vmo.centers must be >= 1");
        cfg.vmo_centers = static_cast<int>(c);
    }

    if (const std::string* v = take("modes.count")) {
        const long long c = parse_int("modes.count", *v);
        if (c < 1) throw ConfigError("config: modes.count must be >= 1");
        cfg.xi_count = static_cast<int>(c);
    }
    if (const std::string* v = take("verify.points")) {
        const long long c = parse_int("verify.points", *v);
        if (c < 1) throw ConfigError("config: verify.points must be >= 1");
        cfg.verify_points = static_cast<int>(c);
    }
    if (const std::string* v = take("verify.R")) {
        cfg.verify_R = parse_double("verify.R", *v);
        if (!(cfg.verify_R > 0.0)) throw ConfigError("config: verify.R must be positive");
    }
    if (const std::string* v = take("verify.mu")) {
        cfg.mu = parse_double("verify.mu", *v);
        if (cfg.mu != 0.0 && !(cfg.mu > 1.0))
            throw ConfigError("config: verify.mu must exceed 1 (or 0 to derive from p)");
    }

    static const char* known[] = {
        "dim",         "grid.lo",      "grid.hi",     "grid.n",        "grid.periodic",
        "family.kind", "family.seed",  "family.delta", "family.epsilon", "family.R0",
        "family.K",    "lambda",       "p",           "seed",          "bc",
        "ell",         "sigma",        "rhs",         "solution",      "boundary",
        "out",         "tol",          "workers",     "vmo.radii",     "vmo.samples",
        "vmo.centers", "modes.count",  "verify.points", "verify.R",    "verify.mu"};
    for (const auto& [key, val] : kv) {
        (void)val;
        if (std::find_if(std::begin(known), std::end(known),
                         [&key](const char* k) { return key == k; }) == std::end(known))
            throw ConfigError("config: unknown key '" + key + "'");
    }
    return cfg;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) { return fnv1a64(cfg.raw); }

}  // namespace ellipvmo
