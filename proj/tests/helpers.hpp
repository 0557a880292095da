#ifndef LIVSIC_TEST_HELPERS_HPP
#define LIVSIC_TEST_HELPERS_HPP

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "livsic/livsic.hpp"

namespace th {

using namespace livsic;

// ---------------------------------------------------------------------------
// Shared base systems
// ---------------------------------------------------------------------------

inline ToralAutomorphism cat_map() { return ToralAutomorphism(IMat2{2, 1, 1, 1}); }

inline Sft full_2shift(double metric_base = 0.25) {
    Eigen::MatrixXi a(2, 2);
    a << 1, 1, 1, 1;
    return Sft(a, metric_base);
}

inline Sft golden_mean(double metric_base = 0.25) {
    Eigen::MatrixXi a(2, 2);
    a << 1, 1, 1, 0;
    return Sft(a, metric_base);
}

// ---------------------------------------------------------------------------
// Shared cocycle / transfer specs mirroring the shipped experiment files
// ---------------------------------------------------------------------------

inline CocycleSpec unitriangular_transfer() {
    Matrix coef(2, 2);
    coef << 0.0, 0.3, 0.0, 0.0;
    return CocycleSpec::exp_trig(2, {TrigTerm{coef, {1.0, 0.0}, 0.0}});
}

inline CocycleSpec rotation_transfer() {
    Matrix coef(2, 2);
    coef << 0.0, 0.2, -0.2, 0.0;
    return CocycleSpec::exp_trig(2, {TrigTerm{coef, {1.0, 1.0}, 0.5}});
}

inline CocycleSpec d3_transfer() {
    Matrix c1(3, 3), c2(3, 3);
    c1 << 0, 0.15, 0, 0, 0, 0.1, 0, 0, 0;
    c2 << 0, 0, 0, 0.1, 0, 0, 0, 0.05, 0;
    return CocycleSpec::exp_trig(3, {TrigTerm{c1, {1.0, 0.0}, 0.0},
                                     TrigTerm{c2, {0.0, 1.0}, 1.0}});
}

inline CocycleSpec sft_d2_transfer() {
    Matrix m0(2, 2), m1(2, 2);
    m0 << 1.0, 0.2, 0.0, 1.0;
    m1 << 0.9, 0.0, 0.1, 1.1;
    return CocycleSpec::locally_constant(2, 1, {{"0", m0}, {"1", m1}});
}

inline CocycleSpec sft_d3_transfer() {
    Matrix m0(3, 3), m1(3, 3);
    m0 << 1.0, 0.1, 0.0, 0.0, 1.0, 0.1, 0.0, 0.0, 1.0;
    m1 << 1.1, 0.0, 0.0, 0.0, 0.9, 0.0, 0.2, 0.0, 1.0;
    return CocycleSpec::locally_constant(3, 1, {{"0", m0}, {"1", m1}});
}

inline Matrix diag2(double a, double b) {
    Matrix m(2, 2);
    m << a, 0.0, 0.0, b;
    return m;
}

inline Matrix rot90() {
    Matrix m(2, 2);
    m << 0.0, -1.0, 1.0, 0.0;
    return m;
}

// ---------------------------------------------------------------------------
// Random points
// ---------------------------------------------------------------------------

inline TorusPoint rand_torus(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return TorusPoint::from_double(u(rng), u(rng));
}

/// Random exact rational point: orbit recomputation is lossless, so tests
/// of algebraic identities are not polluted by shadowing error.
inline TorusPoint rand_torus_exact(std::mt19937_64& rng, std::int64_t qmax = 999983) {
    std::int64_t q = 2 + std::int64_t(rng() % std::uint64_t(qmax));
    return TorusPoint::from_rational(Rat(std::int64_t(rng() % std::uint64_t(q)), q),
                                     Rat(std::int64_t(rng() % std::uint64_t(q)), q));
}

/// Random periodic symbolic point from a closed admissible walk.
inline SymbolicPoint rand_sft(const Sft& base, std::mt19937_64& rng, int len = 24) {
    std::uniform_int_distribution<int> pick(0, base.alphabet_size() - 1);
    std::vector<std::uint8_t> w;
    int s = pick(rng);
    w.push_back(std::uint8_t(s));
    for (int i = 1; i < len; ++i) {
        int t;
        do { t = pick(rng); } while (!base.admissible(w.back(), t));
        w.push_back(std::uint8_t(t));
    }
    auto conn = base.connector(w.back(), w.front(), base.mixing_time());
    w.insert(w.end(), conn.begin(), conn.end());
    return SymbolicPoint::periodic(std::move(w));
}

/// Random periodic point agreeing with y exactly on indices [lo, hi).
inline SymbolicPoint agree_with(const Sft& base, std::mt19937_64& rng,
                                const SymbolicPoint& y, long lo, long hi,
                                int extra = 8) {
    std::uniform_int_distribution<int> pick(0, base.alphabet_size() - 1);
    std::vector<std::uint8_t> w;
    for (long i = lo; i < hi; ++i) w.push_back(std::uint8_t(y.at(i)));
    for (int k = 0; k < extra; ++k) {
        int t;
        do { t = pick(rng); } while (!base.admissible(w.back(), t));
        w.push_back(std::uint8_t(t));
    }
    auto conn = base.connector(w.back(), w.front(), base.mixing_time());
    w.insert(w.end(), conn.begin(), conn.end());
    return SymbolicPoint::periodic(std::move(w)).shifted(-lo);
}

inline std::vector<TorusPoint> torus_samples(std::mt19937_64& rng, int n) {
    std::vector<TorusPoint> v;
    for (int i = 0; i < n; ++i) v.push_back(rand_torus(rng));
    return v;
}

inline std::vector<SymbolicPoint> sft_samples(const Sft& base, std::mt19937_64& rng,
                                              int n) {
    std::vector<SymbolicPoint> v;
    for (int i = 0; i < n; ++i) v.push_back(rand_sft(base, rng));
    return v;
}

template <class Base>
double r_bound_of(const CocycleSpec& spec, const Base& base,
                  const std::vector<typename Base::Point>& samples) {
    return std::max(1.0, generator_norm_bound(spec, base, samples));
}

// ---------------------------------------------------------------------------
// Random matrices
// ---------------------------------------------------------------------------

/// Well-conditioned random invertible matrix: Id + small random entries.
inline Matrix rand_near_identity(std::mt19937_64& rng, int d, double scale = 0.3) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m = Matrix::Identity(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) += u(rng);
    return m;
}

// ---------------------------------------------------------------------------
// CLI invocation (only compiled into targets that define LIVSIC_CLI_PATH)
// ---------------------------------------------------------------------------

#ifdef LIVSIC_CLI_PATH
inline int run_cli(const std::string& args) {
    std::string cmd = std::string(LIVSIC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WEXITSTATUS(st);
}

inline std::string spec_path(const std::string& name) {
    return std::string(LIVSIC_SPEC_DIR) + "/" + name;
}
#endif

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline bool file_exists(const std::string& path) {
    std::ifstream in(path);
    return in.good();
}

} // namespace th

#endif
