#ifndef LIVSIC_TRANSFER_HPP
#define LIVSIC_TRANSFER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "livsic/holonomy.hpp"
#include "livsic/periodic.hpp"

namespace livsic {

/// Discrete representation of a transfer map C : M -> GL(d): a cloud of
/// (point, operator) samples with nearest-sample evaluation.  The index is
/// a uniform cell hash on the torus and a cylinder-word bucket map on an
/// SFT; both fall back to a linear scan when the local buckets are empty.
template <class Base>
class TransferMap {
public:
    using Point = typename Base::Point;

    struct Sample {
        Point point;
        InvertibleOp op;
    };

    std::vector<Sample> samples;
    std::string method = "direct";
    int anchor = 0;  // index of the anchor sample (where C = Id by convention)
    double coverage_radius = std::numeric_limits<double>::infinity();

    bool empty() const { return samples.empty(); }
    int size() const { return int(samples.size()); }

    const Point& anchor_point() const { return samples[std::size_t(anchor)].point; }
    const InvertibleOp& anchor_op() const { return samples[std::size_t(anchor)].op; }

    /// Builds the spatial index at the given resolution (torus: cell size;
    /// SFT: metric radius translated into a word radius).
    void build_index(const Base& base, double resolution) {
        if (samples.empty()) throw ConfigError("TransferMap: no samples to index");
        if constexpr (std::is_same_v<Base, ToralAutomorphism>) {
            (void)base;
            ncell_ = std::max(1, int(std::floor(1.0 / resolution)));
            cells_.clear();
            for (int i = 0; i < size(); ++i)
                cells_[cell_key(samples[std::size_t(i)].point)].push_back(i);
        } else {
            word_radius_ = 1;
            while (std::pow(base.metric_base(), double(word_radius_)) > resolution &&
                   word_radius_ < 64)
                ++word_radius_;
            words_.clear();
            for (int i = 0; i < size(); ++i)
                words_[sample_word(samples[std::size_t(i)].point)].push_back(i);
        }
    }

    /// Index of the nearest sample (exact over the candidate buckets, with
    /// a full linear scan as fallback so the answer is always the true
    /// nearest available point).
    int nearest(const Base& base, const Point& x) const {
        if (samples.empty()) throw ConfigError("TransferMap: empty map");
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        auto consider = [&](int i) {
            double d = base.distance(samples[std::size_t(i)].point, x);
            if (d < best_d) { best_d = d; best = i; }
        };
        if constexpr (std::is_same_v<Base, ToralAutomorphism>) {
            if (ncell_ > 0) {
                int ix = cell_coord(x.c[0]), iy = cell_coord(x.c[1]);
                for (int dx = -1; dx <= 1; ++dx)
                    for (int dy = -1; dy <= 1; ++dy) {
                        long long key = key_of((ix + dx + ncell_) % ncell_,
                                               (iy + dy + ncell_) % ncell_);
                        auto it = cells_.find(key);
                        if (it == cells_.end()) continue;
                        for (int i : it->second) consider(i);
                    }
            }
        } else {
            if (word_radius_ > 0) {
                auto it = words_.find(sample_word(x));
                if (it != words_.end())
                    for (int i : it->second) consider(i);
            }
        }
        if (best < 0)
            for (int i = 0; i < size(); ++i) consider(i);
        return best;
    }

    /// Nearest-sample evaluation C(x).
    const InvertibleOp& at(const Base& base, const Point& x) const {
        return samples[std::size_t(nearest(base, x))].op;
    }

private:
    // --- torus index ---
    int cell_coord(double t) const {
        int i = int(std::floor(t * double(ncell_)));
        return std::clamp(i, 0, ncell_ - 1);
    }
    long long key_of(int ix, int iy) const {
        return (long long)ix * (long long)ncell_ + (long long)iy;
    }
    long long cell_key(const TorusPoint& p) const {
        return key_of(cell_coord(p.c[0]), cell_coord(p.c[1]));
    }

    // --- SFT index ---
    std::string sample_word(const SymbolicPoint& p) const {
        return p.word(-word_radius_, word_radius_ + 1);
    }

    int ncell_ = 0;
    int word_radius_ = 0;
    std::unordered_map<long long, std::vector<int>> cells_;
    std::map<std::string, std::vector<int>> words_;
};

template <class Base>
struct SolveResult {
    TransferMap<Base> transfer;
    std::vector<ObstructionReport> obstruction;
    double max_on_orbit_residual = 0.0;  // max d(A(x_i), C(x_{i+1}) C(x_i)^{-1})
    long steps = 0;
};

struct PropagationOptions {
    long orbit_len = 200000;
    double grid_eps = 1e-3;
    int period_max = 6;
    double tol_base = 1e-9;
    double patch_radius = 0.125;  // torus: samples kept within this radius of z0
    int residual_stride = 1;      // measure on-orbit residual every k-th step
    Norm norm = Norm::Inf;
};

namespace detail {

/// Torus density audit: every grid cell wholly inside the patch must hold a
/// sample; then any point of such a cell is within a cell diagonal of one.
inline double verify_density(const ToralAutomorphism& base,
                             const TransferMap<ToralAutomorphism>& map,
                             const TorusPoint& center, double patch_radius,
                             double grid_eps) {
    int ncell = std::max(1, int(std::floor(1.0 / grid_eps)));
    double g = 1.0 / double(ncell);
    std::set<long long> occupied;
    for (const auto& s : map.samples) {
        int ix = std::clamp(int(std::floor(s.point.c[0] * ncell)), 0, ncell - 1);
        int iy = std::clamp(int(std::floor(s.point.c[1] * ncell)), 0, ncell - 1);
        occupied.insert((long long)ix * ncell + iy);
    }
    long required = 0, missing = 0;
    double interior = patch_radius - g * std::sqrt(2.0);
    for (int ix = 0; ix < ncell; ++ix) {
        for (int iy = 0; iy < ncell; ++iy) {
            TorusPoint c = TorusPoint::from_double((ix + 0.5) * g, (iy + 0.5) * g);
            if (base.distance(c, center) >= interior) continue;
            ++required;
            if (!occupied.count((long long)ix * ncell + iy)) ++missing;
        }
    }
    if (required == 0)
        throw OrbitNotDense("verify_density: patch smaller than one grid cell");
    if (missing > 0)
        throw OrbitNotDense("verify_density: " + std::to_string(missing) + " of " +
                            std::to_string(required) + " patch cells unvisited");
    return g * std::sqrt(2.0);  // coverage radius
}

/// SFT density audit: every admissible cylinder word of radius k must occur
/// among the sample center-words; then every point is within base^k of a
/// sample.
inline double verify_density(const Sft& base, const TransferMap<Sft>& map,
                             const SymbolicPoint&, double, double grid_eps) {
    int k = 1;
    while (std::pow(base.metric_base(), double(k)) > grid_eps && k < 64) ++k;
    std::set<std::string> present;
    for (const auto& s : map.samples)
        present.insert(s.point.word(-k, k + 1));
    long missing = 0, required = 0;
    for (const auto& w : base.all_words(2 * k + 1)) {
        ++required;
        std::string key;
        for (auto s : w) key.push_back(char('0' + s));
        if (!present.count(key)) ++missing;
    }
    if (missing > 0)
        throw OrbitNotDense("verify_density: " + std::to_string(missing) + " of " +
                            std::to_string(required) + " cylinders unvisited");
    return std::pow(base.metric_base(), double(k));
}

inline bool in_patch(const ToralAutomorphism& base, const TorusPoint& x,
                     const TorusPoint& center, double radius) {
    return base.distance(x, center) < radius;
}

inline bool in_patch(const Sft&, const SymbolicPoint&, const SymbolicPoint&, double) {
    return true;  // SFT solves sample the whole covering orbit
}

} // namespace detail

/// Solves A = C(f.) C(.)^{-1} along the forward orbit of z0 by direct
/// propagation C(f^{n} z0) = A_{z0}^{n}, keeping samples near z0 (torus) or
/// along the whole covering orbit (SFT).  The periodic obstruction is
/// checked first; failure aborts the solve.  The orbit must be dense at the
/// grid resolution or OrbitNotDense is thrown.
template <class Base>
SolveResult<Base> solve_orbit_propagation(const CocycleSpec& spec, const Base& base,
                                          const typename Base::Point& z0,
                                          double r_bound,
                                          const PropagationOptions& opt = {}) {
    SolveResult<Base> res;
    res.obstruction = obstruction_check(spec, base, opt.period_max, opt.tol_base,
                                        r_bound, opt.norm);
    for (const auto& rep : res.obstruction)
        if (rep.verdict == Verdict::Fail)
            throw ObstructionFailed("solve_orbit_propagation: periodic orbit " +
                                    rep.key + " violates the identity obstruction");

    TransferMap<Base>& map = res.transfer;
    map.method = "orbit_propagation";
    const int d = spec.dim;
    Matrix c = Matrix::Identity(d, d);
    auto x = z0;
    if (!detail::in_patch(base, z0, z0, opt.patch_radius))
        throw ConfigError("solve_orbit_propagation: anchor outside patch");

    for (long i = 0; i < opt.orbit_len; ++i) {
        if (detail::in_patch(base, x, z0, opt.patch_radius))
            map.samples.push_back({x, InvertibleOp(c)});
        InvertibleOp a = eval_generator(spec, base, x);
        Matrix cn = a.forward() * c;
        if (opt.residual_stride > 0 && i % opt.residual_stride == 0) {
            // Fresh-inverse consistency check of the one-step cocycle relation.
            double r = op_metric(InvertibleOp(cn * c.inverse()), a, opt.norm);
            res.max_on_orbit_residual = std::max(res.max_on_orbit_residual, r);
        }
        c = std::move(cn);
        x = base.iterate(x, 1);
    }
    res.steps = opt.orbit_len;
    map.anchor = 0;
    map.coverage_radius =
        detail::verify_density(base, map, z0, opt.patch_radius, opt.grid_eps);
    map.build_index(base, opt.grid_eps);
    return res;
}

template <class Base>
struct HolonomyExtensionResult {
    TransferMap<Base> transfer;
    long skipped = 0;  // targets dropped for bracket or convergence failures
};

/// Solves for C at arbitrary points by the holonomy extension
/// C(z) = H^u_{w,z} H^s_{x0,w} C(x0) with w = [x0, z], anchored at
/// C(x0) = Id.  Points where the bracket fails or a holonomy does not
/// certify are skipped and counted, not fatal.
template <class Base>
HolonomyExtensionResult<Base> solve_holonomy_extension(
    const CocycleSpec& spec, const Base& base, const typename Base::Point& x0,
    const std::vector<typename Base::Point>& targets, double tol = 1e-10,
    long n_cap = 400, Norm norm = Norm::Inf) {
    HolonomyExtensionResult<Base> res;
    TransferMap<Base>& map = res.transfer;
    map.method = "holonomy_extension";
    map.samples.push_back({x0, InvertibleOp::identity(spec.dim)});
    map.anchor = 0;
    for (const auto& z : targets) {
        if (base.distance(x0, z) == 0.0) continue;
        try {
            auto w = base.bracket(x0, z);
            HolonomyResult hs = holonomy(spec, base, x0, w, Side::Stable, tol, n_cap, norm);
            HolonomyResult hu = holonomy(spec, base, w, z, Side::Unstable, tol, n_cap, norm);
            if (!hs.certified || !hu.certified)
                throw NoConvergence("holonomy did not certify");
            map.samples.push_back({z, hu.value * hs.value});
        } catch (const Error&) {
            ++res.skipped;
        }
    }
    map.coverage_radius = std::numeric_limits<double>::infinity();
    map.build_index(base, base.product_structure_radius() / 8.0);
    return res;
}

struct ResidualReport {
    double max = 0.0;
    double mean = 0.0;
    long count = 0;
};

/// Residual of the cocycle equation at probe points, evaluating C by
/// nearest sample: d(A(x), C(fx) C(x)^{-1}).
template <class Base>
ResidualReport residual(const CocycleSpec& spec, const Base& base,
                        const TransferMap<Base>& map,
                        const std::vector<typename Base::Point>& probes,
                        Norm norm = Norm::Inf) {
    ResidualReport rep;
    double sum = 0.0;
    for (const auto& x : probes) {
        const InvertibleOp& cx = map.at(base, x);
        const InvertibleOp& cfx = map.at(base, base.iterate(x, 1));
        double r = op_metric(cfx * cx.inverted(), eval_generator(spec, base, x), norm);
        rep.max = std::max(rep.max, r);
        sum += r;
        ++rep.count;
    }
    rep.mean = rep.count > 0 ? sum / double(rep.count) : 0.0;
    return rep;
}

struct TransferComparison {
    Matrix conjugator;  // D with C2 ~ C1 * D
    double max_deviation = 0.0;
};

/// Two solutions of the same cocycle equation agree up to a constant:
/// D = C1(anchor)^{-1} C2(anchor), then sup_x d(C1(x) D, C2(x)).
template <class Base>
TransferComparison compare_up_to_constant(const Base& base,
                                          const TransferMap<Base>& map1,
                                          const TransferMap<Base>& map2,
                                          const std::vector<typename Base::Point>& probes,
                                          Norm norm = Norm::Inf) {
    const auto& a = map2.anchor_point();
    InvertibleOp c1a = map1.at(base, a);
    InvertibleOp dd = c1a.inverted() * map2.anchor_op();
    TransferComparison cmp;
    cmp.conjugator = dd.forward();
    for (const auto& x : probes) {
        InvertibleOp lhs = map1.at(base, x) * dd;
        double dev = op_metric(lhs, map2.at(base, x), norm);
        cmp.max_deviation = std::max(cmp.max_deviation, dev);
    }
    return cmp;
}

/// Holder exponent of the solved transfer map, estimated from sample pairs
/// separated by at least 4 coverage radii (so nearest-sample error cannot
/// masquerade as roughness).  Constant maps get an infinite slope sentinel.
template <class Base>
LogLogFit holder_exponent_estimate(const Base& base, const TransferMap<Base>& map,
                                   std::uint64_t seed, int n_pairs = 400,
                                   Norm norm = Norm::Inf) {
    if (map.size() < 2) throw InsufficientSpread("holder_exponent_estimate: too few samples");
    double dmin = 4.0 * map.coverage_radius;
    if (!std::isfinite(dmin)) dmin = 0.0;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, map.size() - 1);
    std::vector<double> ds, devs;
    int attempts = 0, max_attempts = n_pairs * 200;
    while (int(ds.size()) < n_pairs && attempts < max_attempts) {
        ++attempts;
        int i = pick(rng), j = pick(rng);
        if (i == j) continue;
        double d = base.distance(map.samples[std::size_t(i)].point,
                                 map.samples[std::size_t(j)].point);
        if (d < dmin || d <= 0.0) continue;
        ds.push_back(d);
        devs.push_back(op_metric(map.samples[std::size_t(i)].op,
                                 map.samples[std::size_t(j)].op, norm));
    }
    if (int(ds.size()) < std::max(20, n_pairs / 4))
        throw InsufficientSpread("holder_exponent_estimate: could not draw enough "
                                 "well-separated pairs");
    double vmax = *std::max_element(devs.begin(), devs.end());
    if (vmax <= 1e-12) {
        LogLogFit fit;
        fit.exact_zero = true;
        fit.slope = std::numeric_limits<double>::infinity();
        return fit;
    }
    return loglog_fit(ds, devs);
}

} // namespace livsic

#endif
