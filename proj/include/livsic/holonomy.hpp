#ifndef LIVSIC_HOLONOMY_HPP
#define LIVSIC_HOLONOMY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>
#include <utility>
#include <vector>

#include "livsic/cocycle.hpp"

namespace livsic {

enum class Side { Stable, Unstable };

inline const char* side_name(Side s) { return s == Side::Stable ? "stable" : "unstable"; }

inline bool on_leaf(const ToralAutomorphism& base, const TorusPoint& y,
                    const TorusPoint& z, Side side) {
    if (base.distance(y, z) >= base.product_structure_radius()) return false;
    Eigen::Vector2d d = ToralAutomorphism::lift_diff(y, z);
    const Eigen::Vector2d& dir =
        side == Side::Stable ? base.stable_dir() : base.unstable_dir();
    // Component transverse to the leaf direction must vanish.
    double cross = d(0) * dir(1) - d(1) * dir(0);
    return std::abs(cross) < 1e-10;
}

inline bool on_leaf(const Sft&, const SymbolicPoint& y, const SymbolicPoint& z,
                    Side side) {
    long hr = std::max(y.periodic_from_right(), z.periodic_from_right()) +
              long(std::lcm(y.right_period.size(), z.right_period.size()));
    long hl = std::min(y.periodic_from_left(), z.periodic_from_left()) -
              long(std::lcm(y.left_period.size(), z.left_period.size()));
    if (side == Side::Stable) {
        for (long i = 0; i <= hr; ++i)
            if (y.at(i) != z.at(i)) return false;
    } else {
        for (long i = -1; i >= hl; --i)
            if (y.at(i) != z.at(i)) return false;
    }
    return true;
}

/// One joint step of a leaf pair.  On the torus the partner is rebuilt from
/// the anchor orbit plus the leaf offset scaled by the exact eigenvalue;
/// iterating both points independently would let rounding noise grow along
/// the transverse (expanding) direction and destroy the holonomy limit.
inline std::pair<TorusPoint, TorusPoint> leaf_pair_step(
    const ToralAutomorphism& base, const TorusPoint& y, const TorusPoint& z,
    Side side, int dir) {
    TorusPoint yn = base.iterate(y, dir);
    const Eigen::Vector2d& v =
        side == Side::Stable ? base.stable_dir() : base.unstable_dir();
    double s = ToralAutomorphism::lift_diff(y, z).dot(v);
    double lam = side == Side::Stable ? base.stable_eig() : base.unstable_eig();
    double sn = dir > 0 ? s * lam : s / lam;
    TorusPoint zn = TorusPoint::from_double(yn.c[0] + sn * v(0), yn.c[1] + sn * v(1));
    return {yn, zn};
}

inline std::pair<SymbolicPoint, SymbolicPoint> leaf_pair_step(
    const Sft& base, const SymbolicPoint& y, const SymbolicPoint& z, Side,
    int dir) {
    return {base.iterate(y, dir), base.iterate(z, dir)};
}

struct HolonomyResult {
    InvertibleOp value;
    Side side = Side::Stable;
    long iterations_used = 0;
    double cauchy_gap = 0.0;
    bool certified = false;
};

/// H^{s/u}_{y,z} = lim (A_z^{+-n})^{-1} A_y^{+-n}, iterated until the
/// Cauchy gap at stride 5 drops below tol.  Non-convergence is reported,
/// not fatal: the cocycle may simply not be bunched along this orbit.
template <class Base>
HolonomyResult holonomy(const CocycleSpec& spec, const Base& base,
                        const typename Base::Point& y,
                        const typename Base::Point& z, Side side,
                        double tol = 1e-10, long n_cap = 400,
                        Norm norm = Norm::Inf) {
    if (!on_leaf(base, y, z, side)) {
        if (side == Side::Stable)
            throw NotOnStableLeaf("holonomy: z not on the local stable leaf of y");
        throw NotOnUnstableLeaf("holonomy: z not on the local unstable leaf of y");
    }
    const int stride = 5;
    int dir = side == Side::Stable ? +1 : -1;

    ScaledProduct py(spec.dim), pz(spec.dim);
    auto yy = y, zz = z;
    auto current = [&]() {
        ScaledProduct h = py;
        h.compose(pz.inverted());
        return h.value();
    };

    HolonomyResult res;
    res.side = side;
    res.value = current();  // n = 0 iterate: Id
    res.cauchy_gap = std::numeric_limits<double>::infinity();
    for (long n = 0; n < n_cap; n += stride) {
        for (int s = 0; s < stride; ++s) {
            if (dir > 0) {
                py.compose(eval_generator(spec, base, yy));
                pz.compose(eval_generator(spec, base, zz));
                std::tie(yy, zz) = leaf_pair_step(base, yy, zz, side, 1);
            } else {
                std::tie(yy, zz) = leaf_pair_step(base, yy, zz, side, -1);
                py.compose(eval_generator(spec, base, yy).inverted());
                pz.compose(eval_generator(spec, base, zz).inverted());
            }
        }
        InvertibleOp next;
        try {
            next = current();
        } catch (const NonFinite&) {
            // Diverging product: the materialized iterate is no longer a
            // trustworthy invertible operator.  Report non-convergence.
            res.cauchy_gap = std::numeric_limits<double>::infinity();
            res.certified = false;
            return res;
        }
        res.cauchy_gap = op_metric(next, res.value, norm);
        res.value = next;
        res.iterations_used = n + stride;
        if (res.cauchy_gap <= tol) {
            res.certified = true;
            return res;
        }
    }
    res.certified = false;
    return res;
}

template <class Base>
HolonomyResult stable_holonomy(const CocycleSpec& spec, const Base& base,
                               const typename Base::Point& y,
                               const typename Base::Point& z, double tol = 1e-10,
                               long n_cap = 400, Norm norm = Norm::Inf) {
    return holonomy(spec, base, y, z, Side::Stable, tol, n_cap, norm);
}

template <class Base>
HolonomyResult unstable_holonomy(const CocycleSpec& spec, const Base& base,
                                 const typename Base::Point& y,
                                 const typename Base::Point& z, double tol = 1e-10,
                                 long n_cap = 400, Norm norm = Norm::Inf) {
    return holonomy(spec, base, y, z, Side::Unstable, tol, n_cap, norm);
}

/// Chain defect op_metric(H_{x,z}, H_{y,z} H_{x,y}) for three points on one
/// local leaf.
template <class Base>
double holonomy_chain_check(const CocycleSpec& spec, const Base& base,
                            const typename Base::Point& x,
                            const typename Base::Point& y,
                            const typename Base::Point& z, Side side,
                            double tol = 1e-10, long n_cap = 400,
                            Norm norm = Norm::Inf) {
    InvertibleOp hxz = holonomy(spec, base, x, z, side, tol, n_cap, norm).value;
    InvertibleOp hyz = holonomy(spec, base, y, z, side, tol, n_cap, norm).value;
    InvertibleOp hxy = holonomy(spec, base, x, y, side, tol, n_cap, norm).value;
    return op_metric(hxz, hyz * hxy, norm);
}

struct LogLogFit {
    double slope = 0.0;      // exponent estimate
    double intercept = 0.0;  // log of the constant
    double residual = 0.0;   // rms residual in log space
    bool exact_zero = false; // all deviations vanished; slope is meaningless
};

inline LogLogFit loglog_fit(const std::vector<double>& d,
                            const std::vector<double>& v) {
    LogLogFit fit;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (v[i] > 0.0 && d[i] > 0.0) {
            xs.push_back(std::log(d[i]));
            ys.push_back(std::log(v[i]));
        }
    }
    if (xs.empty()) {
        fit.exact_zero = true;
        fit.slope = std::numeric_limits<double>::infinity();
        return fit;
    }
    double n = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) throw InsufficientSpread("loglog_fit: degenerate abscissae");
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

/// Regression of |H_{y,z} - Id| against d(y,z) over leaf pairs; the slope
/// estimates the Holder exponent of the holonomy family.
template <class Base>
LogLogFit holonomy_holder_fit(const CocycleSpec& spec, const Base& base,
                              const std::vector<std::pair<typename Base::Point,
                                                          typename Base::Point>>& pairs,
                              Side side, double tol = 1e-10, long n_cap = 400,
                              Norm norm = Norm::Inf) {
    if (pairs.size() < 20)
        throw InsufficientSpread("holonomy_holder_fit: need at least 20 pairs");
    std::vector<double> ds, devs;
    for (const auto& [y, z] : pairs) {
        HolonomyResult h = holonomy(spec, base, y, z, side, tol, n_cap, norm);
        ds.push_back(base.distance(y, z));
        devs.push_back(operator_norm(h.value.forward() -
                                     Matrix::Identity(spec.dim, spec.dim), norm));
    }
    double dmin = *std::min_element(ds.begin(), ds.end());
    double dmax = *std::max_element(ds.begin(), ds.end());
    LogLogFit fit = loglog_fit(ds, devs);
    if (!fit.exact_zero && (dmin <= 0.0 || dmax / dmin < 100.0))
        throw InsufficientSpread("holonomy_holder_fit: pairs span < 2 distance decades");
    return fit;
}

} // namespace livsic

#endif
