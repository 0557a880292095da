#ifndef LIVSIC_TORUS_HPP
#define LIVSIC_TORUS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "livsic/base_common.hpp"
#include "livsic/errors.hpp"
#include "livsic/rational.hpp"

namespace livsic {

/// 2x2 integer matrix with overflow-checked arithmetic.
struct IMat2 {
    std::int64_t a = 1, b = 0, c = 0, d = 1;

    static IMat2 identity() { return {}; }

    std::int64_t det() const { return mul(a, d) - mul(b, c); }

    friend IMat2 operator*(const IMat2& x, const IMat2& y) {
        return {add(mul(x.a, y.a), mul(x.b, y.c)), add(mul(x.a, y.b), mul(x.b, y.d)),
                add(mul(x.c, y.a), mul(x.d, y.c)), add(mul(x.c, y.b), mul(x.d, y.d))};
    }

    friend bool operator==(const IMat2&, const IMat2&) = default;

    /// Inverse, valid only when det = +-1.
    IMat2 unimodular_inverse() const {
        std::int64_t dt = det();
        if (dt != 1 && dt != -1) throw SingularClosing("IMat2: not unimodular");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    IMat2 pow(int n) const {
        if (n < 0) return unimodular_inverse().pow(-n);
        IMat2 r = identity();
        for (int i = 0; i < n; ++i) r = r * *this;
        return r;
    }

    static std::int64_t mul(std::int64_t x, std::int64_t y) {
        __int128 p = __int128(x) * y;
        if (p > INT64_MAX || p < INT64_MIN) throw NonFinite("IMat2 overflow");
        return std::int64_t(p);
    }
    static std::int64_t add(std::int64_t x, std::int64_t y) {
        __int128 s = __int128(x) + y;
        if (s > INT64_MAX || s < INT64_MIN) throw NonFinite("IMat2 overflow");
        return std::int64_t(s);
    }
};

/// Smith-style diagonalization of a 2x2 integer matrix: returns unimodular
/// U, V and diagonal (s1, s2) with U * D * V = diag(s1, s2), s1, s2 > 0
/// when det(D) != 0.
struct Smith2 {
    IMat2 u, v;
    std::int64_t s1 = 0, s2 = 0;
};

inline Smith2 smith_form(IMat2 m) {
    IMat2 u = IMat2::identity(), v = IMat2::identity();
    // Row/column reductions by Euclid until off-diagonals vanish.
    auto swap_rows = [&](IMat2& x) { std::swap(x.a, x.c); std::swap(x.b, x.d); };
    auto swap_cols = [&](IMat2& x) { std::swap(x.a, x.b); std::swap(x.c, x.d); };
    for (int guard = 0; guard < 256; ++guard) {
        if (m.a == 0) {
            if (m.c != 0) { swap_rows(m); swap_rows(u); }
            else if (m.b != 0) { swap_cols(m); swap_cols(v); }
            else break;
        }
        if (m.c != 0) {
            std::int64_t q = m.c / m.a;
            m.c -= IMat2::mul(q, m.a); m.d -= IMat2::mul(q, m.b);
            u.c -= IMat2::mul(q, u.a); u.d -= IMat2::mul(q, u.b);
            if (m.c != 0) { swap_rows(m); swap_rows(u); }
            continue;
        }
        if (m.b != 0) {
            std::int64_t q = m.b / m.a;
            m.b -= IMat2::mul(q, m.a); m.d -= IMat2::mul(q, m.c);
            v.b -= IMat2::mul(q, v.a); v.d -= IMat2::mul(q, v.c);
            if (m.b != 0) { swap_cols(m); swap_cols(v); }
            continue;
        }
        break;
    }
    if (m.b != 0 || m.c != 0) throw NonFinite("smith_form did not terminate");
    if (m.a < 0) { m.a = -m.a; u.a = -u.a; u.b = -u.b; }
    if (m.d < 0) { m.d = -m.d; u.c = -u.c; u.d = -u.d; }
    return {u, v, m.a, m.d};
}

/// Point of T^2.  Float coordinates are always present and reduced to
/// [0,1); the exact-rational track is optional and, when present, agrees
/// with the float track.  Conversions between the two are explicit.
struct TorusPoint {
    std::array<double, 2> c{0.0, 0.0};
    std::optional<std::array<Rat, 2>> exact;

    static TorusPoint from_double(double x, double y) {
        TorusPoint p;
        p.c = {reduce(x), reduce(y)};
        return p;
    }

    static TorusPoint from_rational(Rat x, Rat y) {
        TorusPoint p;
        auto rx = x.mod1(), ry = y.mod1();
        p.exact = {{rx, ry}};
        p.c = {rx.to_double(), ry.to_double()};
        return p;
    }

    bool is_exact() const { return exact.has_value(); }

    TorusPoint rounded() const {  // explicit exact -> float conversion
        TorusPoint p;
        p.c = c;
        return p;
    }

    static double reduce(double x) {
        double r = x - std::floor(x);
        return r >= 1.0 ? 0.0 : r;  // guard against floor roundoff at 1-eps
    }

    std::string key() const {
        if (exact)
            return (*exact)[0].str() + "," + (*exact)[1].str();
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", c[0], c[1]);
        return buf;
    }
};

/// Hyperbolic automorphism of T^2 induced by an integer matrix with
/// |det| = 1 and no eigenvalue on the unit circle.
class ToralAutomorphism {
public:
    using Point = TorusPoint;
    using Orbit = PeriodicOrbit<TorusPoint>;

    explicit ToralAutomorphism(IMat2 m,
                               double product_structure_radius = 0.25,
                               double closing_radius = 0.1)
        : m_(m),
          bracket_radius_(product_structure_radius),
          closing_radius_(closing_radius) {
        std::int64_t dt = m.det();
        if (dt != 1 && dt != -1)
            throw ConfigError("toral matrix must have det +-1");
        minv_ = m.unimodular_inverse();
        double tr = double(m.a + m.d);
        double disc = tr * tr - 4.0 * double(dt);
        if (disc <= 0.0)
            throw ConfigError("toral matrix is not hyperbolic (complex eigenvalues)");
        double l1 = (tr + std::sqrt(disc)) / 2.0;
        double l2 = (tr - std::sqrt(disc)) / 2.0;
        if (std::abs(std::abs(l1) - 1.0) < 1e-12 || std::abs(std::abs(l2) - 1.0) < 1e-12)
            throw ConfigError("toral matrix has an eigenvalue of modulus one");
        double lu = std::abs(l1) >= std::abs(l2) ? l1 : l2;
        double ls = std::abs(l1) >= std::abs(l2) ? l2 : l1;
        tau_ = std::log(std::abs(lu));
        lambda_u_ = lu;
        lambda_s_ = ls;
        unstable_dir_ = eigvec(lu);
        stable_dir_ = eigvec(ls);
    }

    const IMat2& matrix() const { return m_; }
    double expansion_rate() const { return tau_; }
    const Eigen::Vector2d& stable_dir() const { return stable_dir_; }
    const Eigen::Vector2d& unstable_dir() const { return unstable_dir_; }
    double stable_eig() const { return lambda_s_; }
    double unstable_eig() const { return lambda_u_; }
    double product_structure_radius() const { return bracket_radius_; }
    double closing_radius() const { return closing_radius_; }

    TorusPoint iterate(const TorusPoint& x, long n) const {
        const IMat2& step = n >= 0 ? m_ : minv_;
        long k = n >= 0 ? n : -n;
        if (x.is_exact()) {
            Rat rx = (*x.exact)[0], ry = (*x.exact)[1];
            for (long i = 0; i < k; ++i) {
                Rat nx = (Rat(step.a) * rx + Rat(step.b) * ry).mod1();
                Rat ny = (Rat(step.c) * rx + Rat(step.d) * ry).mod1();
                rx = nx; ry = ny;
            }
            return TorusPoint::from_rational(rx, ry);
        }
        double cx = x.c[0], cy = x.c[1];
        for (long i = 0; i < k; ++i) {
            double nx = TorusPoint::reduce(double(step.a) * cx + double(step.b) * cy);
            double ny = TorusPoint::reduce(double(step.c) * cx + double(step.d) * cy);
            cx = nx; cy = ny;
        }
        return TorusPoint::from_double(cx, cy);
    }

    /// Minimal lift of y - x: representative of the difference in [-1/2,1/2)^2.
    static Eigen::Vector2d lift_diff(const TorusPoint& x, const TorusPoint& y) {
        auto lift = [](double t) {
            double r = t - std::floor(t);
            if (r >= 0.5) r -= 1.0;
            return r;
        };
        return {lift(y.c[0] - x.c[0]), lift(y.c[1] - x.c[1])};
    }

    double distance(const TorusPoint& x, const TorusPoint& y) const {
        if (x.is_exact() && y.is_exact() && *x.exact == *y.exact) return 0.0;
        return lift_diff(x, y).norm();
    }

    /// [y,z]: the unique w with w - y along the stable direction and
    /// w - z along the unstable direction (on minimal lifts).
    TorusPoint bracket(const TorusPoint& y, const TorusPoint& z) const {
        if (distance(y, z) >= bracket_radius_)
            throw TooFarApart("bracket: points farther than product structure radius");
        Eigen::Matrix2d basis;
        basis.col(0) = stable_dir_;
        basis.col(1) = -unstable_dir_;
        Eigen::Vector2d rhs = lift_diff(y, z);
        Eigen::Vector2d su = basis.colPivHouseholderQr().solve(rhs);
        return TorusPoint::from_double(y.c[0] + su(0) * stable_dir_(0),
                                       y.c[1] + su(0) * stable_dir_(1));
    }

    /// Constructive closing: solve (M^n - I) eta = -e for the minimal lift
    /// error e of the near-return, exact when x is rational.
    ClosingResult<TorusPoint> close_orbit(const TorusPoint& x, int n) const {
        TorusPoint fx = iterate(x, n);
        double delta = distance(x, fx);
        if (delta >= closing_radius_)
            throw NotCloseEnough("close_orbit: return distance " + std::to_string(delta));
        IMat2 mn = m_.pow(n);
        IMat2 dmat{mn.a - 1, mn.b, mn.c, mn.d - 1};
        std::int64_t det = dmat.det();
        if (det == 0) throw SingularClosing("close_orbit: det(M^n - I) = 0");

        TorusPoint p;
        if (x.is_exact()) {
            // Exact rational solve via the adjugate.
            Rat ex = ((*fx.exact)[0] - (*x.exact)[0]).lift_half();
            Rat ey = ((*fx.exact)[1] - (*x.exact)[1]).lift_half();
            Rat hx = (Rat(dmat.d) * -ex + Rat(-dmat.b) * -ey) / Rat(det);
            Rat hy = (Rat(-dmat.c) * -ex + Rat(dmat.a) * -ey) / Rat(det);
            p = TorusPoint::from_rational((*x.exact)[0] + hx, (*x.exact)[1] + hy);
        } else {
            Eigen::Matrix2d dd;
            dd << double(dmat.a), double(dmat.b), double(dmat.c), double(dmat.d);
            Eigen::Vector2d e = lift_diff(x, fx);
            Eigen::Vector2d eta = dd.colPivHouseholderQr().solve(-e);
            p = TorusPoint::from_double(x.c[0] + eta(0), x.c[1] + eta(1));
        }

        ClosingResult<TorusPoint> res;
        res.delta = delta;
        res.orbit = as_orbit(p, n);
        // Measured shadowing constant over the full segment.
        double c = 0.0;
        TorusPoint px = p, xx = x;
        for (int i = 0; i <= n; ++i) {
            double di = distance(px, xx);
            double bound = delta * std::exp(-tau_ * std::min(i, n - i));
            if (bound > 0.0) c = std::max(c, di / bound);
            px = iterate(px, 1);
            xx = iterate(xx, 1);
        }
        res.c_shadow = delta == 0.0 ? 0.0 : c;
        return res;
    }

    /// All orbits of minimal period exactly n, via the Smith form of
    /// M^n - I; exact integer linear algebra throughout.
    std::vector<Orbit> enumerate_periodic(int n, int period_max = 24) const {
        if (n < 1 || n > period_max)
            throw PeriodBudgetExceeded("enumerate_periodic: period " + std::to_string(n));
        IMat2 mn = m_.pow(n);
        IMat2 dmat{mn.a - 1, mn.b, mn.c, mn.d - 1};
        if (dmat.det() == 0) throw SingularClosing("enumerate_periodic: singular M^n - I");
        Smith2 sf = smith_form(dmat);

        std::vector<Orbit> orbits;
        std::map<std::string, bool> seen;
        for (std::int64_t i = 0; i < sf.s1; ++i) {
            for (std::int64_t j = 0; j < sf.s2; ++j) {
                Rat y1(i, sf.s1), y2(j, sf.s2);
                Rat x1 = (Rat(sf.v.a) * y1 + Rat(sf.v.b) * y2).mod1();
                Rat x2 = (Rat(sf.v.c) * y1 + Rat(sf.v.d) * y2).mod1();
                TorusPoint p = TorusPoint::from_rational(x1, x2);
                if (seen.count(p.key())) continue;
                Orbit orb = trace_orbit(p);
                for (const auto& q : orb.points) seen[q.key()] = true;
                if (orb.period == n) orbits.push_back(std::move(orb));
            }
        }
        sort_orbits(orbits);
        return orbits;
    }

    std::int64_t lattice_fixed_count(int n) const {
        IMat2 mn = m_.pow(n);
        IMat2 dmat{mn.a - 1, mn.b, mn.c, mn.d - 1};
        std::int64_t dt = dmat.det();
        return dt >= 0 ? dt : -dt;
    }

private:
    bool returns_to(const TorusPoint& p, const TorusPoint& q) const {
        if (p.is_exact() && q.is_exact()) return *p.exact == *q.exact;
        return distance(p, q) < 1e-9;
    }

    /// Orbit of p knowing f^n(p) = p; minimal period is the smallest
    /// divisor of n at which the orbit returns.
    Orbit as_orbit(const TorusPoint& p, int n) const {
        int m = n;
        for (int d = 1; d < n; ++d) {
            if (n % d != 0) continue;
            if (returns_to(iterate(p, d), p)) { m = d; break; }
        }
        Orbit orb;
        TorusPoint q = p;
        for (int i = 0; i < m; ++i) {
            orb.points.push_back(q);
            q = iterate(q, 1);
        }
        orb.period = m;
        return orb;
    }

    /// Orbit of an exact point with guaranteed finite return.
    Orbit trace_orbit(const TorusPoint& p) const {
        Orbit orb;
        TorusPoint q = p;
        for (int i = 0; i < 1 << 24; ++i) {
            orb.points.push_back(q);
            q = iterate(q, 1);
            if (*q.exact == *p.exact) break;
        }
        orb.period = int(orb.points.size());
        return orb;
    }

    static void sort_orbits(std::vector<Orbit>& orbits) {
        for (auto& orb : orbits) {
            // Rotate so the lexicographically smallest point leads.
            int best = 0;
            for (int i = 1; i < orb.period; ++i)
                if (orb.points[i].key() < orb.points[best].key()) best = i;
            std::rotate(orb.points.begin(), orb.points.begin() + best, orb.points.end());
        }
        std::sort(orbits.begin(), orbits.end(), [](const Orbit& a, const Orbit& b) {
            return a.points[0].key() < b.points[0].key();
        });
    }

    static Eigen::Vector2d eigvec_impl(double a, double b, double c, double d, double l) {
        Eigen::Vector2d v;
        if (std::abs(b) > 1e-14 || std::abs(l - a) > 1e-14)
            v = {b, l - a};
        else
            v = {l - d, c};
        return v.normalized();
    }

    Eigen::Vector2d eigvec(double l) const {
        return eigvec_impl(double(m_.a), double(m_.b), double(m_.c), double(m_.d), l);
    }

    IMat2 m_;
    IMat2 minv_;
    double tau_ = 0.0;
    double lambda_s_ = 0.0, lambda_u_ = 0.0;
    Eigen::Vector2d stable_dir_, unstable_dir_;
    double bracket_radius_;
    double closing_radius_;
};

} // namespace livsic

#endif
