#ifndef LIVSIC_PERIODIC_HPP
#define LIVSIC_PERIODIC_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "livsic/cocycle.hpp"

namespace livsic {

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

inline std::string orbit_key(const ToralAutomorphism&,
                             const PeriodicOrbit<TorusPoint>& orb) {
    return orb.points[0].key();
}

inline std::string orbit_key(const Sft&, const PeriodicOrbit<SymbolicPoint>& orb) {
    return orb.points[0].word(0, orb.period);
}

/// One row of the Livsic obstruction battery: the periodic product A_p^n
/// against Id, with a growth-aware tolerance tol_base * R^{2n}.
struct ObstructionReport {
    int period = 0;
    std::string key;
    double deviation = 0.0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::Fail;
    double log_norm = 0.0;
    double log_inv_norm = 0.0;
};

template <class Base>
ObstructionReport obstruction_single(const CocycleSpec& spec, const Base& base,
                                     const PeriodicOrbit<typename Base::Point>& orb,
                                     double tol_base, double r_bound,
                                     Norm norm = Norm::Inf) {
    int n = orb.period;
    ScaledProduct p = orbit_product(spec, base, orb.start(), n);
    ObstructionReport rep;
    rep.period = n;
    rep.key = orbit_key(base, orb);
    rep.log_norm = p.log_norm(norm);
    rep.log_inv_norm = p.inv_log_norm(norm);
    try {
        rep.deviation = op_metric(p.value(), InvertibleOp::identity(spec.dim), norm);
    } catch (const NonFinite&) {
        rep.deviation = std::numeric_limits<double>::infinity();
    }
    rep.tolerance = tol_base * std::pow(r_bound, 2.0 * n);
    rep.verdict = rep.deviation <= rep.tolerance ? Verdict::Pass
                  : rep.deviation <= 10.0 * rep.tolerance ? Verdict::Inconclusive
                                                          : Verdict::Fail;
    return rep;
}

template <class Base>
std::vector<ObstructionReport> obstruction_check(const CocycleSpec& spec,
                                                 const Base& base, int period_max,
                                                 double tol_base, double r_bound,
                                                 Norm norm = Norm::Inf) {
    std::vector<ObstructionReport> out;
    for (int n = 1; n <= period_max; ++n)
        for (const auto& orb : base.enumerate_periodic(n, period_max))
            out.push_back(obstruction_single(spec, base, orb, tol_base, r_bound, norm));
    return out;
}

struct PeriodicExponentRow {
    int period = 0;
    std::string key;
    double lambda_plus = 0.0;   // (1/n) log |A_p^n|
    double lambda_minus = 0.0;  // -(1/n) log |(A_p^n)^{-1}|
};

struct PeriodicExponents {
    double sup_plus = -std::numeric_limits<double>::infinity();
    double inf_minus = std::numeric_limits<double>::infinity();
    std::vector<PeriodicExponentRow> table;
};

/// Periodic-data approximation of the Lyapunov exponents: extrema of the
/// normalized periodic log-norms over all orbits up to period_max.
template <class Base>
PeriodicExponents periodic_exponents(const CocycleSpec& spec, const Base& base,
                                     int period_max, Norm norm = Norm::Inf) {
    PeriodicExponents res;
    for (int n = 1; n <= period_max; ++n) {
        for (const auto& orb : base.enumerate_periodic(n, period_max)) {
            ScaledProduct p = orbit_product(spec, base, orb.start(), n);
            PeriodicExponentRow row;
            row.period = n;
            row.key = orbit_key(base, orb);
            row.lambda_plus = p.log_norm(norm) / double(n);
            row.lambda_minus = -p.inv_log_norm(norm) / double(n);
            res.sup_plus = std::max(res.sup_plus, row.lambda_plus);
            res.inf_minus = std::min(res.inf_minus, row.lambda_minus);
            res.table.push_back(std::move(row));
        }
    }
    return res;
}

struct NearClosingResult {
    double deviation = 0.0;  // d(A_x^n, Id)
    double delta = 0.0;      // measured shadowing amplitude
    double fitted_c2 = 0.0;  // deviation / delta^alpha
};

/// The near-return diagnostic d(A_x^n, Id) together with the empirical
/// constant it fits against delta^alpha.
template <class Base>
NearClosingResult near_closing_deviation(const CocycleSpec& spec, const Base& base,
                                         const typename Base::Point& x, int n,
                                         double tol_base, double r_bound,
                                         Norm norm = Norm::Inf) {
    ClosingResult<typename Base::Point> closed;
    try {
        closed = base.close_orbit(x, n);
    } catch (const Error& e) {
        throw ClosingFailed(std::string("near_closing_deviation: ") + e.what());
    }
    // The closed orbit must itself pass the identity test, else the
    // diagnostic has no baseline.
    ScaledProduct pp = orbit_product(spec, base, closed.orbit.start(), n);
    double p_dev;
    try {
        p_dev = op_metric(pp.value(), InvertibleOp::identity(spec.dim), norm);
    } catch (const NonFinite&) {
        p_dev = std::numeric_limits<double>::infinity();
    }
    if (p_dev > 10.0 * tol_base * std::pow(r_bound, 2.0 * n))
        throw ClosingFailed("near_closing_deviation: closed orbit fails obstruction");

    NearClosingResult res;
    res.delta = closed.delta;
    ScaledProduct px = orbit_product(spec, base, x, n);
    try {
        res.deviation = op_metric(px.value(), InvertibleOp::identity(spec.dim), norm);
    } catch (const NonFinite&) {
        res.deviation = std::numeric_limits<double>::infinity();
    }
    res.fitted_c2 = res.delta > 0.0
                        ? res.deviation / std::pow(res.delta, spec.holder_alpha)
                        : 0.0;
    return res;
}

enum class DistortionMode { Symmetric, HalfRate };

struct DistortionResult {
    double ratio_forward = 0.0;  // |A_p^n| / |A_x^n|
    double ratio_inverse = 0.0;  // |(A_p^n)^{-1}| / |(A_x^n)^{-1}|
    double delta = 0.0;          // measured profile amplitude
    bool within = false;         // both ratios in [1/2, 2]
};

/// Distortion of norms between a periodic segment and a shadowing one.
/// Symmetric mode needs vanishing periodic exponents and two-sided
/// exponential closeness; half-rate mode needs the e^{-tau j / 2} profile
/// (the caller is responsible for n lying in the good-time set of p).
template <class Base>
DistortionResult distortion_check(const CocycleSpec& spec, const Base& base,
                                  const PeriodicOrbit<typename Base::Point>& p,
                                  const typename Base::Point& x, int n,
                                  DistortionMode mode, double delta_max,
                                  Norm norm = Norm::Inf) {
    double tau = base.expansion_rate();
    double delta = 0.0;
    {
        auto px = p.points[0];
        auto xx = x;
        for (int j = 0; j <= n; ++j) {
            double rate = mode == DistortionMode::Symmetric
                              ? std::exp(-tau * std::min(j, n - j))
                              : std::exp(-0.5 * tau * j);
            delta = std::max(delta, base.distance(px, xx) / rate);
            px = base.iterate(px, 1);
            xx = base.iterate(xx, 1);
        }
    }
    if (delta > delta_max)
        throw ProfileViolated("distortion_check: profile amplitude " +
                              std::to_string(delta));
    if (mode == DistortionMode::Symmetric) {
        ScaledProduct per = orbit_product(spec, base, p.start(), p.period);
        double lp = per.log_norm(norm) / double(p.period);
        double lm = -per.inv_log_norm(norm) / double(p.period);
        if (std::abs(lp) > 1e-6 || std::abs(lm) > 1e-6)
            throw ProfileViolated("distortion_check: symmetric mode needs "
                                  "vanishing periodic exponents");
    }

    ScaledProduct pp = orbit_product(spec, base, p.start(), n);
    ScaledProduct px = orbit_product(spec, base, x, n);
    DistortionResult res;
    res.delta = delta;
    res.ratio_forward = std::exp(pp.log_norm(norm) - px.log_norm(norm));
    res.ratio_inverse = std::exp(pp.inv_log_norm(norm) - px.inv_log_norm(norm));
    res.within = res.ratio_forward >= 0.5 && res.ratio_forward <= 2.0 &&
                 res.ratio_inverse >= 0.5 && res.ratio_inverse <= 2.0;
    return res;
}

} // namespace livsic

#endif
