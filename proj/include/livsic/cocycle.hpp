#ifndef LIVSIC_COCYCLE_HPP
#define LIVSIC_COCYCLE_HPP

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "livsic/linalg.hpp"
#include "livsic/sft.hpp"
#include "livsic/torus.hpp"

namespace livsic {

struct TrigTerm {
    Matrix coef;            // matrix coefficient of one trig monomial
    Eigen::Vector2d freq;   // integer frequency vector on T^2
    double phase = 0.0;
};

/// Declarative description of a generator A : M -> GL(d), or of a transfer
/// map C (the two share the same structural kinds).  exp_trig generators
/// are matrix exponentials of trig-polynomial-valued matrices, hence
/// always invertible.
struct CocycleSpec {
    enum class Kind { Constant, ExpTrig, LocallyConstant, Coboundary };

    int dim = 2;
    Kind kind = Kind::Constant;
    double holder_alpha = 1.0;
    double holder_const = 0.0;  // declared c0; <= 0 means "auto"

    Matrix constant_op;                     // Constant
    std::vector<TrigTerm> terms;            // ExpTrig
    int window = 1;                         // LocallyConstant
    std::map<std::string, Matrix> table;    // word (indices 0..window-1) -> matrix
    std::shared_ptr<CocycleSpec> transfer;  // Coboundary: the underlying C

    // Optional multiplicative perturbation exp(eta * G(x)) applied on the
    // left of the generator; eta = 0 leaves the spec bit-for-bit unchanged.
    double perturb_eta = 0.0;
    std::vector<TrigTerm> perturb_terms;          // torus perturbation generator
    std::map<std::string, Matrix> perturb_table;  // SFT perturbation generator

    static CocycleSpec constant(Matrix m) {
        CocycleSpec s;
        s.dim = int(m.rows());
        s.kind = Kind::Constant;
        s.constant_op = std::move(m);
        return s;
    }

    static CocycleSpec exp_trig(int dim, std::vector<TrigTerm> terms) {
        CocycleSpec s;
        s.dim = dim;
        s.kind = Kind::ExpTrig;
        s.terms = std::move(terms);
        return s;
    }

    static CocycleSpec locally_constant(int dim, int window,
                                        std::map<std::string, Matrix> table) {
        CocycleSpec s;
        s.dim = dim;
        s.kind = Kind::LocallyConstant;
        s.window = window;
        s.table = std::move(table);
        return s;
    }

    static CocycleSpec coboundary_of(CocycleSpec c) {
        CocycleSpec s;
        s.dim = c.dim;
        s.kind = Kind::Coboundary;
        s.transfer = std::make_shared<CocycleSpec>(std::move(c));
        return s;
    }
};

using TransferSpec = CocycleSpec;

namespace detail {

inline InvertibleOp eval_exp_trig(const CocycleSpec& spec, const TorusPoint& x) {
    Matrix g = Matrix::Zero(spec.dim, spec.dim);
    for (const auto& t : spec.terms) {
        double arg = 2.0 * M_PI * (t.freq(0) * x.c[0] + t.freq(1) * x.c[1]) + t.phase;
        g += t.coef * std::sin(arg);
    }
    Matrix f = g.exp();
    Matrix i = (-g).exp();
    return InvertibleOp(std::move(f), std::move(i));
}

inline InvertibleOp eval_locally_constant(const CocycleSpec& spec,
                                          const SymbolicPoint& x) {
    std::string w = x.word(0, spec.window);
    auto it = spec.table.find(w);
    if (it == spec.table.end())
        throw InadmissibleWord("locally_constant: no entry for word " + w);
    return InvertibleOp(it->second);
}

} // namespace detail

namespace detail {

template <class Base>
InvertibleOp eval_perturbation(const CocycleSpec& spec, const Base&,
                               const typename Base::Point& x) {
    Matrix g = Matrix::Zero(spec.dim, spec.dim);
    if constexpr (std::is_same_v<Base, ToralAutomorphism>) {
        for (const auto& t : spec.perturb_terms) {
            double arg = 2.0 * M_PI * (t.freq(0) * x.c[0] + t.freq(1) * x.c[1]) + t.phase;
            g += t.coef * std::sin(arg);
        }
    } else {
        auto it = spec.perturb_table.find(x.word(0, 1));
        if (it == spec.perturb_table.end())
            throw InadmissibleWord("perturbation: no entry for symbol " + x.word(0, 1));
        g = it->second;
    }
    g *= spec.perturb_eta;
    Matrix f = g.exp();
    Matrix i = (-g).exp();
    return InvertibleOp(std::move(f), std::move(i));
}

} // namespace detail

/// Evaluates the spec as a map M -> GL(d) at x.  For generator use this is
/// A(x); a TransferSpec evaluated the same way yields C(x).
template <class Base>
InvertibleOp eval_map(const CocycleSpec& spec, const Base& base,
                      const typename Base::Point& x) {
    if (spec.perturb_eta != 0.0) {
        CocycleSpec clean = spec;
        clean.perturb_eta = 0.0;
        return detail::eval_perturbation(spec, base, x) * eval_map(clean, base, x);
    }
    switch (spec.kind) {
        case CocycleSpec::Kind::Constant:
            return InvertibleOp(spec.constant_op);
        case CocycleSpec::Kind::ExpTrig:
            if constexpr (std::is_same_v<Base, ToralAutomorphism>)
                return detail::eval_exp_trig(spec, x);
            else
                throw ConfigError("exp_trig spec requires a toral base");
        case CocycleSpec::Kind::LocallyConstant:
            if constexpr (std::is_same_v<Base, Sft>)
                return detail::eval_locally_constant(spec, x);
            else
                throw ConfigError("locally_constant spec requires an SFT base");
        case CocycleSpec::Kind::Coboundary: {
            InvertibleOp cfx = eval_map(*spec.transfer, base, base.iterate(x, 1));
            InvertibleOp cx = eval_map(*spec.transfer, base, x);
            return cfx * cx.inverted();
        }
    }
    throw ConfigError("eval_map: unknown kind");
}

template <class Base>
InvertibleOp eval_generator(const CocycleSpec& spec, const Base& base,
                            const typename Base::Point& x) {
    return eval_map(spec, base, x);
}

/// A_x^n for either sign of n, as an overflow-safe scaled product.
template <class Base>
ScaledProduct orbit_product(const CocycleSpec& spec, const Base& base,
                            const typename Base::Point& x, long n) {
    ScaledProduct p(spec.dim);
    if (n >= 0) {
        auto y = x;
        for (long i = 0; i < n; ++i) {
            p.compose(eval_generator(spec, base, y));
            y = base.iterate(y, 1);
        }
    } else {
        auto y = x;
        for (long j = 1; j <= -n; ++j) {
            y = base.iterate(y, -1);
            p.compose(eval_generator(spec, base, y).inverted());
        }
    }
    return p;
}

struct ExponentEstimate {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    // (n, lambda_plus(n), lambda_minus(n)) at n/4, n/2, 3n/4, n
    std::vector<std::array<double, 3>> checkpoints;
};

/// Finite-orbit Lyapunov exponent estimates from a single orbit of length n.
template <class Base>
ExponentEstimate lyapunov_exponents(const CocycleSpec& spec, const Base& base,
                                    const typename Base::Point& x, long n,
                                    Norm norm = Norm::Inf) {
    if (n < 100) throw ConfigError("lyapunov_exponents: orbit length < 100");
    ExponentEstimate est;
    ScaledProduct p(spec.dim);
    auto y = x;
    std::vector<long> marks = {n / 4, n / 2, 3 * n / 4, n};
    std::size_t mark = 0;
    for (long i = 0; i < n; ++i) {
        p.compose(eval_generator(spec, base, y));
        y = base.iterate(y, 1);
        while (mark < marks.size() && i + 1 == marks[mark]) {
            double ln = double(i + 1);
            est.checkpoints.push_back({ln, p.log_norm(norm) / ln, -p.inv_log_norm(norm) / ln});
            ++mark;
        }
    }
    est.lambda_plus = p.log_norm(norm) / double(n);
    est.lambda_minus = -p.inv_log_norm(norm) / double(n);
    return est;
}

/// Crude uniform bound R = max over sampled points of max(|A|, |A^{-1}|).
template <class Base>
double generator_norm_bound(const CocycleSpec& spec, const Base& base,
                            const std::vector<typename Base::Point>& samples,
                            Norm norm = Norm::Inf) {
    double r = 0.0;
    for (const auto& x : samples) {
        InvertibleOp a = eval_generator(spec, base, x);
        r = std::max({r, a.norm(norm), a.inv_norm(norm)});
    }
    return r;
}

struct LyapunovNormValue {
    double value = 0.0;
    double tail_bound = 0.0;
    int trunc = 0;
};

/// Truncated two-sided Lyapunov norm sum_{|n| <= trunc} |A_x^n u| e^{-eps |n|},
/// with the a-priori geometric tail bound from the uniform generator bound R.
template <class Base>
LyapunovNormValue lyapunov_norm(const CocycleSpec& spec, const Base& base,
                                const typename Base::Point& x, const Vector& u,
                                double eps, int trunc, double r_bound,
                                double tail_tol = 1e-9, Norm norm = Norm::Inf) {
    if (eps <= 0.0) throw ConfigError("lyapunov_norm: eps must be positive");
    double q = r_bound * std::exp(-eps);
    double un = norm == Norm::Inf ? u.template lpNorm<Eigen::Infinity>() : u.norm();
    double tail = q < 1.0
                      ? 2.0 * un * std::pow(q, double(trunc + 1)) / (1.0 - q)
                      : std::numeric_limits<double>::infinity();
    if (!(tail < tail_tol))
        throw TailNotNegligible("lyapunov_norm: tail bound " + std::to_string(tail));

    auto vec_norm = [&](const Vector& v) {
        return norm == Norm::Inf ? v.template lpNorm<Eigen::Infinity>() : v.norm();
    };
    double sum = un;  // n = 0 term
    // Forward and backward tracks, updated incrementally.
    Vector vf = u, vb = u;
    auto yf = x, yb = x;
    for (int k = 1; k <= trunc; ++k) {
        vf = eval_generator(spec, base, yf).forward() * vf;
        yf = base.iterate(yf, 1);
        yb = base.iterate(yb, -1);
        vb = eval_generator(spec, base, yb).inverse() * vb;
        sum += (vec_norm(vf) + vec_norm(vb)) * std::exp(-eps * k);
    }
    return {sum, tail, trunc};
}

struct BunchingResult {
    bool pass = false;
    double worst_margin = 0.0;  // min over k, both directions, of kN theta - sum log(|.||.^-1|)
};

/// Membership test for D(N, theta): forward and backward block products of
/// |A^N| |(A^N)^{-1}| bounded by e^{kN theta} for all k <= k_max.
template <class Base>
BunchingResult bunching_membership(const CocycleSpec& spec, const Base& base,
                                   const typename Base::Point& x, int N,
                                   double theta, int k_max,
                                   Norm norm = Norm::Inf) {
    if (N < 1 || k_max < 1) throw ConfigError("bunching_membership: N, k_max >= 1");
    BunchingResult res;
    res.worst_margin = std::numeric_limits<double>::infinity();
    for (int dir : {+1, -1}) {
        double cum = 0.0;
        auto y = x;
        for (int k = 1; k <= k_max; ++k) {
            ScaledProduct block = orbit_product(spec, base, y, dir * N);
            cum += block.log_norm(norm) + block.inv_log_norm(norm);
            y = base.iterate(y, dir * N);
            double margin = double(k) * double(N) * theta - cum;
            res.worst_margin = std::min(res.worst_margin, margin);
        }
    }
    res.pass = res.worst_margin >= 0.0;
    return res;
}

struct GoodTimes {
    std::vector<char> member;  // member[n] for 0 <= n <= n_max
    double density = 0.0;      // |S cap [0, n_max]| / (n_max + 1)
};

/// S = { n <= n_max : a_n(x) - a_{n-i}(f^i x) >= (lambda - eps_i) i for all
/// 0 <= i <= n }, where a_n = log|A_x^n|.  The full triangular table of
/// log-norms is built row by row with incremental products.
template <class Base, class EpsFn>
GoodTimes good_times(const CocycleSpec& spec, const Base& base,
                     const typename Base::Point& x, int n_max,
                     double lambda_est, EpsFn eps_fn, Norm norm = Norm::Inf) {
    // a[i][m] = log |A_{f^i x}^m|, m = 0 .. n_max - i
    std::vector<std::vector<double>> a(std::size_t(n_max) + 1);
    auto start = x;
    for (int i = 0; i <= n_max; ++i) {
        ScaledProduct p(spec.dim);
        auto y = start;
        auto& row = a[std::size_t(i)];
        row.resize(std::size_t(n_max - i) + 1);
        row[0] = 0.0;
        for (int m = 1; m <= n_max - i; ++m) {
            p.compose(eval_generator(spec, base, y));
            y = base.iterate(y, 1);
            row[std::size_t(m)] = p.log_norm(norm);
        }
        start = base.iterate(start, 1);
    }
    GoodTimes gt;
    gt.member.assign(std::size_t(n_max) + 1, 1);
    int count = 0;
    for (int n = 0; n <= n_max; ++n) {
        bool ok = true;
        for (int i = 1; i <= n && ok; ++i) {
            double lhs = a[0][std::size_t(n)] - a[std::size_t(i)][std::size_t(n - i)];
            if (lhs < (lambda_est - eps_fn(i)) * double(i) - 1e-12) ok = false;
        }
        gt.member[std::size_t(n)] = char(ok);
        count += ok;
    }
    gt.density = double(count) / double(n_max + 1);
    return gt;
}

} // namespace livsic

#endif
