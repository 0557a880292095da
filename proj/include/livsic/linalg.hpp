#ifndef LIVSIC_LINALG_HPP
#define LIVSIC_LINALG_HPP

#include <cmath>
#include <cstdint>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "livsic/errors.hpp"

namespace livsic {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Norm { Inf, Two };

inline const char* norm_name(Norm n) { return n == Norm::Inf ? "inf" : "two"; }

/// Induced operator norm.  The inf-norm (max absolute row sum) is exact in
/// floating point and is the default everywhere; the 2-norm is the largest
/// singular value.
inline double operator_norm(const Matrix& m, Norm kind = Norm::Inf) {
    if (!m.allFinite()) throw NonFinite("operator_norm: non-finite entries");
    if (kind == Norm::Inf) return m.cwiseAbs().rowwise().sum().maxCoeff();
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

/// A d x d invertible matrix carried together with its inverse.  Inverses
/// are propagated through every product rather than re-solved at the end.
class InvertibleOp {
public:
    InvertibleOp() = default;

    InvertibleOp(Matrix fwd, Matrix inv)
        : forward_(std::move(fwd)), inverse_(std::move(inv)) {
        check();
    }

    explicit InvertibleOp(const Matrix& fwd)
        : forward_(fwd), inverse_(fwd.inverse()) {
        check();
    }

    static InvertibleOp identity(int dim) {
        return InvertibleOp(Matrix::Identity(dim, dim),
                            Matrix::Identity(dim, dim));
    }

    int dim() const { return int(forward_.rows()); }
    const Matrix& forward() const { return forward_; }
    const Matrix& inverse() const { return inverse_; }

    double norm(Norm kind = Norm::Inf) const { return operator_norm(forward_, kind); }
    double inv_norm(Norm kind = Norm::Inf) const { return operator_norm(inverse_, kind); }

    /// m(A) = inf_{|v|=1} |Av| = 1/|A^{-1}|.
    double m_lower(Norm kind = Norm::Inf) const { return 1.0 / inv_norm(kind); }

    InvertibleOp inverted() const { return InvertibleOp(inverse_, forward_); }

    friend InvertibleOp operator*(const InvertibleOp& a, const InvertibleOp& b) {
        if (a.dim() != b.dim()) throw DimMismatch("InvertibleOp product");
        return InvertibleOp(a.forward_ * b.forward_, b.inverse_ * a.inverse_);
    }

private:
    void check() const {
        int d = dim();
        if (forward_.rows() != forward_.cols() || inverse_.rows() != d ||
            inverse_.cols() != d)
            throw DimMismatch("InvertibleOp: not square / shape mismatch");
        if (!forward_.allFinite() || !inverse_.allFinite())
            throw NonFinite("InvertibleOp: non-finite entries");
        double resid = operator_norm(forward_ * inverse_ - Matrix::Identity(d, d));
        if (resid > 1e-10 * d)
            throw NonFinite("InvertibleOp: inverse residual " + std::to_string(resid));
    }

    Matrix forward_;
    Matrix inverse_;
};

/// d(A,B) = |A - B| + |A^{-1} - B^{-1}|.
inline double op_metric(const InvertibleOp& a, const InvertibleOp& b,
                        Norm kind = Norm::Inf) {
    if (a.dim() != b.dim()) throw DimMismatch("op_metric");
    return operator_norm(a.forward() - b.forward(), kind) +
           operator_norm(a.inverse() - b.inverse(), kind);
}

/// Orbit product stored as (unit-scaled matrix, power-of-two scale) so that
/// products of thousands of factors neither overflow nor underflow.  The
/// represented product is 2^scale_exp * unit; the inverse track is kept
/// alongside.  Renormalization is by ldexp, so it introduces no roundoff.
class ScaledProduct {
public:
    explicit ScaledProduct(int dim)
        : unit_(Matrix::Identity(dim, dim)),
          inv_unit_(Matrix::Identity(dim, dim)) {}

    ScaledProduct(Matrix unit, std::int64_t scale_exp, Matrix inv_unit,
                  std::int64_t inv_scale_exp, std::int64_t length)
        : unit_(std::move(unit)), inv_unit_(std::move(inv_unit)),
          scale_exp_(scale_exp), inv_scale_exp_(inv_scale_exp), length_(length) {
        renormalize();
    }

    int dim() const { return int(unit_.rows()); }
    std::int64_t length() const { return length_; }
    const Matrix& unit() const { return unit_; }
    const Matrix& inv_unit() const { return inv_unit_; }
    double log_scale() const { return double(scale_exp_) * M_LN2; }
    double inv_log_scale() const { return double(inv_scale_exp_) * M_LN2; }

    /// log |product| without ever forming the full-scale matrix.
    double log_norm(Norm kind = Norm::Inf) const {
        return log_scale() + std::log(operator_norm(unit_, kind));
    }
    double inv_log_norm(Norm kind = Norm::Inf) const {
        return inv_log_scale() + std::log(operator_norm(inv_unit_, kind));
    }

    /// Appends one factor on the left of the forward track (and on the
    /// right of the inverse track).
    void compose(const InvertibleOp& a) {
        if (a.dim() != dim()) throw DimMismatch("ScaledProduct::compose");
        unit_ = a.forward() * unit_;
        inv_unit_ = inv_unit_ * a.inverse();
        ++length_;
        renormalize();
    }

    /// Left-composition with another scaled product: this := p * this.
    void compose(const ScaledProduct& p) {
        if (p.dim() != dim()) throw DimMismatch("ScaledProduct::compose");
        unit_ = p.unit_ * unit_;
        inv_unit_ = inv_unit_ * p.inv_unit_;
        scale_exp_ += p.scale_exp_;
        inv_scale_exp_ += p.inv_scale_exp_;
        length_ += p.length_;
        renormalize();
    }

    /// Materializes the represented operator.  Throws NonFinite if the
    /// scale exceeds double range.
    InvertibleOp value() const {
        Matrix f = unit_ * std::ldexp(1.0, int(scale_exp_));
        Matrix i = inv_unit_ * std::ldexp(1.0, int(inv_scale_exp_));
        if (!f.allFinite() || !i.allFinite())
            throw NonFinite("ScaledProduct::value overflow");
        return InvertibleOp(std::move(f), std::move(i));
    }

    ScaledProduct inverted() const {
        return ScaledProduct(inv_unit_, inv_scale_exp_, unit_, scale_exp_, length_);
    }

private:
    void renormalize() {
        renorm(unit_, scale_exp_);
        renorm(inv_unit_, inv_scale_exp_);
    }

    static void renorm(Matrix& m, std::int64_t& exp2) {
        double n = operator_norm(m);
        if (!std::isfinite(n) || n == 0.0)
            throw NonFinite("ScaledProduct: singular or non-finite factor");
        // Bring the unit norm back into [1/2, 2) by an exact power of two.
        int e = 0;
        std::frexp(n, &e);  // n = f * 2^e, f in [1/2,1)
        if (e != 0) {
            m *= std::ldexp(1.0, -e);
            exp2 += e;
        }
    }

    Matrix unit_;
    Matrix inv_unit_;
    std::int64_t scale_exp_ = 0;
    std::int64_t inv_scale_exp_ = 0;
    std::int64_t length_ = 0;
};

} // namespace livsic

#endif
