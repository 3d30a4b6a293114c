// Core value types: composite Hilbert-space layouts, operators, states.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellflow {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

constexpr Complex kI{0.0, 1.0};

/// Ordered list of subsystem dimensions; subsystem 0 is the leftmost
/// Kronecker factor.
class SpaceLayout {
public:
    SpaceLayout() = default;

    SpaceLayout(std::initializer_list<Index> dims)
        : SpaceLayout(std::vector<Index>(dims)) {}

    explicit SpaceLayout(std::vector<Index> dims) : dims_(std::move(dims)) {
        if (dims_.empty())
            throw std::invalid_argument("SpaceLayout: need at least one subsystem");
        total_ = 1;
        for (Index d : dims_) {
            if (d < 1)
                throw std::invalid_argument("SpaceLayout: dimensions must be positive");
            total_ *= d;
        }
    }

    Index total() const { return total_; }
    std::size_t subsystems() const { return dims_.size(); }
    Index dim(std::size_t k) const { return dims_.at(k); }
    const std::vector<Index>& dims() const { return dims_; }

    /// Dimension of everything left (right) of subsystem k.
    Index dim_before(std::size_t k) const {
        Index d = 1;
        for (std::size_t i = 0; i < k; ++i) d *= dims_[i];
        return d;
    }
    Index dim_after(std::size_t k) const {
        Index d = 1;
        for (std::size_t i = k + 1; i < dims_.size(); ++i) d *= dims_[i];
        return d;
    }

    bool operator==(const SpaceLayout& other) const { return dims_ == other.dims_; }
    bool operator!=(const SpaceLayout& other) const { return !(*this == other); }

    std::string to_string() const {
        std::string s = "[";
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(dims_[i]);
        }
        return s + "]";
    }

private:
    std::vector<Index> dims_;
    Index total_ = 0;
};

/// Dense operator on a labeled composite space. Hermiticity is checkable,
/// never assumed.
struct Operator {
    SpaceLayout layout;
    Matrix mat;

    Operator() = default;
    Operator(SpaceLayout lay, Matrix m) : layout(std::move(lay)), mat(std::move(m)) {
        if (mat.rows() != mat.cols() || mat.rows() != layout.total())
            throw std::invalid_argument("Operator: matrix does not match layout " +
                                        layout.to_string());
    }

    Operator adjoint() const { return Operator(layout, mat.adjoint()); }

    bool is_hermitian(double tol = 1e-12) const {
        return (mat - mat.adjoint()).cwiseAbs().maxCoeff() <= tol;
    }
};

inline Operator operator+(const Operator& a, const Operator& b) {
    if (a.layout != b.layout) throw std::invalid_argument("Operator+: layout mismatch");
    return Operator(a.layout, a.mat + b.mat);
}
inline Operator operator-(const Operator& a, const Operator& b) {
    if (a.layout != b.layout) throw std::invalid_argument("Operator-: layout mismatch");
    return Operator(a.layout, a.mat - b.mat);
}
inline Operator operator*(const Operator& a, const Operator& b) {
    if (a.layout != b.layout) throw std::invalid_argument("Operator*: layout mismatch");
    return Operator(a.layout, a.mat * b.mat);
}
inline Operator operator*(Complex c, const Operator& a) {
    return Operator(a.layout, c * a.mat);
}
inline Operator operator*(double c, const Operator& a) {
    return Operator(a.layout, c * a.mat);
}
inline Operator operator-(const Operator& a) { return Operator(a.layout, -a.mat); }

/// Pure state vector. Unnormalized kets are allowed as intermediates;
/// normalized() enforces unit norm.
struct Ket {
    SpaceLayout layout;
    Vector amps;

    Ket() = default;
    Ket(SpaceLayout lay, Vector v) : layout(std::move(lay)), amps(std::move(v)) {
        if (amps.size() != layout.total())
            throw std::invalid_argument("Ket: amplitude vector does not match layout");
    }

    double norm() const { return amps.norm(); }

    Ket normalized() const {
        double n = norm();
        if (n <= 0.0) throw std::runtime_error("Ket::normalized: zero vector");
        return Ket(layout, amps / n);
    }

    /// |psi><psi| as a plain matrix.
    Matrix projector() const {
        Vector v = amps / amps.norm();
        return v * v.adjoint();
    }
};

struct DensityTolerances {
    double hermiticity = 1e-10;
    double trace = 1e-10;
    double positivity = -1e-9;  // lowest admissible eigenvalue
};

/// Density operator with construction-time validation: Hermitian within
/// 1e-10, unit trace within 1e-10, eigenvalues >= -1e-9.
class DensityOp {
public:
    DensityOp() = default;

    DensityOp(SpaceLayout lay, Matrix m, DensityTolerances tol = {})
        : layout_(std::move(lay)), mat_(std::move(m)) {
        validate(tol);
    }

    struct Unchecked {};
    /// Fast path for integrators that maintain the invariants themselves.
    DensityOp(Unchecked, SpaceLayout lay, Matrix m)
        : layout_(std::move(lay)), mat_(std::move(m)) {}

    const SpaceLayout& layout() const { return layout_; }
    const Matrix& mat() const { return mat_; }

    double purity() const { return (mat_ * mat_).trace().real(); }

private:
    void validate(const DensityTolerances& tol) const {
        if (mat_.rows() != mat_.cols() || mat_.rows() != layout_.total())
            throw std::invalid_argument("DensityOp: matrix does not match layout");
        double herm = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
        if (herm > tol.hermiticity)
            throw std::invalid_argument("DensityOp: not Hermitian (dev " +
                                        std::to_string(herm) + ")");
        double tr = std::abs(mat_.trace() - Complex(1.0));
        if (tr > tol.trace)
            throw std::invalid_argument("DensityOp: trace not 1 (dev " +
                                        std::to_string(tr) + ")");
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (mat_ + mat_.adjoint()),
                                                 Eigen::EigenvaluesOnly);
        double lo = es.eigenvalues().minCoeff();
        if (lo < tol.positivity)
            throw std::invalid_argument("DensityOp: negative eigenvalue " +
                                        std::to_string(lo));
    }

    SpaceLayout layout_;
    Matrix mat_;
};

inline Complex expectation(const Operator& op, const DensityOp& rho) {
    if (op.layout != rho.layout())
        throw std::invalid_argument("expectation: layout mismatch");
    return (op.mat * rho.mat()).trace();
}

}  // namespace bellflow
