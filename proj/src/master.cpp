#include "bellflow/master.hpp"

#include "bellflow/qops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace bellflow::master {

GeneratorTerm GeneratorTerm::hamiltonian(Operator h, double rate) {
    if (!h.is_hermitian(1e-9))
        throw std::invalid_argument("GeneratorTerm: Hamiltonian must be Hermitian");
    return {Kind::Hamiltonian, std::move(h), rate};
}

GeneratorTerm GeneratorTerm::dissipator(Operator l, double rate) {
    return {Kind::Dissipator, std::move(l), rate};
}

Liouvillian::Liouvillian(SpaceLayout layout, Matrix super)
    : layout_(std::move(layout)), super_(std::move(super)) {
    const Index d2 = layout_.total() * layout_.total();
    if (super_.rows() != d2 || super_.cols() != d2)
        throw std::invalid_argument("Liouvillian: expected d^2 x d^2 matrix");
}

Liouvillian Liouvillian::build(const SpaceLayout& layout,
                               std::span<const GeneratorTerm> terms) {
    const Index d = layout.total();
    Matrix id = Matrix::Identity(d, d);
    Matrix super = Matrix::Zero(d * d, d * d);
    for (const auto& t : terms) {
        if (t.op.layout != layout)
            throw std::invalid_argument("Liouvillian::build: term layout mismatch");
        const Matrix& m = t.op.mat;
        if (t.kind == GeneratorTerm::Kind::Hamiltonian) {
            super += -kI * t.rate *
                     (Eigen::kroneckerProduct(id, m).eval() -
                      Eigen::kroneckerProduct(m.transpose(), id).eval());
        } else {
            Matrix ldl = m.adjoint() * m;
            super += t.rate * (Eigen::kroneckerProduct(m.conjugate(), m).eval() -
                               0.5 * Eigen::kroneckerProduct(id, ldl).eval() -
                               0.5 * Eigen::kroneckerProduct(ldl.transpose(), id).eval());
        }
    }
    return Liouvillian(layout, std::move(super));
}

Matrix Liouvillian::apply(const Matrix& rho) const {
    const Index d = layout_.total();
    Vector v = super_ * rho.reshaped();
    return v.reshaped(d, d);
}

double Liouvillian::trace_defect() const {
    const Index d = layout_.total();
    Vector tr_row = Matrix::Identity(d, d).reshaped();
    return (tr_row.transpose() * super_).cwiseAbs().maxCoeff();
}

Liouvillian& Liouvillian::operator+=(const Liouvillian& other) {
    if (layout_ != other.layout_)
        throw std::invalid_argument("Liouvillian+=: layout mismatch");
    super_ += other.super_;
    return *this;
}

Matrix apply_terms(std::span<const GeneratorTerm> terms, const Matrix& rho) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& t : terms) {
        const Matrix& m = t.op.mat;
        if (t.kind == GeneratorTerm::Kind::Hamiltonian) {
            out.noalias() += (-kI * t.rate) * (m * rho - rho * m);
        } else {
            Matrix ldl = m.adjoint() * m;
            out.noalias() += t.rate * (m * rho * m.adjoint());
            out.noalias() -= (0.5 * t.rate) * (ldl * rho + rho * ldl);
        }
    }
    return out;
}

namespace {

template <typename Rhs>
Matrix rk4(const Rhs& rhs, Matrix rho, double t, double dt) {
    if (dt <= 0) throw std::invalid_argument("evolve: dt must be > 0");
    if (t < 0) throw std::invalid_argument("evolve: t must be >= 0");
    long n = std::lround(t / dt);
    double h = n > 0 ? t / double(n) : 0.0;
    for (long k = 0; k < n; ++k) {
        Matrix k1 = rhs(rho);
        Matrix k2 = rhs(rho + 0.5 * h * k1);
        Matrix k3 = rhs(rho + 0.5 * h * k2);
        Matrix k4 = rhs(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!rho.allFinite())
            throw std::runtime_error("evolve: non-finite state, reduce dt");
    }
    return rho;
}

}  // namespace

DensityOp evolve_me(const Liouvillian& liou, const DensityOp& rho0, double t,
                    double dt) {
    Matrix rho = rk4([&](const Matrix& r) { return liou.apply(r); },
                     rho0.mat(), t, dt);
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();
    return DensityOp(liou.layout(), std::move(rho));
}

Matrix evolve_terms(std::span<const GeneratorTerm> terms, Matrix rho, double t,
                    double dt) {
    return rk4([&](const Matrix& r) { return apply_terms(terms, r); },
               std::move(rho), t, dt);
}

SteadyStateResult steady_state(const Liouvillian& liou) {
    const Index d = liou.layout().total();
    const Index n = d * d;
    constexpr double kRelTol = 1e-10;

    Vector kernel;
    int kdim = 0;
    if (n <= 1024) {
        Eigen::BDCSVD<Matrix> svd(liou.matrix(), Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        double cut = kRelTol * sv(0);
        for (Index i = 0; i < n; ++i)
            if (sv(i) <= cut) ++kdim;
        if (kdim == 0) kdim = 1;  // smallest singular direction is the candidate
        kernel = svd.matrixV().col(n - 1);
    } else {
        // rank-revealing QR; same relative threshold on the diagonal of R
        Eigen::ColPivHouseholderQR<Matrix> qr(liou.matrix());
        Eigen::VectorXd rdiag = qr.matrixR().diagonal().cwiseAbs();
        double cut = kRelTol * rdiag.maxCoeff();
        for (Index i = 0; i < n; ++i)
            if (rdiag(i) <= cut) ++kdim;
        if (kdim == 0) kdim = 1;
        // null vector from the triangular factor: with A P = Q R and rank
        // deficiency 1, solve R11 y = -r12 and undo the column permutation
        Index r = n - 1;
        Matrix R = qr.matrixR();
        Vector rhs = -R.topRightCorner(r, 1);
        Vector y = R.topLeftCorner(r, r).triangularView<Eigen::Upper>().solve(rhs);
        Vector x(n);
        x.head(r) = y;
        x(r) = 1.0;
        kernel = qr.colsPermutation() * x;
        kernel.normalize();
    }

    if (kdim > 1) throw NonUniqueSteadyState(kdim);

    Matrix rho = kernel.reshaped(d, d);
    Complex tr = rho.trace();
    if (std::abs(tr) < 1e-12)
        throw std::runtime_error("steady_state: kernel vector has zero trace");
    rho *= std::conj(tr) / std::abs(tr);  // rotate to real positive trace
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();

    SteadyStateResult out{DensityOp(DensityOp::Unchecked{}, liou.layout(), Matrix()),
                          kdim, 0.0};
    out.residual = liou.apply(rho).cwiseAbs().maxCoeff();
    // clip tiny negative eigenvalues from the kernel solve
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9) rho = qops::project_to_psd(rho);
    out.state = DensityOp(DensityOp::Unchecked{}, liou.layout(), std::move(rho));
    return out;
}

std::vector<JumpChannel> diagonalize_dissipator(const DissipatorMatrix& dm) {
    const auto nb = static_cast<Index>(dm.basis.size());
    if (dm.lambda.rows() != nb || dm.lambda.cols() != nb)
        throw std::invalid_argument("diagonalize_dissipator: Lambda size mismatch");
    if ((dm.lambda - dm.lambda.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("diagonalize_dissipator: Lambda not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dm.lambda);
    std::vector<JumpChannel> out;
    for (Index k = 0; k < nb; ++k) {
        JumpChannel ch;
        ch.rate = es.eigenvalues()(k);
        ch.direction = es.eigenvectors().col(k);
        Matrix j = Matrix::Zero(dm.basis[0].mat.rows(), dm.basis[0].mat.cols());
        for (Index i = 0; i < nb; ++i) j += ch.direction(i) * dm.basis[i].mat;
        ch.jump = Operator(dm.basis[0].layout, std::move(j));
        out.push_back(std::move(ch));
    }
    return out;
}

Liouvillian lambda_form_liouvillian(const DissipatorMatrix& dm) {
    const SpaceLayout& lay = dm.basis.at(0).layout;
    const Index d = lay.total();
    Matrix id = Matrix::Identity(d, d);
    Matrix super = Matrix::Zero(d * d, d * d);
    const auto nb = static_cast<Index>(dm.basis.size());
    for (Index i = 0; i < nb; ++i) {
        for (Index j = 0; j < nb; ++j) {
            const Matrix& ri = dm.basis[i].mat;
            const Matrix& rj = dm.basis[j].mat;
            Matrix rji = rj * ri;
            super += dm.lambda(i, j) *
                     (Eigen::kroneckerProduct(rj.transpose(), ri).eval() -
                      0.5 * Eigen::kroneckerProduct(id, rji).eval() -
                      0.5 * Eigen::kroneckerProduct(rji.transpose(), id).eval());
        }
    }
    return Liouvillian(lay, std::move(super));
}

}  // namespace bellflow::master
