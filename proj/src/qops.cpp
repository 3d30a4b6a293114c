#include "bellflow/qops.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace bellflow::qops {

Matrix identity(Index n) { return Matrix::Identity(n, n); }

Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}

Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Matrix sigma_plus() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = 1;
    return m;
}

Matrix sigma_minus() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1;
    return m;
}

Matrix annihilation(Index fock_dim) {
    if (fock_dim < 2)
        throw std::invalid_argument("annihilation: fock_dim must be >= 2");
    Matrix a = Matrix::Zero(fock_dim, fock_dim);
    for (Index n = 1; n < fock_dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

Matrix position(Index fock_dim) {
    Matrix c = annihilation(fock_dim);
    return (c + c.adjoint()) / std::sqrt(2.0);
}

Matrix momentum(Index fock_dim) {
    Matrix c = annihilation(fock_dim);
    return -kI * (c - c.adjoint()) / std::sqrt(2.0);
}

Matrix kron(const Matrix& a, const Matrix& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

Operator compose(const SpaceLayout& layout,
                 const std::vector<std::optional<Matrix>>& factors) {
    if (factors.size() != layout.subsystems())
        throw std::invalid_argument("compose: need one factor per subsystem");
    Matrix acc = Matrix::Identity(1, 1);
    for (std::size_t k = 0; k < factors.size(); ++k) {
        const Matrix* f = factors[k] ? &*factors[k] : nullptr;
        if (f && (f->rows() != layout.dim(k) || f->cols() != layout.dim(k)))
            throw std::invalid_argument("compose: factor " + std::to_string(k) +
                                        " does not match subsystem dimension");
        acc = f ? kron(acc, *f) : kron(acc, identity(layout.dim(k)));
    }
    return Operator(layout, std::move(acc));
}

Operator embed(const SpaceLayout& layout, std::size_t k, const Matrix& op) {
    std::vector<std::optional<Matrix>> factors(layout.subsystems());
    factors.at(k) = op;
    return compose(layout, factors);
}

Ket fock_ket(Index fock_dim, Index n) {
    if (n < 0 || n >= fock_dim) throw std::invalid_argument("fock_ket: n out of range");
    Vector v = Vector::Zero(fock_dim);
    v(n) = 1.0;
    return Ket(SpaceLayout{fock_dim}, std::move(v));
}

Ket squeezed_vacuum_ket(Index fock_dim, double N, Complex M) {
    if (N < 0) throw std::invalid_argument("squeezed_vacuum_ket: N must be >= 0");
    if (std::abs(std::abs(M) * std::abs(M) - N * (N + 1)) > 1e-8)
        throw std::invalid_argument("squeezed_vacuum_ket: |M|^2 != N(N+1)");
    // c_{n+1} = alpha sqrt(n)/sqrt(n+1) c_{n-1}, alpha = (N+M)/(N+M*+1)
    Complex alpha = (N + M) / (N + std::conj(M) + 1.0);
    Vector v = Vector::Zero(fock_dim);
    v(0) = 1.0;
    for (Index n = 1; n + 1 < fock_dim; n += 2)
        v(n + 1) = alpha * std::sqrt(double(n) / double(n + 1)) * v(n - 1);
    return Ket(SpaceLayout{fock_dim}, std::move(v)).normalized();
}

DensityOp thermal_state(Index fock_dim, double nbar) {
    if (nbar < 0) throw std::invalid_argument("thermal_state: nbar must be >= 0");
    Vector p(fock_dim);
    double q = nbar / (nbar + 1.0);
    double w = 1.0;
    for (Index n = 0; n < fock_dim; ++n) {
        p(n) = w;
        w *= q;
    }
    p /= p.sum();
    return DensityOp(SpaceLayout{fock_dim}, p.asDiagonal().toDenseMatrix());
}

DensityOp pure_density(const Ket& psi) {
    return DensityOp(psi.layout, psi.projector());
}

Matrix partial_transpose(const DensityOp& rho, std::size_t subsystem) {
    const SpaceLayout& lay = rho.layout();
    if (subsystem >= lay.subsystems())
        throw std::invalid_argument("partial_transpose: bad subsystem index");
    const Index dl = lay.dim_before(subsystem);
    const Index dk = lay.dim(subsystem);
    const Index dr = lay.dim_after(subsystem);
    const Matrix& m = rho.mat();
    Matrix out(m.rows(), m.cols());
    for (Index il = 0; il < dl; ++il)
        for (Index jl = 0; jl < dl; ++jl)
            for (Index ik = 0; ik < dk; ++ik)
                for (Index jk = 0; jk < dk; ++jk)
                    for (Index ir = 0; ir < dr; ++ir)
                        for (Index jr = 0; jr < dr; ++jr)
                            out((il * dk + jk) * dr + ir, (jl * dk + ik) * dr + jr) =
                                m((il * dk + ik) * dr + ir, (jl * dk + jk) * dr + jr);
    return out;
}

double log_negativity(const DensityOp& rho, std::size_t cut) {
    if (rho.layout().subsystems() != 2)
        throw std::invalid_argument("log_negativity: layout must be bipartite");
    Matrix pt = partial_transpose(rho, cut);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (pt + pt.adjoint()),
                                             Eigen::EigenvaluesOnly);
    double trace_norm = es.eigenvalues().cwiseAbs().sum();
    return std::log2(std::max(trace_norm, 1.0));
}

QuadCovariance quadrature_covariance(const DensityOp& rho, std::size_t mode) {
    const SpaceLayout& lay = rho.layout();
    const Index d = lay.dim(mode);
    if (d < 2) throw std::invalid_argument("quadrature_covariance: mode is not bosonic");
    Matrix c = embed(lay, mode, annihilation(d)).mat;
    Matrix x = (c + c.adjoint()) / std::sqrt(2.0);
    Matrix p = -kI * (c - c.adjoint()) / std::sqrt(2.0);

    QuadCovariance out;
    const Matrix* R[2] = {&x, &p};
    for (int i = 0; i < 2; ++i)
        out.mean(i) = (rho.mat() * *R[i]).trace().real();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.cov(i, j) = 0.5 * (rho.mat() * (*R[i] * *R[j] + *R[j] * *R[i]))
                                      .trace().real() -
                            out.mean(i) * out.mean(j);
    out.mean_occupation = (rho.mat() * (c.adjoint() * c)).trace().real();
    out.truncation_warning = out.mean_occupation > double(d - 1) - 3.0;
    return out;
}

Matrix matrix_sqrt_psd(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
           es.eigenvectors().adjoint();
}

Matrix project_to_psd(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    Matrix out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    Complex tr = out.trace();
    if (std::abs(tr) > 0) out /= tr;
    return out;
}

StateMetrics state_metrics(const DensityOp& a, const DensityOp& b) {
    if (a.layout() != b.layout())
        throw std::invalid_argument("state_metrics: layout mismatch");
    StateMetrics out{};
    Matrix sa = matrix_sqrt_psd(a.mat());
    Matrix inner = matrix_sqrt_psd(sa * b.mat() * sa);
    double tr = inner.trace().real();
    out.fidelity = std::min(1.0, tr * tr);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat() - b.mat(), Eigen::EigenvaluesOnly);
    out.trace_distance = 0.5 * es.eigenvalues().cwiseAbs().sum();
    out.purity_a = a.purity();
    return out;
}

double fidelity_with_pure(const DensityOp& rho, const Ket& psi) {
    Vector v = psi.amps / psi.amps.norm();
    return std::max(0.0, (v.adjoint() * rho.mat() * v)(0, 0).real());
}

}  // namespace bellflow::qops
