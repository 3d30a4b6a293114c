// Operator primitives on composite spaces plus entanglement and squeezing
// metrics. Conventions used throughout:
//   basis |0> = ground, sigma_minus = |0><1|
//   x = (c + c~)/sqrt2,  p = -i(c - c~)/sqrt2   so that [x, p] = +i

#pragma once

#include "bellflow/types.hpp"

#include <optional>
#include <vector>

namespace bellflow::qops {

// --------------------------- small primitives -------------------------------

Matrix identity(Index n);
Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();   // diag(1, -1)
Matrix sigma_plus();   // |1><0|
Matrix sigma_minus();  // |0><1|

/// Truncated annihilation operator, entries sqrt(n) on the superdiagonal.
Matrix annihilation(Index fock_dim);

Matrix position(Index fock_dim);   // (c + c~)/sqrt2
Matrix momentum(Index fock_dim);   // -i(c - c~)/sqrt2

Matrix kron(const Matrix& a, const Matrix& b);

// --------------------------- composition ------------------------------------

/// Kronecker product in layout order; std::nullopt factors become identities.
Operator compose(const SpaceLayout& layout,
                 const std::vector<std::optional<Matrix>>& factors);

/// Single-subsystem embedding: identity everywhere except subsystem k.
Operator embed(const SpaceLayout& layout, std::size_t k, const Matrix& op);

// --------------------------- states -----------------------------------------

Ket fock_ket(Index fock_dim, Index n);

/// Pure Gaussian state annihilated by (N+M*+1)c - (N+M)c~, i.e. squeezed
/// vacuum with mean occupation N and correlation M, |M|^2 = N(N+1).
Ket squeezed_vacuum_ket(Index fock_dim, double N, Complex M);

DensityOp thermal_state(Index fock_dim, double nbar);

DensityOp pure_density(const Ket& psi);

// --------------------------- metrics ----------------------------------------

/// Transpose on one tensor factor only. Result is Hermitian for Hermitian
/// input.
Matrix partial_transpose(const DensityOp& rho, std::size_t subsystem);

/// log2 of the trace norm of the partial transpose across the bipartite cut.
/// Requires a two-subsystem layout; `cut` selects the transposed factor.
double log_negativity(const DensityOp& rho, std::size_t cut = 1);

struct QuadCovariance {
    Eigen::Matrix2d cov;         // symmetrized covariance of (x, p)
    Eigen::Vector2d mean;        // (<x>, <p>)
    double mean_occupation = 0;
    bool truncation_warning = false;  // occupation within 3 of the cutoff
};

/// Second moments of the quadratures of one Fock-truncated mode.
/// Vacuum gives diag(1/2, 1/2).
QuadCovariance quadrature_covariance(const DensityOp& rho, std::size_t mode = 0);

struct StateMetrics {
    double fidelity;        // Uhlmann, squared convention: [tr sqrt(sqrt(a) b sqrt(a))]^2
    double trace_distance;  // (1/2) || a - b ||_1
    double purity_a;
};

StateMetrics state_metrics(const DensityOp& a, const DensityOp& b);

double fidelity_with_pure(const DensityOp& rho, const Ket& psi);

/// Hermitian PSD square root via eigendecomposition.
Matrix matrix_sqrt_psd(const Matrix& m);

/// Clamp negative eigenvalues to zero and renormalize the trace.
Matrix project_to_psd(const Matrix& rho);

}  // namespace bellflow::qops
