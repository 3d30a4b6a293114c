// Deterministic master-equation machinery: vectorized Liouvillians
// (non-Lindblad rates allowed), RK4 propagation, dense steady states,
// and diagonalization of quadratic dissipator matrices.

#pragma once

#include "bellflow/types.hpp"

#include <span>
#include <vector>

namespace bellflow::master {

/// One generator term: -i rate [op, .] for Hamiltonian kind, rate D[op] for
/// dissipator kind. Dissipator rates may be negative.
struct GeneratorTerm {
    enum class Kind { Hamiltonian, Dissipator };
    Kind kind;
    Operator op;
    double rate = 1.0;

    static GeneratorTerm hamiltonian(Operator h, double rate = 1.0);
    static GeneratorTerm dissipator(Operator l, double rate = 1.0);
};

/// Column-stacking vectorized generator, dimension d^2 x d^2.
class Liouvillian {
public:
    Liouvillian(SpaceLayout layout, Matrix super);

    static Liouvillian build(const SpaceLayout& layout,
                             std::span<const GeneratorTerm> terms);

    const SpaceLayout& layout() const { return layout_; }
    const Matrix& matrix() const { return super_; }

    Matrix apply(const Matrix& rho) const;

    /// Max |row sum against vec(I)|; zero for trace-preserving generators.
    double trace_defect() const;

    Liouvillian& operator+=(const Liouvillian& other);

private:
    SpaceLayout layout_;
    Matrix super_;
};

/// Term-by-term generator application; avoids the d^2 x d^2 matrix, used for
/// larger composite systems.
Matrix apply_terms(std::span<const GeneratorTerm> terms, const Matrix& rho);

/// Classic fixed-step RK4 for rho' = L rho.
DensityOp evolve_me(const Liouvillian& liou, const DensityOp& rho0, double t,
                    double dt);

/// Same integrator on the term representation; returns the raw matrix.
Matrix evolve_terms(std::span<const GeneratorTerm> terms, Matrix rho, double t,
                    double dt);

class NonUniqueSteadyState : public std::runtime_error {
public:
    NonUniqueSteadyState(int dim)
        : std::runtime_error("steady_state: kernel dimension " +
                             std::to_string(dim) + " (expected 1)"),
          kernel_dim(dim) {}
    int kernel_dim;
};

struct SteadyStateResult {
    DensityOp state;
    int kernel_dim = 1;
    double residual = 0.0;  // ||L vec(rho)||_inf
};

/// Dense kernel extraction. Singular values below 1e-10 * sigma_max count as
/// zero; throws NonUniqueSteadyState when the kernel is degenerate.
SteadyStateResult steady_state(const Liouvillian& liou);

/// Quadratic dissipator over a Hermitian operator basis:
/// rho' = sum_ij Lambda_ij (R_i rho R_j - {R_j R_i, rho}/2).
struct DissipatorMatrix {
    std::vector<Operator> basis;
    Eigen::MatrixXcd lambda;  // Hermitian
};

struct JumpChannel {
    double rate;                // eigenvalue; negative rates are legitimate
    Operator jump;              // v . R
    Eigen::VectorXcd direction; // eigenvector in the R basis
};

/// Eigendecomposition of Lambda; rebuilding sum_i rate_i D[J_i] recovers the
/// original generator. Negative rates are returned as-is.
std::vector<JumpChannel> diagonalize_dissipator(const DissipatorMatrix& dm);

/// Liouvillian of a DissipatorMatrix (for round-trip verification).
Liouvillian lambda_form_liouvillian(const DissipatorMatrix& dm);

}  // namespace bellflow::master
