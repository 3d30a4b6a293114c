// The three concrete protocols: bosonic continuous teleportation, two-TLS
// continuous entanglement swapping with gain optimization, and the
// optomechanical realization (adiabatic rates, mechanical-mode SME, feedback
// generator, exact Gaussian steady states, cooperativity thresholds).

#pragma once

#include "bellflow/feedback.hpp"
#include "bellflow/master.hpp"
#include "bellflow/noise.hpp"
#include "bellflow/sme.hpp"
#include "bellflow/types.hpp"

#include <optional>
#include <vector>

namespace bellflow::protocols {

// --------------------------- bosonic teleportation --------------------------

struct BosonicTeleportModel {
    Operator s;        // c~
    feedback::FeedbackSpec fb;  // F+ = i(c - c~), F- = c + c~
    noise::SqueezingSpec input;
    double expected_rate;               // 2N+1
    feedback::ExpectedJump expected_jump;  // direction over (x, p)
};

BosonicTeleportModel bosonic_teleport_model(const noise::SqueezingSpec& sq,
                                            Index fock_dim);

/// Conditional-evolution model of the teleport protocol (channels mu s, nu s
/// with the sqrt(eta/2) prefactors folded in).
sme::SMEModel teleport_sme_model(const Operator& h_sys, const Operator& s,
                                 const noise::SqueezingSpec& sq, double eta = 1.0);

// --------------------------- TLS entanglement swap ---------------------------

struct TlsSwapParams {
    double z = 0.5;                       // in [0, 1)
    std::optional<double> gain_plus;      // default: formula gains
    std::optional<double> gain_minus;
    double eta = 1.0;
};

struct TlsSwapModel {
    SpaceLayout layout;  // [2, 2]
    Operator s1, s2;
    feedback::FeedbackSpec fb;
    double gain_plus, gain_minus;
    Ket dark_state;      // |00> - z|11>, normalized
    Operator j1, j2;     // sigma1- + z sigma2+,  sigma2- + z sigma1+
};

/// Formula gains G± = sqrt(z/(1+z)) (1 ± sqrt(z(1+z)/(1-z))).
std::pair<double, double> swap_formula_gains(double z);

TlsSwapModel tls_swap_model(const TlsSwapParams& p);

/// Effective (non-Hermitian-free) Hamiltonian whose dark-state eigenvalue
/// property pins the stationary state:
/// (1/4)[(F+ + iF-)s1 + (F+ - iF-)s2 + h.c.] - (i/4)[J+~J+ + J-~J-].
Matrix swap_effective_hamiltonian(const TlsSwapModel& m);

/// Swap conditional-evolution model (unit-variance uncorrelated increments).
sme::SMEModel swap_sme_model(const TlsSwapModel& m, double eta = 1.0);

feedback::FeedbackME swap_feedback_me_for(const TlsSwapModel& m);

struct GainOptResult {
    double gain_plus = 0.0;
    double gain_minus = 0.0;
    double log_negativity = 0.0;
    bool converged = true;
    int evaluations = 0;
};

struct GainOptConfig {
    double box = 3.0;        // coarse grid over [-box, box]^2
    int grid = 21;
    int refine_starts = 5;   // top grid cells handed to Nelder-Mead
    int max_iters = 200;
    double f_tol = 1e-6;
};

/// Steady-state entanglement of the swap generator at given gains.
double swap_steady_log_negativity(double z, double gp, double gm, double eta);

/// Deterministic two-stage search (coarse grids + Nelder-Mead refinement)
/// over (G+, G-) with the feedback structure fixed. The formula-gain point is
/// always included, so the result is never below it.
GainOptResult optimize_gains(double z, double eta, const GainOptConfig& cfg = {});

// --------------------------- optomechanics ----------------------------------

struct OMParams {
    double g;        // optomechanical coupling
    double kappa;    // cavity linewidth
    double gamma;    // mechanical linewidth
    double omega_m;  // mechanical frequency
    double delta_c;  // cavity detuning (laser frame); -omega_m for teleportation
    double nbar;     // mechanical bath occupation
    noise::SqueezingSpec input;

    static OMParams resolved_sideband(double cooperativity, double nbar,
                                      double kappa_over_omega_m,
                                      const noise::SqueezingSpec& input,
                                      double gamma = 1e-6, double omega_m = 1.0);
};

struct AdiabaticDerived {
    Complex eta_plus, eta_minus;  // [kappa/2 + i(delta_c ± omega_m)]^{-1}
    double gamma_plus, gamma_minus;
    double epsilon;       // [1 + (4 omega_m / kappa)^2]^{-1}
    double cooperativity; // 4 g^2 / ((nbar+1) gamma kappa)
    double c_crit;        // 1 / (sqrt(N(N+1)) - N), infinite for vacuum input
    double meas_rate;     // g^2 kappa |eta_plus|^2  (= 4g^2/kappa on resonance)
    bool weak_coupling_warning = false;  // g/kappa > 0.1
};

AdiabaticDerived om_adiabatic_params(const OMParams& p);

/// Mechanical-mode conditional model in the rotating frame: passive cooling
/// and heating plus the two heterodyne channels built on s_eff ∝ -i eta+ c~.
sme::SMEModel om_sme_model(const OMParams& p, Index fock_dim);

/// Phase-matched feedback operators for the mechanical mode:
/// F+ = -i(s_eff - s_eff~), F- = s_eff + s_eff~.
feedback::FeedbackSpec om_feedback_ops(const OMParams& p, Index fock_dim);

/// Unconditional feedback generator for the mechanical mode (thermal terms
/// plus the teleportation feedback block with phase-matched F±).
feedback::FeedbackME om_feedback_me(const OMParams& p, Index fock_dim);

/// Drift/diffusion of a quadratic generator; steady state solves
/// A V + V A^T + D = 0.
struct GaussianModel {
    Eigen::Matrix2d drift;
    Eigen::Matrix2d diffusion;

    bool is_hurwitz() const;
    Eigen::Matrix2d steady_covariance() const;  // throws if not Hurwitz
};

/// Dimension-free quadratic generator of om_feedback_me.
GaussianModel om_gaussian_model(const OMParams& p);

/// Exact steady covariance and squeezing zeta = 10 log10(min eig V / (1/2)).
struct OMGaussianSteady {
    Eigen::Matrix2d covariance;
    double zeta_db;
};

OMGaussianSteady om_gaussian_steady(const OMParams& p);

/// Quadratic-generator channel list (rate, coefficients over (x, p)) used to
/// assemble the Gaussian model; exposed for cross-checks.
struct LinearJump {
    double rate;
    Complex ux, up;
};
std::vector<LinearJump> om_linear_channels(const OMParams& p);

// --------------------------- two-mode crosscheck ----------------------------

struct CrosscheckReport {
    double fitted_rate;      // from exp-growth fit of <n_m>(t)
    double predicted_rate;   // g^2 kappa |eta_+|^2 sideband rate
    double relative_error;
    bool adiabaticity_flag;  // g/kappa too large for the elimination
    double final_occupation;
    bool truncation_warning;
};

/// Full two-mode model (mechanics x cavity, resonant coupling at
/// delta_c = -omega_m, cavity decay kappa), no measurement; fits the
/// mechanical heating rate and compares against the adiabatic prediction.
CrosscheckReport om_full_model_crosscheck(const OMParams& p, Index mech_dim = 12,
                                          Index cav_dim = 8);

}  // namespace bellflow::protocols
