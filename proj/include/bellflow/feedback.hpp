// Unconditional feedback master equations for the two Bell-measurement
// protocols, kept as generic Liouvillians (negative dissipator rates from
// squeezed inputs are tolerated, not repaired), plus jump-form verification.

#pragma once

#include "bellflow/master.hpp"
#include "bellflow/noise.hpp"
#include "bellflow/types.hpp"

#include <string>
#include <vector>

namespace bellflow::feedback {

using master::Liouvillian;

struct FeedbackSpec {
    Operator f_plus;
    Operator f_minus;
};

/// Feedback master equation bundled with its term list (for term-wise
/// evolution) and the raw jump channels (rate, jump) for diagnostics.
struct FeedbackME {
    Liouvillian liou;
    std::vector<master::GeneratorTerm> terms;
    Operator hamiltonian;  // total effective Hamiltonian
    std::vector<std::pair<double, Operator>> jump_channels;
};

/// Continuous-teleportation feedback generator:
///   -i[H + (1/4){(F+ + iF-)s + s~(F+ - iF-)}, .]
///   + (1/2){ D[s-iF+] + D[s-F-] + (w3/eta) D[F+ + F-]
///            + ((w1-w3-eta)/eta) D[F+] + ((w2-w3-eta)/eta) D[F-] }
FeedbackME teleport_feedback_me(const Operator& h_sys, const Operator& s,
                                const FeedbackSpec& fb, const noise::NoiseCov& cov,
                                double eta = 1.0);

Liouvillian teleport_feedback_liouvillian(const Operator& h_sys, const Operator& s,
                                          const FeedbackSpec& fb,
                                          const noise::NoiseCov& cov,
                                          double eta = 1.0);

/// Entanglement-swap feedback generator:
///   -i[H + (1/4){(F+ s+ + iF- s-) + h.c.}, .]
///   + (1/2) D[s+ - iF+] + (1/2) D[s- - F-]
///   + ((1-eta)/(2 eta)) { D[F+] + D[F-] }
/// The feedback-noise coefficient follows from the same expansion that
/// produces the lossy teleportation equation (the kick noise contributes
/// (1/2 eta) Sum_i D[F_i], half of which regroups into the mixed
/// dissipators).
FeedbackME swap_feedback_me(const Operator& h_sys, const Operator& s1,
                            const Operator& s2, const FeedbackSpec& fb,
                            double eta = 1.0);

Liouvillian swap_feedback_liouvillian(const Operator& h_sys, const Operator& s1,
                                      const Operator& s2, const FeedbackSpec& fb,
                                      double eta = 1.0);

/// Project the jump channels of a single-mode generator onto the quadrature
/// basis R = (x, p); throws if a jump is not a linear combination of x and p
/// within `tol`.
master::DissipatorMatrix
extract_dissipator_matrix(const std::vector<std::pair<double, Operator>>& channels,
                          double tol = 1e-9);

struct ExpectedJump {
    double rate;
    Eigen::Vector2cd direction;  // coefficients over (x, p), any normalization
};

struct JumpFormReport {
    bool match = false;
    std::vector<double> rates;                  // significant channel rates
    std::vector<Eigen::Vector2cd> directions;   // unit vectors over (x, p)
    Eigen::Matrix2cd lambda;
    std::string detail;
};

/// Diagonalize the quadrature dissipator matrix and compare against the
/// expected channels: rates within tol_rate, directions collinear up to a
/// global phase within tol_dir. Channels with |rate| below `rate_floor` are
/// treated as absent.
JumpFormReport verify_jump_form(const std::vector<std::pair<double, Operator>>& channels,
                                const std::vector<ExpectedJump>& expected,
                                double tol_rate = 1e-8, double tol_dir = 1e-6,
                                double rate_floor = 1e-9);

}  // namespace bellflow::feedback
