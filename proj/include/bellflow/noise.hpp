// Squeezed-input statistics: (N, M) parameters, EPR projection coefficients,
// the measured-current covariance triple, and correlated Wiener sampling.

#pragma once

#include "bellflow/types.hpp"

#include <cstdint>
#include <utility>

namespace bellflow::noise {

/// Gaussian white-noise input field. Pure inputs satisfy |M|^2 = N(N+1);
/// mixed inputs (|M|^2 < N(N+1)) are representable but flagged.
struct SqueezingSpec {
    double N = 0.0;
    Complex M = 0.0;

    static SqueezingSpec vacuum() { return {}; }

    /// Pure spec with |M| = sqrt(N(N+1)) and a chosen phase of M.
    static SqueezingSpec pure(double N, double m_phase = 0.0);

    /// Pure spec from a squeezing level in dB (db <= 0, squeezed variance
    /// e^{-2r} = 10^{db/10}); M real positive by default.
    static SqueezingSpec from_db(double db, double m_phase = 0.0);

    bool is_pure(double tol = 1e-10) const;
};

/// Covariance triple of the two Wiener increments:
/// (dW+)^2 = w1 dt, (dW-)^2 = w2 dt, dW+ dW- = w3 dt.
struct NoiseCov {
    double w1 = 1.0;
    double w2 = 1.0;
    double w3 = 0.0;

    Eigen::Matrix2d matrix() const {
        Eigen::Matrix2d m;
        m << w1, w3, w3, w2;
        return m;
    }

    static NoiseCov unit() { return {}; }
};

/// EPR projection coefficients; nu carries its phase, vacuum gives (1, i).
struct EPRCoeffs {
    Complex mu;
    Complex nu;
};

/// w1 = N+1+Re M, w2 = N+1-Re M, w3 = Im M. Pure inputs satisfy
/// w1 w2 - w3^2 = N+1 and w1 + w2 = 2(N+1).
NoiseCov noise_covariance(const SqueezingSpec& sq);

/// mu = (1-M+M*)/(1+N+M*), nu = i(1+2N+M+M*)/(1+N+M*).
/// The net dW- measurement operator is nu*s (nu already contains the phase
/// factor; the vacuum limit nu = i is fixed by the ensemble-average check
/// against the unconditional generator).
EPRCoeffs epr_coeffs(const SqueezingSpec& sq);

/// Deterministic counter-based stream: one instance per trajectory index,
/// reproducible and order-independent across workers.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index);

    std::uint64_t next_u64();
    /// Uniform in (0, 1].
    double uniform();
    /// Standard normal (Box-Muller; pairs cached).
    double normal();

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// One correlated increment pair (dW+, dW-) with covariance dt * cov,
/// via a square-root factorization of the 2x2 covariance.
std::pair<double, double> sample_increments(const NoiseCov& cov, double dt,
                                            RngStream& rng);

}  // namespace bellflow::noise
