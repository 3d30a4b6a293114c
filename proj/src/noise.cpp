#include "bellflow/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bellflow::noise {

SqueezingSpec SqueezingSpec::pure(double N, double m_phase) {
    if (N < 0) throw std::invalid_argument("SqueezingSpec: N must be >= 0");
    return {N, std::polar(std::sqrt(N * (N + 1.0)), m_phase)};
}

SqueezingSpec SqueezingSpec::from_db(double db, double m_phase) {
    if (db > 0) throw std::invalid_argument("SqueezingSpec: db must be <= 0");
    double r = -0.5 * std::log(std::pow(10.0, db / 10.0));
    double sh = std::sinh(r);
    return pure(sh * sh, m_phase);
}

bool SqueezingSpec::is_pure(double tol) const {
    return std::abs(std::norm(M) - N * (N + 1.0)) <= tol;
}

NoiseCov noise_covariance(const SqueezingSpec& sq) {
    NoiseCov w;
    w.w1 = sq.N + 1.0 + sq.M.real();
    w.w2 = sq.N + 1.0 - sq.M.real();
    w.w3 = sq.M.imag();  // -i(M - M*)/2
    return w;
}

EPRCoeffs epr_coeffs(const SqueezingSpec& sq) {
    Complex den = 1.0 + sq.N + std::conj(sq.M);
    if (std::abs(den) < 1e-14)
        throw std::invalid_argument("epr_coeffs: degenerate denominator 1+N+M*");
    EPRCoeffs c;
    c.mu = (1.0 - sq.M + std::conj(sq.M)) / den;
    c.nu = kI * (1.0 + 2.0 * sq.N + sq.M + std::conj(sq.M)) / den;
    return c;
}

namespace {
// splitmix64; fully specified, platform-independent
inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index) {
    // decorrelate (seed, stream) pairs before use
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = stream_index ^ 0xda3e39cb94b95bdbULL;
    std::uint64_t b = splitmix64(s);
    state_ = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

std::uint64_t RngStream::next_u64() { return splitmix64(state_); }

double RngStream::uniform() {
    // 53-bit mantissa in (0, 1]
    return (double((next_u64() >> 11)) + 1.0) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(th);
    has_cached_ = true;
    return r * std::cos(th);
}

std::pair<double, double> sample_increments(const NoiseCov& cov, double dt,
                                            RngStream& rng) {
    if (dt <= 0) throw std::invalid_argument("sample_increments: dt must be > 0");
    if (cov.w1 < 0 || cov.w2 < 0 || cov.w1 * cov.w2 - cov.w3 * cov.w3 < -1e-12)
        throw std::invalid_argument("sample_increments: covariance not PSD");
    // lower-triangular square root; Schur complements below 1e-12 snap to the
    // rank-1 boundary so maximally correlated increments stay exact multiples
    double l11 = std::sqrt(cov.w1);
    double l21 = l11 > 0 ? cov.w3 / l11 : 0.0;
    double rem = cov.w2 - l21 * l21;
    double l22 = rem > 1e-12 * std::max(1.0, cov.w2) ? std::sqrt(rem) : 0.0;
    double g1 = rng.normal();
    double g2 = rng.normal();
    double sdt = std::sqrt(dt);
    return {sdt * l11 * g1, sdt * (l21 * g1 + l22 * g2)};
}

}  // namespace bellflow::noise
