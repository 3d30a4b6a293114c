#include "bellflow/noise.hpp"

#include <doctest.h>

#include <cmath>

using namespace bellflow;
namespace n = bellflow::noise;

TEST_CASE("noise covariance triples") {
    auto vac = n::noise_covariance(n::SqueezingSpec::vacuum());
    CHECK(vac.w1 == 1.0);
    CHECK(vac.w2 == 1.0);
    CHECK(vac.w3 == 0.0);

    // N = 0.557 with real positive M
    n::SqueezingSpec sq{0.557, std::sqrt(0.557 * 1.557)};
    auto w = n::noise_covariance(sq);
    CHECK(w.w1 == doctest::Approx(2.4882620469).epsilon(1e-9));
    CHECK(w.w2 == doctest::Approx(0.6257379531).epsilon(1e-9));
    CHECK(w.w3 == 0.0);

    n::SqueezingSpec sqc{1.0, Complex(0.0, std::sqrt(2.0))};
    auto wc = n::noise_covariance(sqc);
    CHECK(wc.w1 == doctest::Approx(2.0));
    CHECK(wc.w2 == doctest::Approx(2.0));
    CHECK(wc.w3 == doctest::Approx(std::sqrt(2.0)));
    CHECK(wc.w1 * wc.w2 - wc.w3 * wc.w3 == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("pure-input identities over random specs") {
    n::RngStream rng(99, 0);
    for (int k = 0; k < 200; ++k) {
        double N = 4.0 * rng.uniform();
        double phase = 6.2831853 * rng.uniform();
        auto sq = n::SqueezingSpec::pure(N, phase);
        CHECK(sq.is_pure());
        auto w = n::noise_covariance(sq);
        CHECK(std::abs(w.w1 * w.w2 - w.w3 * w.w3 - (N + 1.0)) < 1e-10);
        CHECK(std::abs(w.w1 + w.w2 - 2.0 * (N + 1.0)) < 1e-12);
        // PSD as a 2x2
        CHECK(w.w1 >= 0.0);
        CHECK(w.w2 >= 0.0);
    }
}

TEST_CASE("EPR projection coefficients") {
    auto vac = n::epr_coeffs(n::SqueezingSpec::vacuum());
    CHECK(vac.mu == Complex(1.0, 0.0));
    CHECK(vac.nu == Complex(0.0, 1.0));

    // formula evaluation: mu = 1/(1+N+M), nu = i(1+2N+2M)/(1+N+M) for real M
    double N = 0.557, M = std::sqrt(N * (N + 1.0));
    auto c = n::epr_coeffs({N, M});
    CHECK(c.mu.real() == doctest::Approx(0.4018869320).epsilon(1e-9));
    CHECK(std::abs(c.mu.imag()) < 1e-15);
    CHECK(c.nu.imag() == doctest::Approx(1.5981130680).epsilon(1e-9));
    CHECK(std::abs(c.nu.real()) < 1e-15);

    // symbolic substitution at N = 1, M = -sqrt(2):
    // mu = 1/(2-sqrt2), nu = i(3-2 sqrt2)/(2-sqrt2)
    auto c2 = n::epr_coeffs({1.0, -std::sqrt(2.0)});
    double den = 2.0 - std::sqrt(2.0);
    CHECK(c2.mu.real() == doctest::Approx(1.0 / den).epsilon(1e-12));
    CHECK(c2.nu.imag() ==
          doctest::Approx((3.0 - 2.0 * std::sqrt(2.0)) / den).epsilon(1e-12));

    // vacuum continuity along the pure family
    double prev = 1.0;
    for (double N2 : {1e-2, 1e-4, 1e-6}) {
        auto cc = n::epr_coeffs(n::SqueezingSpec::pure(N2));
        double dev = std::abs(cc.mu - 1.0) + std::abs(cc.nu - kI);
        CHECK(dev < prev);
        prev = dev;
    }

    CHECK_THROWS_AS(n::epr_coeffs({0.0, Complex(-1.0, 0.0)}),
                    std::invalid_argument);
}

TEST_CASE("squeezing from dB") {
    auto s6 = n::SqueezingSpec::from_db(-6.0);
    CHECK(s6.N == doctest::Approx(0.5580650872).epsilon(1e-9));
    CHECK(s6.M.real() == doctest::Approx(0.9324707656).epsilon(1e-9));
    CHECK(s6.M.imag() == 0.0);

    auto s0 = n::SqueezingSpec::from_db(0.0);
    CHECK(s0.N == 0.0);
    CHECK(std::abs(s0.M) == 0.0);

    auto s3 = n::SqueezingSpec::from_db(-3.0);
    CHECK(s3.N == doctest::Approx(0.1241123871).epsilon(1e-9));

    CHECK_THROWS_AS(n::SqueezingSpec::from_db(1.0), std::invalid_argument);
}

TEST_CASE("increment sampler") {
    SUBCASE("empirical covariance at the Monte-Carlo rate") {
        n::NoiseCov vac;
        double dt = 1e-3;
        double prev_err = 0;
        for (int n_samp : {20000, 80000}) {
            n::RngStream rng(123, 0);
            double s11 = 0, s22 = 0, s12 = 0;
            for (int k = 0; k < n_samp; ++k) {
                auto [a, b] = n::sample_increments(vac, dt, rng);
                s11 += a * a;
                s22 += b * b;
                s12 += a * b;
            }
            double e11 = std::abs(s11 / n_samp / dt - 1.0);
            double e22 = std::abs(s22 / n_samp / dt - 1.0);
            double e12 = std::abs(s12 / n_samp / dt);
            double se3 = 3.5 * std::sqrt(2.0 / n_samp);
            CHECK(e11 < se3);
            CHECK(e22 < se3);
            CHECK(e12 < se3);
            if (prev_err > 0) CHECK(e11 + e22 < 4.0 * prev_err);  // ~1/sqrt(4n)
            prev_err = e11 + e22;
        }
    }

    SUBCASE("boundary-PSD covariance gives perfectly correlated increments") {
        n::NoiseCov w{2.0, 0.5, -1.0};  // w3 = -sqrt(w1 w2)
        n::RngStream rng(7, 3);
        for (int k = 0; k < 200; ++k) {
            auto [a, b] = n::sample_increments(w, 1e-2, rng);
            CHECK(b == doctest::Approx(a * (w.w3 / w.w1)).epsilon(1e-12));
        }
    }

    SUBCASE("fixed seed reproduces bit-identical sequences") {
        n::NoiseCov w{1.5, 0.9, 0.3};
        n::RngStream r1(42, 11), r2(42, 11);
        for (int k = 0; k < 100; ++k) {
            auto p1 = n::sample_increments(w, 1e-3, r1);
            auto p2 = n::sample_increments(w, 1e-3, r2);
            CHECK(p1.first == p2.first);
            CHECK(p1.second == p2.second);
        }
        // different stream index decorrelates
        n::RngStream r3(42, 12);
        auto p3 = n::sample_increments(w, 1e-3, r3);
        auto p1 = n::sample_increments(w, 1e-3, r1);
        CHECK(p3.first != p1.first);
    }

    SUBCASE("non-PSD covariance is rejected") {
        n::RngStream rng(1, 1);
        CHECK_THROWS_AS(n::sample_increments({1.0, 1.0, 2.0}, 1e-3, rng),
                        std::invalid_argument);
        CHECK_THROWS_AS(n::sample_increments({1.0, 1.0, 0.0}, -1.0, rng),
                        std::invalid_argument);
    }
}
