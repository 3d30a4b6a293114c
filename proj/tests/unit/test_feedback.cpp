#include "bellflow/feedback.hpp"

#include "bellflow/protocols.hpp"
#include "bellflow/qops.hpp"

#include <doctest.h>

#include <cmath>

using namespace bellflow;
namespace fb = bellflow::feedback;
namespace m = bellflow::master;
namespace q = bellflow::qops;

TEST_CASE("teleport builder with feedback off reduces to the plain generator") {
    Index d = 12;
    SpaceLayout lay{d};
    Matrix c = q::annihilation(d);
    Operator s(lay, c.adjoint());
    Operator h0(lay, Matrix::Zero(d, d));
    Operator z(lay, Matrix::Zero(d, d));
    fb::FeedbackSpec off{z, z};

    auto me = fb::teleport_feedback_me(h0, s, off, noise::NoiseCov::unit(), 1.0);
    std::vector<m::GeneratorTerm> plain{m::GeneratorTerm::dissipator(s)};
    auto expect = m::Liouvillian::build(lay, plain);
    CHECK((me.liou.matrix() - expect.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("vacuum teleportation drives to the ground state") {
    Index d = 20;
    auto sq = noise::SqueezingSpec::vacuum();
    auto model = protocols::bosonic_teleport_model(sq, d);
    Operator h0(model.s.layout, Matrix::Zero(d, d));
    auto me = fb::teleport_feedback_me(h0, model.s, model.fb,
                                       noise::noise_covariance(sq), 1.0);
    auto ss = m::steady_state(me.liou);
    CHECK(ss.kernel_dim == 1);
    CHECK(q::fidelity_with_pure(ss.state, q::fock_ket(d, 0)) >= 1.0 - 1e-8);
}

TEST_CASE("squeezed teleportation reproduces the input variance") {
    // fock 30 carries a measured truncation floor of ~1e-5 on the minimum
    // variance; the tight 1e-6 comparison runs at fock 40 in the acceptance
    // suite
    Index d = 30;
    noise::SqueezingSpec sq{0.557, std::sqrt(0.557 * 1.557)};
    auto model = protocols::bosonic_teleport_model(sq, d);
    Operator h0(model.s.layout, Matrix::Zero(d, d));
    auto me = fb::teleport_feedback_me(h0, model.s, model.fb,
                                       noise::noise_covariance(sq), 1.0);
    auto ss = m::steady_state(me.liou);
    CHECK(ss.state.purity() >= 1.0 - 1e-4);
    auto qc = q::quadrature_covariance(ss.state, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(qc.cov);
    CHECK(std::abs(es.eigenvalues().minCoeff() - 0.1257379531) < 5e-5);
}

TEST_CASE("truncation convergence of the squeezed steady state") {
    noise::SqueezingSpec mild = noise::SqueezingSpec::from_db(-3.0);
    Eigen::Matrix2d cov10, cov30;
    for (Index d : {20, 30}) {
        auto model = protocols::bosonic_teleport_model(mild, d);
        Operator h0(model.s.layout, Matrix::Zero(d, d));
        auto me = fb::teleport_feedback_me(h0, model.s, model.fb,
                                           noise::noise_covariance(mild), 1.0);
        auto ss = m::steady_state(me.liou);
        (d == 20 ? cov10 : cov30) = q::quadrature_covariance(ss.state, 0).cov;
    }
    CHECK((cov10 - cov30).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("swap builder with feedback off is two independent dissipators") {
    protocols::TlsSwapParams p;
    p.z = 0.4;
    auto model = protocols::tls_swap_model(p);
    Operator z0(model.layout, Matrix::Zero(4, 4));
    fb::FeedbackSpec off{z0, z0};
    auto me = fb::swap_feedback_me(z0, model.s1, model.s2, off, 1.0);
    std::vector<m::GeneratorTerm> plain{m::GeneratorTerm::dissipator(model.s1),
                                        m::GeneratorTerm::dissipator(model.s2)};
    auto expect = m::Liouvillian::build(model.layout, plain);
    CHECK((me.liou.matrix() - expect.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("swap steady state is the dark state") {
    protocols::TlsSwapParams p;
    p.z = 0.5;
    auto model = protocols::tls_swap_model(p);
    Operator h0(model.layout, Matrix::Zero(4, 4));
    auto liou = fb::swap_feedback_liouvillian(h0, model.s1, model.s2, model.fb, 1.0);
    auto ss = m::steady_state(liou);
    CHECK(ss.kernel_dim == 1);
    CHECK(q::fidelity_with_pure(ss.state, model.dark_state) >= 0.999);
    CHECK(q::log_negativity(ss.state, 1) ==
          doctest::Approx(std::log2(1.8)).epsilon(1e-6));
}

TEST_CASE("lossy swap builder is continuous at eta -> 1") {
    protocols::TlsSwapParams p;
    p.z = 0.5;
    auto model = protocols::tls_swap_model(p);
    Operator h0(model.layout, Matrix::Zero(4, 4));
    auto l1 = fb::swap_feedback_liouvillian(h0, model.s1, model.s2, model.fb, 1.0);
    double prev = 1e9;
    for (double de : {1e-2, 1e-3, 1e-4}) {
        auto l = fb::swap_feedback_liouvillian(h0, model.s1, model.s2, model.fb,
                                               1.0 - de);
        double diff = (l.matrix() - l1.matrix()).cwiseAbs().maxCoeff();
        CHECK(diff < prev);
        CHECK(diff < 2.0 * de * 10.0);  // linear in (1 - eta)
        prev = diff;
    }
    CHECK_THROWS_AS(fb::swap_feedback_liouvillian(h0, model.s1, model.s2,
                                                  model.fb, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(fb::swap_feedback_liouvillian(h0, model.s1, model.s2,
                                                  model.fb, 1.5),
                    std::invalid_argument);
}

TEST_CASE("lossy teleport builder is continuous at eta -> 1") {
    Index d = 10;
    noise::SqueezingSpec sq{0.5, std::sqrt(0.5 * 1.5)};
    auto model = protocols::bosonic_teleport_model(sq, d);
    Operator h0(model.s.layout, Matrix::Zero(d, d));
    auto w = noise::noise_covariance(sq);
    auto l1 = fb::teleport_feedback_liouvillian(h0, model.s, model.fb, w, 1.0);
    double prev = 1e18;
    for (double de : {1e-2, 1e-3, 1e-4}) {
        auto l = fb::teleport_feedback_liouvillian(h0, model.s, model.fb, w,
                                                   1.0 - de);
        double diff = (l.matrix() - l1.matrix()).cwiseAbs().maxCoeff();
        CHECK(diff < prev);
        prev = diff;
    }
    CHECK(prev < 1e-2);
}

TEST_CASE("effective Hamiltonian annihilates the dark state (gain formula)") {
    for (double z = 0.05; z < 0.96; z += 0.1) {
        protocols::TlsSwapParams p;
        p.z = z;
        auto model = protocols::tls_swap_model(p);
        Matrix heff = protocols::swap_effective_hamiltonian(model);
        CHECK((heff * model.dark_state.amps).norm() < 1e-10);
    }
}

TEST_CASE("jump-form verification") {
    Index d = 24;

    SUBCASE("vacuum: single channel, rate 1, jump along the annihilation operator") {
        auto sq = noise::SqueezingSpec::vacuum();
        auto model = protocols::bosonic_teleport_model(sq, d);
        Operator h0(model.s.layout, Matrix::Zero(d, d));
        auto me = fb::teleport_feedback_me(h0, model.s, model.fb,
                                           noise::noise_covariance(sq), 1.0);
        auto rep = fb::verify_jump_form(me.jump_channels,
                                        {{1.0, model.expected_jump.direction}},
                                        1e-8, 1e-8);
        CHECK(rep.match);
        REQUIRE(rep.rates.size() == 1);
        CHECK(rep.rates[0] == doctest::Approx(1.0).epsilon(1e-10));
        // same direction as c = (x + ip)/sqrt2
        Eigen::Vector2cd cdir(1.0, kI);
        cdir.normalize();
        CHECK(std::abs(rep.directions[0].dot(cdir)) ==
              doctest::Approx(1.0).epsilon(1e-10));
    }

    SUBCASE("squeezed input: rate 2N+1 with the documented direction") {
        noise::SqueezingSpec sq{0.557, std::sqrt(0.557 * 1.557)};
        auto model = protocols::bosonic_teleport_model(sq, d);
        Operator h0(model.s.layout, Matrix::Zero(d, d));
        auto me = fb::teleport_feedback_me(h0, model.s, model.fb,
                                           noise::noise_covariance(sq), 1.0);
        auto rep = fb::verify_jump_form(me.jump_channels,
                                        {{2.114, model.expected_jump.direction}},
                                        1e-8, 1e-8);
        CHECK(rep.match);
        REQUIRE(rep.rates.size() == 1);
        CHECK(rep.rates[0] == doctest::Approx(2.114).epsilon(1e-10));
    }

    SUBCASE("wrong expectation produces a mismatch report") {
        auto sq = noise::SqueezingSpec::vacuum();
        auto model = protocols::bosonic_teleport_model(sq, d);
        Operator h0(model.s.layout, Matrix::Zero(d, d));
        auto me = fb::teleport_feedback_me(h0, model.s, model.fb,
                                           noise::noise_covariance(sq), 1.0);
        Eigen::Vector2cd wrong(1.0, -kI);  // creation direction
        auto rep = fb::verify_jump_form(me.jump_channels, {{1.0, wrong}});
        CHECK_FALSE(rep.match);
        CHECK(!rep.detail.empty());
    }
}

TEST_CASE("non-Hermitian feedback operators are rejected") {
    SpaceLayout lay{2};
    Operator bad(lay, q::sigma_plus());
    Operator good(lay, q::sigma_x());
    Operator h0(lay, Matrix::Zero(2, 2));
    Operator s(lay, q::sigma_minus());
    CHECK_THROWS_AS(fb::teleport_feedback_me(h0, s, {bad, good},
                                             noise::NoiseCov::unit(), 1.0),
                    std::invalid_argument);
}
