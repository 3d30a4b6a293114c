#include "bellflow/qops.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace bellflow;
namespace q = bellflow::qops;

namespace {

Matrix random_density(Index d, std::mt19937& gen) {
    std::normal_distribution<double> n;
    Matrix g(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) g(i, j) = Complex(n(gen), n(gen));
    Matrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

}  // namespace

TEST_CASE("compose basic embeddings") {
    SpaceLayout lay{2, 2};

    Matrix zz = q::compose(lay, {q::sigma_z(), std::nullopt}).mat;
    Matrix expect = Eigen::Vector4cd(1, 1, -1, -1).asDiagonal();
    CHECK((zz - expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    Matrix ii = q::compose(lay, {std::nullopt, std::nullopt}).mat;
    CHECK((ii - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

    // sigma+ (x) sigma-: single entry at row |10>, column |01>
    Matrix pm = q::compose(lay, {q::sigma_plus(), q::sigma_minus()}).mat;
    // index oracle: row = 1*2+0, col = 0*2+1
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j)
            CHECK(std::abs(pm(i, j) - ((i == 2 && j == 1) ? 1.0 : 0.0)) < 1e-15);

    CHECK_THROWS_AS(q::compose(lay, {q::annihilation(3), std::nullopt}),
                    std::invalid_argument);
    CHECK_THROWS_AS(q::compose(lay, {q::sigma_z()}), std::invalid_argument);
}

TEST_CASE("compose is associative and identity-absorbing on random factors") {
    std::mt19937 gen(7);
    std::normal_distribution<double> n;
    SpaceLayout lay{2, 3, 2};
    for (int rep = 0; rep < 20; ++rep) {
        Matrix a(2, 2), b(3, 3), c(2, 2);
        for (auto* m : {&a, &c})
            for (Index i = 0; i < 2; ++i)
                for (Index j = 0; j < 2; ++j) (*m)(i, j) = Complex(n(gen), n(gen));
        for (Index i = 0; i < 3; ++i)
            for (Index j = 0; j < 3; ++j) b(i, j) = Complex(n(gen), n(gen));

        Matrix all = q::compose(lay, {a, b, c}).mat;
        Matrix stepwise = (q::embed(lay, 0, a) * q::embed(lay, 1, b) *
                           q::embed(lay, 2, c)).mat;
        CHECK((all - stepwise).cwiseAbs().maxCoeff() < 1e-12);

        Matrix with_id = q::compose(lay, {a, std::nullopt, c}).mat;
        Matrix manual = q::kron(q::kron(a, Matrix::Identity(3, 3)), c);
        CHECK((with_id - manual).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("annihilation operator") {
    Matrix a2 = q::annihilation(2);
    CHECK(a2(0, 1) == Complex(1.0));
    CHECK(a2.cwiseAbs().sum() == doctest::Approx(1.0));

    Matrix a3 = q::annihilation(3);
    CHECK(a3(0, 1) == Complex(1.0));
    CHECK(a3(1, 2).real() == doctest::Approx(std::sqrt(2.0)));

    CHECK_THROWS_AS(q::annihilation(1), std::invalid_argument);

    // truncation artifact: [c, c~] = I except the last diagonal entry
    Index d = 20;
    Matrix c = q::annihilation(d);
    Matrix comm = c * c.adjoint() - c.adjoint() * c;
    for (Index i = 0; i + 1 < d; ++i)
        CHECK(std::abs(comm(i, i) - Complex(1.0)) < 1e-12);
    CHECK(comm(d - 1, d - 1).real() == doctest::Approx(-double(d - 1)));
}

TEST_CASE("partial transpose") {
    std::mt19937 gen(11);
    SpaceLayout lay{2, 2};

    SUBCASE("product state spectrum unchanged") {
        Matrix ra = random_density(2, gen), rb = random_density(2, gen);
        DensityOp rho(lay, q::kron(ra, rb));
        Matrix pt = q::partial_transpose(rho, 0);
        Matrix expect = q::kron(ra.transpose(), rb);
        CHECK((pt - expect).cwiseAbs().maxCoeff() < 1e-14);
        Eigen::SelfAdjointEigenSolver<Matrix> e1(rho.mat()), e2(pt);
        CHECK((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("Bell state: minimum eigenvalue -1/2") {
        Vector bell = Vector::Zero(4);
        bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
        DensityOp rho(lay, bell * bell.adjoint());
        Matrix pt = q::partial_transpose(rho, 1);
        Eigen::SelfAdjointEigenSolver<Matrix> es(pt);  // 4x4 eigensolve oracle
        CHECK(es.eigenvalues().minCoeff() == doctest::Approx(-0.5).epsilon(1e-12));
    }

    SUBCASE("maximally mixed is a fixed point") {
        DensityOp rho(lay, Matrix::Identity(4, 4) / 4.0);
        CHECK((q::partial_transpose(rho, 0) - rho.mat()).cwiseAbs().maxCoeff() <
              1e-15);
    }

    SUBCASE("involution on random states, middle factor of three") {
        SpaceLayout lay3{2, 3, 2};
        for (int rep = 0; rep < 10; ++rep) {
            DensityOp rho(lay3, random_density(12, gen));
            Matrix pt = q::partial_transpose(rho, 1);
            CHECK(std::abs(pt.trace() - Complex(1.0)) < 1e-12);
            CHECK((pt - pt.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
            DensityOp ptd(DensityOp::Unchecked{}, lay3, pt);
            CHECK((q::partial_transpose(ptd, 1) - rho.mat()).cwiseAbs().maxCoeff() <
                  1e-14);
        }
    }

    CHECK_THROWS_AS(q::partial_transpose(
                        DensityOp(lay, Matrix::Identity(4, 4) / 4.0), 5),
                    std::invalid_argument);
}

TEST_CASE("log negativity") {
    SpaceLayout lay{2, 2};

    Vector bell = Vector::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    CHECK(q::log_negativity(DensityOp(lay, bell * bell.adjoint()), 1) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // |00> - z|11> at z = 0.5: Schmidt formula log2((1+z)^2/(1+z^2)) versus
    // the numerical trace norm
    double z = 0.5;
    Vector phi = Vector::Zero(4);
    phi(0) = 1.0;
    phi(3) = -z;
    phi.normalize();
    double via_trace_norm = q::log_negativity(DensityOp(lay, phi * phi.adjoint()), 1);
    double schmidt = std::log2((1 + z) * (1 + z) / (1 + z * z));
    CHECK(via_trace_norm == doctest::Approx(schmidt).epsilon(1e-12));
    CHECK(via_trace_norm == doctest::Approx(0.8479969065549501).epsilon(1e-10));

    std::mt19937 gen(3);
    for (int rep = 0; rep < 100; ++rep) {
        Matrix ra = random_density(2, gen), rb = random_density(2, gen);
        CHECK(q::log_negativity(DensityOp(lay, q::kron(ra, rb)), 1) <= 1e-10);
    }

    CHECK_THROWS_AS(q::log_negativity(
                        DensityOp(SpaceLayout{2, 2, 2},
                                  Matrix::Identity(8, 8) / 8.0), 1),
                    std::invalid_argument);
}

TEST_CASE("quadrature covariance") {
    SUBCASE("vacuum at any truncation") {
        for (Index d : {2, 5, 12, 30}) {
            auto qc = q::quadrature_covariance(q::pure_density(q::fock_ket(d, 0)), 0);
            CHECK(qc.cov(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
            CHECK(qc.cov(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
            CHECK(std::abs(qc.cov(0, 1)) < 1e-14);
            // a two-level truncation is always "too small" by the 3-level rule
            CHECK(qc.truncation_warning == (d == 2));
        }
    }

    SUBCASE("squeezed state reaches its analytic minimum variance") {
        double N = 0.557, M = std::sqrt(N * (N + 1.0));
        auto ket = q::squeezed_vacuum_ket(30, N, M);
        auto qc = q::quadrature_covariance(q::pure_density(ket), 0);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(qc.cov);
        // (2N+1-2M)/2, about 0.5 * 10^{-0.6}
        CHECK(es.eigenvalues().minCoeff() ==
              doctest::Approx(0.1257379531).epsilon(1e-6));
        CHECK(qc.mean_occupation == doctest::Approx(N).epsilon(1e-6));
    }

    SUBCASE("thermal state") {
        auto qc = q::quadrature_covariance(q::thermal_state(60, 1.0), 0);
        CHECK(qc.cov(0, 0) == doctest::Approx(1.5).epsilon(1e-10));
        CHECK(qc.cov(1, 1) == doctest::Approx(1.5).epsilon(1e-10));
    }

    SUBCASE("truncation warning when occupation nears the cutoff") {
        auto qc = q::quadrature_covariance(q::pure_density(q::fock_ket(8, 6)), 0);
        CHECK(qc.truncation_warning);
        auto ok = q::quadrature_covariance(q::pure_density(q::fock_ket(8, 2)), 0);
        CHECK_FALSE(ok.truncation_warning);
    }

    SUBCASE("canonical commutator on the untruncated block") {
        Index d = 25;
        Matrix comm = q::position(d) * q::momentum(d) -
                      q::momentum(d) * q::position(d);
        Matrix dev = comm - kI * Matrix::Identity(d, d);
        dev(d - 1, d - 1) = 0.0;
        CHECK(dev.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("state metrics") {
    SpaceLayout lay{2};
    std::mt19937 gen(5);
    DensityOp rho(lay, random_density(2, gen));

    auto same = q::state_metrics(rho, rho);
    CHECK(same.fidelity == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(same.trace_distance < 1e-12);

    DensityOp g(lay, q::pure_density(q::fock_ket(2, 0)).mat());
    DensityOp e(lay, q::pure_density(q::fock_ket(2, 1)).mat());
    auto orth = q::state_metrics(g, e);
    CHECK(orth.fidelity < 1e-12);
    CHECK(orth.trace_distance == doctest::Approx(1.0).epsilon(1e-12));

    // closed form: F(I/2, |0><0|) = 1/2, T = 1/2
    DensityOp mixed(lay, Matrix::Identity(2, 2) / 2.0);
    auto half = q::state_metrics(mixed, g);
    CHECK(half.fidelity == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(half.trace_distance == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(half.purity_a == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(q::state_metrics(
                        rho, DensityOp(SpaceLayout{3},
                                       Matrix::Identity(3, 3) / 3.0)),
                    std::invalid_argument);
}

TEST_CASE("density operator invariants are enforced") {
    SpaceLayout lay{2};
    Matrix bad(2, 2);
    bad << 1.5, 0, 0, -0.5;  // trace 1 but negative eigenvalue
    CHECK_THROWS_AS(DensityOp(lay, bad), std::invalid_argument);
    Matrix bad2(2, 2);
    bad2 << 0.7, Complex(0, 0.3), Complex(0, 0.3), 0.3;  // not Hermitian
    CHECK_THROWS_AS(DensityOp(lay, bad2), std::invalid_argument);
    Matrix bad3 = Matrix::Identity(2, 2);  // trace 2
    CHECK_THROWS_AS(DensityOp(lay, bad3), std::invalid_argument);
}
