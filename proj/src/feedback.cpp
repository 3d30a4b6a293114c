#include "bellflow/feedback.hpp"

#include "bellflow/qops.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bellflow::feedback {

using master::GeneratorTerm;

namespace {

void check_fb(const FeedbackSpec& fb) {
    if (!fb.f_plus.is_hermitian(1e-12) || !fb.f_minus.is_hermitian(1e-12))
        throw std::invalid_argument("FeedbackSpec: F± must be Hermitian");
}

void check_eta(double eta) {
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("feedback: eta must be in (0, 1]");
}

FeedbackME assemble(const SpaceLayout& lay, Operator h_total,
                    std::vector<std::pair<double, Operator>> channels) {
    FeedbackME me{Liouvillian(lay, Matrix::Zero(lay.total() * lay.total(),
                                                lay.total() * lay.total())),
                  {}, std::move(h_total), std::move(channels)};
    me.terms.push_back(GeneratorTerm::hamiltonian(me.hamiltonian));
    for (const auto& [rate, jump] : me.jump_channels)
        me.terms.push_back(GeneratorTerm::dissipator(jump, rate));
    me.liou = Liouvillian::build(lay, me.terms);
    return me;
}

}  // namespace

FeedbackME teleport_feedback_me(const Operator& h_sys, const Operator& s,
                                const FeedbackSpec& fb, const noise::NoiseCov& cov,
                                double eta) {
    check_fb(fb);
    check_eta(eta);
    const SpaceLayout& lay = s.layout;
    const Operator& Fp = fb.f_plus;
    const Operator& Fm = fb.f_minus;

    Matrix cross = (Fp.mat + kI * Fm.mat) * s.mat +
                   s.mat.adjoint() * (Fp.mat - kI * Fm.mat);
    Operator h_total(lay, h_sys.mat + 0.25 * cross);

    std::vector<std::pair<double, Operator>> ch;
    ch.emplace_back(0.5, s - kI * Fp);
    ch.emplace_back(0.5, s - Fm);
    ch.emplace_back(0.5 * cov.w3 / eta, Fp + Fm);
    ch.emplace_back(0.5 * (cov.w1 - cov.w3 - eta) / eta, Fp);
    ch.emplace_back(0.5 * (cov.w2 - cov.w3 - eta) / eta, Fm);
    return assemble(lay, std::move(h_total), std::move(ch));
}

Liouvillian teleport_feedback_liouvillian(const Operator& h_sys, const Operator& s,
                                          const FeedbackSpec& fb,
                                          const noise::NoiseCov& cov, double eta) {
    return teleport_feedback_me(h_sys, s, fb, cov, eta).liou;
}

FeedbackME swap_feedback_me(const Operator& h_sys, const Operator& s1,
                            const Operator& s2, const FeedbackSpec& fb,
                            double eta) {
    check_fb(fb);
    check_eta(eta);
    if (s1.layout != s2.layout || s1.layout != h_sys.layout)
        throw std::invalid_argument("swap_feedback_me: layout mismatch");
    const SpaceLayout& lay = s1.layout;
    const Operator& Fp = fb.f_plus;
    const Operator& Fm = fb.f_minus;
    Operator sp = s1 + s2;
    Operator sm = s1 - s2;

    Matrix cross = Fp.mat * sp.mat + kI * Fm.mat * sm.mat;
    Operator h_total(lay, h_sys.mat + 0.25 * (cross + cross.adjoint()));

    std::vector<std::pair<double, Operator>> ch;
    ch.emplace_back(0.5, sp - kI * Fp);
    ch.emplace_back(0.5, sm - Fm);
    if (eta < 1.0) {
        double c = (1.0 - eta) / (2.0 * eta);
        ch.emplace_back(c, Fp);
        ch.emplace_back(c, Fm);
    }
    return assemble(lay, std::move(h_total), std::move(ch));
}

Liouvillian swap_feedback_liouvillian(const Operator& h_sys, const Operator& s1,
                                      const Operator& s2, const FeedbackSpec& fb,
                                      double eta) {
    return swap_feedback_me(h_sys, s1, s2, fb, eta).liou;
}

master::DissipatorMatrix
extract_dissipator_matrix(const std::vector<std::pair<double, Operator>>& channels,
                          double tol) {
    if (channels.empty())
        throw std::invalid_argument("extract_dissipator_matrix: no channels");
    const SpaceLayout& lay = channels.front().second.layout;
    const Index d = lay.total();
    Matrix x = qops::position(d);
    Matrix p = qops::momentum(d);
    const double nx = (x * x).trace().real();
    const double np = (p * p).trace().real();

    Eigen::Matrix2cd lambda = Eigen::Matrix2cd::Zero();
    for (const auto& [rate, jump] : channels) {
        Complex ux = (x * jump.mat).trace() / nx;
        Complex up = (p * jump.mat).trace() / np;
        double res = (jump.mat - ux * x - up * p).cwiseAbs().maxCoeff();
        if (res > tol)
            throw std::invalid_argument(
                "extract_dissipator_matrix: jump not linear in (x, p), residual " +
                std::to_string(res));
        Eigen::Vector2cd u(ux, up);
        lambda += rate * u * u.adjoint();
    }
    master::DissipatorMatrix dm;
    dm.basis = {Operator(lay, x), Operator(lay, p)};
    dm.lambda = lambda;
    return dm;
}

JumpFormReport
verify_jump_form(const std::vector<std::pair<double, Operator>>& channels,
                 const std::vector<ExpectedJump>& expected, double tol_rate,
                 double tol_dir, double rate_floor) {
    JumpFormReport rep;
    auto dm = extract_dissipator_matrix(channels);
    rep.lambda = dm.lambda;
    auto diag = master::diagonalize_dissipator(dm);

    std::vector<std::pair<double, Eigen::Vector2cd>> found;
    for (const auto& ch : diag)
        if (std::abs(ch.rate) > rate_floor)
            found.emplace_back(ch.rate, ch.direction.normalized());
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    for (const auto& [r, v] : found) {
        rep.rates.push_back(r);
        rep.directions.push_back(v);
    }

    std::ostringstream detail;
    if (found.size() != expected.size()) {
        detail << "channel count " << found.size() << " != expected "
               << expected.size();
        rep.match = false;
        rep.detail = detail.str();
        return rep;
    }

    std::vector<std::pair<double, Eigen::Vector2cd>> exp_sorted;
    for (const auto& e : expected)
        exp_sorted.emplace_back(e.rate, e.direction.normalized());
    std::sort(exp_sorted.begin(), exp_sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    rep.match = true;
    for (std::size_t i = 0; i < found.size(); ++i) {
        double dr = std::abs(found[i].first - exp_sorted[i].first);
        double overlap = std::abs(found[i].second.dot(exp_sorted[i].second));
        if (dr > tol_rate) {
            rep.match = false;
            detail << "rate[" << i << "] " << found[i].first << " vs "
                   << exp_sorted[i].first << "; ";
        }
        if (1.0 - overlap > tol_dir) {
            rep.match = false;
            detail << "direction[" << i << "] overlap " << overlap << "; ";
        }
    }
    if (rep.match) detail << "all channels match";
    rep.detail = detail.str();
    return rep;
}

}  // namespace bellflow::feedback
