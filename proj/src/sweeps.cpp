#include "bellflow/sweeps.hpp"

#include "bellflow/feedback.hpp"
#include "bellflow/qops.hpp"
#include "bellflow/svg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <thread>

namespace bellflow::sweeps {

namespace {

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
    workers = sme::resolve_workers(workers);
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    auto run = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(workers, n); ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
}

const char* kPalette[] = {"#1f6fb4", "#d95f02", "#2ca02c", "#7950b5",
                          "#c22f4f", "#6a6a6a", "#9a7b2f", "#17a2b8"};

}  // namespace

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("linspace: n must be >= 1");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1);
    return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
    if (lo <= 0 || hi <= 0) throw std::invalid_argument("logspace: bounds must be > 0");
    std::vector<double> v = linspace(std::log10(lo), std::log10(hi), n);
    for (double& x : v) x = std::pow(10.0, x);
    return v;
}

// --------------------------- swap sweep --------------------------------------

namespace {

SwapCell evaluate_swap_cell(double z, double eta, double gp, double gm) {
    SwapCell cell{z, eta, gp, gm, 0.0, 0.0, 0};
    protocols::TlsSwapParams tp;
    tp.z = z;
    tp.eta = eta;
    tp.gain_plus = gp;
    tp.gain_minus = gm;
    auto model = protocols::tls_swap_model(tp);
    Operator h0(model.layout, Matrix::Zero(4, 4));
    auto liou = feedback::swap_feedback_liouvillian(h0, model.s1, model.s2,
                                                    model.fb, eta);
    try {
        auto ss = master::steady_state(liou);
        cell.kernel_dim = ss.kernel_dim;
        cell.log_negativity = qops::log_negativity(ss.state, 1);
        cell.fidelity_dark = qops::fidelity_with_pure(ss.state, model.dark_state);
    } catch (const master::NonUniqueSteadyState& e) {
        cell.kernel_dim = e.kernel_dim;
        cell.log_negativity = std::numeric_limits<double>::quiet_NaN();
        cell.fidelity_dark = std::numeric_limits<double>::quiet_NaN();
    }
    return cell;
}

}  // namespace

SwapSweepResult run_swap_sweep(const SwapSweepConfig& cfg) {
    if (cfg.z_grid.empty() || cfg.eta_grid.empty())
        throw std::invalid_argument("run_swap_sweep: empty grid");
    const int nz = int(cfg.z_grid.size());
    const int ne = int(cfg.eta_grid.size());
    SwapSweepResult res;
    res.formula.resize(nz * ne);
    if (cfg.optimize) res.optimized.resize(nz * ne);

    parallel_for(nz * ne, cfg.workers, [&](int idx) {
        double z = cfg.z_grid[idx / ne];
        double eta = cfg.eta_grid[idx % ne];
        auto [gp, gm] = protocols::swap_formula_gains(z);
        res.formula[idx] = evaluate_swap_cell(z, eta, gp, gm);
        if (cfg.optimize) {
            auto opt = protocols::optimize_gains(z, eta, cfg.opt);
            res.optimized[idx] =
                evaluate_swap_cell(z, eta, opt.gain_plus, opt.gain_minus);
        }
    });
    return res;
}

namespace {

csv::Table swap_table(const std::vector<SwapCell>& cells,
                      const std::vector<std::string>& echo) {
    csv::Table t({"z", "eta", "gain_plus", "gain_minus", "log_negativity",
                  "fidelity_dark_state", "kernel_dim"});
    for (const auto& e : echo) t.add_comment(e);
    for (const auto& c : cells)
        t.add_row({c.z, c.eta, c.gain_plus, c.gain_minus, c.log_negativity,
                   c.fidelity_dark, double(c.kernel_dim)});
    return t;
}

}  // namespace

void write_swap_sweep(const SwapSweepResult& res, const SwapSweepConfig& cfg,
                      const std::string& out_dir,
                      const std::vector<std::string>& echo) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    swap_table(res.formula, echo).write(out_dir + "/swap_sweep_formula.csv");
    const auto& best_cells = cfg.optimize ? res.optimized : res.formula;
    if (cfg.optimize)
        swap_table(res.optimized, echo).write(out_dir + "/swap_sweep_optimized.csv");

    const int ne = int(cfg.eta_grid.size());

    // E_N versus z for each eta (both gain modes)
    svg::LinePlot pa;
    pa.title = "Stationary entanglement vs interaction parameter";
    pa.x_label = "z";
    pa.y_label = "log-negativity";
    int ci = 0;
    for (int j = 0; j < ne; ++j) {
        svg::Series s;
        s.name = "eta=" + csv::format_double(cfg.eta_grid[j]);
        s.color = kPalette[ci++ % 8];
        for (std::size_t i = 0; i < cfg.z_grid.size(); ++i) {
            s.x.push_back(cfg.z_grid[i]);
            s.y.push_back(best_cells[i * ne + j].log_negativity);
        }
        pa.series.push_back(std::move(s));
        if (ci >= 8) break;
    }
    pa.write(out_dir + "/swap_entanglement_vs_z.svg");

    // heat map over (z, eta)
    svg::HeatMap hm;
    hm.title = "Optimized entanglement over (z, eta)";
    hm.x_label = "z";
    hm.y_label = "eta";
    hm.x = cfg.z_grid;
    hm.y = cfg.eta_grid;
    hm.values.assign(cfg.eta_grid.size(),
                     std::vector<double>(cfg.z_grid.size(), 0.0));
    for (std::size_t i = 0; i < cfg.z_grid.size(); ++i)
        for (int j = 0; j < ne; ++j)
            hm.values[j][i] = best_cells[i * ne + j].log_negativity;
    hm.write(out_dir + "/swap_entanglement_surface.svg");

    // E_N versus eta at the best z per eta
    svg::LinePlot pc;
    pc.title = "Entanglement vs transmissivity (best z)";
    pc.x_label = "eta";
    pc.y_label = "log-negativity";
    svg::Series sc;
    sc.name = "optimized";
    sc.color = kPalette[0];
    for (int j = 0; j < ne; ++j) {
        double best = 0.0;
        for (std::size_t i = 0; i < cfg.z_grid.size(); ++i)
            best = std::max(best, best_cells[i * ne + j].log_negativity);
        sc.x.push_back(cfg.eta_grid[j]);
        sc.y.push_back(best);
    }
    pc.series.push_back(std::move(sc));
    pc.write(out_dir + "/swap_entanglement_vs_eta.svg");
}

// --------------------------- optomechanics sweep ----------------------------

OMSweepResult run_om_sweep(const OMSweepConfig& cfg) {
    if (cfg.cooperativity_grid.empty() || cfg.nbar_grid.empty() ||
        cfg.kappa_over_omega_grid.empty())
        throw std::invalid_argument("run_om_sweep: empty grid");

    auto input = noise::SqueezingSpec::from_db(cfg.squeeze_db, cfg.squeeze_phase);
    OMSweepResult res;
    res.input_db = cfg.squeeze_db;
    {
        protocols::OMParams p0 =
            protocols::OMParams::resolved_sideband(1.0, 0.0, 1.0, input, cfg.gamma);
        res.c_crit = protocols::om_adiabatic_params(p0).c_crit;
    }

    const int nc = int(cfg.cooperativity_grid.size());
    const int nn = int(cfg.nbar_grid.size());
    const int nk = int(cfg.kappa_over_omega_grid.size());
    res.cells.resize(nc * nn * nk);

    parallel_for(nc * nn * nk, cfg.workers, [&](int idx) {
        int ic = idx / (nn * nk);
        int in = (idx / nk) % nn;
        int ik = idx % nk;
        OMCell cell{cfg.cooperativity_grid[ic], cfg.nbar_grid[in],
                    cfg.kappa_over_omega_grid[ik],
                    std::numeric_limits<double>::quiet_NaN(), 0, 0, 0, ""};
        auto p = protocols::OMParams::resolved_sideband(
            cell.cooperativity, cell.nbar, cell.kappa_over_omega, input, cfg.gamma);
        auto d = protocols::om_adiabatic_params(p);
        cell.gamma_plus = d.gamma_plus;
        cell.gamma_minus = d.gamma_minus;
        cell.epsilon = d.epsilon;
        try {
            cell.zeta_db = protocols::om_gaussian_steady(p).zeta_db;
        } catch (const std::exception& e) {
            cell.reason = e.what();
        }
        res.cells[idx] = cell;
    });
    return res;
}

void write_om_sweep(const OMSweepResult& res, const OMSweepConfig& cfg,
                    const std::string& out_dir,
                    const std::vector<std::string>& echo) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    csv::Table t({"cooperativity", "nbar", "kappa_over_omega_m", "zeta_db",
                  "gamma_plus", "gamma_minus", "epsilon", "reason"});
    for (const auto& e : echo) t.add_comment(e);
    t.add_comment("c_crit = " + csv::format_double(res.c_crit));
    for (const auto& c : res.cells)
        t.add_row_strings({csv::format_double(c.cooperativity),
                           csv::format_double(c.nbar),
                           csv::format_double(c.kappa_over_omega),
                           csv::format_double(c.zeta_db),
                           csv::format_double(c.gamma_plus),
                           csv::format_double(c.gamma_minus),
                           csv::format_double(c.epsilon), c.reason});
    t.write(out_dir + "/om_sweep.csv");

    svg::LinePlot plot;
    plot.title = "Mechanical squeezing vs cooperativity";
    plot.x_label = "cooperativity";
    plot.y_label = "zeta (dB)";
    plot.log_x = true;
    plot.hline = res.input_db;   // input squeezing reference
    plot.vline = res.c_crit;
    const int nn = int(cfg.nbar_grid.size());
    const int nk = int(cfg.kappa_over_omega_grid.size());
    int ci = 0;
    for (int in = 0; in < nn; ++in) {
        for (int ik = 0; ik < nk; ++ik) {
            svg::Series s;
            s.name = "nbar=" + csv::format_double(cfg.nbar_grid[in]) +
                     " k/w=" + csv::format_double(cfg.kappa_over_omega_grid[ik]);
            s.color = kPalette[in % 8];
            s.dashed = ik % 2 == 1;
            for (std::size_t icc = 0; icc < cfg.cooperativity_grid.size(); ++icc) {
                int idx = int(icc) * nn * nk + in * nk + ik;
                s.x.push_back(res.cells[idx].cooperativity);
                s.y.push_back(res.cells[idx].zeta_db);
            }
            plot.series.push_back(std::move(s));
            ++ci;
        }
    }
    plot.write(out_dir + "/om_squeezing_vs_cooperativity.svg");
}

double om_zeta_crossing(double nbar, double kappa_over_omega, double squeeze_db,
                        double gamma, double c_lo, double c_hi) {
    auto input = noise::SqueezingSpec::from_db(squeeze_db);
    auto zeta = [&](double c) {
        auto p = protocols::OMParams::resolved_sideband(c, nbar, kappa_over_omega,
                                                        input, gamma);
        return protocols::om_gaussian_steady(p).zeta_db;
    };
    double flo = zeta(c_lo), fhi = zeta(c_hi);
    if (flo * fhi > 0)
        throw std::runtime_error("om_zeta_crossing: no sign change in bracket");
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (c_lo + c_hi);
        double fm = zeta(mid);
        if (flo * fm <= 0) {
            c_hi = mid;
        } else {
            c_lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (c_lo + c_hi);
}

// --------------------------- teleport study ---------------------------------

std::vector<TeleportRow> run_teleport_study(const TeleportStudyConfig& cfg) {
    if (cfg.db_grid.empty())
        throw std::invalid_argument("run_teleport_study: empty grid");
    std::vector<TeleportRow> rows;
    for (double db : cfg.db_grid) {
        auto sq = noise::SqueezingSpec::from_db(db, cfg.squeeze_phase);
        auto model = protocols::bosonic_teleport_model(sq, cfg.fock_dim);
        Operator h0(model.s.layout, Matrix::Zero(cfg.fock_dim, cfg.fock_dim));
        auto me = feedback::teleport_feedback_me(h0, model.s, model.fb,
                                                 noise::noise_covariance(sq),
                                                 cfg.eta);
        TeleportRow row{};
        row.db = db;
        row.N = sq.N;
        row.expected_rate = model.expected_rate;
        row.target_min_variance = sq.N + 0.5 - sq.M.real();
        auto ss = master::steady_state(me.liou);
        row.kernel_dim = ss.kernel_dim;
        row.purity = ss.state.purity();
        row.fidelity_vacuum =
            qops::fidelity_with_pure(ss.state, qops::fock_ket(cfg.fock_dim, 0));
        auto qc = qops::quadrature_covariance(ss.state, 0);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(qc.cov);
        row.min_variance = es.eigenvalues().minCoeff();
        auto rep = feedback::verify_jump_form(
            me.jump_channels, {{model.expected_rate, model.expected_jump.direction}},
            1e-6, 1e-6);
        row.jump_match = rep.match;
        row.jump_rate = rep.rates.empty() ? 0.0 : rep.rates.back();
        rows.push_back(row);
    }
    return rows;
}

void write_teleport_study(const std::vector<TeleportRow>& rows,
                          const TeleportStudyConfig& cfg,
                          const std::string& out_dir,
                          const std::vector<std::string>& echo) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    csv::Table t({"squeeze_db", "N", "purity", "fidelity_vacuum", "min_variance",
                  "target_min_variance", "jump_rate", "expected_rate",
                  "jump_match", "kernel_dim"});
    for (const auto& e : echo) t.add_comment(e);
    t.add_comment("eta = " + csv::format_double(cfg.eta) +
                  ", fock_dim = " + std::to_string(cfg.fock_dim));
    for (const auto& r : rows)
        t.add_row({r.db, r.N, r.purity, r.fidelity_vacuum, r.min_variance,
                   r.target_min_variance, r.jump_rate, r.expected_rate,
                   double(r.jump_match), double(r.kernel_dim)});
    t.write(out_dir + "/teleport_steady_state.csv");

    svg::LinePlot plot;
    plot.title = "Teleported minimum quadrature variance";
    plot.x_label = "input squeezing (dB)";
    plot.y_label = "variance";
    plot.hline = 0.5;
    svg::Series got{"steady state", {}, {}, kPalette[0], false};
    svg::Series want{"input state", {}, {}, kPalette[1], true};
    for (const auto& r : rows) {
        got.x.push_back(r.db);
        got.y.push_back(r.min_variance);
        want.x.push_back(r.db);
        want.y.push_back(r.target_min_variance);
    }
    plot.series = {got, want};
    plot.write(out_dir + "/teleport_min_variance.svg");
}

// --------------------------- trajectory runs --------------------------------

TrajectoryRunOutput run_trajectory_protocol(const TrajectoryRunConfig& cfg,
                                            const std::vector<std::string>& echo) {
    sme::SMEModel model;
    std::optional<sme::FeedbackOps> fb;
    DensityOp rho0;
    enum class Kind { Swap, Bosonic } kind;

    Ket dark;
    if (cfg.protocol == "swap") {
        protocols::TlsSwapParams tp;
        tp.z = cfg.z;
        tp.eta = cfg.eta;
        auto m = protocols::tls_swap_model(tp);
        model = protocols::swap_sme_model(m, cfg.eta);
        if (cfg.feedback) fb = sme::FeedbackOps{m.fb.f_plus, m.fb.f_minus};
        rho0 = DensityOp(m.layout, Matrix::Identity(4, 4) / 4.0);
        dark = m.dark_state;
        kind = Kind::Swap;
    } else if (cfg.protocol == "teleport") {
        auto sq = noise::SqueezingSpec::from_db(cfg.squeeze_db, cfg.squeeze_phase);
        auto m = protocols::bosonic_teleport_model(sq, cfg.fock_dim);
        Operator h0(m.s.layout, Matrix::Zero(cfg.fock_dim, cfg.fock_dim));
        model = protocols::teleport_sme_model(h0, m.s, sq, cfg.eta);
        if (cfg.feedback) fb = sme::FeedbackOps{m.fb.f_plus, m.fb.f_minus};
        rho0 = qops::pure_density(qops::fock_ket(cfg.fock_dim, 0));
        kind = Kind::Bosonic;
    } else if (cfg.protocol == "om") {
        auto input = noise::SqueezingSpec::from_db(cfg.squeeze_db, cfg.squeeze_phase);
        auto p = protocols::OMParams::resolved_sideband(
            cfg.om_cooperativity, cfg.om_nbar, cfg.om_kappa_over_omega, input,
            cfg.om_gamma);
        model = protocols::om_sme_model(p, cfg.fock_dim);
        if (cfg.feedback) {
            auto ops = protocols::om_feedback_ops(p, cfg.fock_dim);
            fb = sme::FeedbackOps{ops.f_plus, ops.f_minus};
        }
        rho0 = qops::pure_density(qops::fock_ket(cfg.fock_dim, 0));
        kind = Kind::Bosonic;
    } else {
        throw std::invalid_argument("run_trajectory_protocol: unknown protocol '" +
                                    cfg.protocol + "'");
    }

    auto traj = sme::run_trajectory(model, rho0, fb, cfg.traj, 0);

    TrajectoryRunOutput out{
        csv::Table({"time", "i_plus", "i_minus"}),
        kind == Kind::Swap
            ? csv::Table({"time", "sz_1", "sz_2", "fidelity_dark_state"})
            : csv::Table({"time", "mean_x", "mean_p", "var_x", "var_p",
                          "occupation"}),
        traj.psd_projections};
    for (const auto& e : echo) {
        out.currents.add_comment(e);
        out.observables.add_comment(e);
    }
    for (std::size_t k = 0; k < traj.record.times.size(); ++k)
        out.currents.add_row({traj.record.times[k], traj.record.i_plus[k],
                              traj.record.i_minus[k]});

    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const auto& rho = traj.states[k];
        if (kind == Kind::Swap) {
            auto sz1 = qops::embed(rho.layout(), 0, qops::sigma_z());
            auto sz2 = qops::embed(rho.layout(), 1, qops::sigma_z());
            out.observables.add_row({traj.times[k],
                                     expectation(sz1, rho).real(),
                                     expectation(sz2, rho).real(),
                                     qops::fidelity_with_pure(rho, dark)});
        } else {
            auto qc = qops::quadrature_covariance(rho, 0);
            out.observables.add_row({traj.times[k], qc.mean(0), qc.mean(1),
                                     qc.cov(0, 0), qc.cov(1, 1),
                                     qc.mean_occupation});
        }
    }
    return out;
}

}  // namespace bellflow::sweeps
