#include "siq/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "siq/errors.hpp"

namespace siq {

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {a};
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = b;
    return v;
}

std::string CriticalRow::flag() const {
    if (uncontrollable) return "uncontrollable";
    if (reference_mismatch) return "reference_mismatch";
    return "";
}

std::vector<CriticalRow> critical_rows(const std::vector<DiseaseSpec>& diseases,
                                       const std::map<std::string, DiseaseReference>& refs, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw InvalidParams("p must lie in (0, 1]");
    std::vector<CriticalRow> out;
    for (const auto& d : diseases) {
        CriticalRow row;
        row.disease = d;
        row.p_c = critical_probability(d.r);
        if (p <= row.p_c) {
            row.uncontrollable = true;
        } else {
            row.tau_c = critical_identification_time(d.r, p);
            row.T_c_days = critical_time_days(d, p);
        }
        const auto it = refs.find(d.name);
        if (it != refs.end() && it->second.p == p) {
            row.reference = it->second;
            const double diff = row.T_c_days ? std::abs(*row.T_c_days - it->second.T_c_days) : 0.0;
            if (diff > kReferenceTolDays || diff > kReferenceRelTol * std::abs(it->second.T_c_days)) {
                row.reference_mismatch = true;
            }
        }
        out.push_back(std::move(row));
    }
    return out;
}

namespace {

std::string opt_num(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

CsvTable critical_table(const std::vector<CriticalRow>& rows, double p) {
    CsvTable t;
    t.add_meta("version", kToolVersion);
    t.add_meta("command", "critical");
    t.add_meta("p", p);
    t.add_meta("reference_tolerance_days", kReferenceTolDays);
    t.add_meta("reference_tolerance_relative", kReferenceRelTol);
    t.header = {"name", "p_c", "tau_c", "T_c_days", "flag"};
    for (const auto& r : rows) {
        t.rows.push_back({r.disease.name, format_number(r.p_c), opt_num(r.tau_c), opt_num(r.T_c_days), r.flag()});
    }
    return t;
}

CsvTable table2_table(const std::vector<CriticalRow>& rows, double p) {
    CsvTable t;
    t.add_meta("version", kToolVersion);
    t.add_meta("command", "table2");
    t.add_meta("p", p);
    t.add_meta("reference_tolerance_days", kReferenceTolDays);
    t.add_meta("reference_tolerance_relative", kReferenceRelTol);
    t.header = {"name", "r", "infectious_period_days", "p_c", "T_c_days", "p_c_ref", "T_c_ref_days", "flag"};
    for (const auto& r : rows) {
        const std::string pc_ref = r.reference ? format_number(r.reference->p_c) : "";
        const std::string tc_ref = r.reference ? format_number(r.reference->T_c_days) : "";
        t.rows.push_back({r.disease.name, format_number(r.disease.r), format_number(r.disease.infectious_period_days),
                          format_number(r.p_c), opt_num(r.T_c_days), pc_ref, tc_ref, r.flag()});
    }
    return t;
}

History scenario_history(const ScenarioConfig& cfg, ModelKind kind) {
    if (kind == ModelKind::SEIQ) return seiq_outbreak_history(cfg.params, cfg.i0, cfg.q0, cfg.e0);
    if (cfg.e0 != 0.0) throw InvalidFractions("e0 is only meaningful for the SEIQ model");
    return outbreak_history(cfg.params, cfg.i0, cfg.q0);
}

Trajectory run_scenario(const ScenarioConfig& cfg, ModelKind kind) {
    if (kind == ModelKind::SIQ && cfg.params.sigma != 0.0) {
        throw InvalidParams("sigma must be 0 for the SIQ model");
    }
    if (!(cfg.t_end > 0.0)) throw InvalidParams("t_end must be positive");
    return simulate(cfg.params, kind, scenario_history(cfg, kind), cfg.t_end, cfg.step);
}

CsvTable simulate_table(const ScenarioConfig& cfg, ModelKind kind, double dt_out) {
    if (!(dt_out > 0.0)) throw InvalidParams("dt_out must be positive");
    const History phi = scenario_history(cfg, kind);
    const Trajectory tr = run_scenario(cfg, kind);
    const ModelParams g = snap_to_grid(cfg.params, cfg.step);

    CsvTable t;
    add_param_meta(t, cfg.params, cfg.step);
    t.add_meta("command", "simulate");
    t.add_meta("model", kind == ModelKind::SIQ ? "SIQ" : "SEIQ");
    t.add_meta("i0", cfg.i0);
    t.add_meta("q0", cfg.q0);
    if (kind == ModelKind::SEIQ) t.add_meta("e0", cfg.e0);
    t.add_meta("t_end", cfg.t_end);
    t.add_meta("delay_snap_error", tr.snap_error());
    const ValidationReport vr = validate_history(g, phi, cfg.step);
    t.add_meta("history_valid", vr.valid ? "true" : "false");

    EndemicPoint pred;
    if (kind == ModelKind::SIQ) {
        t.add_meta("H_initial", conserved_H(g, phi, cfg.step));
        t.add_meta("H_final", conserved_H(g, tr, tr.t_end()));
        const double leaf = leaf_label(cfg.params, phi, cfg.step);
        t.add_meta("leaf_q", leaf);
        pred = endemic_point(cfg.params, leaf);
    } else {
        const auto [h1, h2] = conserved_H_star(g, phi, cfg.step);
        const auto [f1, f2] = conserved_H_star(g, tr, tr.t_end());
        t.add_meta("H1_initial", h1);
        t.add_meta("H2_initial", h2);
        t.add_meta("H1_final", f1);
        t.add_meta("H2_final", f2);
        const auto [l1, l2] = seiq_leaf_labels(cfg.params, phi, cfg.step);
        t.add_meta("leaf_q", l1);
        t.add_meta("leaf_eta", l2);
        pred = seiq_endemic_point(cfg.params, l2, l1);
    }
    t.add_meta("predicted_S", pred.v_S);
    t.add_meta("predicted_I", pred.v_I);
    t.add_meta("predicted_Q", pred.v_Q);
    if (kind == ModelKind::SEIQ) t.add_meta("predicted_E", pred.v_E);
    t.add_meta("predicted_reachable", pred.v_I > 0.0 ? "true" : "false");

    t.header = {"t", "S", "I", "Q"};
    if (kind == ModelKind::SEIQ) t.header.push_back("E");
    const auto n = static_cast<std::size_t>(std::floor(cfg.t_end / dt_out + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) {
        const double tk = std::min(static_cast<double>(k) * dt_out, tr.t_end());
        const State x = tr.sample(tk);
        std::vector<double> row{tk, x[kS], x[kI], x[kQ]};
        if (kind == ModelKind::SEIQ) row.push_back(x[kE]);
        t.add_row(row);
    }
    const State xe = tr.sample(tr.t_end());
    t.add_meta("final_S", xe[kS]);
    t.add_meta("final_I", xe[kI]);
    t.add_meta("final_Q", xe[kQ]);
    if (kind == ModelKind::SEIQ) t.add_meta("final_E", xe[kE]);
    return t;
}

double oscillation_amplitude(const Trajectory& traj, std::size_t c, double a, double b) {
    if (!(b >= a) || a < 0.0 || b > traj.t_end()) throw OutOfRange("amplitude window outside the trajectory");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < traj.node_count(); ++k) {
        const double tk = traj.node_time(k);
        if (tk < a || tk > b) continue;
        const double v = traj.node(k)[c];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi >= lo ? hi - lo : 0.0;
}

PeakResult dense_peak(const Trajectory& traj, std::size_t c) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < traj.node_count(); ++k) {
        if (traj.node(k)[c] > traj.node(best)[c]) best = k;
    }
    PeakResult pr;
    pr.I_peak = traj.node(best)[c];
    pr.t_peak = traj.node_time(best);
    // The interpolant may overshoot the node maximum inside the neighbouring segments.
    const std::size_t first = best == 0 ? 0 : best - 1;
    const std::size_t last = std::min(best + 1, traj.node_count() - 1);
    constexpr int kSub = 64;
    for (std::size_t k = first; k < last; ++k) {
        const double a = traj.node_time(k);
        const double b = traj.node_time(k + 1);
        for (int j = 1; j < kSub; ++j) {
            const double tj = a + (b - a) * j / kSub;
            const double v = traj.sample_component(tj, c);
            if (v > pr.I_peak) {
                pr.I_peak = v;
                pr.t_peak = tj;
            }
        }
    }
    // A slow monotone approach keeps setting new maxima by negligible amounts; the peak
    // counts as attained at the first time I comes within kPeakTol of it.
    double t_attained = pr.t_peak;
    for (std::size_t k = 0; k < traj.node_count(); ++k) {
        if (traj.node(k)[c] >= pr.I_peak - kPeakTol) {
            t_attained = std::min(t_attained, traj.node_time(k));
            break;
        }
    }
    if (traj.t_end() - t_attained < kPeakSettle) {
        std::ostringstream os;
        os << "running maximum still changing at t=" << t_attained << " (horizon " << traj.t_end()
           << "); need " << kPeakSettle << " time units without a new maximum";
        throw HorizonTooShort(os.str());
    }
    return pr;
}

std::vector<PeakResult> ipeak_scan(const ModelParams& base, double i0, double q0,
                                   const std::vector<double>& kappas, double t_end, double step) {
    std::vector<PeakResult> out;
    for (double kappa : kappas) {
        ModelParams mp = base;
        const bool permanent = std::isinf(kappa) && kappa > 0.0;
        mp.kappa = permanent ? 0.0 : kappa;
        mp.sigma = 0.0;
        const ModelParams g = snap_to_grid(mp, step);
        const History phi = outbreak_history(g, i0, q0);
        Trajectory tr;
        if (permanent) {
            const ModelField mf = siq_field_permanent(g);
            tr = integrate(mf.field, mf.delays, phi, t_end, step);
        } else {
            tr = simulate(g, ModelKind::SIQ, phi, t_end, step);
        }
        PeakResult pr = dense_peak(tr);
        pr.kappa = kappa;
        out.push_back(pr);
    }
    return out;
}

CsvTable ipeak_table(const ModelParams& base, double i0, double q0, const std::vector<PeakResult>& peaks,
                     double t_end, double step) {
    CsvTable t;
    ModelParams shown = base;
    shown.kappa = 0.0;
    add_param_meta(t, shown, step);
    t.add_meta("command", "ipeak");
    t.add_meta("i0", i0);
    t.add_meta("q0", q0);
    t.add_meta("t_end", t_end);
    t.add_meta("settle_window", kPeakSettle);
    t.header = {"kappa", "I_peak"};
    for (const auto& p : peaks) t.add_row({p.kappa, p.I_peak});
    return t;
}

CharEq chareq_at(const ModelParams& params, const EndemicPoint& e) {
    CharEq ce;
    ce.params = params;
    ce.w_S = e.v_S;
    ce.w_I = e.v_I;
    ce.q = e.q;
    return ce;
}

CsvTable endemic_table(const ModelParams& params, const EndemicPoint& e, const std::string& source) {
    CsvTable t;
    add_param_meta(t, params, kDefaultStep);
    t.add_meta("command", "endemic");
    t.add_meta("leaf_source", source);
    t.add_meta("q_c", q_critical(params.r, params.p, params.tau));
    t.header = {"q", "v_S", "v_I", "v_Q", "v_E", "reachable"};
    t.rows.push_back({format_number(e.q), format_number(e.v_S), format_number(e.v_I), format_number(e.v_Q),
                      format_number(e.v_E), e.v_I > 0.0 && reachable(params, e.q) ? "true" : "false"});
    return t;
}

CsvTable spectrum_table(const CharEq& ce, const SpectralReport& rep, const std::string& equilibrium) {
    CsvTable t;
    add_param_meta(t, ce.params, kDefaultStep);
    t.add_meta("command", "spectrum");
    t.add_meta("equilibrium", equilibrium);
    t.add_meta("w_S", ce.w_S);
    t.add_meta("w_I", ce.w_I);
    t.add_meta("q", ce.q);
    if (ce.kind == CharKind::SEIQ_DISEASE_FREE) t.add_meta("eta", ce.eta);
    t.add_meta("box_re_min", rep.box.re_min);
    t.add_meta("box_re_max", rep.box.re_max);
    t.add_meta("box_im_max", rep.box.im_max);
    t.add_meta("unstable_count", static_cast<double>(rep.unstable_count));
    t.add_meta("classification", rep.label());
    t.header = {"re", "im", "residual"};
    for (const cplx& z : rep.roots) t.add_row({z.real(), z.imag(), std::abs(char_eval(ce, z))});
    return t;
}

CsvTable stability_map_table(const StabilityMap& map, double r, double p, double tau) {
    CsvTable t;
    add_param_meta(t, ModelParams{r, p, tau, 0.0, 0.0}, kDefaultStep);
    t.add_meta("command", "stability-map");
    t.add_meta("q_points", static_cast<double>(map.q_grid.size()));
    t.add_meta("kappa_points", static_cast<double>(map.kappa_grid.size()));
    t.add_meta("unknown_cells", static_cast<double>(std::count(map.counts.begin(), map.counts.end(), kUnknownCell)));
    t.header = {"q", "kappa", "unstable_count"};
    for (std::size_t iq = 0; iq < map.q_grid.size(); ++iq) {
        for (std::size_t ik = 0; ik < map.kappa_grid.size(); ++ik) {
            t.add_row({map.q_grid[iq], map.kappa_grid[ik], static_cast<double>(map.at(iq, ik))});
        }
    }
    return t;
}

CsvTable hopf_table(double r, double p, double tau, double q, const std::optional<HopfData>& hopf, int m_max,
                    double kappa_max) {
    CsvTable t;
    add_param_meta(t, ModelParams{r, p, tau, 0.0, 0.0}, kDefaultStep);
    t.add_meta("command", "hopf");
    t.add_meta("q", q);
    t.add_meta("kappa_max", kappa_max);
    t.header = {"m", "kappa_m", "residual"};
    if (!hopf) {
        t.add_meta("found", "false");
        return t;
    }
    t.add_meta("found", "true");
    t.add_meta("kappa_0", hopf->kappa_0);
    t.add_meta("Omega", hopf->Omega);
    t.add_meta("period_in_kappa", 2.0 * std::acos(-1.0) / hopf->Omega);
    for (int m = 0; m <= m_max; ++m) {
        const double km = hopf_sequence(*hopf, m);
        ModelParams mp{r, p, tau, km, 0.0};
        const double res = std::abs(char_eval(endemic_chareq(mp, q), cplx(0.0, hopf->Omega)));
        t.add_row({static_cast<double>(m), km, res});
    }
    return t;
}

CsvTable network_table(const NetSeries& series, const SimConfig& cfg, const Network& net,
                       const std::string& graph, std::size_t replicas) {
    CsvTable t;
    t.add_meta("version", kToolVersion);
    t.add_meta("command", "network");
    t.add_meta("graph", graph);
    t.add_meta("N", static_cast<double>(net.n));
    t.add_meta("edges", static_cast<double>(net.edges.size()));
    t.add_meta("mean_degree", net.mean_degree());
    t.add_meta("beta", cfg.beta);
    t.add_meta("gamma", cfg.gamma);
    t.add_meta("p", cfg.p);
    t.add_meta("tau_days", cfg.tau_days);
    t.add_meta("kappa_days", cfg.kappa_days);
    t.add_meta("t_end_days", cfg.t_end_days);
    t.add_meta("dt_out", cfg.dt_out);
    t.add_meta("seed", std::to_string(cfg.seed));
    t.add_meta("replicas", static_cast<double>(replicas));
    t.add_meta("initial_infected", static_cast<double>(cfg.initial_infected.size()));
    t.add_meta("rng", "mt19937_64, seed used directly, replica i uses seed + i");
    const MeanFieldParams mf = mean_field_params(cfg.beta, net.mean_degree(), cfg.gamma, cfg.p, cfg.tau_days,
                                                 cfg.kappa_days);
    t.add_meta("mean_field_r", mf.r);
    t.add_meta("mean_field_eps", mf.eps);
    t.header = {"t_days", "S_frac", "I_frac", "Q_frac"};
    for (std::size_t k = 0; k < series.t.size(); ++k) t.add_row({series.t[k], series.S[k], series.I[k], series.Q[k]});
    return t;
}

}  // namespace siq
