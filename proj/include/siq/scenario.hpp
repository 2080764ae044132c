#pragma once

// Batch computations behind the CLI subcommands. Each returns a CsvTable whose metadata block
// records the inputs needed to reproduce it.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "siq/equilibria.hpp"
#include "siq/io.hpp"
#include "siq/network.hpp"
#include "siq/spectral.hpp"

namespace siq {

std::vector<double> linspace(double a, double b, std::size_t n);

// ---- disease table ----

// A reference T_c disagrees with the formula when it is off by more than 0.15 days or by more
// than 5 % of the reference value (the relative test catches short identification times).
inline constexpr double kReferenceTolDays = 0.15;
inline constexpr double kReferenceRelTol = 0.05;

struct CriticalRow {
    DiseaseSpec disease;
    double p_c = 0.0;
    std::optional<double> tau_c;
    std::optional<double> T_c_days;
    std::optional<DiseaseReference> reference;  // only when the reference was taken at the same p
    bool uncontrollable = false;                 // p <= p_c
    bool reference_mismatch = false;
    std::string flag() const;                    // "", "uncontrollable", "reference_mismatch"
};

std::vector<CriticalRow> critical_rows(const std::vector<DiseaseSpec>& diseases,
                                       const std::map<std::string, DiseaseReference>& refs, double p);
// name,p_c,tau_c,T_c_days,flag
CsvTable critical_table(const std::vector<CriticalRow>& rows, double p);
// name,r,infectious_period_days,p_c,T_c_days,p_c_ref,T_c_ref_days,flag
CsvTable table2_table(const std::vector<CriticalRow>& rows, double p);

// ---- trajectories ----

History scenario_history(const ScenarioConfig& cfg, ModelKind kind);
Trajectory run_scenario(const ScenarioConfig& cfg, ModelKind kind);

// t,S,I,Q[,E] sampled every dt_out; metadata carries H (or H1*, H2*), the leaf label(s), the
// predicted endemic point and the final state.
CsvTable simulate_table(const ScenarioConfig& cfg, ModelKind kind, double dt_out);

// max - min of component c over the nodes in [a, b].
double oscillation_amplitude(const Trajectory& traj, std::size_t c, double a, double b);

// ---- I_peak ----

inline constexpr double kPeakSettle = 50.0;
inline constexpr double kPeakTol = 1e-9;

struct PeakResult {
    double kappa = 0.0;  // +inf for permanent isolation
    double I_peak = 0.0;
    double t_peak = 0.0;
};

// sup of the dense I(t) over [0, t_end]; throws HorizonTooShort unless I first comes within
// kPeakTol of it at least kPeakSettle before t_end.
PeakResult dense_peak(const Trajectory& traj, std::size_t c = kI);

// One run per kappa (kappa = +inf uses permanent isolation), outbreak data (i0, q0).
std::vector<PeakResult> ipeak_scan(const ModelParams& base, double i0, double q0,
                                   const std::vector<double>& kappas, double t_end, double step);
// kappa,I_peak
CsvTable ipeak_table(const ModelParams& base, double i0, double q0, const std::vector<PeakResult>& peaks,
                     double t_end, double step);

// ---- equilibria and spectra ----

// Characteristic equation at a concrete SIQ endemic point.
CharEq chareq_at(const ModelParams& params, const EndemicPoint& e);

// q,v_S,v_I,v_Q,v_E,reachable
CsvTable endemic_table(const ModelParams& params, const EndemicPoint& e, const std::string& source);

// re,im,residual
CsvTable spectrum_table(const CharEq& ce, const SpectralReport& rep, const std::string& equilibrium);

// q,kappa,unstable_count
CsvTable stability_map_table(const StabilityMap& map, double r, double p, double tau);

// m,kappa_m,residual
CsvTable hopf_table(double r, double p, double tau, double q, const std::optional<HopfData>& hopf, int m_max,
                    double kappa_max);

// ---- network ----

// t_days,S_frac,I_frac,Q_frac
CsvTable network_table(const NetSeries& series, const SimConfig& cfg, const Network& net,
                       const std::string& graph, std::size_t replicas);

}  // namespace siq
