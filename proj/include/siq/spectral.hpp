#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "siq/model.hpp"

namespace siq {

using cplx = std::complex<double>;

enum class CharKind {
    SIQ,                // general equilibrium (w_S, w_I) of the SIQ system
    SEIQ_DISEASE_FREE,  // point (1 - q - eta, eta, 0, q) of the SEIQ system
};

struct CharEq {
    CharKind kind = CharKind::SIQ;
    ModelParams params;
    double w_S = 1.0;
    double w_I = 0.0;
    double q = 0.0;
    double eta = 0.0;

    // Order of the trivial zero root removed before counting.
    int deflation() const { return kind == CharKind::SIQ ? 1 : 2; }
};

// Equilibrium (1 - q, 0, q).
CharEq disease_free_chareq(const ModelParams& params, double q);
// Endemic line point w(q) = (1 - q_c, q_c - q, q).
CharEq endemic_chareq(const ModelParams& params, double q);
CharEq seiq_disease_free_chareq(const ModelParams& params, double eta, double q);

cplx char_eval(const CharEq& ce, cplx lambda);
// chi(lambda) / lambda^d, the function whose zeros are counted.
cplx char_eval_deflated(const CharEq& ce, cplx lambda);

struct Box {
    double re_min = 1e-8;
    double re_max = 10.0;
    double im_max = 20.0;
};

Box default_box(const CharEq& ce);

enum class Stability { Stable, Unstable, Marginal };

struct SpectralReport {
    int unstable_count = 0;
    std::vector<cplx> roots;  // located roots inside the box, residual |chi| <= 1e-10
    Stability classification = Stability::Stable;
    Box box;
    std::string label() const;  // "stable", "unstable(n)" or "marginal"
};

struct CountOptions {
    int initial_samples = 512;  // per side
    int max_samples = 1 << 15;
    bool locate_roots = true;
    bool check_marginal = true;
};

// Winding number of chi / lambda^d around the box (argument principle).
int winding_count(const CharEq& ce, const Box& box, const CountOptions& opt = {});

SpectralReport count_unstable(const CharEq& ce, const Box& box, const CountOptions& opt = {});
SpectralReport count_unstable(const CharEq& ce, const CountOptions& opt = {});

// Zeros of chi / lambda^d on the imaginary axis with omega in (omega_min, omega_max].
std::vector<double> imaginary_axis_zeros(const CharEq& ce, double omega_min, double omega_max,
                                         double tol = 1e-8);

cplx newton_root(const CharEq& ce, cplx guess, int max_iter = 60);

std::pair<cplx, cplx> strong_spectrum_tau0(double r, double p, double q);

struct AsymptoticSpectrum {
    double h = 0.0;
    std::optional<std::pair<double, double>> q_h;  // (q_h-, q_h+) when the discriminant is >= 0
    double discriminant = 0.0;
    std::function<double(double)> gamma;           // omega -> gamma(omega)
    std::function<cplx(cplx)> Y;
};

AsymptoticSpectrum asymptotic_spectrum_tau0(double r, double p, double q);

struct HopfData {
    double kappa_0 = 0.0;
    double Omega = 0.0;
    double residual = 0.0;  // |chi(i Omega)| at kappa_0
    int count_before = 0;
    int count_after = 0;
};

// Equilibrium family indexed by kappa (kappa_0 scans need the equilibrium to move with kappa
// when it is defined through a kappa-dependent leaf).
using ChareqFamily = std::function<CharEq(double kappa)>;

// Successive changes of the unstable count as kappa increases over [kappa_min, kappa_max].
std::vector<HopfData> kappa_crossings(const ChareqFamily& family, double kappa_min, double kappa_max,
                                      std::size_t max_crossings, double scan_step = 0.05,
                                      double bisect_tol = 1e-4);

std::optional<HopfData> hopf_kappa0(double r, double p, double tau, double q, double kappa_max);
std::optional<HopfData> hopf_kappa0(const ChareqFamily& family, double kappa_max);
double hopf_sequence(const HopfData& hopf, int m);

std::pair<double, double> e0_hopf_bound(double r, double p, double tau);

constexpr int kUnknownCell = -1;

struct StabilityMap {
    std::vector<double> q_grid;
    std::vector<double> kappa_grid;
    std::vector<int> counts;  // row-major: index = iq * kappa_grid.size() + ik
    std::vector<std::string> errors;
    int at(std::size_t iq, std::size_t ik) const { return counts[iq * kappa_grid.size() + ik]; }
};

// Threads: SIQ_THREADS if set, otherwise the hardware concurrency.
StabilityMap stability_map(double r, double p, double tau, const std::vector<double>& q_grid,
                           const std::vector<double>& kappa_grid, unsigned threads = 0);

unsigned default_thread_count();

}  // namespace siq
