#pragma once

#include <string>
#include <utility>
#include <vector>

#include "siq/dde.hpp"

namespace siq {

// Component layout shared by both models; SEIQ appends E so (S, I, Q) stays a prefix.
enum Component : std::size_t { kS = 0, kI = 1, kQ = 2, kE = 3 };

enum class ModelKind { SIQ, SEIQ };

struct ModelParams {
    double r = 1.0;      // rescaled reproductive number
    double p = 0.0;      // identification probability
    double tau = 0.0;    // identification time
    double kappa = 0.0;  // isolation time
    double sigma = 0.0;  // latency (SEIQ only)

    double eps() const;
    double span() const { return sigma + tau + kappa; }
    // Throws InvalidParams when a field is out of its domain.
    void validate() const;
};

// Rounds tau, kappa and sigma to multiples of step so that every delay and every
// conserved-quantity window lands on the integration grid.
ModelParams snap_to_grid(const ModelParams& params, double step);

struct EpiState {
    double S = 0.0;
    double I = 0.0;
    double Q = 0.0;
    double E = 0.0;
    double mass() const { return S + I + Q + E; }
};

struct DiseaseSpec {
    std::string name;
    double r = 0.0;
    double infectious_period_days = 0.0;
    std::string source;
};

struct ModelField {
    DelayedField field;
    DelaySpec delays;
};

// Delays {tau, tau + kappa}; state (S, I, Q).
ModelField siq_field(const ModelParams& params);
// Isolation never ends (kappa = infinity): the release term drops out; delay {tau}.
ModelField siq_field_permanent(const ModelParams& params);
// Delays {sigma, sigma + tau, sigma + tau + kappa}; state (S, I, Q, E).
ModelField seiq_field(const ModelParams& params);

// Integrates with parameters snapped to the step grid.
Trajectory simulate(const ModelParams& params, ModelKind kind, const History& history, double t_end,
                    double step = kDefaultStep);

struct Violation {
    std::string condition;
    double value = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // value - bound, negative when violated
};

struct ValidationReport {
    bool valid = true;
    double psi_I0 = 0.0;
    double psi_Q0 = 0.0;
    double bound_I = 0.0;
    double bound_Q = 0.0;
    std::vector<Violation> violations;
};

// Positivity preconditions on initial data, evaluated with the trapezoid rule on a grid of
// spacing step anchored at theta = 0 (integrands use left limits at theta = 0).
ValidationReport validate_history(const ModelParams& params, const History& psi,
                                  double step = kDefaultStep);

// psi = (1, 0, 0) for theta < 0 and (1 - i0 - q0, i0, q0) at theta = 0.
History outbreak_history(const ModelParams& params, double i0, double q0);
// SEIQ version; the E slot at theta = 0 carries e0.
History seiq_outbreak_history(const ModelParams& params, double i0, double q0, double e0);

// H on an initial function (quadrature on a grid of spacing step anchored at theta = 0).
double conserved_H(const ModelParams& params, const History& phi, double step = kDefaultStep);
// H on the window x_t of a trajectory.
double conserved_H(const ModelParams& params, const Trajectory& traj, double t);

// (H1*, H2*) for SEIQ data.
std::pair<double, double> conserved_H_star(const ModelParams& params, const History& phi,
                                           double step = kDefaultStep);
std::pair<double, double> conserved_H_star(const ModelParams& params, const Trajectory& traj,
                                           double t);

// Integral of (c0 + c1 * S) * I over absolute times [a, b] of a trajectory (history included).
// Trajectory segments are integrated through their Hermite interpolants, which is the
// trapezoid rule plus derivative end corrections.
double integrate_SI(const Trajectory& traj, double a, double b, double c0, double c1);

}  // namespace siq
