#pragma once

#include <optional>

#include "siq/model.hpp"

namespace siq {

struct Thresholds {
    double p_c = 0.0;
    std::optional<double> tau_c;  // defined only when p > p_c
    double q_c = 0.0;
    double R_eff = 0.0;
};

struct EndemicPoint {
    double v_S = 0.0;
    double v_I = 0.0;
    double v_Q = 0.0;
    double v_E = 0.0;
    double q = 0.0;    // leaf label
    double eta = 0.0;  // second leaf label (SEIQ)
    bool seiq = false;

    double sum() const { return v_S + v_I + v_Q + v_E; }
    State as_state() const;
};

double critical_probability(double r);
double critical_identification_time(double r, double p);
double critical_time_days(const DiseaseSpec& disease, double p);
double q_critical(double r, double p, double tau);
double tau_critical_at_q(double r, double p, double q);
double effective_R(double r, double p, double tau, double q);
Thresholds thresholds(const ModelParams& params, double q = 0.0);

EndemicPoint endemic_point(const ModelParams& params, double q);
EndemicPoint seiq_endemic_point(const ModelParams& params, double eta, double q);
bool reachable(const ModelParams& params, double q);

// Leaf label(s) carried by the solution from phi. The value is H (or H1*, H2*) of x_t at
// t = kappa, obtained by integrating phi forward; for data that already solve the equations
// on the window this equals the value on phi itself.
double leaf_label(const ModelParams& params, const History& phi, double step = kDefaultStep);
std::pair<double, double> seiq_leaf_labels(const ModelParams& params, const History& phi,
                                           double step = kDefaultStep);

// Endemic point on the leaf of phi (SIQ: dimension 3, SEIQ: dimension 4).
EndemicPoint predict_endemic_from_history(const ModelParams& params, const History& phi,
                                          double step = kDefaultStep);

}  // namespace siq
