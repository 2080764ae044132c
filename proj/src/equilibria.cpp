#include "siq/equilibria.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "siq/errors.hpp"

namespace siq {

State EndemicPoint::as_state() const {
    if (seiq) return {v_S, v_I, v_Q, v_E};
    return {v_S, v_I, v_Q};
}

double critical_probability(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidParams("r must be positive");
    return 1.0 - 1.0 / r;
}

double critical_identification_time(double r, double p) {
    const double pc = critical_probability(r);
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParams("p must lie in [0, 1]");
    if (p <= pc) {
        std::ostringstream os;
        os << "p=" << p << " does not exceed p_c=" << pc;
        throw SubcriticalP(os.str());
    }
    // Non-epidemic diseases (r <= 1) are controlled at any identification time.
    if (pc <= 0.0) return std::numeric_limits<double>::infinity();
    return std::log(p / pc);
}

double critical_time_days(const DiseaseSpec& disease, double p) {
    if (!(disease.infectious_period_days > 0.0)) throw InvalidParams("infectious period must be positive");
    return critical_identification_time(disease.r, p) * disease.infectious_period_days;
}

double q_critical(double r, double p, double tau) {
    if (!(r > 0.0)) throw InvalidParams("r must be positive");
    const double eps = p * std::exp(-tau);
    if (!(eps < 1.0)) throw EpsNotBelowOne("eps = p e^-tau must be below 1");
    return 1.0 - 1.0 / (r * (1.0 - eps));
}

double tau_critical_at_q(double r, double p, double q) {
    if (!(r > 0.0)) throw InvalidParams("r must be positive");
    const double rq = r * (1.0 - q);
    if (rq <= 1.0) throw AlwaysStable("r (1 - q) <= 1: stable for every tau");
    const double thr = 1.0 - 1.0 / rq;
    if (p <= thr) {
        std::ostringstream os;
        os << "p=" << p << " does not exceed 1 - 1/(r(1-q))=" << thr;
        throw SubcriticalP(os.str());
    }
    return std::log(p) - std::log(thr);
}

double effective_R(double r, double p, double tau, double q) {
    return (1.0 - q) * (1.0 - p * std::exp(-tau)) * r;
}

Thresholds thresholds(const ModelParams& params, double q) {
    Thresholds t;
    t.p_c = critical_probability(params.r);
    if (params.p > t.p_c) t.tau_c = critical_identification_time(params.r, params.p);
    t.q_c = q_critical(params.r, params.p, params.tau);
    t.R_eff = effective_R(params.r, params.p, params.tau, q);
    return t;
}

EndemicPoint endemic_point(const ModelParams& params, double q) {
    params.validate();
    const double eps = params.eps();
    const double qc = q_critical(params.r, params.p, params.tau);
    const double d = 1.0 - eps + eps * params.kappa;
    EndemicPoint e;
    e.q = q;
    e.v_S = 1.0 / (params.r * (1.0 - eps));
    e.v_I = (1.0 - eps) * (qc - q) / d;
    e.v_Q = eps * params.kappa * (qc - q) / d + q;
    return e;
}

EndemicPoint seiq_endemic_point(const ModelParams& params, double eta, double q) {
    params.validate();
    const double eps = params.eps();
    const double qc = q_critical(params.r, params.p, params.tau);
    const double d = 1.0 - eps + params.sigma + eps * params.kappa;
    const double w = qc - q - eta;
    EndemicPoint e;
    e.seiq = true;
    e.q = q;
    e.eta = eta;
    e.v_S = 1.0 / (params.r * (1.0 - eps));
    // Same evaluation order as endemic_point, so sigma = eta = 0 reproduces it bit for bit.
    e.v_I = (1.0 - eps) * w / d;
    e.v_Q = eps * params.kappa * w / d + q;
    e.v_E = params.sigma * w / d + eta;
    return e;
}

bool reachable(const ModelParams& params, double q) {
    const double qc = q_critical(params.r, params.p, params.tau);
    return q >= 0.0 && q <= 1.0 && q < qc;
}

namespace {

// Solution window x_kappa, from which the conserved quantities are constant.
Trajectory transport(const ModelParams& g, ModelKind kind, const History& phi, double step) {
    return simulate(g, kind, phi, std::max(g.kappa, step), step);
}

}  // namespace

double leaf_label(const ModelParams& params, const History& phi, double step) {
    params.validate();
    if (phi.dimension != 3) throw InvalidParams("leaf_label expects SIQ data");
    if (params.kappa == 0.0) return conserved_H(params, phi, step);
    const ModelParams g = snap_to_grid(params, step);
    const Trajectory tr = transport(g, ModelKind::SIQ, phi, step);
    return conserved_H(g, tr, g.kappa);
}

std::pair<double, double> seiq_leaf_labels(const ModelParams& params, const History& phi, double step) {
    params.validate();
    if (phi.dimension != 4) throw InvalidParams("seiq_leaf_labels expects SEIQ data");
    if (params.kappa == 0.0) return conserved_H_star(params, phi, step);
    const ModelParams g = snap_to_grid(params, step);
    const Trajectory tr = transport(g, ModelKind::SEIQ, phi, step);
    return conserved_H_star(g, tr, g.kappa);
}

EndemicPoint predict_endemic_from_history(const ModelParams& params, const History& phi, double step) {
    if (phi.dimension == 4) {
        const auto [h1, h2] = seiq_leaf_labels(params, phi, step);
        return seiq_endemic_point(params, h2, h1);
    }
    return endemic_point(params, leaf_label(params, phi, step));
}

}  // namespace siq
