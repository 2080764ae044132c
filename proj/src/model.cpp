#include "siq/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "siq/errors.hpp"

namespace siq {

double ModelParams::eps() const { return p * std::exp(-tau); }

void ModelParams::validate() const {
    auto bad = [](const char* name, double v) {
        std::ostringstream os;
        os << name << "=" << v << " out of range";
        throw InvalidParams(os.str());
    };
    if (!(r > 0.0) || !std::isfinite(r)) bad("r", r);
    if (!(p >= 0.0 && p <= 1.0)) bad("p", p);
    if (!(tau >= 0.0) || !std::isfinite(tau)) bad("tau", tau);
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) bad("kappa", kappa);
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) bad("sigma", sigma);
}

ModelParams snap_to_grid(const ModelParams& params, double step) {
    params.validate();
    if (!(step > 0.0)) throw InvalidParams("step must be positive");
    auto snap = [step](const char* name, double v) {
        if (v > 0.0 && v < step) {
            std::ostringstream os;
            os << name << "=" << v << " is below the step " << step;
            throw DelayTooSmall(os.str());
        }
        return static_cast<double>(std::llround(v / step)) * step;
    };
    ModelParams out = params;
    out.tau = snap("tau", params.tau);
    out.kappa = snap("kappa", params.kappa);
    out.sigma = snap("sigma", params.sigma);
    return out;
}

ModelField siq_field(const ModelParams& params) {
    params.validate();
    const double r = params.r;
    const double re = params.r * params.eps();
    ModelField mf;
    mf.delays.dimension = 3;
    mf.delays.delays = {params.tau, params.tau + params.kappa};
    mf.field = [r, re](double, const State& x, const std::vector<State>& lag, State& dx) {
        const double si = x[kS] * x[kI];
        const double a = lag[0][kS] * lag[0][kI];
        const double b = lag[1][kS] * lag[1][kI];
        dx[kS] = -r * si + x[kI] + re * b;
        dx[kI] = r * si - x[kI] - re * a;
        dx[kQ] = re * (a - b);
    };
    return mf;
}

ModelField siq_field_permanent(const ModelParams& params) {
    params.validate();
    const double r = params.r;
    const double re = params.r * params.eps();
    ModelField mf;
    mf.delays.dimension = 3;
    mf.delays.delays = {params.tau};
    mf.field = [r, re](double, const State& x, const std::vector<State>& lag, State& dx) {
        const double si = x[kS] * x[kI];
        const double a = lag[0][kS] * lag[0][kI];
        dx[kS] = -r * si + x[kI];
        dx[kI] = r * si - x[kI] - re * a;
        dx[kQ] = re * a;
    };
    return mf;
}

ModelField seiq_field(const ModelParams& params) {
    params.validate();
    const double r = params.r;
    const double re = params.r * params.eps();
    ModelField mf;
    mf.delays.dimension = 4;
    mf.delays.delays = {params.sigma, params.sigma + params.tau, params.sigma + params.tau + params.kappa};
    mf.field = [r, re](double, const State& x, const std::vector<State>& lag, State& dx) {
        const double si = x[kS] * x[kI];
        const double c = lag[0][kS] * lag[0][kI];
        const double a = lag[1][kS] * lag[1][kI];
        const double b = lag[2][kS] * lag[2][kI];
        dx[kS] = -r * si + x[kI] + re * b;
        dx[kE] = r * si - r * c;
        dx[kI] = r * c - x[kI] - re * a;
        dx[kQ] = re * (a - b);
    };
    return mf;
}

Trajectory simulate(const ModelParams& params, ModelKind kind, const History& history, double t_end,
                    double step) {
    const ModelParams g = snap_to_grid(params, step);
    const ModelField mf = kind == ModelKind::SIQ ? siq_field(g) : seiq_field(g);
    return integrate(mf.field, mf.delays, history, t_end, step);
}

namespace {

constexpr double kSimplexTol = 1e-12;

void check_simplex(const State& v, double theta) {
    double sum = 0.0;
    bool ok = true;
    for (double c : v) {
        if (!(c >= -kSimplexTol) || !std::isfinite(c)) ok = false;
        sum += c;
    }
    if (!ok || std::abs(sum - 1.0) > kSimplexTol) {
        std::ostringstream os;
        os.precision(17);
        os << "value at theta=" << theta << " is not in the simplex (sum " << sum << ")";
        throw NotInSimplex(os.str());
    }
}

double clamp_small(double v) { return (v < 0.0 && v >= -kSimplexTol) ? 0.0 : v; }

// Trapezoid rule for f over [a, b] (a <= b <= 0) on the grid theta_k = -k * step. The value
// at the right end uses the left limit so a jump there does not leak into the integral.
template <class F>
double history_trapezoid(const History& h, double a, double b, double step, F&& f) {
    if (!(b > a)) return 0.0;
    std::vector<double> pts;
    pts.push_back(a);
    const auto k_hi = static_cast<long>(std::floor(-a / step - 1e-9));
    const auto k_lo = static_cast<long>(std::ceil(-b / step + 1e-9));
    for (long k = k_hi; k >= k_lo; --k) {
        const double th = -static_cast<double>(k) * step;
        if (th > a + 1e-12 * step && th < b - 1e-12 * step) pts.push_back(th);
    }
    pts.push_back(b);
    double sum = 0.0;
    double fa = f(pts[0], h(pts[0]));
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const bool last = i + 1 == pts.size();
        const double fb = f(pts[i], last ? h.left_limit(pts[i]) : h(pts[i]));
        sum += 0.5 * (pts[i] - pts[i - 1]) * (fa + fb);
        fa = fb;
    }
    return sum;
}

}  // namespace

ValidationReport validate_history(const ModelParams& params, const History& psi, double step) {
    params.validate();
    if (psi.span + 1e-12 < params.span()) throw SpanTooShort("history span below sigma + tau + kappa");
    const auto n = static_cast<long>(std::floor(psi.span / step + 1e-9));
    for (long k = 0; k <= n; ++k) {
        const double th = -static_cast<double>(k) * step;
        check_simplex(psi(th), th);
    }
    check_simplex(psi(-psi.span), -psi.span);
    check_simplex(psi.left_limit(0.0), 0.0);

    const double eps = params.eps();
    auto si = [](double, const State& v) { return v[kS] * v[kI]; };
    auto esi = [](double th, const State& v) { return std::exp(th) * v[kS] * v[kI]; };
    const double weighted = history_trapezoid(psi, -params.tau, 0.0, step, esi);
    const double plain = history_trapezoid(psi, -(params.tau + params.kappa), 0.0, step, si);

    const State v0 = psi(0.0);
    ValidationReport rep;
    rep.psi_I0 = clamp_small(v0[kI]);
    rep.psi_Q0 = clamp_small(v0[kQ]);
    rep.bound_I = params.r * params.p * weighted;
    rep.bound_Q = params.r * eps * plain;
    if (rep.psi_I0 < rep.bound_I) {
        rep.violations.push_back({"psi_I(0) >= r p int_{-tau}^0 e^theta psi_S psi_I", rep.psi_I0,
                                  rep.bound_I, rep.psi_I0 - rep.bound_I});
    }
    if (rep.psi_Q0 < rep.bound_Q) {
        rep.violations.push_back({"psi_Q(0) >= r eps int_{-tau-kappa}^0 psi_S psi_I", rep.psi_Q0,
                                  rep.bound_Q, rep.psi_Q0 - rep.bound_Q});
    }
    rep.valid = rep.violations.empty();
    return rep;
}

namespace {

History make_outbreak(const ModelParams& params, State at_zero) {
    State before(at_zero.size(), 0.0);
    before[kS] = 1.0;
    History h;
    h.span = params.span();
    h.dimension = at_zero.size();
    h.jumps = {0.0};
    h.evaluator = [before, at_zero](double theta) { return theta < 0.0 ? before : at_zero; };
    return h;
}

void check_fractions(double i0, double q0, double e0) {
    std::ostringstream os;
    if (!(i0 > 0.0)) {
        os << "i0=" << i0 << " must be positive";
        throw InvalidFractions(os.str());
    }
    if (!(q0 >= 0.0) || !(e0 >= 0.0) || i0 + q0 + e0 > 1.0 + kSimplexTol) {
        os << "fractions i0=" << i0 << " q0=" << q0 << " e0=" << e0 << " leave the simplex";
        throw InvalidFractions(os.str());
    }
}

}  // namespace

History outbreak_history(const ModelParams& params, double i0, double q0) {
    params.validate();
    check_fractions(i0, q0, 0.0);
    return make_outbreak(params, {1.0 - i0 - q0, i0, q0});
}

History seiq_outbreak_history(const ModelParams& params, double i0, double q0, double e0) {
    params.validate();
    check_fractions(i0, q0, e0);
    return make_outbreak(params, {1.0 - i0 - q0 - e0, i0, q0, e0});
}

double conserved_H(const ModelParams& params, const History& phi, double step) {
    params.validate();
    const double k = params.kappa;
    if (phi.span + 1e-12 < k) throw SpanTooShort("window shorter than kappa");
    const double r = params.r;
    const double integral =
        history_trapezoid(phi, -k, 0.0, step, [r](double, const State& v) { return (1.0 - r * v[kS]) * v[kI]; });
    return 1.0 - phi(0.0)[kS] - phi(-k)[kI] + integral;
}

std::pair<double, double> conserved_H_star(const ModelParams& params, const History& phi, double step) {
    params.validate();
    if (phi.dimension < 4) throw InvalidParams("conserved_H_star needs SEIQ data");
    const double k = params.kappa;
    const double s = params.sigma;
    if (phi.span + 1e-12 < s + k) throw SpanTooShort("window shorter than sigma + kappa");
    auto ii = [](double, const State& v) { return v[kI]; };
    auto si = [](double, const State& v) { return v[kS] * v[kI]; };
    const State v0 = phi(0.0);
    const double h1 = 1.0 - v0[kS] - v0[kE] - phi(-k)[kI] + history_trapezoid(phi, -k, 0.0, step, ii) -
                      params.r * history_trapezoid(phi, -s - k, -s, step, si);
    const double h2 = v0[kE] - params.r * history_trapezoid(phi, -s, 0.0, step, si);
    return {h1, h2};
}

double integrate_SI(const Trajectory& traj, double a, double b, double c0, double c1) {
    if (!(b > a)) return 0.0;
    if (a < -traj.span() - 1e-12 || b > traj.t_end() + 1e-12) throw SpanTooShort("window leaves the trajectory");
    double total = 0.0;
    const double h = traj.step();
    if (a < 0.0) {
        const double hi = std::min(b, 0.0);
        total += history_trapezoid(traj.history(), a, hi, h,
                                   [c0, c1](double, const State& v) { return (c0 + c1 * v[kS]) * v[kI]; });
    }
    if (b <= 0.0) return total;
    const double lo = std::max(a, 0.0);
    const double tol = 1e-9 * h;
    std::size_t k = traj.segment_of(lo);
    for (; k + 1 < traj.node_count(); ++k) {
        const double tk = traj.node_time(k);
        const double tk1 = traj.node_time(k + 1);
        if (tk >= b - tol) break;
        const double x0 = std::max(tk, lo);
        const double x1 = std::min(tk1, b);
        if (x1 - x0 <= tol) continue;
        const double* n0 = traj.node(k);
        const double* n1 = traj.node(k + 1);
        const double* d0 = traj.seg_start_derivative(k);
        const double* d1 = traj.seg_end_derivative(k);
        const double hk = tk1 - tk;
        if (x0 - tk <= tol && tk1 - x1 <= tol) {
            const double g0 = (c0 + c1 * n0[kS]) * n0[kI];
            const double g1 = (c0 + c1 * n1[kS]) * n1[kI];
            const double dg0 = c1 * d0[kS] * n0[kI] + (c0 + c1 * n0[kS]) * d0[kI];
            const double dg1 = c1 * d1[kS] * n1[kI] + (c0 + c1 * n1[kS]) * d1[kI];
            total += 0.5 * hk * (g0 + g1) + hk * hk / 12.0 * (dg0 - dg1);
        } else {
            // Partial segment: 4-point Gauss-Legendre on the interpolant.
            static const std::array<double, 4> gx = {-0.8611363115940526, -0.3399810435848563,
                                                     0.3399810435848563, 0.8611363115940526};
            static const std::array<double, 4> gw = {0.3478548451374538, 0.6521451548625461,
                                                     0.6521451548625461, 0.3478548451374538};
            const double mid = 0.5 * (x0 + x1);
            const double half = 0.5 * (x1 - x0);
            for (int q = 0; q < 4; ++q) {
                const double s = mid + half * gx[q] - tk;
                const double S = hermite(n0[kS], n1[kS], d0[kS], d1[kS], hk, s);
                const double I = hermite(n0[kI], n1[kI], d0[kI], d1[kI], hk, s);
                total += half * gw[q] * (c0 + c1 * S) * I;
            }
        }
    }
    return total;
}

double conserved_H(const ModelParams& params, const Trajectory& traj, double t) {
    const double k = params.kappa;
    if (t - k < -traj.span() - 1e-12) throw SpanTooShort("window [t - kappa, t] leaves the trajectory");
    return 1.0 - traj.sample_component(t, kS) - traj.sample_component(t - k, kI) +
           integrate_SI(traj, t - k, t, 1.0, -params.r);
}

std::pair<double, double> conserved_H_star(const ModelParams& params, const Trajectory& traj, double t) {
    if (traj.dimension() < 4) throw InvalidParams("conserved_H_star needs a SEIQ trajectory");
    const double k = params.kappa;
    const double s = params.sigma;
    if (t - s - k < -traj.span() - 1e-12) throw SpanTooShort("window leaves the trajectory");
    const double h1 = 1.0 - traj.sample_component(t, kS) - traj.sample_component(t, kE) -
                      traj.sample_component(t - k, kI) + integrate_SI(traj, t - k, t, 1.0, 0.0) -
                      params.r * integrate_SI(traj, t - s - k, t - s, 0.0, 1.0);
    const double h2 = traj.sample_component(t, kE) - params.r * integrate_SI(traj, t - s, t, 0.0, 1.0);
    return {h1, h2};
}

}  // namespace siq
