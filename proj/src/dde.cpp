#include "siq/dde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "siq/errors.hpp"

namespace siq {

bool History::is_jump(double theta, double tol) const {
    for (double j : jumps) {
        if (std::abs(theta - j) <= tol) return true;
    }
    return false;
}

State History::left_limit(double theta) const {
    if (!is_jump(theta)) return evaluator(theta);
    return evaluator(std::nextafter(theta, -std::numeric_limits<double>::infinity()));
}

History constant_history(const State& value, double span) {
    History h;
    h.span = span;
    h.dimension = value.size();
    h.evaluator = [value](double) { return value; };
    return h;
}

double Trajectory::node_time(std::size_t k) const {
    if (k + 1 >= n_nodes_) return t_end_;
    return static_cast<double>(k) * step_;
}

State Trajectory::node_state(std::size_t k) const {
    return State(node(k), node(k) + dim_);
}

std::size_t Trajectory::segment_of(double t) const {
    const std::size_t n_seg = n_nodes_ - 1;
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t / step_)));
    if (k >= n_seg) k = n_seg - 1;
    // floor(t / h) can land one segment off when t sits on a node.
    while (k > 0 && t < node_time(k)) --k;
    while (k + 1 < n_seg && t >= node_time(k + 1)) ++k;
    return k;
}

double Trajectory::sample_component(double t, std::size_t c) const {
    const double tol = 1e-12 * std::max(1.0, std::abs(t_end_));
    if (t < -history_.span - tol || t > t_end_ + tol) {
        std::ostringstream os;
        os << "t=" << t << " outside [" << -history_.span << ", " << t_end_ << "]";
        throw OutOfRange(os.str());
    }
    if (t < 0.0) return history_(t)[c];
    if (t >= t_end_) return node(n_nodes_ - 1)[c];
    const std::size_t k = segment_of(t);
    const double tk = node_time(k);
    if (t == tk) return node(k)[c];
    const double tk1 = node_time(k + 1);
    if (t == tk1) return node(k + 1)[c];
    return hermite(node(k)[c], node(k + 1)[c], seg_start_derivative(k)[c], seg_end_derivative(k)[c],
                   tk1 - tk, t - tk);
}

State Trajectory::sample(double t) const {
    State out(dim_);
    if (t < 0.0 && t >= -history_.span - 1e-12) return history_(t);
    for (std::size_t c = 0; c < dim_; ++c) out[c] = sample_component(t, c);
    return out;
}

State sample(const Trajectory& traj, double t) { return traj.sample(t); }

Trajectory integrate(const DelayedField& field, const DelaySpec& spec, const History& history,
                     double t_end, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw InvalidParams("step must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidParams("t_end must be positive");
    if (spec.dimension == 0 || history.dimension != spec.dimension)
        throw InvalidParams("history dimension does not match the field dimension");
    if (!std::is_sorted(spec.delays.begin(), spec.delays.end()))
        throw InvalidParams("delays must be sorted ascending");

    const std::size_t dim = spec.dimension;
    const std::size_t nd = spec.delays.size();

    Trajectory traj;
    traj.step_ = step;
    traj.dim_ = dim;
    traj.history_ = history;

    std::vector<long> lag(nd);
    for (std::size_t j = 0; j < nd; ++j) {
        const double d = spec.delays[j];
        if (d < 0.0 || !std::isfinite(d)) throw InvalidParams("delays must be nonnegative");
        if (d > 0.0 && d < step) {
            std::ostringstream os;
            os << "delay " << d << " is below the step " << step;
            throw DelayTooSmall(os.str());
        }
        if (d > history.span + 0.5 * step + 1e-12) throw InvalidParams("history span shorter than the largest delay");
        lag[j] = std::lround(d / step);
        const double snapped = static_cast<double>(lag[j]) * step;
        traj.snapped_.push_back(snapped);
        traj.snap_error_ = std::max(traj.snap_error_, std::abs(snapped - d));
    }

    auto n_full = static_cast<std::size_t>(std::floor(t_end / step + 1e-9));
    double rem = t_end - static_cast<double>(n_full) * step;
    std::size_t n_seg = n_full;
    if (rem > 1e-9 * step) ++n_seg;
    if (n_seg == 0) n_seg = 1;
    traj.t_end_ = t_end;
    traj.n_nodes_ = n_seg + 1;
    traj.x_.assign(traj.n_nodes_ * dim, 0.0);
    traj.d0_.assign(n_seg * dim, 0.0);
    traj.d1_.assign(n_seg * dim, 0.0);

    const State x0 = history(0.0);
    if (x0.size() != dim) throw InvalidParams("history evaluator returned a state of wrong size");
    std::copy(x0.begin(), x0.end(), traj.x_.begin());

    // State at grid position (k + frac) * step. Positions at or below zero come from the history.
    auto eval_at = [&](long k, double frac, bool left, State& out) {
        if (k >= 0 && (k > 0 || frac > 0.0 || !left)) {
            const auto ku = static_cast<std::size_t>(k);
            const double* a = &traj.x_[ku * dim];
            if (frac == 0.0) {
                std::copy(a, a + dim, out.begin());
                return;
            }
            const double* b = &traj.x_[(ku + 1) * dim];
            const double* da = &traj.d0_[ku * dim];
            const double* db = &traj.d1_[ku * dim];
            const double hk = traj.node_time(ku + 1) - traj.node_time(ku);
            const double s = frac * step;
            for (std::size_t c = 0; c < dim; ++c) out[c] = hermite(a[c], b[c], da[c], db[c], hk, s);
            return;
        }
        const double theta = (static_cast<double>(k) + frac) * step;
        out = left ? history.left_limit(theta) : history(theta);
    };

    std::vector<State> lagged(nd, State(dim));
    State x(dim), y(dim), k1(dim), k2(dim), k3(dim), k4(dim), dend(dim);

    auto fill_lagged = [&](long n, double frac, bool left, const State& current) {
        for (std::size_t j = 0; j < nd; ++j) {
            if (lag[j] == 0) {
                lagged[j] = current;
            } else {
                long k = n - lag[j];
                double f = frac;
                if (f >= 1.0) {
                    k += 1;
                    f = 0.0;
                }
                eval_at(k, f, left, lagged[j]);
            }
        }
    };

    for (std::size_t n = 0; n < n_seg; ++n) {
        const double tn = traj.node_time(n);
        const double hn = traj.node_time(n + 1) - tn;
        const double ratio = hn / step;
        const auto ln = static_cast<long>(n);
        std::copy(&traj.x_[n * dim], &traj.x_[n * dim] + dim, x.begin());

        fill_lagged(ln, 0.0, false, x);
        field(tn, x, lagged, k1);

        for (std::size_t c = 0; c < dim; ++c) y[c] = x[c] + 0.5 * hn * k1[c];
        fill_lagged(ln, 0.5 * ratio, false, y);
        field(tn + 0.5 * hn, y, lagged, k2);

        for (std::size_t c = 0; c < dim; ++c) y[c] = x[c] + 0.5 * hn * k2[c];
        fill_lagged(ln, 0.5 * ratio, false, y);
        field(tn + 0.5 * hn, y, lagged, k3);

        const double end_frac = (n + 1 < n_seg || rem <= 1e-9 * step) ? 1.0 : ratio;
        for (std::size_t c = 0; c < dim; ++c) y[c] = x[c] + hn * k3[c];
        fill_lagged(ln, end_frac, true, y);
        field(tn + hn, y, lagged, k4);

        double* xn1 = &traj.x_[(n + 1) * dim];
        for (std::size_t c = 0; c < dim; ++c) {
            xn1[c] = x[c] + hn / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            if (!std::isfinite(xn1[c])) {
                std::ostringstream os;
                os << "component " << c << " non-finite at t=" << tn + hn;
                throw NonFiniteState(os.str());
            }
        }

        State xe(xn1, xn1 + dim);
        fill_lagged(ln, end_frac, true, xe);
        field(tn + hn, xe, lagged, dend);
        std::copy(k1.begin(), k1.end(), &traj.d0_[n * dim]);
        std::copy(dend.begin(), dend.end(), &traj.d1_[n * dim]);
    }
    return traj;
}

}  // namespace siq
