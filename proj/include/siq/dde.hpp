#pragma once

// Fixed-delay DDE integrator: method of steps, classical RK4 per step, cubic Hermite dense output.

#include <cstddef>
#include <functional>
#include <vector>

namespace siq {

using State = std::vector<double>;

struct DelaySpec {
    std::vector<double> delays;  // ascending, nonnegative, duplicates allowed
    std::size_t dimension = 0;

    double max_delay() const { return delays.empty() ? 0.0 : delays.back(); }
};

// Initial function on [-span, 0]. The evaluator is taken to be right-continuous at jump points,
// so evaluator(0) is the initial state even when the history jumps there.
struct History {
    double span = 0.0;
    std::size_t dimension = 0;
    std::function<State(double theta)> evaluator;
    std::vector<double> jumps;

    State operator()(double theta) const { return evaluator(theta); }
    bool is_jump(double theta, double tol = 1e-12) const;
    // Left limit at theta; differs from evaluator(theta) only at jump points.
    State left_limit(double theta) const;
};

History constant_history(const State& value, double span);

// lagged[j] is the state at t - delays[j] (in the order given by the DelaySpec).
using DelayedField =
    std::function<void(double t, const State& x, const std::vector<State>& lagged, State& dxdt)>;

class Trajectory {
public:
    double t0() const { return 0.0; }
    double t_end() const { return t_end_; }
    double step() const { return step_; }
    std::size_t dimension() const { return dim_; }
    std::size_t node_count() const { return n_nodes_; }
    double node_time(std::size_t k) const;
    // Pointer to the dim() components stored at node k.
    const double* node(std::size_t k) const { return &x_[k * dim_]; }
    State node_state(std::size_t k) const;
    // Derivative at the left end / right end of segment k (they differ at breakpoints).
    const double* seg_start_derivative(std::size_t k) const { return &d0_[k * dim_]; }
    const double* seg_end_derivative(std::size_t k) const { return &d1_[k * dim_]; }

    const History& history() const { return history_; }
    double span() const { return history_.span; }
    // Delays after snapping to the step grid, and the largest snapping correction applied.
    const std::vector<double>& snapped_delays() const { return snapped_; }
    double snap_error() const { return snap_error_; }

    // Index of the segment containing t (t in [0, t_end]).
    std::size_t segment_of(double t) const;
    State sample(double t) const;
    double sample_component(double t, std::size_t c) const;

private:
    friend Trajectory integrate(const DelayedField&, const DelaySpec&, const History&, double, double);

    double t_end_ = 0.0;
    double step_ = 0.0;
    std::size_t dim_ = 0;
    std::size_t n_nodes_ = 0;
    std::vector<double> x_;
    std::vector<double> d0_;
    std::vector<double> d1_;
    History history_;
    std::vector<double> snapped_;
    double snap_error_ = 0.0;
};

constexpr double kDefaultStep = 1e-3;

Trajectory integrate(const DelayedField& field, const DelaySpec& delays, const History& history,
                     double t_end, double step = kDefaultStep);

State sample(const Trajectory& traj, double t);

// Cubic Hermite interpolation on [0, h] at local coordinate s.
inline double hermite(double x0, double x1, double d0, double d1, double h, double s) {
    const double u = s / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1;
    const double h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2;
    const double h11 = u3 - u2;
    return h00 * x0 + h10 * h * d0 + h01 * x1 + h11 * h * d1;
}

}  // namespace siq
