#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "siq/dde.hpp"
#include "siq/errors.hpp"

using namespace siq;

namespace {

DelayedField unit_delay_field() {
    return [](double, const State&, const std::vector<State>& lag, State& dx) { dx[0] = -lag[0][0]; };
}

Trajectory unit_delay_run(double t_end, double step) {
    return integrate(unit_delay_field(), DelaySpec{{1.0}, 1}, constant_history({1.0}, 1.0), t_end, step);
}

}  // namespace

TEST_CASE("unit delay decay is exact on the first interval") {
    const Trajectory tr = unit_delay_run(1.0, 1e-3);
    CHECK(std::abs(tr.sample(1.0)[0]) <= 1e-9);
    CHECK(std::abs(tr.sample(0.5)[0] - 0.5) <= 1e-9);
    for (double t : {0.1234, 0.25, 0.777}) CHECK(std::abs(tr.sample(t)[0] - (1.0 - t)) <= 1e-9);
}

TEST_CASE("unit delay decay matches the method-of-steps series") {
    const Trajectory tr = unit_delay_run(6.0, 1e-3);
    for (double t : {1.5, 2.0, 3.3, 4.75, 6.0}) {
        CHECK(std::abs(tr.sample(t)[0] - oracle::unit_delay_decay(t)) <= 1e-9);
    }
}

TEST_CASE("fourth-order convergence between breakpoints") {
    // The error at t=1 vanishes (cubic interpolant reproduces the linear piece), so the order is
    // measured at t=6 where all pieces up to degree 6 are present.
    double prev = 0.0;
    for (double h : {0.1, 0.05, 0.025}) {
        const double err = std::abs(unit_delay_run(6.0, h).sample(6.0)[0] - oracle::unit_delay_decay(6.0));
        if (prev > 0.0) CHECK(prev / err >= 8.0);
        prev = err;
    }
}

TEST_CASE("zero field keeps the history value at 0") {
    const DelayedField zero = [](double, const State&, const std::vector<State>&, State& dx) {
        dx[0] = 0.0;
        dx[1] = 0.0;
    };
    History h;
    h.span = 2.0;
    h.dimension = 2;
    h.evaluator = [](double th) { return State{std::sin(th), th < 0.0 ? 5.0 : 0.25}; };
    h.jumps = {0.0};
    const Trajectory tr = integrate(zero, DelaySpec{{0.5, 2.0}, 2}, h, 5.0, 1e-2);
    CHECK(tr.sample(5.0)[0] == 0.0);
    CHECK(tr.sample(5.0)[1] == 0.25);
    CHECK(tr.sample(2.345)[1] == 0.25);
}

TEST_CASE("undelayed exponential decay") {
    const DelayedField f = [](double, const State& x, const std::vector<State>&, State& dx) { dx[0] = -x[0]; };
    const Trajectory tr = integrate(f, DelaySpec{{}, 1}, constant_history({1.0}, 0.0), 1.0, 1e-3);
    CHECK(std::abs(tr.sample(1.0)[0] - std::exp(-1.0)) <= 1e-7);
}

TEST_CASE("zero delay reads the current state") {
    const DelayedField f = [](double, const State&, const std::vector<State>& lag, State& dx) { dx[0] = -lag[0][0]; };
    const Trajectory tr = integrate(f, DelaySpec{{0.0}, 1}, constant_history({1.0}, 0.0), 1.0, 1e-3);
    CHECK(std::abs(tr.sample(1.0)[0] - std::exp(-1.0)) <= 1e-7);
}

TEST_CASE("sampling boundary identities") {
    History h;
    h.span = 1.0;
    h.dimension = 1;
    h.evaluator = [](double th) { return State{th < 0.0 ? 0.0 : 1.0}; };
    h.jumps = {0.0};
    const Trajectory tr = integrate(unit_delay_field(), DelaySpec{{1.0}, 1}, h, 2.0, 1e-3);
    CHECK(tr.sample(0.0)[0] == 1.0);
    CHECK(tr.sample(-0.5)[0] == 0.0);
    for (std::size_t k : {std::size_t{0}, std::size_t{1}, std::size_t{17}, std::size_t{999}, tr.node_count() - 1}) {
        const State s = tr.sample(tr.node_time(k));
        CHECK(s[0] == tr.node(k)[0]);
    }
    CHECK_THROWS_AS(tr.sample(2.0 + 1e-6), OutOfRange);
    CHECK_THROWS_AS(tr.sample(-1.0 - 1e-6), OutOfRange);
}

TEST_CASE("final partial step") {
    const Trajectory tr = unit_delay_run(0.4567, 0.1);
    CHECK(tr.t_end() == doctest::Approx(0.4567));
    CHECK(std::abs(tr.sample(0.4567)[0] - (1.0 - 0.4567)) <= 1e-12);
}

TEST_CASE("determinism") {
    const Trajectory a = unit_delay_run(5.0, 1e-2);
    const Trajectory b = unit_delay_run(5.0, 1e-2);
    REQUIRE(a.node_count() == b.node_count());
    for (std::size_t k = 0; k < a.node_count(); ++k) CHECK(a.node(k)[0] == b.node(k)[0]);
}

TEST_CASE("delays are snapped to the grid") {
    const Trajectory tr = integrate(unit_delay_field(), DelaySpec{{0.10004}, 1}, constant_history({1.0}, 0.2), 1.0, 1e-3);
    CHECK(tr.snapped_delays()[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(tr.snap_error() == doctest::Approx(4e-5).epsilon(1e-6));
}

TEST_CASE("integrator errors") {
    CHECK_THROWS_AS(integrate(unit_delay_field(), DelaySpec{{1e-4}, 1}, constant_history({1.0}, 1.0), 1.0, 1e-3),
                    DelayTooSmall);
    const DelayedField blowup = [](double, const State& x, const std::vector<State>&, State& dx) {
        dx[0] = x[0] * x[0];
    };
    CHECK_THROWS_AS(integrate(blowup, DelaySpec{{}, 1}, constant_history({1.0}, 0.0), 5.0, 1e-2), NonFiniteState);
    const DelayedField nan_field = [](double, const State&, const std::vector<State>&, State& dx) {
        dx[0] = std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_AS(integrate(nan_field, DelaySpec{{}, 1}, constant_history({1.0}, 0.0), 1.0, 1e-2), NonFiniteState);
}

TEST_CASE("history left limits") {
    History h;
    h.span = 1.0;
    h.dimension = 1;
    h.evaluator = [](double th) { return State{th < -0.5 ? 2.0 : 3.0}; };
    h.jumps = {-0.5};
    CHECK(h.is_jump(-0.5));
    CHECK_FALSE(h.is_jump(-0.4));
    CHECK(h.left_limit(-0.5)[0] == 2.0);
    CHECK(h(-0.5)[0] == 3.0);
}
