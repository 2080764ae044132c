#pragma once

// Test-side reference computations, written independently of the library code paths.

#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

// x'(t) = -x(t - 1), x = 1 on [-1, 0]: on [n - 1, n] the solution is
// sum_{k=0}^{n} (-1)^k (t - k + 1)^k / k!.
inline double unit_delay_decay(double t) {
    if (t <= 0.0) return 1.0;
    const int n = static_cast<int>(std::ceil(t));
    double s = 0.0, fact = 1.0;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) fact *= k;
        s += std::pow(-1.0, k) * std::pow(t - k + 1.0, k) / fact;
    }
    return s;
}

// Root of a continuous f on [a, b] with a sign change.
inline double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-14) {
    double fa = f(a);
    for (int i = 0; i < 200 && b - a > tol; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// SIQ characteristic function written out term by term.
inline std::complex<double> chi_siq(double r, double p, double tau, double kappa, double wS, double wI,
                                    std::complex<double> z) {
    const double eps = p * std::exp(-tau);
    const auto e_tau = std::exp(-tau * z);
    const auto e_tk = std::exp(-(tau + kappa) * z);
    const auto e_k = std::exp(-kappa * z);
    return z * (z + 1.0 - r * wS * (1.0 - eps * e_tau) + r * wI * (1.0 - eps * e_tk)) +
           r * wI * eps * e_tau * (1.0 - e_k);
}

// Zeros of an analytic f inside [x0, x1] x [y0, y1], counted by summing principal-branch
// argument increments over a fixed fine polygon.
inline int brute_winding(const std::function<std::complex<double>(std::complex<double>)>& f, double x0,
                         double x1, double y0, double y1, int n) {
    const std::complex<double> c[4] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    double total = 0.0;
    for (int side = 0; side < 4; ++side) {
        const auto a = c[side];
        const auto b = c[(side + 1) % 4];
        auto prev = f(a);
        for (int i = 1; i <= n; ++i) {
            const auto cur = f(a + (b - a) * (static_cast<double>(i) / n));
            total += std::arg(cur / prev);
            prev = cur;
        }
    }
    return static_cast<int>(std::lround(total / (2.0 * std::acos(-1.0))));
}

}  // namespace oracle
