#include "siq/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <thread>

#include "siq/equilibria.hpp"
#include "siq/errors.hpp"

namespace siq {

namespace {

constexpr double kPi = std::numbers::pi;

// (1 - e^{-z}) / z, continuous through z = 0.
cplx phi1(cplx z) {
    if (std::abs(z) < 1e-3) return 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0;
    return (1.0 - std::exp(-z)) / z;
}

struct ContourHit {};

}  // namespace

CharEq disease_free_chareq(const ModelParams& params, double q) {
    CharEq ce;
    ce.params = params;
    ce.w_S = 1.0 - q;
    ce.w_I = 0.0;
    ce.q = q;
    return ce;
}

CharEq endemic_chareq(const ModelParams& params, double q) {
    const double qc = q_critical(params.r, params.p, params.tau);
    CharEq ce;
    ce.params = params;
    ce.w_S = 1.0 - qc;
    ce.w_I = qc - q;
    ce.q = q;
    return ce;
}

CharEq seiq_disease_free_chareq(const ModelParams& params, double eta, double q) {
    CharEq ce;
    ce.kind = CharKind::SEIQ_DISEASE_FREE;
    ce.params = params;
    ce.w_S = 1.0 - q - eta;
    ce.w_I = 0.0;
    ce.q = q;
    ce.eta = eta;
    return ce;
}

cplx char_eval_deflated(const CharEq& ce, cplx lambda) {
    const double r = ce.params.r;
    const double eps = ce.params.eps();
    const double tau = ce.params.tau;
    const double kappa = ce.params.kappa;
    if (ce.kind == CharKind::SEIQ_DISEASE_FREE) {
        const double m = 1.0 - ce.q - ce.eta;
        return lambda + 1.0 -
               r * m * std::exp(-ce.params.sigma * lambda) * (1.0 - eps * std::exp(-tau * lambda));
    }
    const cplx et = std::exp(-tau * lambda);
    const cplx etk = std::exp(-(tau + kappa) * lambda);
    return lambda + 1.0 - r * ce.w_S * (1.0 - eps * et) + r * ce.w_I * (1.0 - eps * etk) +
           r * ce.w_I * eps * et * kappa * phi1(lambda * kappa);
}

cplx char_eval(const CharEq& ce, cplx lambda) {
    if (ce.kind == CharKind::SEIQ_DISEASE_FREE) return lambda * lambda * char_eval_deflated(ce, lambda);
    const double r = ce.params.r;
    const double eps = ce.params.eps();
    const double tau = ce.params.tau;
    const double kappa = ce.params.kappa;
    const cplx et = std::exp(-tau * lambda);
    const cplx etk = std::exp(-(tau + kappa) * lambda);
    return lambda * (lambda + 1.0 - r * ce.w_S * (1.0 - eps * et) + r * ce.w_I * (1.0 - eps * etk)) +
           r * ce.w_I * eps * et * (1.0 - std::exp(-lambda * kappa));
}

Box default_box(const CharEq& ce) {
    const auto& p = ce.params;
    Box b;
    b.re_min = 1e-8;
    b.re_max = std::max(10.0, p.r);
    const double longest = std::max({p.kappa, p.tau, p.sigma, 1.0});
    b.im_max = std::max(4.0 * kPi / longest, 20.0 * kPi);
    return b;
}

std::string SpectralReport::label() const {
    switch (classification) {
        case Stability::Stable:
            return "stable";
        case Stability::Marginal:
            return "marginal";
        case Stability::Unstable:
            return "unstable(" + std::to_string(unstable_count) + ")";
    }
    return "unknown";
}

namespace {

constexpr double kZeroTol = 1e-12;

// Argument increment of f along [z0, z1], bisecting wherever the phase moves too fast.
double arg_increment(const CharEq& ce, cplx z0, cplx z1, cplx f0, cplx f1, int depth) {
    const double d = std::arg(f1 / f0);
    if (std::abs(d) <= kPi / 3.0 || depth >= 48) return d;
    const cplx zm = 0.5 * (z0 + z1);
    const cplx fm = char_eval_deflated(ce, zm);
    if (std::abs(fm) < kZeroTol) throw ContourHit{};
    return arg_increment(ce, z0, zm, f0, fm, depth + 1) + arg_increment(ce, zm, z1, fm, f1, depth + 1);
}

struct Rect {
    double x0, x1, y0, y1;
};

double rect_winding(const CharEq& ce, const Rect& R, int n) {
    const cplx corners[4] = {{R.x0, R.y0}, {R.x1, R.y0}, {R.x1, R.y1}, {R.x0, R.y1}};
    double total = 0.0;
    for (int side = 0; side < 4; ++side) {
        const cplx a = corners[side];
        const cplx c = corners[(side + 1) % 4];
        cplx z0 = a;
        cplx f0 = char_eval_deflated(ce, z0);
        if (std::abs(f0) < kZeroTol) throw ContourHit{};
        for (int k = 1; k <= n; ++k) {
            const cplx z1 = a + (c - a) * (static_cast<double>(k) / n);
            const cplx f1 = char_eval_deflated(ce, z1);
            if (std::abs(f1) < kZeroTol) throw ContourHit{};
            total += arg_increment(ce, z0, z1, f0, f1, 0);
            z0 = z1;
            f0 = f1;
        }
    }
    return total / (2.0 * kPi);
}

double winding_at(const CharEq& ce, const Box& b, int n) {
    return rect_winding(ce, Rect{b.re_min, b.re_max, -b.im_max, b.im_max}, n);
}

int winding_stable(const CharEq& ce, const Box& b, const CountOptions& opt) {
    int n = opt.initial_samples;
    int last = 0;
    int agree = 0;
    bool have = false;
    while (true) {
        const double w = winding_at(ce, b, n);
        const long rounded = std::lround(w);
        const bool integral = std::abs(w - static_cast<double>(rounded)) < 0.05;
        if (integral && have && rounded == last) {
            ++agree;
        } else {
            agree = 0;
        }
        if (integral) {
            last = static_cast<int>(rounded);
            have = true;
        }
        if (agree >= 2) return last;
        if (n >= opt.max_samples) {
            if (have) return last;
            throw NumericalError("winding number did not settle");
        }
        n *= 2;
    }
}

}  // namespace

int winding_count(const CharEq& ce, const Box& box, const CountOptions& opt) {
    Box b = box;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        try {
            return winding_stable(ce, b, opt);
        } catch (const ContourHit&) {
            // Perturb: push the outer sides out and nudge the left side right.
            b.re_max += 1e-6;
            b.im_max += 1e-6;
            b.re_min += 1e-6 * 1e-2;
        }
    }
    std::ostringstream os;
    os << "characteristic function vanishes on the contour Re in [" << box.re_min << ", " << box.re_max
       << "], |Im| <= " << box.im_max;
    throw ContourThroughZero(os.str());
}

cplx newton_root(const CharEq& ce, cplx z, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
        const cplx f = char_eval_deflated(ce, z);
        const double hs = 1e-6 * std::max(1.0, std::abs(z));
        const cplx df = (char_eval_deflated(ce, z + hs) - char_eval_deflated(ce, z - hs)) / (2.0 * hs);
        if (std::abs(df) == 0.0) break;
        const cplx dz = f / df;
        z -= dz;
        if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    return z;
}

namespace {

int rect_count(const CharEq& ce, const Rect& R) {
    int prev = -1;
    for (int n = 64; n <= 4096; n *= 2) {
        const long w = std::lround(rect_winding(ce, R, n));
        if (w == prev) return static_cast<int>(w);
        prev = static_cast<int>(w);
    }
    return prev;
}

bool inside(const Rect& R, cplx z, double slack) {
    return z.real() >= R.x0 - slack && z.real() <= R.x1 + slack && z.imag() >= R.y0 - slack &&
           z.imag() <= R.y1 + slack;
}

void add_root(std::vector<cplx>& roots, cplx z) {
    for (const cplx& w : roots) {
        if (std::abs(w - z) < 1e-8 * std::max(1.0, std::abs(z))) return;
    }
    roots.push_back(z);
}

void locate_rect(const CharEq& ce, const Rect& R, int count, int depth, std::vector<cplx>& roots) {
    if (count <= 0) return;
    const double size = std::max(R.x1 - R.x0, R.y1 - R.y0);
    if (count == 1 || size < 1e-7 || depth > 40) {
        const cplx guess(0.5 * (R.x0 + R.x1), 0.5 * (R.y0 + R.y1));
        const cplx z = newton_root(ce, guess);
        if (inside(R, z, 1e-9 * std::max(1.0, size)) && std::abs(char_eval(ce, z)) <= 1e-10) {
            add_root(roots, z);
            if (count == 1 || size < 1e-7 || depth > 40) return;
        }
        if (size < 1e-7 || depth > 40) return;
    }
    const double xm = 0.5 * (R.x0 + R.x1);
    const double ym = 0.5 * (R.y0 + R.y1);
    const Rect parts[4] = {{R.x0, xm, R.y0, ym}, {xm, R.x1, R.y0, ym}, {R.x0, xm, ym, R.y1}, {xm, R.x1, ym, R.y1}};
    for (const Rect& P : parts) {
        int c = 0;
        try {
            c = rect_count(ce, P);
        } catch (const ContourHit&) {
            // A root sits on this sub-boundary; Newton from the parent centre usually finds it.
            const cplx z = newton_root(ce, cplx(0.5 * (P.x0 + P.x1), 0.5 * (P.y0 + P.y1)));
            if (std::abs(char_eval(ce, z)) <= 1e-10 && inside(R, z, 1e-9)) add_root(roots, z);
            continue;
        }
        locate_rect(ce, P, c, depth + 1, roots);
    }
}

}  // namespace

std::vector<double> imaginary_axis_zeros(const CharEq& ce, double omega_min, double omega_max, double tol) {
    std::vector<double> zeros;
    if (!(omega_max > omega_min)) return zeros;
    const auto& p = ce.params;
    const double longest = std::max({p.kappa + p.tau, p.sigma + p.tau, 1.0});
    const double dw = std::min(0.01, 0.05 / longest);
    auto mag = [&](double w) { return std::abs(char_eval_deflated(ce, cplx(0.0, w))); };
    const auto n = static_cast<long>(std::ceil((omega_max - omega_min) / dw));
    double w_prev = omega_min;
    double m_prev = mag(w_prev);
    double w_cur = omega_min + dw;
    double m_cur = mag(w_cur);
    for (long k = 2; k <= n + 1; ++k) {
        const double w_next = std::min(omega_min + static_cast<double>(k) * dw, omega_max + dw);
        const double m_next = mag(w_next);
        if (m_cur <= m_prev && m_cur <= m_next) {
            // Golden-section refinement of the local minimum.
            double a = w_prev, b = w_next;
            const double g = (std::sqrt(5.0) - 1.0) / 2.0;
            double c = b - g * (b - a), d = a + g * (b - a);
            double fc = mag(c), fd = mag(d);
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
                if (fc < fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - g * (b - a);
                    fc = mag(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + g * (b - a);
                    fd = mag(d);
                }
            }
            const double wm = 0.5 * (a + b);
            if (mag(wm) <= tol && wm > omega_min && wm <= omega_max) {
                if (zeros.empty() || std::abs(zeros.back() - wm) > 1e-9) zeros.push_back(wm);
            }
        }
        w_prev = w_cur;
        m_prev = m_cur;
        w_cur = w_next;
        m_cur = m_next;
    }
    return zeros;
}

SpectralReport count_unstable(const CharEq& ce, const Box& box, const CountOptions& opt) {
    SpectralReport rep;
    rep.box = box;
    rep.unstable_count = winding_count(ce, box, opt);
    if (opt.locate_roots && rep.unstable_count > 0) {
        std::vector<cplx> roots;
        const Rect R{box.re_min, box.re_max, -box.im_max, box.im_max};
        try {
            locate_rect(ce, R, rep.unstable_count, 0, roots);
        } catch (const ContourHit&) {
        }
        std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
            return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag();
        });
        rep.roots = roots;
    }
    if (rep.unstable_count > 0) {
        rep.classification = Stability::Unstable;
    } else if (opt.check_marginal && !imaginary_axis_zeros(ce, 1e-6, box.im_max).empty()) {
        rep.classification = Stability::Marginal;
    } else {
        rep.classification = Stability::Stable;
    }
    return rep;
}

SpectralReport count_unstable(const CharEq& ce, const CountOptions& opt) {
    return count_unstable(ce, default_box(ce), opt);
}

std::pair<cplx, cplx> strong_spectrum_tau0(double r, double p, double q) {
    const double qc = q_critical(r, p, 0.0);
    const double w = qc - q;
    const double b = r * (1.0 - p) * w;
    const cplx root = std::sqrt(cplx(w * (r * r * (1.0 - p) * (1.0 - p) * w - 4.0 * p), 0.0));
    return {0.5 * (-b + root), 0.5 * (-b - root)};
}

AsymptoticSpectrum asymptotic_spectrum_tau0(double r, double p, double q) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidParams("asymptotic spectrum needs 0 < p < 1");
    const double qc = q_critical(r, p, 0.0);
    if (!(q < qc)) throw InvalidParams("asymptotic spectrum needs q < q_c");
    const double w = qc - q;
    const double pc = critical_probability(r);
    AsymptoticSpectrum a;
    const double num = 1.0 - r * (1.0 - p + (p - 2.0) * qc - q);
    const double prw = p * r * w;
    a.h = (num / prw) * (num / prw) - 2.0 / prw - 1.0;
    const double aa = pc - p + (p - 3.0) * qc;
    a.discriminant = (aa + p) * (aa + p) - (1.0 - p * p) * aa * aa;
    if (a.discriminant >= 0.0) {
        const double s = std::sqrt(a.discriminant);
        const double lo = qc - (aa + p + s) / (1.0 - p * p);
        const double hi = qc - (aa + p - s) / (1.0 - p * p);
        a.q_h = std::make_pair(lo, hi);
    }
    // Y solves chi(lambda) = 0 for e^{-lambda kappa} at tau = 0, where Lambda = eps = p.
    const double rw = r * w;
    a.Y = [rw, p](cplx lam) { return (lam * lam + rw * lam + rw * p) / (rw * p * (lam + 1.0)); };
    const auto Y = a.Y;
    a.gamma = [Y](double omega) { return -0.5 * std::log(std::norm(Y(cplx(0.0, omega)))); };
    return a;
}

namespace {

CountOptions scan_options() {
    CountOptions o;
    o.locate_roots = false;
    o.check_marginal = false;
    return o;
}

int scan_count(const CharEq& ce) { return count_unstable(ce, scan_options()).unstable_count; }

// Solves chi(i omega; family(kappa)) = 0 for (omega, kappa) by Newton from (w, k).
bool refine_crossing(const ChareqFamily& family, double& w, double& k) {
    for (int it = 0; it < 50; ++it) {
        const cplx f = char_eval(family(k), cplx(0.0, w));
        if (std::abs(f) < 1e-14) return true;
        const double hw = 1e-7 * std::max(1.0, std::abs(w));
        const double hk = 1e-7 * std::max(1.0, std::abs(k));
        const cplx fw = (char_eval(family(k), cplx(0.0, w + hw)) - char_eval(family(k), cplx(0.0, w - hw))) /
                        (2.0 * hw);
        const cplx fk = (char_eval(family(k + hk), cplx(0.0, w)) - char_eval(family(k - hk), cplx(0.0, w))) /
                        (2.0 * hk);
        const double det = fw.real() * fk.imag() - fk.real() * fw.imag();
        if (det == 0.0) return false;
        const double dw = (f.real() * fk.imag() - fk.real() * f.imag()) / det;
        const double dk = (fw.real() * f.imag() - f.real() * fw.imag()) / det;
        w -= dw;
        k -= dk;
        if (std::abs(dw) < 1e-15 && std::abs(dk) < 1e-15) break;
    }
    return std::abs(char_eval(family(k), cplx(0.0, w))) < 1e-10;
}

}  // namespace

std::vector<HopfData> kappa_crossings(const ChareqFamily& family, double kappa_min, double kappa_max,
                                      std::size_t max_crossings, double scan_step, double bisect_tol) {
    std::vector<HopfData> out;
    int prev = scan_count(family(kappa_min));
    double k_prev = kappa_min;
    const auto n = static_cast<long>(std::ceil((kappa_max - kappa_min) / scan_step - 1e-9));
    for (long i = 1; i <= n && out.size() < max_crossings; ++i) {
        const double k = std::min(kappa_min + static_cast<double>(i) * scan_step, kappa_max);
        const int c = scan_count(family(k));
        if (c != prev) {
            double lo = k_prev, hi = k;
            while (hi - lo > bisect_tol) {
                const double mid = 0.5 * (lo + hi);
                const int cm = scan_count(family(mid));
                if (cm == prev) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            HopfData hd;
            hd.count_before = prev;
            hd.count_after = c;
            hd.kappa_0 = 0.5 * (lo + hi);
            // The crossing pair is the located root closest to the imaginary axis at hi.
            CountOptions loc;
            loc.check_marginal = false;
            const SpectralReport rep = count_unstable(family(hi), loc);
            double best_re = 1e300;
            double omega = 0.0;
            for (const cplx& z : rep.roots) {
                if (z.imag() >= 0.0 && z.real() < best_re) {
                    best_re = z.real();
                    omega = z.imag();
                }
            }
            double w = omega, kk = hd.kappa_0;
            if (omega > 0.0 && refine_crossing(family, w, kk) && std::abs(kk - hd.kappa_0) <= 2.0 * bisect_tol) {
                hd.kappa_0 = kk;
                hd.Omega = std::abs(w);
            } else {
                hd.Omega = omega;
            }
            hd.residual = std::abs(char_eval(family(hd.kappa_0), cplx(0.0, hd.Omega)));
            out.push_back(hd);
            prev = c;
        }
        k_prev = k;
    }
    return out;
}

std::optional<HopfData> hopf_kappa0(const ChareqFamily& family, double kappa_max) {
    const auto cr = kappa_crossings(family, 0.0, kappa_max, 1);
    if (cr.empty()) return std::nullopt;
    return cr.front();
}

std::optional<HopfData> hopf_kappa0(double r, double p, double tau, double q, double kappa_max) {
    const double qc = q_critical(r, p, tau);
    if (!(q < qc)) throw InvalidParams("hopf_kappa0 needs q < q_c");
    ModelParams base{r, p, tau, 0.0, 0.0};
    base.validate();
    return hopf_kappa0(
        [base, q](double kappa) {
            ModelParams mp = base;
            mp.kappa = kappa;
            return endemic_chareq(mp, q);
        },
        kappa_max);
}

double hopf_sequence(const HopfData& hopf, int m) {
    return hopf.kappa_0 + 2.0 * kPi * static_cast<double>(m) / hopf.Omega;
}

std::pair<double, double> e0_hopf_bound(double r, double p, double tau) {
    const double eps = p * std::exp(-tau);
    if (!(eps < 1.0)) throw EpsNotBelowOne("eps must be below 1");
    const double d = 1.0 - eps * eps;
    return {1.0 - (1.0 / r) / d, eps * eps / d};
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("SIQ_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

StabilityMap stability_map(double r, double p, double tau, const std::vector<double>& q_grid,
                           const std::vector<double>& kappa_grid, unsigned threads) {
    StabilityMap m;
    m.q_grid = q_grid;
    m.kappa_grid = kappa_grid;
    const std::size_t cells = q_grid.size() * kappa_grid.size();
    m.counts.assign(cells, kUnknownCell);
    std::vector<std::string> errs(cells);
    if (threads == 0) threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(cells, 1)));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < cells; i = next++) {
            const std::size_t iq = i / kappa_grid.size();
            const std::size_t ik = i % kappa_grid.size();
            try {
                ModelParams mp{r, p, tau, kappa_grid[ik], 0.0};
                mp.validate();
                m.counts[i] = scan_count(endemic_chareq(mp, q_grid[iq]));
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "q=" << q_grid[iq] << " kappa=" << kappa_grid[ik] << ": " << e.what();
                errs[i] = os.str();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errs) {
        if (!e.empty()) m.errors.push_back(e);
    }
    return m;
}

}  // namespace siq
