#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "siq/equilibria.hpp"
#include "siq/errors.hpp"
#include "siq/spectral.hpp"

using namespace siq;

namespace {

const double kPi = std::acos(-1.0);

cplx random_lambda(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    return {U(gen), U(gen)};
}

// Hopf point of the line point at tau = 0 from |A(i w)| = |B(i w)|, chi = A + B e^{-lambda kappa}.
struct HopfOracle {
    double omega;
    double kappa0;
};

HopfOracle hopf_tau0_oracle(double r, double p, double q) {
    const double qc = 1.0 - 1.0 / (r * (1.0 - p));
    const double a = r * (qc - q) * p;
    const double b = r * (qc - q);
    const double w = std::sqrt(2.0 * a + a * a - b * b);
    const cplx lam(0.0, w);
    const cplx A = lam * (lam + b) + a;
    const cplx B = -a * (lam + 1.0);
    double k = -std::arg(-A / B) / w;
    const double period = 2.0 * kPi / w;
    while (k <= 0.0) k += period;
    return {w, k};
}

}  // namespace

TEST_CASE("char_eval matches the term-by-term oracle") {
    std::mt19937_64 gen(5);
    const ModelParams mp{2.5, 0.5, 0.4, 3.0, 0.0};
    const CharEq ce = endemic_chareq(mp, 0.05);
    for (int i = 0; i < 20; ++i) {
        const cplx z = random_lambda(gen);
        const cplx ref = oracle::chi_siq(mp.r, mp.p, mp.tau, mp.kappa, ce.w_S, ce.w_I, z);
        CHECK(std::abs(char_eval(ce, z) - ref) <= 1e-12 * (1.0 + std::abs(ref)));
    }
}

TEST_CASE("zero is always a root") {
    const ModelParams mp{2.5, 0.5, 0.4, 3.0, 0.0};
    CHECK(std::abs(char_eval(disease_free_chareq(mp, 0.1), 0.0)) == 0.0);
    CHECK(std::abs(char_eval(endemic_chareq(mp, 0.1), 0.0)) == 0.0);
    const ModelParams sp{2.5, 0.5, 0.4, 3.0, 1.0};
    CHECK(std::abs(char_eval(seiq_disease_free_chareq(sp, 0.05, 0.1), 0.0)) == 0.0);
}

TEST_CASE("disease-free factor at q = 1 - 1/r") {
    std::mt19937_64 gen(9);
    const ModelParams mp{2.5, 0.7, 0.3, 2.0, 0.0};
    const CharEq ce = disease_free_chareq(mp, 1.0 - 1.0 / mp.r);
    for (int i = 0; i < 20; ++i) {
        const cplx z = random_lambda(gen);
        const cplx ref = z * (z + mp.eps() * std::exp(-mp.tau * z));
        CHECK(std::abs(char_eval(ce, z) - ref) <= 1e-12 * (1.0 + std::abs(ref)));
    }
}

TEST_CASE("endemic characteristic function at kappa = 0") {
    std::mt19937_64 gen(13);
    const ModelParams mp{2.5, 0.5, 0.4, 0.0, 0.0};
    const double q = 0.1;
    const double qc = q_critical(mp.r, mp.p, mp.tau);
    const CharEq ce = endemic_chareq(mp, q);
    for (int i = 0; i < 20; ++i) {
        const cplx z = random_lambda(gen);
        const cplx ref = z * (z + 1.0 - mp.r * (1.0 - q - 2.0 * (qc - q)) * (1.0 - mp.eps() * std::exp(-mp.tau * z)));
        CHECK(std::abs(char_eval(ce, z) - ref) <= 1e-12 * (1.0 + std::abs(ref)));
    }
}

TEST_CASE("disease-free root counts") {
    const ModelParams mp{2.5, 0.5, 0.5, 2.0, 0.0};
    const double qc = q_critical(mp.r, mp.p, mp.tau);
    CHECK(count_unstable(disease_free_chareq(mp, qc + 0.05)).unstable_count == 0);
    const SpectralReport rep = count_unstable(disease_free_chareq(mp, qc - 0.05));
    CHECK(rep.unstable_count == 1);
    REQUIRE(rep.roots.size() == 1);
    CHECK(std::abs(rep.roots[0].imag()) <= 1e-10);
    const double eps = mp.eps();
    const double rq = mp.r * (1.0 - (qc - 0.05));
    const double root = oracle::bisect(
        [&](double x) { return x + 1.0 - rq * (1.0 - eps * std::exp(-mp.tau * x)); }, 1e-9, 10.0);
    CHECK(rep.roots[0].real() == doctest::Approx(root).epsilon(1e-9));
    CHECK(rep.label() == "unstable(1)");
}

TEST_CASE("endemic at tau = kappa = 0 is stable") {
    const ModelParams mp{2.5, 0.5, 0.0, 0.0, 0.0};
    for (double q : {0.0, 0.05, 0.15}) {
        const SpectralReport rep = count_unstable(endemic_chareq(mp, q));
        CHECK(rep.unstable_count == 0);
        CHECK(rep.classification == Stability::Stable);
    }
}

TEST_CASE("winding count agrees with a brute-force polygon count") {
    for (double kappa : {2.0, 12.0, 22.0}) {
        const ModelParams mp{2.5, 0.5, 0.0, kappa, 0.0};
        const CharEq ce = endemic_chareq(mp, 0.0);
        const Box b = default_box(ce);
        const int brute = oracle::brute_winding([&](cplx z) { return char_eval(ce, z) / z; }, b.re_min, b.re_max,
                                                -b.im_max, b.im_max, 200000);
        CHECK(winding_count(ce, b) == brute);
    }
}

TEST_CASE("a contour through a root is perturbed, not miscounted") {
    const ModelParams mp{2.5, 0.5, 0.5, 2.0, 0.0};
    const CharEq ce = disease_free_chareq(mp, 0.1);
    const SpectralReport rep = count_unstable(ce);
    REQUIRE(rep.roots.size() == 1);
    Box b = default_box(ce);
    b.re_max = rep.roots[0].real();
    const int n = winding_count(ce, b);
    CHECK((n == 0 || n == 1));
}

TEST_CASE("strong spectrum at tau = 0") {
    const auto [lp, lm] = strong_spectrum_tau0(2.5, 0.5, 0.0);
    CHECK(lp.real() == doctest::Approx(-0.125));
    CHECK(std::abs(lp.imag()) == doctest::Approx(0.290474).epsilon(1e-6));
    CHECK(lm == std::conj(lp));
    const double qc = q_critical(2.5, 0.5, 0.0);
    const auto [a, b] = strong_spectrum_tau0(2.5, 0.5, qc - 1e-12);
    CHECK(std::abs(a) <= 1e-5);
    CHECK(std::abs(b) <= 1e-5);
    for (int i = 0; i < 100; ++i) {
        const double q = qc * i / 100.0;
        const auto [x, y] = strong_spectrum_tau0(2.5, 0.5, q);
        CHECK(x.real() < 0.0);
        CHECK(y.real() < 0.0);
    }
}

TEST_CASE("asymptotic spectrum at tau = 0") {
    const AsymptoticSpectrum as = asymptotic_spectrum_tau0(2.5, 0.5, 0.0);
    CHECK(as.h == doctest::Approx(-5.0));
    CHECK_FALSE(as.q_h.has_value());
    CHECK(as.discriminant == doctest::Approx(-0.11));
    CHECK(std::abs(as.gamma(0.0)) <= 1e-12);
    for (double r : {1.5, 2.5, 4.0}) {
        for (double p : {0.2, 0.5, 0.8}) {
            const double qc = q_critical(r, p, 0.0);
            if (qc <= 0.0) continue;
            CHECK(std::abs(asymptotic_spectrum_tau0(r, p, 0.5 * qc).gamma(0.0)) <= 1e-12);
        }
    }
    // Y(lambda) is the value of e^{-lambda kappa} that makes chi vanish.
    const double qc = q_critical(2.5, 0.5, 0.0);
    const double b = 2.5 * qc, a = b * 0.5;
    std::mt19937_64 gen(17);
    for (int i = 0; i < 10; ++i) {
        const cplx z = random_lambda(gen);
        const cplx A = z * (z + b) + a;
        const cplx B = -a * (z + 1.0);
        CHECK(std::abs(A + B * as.Y(z)) <= 1e-12 * (1.0 + std::abs(A)));
    }
}

TEST_CASE("first Hopf point at tau = 0") {
    const auto hd = hopf_kappa0(2.5, 0.5, 0.0, 0.0, 10.0);
    REQUIRE(hd.has_value());
    const HopfOracle o = hopf_tau0_oracle(2.5, 0.5, 0.0);
    CHECK(hd->Omega == doctest::Approx(o.omega).epsilon(1e-8));
    CHECK(hd->kappa_0 == doctest::Approx(o.kappa0).epsilon(1e-7));
    // Regression values.
    CHECK(hd->kappa_0 == doctest::Approx(8.94810128).epsilon(1e-8));
    CHECK(hd->Omega == doctest::Approx(0.55901699).epsilon(1e-8));
    CHECK(hd->residual <= 1e-8);
    CHECK(hd->count_before == 0);
    CHECK(hd->count_after == 2);
    for (int m = 1; m <= 2; ++m) {
        ModelParams mp{2.5, 0.5, 0.0, hopf_sequence(*hd, m), 0.0};
        CHECK(std::abs(char_eval(endemic_chareq(mp, 0.0), cplx(0.0, hd->Omega))) <= 1e-8);
    }
    CHECK(hopf_sequence(*hd, 0) == hd->kappa_0);
    CHECK(hopf_sequence(*hd, 2) - hopf_sequence(*hd, 1) == doctest::Approx(2.0 * kPi / hd->Omega));
    CHECK_FALSE(hopf_kappa0(2.5, 0.5, 0.0, 0.0, 5.0).has_value());
    CHECK_THROWS_AS(hopf_kappa0(2.5, 0.5, 0.0, 0.3, 5.0), InvalidParams);
}

TEST_CASE("disease-free Hopf bound") {
    const auto [qm, w2] = e0_hopf_bound(2.5, 0.5, 0.0);
    CHECK(w2 == doctest::Approx(1.0 / 3.0));
    CHECK(qm == doctest::Approx(0.466667).epsilon(1e-6));
    CHECK(e0_hopf_bound(2.5, 1e-8, 0.0).second <= 1e-15);
}

TEST_CASE("no imaginary-axis roots on the disease-free line") {
    for (double tau : {0.0, 0.5, 1.5}) {
        for (double q : {0.0, 0.2, 0.5}) {
            const CharEq ce = disease_free_chareq(ModelParams{3.0, 0.6, tau, 1.0, 0.0}, q);
            CHECK(imaginary_axis_zeros(ce, 1e-6, 60.0).empty());
        }
    }
}

TEST_CASE("stability map cells") {
    const auto hd = hopf_kappa0(2.5, 0.5, 0.0, 0.0, 10.0);
    REQUIRE(hd.has_value());
    const std::vector<double> qs{0.0, 0.1};
    const std::vector<double> ks{0.1, 4.0, hd->kappa_0 + 1.0};
    const StabilityMap m = stability_map(2.5, 0.5, 0.0, qs, ks, 2);
    CHECK(m.errors.empty());
    CHECK(m.at(0, 0) == 0);
    CHECK(m.at(0, 2) == 2);
    for (std::size_t iq = 0; iq < qs.size(); ++iq) {
        for (std::size_t ik = 1; ik < ks.size(); ++ik) CHECK(m.at(iq, ik) >= m.at(iq, ik - 1));
    }
    const StabilityMap serial = stability_map(2.5, 0.5, 0.0, qs, ks, 1);
    CHECK(serial.counts == m.counts);
}

TEST_CASE("seiq disease-free spectrum") {
    const ModelParams mp{2.5, 0.5, 0.5, 2.0, 1.0};
    const double qc = q_critical(mp.r, mp.p, mp.tau);
    const CharEq below = seiq_disease_free_chareq(mp, 0.05, qc - 0.15);
    CHECK(count_unstable(below).unstable_count == 1);
    const CharEq above = seiq_disease_free_chareq(mp, 0.05, qc + 0.01);
    CHECK(count_unstable(above).unstable_count == 0);
    // Double zero root: chi / lambda^2 is finite and nonzero at the origin.
    CHECK(std::abs(char_eval_deflated(below, cplx(1e-9, 0.0))) > 1e-6);
    CHECK(std::abs(char_eval(below, cplx(1e-4, 0.0))) <= 1e-6);
}

TEST_CASE("default box") {
    const Box b = default_box(endemic_chareq(ModelParams{12.0, 0.5, 0.0, 0.1, 0.0}, 0.0));
    CHECK(b.re_max == 12.0);
    CHECK(b.im_max == doctest::Approx(20.0 * kPi));
    CHECK(b.re_min == 1e-8);
}
