/// @file test_analysis.cpp
/// @brief Decay-rate fitting (synthetic exponentials, window rules,
///        degenerate series) and the weighted Poincare constant against the
///        discrete Neumann eigenvalue and the definitional inequality.

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ehd/analysis.hpp"
#include "ehd/errors.hpp"
#include "ehd/grid.hpp"
#include "ehd/steady.hpp"
#include "oracles.hpp"

using namespace ehd;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = a + (b - a) * k / (n - 1);
    return out;
}

/// Plain OLS of log(v) against t over explicit indices — the independent
/// regression oracle.
void ols_oracle(const std::vector<double>& t, const std::vector<double>& v, size_t lo, size_t hi,
                double& lambda, double& c, double& r2) {
    const size_t n = hi - lo;
    double tbar = 0.0, ybar = 0.0;
    for (size_t k = lo; k < hi; ++k) { tbar += t[k]; ybar += std::log(v[k]); }
    tbar /= n;
    ybar /= n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (size_t k = lo; k < hi; ++k) {
        const double dt = t[k] - tbar, dy = std::log(v[k]) - ybar;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    const double slope = sty / stt;
    lambda = -slope;
    c = std::exp(ybar - slope * tbar);
    r2 = syy > 0.0 ? sty * sty / (stt * syy) : 0.0;
}

} // namespace

TEST_CASE("analysis: diagnostics column order") {
    const auto& cols = diagnostics_columns();
    const std::vector<std::string> expected = {
        "step",     "t",       "mass_v",        "mass_w",  "min_v",
        "min_w",    "kinetic", "entropy",       "electrostatic", "k_total",
        "lyapunov", "dist_sq", "dissipation",   "max_div"};
    REQUIRE(cols.size() == expected.size());
    for (size_t k = 0; k < cols.size(); ++k) CHECK(cols[k] == expected[k]);
}

TEST_CASE("analysis: exact exponential recovered to 1e-10") {
    auto t = linspace(0.0, 1.0, 100);
    std::vector<double> v(100);
    for (int k = 0; k < 100; ++k) v[k] = 3.0 * std::exp(-2.0 * t[k]);
    auto fit = fit_decay_rate(t, v);
    CHECK(fit.lambda == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.c_dagger == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));
    // default window: the last half of the series (no floor is hit)
    CHECK(fit.points == 50);
    CHECK(fit.t_begin == doctest::Approx(t[50]));
    CHECK(fit.t_end == doctest::Approx(t.back()));
}

TEST_CASE("analysis: perturbed exponential matches the regression oracle") {
    auto t = linspace(0.0, 1.0, 100);
    std::vector<double> v(100);
    for (int k = 0; k < 100; ++k)
        v[k] = 3.0 * std::exp(-2.0 * t[k]) * (1.0 + 1e-3 * std::sin(t[k]));
    auto fit = fit_decay_rate(t, v);
    CHECK(fit.lambda == doctest::Approx(2.0).epsilon(1e-2));
    double lam, c, r2;
    ols_oracle(t, v, 50, 100, lam, c, r2);
    CHECK(fit.lambda == doctest::Approx(lam).epsilon(1e-12));
    CHECK(fit.c_dagger == doctest::Approx(c).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(r2).epsilon(1e-12));
}

TEST_CASE("analysis: constant series fits lambda 0 with r2 0") {
    auto t = linspace(0.0, 2.0, 40);
    std::vector<double> v(40, 5.0);
    auto fit = fit_decay_rate(t, v);
    CHECK(fit.lambda == 0.0);
    CHECK(fit.r_squared == 0.0);
    CHECK(fit.c_dagger == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("analysis: fit is invariant under uniform scaling of the column") {
    auto t = linspace(0.0, 3.0, 60);
    std::vector<double> v(60), v2(60);
    for (int k = 0; k < 60; ++k) {
        v[k] = 1.7 * std::exp(-0.8 * t[k]) * (1.0 + 0.05 * std::cos(3.0 * t[k]));
        v2[k] = 7.3 * v[k];
    }
    auto f1 = fit_decay_rate(t, v);
    auto f2 = fit_decay_rate(t, v2);
    CHECK(f2.lambda == doctest::Approx(f1.lambda).epsilon(1e-12));
    CHECK(f2.c_dagger == doctest::Approx(7.3 * f1.c_dagger).epsilon(1e-12));
    CHECK(f2.r_squared == doctest::Approx(f1.r_squared).epsilon(1e-12));
}

TEST_CASE("analysis: default window skips a late solver-noise floor") {
    // decay into a hard floor at 1e-24 (far above the 1e-26 cutoff): the
    // flatline must be excluded or the fit would be destroyed
    auto t = linspace(0.0, 30.0, 301);
    std::vector<double> v(301);
    for (int k = 0; k < 301; ++k) v[k] = std::max(1e-24, 3.0 * std::exp(-2.0 * t[k]));
    auto fit = fit_decay_rate(t, v);
    CHECK(fit.lambda == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fit.t_end < 26.5); // the flatline (t > ~25.9 is within 100x of the floor) is out
}

TEST_CASE("analysis: explicit windows are honored verbatim") {
    auto t = linspace(0.0, 1.0, 101);
    std::vector<double> v(101);
    for (int k = 0; k < 101; ++k) v[k] = 2.0 * std::exp(-1.5 * t[k]);
    auto fit = fit_decay_rate(t, v, FitWindow{0.2, 0.6});
    CHECK(fit.lambda == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(fit.t_begin >= 0.2);
    CHECK(fit.t_end <= 0.6);
    CHECK(fit.points == 41);

    // nonpositive value inside an explicit window is a domain error
    auto bad = v;
    bad[50] = 0.0;
    CHECK_THROWS_AS(fit_decay_rate(t, bad, FitWindow{0.2, 0.6}), ContractError);
    // too-narrow window
    CHECK_THROWS_AS(fit_decay_rate(t, v, FitWindow{0.2, 0.25}), ContractError);
}

TEST_CASE("analysis: fewer than 10 usable records is rejected") {
    auto t = linspace(0.0, 1.0, 9);
    std::vector<double> v(9, 1.0);
    CHECK_THROWS_AS(fit_decay_rate(t, v), ContractError);
}

TEST_CASE("analysis: weighted Poincare constant, uniform weight") {
    // 64^2 unit square: the discrete first Neumann eigenvalue gives
    // C = 1/lambda_1 = 0.101341531145798266; continuum limit (L/pi)^2
    auto g = make_grid(64, 64, 1.0, 1.0);
    const double c = weighted_poincare_constant(ScalarField(g, 1.0), 1e-10);
    CHECK(c == doctest::Approx(0.101341531145798266).epsilon(1e-8));
    CHECK(c == doctest::Approx(0.10132118364233778).epsilon(0.02));
    CHECK(c >= 0.10132118364233778); // discrete eigenvalue underestimates
}

TEST_CASE("analysis: weighted Poincare constant, wide rectangle") {
    // L = 2 >= H = 1: C -> (L/pi)^2 with the long-direction cosine mode
    auto g = make_grid(32, 16, 2.0, 1.0);
    const double c = weighted_poincare_constant(ScalarField(g, 1.0), 1e-10);
    const double cont = 4.0 / (M_PI * M_PI);
    CHECK(c == doctest::Approx(cont).epsilon(0.02));
    CHECK(c >= cont);
}

TEST_CASE("analysis: Poincare homogeneity in the weight") {
    auto g = make_grid(16, 16, 1.0, 1.0);
    std::mt19937 rng(991);
    auto rho = oracle::random_scalar(g, rng, 0.5, 2.0);
    ScalarField rho3(g);
    for (size_t k = 0; k < rho.a.size(); ++k) rho3.a[k] = 3.0 * rho.a[k];
    const double c1 = weighted_poincare_constant(rho, 1e-11);
    const double c3 = weighted_poincare_constant(rho3, 1e-11);
    CHECK(c3 == doctest::Approx(c1 / 9.0).epsilon(1e-8));
}

TEST_CASE("analysis: Poincare definitional inequality on random mean-zero fields") {
    auto g = make_grid(16, 16, 1.0, 1.0);
    std::mt19937 rng(992);
    auto rho = oracle::random_scalar(g, rng, 0.5, 2.0);
    const double tol = 1e-10;
    const double c = weighted_poincare_constant(rho, tol);
    const double area = g.cell_area();
    for (int trial = 0; trial < 100; ++trial) {
        auto f = oracle::random_scalar(g, rng);
        double mean = 0.0;
        for (double q : f.a) mean += q;
        mean /= static_cast<double>(f.a.size());
        for (double& q : f.a) q -= mean;
        ScalarField gg(g);
        for (size_t k = 0; k < f.a.size(); ++k) gg.a[k] = f.a[k] * rho.a[k];
        double f2 = 0.0;
        for (double q : f.a) f2 += q * q * area;
        const double grad2 = face_norm2(gradient_neumann(gg));
        CHECK(f2 <= (1.0 + 10.0 * tol) * c * grad2);
    }
}

TEST_CASE("analysis: Poincare weight from a steady-state density") {
    auto g = make_grid(16, 16, 1.0, 1.0);
    auto s = solve_steady(g, 2.0, 1.0, 1e-10);
    ScalarField rho(g);
    for (size_t k = 0; k < rho.a.size(); ++k) rho.a[k] = 1.0 / s.V.a[k];
    const double c = weighted_poincare_constant(rho, 1e-9);
    CHECK(std::isfinite(c));
    CHECK(c > 0.0);
}

TEST_CASE("analysis: Poincare argument validation") {
    auto g = make_grid(8, 8, 1.0, 1.0);
    ScalarField bad(g, 1.0);
    bad(2, 2) = 0.0;
    CHECK_THROWS_AS(weighted_poincare_constant(bad, 1e-10), ContractError);
    CHECK_THROWS_AS(weighted_poincare_constant(ScalarField(g, 1.0), 0.0), ContractError);
}
