#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tfop/gaussians.hpp"
#include "tfop/grid.hpp"
#include "tfop/rng.hpp"

using namespace tfop;

namespace {

SampledFunction random_fn(const GridSpec& g, Rng& rng) {
    SampledFunction f(g, Domain::space);
    for (auto& v : f.values) v = rng.complex_normal();
    return f;
}

}  // namespace

TEST_CASE("grid spec validation") {
    CHECK_THROWS_AS(GridSpec(0, 1.0, 4), config_error);
    CHECK_THROWS_AS(GridSpec(1, -1.0, 4), config_error);
    CHECK_THROWS_AS(GridSpec(1, 1.0, 5), config_error);
    const GridSpec g(1, 8.0, 64);
    CHECK(g.spacing() == doctest::Approx(0.25));
    CHECK(g.freq_step() == doctest::Approx(kPi / 8.0));
    CHECK(g.coord(32) == 0.0);
    CHECK(g.freq(0) == doctest::Approx(-32.0 * kPi / 8.0));
    const GridSpec sd = GridSpec::self_dual(1, 64);
    CHECK(sd.is_self_dual());
    CHECK_FALSE(g.is_self_dual());
}

TEST_CASE("unit impulse transform is flat") {
    const GridSpec g(1, 8.0, 64);
    SampledFunction f(g, Domain::space);
    f.values[32] = cd(1.0, 0.0);  // x = 0
    const SampledFunction F = forward_dft(f);
    const double want = g.spacing() / std::sqrt(kTwoPi);
    for (const cd& v : F.values) CHECK(std::abs(v - cd(want, 0.0)) < 1e-15);
}

TEST_CASE("gaussian is its own transform") {
    const GridSpec g(1, 8.0, 64);
    const SampledFunction f = sample(g, Domain::space, [](const std::vector<double>& x) {
        return cd(std::exp(-0.5 * x[0] * x[0]), 0.0);
    });
    const SampledFunction F = forward_dft(f);
    double worst = 0.0;
    for (int k = 0; k < 64; ++k) {
        const double want = std::exp(-0.5 * g.freq(k) * g.freq(k));
        worst = std::max(worst, std::abs(F.values[static_cast<std::size_t>(k)] - cd(want, 0.0)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("round trip and Parseval across dimensions") {
    Rng rng(7);
    for (int dim : {1, 2, 3}) {
        const GridSpec g(dim, 6.0, dim == 3 ? 8 : 16);
        const SampledFunction f = random_fn(g, rng);
        const SampledFunction F = forward_dft(f);
        const SampledFunction fr = inverse_dft(F);
        CHECK(oracle::rel_l2_error(fr.values, f.values) < 1e-12);

        double ef = 0.0, eF = 0.0;
        for (const cd& v : f.values) ef += std::norm(v);
        for (const cd& v : F.values) eF += std::norm(v);
        ef *= std::pow(g.spacing(), dim);
        eF *= std::pow(g.freq_step(), dim);
        CHECK(std::abs(ef - eF) / ef < 1e-12);
    }
}

TEST_CASE("transform matches the reference implementation") {
    Rng rng(11);
    const GridSpec g(2, 5.0, 12);
    const SampledFunction f = random_fn(g, rng);
    const SampledFunction F = forward_dft(f);
    const std::vector<cd> ref = oracle::reference_dft(f.values, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i)
        worst = std::max(worst, std::abs(F.values[i] - ref[i]));
    CHECK(worst < 1e-12);
}

TEST_CASE("quadrature basics") {
    const GridSpec g(1, 8.0, 64);
    SampledFunction one(g, Domain::space);
    for (auto& v : one.values) v = cd(1.0, 0.0);
    CHECK(quadrature_integral(one).real() == doctest::Approx(16.0).epsilon(1e-14));

    const SampledFunction gau = sample(g, Domain::space, [](const std::vector<double>& x) {
        return cd(std::exp(-x[0] * x[0]), 0.0);
    });
    // closed-form Gaussian integral as the oracle
    CHECK(std::abs(quadrature_integral(gau).real() - 1.7724538509055160273) < 1e-10);

    // linearity is exact
    Rng rng(3);
    const SampledFunction a = random_fn(g, rng);
    const SampledFunction b = random_fn(g, rng);
    const cd al(1.7, -0.3), be(-0.4, 2.1);
    SampledFunction lin(g, Domain::space);
    for (std::size_t i = 0; i < lin.values.size(); ++i)
        lin.values[i] = al * a.values[i] + be * b.values[i];
    const cd got = quadrature_integral(lin);
    const cd want = al * quadrature_integral(a) + be * quadrature_integral(b);
    CHECK(std::abs(got - want) < 1e-12);
}

TEST_CASE("lattice trigonometric polynomials integrate exactly") {
    const GridSpec g(1, 8.0, 32);
    for (int k : {1, 5, -7}) {
        const SampledFunction f = sample(g, Domain::space, [&](const std::vector<double>& x) {
            const double ang = x[0] * g.freq(16 + k);
            return cd(std::cos(ang), std::sin(ang));
        });
        CHECK(std::abs(quadrature_integral(f)) < 1e-12);
    }
}

TEST_CASE("trig interpolation reproduces band-limited data") {
    const GridSpec g(1, 8.0, 32);
    auto fn = [&](double x) {
        return cd(0.7, 0.0) + cd(0.0, 1.0) * std::sin(x * g.freq(18)) +
               cd(0.3, 0.0) * std::cos(x * g.freq(13));
    };
    const SampledFunction f =
        sample(g, Domain::space, [&](const std::vector<double>& x) { return fn(x[0]); });
    const TrigInterpolator interp(f);
    for (double x : {0.0, 0.1, -3.33, 5.87}) CHECK(std::abs(interp({x}) - fn(x)) < 1e-12);
}

TEST_CASE("lattice shifts wrap periodically") {
    Rng rng(5);
    const GridSpec g(2, 4.0, 8);
    const SampledFunction f = random_fn(g, rng);
    const SampledFunction s = shift_lattice(f, {3, -2});
    const SampledFunction back = shift_lattice(s, {-3, 2});
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(back.values[i] == f.values[i]);
}

TEST_CASE("error paths") {
    const GridSpec g(1, 8.0, 16);
    SampledFunction f(g, Domain::space);
    f.values[3] = cd(std::nan(""), 0.0);
    CHECK_THROWS_AS(forward_dft(f), numeric_error);

    SampledFunction F(g, Domain::frequency);
    CHECK_THROWS_AS(forward_dft(F), config_error);
    SampledFunction fs(g, Domain::space);
    CHECK_THROWS_AS(inverse_dft(fs), config_error);
}

TEST_CASE("boundary report flags seam jumps") {
    const GridSpec g(1, 4.0, 16);
    const SampledFunction smooth = sample(g, Domain::space, [](const std::vector<double>& x) {
        return cd(std::exp(-2.0 * x[0] * x[0]), 0.0);
    });
    CHECK(boundary_report(smooth).max_face_jump < 1e-10);
    const SampledFunction saw = sample(
        g, Domain::space, [](const std::vector<double>& x) { return cd(x[0], 0.0); });
    CHECK(boundary_report(saw).max_face_jump > 1.0);
}
