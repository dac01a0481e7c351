#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tfop/norms.hpp"
#include "tfop/rng.hpp"

using namespace tfop;

namespace {

StftArray random_array(const GridSpec& g, Rng& rng) {
    StftArray V;
    V.grid = g;
    V.window = SampledFunction(g, Domain::space);
    V.values.resize(g.point_count() * g.point_count());
    for (auto& v : V.values) v = rng.complex_normal();
    return V;
}

SampledFunction gaussian1d(const GridSpec& g, double center, double spread, double mod) {
    GaussianAmplitude ga;
    ga.center = {center};
    ga.spread = {spread};
    ga.modulation = {mod};
    return ga.sample_on(g);
}

}  // namespace

TEST_CASE("modulation norm basics") {
    const GridSpec g(1, 8.0, 32);
    const WindowSpec chi = WindowSpec::gaussian(g, 1.0);
    const WeightSpec one = WeightSpec::one(2);
    const SampledFunction f = gaussian1d(g, 0.2, 1.0, g.freq_step());
    const StftArray V = stft(f, chi);

    // Moyal: the (2,2) norm is ||chi|| ||f||.
    const double want = chi.l2() * l2_norm(f);
    CHECK(std::abs(modulation_norm(V, 2.0, 2.0, one) - want) / want < 1e-8);

    // (inf, inf) collapses to the weighted max.
    double m = 0.0;
    for (const cd& v : V.values) m = std::max(m, std::abs(v));
    CHECK(modulation_norm(V, kInf, kInf, one) == doctest::Approx(m));

    // weights >= 1 can only increase the norm
    CHECK(modulation_norm(V, 3.0, 1.5, WeightSpec::bracket(2, {1}, 1.0)) >=
          modulation_norm(V, 3.0, 1.5, one));

    StftArray bad = V;
    bad.values[7] = cd(std::nan(""), 0.0);
    CHECK_THROWS_AS(modulation_norm(bad, 2.0, 2.0, one), numeric_error);
}

TEST_CASE("coorbit norm against the explicit nested-loop oracle") {
    Rng rng(23);
    const GridSpec g(2, 1.0, 2);  // hand-checkable 2x2x2x2 array
    StftArray V = random_array(g, rng);
    const WeightSpec w = WeightSpec::bracket(4, {2, 3}, 0.5);
    const std::vector<double> wtab = tabulate_phase_space_weight(w, g);

    SubspacePartition part;
    part.position_block2 = {1};
    part.dual_block2 = {1};
    ExponentSpec e;
    e.values = {1.0, kInf, 1.0, kInf};
    const double got = coorbit_norm(V, part, e, w);
    const double want = oracle::nested_mixed_norm_2x2(V.values, wtab, 2, g.spacing(),
                                                      g.freq_step(), 1.0, kInf, 1.0, kInf);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));

    // generic exponents too
    e.values = {1.5, 3.0, 2.0, 4.0};
    CHECK(coorbit_norm(V, part, e, w) ==
          doctest::Approx(oracle::nested_mixed_norm_2x2(V.values, wtab, 2, g.spacing(),
                                                        g.freq_step(), 1.5, 3.0, 2.0, 4.0))
              .epsilon(1e-12));
}

TEST_CASE("coorbit norm collapses to the modulation norm") {
    Rng rng(29);
    const GridSpec g(2, 4.0, 4);
    const StftArray V = random_array(g, rng);
    const WeightSpec one = WeightSpec::one(4);
    ExponentSpec e;
    e.values = {3.0, 3.0, 1.5, 1.5};
    for (const std::vector<int>& split : {std::vector<int>{}, {0}, {1}, {0, 1}}) {
        SubspacePartition part;
        part.position_block2 = split;
        part.dual_block2 = split;
        CHECK(coorbit_norm(V, part, e, one) ==
              doctest::Approx(modulation_norm(V, 3.0, 1.5, one)).epsilon(1e-12));
    }

    e.values = {kInf, kInf, kInf, kInf};
    double m = 0.0;
    for (const cd& v : V.values) m = std::max(m, std::abs(v));
    SubspacePartition part;
    part.position_block2 = {0};
    part.dual_block2 = {1};
    CHECK(coorbit_norm(V, part, e, one) == doctest::Approx(m));
}

TEST_CASE("coorbit norm is monotone in the exponents on unit-cell grids") {
    Rng rng(31);
    const GridSpec g = GridSpec::self_dual(2, 8);  // h = s < 1
    REQUIRE(g.spacing() < 1.0);
    const StftArray V = random_array(g, rng);
    const WeightSpec one = WeightSpec::one(4);
    SubspacePartition part;
    part.position_block2 = {1};
    part.dual_block2 = {1};
    const std::vector<double> base{1.0, 2.0, 1.5, 3.0};
    ExponentSpec e0;
    e0.values = base;
    const double v0 = coorbit_norm(V, part, e0, one);
    for (std::size_t lvl = 0; lvl < 4; ++lvl) {
        ExponentSpec e = e0;
        e.values[lvl] = base[lvl] * 2.0;
        CHECK(coorbit_norm(V, part, e, one) <= v0 + 1e-12);
        e.values[lvl] = kInf;
        CHECK(coorbit_norm(V, part, e, one) <= v0 + 1e-12);
    }
}

TEST_CASE("inconsistent partitions are rejected") {
    Rng rng(59);
    const GridSpec g(2, 4.0, 4);
    const StftArray V = random_array(g, rng);
    ExponentSpec e;
    e.values = {2.0, 2.0, 2.0, 2.0};
    SubspacePartition bad;
    bad.position_block2 = {0, 7};  // axis out of range
    CHECK_THROWS_AS(coorbit_norm(V, bad, e, WeightSpec::one(4)), config_error);
    ExponentSpec short_e;
    short_e.values = {2.0, 2.0};
    CHECK_THROWS_AS(coorbit_norm(V, SubspacePartition{}, short_e, WeightSpec::one(4)),
                    config_error);
}

TEST_CASE("norms are homogeneous and satisfy the triangle inequality") {
    Rng rng(37);
    const GridSpec g(1, 8.0, 16);
    const WeightSpec one = WeightSpec::one(2);
    for (int trial = 0; trial < 10; ++trial) {
        StftArray A = random_array(g, rng);
        StftArray B = random_array(g, rng);
        const double p = 1.0 + 3.0 * rng.uniform();
        const double q = 1.0 + 3.0 * rng.uniform();
        const double na = modulation_norm(A, p, q, one);
        const double nb = modulation_norm(B, p, q, one);
        StftArray S = A;
        for (std::size_t i = 0; i < S.values.size(); ++i) S.values[i] += B.values[i];
        CHECK(modulation_norm(S, p, q, one) <= na + nb + 1e-10);
        StftArray C = A;
        const cd lam(0.6, -2.2);
        for (auto& v : C.values) v *= lam;
        CHECK(std::abs(modulation_norm(C, p, q, one) - std::abs(lam) * na) < 1e-10);
    }
}

TEST_CASE("patch norm") {
    const GridSpec g(1, 8.0, 64);
    const WeightSpec one = WeightSpec::one(2);
    const WindowSpec pou = WindowSpec::bump_pou(g, 2.5, 2.0);

    SampledFunction zero(g, Domain::space);
    CHECK(patch_norm(zero, 2.0, pou, 2.0, 2.0, one) == 0.0);

    // Single patch covering the support: the norm is the plain weighted
    // frequency norm of fhat.
    const WindowSpec single = WindowSpec::bump_pou(g, 20.0, 16.0);
    const SampledFunction f = gaussian1d(g, 0.0, 0.8, 2.0 * g.freq_step());
    const WeightSpec wx = WeightSpec::bracket(2, {1}, 1.0);
    const double got = patch_norm(f, 16.0, single, 2.0, 3.0, wx);
    const SampledFunction fh = forward_dft(f);
    double acc = 0.0;
    for (int k = 0; k < 64; ++k) {
        const double w = wx.eval({0.0, g.freq(k)});
        acc += std::pow(std::abs(fh.values[static_cast<std::size_t>(k)]) * w, 3.0);
    }
    const double want = std::pow(g.freq_step() * acc, 1.0 / 3.0);
    CHECK(got == doctest::Approx(want).epsilon(1e-10));

    // A non-unity window family is rejected.
    const WindowSpec bad = WindowSpec::bump(g, 2.5);
    CHECK_THROWS_AS(patch_norm(f, 2.0, bad, 2.0, 2.0, one), numeric_error);
}

TEST_CASE("amplitude norms") {
    Rng rng(41);
    const GridSpec g3(3, 4.0, 8);
    const WindowSpec chi = WindowSpec::gaussian(g3, 1.0);
    GaussianAmplitude ga = GaussianAmplitude::isotropic(3, 1.0);
    const SampledFunction a = ga.sample_on(g3);
    const StftArray Va = stft(a, chi.values, 1.0);
    const WeightSpec one = WeightSpec::one(6);
    const AmplitudeDims dims{1, 1, 1};

    SubspacePartition part;
    part.position_block2 = {2};  // zeta
    part.dual_block2 = {2};      // z

    // zero amplitude gives zero for every variant
    StftArray Z = Va;
    for (auto& v : Z.values) v = cd(0.0, 0.0);
    for (auto variant : {AmplitudeVariant::sup_sup_l1, AmplitudeVariant::sup_sup_l1_z,
                         AmplitudeVariant::sup_sup_l1_xi, AmplitudeVariant::sup_sup_l1_eta,
                         AmplitudeVariant::lp_sup_z_l1_lp, AmplitudeVariant::lp_sup_zeta_l1_lp,
                         AmplitudeVariant::sup_lp_l1, AmplitudeVariant::sup_lp_lq_l1})
        CHECK(amplitude_norm(Z, variant, dims, part, 2.0, 2.0, one) == 0.0);

    // exact homogeneity
    StftArray S = Va;
    for (auto& v : S.values) v *= cd(0.0, -2.0);
    CHECK(std::abs(amplitude_norm(S, AmplitudeVariant::sup_lp_l1, dims, part, 2.0, 2.0, one) -
                   2.0 * amplitude_norm(Va, AmplitudeVariant::sup_lp_l1, dims, part, 2.0, 2.0, one)) <
          1e-10);

    // q = p collapses the four-level norm onto the three-level one
    for (double p : {1.0, 2.0, 3.5}) {
        CHECK(amplitude_norm(Va, AmplitudeVariant::sup_lp_lq_l1, dims, part, p, p, one) ==
              doctest::Approx(amplitude_norm(Va, AmplitudeVariant::sup_lp_l1, dims, part, p, p, one))
                  .epsilon(1e-12));
    }

    // the z-block corollary is the general norm with the standard split
    CHECK(amplitude_norm(Va, AmplitudeVariant::sup_sup_l1_z, dims, part, 2.0, 2.0, one) ==
          doctest::Approx(amplitude_norm(Va, AmplitudeVariant::sup_sup_l1, dims, part, 2.0, 2.0, one)));

    // brute-force oracle for the sup/L1/sup reduction over the 6-axis array
    {
        const int N = 8;
        const std::vector<double> w = tabulate_phase_space_weight(one, g3);
        double outer = 0.0;
        for (int jx = 0; jx < N; ++jx)
            for (int jy = 0; jy < N; ++jy) {
                double du = 0.0;
                for (int kz = 0; kz < N; ++kz) {
                    double sup = 0.0;
                    for (int jz = 0; jz < N; ++jz)
                        for (int kx = 0; kx < N; ++kx)
                            for (int ke = 0; ke < N; ++ke) {
                                const std::size_t pos =
                                    (static_cast<std::size_t>(jx) * N + jy) * N + jz;
                                const std::size_t fr =
                                    (static_cast<std::size_t>(kx) * N + ke) * N + kz;
                                const std::size_t flat = pos * (N * N * N) + fr;
                                sup = std::max(sup, std::abs(Va.values[flat]) * w[flat]);
                            }
                    du += sup;
                }
                outer = std::max(outer, du * g3.freq_step());
            }
        CHECK(amplitude_norm(Va, AmplitudeVariant::sup_sup_l1, dims, part, 2.0, 2.0, one) ==
              doctest::Approx(outer).epsilon(1e-12));
    }

    // brute-force oracle for the Lp/sup/L1/Lp variant
    {
        const int N = 8;
        const std::vector<double> w = tabulate_phase_space_weight(one, g3);
        const double p = 2.0;
        double xy_acc = 0.0;
        for (int jx = 0; jx < N; ++jx)
            for (int jy = 0; jy < N; ++jy) {
                double z_acc = 0.0;
                for (int kz = 0; kz < N; ++kz) {
                    double sup = 0.0;
                    for (int jz = 0; jz < N; ++jz) {
                        double fe = 0.0;
                        for (int kx = 0; kx < N; ++kx)
                            for (int ke = 0; ke < N; ++ke) {
                                const std::size_t pos =
                                    (static_cast<std::size_t>(jx) * N + jy) * N + jz;
                                const std::size_t fr =
                                    (static_cast<std::size_t>(kx) * N + ke) * N + kz;
                                const std::size_t flat = pos * (N * N * N) + fr;
                                fe += std::pow(std::abs(Va.values[flat]) * w[flat], p);
                            }
                        sup = std::max(sup,
                                       std::pow(g3.freq_step() * g3.freq_step() * fe, 1.0 / p));
                    }
                    z_acc += sup;
                }
                xy_acc += std::pow(g3.freq_step() * z_acc, p);
            }
        const double want = std::pow(g3.spacing() * g3.spacing() * xy_acc, 1.0 / p);
        CHECK(amplitude_norm(Va, AmplitudeVariant::lp_sup_zeta_l1_lp, dims, part, p, p, one) ==
              doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("derivative oracle matches finite differences") {
    GaussianAmplitude a;
    a.center = {0.3, -0.2};
    a.spread = {1.1, 0.8};
    a.modulation = {0.7, -1.3};
    Rng rng(43);
    const double step = 1e-5;
    for (int trial = 0; trial < 10; ++trial) {
        const std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        for (int axis : {0, 1}) {
            std::vector<int> al{0, 0};
            al[static_cast<std::size_t>(axis)] = 1;
            std::vector<double> xp = x, xm = x;
            xp[static_cast<std::size_t>(axis)] += step;
            xm[static_cast<std::size_t>(axis)] -= step;
            const cd fd = (a.eval(xp) - a.eval(xm)) / (2.0 * step);
            CHECK(std::abs(a.derivative(al, x) - fd) < 1e-6);
        }
        // mixed second derivative
        std::vector<double> pp = x, pm = x, mp = x, mm = x;
        pp[0] += step; pp[1] += step;
        pm[0] += step; pm[1] -= step;
        mp[0] -= step; mp[1] += step;
        mm[0] -= step; mm[1] -= step;
        const cd fd2 = (a.eval(pp) - a.eval(pm) - a.eval(mp) + a.eval(mm)) / (4.0 * step * step);
        CHECK(std::abs(a.derivative({1, 1}, x) - fd2) < 1e-5);
    }
}

TEST_CASE("smooth-amplitude norms") {
    const GridSpec g3(3, 6.0, 8);
    const WeightSpec one3 = WeightSpec::one(3);
    GaussianAmplitude zero = GaussianAmplitude::isotropic(3, 1.0, 0.0);
    CHECK(cnp_norm(zero, g3, 2, 2.0, one3) == 0.0);

    GaussianAmplitude a = GaussianAmplitude::isotropic(3, 1.3);
    const double n0 = cnp_norm(a, g3, 0, 2.0, one3);
    const double n1 = cnp_norm(a, g3, 1, 2.0, one3);
    const double n2 = cnp_norm(a, g3, 2, 2.0, one3);
    CHECK(n0 <= n1);
    CHECK(n1 <= n2);

    // brute-force sup/integral oracle at Nd = 0
    double acc = 0.0;
    const int N = 8;
    for (int ix = 0; ix < N; ++ix)
        for (int iz = 0; iz < N; ++iz) {
            double sup = 0.0;
            for (int iy = 0; iy < N; ++iy) {
                const std::vector<double> X{g3.coord(ix), g3.coord(iy), g3.coord(iz)};
                sup = std::max(sup, std::abs(a.eval(X)));
            }
            acc += sup * sup;
        }
    const double want = std::sqrt(acc * g3.spacing() * g3.spacing());
    CHECK(std::abs(n0 - want) < 1e-10);
}

TEST_CASE("embedding diagnostics") {
    const GridSpec g(1, 8.0, 32);
    const WindowSpec chi = WindowSpec::gaussian(g, 1.0);
    NormSpec spec;
    spec.kind = NormSpec::Kind::modulation;
    spec.p = spec.q = 1.0;
    spec.omega = WeightSpec::one(2);
    spec.window = chi.values;

    Rng rng(47);
    std::vector<SampledFunction> family;
    for (int i = 0; i < 5; ++i)
        family.push_back(gaussian1d(g, rng.uniform(-0.5, 0.5), rng.uniform(0.8, 1.2), 0.0));

    const auto same = embedding_ratio(family, spec, spec);
    for (double r : same.ratios) CHECK(r == doctest::Approx(1.0));

    NormSpec spec22 = spec;
    spec22.p = spec22.q = 2.0;
    const auto e32 = embedding_ratio(family, spec, spec22);

    // two-resolution stability of the recorded ratio
    const GridSpec g64(1, 8.0, 64);
    const WindowSpec chi64 = WindowSpec::gaussian(g64, 1.0);
    NormSpec a64 = spec, b64 = spec22;
    a64.window = chi64.values;
    b64.window = chi64.values;
    std::vector<SampledFunction> family64;
    Rng rng2(47);
    for (int i = 0; i < 5; ++i)
        family64.push_back(gaussian1d(g64, rng2.uniform(-0.5, 0.5), rng2.uniform(0.8, 1.2), 0.0));
    const auto e64 = embedding_ratio(family64, a64, b64);
    CHECK(std::abs(e64.max_ratio / e32.max_ratio - 1.0) < 0.10);

    family.push_back(SampledFunction(g, Domain::space));  // zero member
    CHECK_THROWS_AS(embedding_ratio(family, spec, spec22), numeric_error);
}
