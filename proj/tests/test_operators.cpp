#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tfop/gaussians.hpp"
#include "tfop/operators.hpp"
#include "tfop/rng.hpp"

using namespace tfop;

namespace {

SampledFunction gaussian_on(const GridSpec& g, std::vector<double> c, std::vector<double> s,
                            std::vector<double> m = {}) {
    GaussianAmplitude ga;
    ga.center = std::move(c);
    ga.spread = std::move(s);
    ga.modulation = std::move(m);
    return ga.sample_on(g);
}

SampledFunction band_limited(const GridSpec& g, Rng& rng) {
    SampledFunction F(g, Domain::frequency);
    const int N = g.points_per_axis;
    for (int k = 0; k < N; ++k)
        if (std::abs(k - N / 2) <= N / 4) F.values[static_cast<std::size_t>(k)] = rng.complex_normal();
    return inverse_dft(F);
}

double max_abs_diff(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    return (A - B).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("bilinear phase evaluation") {
    const PhaseSpec phi = PhaseSpec::bilinear(1);
    Eigen::VectorXd X(3);
    X << 1.0, 2.0, 3.0;
    const PhaseEval ev = phase_eval(phi, X);
    CHECK(ev.value == -3.0);
    CHECK(ev.gradient(0) == 3.0);   // phi_x = zeta
    CHECK(ev.gradient(1) == -3.0);  // phi_y = -zeta
    CHECK(ev.gradient(2) == -1.0);  // phi_zeta = x - y
    CHECK(ev.xz(0, 0) == 1.0);
    CHECK(ev.yz(0, 0) == -1.0);
    CHECK(ev.xx(0, 0) == 0.0);
    CHECK(ev.xy(0, 0) == 0.0);
    CHECK(ev.yy(0, 0) == 0.0);
    CHECK(ev.zz(0, 0) == 0.0);
}

TEST_CASE("gradients match central finite differences") {
    Rng rng(51);
    Eigen::MatrixXd A(3, 3);
    A << 0.4, 0.1, 1.0, 0.1, -0.3, -1.0, 1.0, -1.0, 0.2;
    const PhaseSpec quad = PhaseSpec::quadratic(1, 1, 1, A, Eigen::Vector3d(0.5, -0.2, 0.1));
    std::vector<Eigen::VectorXd> freqs{Eigen::Vector3d(1.0, 0.5, -0.7)};
    const PhaseSpec pert = PhaseSpec::perturbed(quad, 0.3, freqs, {0.4});
    for (const PhaseSpec* phi : {&quad, &pert}) {
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::VectorXd X(3);
            for (int i = 0; i < 3; ++i) X(i) = rng.uniform(-2, 2);
            const Eigen::VectorXd g = phi->gradient(X);
            const double step = 1e-6;
            for (int i = 0; i < 3; ++i) {
                Eigen::VectorXd Xp = X, Xm = X;
                Xp(i) += step;
                Xm(i) -= step;
                const double fd = (phi->value(Xp) - phi->value(Xm)) / (2.0 * step);
                CHECK(std::abs(g(i) - fd) < 1e-6);
            }
        }
    }
}

TEST_CASE("phase Taylor split") {
    Eigen::MatrixXd A(3, 3);
    A << 0.4, 0.1, 1.0, 0.1, -0.3, -1.0, 1.0, -1.0, 0.2;
    const PhaseSpec quad = PhaseSpec::quadratic(1, 1, 1, A, Eigen::Vector3d(0.5, -0.2, 0.1));
    std::vector<Eigen::VectorXd> freqs{Eigen::Vector3d(0.9, -0.4, 0.6)};
    const PhaseSpec pert = PhaseSpec::perturbed(quad, 0.2, freqs, {0.1});
    Rng rng(53);
    for (const PhaseSpec* phi : {&quad, &pert}) {
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::VectorXd X(3), X1(3);
            for (int i = 0; i < 3; ++i) {
                X(i) = rng.uniform(-2, 2);
                X1(i) = rng.uniform(-2, 2);
            }
            const PhaseTaylorSplit s = phase_taylor_split(*phi, X);
            const double lhs = phi->value(X + X1);
            const double rhs = s.linear_part(X1) + s.remainder(X1);
            CHECK(std::abs(lhs - rhs) < 1e-10);
        }
    }
}

TEST_CASE("nondegeneracy determinants") {
    const PhaseSpec phi = PhaseSpec::bilinear(1);
    const GridSpec g3(3, 4.0, 8);
    CHECK(nondegeneracy(phi, g3, DetBlock::full) == 1.0);
    CHECK(nondegeneracy(phi, g3, DetBlock::yz) == 1.0);
    CHECK(nondegeneracy(phi, g3, DetBlock::xz) == 1.0);
    CHECK(nondegeneracy(phi, g3, DetBlock::zz) == 0.0);

    const PhaseSpec zero = PhaseSpec::quadratic(1, 1, 1, Eigen::MatrixXd::Zero(3, 3),
                                                Eigen::VectorXd::Zero(3));
    CHECK(nondegeneracy(zero, g3, DetBlock::full) == 0.0);  // flagged degenerate
}

TEST_CASE("unit amplitude recovers the identity") {
    const GridSpec g1 = GridSpec::self_dual(1, 64);
    const GridSpec g3(3, g1.half_width, 64);
    SampledFunction one(g3, Domain::space);
    for (auto& v : one.values) v = cd(1.0, 0.0);
    const OperatorMatrix T = op_fio(one, PhaseSpec::bilinear(1));
    Rng rng(57);
    const SampledFunction f = band_limited(g1, rng);
    const SampledFunction Tf = T.apply(f);
    CHECK(oracle::rel_l2_error(Tf.values, f.values) < 1e-6);
}

TEST_CASE("operator assembly is linear in the amplitude") {
    const GridSpec g3(3, 4.0, 8);
    const PhaseSpec phi = PhaseSpec::bilinear(1);
    const double tol = 1e-1;  // desk-scale box, visible Gaussian seam
    const SampledFunction a1 = gaussian_on(g3, {0, 0, 0}, {1.0, 1.1, 0.9});
    const SampledFunction a2 = gaussian_on(g3, {0, 0, 0}, {0.8, 1.0, 1.2});
    const cd al(2.0, -1.0), be(0.5, 0.25);
    SampledFunction lin(g3, Domain::space);
    for (std::size_t i = 0; i < lin.values.size(); ++i)
        lin.values[i] = al * a1.values[i] + be * a2.values[i];
    const OperatorMatrix T = op_fio(lin, phi, tol);
    const Eigen::MatrixXcd want =
        al * op_fio(a1, phi, tol).entries + be * op_fio(a2, phi, tol).entries;
    CHECK(max_abs_diff(T.entries, want) < 1e-12);
}

TEST_CASE("x,zeta-amplitudes reduce to the t = 0 quantization") {
    const GridSpec g2 = GridSpec::self_dual(2, 32);
    const SampledFunction b = gaussian_on(g2, {0, 0}, {1.0, 0.8}, {0.0, g2.freq_step()});
    const OperatorMatrix T1 = op_fio(lift_amplitude_xz(b, 1), PhaseSpec::bilinear(1), 1e-9);
    const OperatorMatrix T2 = op_pseudo(b, 0.0);
    CHECK(max_abs_diff(T1.entries, T2.entries) < 1e-8);
}

TEST_CASE("kernel construction") {
    const GridSpec g3(3, 4.0, 8);
    const PhaseSpec phi = PhaseSpec::bilinear(1);

    SampledFunction zero(g3, Domain::space);
    const SampledFunction K0 = fio_kernel(zero, phi);
    for (const cd& v : K0.values) CHECK(v == cd(0.0, 0.0));

    const SampledFunction a = gaussian_on(g3, {0, 0, 0}, {1.0, 1.1, 0.9});
    const OperatorMatrix T = op_fio(a, phi, 1e-1);
    const SampledFunction K = fio_kernel(a, phi, 1e-1);
    const OperatorMatrix TK = kernel_to_operator(K, T.source);
    CHECK(max_abs_diff(T.entries, TK.entries) < 1e-10);

    // Resolution-doubling oracle on the shared coarse lattice. The base grid
    // must resolve the zeta-oscillation where the amplitude lives
    // (pi/h >= L + a few amplitude widths), hence N = 32 on this box.
    Eigen::MatrixXd A = PhaseSpec::bilinear(1).A;
    A(0, 0) = 0.3;
    A(1, 1) = -0.2;
    const PhaseSpec quad = PhaseSpec::quadratic(1, 1, 1, A, Eigen::VectorXd::Zero(3));
    const GridSpec g3c(3, 4.0, 32);
    const GridSpec g3f(3, 4.0, 64);
    const SampledFunction ac = gaussian_on(g3c, {0, 0, 0}, {1.0, 1.1, 0.9});
    const SampledFunction af = gaussian_on(g3f, {0, 0, 0}, {1.0, 1.1, 0.9});
    const SampledFunction Kc = fio_kernel(ac, quad, 1e-1);
    const SampledFunction Kf = fio_kernel(af, quad, 1e-1);
    double worst = 0.0;
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j)
            worst = std::max(worst,
                             std::abs(Kc.values[static_cast<std::size_t>(i) * 32 + j] -
                                      Kf.values[(static_cast<std::size_t>(2 * i) * 64 + 2 * j)]));
    CHECK(worst < 1e-6);
}

TEST_CASE("kernel application") {
    const GridSpec g(1, 8.0, 32);
    const WindowSpec chi = WindowSpec::gaussian(g, 1.0);
    const int N = 32;

    // rank-one kernel acts as an outer product
    SampledFunction K(GridSpec(2, 8.0, N), Domain::space);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            K.values[static_cast<std::size_t>(i) * N + j] =
                chi.values.values[static_cast<std::size_t>(i)] *
                chi.values.values[static_cast<std::size_t>(j)];
    Rng rng(61);
    const SampledFunction f = band_limited(g, rng);
    const SampledFunction Tf = apply_kernel(K, f);
    cd inner(0.0, 0.0);
    for (int j = 0; j < N; ++j)
        inner += chi.values.values[static_cast<std::size_t>(j)] * f.values[static_cast<std::size_t>(j)];
    inner *= g.spacing();
    for (int i = 0; i < N; ++i)
        CHECK(std::abs(Tf.values[static_cast<std::size_t>(i)] -
                       inner * chi.values.values[static_cast<std::size_t>(i)]) < 1e-12);

    // exact linearity
    const SampledFunction h = band_limited(g, rng);
    SampledFunction fh(g, Domain::space);
    const cd al(1.5, -0.5);
    for (std::size_t i = 0; i < fh.values.size(); ++i)
        fh.values[i] = f.values[i] + al * h.values[i];
    const SampledFunction lhs = apply_kernel(K, fh);
    const SampledFunction r1 = apply_kernel(K, h);
    for (std::size_t i = 0; i < lhs.values.size(); ++i)
        CHECK(std::abs(lhs.values[i] - (Tf.values[i] + al * r1.values[i])) < 1e-12);
}

TEST_CASE("t-quantization identities") {
    const GridSpec g2 = GridSpec::self_dual(2, 32);
    const int N = 32;

    // unit symbol acts as the identity on the lattice
    SampledFunction one(g2, Domain::space);
    for (auto& v : one.values) v = cd(1.0, 0.0);
    const OperatorMatrix T1 = op_pseudo(one, 0.0);
    CHECK(max_abs_diff(T1.entries, Eigen::MatrixXcd::Identity(N, N)) < 1e-8);

    // multiplication symbols act diagonally
    const SampledFunction m = gaussian_on(GridSpec(1, g2.half_width, N), {0.0}, {1.2});
    SampledFunction ax(g2, Domain::space);
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k)
            ax.values[static_cast<std::size_t>(i) * N + k] = m.values[static_cast<std::size_t>(i)];
    const OperatorMatrix Tm = op_pseudo(ax, 0.0);
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(N, N);
    for (int i = 0; i < N; ++i) want(i, i) = m.values[static_cast<std::size_t>(i)];
    CHECK(max_abs_diff(Tm.entries, want) < 1e-10);

    // frequency symbols scale lattice exponentials, for every quantization
    SampledFunction axi(g2, Domain::space);
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k)
            axi.values[static_cast<std::size_t>(i) * N + k] = cd(g2.coord(k), 0.0);
    const GridSpec gl(1, g2.half_width, N);
    for (double t : {0.0, 0.37, 1.0}) {
        const OperatorMatrix T = op_pseudo(axi, t);
        for (int kmode : {2, -6}) {
            SampledFunction e(gl, Domain::space);
            for (int i = 0; i < N; ++i) {
                const double ang = gl.coord(i) * gl.freq(N / 2 + kmode);
                e.values[static_cast<std::size_t>(i)] = cd(std::cos(ang), std::sin(ang));
            }
            const SampledFunction Te = T.apply(e);
            double worst = 0.0;
            for (int i = 0; i < N; ++i)
                worst = std::max(worst,
                                 std::abs(Te.values[static_cast<std::size_t>(i)] -
                                          gl.freq(N / 2 + kmode) * e.values[static_cast<std::size_t>(i)]));
            CHECK(worst < 1e-8);
        }
    }

    // kernel route agrees with the direct oscillatory quadrature
    const SampledFunction b = gaussian_on(g2, {0, 0}, {1.1, 0.9}, {g2.freq_step(), 0.0});
    for (double t : {0.0, 0.5, 1.0}) {
        const OperatorMatrix Ta = op_pseudo(b, t);
        const OperatorMatrix Tb = op_pseudo_direct(b, t);
        CHECK(max_abs_diff(Ta.entries, Tb.entries) < 1e-8);
    }
}

TEST_CASE("quantization transfer") {
    const GridSpec g2 = GridSpec::self_dual(2, 32);
    const SampledFunction a = gaussian_on(g2, {0, 0}, {1.1, 0.9}, {g2.freq_step(), 0.0});

    // s = t is the identity, bitwise
    const SampledFunction same = quantization_transfer(a, 0.3, 0.3);
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(same.values[i] == a.values[i]);

    // x-independent symbols are fixed points, bitwise
    SampledFunction axi(g2, Domain::space);
    const int N = 32;
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k)
            axi.values[static_cast<std::size_t>(i) * N + k] =
                cd(std::exp(-0.5 * g2.coord(k) * g2.coord(k)), 0.0);
    const SampledFunction bxi = quantization_transfer(axi, 0.0, 1.0);
    for (std::size_t i = 0; i < axi.values.size(); ++i) CHECK(bxi.values[i] == axi.values[i]);

    // operator identity a_s(x,D) = b_t(x,D); integer t - s is lattice-exact
    const SampledFunction b1 = quantization_transfer(a, 0.0, 1.0);
    CHECK(max_abs_diff(op_pseudo(a, 0.0).entries, op_pseudo(b1, 1.0).entries) < 1e-10);

    // fractional t - s: exact away from the periodic seam; the outer band
    // |x - y| > L of the two discrete kernels periodizes along different
    // fibers, which is inherent to the torus model.
    const SampledFunction bh = quantization_transfer(a, 0.0, 0.5);
    const OperatorMatrix Ta = op_pseudo(a, 0.0);
    const OperatorMatrix Tb = op_pseudo(bh, 0.5);
    double interior = 0.0;
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            if (std::abs(g2.coord(i) - g2.coord(j)) > 0.7 * g2.half_width) continue;
            interior = std::max(interior, std::abs(Ta.entries(i, j) - Tb.entries(i, j)));
        }
    CHECK(interior < 1e-10);

    // round trip
    const SampledFunction rt = quantization_transfer(quantization_transfer(a, 0.0, 1.0), 1.0, 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(rt.values[i] - a.values[i]));
    CHECK(worst < 1e-10);
}

TEST_CASE("transfer of the windowed bilinear symbol truncates at first order") {
    // a(x, xi) = x xi W(x) W(xi) with a very wide Gaussian W; the transferred
    // symbol at interior lattice points matches xi x - i, with the analytic
    // first-order formula as the oracle at the neighbors.
    const double S = 50.0, L = 450.0;
    const int N = 64;
    const GridSpec g2(2, L, N);
    const SampledFunction a = sample(g2, Domain::space, [&](const std::vector<double>& x) {
        const double W = std::exp(-(x[0] * x[0] + x[1] * x[1]) / (2.0 * S * S));
        return cd(x[0] * x[1] * W, 0.0);
    });
    const SampledFunction b = quantization_transfer(a, 0.0, 1.0);

    // at the origin the window is flat: b(0,0) = +i
    const std::size_t center = static_cast<std::size_t>(N / 2) * N + N / 2;
    CHECK(std::abs(b.values[center] - cd(0.0, 1.0)) < 1e-6);

    // first-order analytic prediction at the neighboring lattice points
    auto predict = [&](double x, double xi) {
        const double Wx = std::exp(-x * x / (2.0 * S * S));
        const double Wxi = std::exp(-xi * xi / (2.0 * S * S));
        const double dxd = (1.0 - x * x / (S * S)) * Wx;   // d/dx (x Wx)
        const double dxid = (1.0 - xi * xi / (S * S)) * Wxi;
        return cd(x * xi * Wx * Wxi, 0.0) + cd(0.0, 1.0) * dxd * dxid;
    };
    for (int di : {-1, 0, 1})
        for (int dk : {-1, 0, 1}) {
            const std::size_t idx =
                static_cast<std::size_t>(N / 2 + di) * N + static_cast<std::size_t>(N / 2 + dk);
            CHECK(std::abs(b.values[idx] - predict(g2.coord(N / 2 + di), g2.coord(N / 2 + dk))) <
                  1e-3);
        }
}

TEST_CASE("rotated operators") {
    const GridSpec g2 = GridSpec::self_dual(2, 32);
    const PhaseSpec phi = PhaseSpec::bilinear(1);
    const SampledFunction a = gaussian_on(g2, {0, 0}, {1.0, 0.9});

    const OperatorMatrix R10 = op_fio_rotated(a, phi, 1.0, 0.0, 1e-9);
    const OperatorMatrix Tref = op_fio(lift_amplitude_xz(a, 1), phi, 1e-9);
    CHECK(max_abs_diff(R10.entries, Tref.entries) < 1e-10);

    const double t1 = 0.6, t2 = 0.8;
    const OperatorMatrix R = op_fio_rotated(a, phi, t1, t2, 1e-9);
    const SampledFunction K10 = fio_kernel(lift_amplitude_xz(a, 1), phi, 1e-9);
    const TrigInterpolator Ki(K10);
    const int N = 32;
    const GridSpec gl(1, g2.half_width, N);
    double worst = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const double x = gl.coord(i), y = gl.coord(j);
            const cd want = Ki({t1 * x + t2 * y, -t2 * x + t1 * y}) * gl.spacing();
            worst = std::max(worst, std::abs(R.entries(i, j) - want));
        }
    CHECK(worst / R.entries.cwiseAbs().maxCoeff() < 1e-6);

    CHECK_THROWS_AS(op_fio_rotated(a, phi, 1.0, 1.0, 1e-9), config_error);
}

TEST_CASE("reformulated pairing") {
    const GridSpec g3(3, 4.0, 8);
    const GridSpec g1(1, 4.0, 8);
    const PhaseSpec phi = PhaseSpec::bilinear(1);
    const SampledFunction f = gaussian_on(g1, {0}, {0.85}, {g1.freq_step()});
    const SampledFunction g = gaussian_on(g1, {0}, {1.1}, {-g1.freq_step()});

    ReformulationWindows w;
    w.chi = gaussian_on(g3, {0, 0, 0}, {1.0, 1.0, 1.0});
    const double n2 = l2_norm(w.chi);
    for (auto& v : w.chi.values) v /= n2;
    w.chi1 = gaussian_on(g1, {0}, {0.9});
    w.chi2 = gaussian_on(g1, {0}, {0.9});
    for (SampledFunction* chi : {&w.chi1, &w.chi2}) {
        double l1 = 0.0;
        for (const cd& v : chi->values) l1 += std::abs(v);
        l1 *= g1.spacing();
        for (auto& v : chi->values) v /= l1;
    }

    // zero amplitude pairs to zero, exactly
    SampledFunction zero(g3, Domain::space);
    CHECK(stft_reformulation_pair(zero, phi, f, g, w) == cd(0.0, 0.0));

    // conjugate-linearity in g and linearity in a
    const SampledFunction a = gaussian_on(g3, {0, 0, 0}, {1.1, 1.1, 0.9});
    const cd lam(0.7, 1.3);
    SampledFunction ascale = a;
    for (auto& v : ascale.values) v *= lam;
    const cd base = stft_reformulation_pair(a, phi, f, g, w);
    CHECK(std::abs(stft_reformulation_pair(ascale, phi, f, g, w) - lam * base) < 1e-12);
    SampledFunction gscale = g;
    for (auto& v : gscale.values) v *= lam;
    CHECK(std::abs(stft_reformulation_pair(a, phi, f, gscale, w) - std::conj(lam) * base) <
          1e-12);

    // the central identity, tightening with resolution
    const ReformulationReport r8 = reformulation_identity_error(a, phi, f, g, w);
    CHECK(r8.rel_error < 1e-3);

    const GridSpec g3f(3, 4.0, 16);
    const GridSpec g1f(1, 4.0, 16);
    ReformulationWindows wf;
    wf.chi = gaussian_on(g3f, {0, 0, 0}, {1.0, 1.0, 1.0});
    const double n2f = l2_norm(wf.chi);
    for (auto& v : wf.chi.values) v /= n2f;
    wf.chi1 = gaussian_on(g1f, {0}, {0.9});
    wf.chi2 = gaussian_on(g1f, {0}, {0.9});
    for (SampledFunction* chi : {&wf.chi1, &wf.chi2}) {
        double l1 = 0.0;
        for (const cd& v : chi->values) l1 += std::abs(v);
        l1 *= g1f.spacing();
        for (auto& v : chi->values) v /= l1;
    }
    const ReformulationReport r16 = reformulation_identity_error(
        gaussian_on(g3f, {0, 0, 0}, {1.1, 1.1, 0.9}), phi, gaussian_on(g1f, {0}, {0.85}, {g1f.freq_step()}),
        gaussian_on(g1f, {0}, {1.1}, {-g1f.freq_step()}), wf);
    CHECK(r16.rel_error < r8.rel_error);

    CHECK_THROWS_AS(stft_reformulation_pair(gaussian_on(GridSpec(3, 4.0, 32), {0, 0, 0}, {1, 1, 1}),
                                            phi, gaussian_on(GridSpec(1, 4.0, 32), {0}, {1}),
                                            gaussian_on(GridSpec(1, 4.0, 32), {0}, {1}), w),
                    config_error);
}

TEST_CASE("two construction paths agree for every bundled phase family") {
    const GridSpec g3(3, 4.0, 8);
    const SampledFunction a = gaussian_on(g3, {0, 0, 0}, {1.0, 1.1, 0.9});

    Eigen::MatrixXd A = PhaseSpec::bilinear(1).A;
    A(0, 0) = 0.4;
    A(1, 1) = -0.3;
    const PhaseSpec quad = PhaseSpec::quadratic(1, 1, 1, A, Eigen::Vector3d(0.1, 0.0, -0.2));
    std::vector<Eigen::VectorXd> freqs{Eigen::Vector3d(0.8, -0.5, 0.6)};
    const PhaseSpec pert = PhaseSpec::perturbed(PhaseSpec::bilinear(1), 0.15, freqs, {0.3});

    for (const PhaseSpec* phi : {&quad, &pert}) {
        const OperatorMatrix T = op_fio(a, *phi, 1e-1);
        const SampledFunction K = fio_kernel(a, *phi, 1e-1);
        const OperatorMatrix TK = kernel_to_operator(K, T.source);
        CHECK(max_abs_diff(T.entries, TK.entries) < 1e-10);
    }

    // perturbed phases stay nondegenerate for small trig amplitude
    const GridSpec gd(3, 4.0, 8);
    const double d = nondegeneracy(pert, gd, DetBlock::full);
    CHECK(d > 0.5);
    CHECK(d < 1.0);  // the trig part genuinely moves the determinant
}

TEST_CASE("reformulated pairing with a perturbed phase") {
    const GridSpec g3(3, 4.0, 8);
    const GridSpec g1(1, 4.0, 8);
    std::vector<Eigen::VectorXd> freqs{Eigen::Vector3d(0.7, -0.4, 0.5)};
    const PhaseSpec pert = PhaseSpec::perturbed(PhaseSpec::bilinear(1), 0.1, freqs, {0.2});

    ReformulationWindows w;
    w.chi = gaussian_on(g3, {0, 0, 0}, {1.0, 1.0, 1.0});
    const double n2 = l2_norm(w.chi);
    for (auto& v : w.chi.values) v /= n2;
    w.chi1 = gaussian_on(g1, {0}, {0.9});
    w.chi2 = gaussian_on(g1, {0}, {0.9});
    for (SampledFunction* chi : {&w.chi1, &w.chi2}) {
        double l1 = 0.0;
        for (const cd& v : chi->values) l1 += std::abs(v);
        l1 *= g1.spacing();
        for (auto& v : chi->values) v /= l1;
    }
    const SampledFunction a = gaussian_on(g3, {0, 0, 0}, {1.1, 1.1, 0.9});
    const SampledFunction f = gaussian_on(g1, {0}, {0.85}, {g1.freq_step()});
    const SampledFunction g = gaussian_on(g1, {0}, {1.1}, {-g1.freq_step()});
    const ReformulationReport rep = reformulation_identity_error(a, pert, f, g, w);
    CHECK(rep.rel_error < 1e-2);
}

TEST_CASE("kernel phase-space samples match the wave-packet pairing") {
    const GridSpec g1 = GridSpec::self_dual(1, 16);
    const GridSpec g3(3, g1.half_width, 16);
    const PhaseSpec phi = PhaseSpec::bilinear(1);
    const WindowSpec chi1 = WindowSpec::gaussian(g1, 0.6);
    const WindowSpec chi2 = WindowSpec::gaussian(g1, 0.65);

    SampledFunction zero(g3, Domain::space);
    std::vector<LatticeSample> origin{{{8}, {8}, {8}, {8}}};
    CHECK(kernel_stft_identity(zero, phi, chi1, chi2, origin, 1e-3, 1e-9) == 0.0);

    Rng rng(67);
    std::vector<LatticeSample> samples;
    for (int i = 0; i < 10; ++i) {
        auto draw = [&]() {
            return std::vector<int>{8 + static_cast<int>(std::floor(rng.uniform(-2.0, 3.0)))};
        };
        samples.push_back({draw(), draw(), draw(), draw()});
    }
    const SampledFunction a = gaussian_on(g3, {0, 0, 0}, {1.0, 1.0, 1.0});
    CHECK(kernel_stft_identity(a, phi, chi1, chi2, samples, 1e-3, 1e-9) < 1e-6);
}

TEST_CASE("symbol and kernel phase-space magnitudes agree") {
    const GridSpec g2 = GridSpec::self_dual(2, 32);
    const WindowSpec chi = WindowSpec::gaussian(g2, 1.0);

    SampledFunction zero(g2, Domain::space);
    std::vector<LatticeSample> origin{{{16}, {16}, {16}, {16}}};
    CHECK(symbol_kernel_stft_check(zero, 0.0, chi, origin) == 0.0);

    // an off-center, anisotropic symbol pins the sign conventions
    const SampledFunction a = gaussian_on(g2, {0.4, -0.3}, {1.0, 0.9});
    Rng rng(71);
    std::vector<LatticeSample> samples;
    for (int i = 0; i < 10; ++i) {
        auto draw = [&]() {
            return std::vector<int>{16 + static_cast<int>(std::floor(rng.uniform(-4.0, 5.0)))};
        };
        samples.push_back({draw(), draw(), draw(), draw()});
    }
    for (double t : {0.0, 0.5, 1.0}) CHECK(symbol_kernel_stft_check(a, t, chi, samples) < 1e-6);
    CHECK_THROWS_AS(symbol_kernel_stft_check(a, 0.25, chi, samples), config_error);
}

TEST_CASE("dilated gaussian transform closed form") {
    // at t = 1 the closed form at the origin is sqrt(pi)
    CHECK(std::abs(std::pow(kPi, 0.5) * 1.0 * std::pow(2.0 - 1.0, -0.5) - 1.7724538509055160273) <
          1e-15);

    // adapted boxes keep the profile resolved for every t
    for (double t : {0.1, 0.4, 1.0}) {
        const double alpha = (2.0 - t * t) / (t * t);
        const double L = std::sqrt(kPi * 128.0 / (4.0 * alpha));
        CHECK(gaussian_identity_check({t}, GridSpec(1, L, 128)) < 1e-8);
    }

    // the fixed L = 8 box resolves the upper half of the t range
    CHECK(gaussian_identity_check({0.5, 0.6, 0.7, 0.8, 0.9, 1.0}, GridSpec(1, 8.0, 128)) < 1e-8);

    CHECK_THROWS_AS(gaussian_identity_check({0.0}, GridSpec(1, 8.0, 64)), config_error);
    CHECK_THROWS_AS(gaussian_identity_check({-0.5}, GridSpec(1, 8.0, 64)), config_error);
}

TEST_CASE("fitness gates reject unusable inputs") {
    const GridSpec g3(3, 4.0, 8);
    const PhaseSpec phi = PhaseSpec::bilinear(1);
    // a heavily off-center Gaussian has a visible periodic seam
    const SampledFunction bad = gaussian_on(g3, {2.5, 0, 0}, {1.0, 1.0, 1.0});
    CHECK_THROWS_AS(op_fio(bad, phi), numeric_error);

    // non-self-dual grids are rejected by the quantization route
    const SampledFunction sym = gaussian_on(GridSpec(2, 8.0, 32), {0, 0}, {1.0, 1.0});
    CHECK_THROWS_AS(op_pseudo(sym, 0.0), numeric_error);

    // x-Nyquist content blocks off-lattice interpolation and the transfer
    const GridSpec g2 = GridSpec::self_dual(2, 16);
    const int N = 16;
    SampledFunction alt(g2, Domain::space);
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) {
            const double env = std::exp(-0.5 * g2.coord(k) * g2.coord(k));
            alt.values[static_cast<std::size_t>(i) * N + k] = cd((i % 2 ? -1.0 : 1.0) * env, 0.0);
        }
    CHECK_THROWS_AS(op_pseudo(alt, 0.5), numeric_error);
    CHECK_NOTHROW(op_pseudo(alt, 0.0));  // no interpolation needed at t = 0
    CHECK_THROWS_AS(quantization_transfer(alt, 0.0, 1.0), numeric_error);
}
