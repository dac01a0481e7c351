#include "tfop/stft.hpp"

#include <algorithm>
#include <cmath>

#include "tfop/parallel.hpp"

namespace tfop {

namespace {

void require_real_window(const SampledFunction& w, const char* who) {
    for (const cd& v : w.values)
        if (v.imag() != 0.0) throw numeric_error(std::string(who) + ": window must be real-valued");
}

void require_window_face(const SampledFunction& w, double tol, const char* who) {
    const BoundaryReport rep = boundary_report(w);
    if (rep.max_abs <= 0.0) throw numeric_error(std::string(who) + ": zero window");
    if (rep.max_face_value > tol * rep.max_abs)
        throw numeric_error(std::string(who) + ": window wraps beyond tolerance");
}

// Windowed slice y -> f(y) chi(y - x_j) for the lattice translate given by
// per-axis steps s_a = j_a - N/2.
std::vector<cd> windowed_slice(const SampledFunction& f, const SampledFunction& window,
                               const std::vector<int>& pos_idx) {
    const int N = f.grid.points_per_axis;
    const int d = f.grid.dim;
    std::vector<cd> g(f.values.size());
    const auto strides = row_major_strides(std::vector<int>(d, N));
    MultiIndex mi(std::vector<int>(d, N));
    std::size_t flat = 0;
    do {
        std::size_t src = 0;
        for (int a = 0; a < d; ++a) {
            const int shift = pos_idx[static_cast<std::size_t>(a)] - N / 2;
            src += strides[static_cast<std::size_t>(a)] *
                   static_cast<std::size_t>(f.grid.wrap(mi.index()[a] - shift));
        }
        g[flat] = f.values[flat] * window.values[src];
        ++flat;
    } while (mi.next());
    return g;
}

}  // namespace

StftArray stft(const SampledFunction& f, const SampledFunction& window, double window_tol) {
    if (!(f.grid == window.grid)) throw config_error("stft: f and window grids differ");
    if (f.domain != Domain::space) throw config_error("stft: input must be space-domain");
    require_finite(f, "stft");
    require_real_window(window, "stft");
    require_window_face(window, window_tol, "stft");

    const int d = f.grid.dim;
    const std::size_t P = f.grid.point_count();
    if (P * P > 20'000'000)
        throw numeric_error("stft: phase-space array too large for this desk-scale build");

    StftArray V;
    V.grid = f.grid;
    V.window = window;
    V.values.assign(P * P, cd(0.0, 0.0));

    std::vector<int> axes(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) axes[static_cast<std::size_t>(a)] = a;

    // Collect position multi-indices once so workers can jump to any slot.
    std::vector<std::vector<int>> positions;
    positions.reserve(P);
    MultiIndex mi(std::vector<int>(d, f.grid.points_per_axis));
    do {
        positions.push_back(mi.index());
    } while (mi.next());

    parallel_for(P, [&](std::size_t j) {
        const std::vector<cd> g = windowed_slice(f, window, positions[j]);
        const std::vector<cd> G = transform_axes(g, f.grid, axes, true);
        std::copy(G.begin(), G.end(), V.values.begin() + static_cast<std::ptrdiff_t>(j * P));
    });
    return V;
}

StftArray stft(const SampledFunction& f, const WindowSpec& chi, double window_tol) {
    return stft(f, chi.values, window_tol);
}

cd stft_point(const SampledFunction& f, const SampledFunction& window,
              const std::vector<int>& pos_index, const std::vector<double>& xi) {
    const int d = f.grid.dim;
    const int N = f.grid.points_per_axis;
    const std::vector<cd> g = windowed_slice(f, window, pos_index);
    cd acc(0.0, 0.0);
    MultiIndex mi(std::vector<int>(d, N));
    std::size_t flat = 0;
    do {
        double phase = 0.0;
        for (int a = 0; a < d; ++a)
            phase -= f.grid.coord(mi.index()[a]) * xi[static_cast<std::size_t>(a)];
        acc += g[flat++] * cd(std::cos(phase), std::sin(phase));
    } while (mi.next());
    double c = 1.0;
    for (int a = 0; a < d; ++a) c *= f.grid.spacing() / std::sqrt(kTwoPi);
    return acc * c;
}

SampledFunction istft(const StftArray& V, const SampledFunction& window) {
    const double n2 = l2_norm(window);
    if (!(n2 > 0.0)) throw numeric_error("istft: zero window");
    const GridSpec& grid = V.grid;
    const int d = grid.dim;
    const int N = grid.points_per_axis;
    const std::size_t P = grid.point_count();

    std::vector<int> axes(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) axes[static_cast<std::size_t>(a)] = a;
    const auto strides = row_major_strides(std::vector<int>(d, N));

    SampledFunction f(grid, Domain::space);
    double hw = 1.0;
    for (int a = 0; a < d; ++a) hw *= grid.spacing();

    std::vector<cd> slice(P);
    MultiIndex pos(std::vector<int>(d, N));
    std::size_t j = 0;
    do {
        std::copy(V.values.begin() + static_cast<std::ptrdiff_t>(j * P),
                  V.values.begin() + static_cast<std::ptrdiff_t>((j + 1) * P), slice.begin());
        // (2pi)^{-d/2} (pi/L)^d sum_k V(x_j, xi_k) e^{i y xi_k}
        const std::vector<cd> contrib = transform_axes(slice, grid, axes, false);
        MultiIndex yi(std::vector<int>(d, N));
        std::size_t flat = 0;
        do {
            std::size_t src = 0;
            for (int a = 0; a < d; ++a) {
                const int shift = pos.index()[a] - N / 2;
                src += strides[static_cast<std::size_t>(a)] *
                       static_cast<std::size_t>(grid.wrap(yi.index()[a] - shift));
            }
            f.values[flat] += contrib[flat] * window.values[src];
            ++flat;
        } while (yi.next());
        ++j;
    } while (pos.next());

    const double scale = hw / (n2 * n2);
    for (cd& v : f.values) v *= scale;
    return f;
}

SampledFunction istft(const StftArray& V, const WindowSpec& chi) { return istft(V, chi.values); }

double covariance_check(const SampledFunction& f, const WindowSpec& chi,
                        const std::vector<double>& x0, const std::vector<double>& xi0) {
    const GridSpec& grid = f.grid;
    const int d = grid.dim;
    std::vector<int> xsteps(static_cast<std::size_t>(d)), ksteps(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        const double sx = x0[static_cast<std::size_t>(a)] / grid.spacing();
        const double sk = xi0[static_cast<std::size_t>(a)] / grid.freq_step();
        if (std::abs(sx - std::lround(sx)) > 1e-9 || std::abs(sk - std::lround(sk)) > 1e-9)
            throw config_error("covariance_check: shift/modulation must sit on the lattice");
        xsteps[static_cast<std::size_t>(a)] = static_cast<int>(std::lround(sx));
        ksteps[static_cast<std::size_t>(a)] = static_cast<int>(std::lround(sk));
    }

    // g = M_{xi0} T_{x0} f on the lattice.
    SampledFunction g = shift_lattice(f, xsteps);
    {
        MultiIndex mi(std::vector<int>(d, grid.points_per_axis));
        std::size_t flat = 0;
        do {
            double phase = 0.0;
            for (int a = 0; a < d; ++a)
                phase += grid.coord(mi.index()[a]) * xi0[static_cast<std::size_t>(a)];
            g.values[flat++] *= cd(std::cos(phase), std::sin(phase));
        } while (mi.next());
    }

    const StftArray Vg = stft(g, chi);
    const StftArray Vf = stft(f, chi);

    const int N = grid.points_per_axis;
    const auto strides = row_major_strides(std::vector<int>(d, N));
    double worst = 0.0;
    MultiIndex pos(std::vector<int>(d, N));
    std::size_t j = 0;
    do {
        std::size_t js = 0;
        for (int a = 0; a < d; ++a)
            js += strides[static_cast<std::size_t>(a)] *
                  static_cast<std::size_t>(grid.wrap(pos.index()[a] - xsteps[static_cast<std::size_t>(a)]));
        MultiIndex fr(std::vector<int>(d, N));
        std::size_t k = 0;
        do {
            std::size_t ks = 0;
            for (int a = 0; a < d; ++a)
                ks += strides[static_cast<std::size_t>(a)] *
                      static_cast<std::size_t>(grid.wrap(fr.index()[a] - ksteps[static_cast<std::size_t>(a)]));
            const double diff = std::abs(std::abs(Vg.at(j, k)) - std::abs(Vf.at(js, ks)));
            worst = std::max(worst, diff);
            ++k;
        } while (fr.next());
        ++j;
    } while (pos.next());
    return worst;
}

SampledFunction h_profile(const SampledFunction& f, const WindowSpec& chi,
                          const WeightSpec& omega, double p, double window_tol) {
    if (!(p >= 1.0)) throw config_error("h_profile: p must be in [1, inf]");
    const StftArray V = stft(f, chi, window_tol);
    const GridSpec& grid = f.grid;
    const int d = grid.dim;
    const std::size_t P = grid.point_count();
    const std::vector<double> w = tabulate_phase_space_weight(omega, grid);

    double hw = 1.0;
    for (int a = 0; a < d; ++a) hw *= grid.spacing();

    SampledFunction H(grid, Domain::frequency);
    const bool inf_p = std::isinf(p);
    for (std::size_t k = 0; k < P; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < P; ++j) {
            const double m = std::abs(V.at(j, k)) * w[j * P + k];
            if (inf_p)
                acc = std::max(acc, m);
            else
                acc += std::pow(m, p);
        }
        H.values[k] = inf_p ? cd(acc, 0.0) : cd(std::pow(hw * acc, 1.0 / p), 0.0);
    }
    return H;
}

double tensor_lift_check(const SampledFunction& f, const WindowSpec& chi,
                         const WindowSpec& chi1, double t, const WeightSpec& omega,
                         double window_tol) {
    const GridSpec& G = f.grid;
    const GridSpec& G0 = chi1.grid;
    if (G.points_per_axis != G0.points_per_axis || G.half_width != G0.half_width)
        throw config_error("tensor_lift_check: grids must share L and N");
    const int n = G.dim;
    const int n0 = G0.dim;
    const GridSpec GP(n0 + n, G.half_width, G.points_per_axis);
    const int N = G.points_per_axis;

    // f0(x, y) = f(y); chi0 = chi1 (x) tensor chi (y).
    SampledFunction f0(GP, Domain::space), chi0(GP, Domain::space);
    {
        MultiIndex mi(std::vector<int>(n0 + n, N));
        const auto fstr = row_major_strides(std::vector<int>(n, N));
        const auto cstr = row_major_strides(std::vector<int>(n0, N));
        std::size_t flat = 0;
        do {
            const auto& idx = mi.index();
            std::size_t fy = 0, cx = 0;
            for (int a = 0; a < n; ++a)
                fy += fstr[static_cast<std::size_t>(a)] * static_cast<std::size_t>(idx[n0 + a]);
            for (int a = 0; a < n0; ++a)
                cx += cstr[static_cast<std::size_t>(a)] * static_cast<std::size_t>(idx[a]);
            f0.values[flat] = f.values[fy];
            chi0.values[flat] = chi1.values.values[cx] * chi.values.values[fy];
            ++flat;
        } while (mi.next());
    }

    const StftArray V0 = stft(f0, chi0, window_tol);
    const StftArray Vf = stft(f, chi, window_tol);
    const SampledFunction chi1_hat = forward_dft(chi1.values);

    const std::vector<double> w = tabulate_phase_space_weight(omega, G);
    const std::size_t Pf = G.point_count();

    double worst = 0.0;
    MultiIndex pos(std::vector<int>(n0 + n, N));
    std::size_t j = 0;
    do {
        std::size_t jx = 0, jy = 0;
        {
            const auto& idx = pos.index();
            const auto cstr = row_major_strides(std::vector<int>(n0, N));
            const auto fstr = row_major_strides(std::vector<int>(n, N));
            for (int a = 0; a < n0; ++a)
                jx += cstr[static_cast<std::size_t>(a)] * static_cast<std::size_t>(idx[a]);
            for (int a = 0; a < n; ++a)
                jy += fstr[static_cast<std::size_t>(a)] * static_cast<std::size_t>(idx[n0 + a]);
        }
        MultiIndex fr(std::vector<int>(n0 + n, N));
        std::size_t k = 0;
        do {
            std::size_t kx = 0, ky = 0;
            double xi2 = 1.0;  // <xi>^2 accumulator
            {
                const auto& idx = fr.index();
                const auto cstr = row_major_strides(std::vector<int>(n0, N));
                const auto fstr = row_major_strides(std::vector<int>(n, N));
                for (int a = 0; a < n0; ++a) {
                    kx += cstr[static_cast<std::size_t>(a)] * static_cast<std::size_t>(idx[a]);
                    const double xi = G0.freq(idx[a]);
                    xi2 += xi * xi;
                }
                for (int a = 0; a < n; ++a)
                    ky += fstr[static_cast<std::size_t>(a)] * static_cast<std::size_t>(idx[n0 + a]);
            }
            const double w0 = w[jy * Pf + ky] * std::pow(xi2, 0.5 * t);
            const double lhs = std::abs(V0.at(j, static_cast<std::size_t>(k))) * w0;
            const double rhs = std::abs(Vf.at(jy, ky)) * w[jy * Pf + ky] *
                               std::abs(chi1_hat.values[kx]) * std::pow(xi2, 0.5 * t);
            worst = std::max(worst, std::abs(lhs - rhs));
            ++k;
        } while (fr.next());
        ++j;
    } while (pos.next());
    return worst;
}

}  // namespace tfop
