#include "tfop/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tfop {

void ExponentSpec::validate() const {
    if (values.empty() || values.size() > 4)
        throw config_error("ExponentSpec: 1..4 exponents expected");
    for (double p : values)
        if (!(p >= 1.0)) throw config_error("ExponentSpec: exponents must lie in [1, inf]");
}

namespace {

void require_exponent(double p, const char* who) {
    if (!(p >= 1.0)) throw config_error(std::string(who) + ": exponent must lie in [1, inf]");
}

std::vector<double> steps_for_axes(const GridSpec& grid, int total_axes) {
    // Phase-space array convention: first grid.dim axes carry spacing h, the
    // rest carry the frequency step.
    std::vector<double> steps(static_cast<std::size_t>(total_axes), grid.spacing());
    for (int a = grid.dim; a < total_axes; ++a)
        steps[static_cast<std::size_t>(a)] = grid.freq_step();
    return steps;
}

double measure_of(const std::vector<int>& axes, const std::vector<double>& steps) {
    double m = 1.0;
    for (int a : axes) m *= steps[static_cast<std::size_t>(a)];
    return m;
}

std::vector<int> complement(const std::vector<int>& axes, int lo, int hi) {
    std::vector<int> out;
    for (int a = lo; a < hi; ++a)
        if (std::find(axes.begin(), axes.end(), a) == axes.end()) out.push_back(a);
    return out;
}

std::vector<int> offset_axes(const std::vector<int>& axes, int offset) {
    std::vector<int> out = axes;
    for (int& a : out) a += offset;
    return out;
}

}  // namespace

double nested_reduce(std::vector<double> magnitude, std::vector<int> shape,
                     const std::vector<ReductionLevel>& levels) {
    std::vector<int> alive(shape.size());
    std::iota(alive.begin(), alive.end(), 0);

    for (const auto& level : levels) {
        require_exponent(level.p, "nested_reduce");
        // Map original axis ids to current array positions.
        std::vector<int> pos;
        for (int a : level.axes) {
            auto it = std::find(alive.begin(), alive.end(), a);
            if (it == alive.end()) throw config_error("nested_reduce: axis reduced twice");
            pos.push_back(static_cast<int>(it - alive.begin()));
        }
        std::sort(pos.begin(), pos.end());

        if (pos.empty()) {
            // Identity level (empty block); nothing to consume.
            continue;
        }

        std::vector<int> cur_shape;
        for (int a : alive) cur_shape.push_back(shape[static_cast<std::size_t>(a)]);
        const auto strides = row_major_strides(cur_shape);

        std::vector<int> keep_pos = complement(pos, 0, static_cast<int>(cur_shape.size()));
        std::vector<int> out_shape, red_shape;
        std::vector<std::size_t> out_strides, red_strides;
        for (int ppos : keep_pos) {
            out_shape.push_back(cur_shape[static_cast<std::size_t>(ppos)]);
            out_strides.push_back(strides[static_cast<std::size_t>(ppos)]);
        }
        for (int ppos : pos) {
            red_shape.push_back(cur_shape[static_cast<std::size_t>(ppos)]);
            red_strides.push_back(strides[static_cast<std::size_t>(ppos)]);
        }

        std::size_t out_count = 1;
        for (int n : out_shape) out_count *= static_cast<std::size_t>(n);
        std::vector<double> out(out_count, 0.0);
        const bool is_sup = std::isinf(level.p);

        std::vector<int> oidx(out_shape.size(), 0);
        for (std::size_t o = 0; o < out_count; ++o) {
            std::size_t base = 0;
            for (std::size_t a = 0; a < out_shape.size(); ++a)
                base += out_strides[a] * static_cast<std::size_t>(oidx[a]);
            double acc = 0.0;
            std::vector<int> ridx(red_shape.size(), 0);
            while (true) {
                std::size_t off = base;
                for (std::size_t a = 0; a < red_shape.size(); ++a)
                    off += red_strides[a] * static_cast<std::size_t>(ridx[a]);
                const double v = magnitude[off];
                if (is_sup)
                    acc = std::max(acc, v);
                else
                    acc += std::pow(v, level.p);
                std::size_t a = 0;
                for (; a < red_shape.size(); ++a) {
                    if (++ridx[a] < red_shape[a]) break;
                    ridx[a] = 0;
                }
                if (a == red_shape.size()) break;
            }
            out[o] = is_sup ? acc : std::pow(level.measure * acc, 1.0 / level.p);
            for (int a = static_cast<int>(out_shape.size()) - 1; a >= 0; --a) {
                if (++oidx[static_cast<std::size_t>(a)] < out_shape[static_cast<std::size_t>(a)]) break;
                oidx[static_cast<std::size_t>(a)] = 0;
            }
        }

        magnitude = std::move(out);
        std::vector<int> next_alive;
        for (int ppos : keep_pos) next_alive.push_back(alive[static_cast<std::size_t>(ppos)]);
        alive = std::move(next_alive);
    }

    if (!alive.empty()) throw config_error("nested_reduce: levels do not cover all axes");
    return magnitude.empty() ? 0.0 : magnitude[0];
}

std::vector<double> weighted_magnitude(const StftArray& V, const WeightSpec& omega) {
    const std::vector<double> w = tabulate_phase_space_weight(omega, V.grid);
    std::vector<double> mag(V.values.size());
    for (std::size_t i = 0; i < mag.size(); ++i) {
        const cd v = V.values[i];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw numeric_error("weighted_magnitude: NaN in STFT array");
        mag[i] = std::abs(v) * w[i];
    }
    return mag;
}

double modulation_norm(const StftArray& V, double p, double q, const WeightSpec& omega) {
    require_exponent(p, "modulation_norm");
    require_exponent(q, "modulation_norm");
    const int d = V.grid.dim;
    std::vector<int> shape(static_cast<std::size_t>(2 * d), V.grid.points_per_axis);
    const auto steps = steps_for_axes(V.grid, 2 * d);

    std::vector<int> pos(static_cast<std::size_t>(d)), freq(static_cast<std::size_t>(d));
    std::iota(pos.begin(), pos.end(), 0);
    std::iota(freq.begin(), freq.end(), d);

    std::vector<ReductionLevel> levels = {
        {pos, p, measure_of(pos, steps)},
        {freq, q, measure_of(freq, steps)},
    };
    return nested_reduce(weighted_magnitude(V, omega), shape, levels);
}

double coorbit_norm(const StftArray& V, const SubspacePartition& part, const ExponentSpec& exps,
                    const WeightSpec& omega) {
    exps.validate();
    if (exps.values.size() != 4) throw config_error("coorbit_norm: four exponents required");
    const int d = V.grid.dim;
    for (int a : part.position_block2)
        if (a < 0 || a >= d) throw config_error("coorbit_norm: position axis out of range");
    for (int a : part.dual_block2)
        if (a < 0 || a >= d) throw config_error("coorbit_norm: dual axis out of range");

    std::vector<int> shape(static_cast<std::size_t>(2 * d), V.grid.points_per_axis);
    const auto steps = steps_for_axes(V.grid, 2 * d);

    const std::vector<int> v2 = part.position_block2;
    const std::vector<int> v1 = complement(v2, 0, d);
    const std::vector<int> v4 = offset_axes(part.dual_block2, d);
    const std::vector<int> v3 = complement(v4, d, 2 * d);

    std::vector<ReductionLevel> levels = {
        {v1, exps.values[0], measure_of(v1, steps)},
        {v2, exps.values[1], measure_of(v2, steps)},
        {v3, exps.values[2], measure_of(v3, steps)},
        {v4, exps.values[3], measure_of(v4, steps)},
    };
    return nested_reduce(weighted_magnitude(V, omega), shape, levels);
}

double patch_norm(const SampledFunction& f, double lattice_step, const WindowSpec& chi_pou,
                  double p, double q, const WeightSpec& omega) {
    require_exponent(p, "patch_norm");
    require_exponent(q, "patch_norm");
    const GridSpec& grid = f.grid;
    if (!(grid == chi_pou.grid)) throw config_error("patch_norm: grid mismatch");
    if (omega.dim != 2 * grid.dim) throw config_error("patch_norm: weight dim must be 2n");
    const double h = grid.spacing();
    const double steps_per_patch = lattice_step / h;
    if (std::abs(steps_per_patch - std::lround(steps_per_patch)) > 1e-9)
        throw config_error("patch_norm: lattice_step must be a multiple of the grid spacing");
    const int stride = static_cast<int>(std::lround(steps_per_patch));
    const double copies = 2.0 * grid.half_width / lattice_step;
    if (std::abs(copies - std::lround(copies)) > 1e-9)
        throw config_error("patch_norm: lattice_step must divide the box period");
    const int M = static_cast<int>(std::lround(copies));

    const int d = grid.dim;
    const int N = grid.points_per_axis;

    // Partition-of-unity check.
    {
        std::vector<double> pou(f.values.size(), 0.0);
        MultiIndex alpha(std::vector<int>(d, M));
        do {
            std::vector<int> sh(static_cast<std::size_t>(d));
            for (int a = 0; a < d; ++a) sh[static_cast<std::size_t>(a)] = alpha.index()[a] * stride;
            const SampledFunction t = shift_lattice(chi_pou.values, sh);
            for (std::size_t i = 0; i < pou.size(); ++i) pou[i] += t.values[i].real();
        } while (alpha.next());
        for (double v : pou)
            if (std::abs(v - 1.0) > 1e-10)
                throw numeric_error("patch_norm: window translates do not form a partition of unity");
    }

    // Accumulate sum_alpha |fhat_alpha(xi) w(x_alpha, xi)|^p per frequency.
    const std::size_t P = grid.point_count();
    std::vector<double> acc(P, 0.0);
    const bool inf_p = std::isinf(p);
    std::vector<double> wpt(static_cast<std::size_t>(2 * d));
    MultiIndex alpha(std::vector<int>(d, M));
    do {
        std::vector<int> sh(static_cast<std::size_t>(d));
        for (int a = 0; a < d; ++a) sh[static_cast<std::size_t>(a)] = alpha.index()[a] * stride;
        const SampledFunction chi_t = shift_lattice(chi_pou.values, sh);
        SampledFunction fa(grid, Domain::space);
        for (std::size_t i = 0; i < fa.values.size(); ++i)
            fa.values[i] = f.values[i] * chi_t.values[i];
        const SampledFunction fa_hat = forward_dft(fa);

        // Patch center wrapped into the box.
        for (int a = 0; a < d; ++a) {
            const int idx = grid.wrap(N / 2 + alpha.index()[a] * stride);
            wpt[static_cast<std::size_t>(a)] = grid.coord(idx);
        }
        MultiIndex k(std::vector<int>(d, N));
        std::size_t kf = 0;
        do {
            for (int a = 0; a < d; ++a)
                wpt[static_cast<std::size_t>(d + a)] = grid.freq(k.index()[a]);
            const double m = std::abs(fa_hat.values[kf]) * omega.eval(wpt);
            if (inf_p)
                acc[kf] = std::max(acc[kf], m);
            else
                acc[kf] += std::pow(m, p);
            ++kf;
        } while (k.next());
    } while (alpha.next());

    double sw = 1.0;
    for (int a = 0; a < d; ++a) sw *= grid.freq_step();
    const bool inf_q = std::isinf(q);
    double out = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
        const double F = inf_p ? acc[i] : std::pow(acc[i], 1.0 / p);
        if (inf_q)
            out = std::max(out, F);
        else
            out += std::pow(F, q);
    }
    return inf_q ? out : std::pow(sw * out, 1.0 / q);
}

double amplitude_norm(const StftArray& Va, AmplitudeVariant variant, const AmplitudeDims& dims,
                      const SubspacePartition& part, double p, double q, const WeightSpec& omega) {
    require_exponent(p, "amplitude_norm");
    require_exponent(q, "amplitude_norm");
    const int D = dims.D();
    if (Va.grid.dim != D) throw config_error("amplitude_norm: array dim does not match dims");
    const int N = dims.N();
    std::vector<int> shape(static_cast<std::size_t>(2 * D), Va.grid.points_per_axis);
    const auto steps = steps_for_axes(Va.grid, 2 * D);

    // Fixed axis groups (array numbering: positions 0..D-1, duals D..2D-1).
    std::vector<int> pos_xy, pos_zeta, dual_xieta, dual_z;
    for (int a = 0; a < N; ++a) pos_xy.push_back(a);
    for (int a = N; a < D; ++a) pos_zeta.push_back(a);
    for (int a = 0; a < N; ++a) dual_xieta.push_back(D + a);
    for (int a = N; a < D; ++a) dual_z.push_back(D + a);

    auto dual_split = [&](const std::vector<int>& block2_ambient) {
        std::pair<std::vector<int>, std::vector<int>> out;  // (V1', V2') in array axes
        for (int a : block2_ambient) {
            if (a < 0 || a >= D) throw config_error("amplitude_norm: dual axis out of range");
            out.second.push_back(D + a);
        }
        std::vector<int> block2 = out.second;
        out.first = complement(block2, D, 2 * D);
        return out;
    };
    auto pos_split = [&](const std::vector<int>& block2_ambient) {
        std::pair<std::vector<int>, std::vector<int>> out;  // (V1, V2) in array axes
        for (int a : block2_ambient) {
            if (a < 0 || a >= D) throw config_error("amplitude_norm: position axis out of range");
            out.second.push_back(a);
        }
        out.first = complement(out.second, 0, D);
        return out;
    };

    std::vector<ReductionLevel> levels;
    switch (variant) {
        case AmplitudeVariant::sup_sup_l1: {
            const auto [tau, u] = dual_split(part.dual_block2);
            if (static_cast<int>(u.size()) != dims.m)
                throw config_error("amplitude_norm: sup_sup_l1 needs dim V2' = m");
            std::vector<int> inner = pos_zeta;
            inner.insert(inner.end(), tau.begin(), tau.end());
            levels = {{inner, kInf, 1.0},
                      {u, 1.0, measure_of(u, steps)},
                      {pos_xy, kInf, 1.0}};
            break;
        }
        case AmplitudeVariant::sup_sup_l1_z:
        case AmplitudeVariant::sup_sup_l1_xi:
        case AmplitudeVariant::sup_sup_l1_eta: {
            std::vector<int> u_ambient;
            if (variant == AmplitudeVariant::sup_sup_l1_z) {
                for (int a = N; a < D; ++a) u_ambient.push_back(a);  // z
            } else if (variant == AmplitudeVariant::sup_sup_l1_xi) {
                if (dims.m != dims.n2)
                    throw config_error("amplitude_norm: the xi-block variant requires m = n2");
                for (int a = 0; a < dims.n2; ++a) u_ambient.push_back(a);  // xi
            } else {
                if (dims.m != dims.n1)
                    throw config_error("amplitude_norm: the eta-block variant requires m = n1");
                for (int a = dims.n2; a < N; ++a) u_ambient.push_back(a);  // eta
            }
            const auto [tau, u] = dual_split(u_ambient);
            std::vector<int> inner = pos_zeta;
            inner.insert(inner.end(), tau.begin(), tau.end());
            levels = {{inner, kInf, 1.0},
                      {u, 1.0, measure_of(u, steps)},
                      {pos_xy, kInf, 1.0}};
            break;
        }
        case AmplitudeVariant::lp_sup_z_l1_lp:
            levels = {{dual_xieta, p, measure_of(dual_xieta, steps)},
                      {dual_z, kInf, 1.0},
                      {pos_zeta, 1.0, measure_of(pos_zeta, steps)},
                      {pos_xy, p, measure_of(pos_xy, steps)}};
            break;
        case AmplitudeVariant::lp_sup_zeta_l1_lp:
            levels = {{dual_xieta, p, measure_of(dual_xieta, steps)},
                      {pos_zeta, kInf, 1.0},
                      {dual_z, 1.0, measure_of(dual_z, steps)},
                      {pos_xy, p, measure_of(pos_xy, steps)}};
            break;
        case AmplitudeVariant::sup_lp_l1: {
            const auto [t_ax, rho] = pos_split(part.position_block2);
            const auto [tau, u] = dual_split(part.dual_block2);
            if (static_cast<int>(t_ax.size()) != N)
                throw config_error("amplitude_norm: sup_lp_l1 needs dim V1 = N");
            std::vector<int> joint = t_ax;
            joint.insert(joint.end(), tau.begin(), tau.end());
            levels = {{rho, kInf, 1.0},
                      {joint, p, measure_of(joint, steps)},
                      {u, 1.0, measure_of(u, steps)}};
            break;
        }
        case AmplitudeVariant::sup_lp_lq_l1: {
            const auto [t_ax, rho] = pos_split(part.position_block2);
            const auto [tau, u] = dual_split(part.dual_block2);
            if (static_cast<int>(t_ax.size()) != N)
                throw config_error("amplitude_norm: sup_lp_lq_l1 needs dim V1 = N");
            levels = {{rho, kInf, 1.0},
                      {t_ax, p, measure_of(t_ax, steps)},
                      {tau, q, measure_of(tau, steps)},
                      {u, 1.0, measure_of(u, steps)}};
            break;
        }
    }
    return nested_reduce(weighted_magnitude(Va, omega), shape, levels);
}

double cnp_norm(const GaussianAmplitude& a, const GridSpec& grid3n, int Nd, double p,
                const WeightSpec& omega) {
    require_exponent(p, "cnp_norm");
    if (Nd < 0) throw config_error("cnp_norm: derivative order must be non-negative");
    if (grid3n.dim % 3 != 0) throw config_error("cnp_norm: grid dim must be 3n");
    if (grid3n.dim != a.dim()) throw config_error("cnp_norm: amplitude dim mismatch");
    if (omega.dim != grid3n.dim) throw config_error("cnp_norm: weight dim must be 3n");
    const int n = grid3n.dim / 3;
    const int d = grid3n.dim;
    const int N = grid3n.points_per_axis;

    // Enumerate |alpha| <= Nd over d axes.
    std::vector<std::vector<int>> alphas;
    std::vector<int> alpha(static_cast<std::size_t>(d), 0);
    while (true) {
        int total = 0;
        for (int v : alpha) total += v;
        if (total <= Nd) alphas.push_back(alpha);
        std::size_t ax = 0;
        for (; ax < alpha.size(); ++ax) {
            if (++alpha[ax] <= Nd) break;
            alpha[ax] = 0;
        }
        if (ax == alpha.size()) break;
    }

    std::vector<int> y_axes, xz_axes;
    for (int ax = n; ax < 2 * n; ++ax) y_axes.push_back(ax);
    for (int ax = 0; ax < n; ++ax) xz_axes.push_back(ax);
    for (int ax = 2 * n; ax < d; ++ax) xz_axes.push_back(ax);
    double xz_measure = 1.0;
    for (std::size_t i = 0; i < xz_axes.size(); ++i) xz_measure *= grid3n.spacing();

    std::vector<int> shape(static_cast<std::size_t>(d), N);
    std::vector<double> wtab;
    {
        wtab.reserve(grid3n.point_count());
        std::vector<double> x(static_cast<std::size_t>(d));
        MultiIndex mi(shape);
        do {
            for (int ax = 0; ax < d; ++ax) x[static_cast<std::size_t>(ax)] = grid3n.coord(mi.index()[ax]);
            wtab.push_back(omega.eval(x));
        } while (mi.next());
    }

    double out = 0.0;
    std::vector<double> x(static_cast<std::size_t>(d));
    for (const auto& al : alphas) {
        std::vector<double> mag;
        mag.reserve(grid3n.point_count());
        MultiIndex mi(shape);
        std::size_t flat = 0;
        do {
            for (int ax = 0; ax < d; ++ax) x[static_cast<std::size_t>(ax)] = grid3n.coord(mi.index()[ax]);
            mag.push_back(std::abs(a.derivative(al, x)) * wtab[flat++]);
        } while (mi.next());
        std::vector<ReductionLevel> levels = {{y_axes, kInf, 1.0}, {xz_axes, p, xz_measure}};
        out += nested_reduce(std::move(mag), shape, levels);
    }
    return out;
}

double evaluate_norm(const SampledFunction& f, const NormSpec& spec) {
    const StftArray V = stft(f, spec.window);
    if (spec.kind == NormSpec::Kind::modulation)
        return modulation_norm(V, spec.p, spec.q, spec.omega);
    ExponentSpec e;
    e.values = {spec.p, spec.q, spec.r, spec.s};
    return coorbit_norm(V, spec.part, e, spec.omega);
}

EmbeddingReport embedding_ratio(const std::vector<SampledFunction>& family,
                                const NormSpec& spec1, const NormSpec& spec2) {
    if (family.empty()) throw config_error("embedding_ratio: empty family");
    EmbeddingReport rep;
    for (const auto& f : family) {
        const double n1 = evaluate_norm(f, spec1);
        const double n2 = evaluate_norm(f, spec2);
        if (!(n1 > 0.0)) throw numeric_error("embedding_ratio: zero denominator norm in family");
        rep.ratios.push_back(n2 / n1);
        rep.max_ratio = std::max(rep.max_ratio, n2 / n1);
    }
    return rep;
}

}  // namespace tfop
