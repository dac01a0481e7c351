#include "tfop/grid.hpp"

#include <algorithm>
#include <cmath>

namespace tfop {

GridSpec::GridSpec(int dim_, double half_width_, int points_per_axis_)
    : dim(dim_), half_width(half_width_), points_per_axis(points_per_axis_) {
    if (dim < 1) throw config_error("GridSpec: dim must be positive");
    if (!(half_width > 0.0)) throw config_error("GridSpec: half_width must be positive");
    if (points_per_axis < 2 || points_per_axis % 2 != 0)
        throw config_error("GridSpec: points_per_axis must be even and >= 2");
}

bool GridSpec::is_self_dual(double rel_tol) const {
    return std::abs(spacing() - freq_step()) <= rel_tol * spacing();
}

GridSpec GridSpec::self_dual(int dim, int points_per_axis) {
    // h = pi/L  <=>  L = sqrt(pi*N/2).
    const double L = std::sqrt(kPi * points_per_axis / 2.0);
    return GridSpec(dim, L, points_per_axis);
}

std::size_t GridSpec::point_count() const {
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(points_per_axis);
    return n;
}

SampledFunction::SampledFunction(GridSpec g, Domain d)
    : grid(g), domain(d), values(g.point_count(), cd(0.0, 0.0)) {}

cd& SampledFunction::at(const std::vector<int>& idx) {
    const auto strides = row_major_strides(std::vector<int>(grid.dim, grid.points_per_axis));
    std::size_t flat = 0;
    for (int a = 0; a < grid.dim; ++a) flat += strides[a] * static_cast<std::size_t>(idx[a]);
    return values[flat];
}

const cd& SampledFunction::at(const std::vector<int>& idx) const {
    return const_cast<SampledFunction&>(*this).at(idx);
}

MultiIndex::MultiIndex(std::vector<int> shape) : shape_(std::move(shape)), idx_(shape_.size(), 0) {
    for (int n : shape_) count_ *= static_cast<std::size_t>(n);
}

bool MultiIndex::next() {
    ++flat_;
    for (int a = static_cast<int>(shape_.size()) - 1; a >= 0; --a) {
        if (++idx_[a] < shape_[a]) return true;
        idx_[a] = 0;
    }
    return false;
}

std::vector<std::size_t> row_major_strides(const std::vector<int>& shape) {
    std::vector<std::size_t> strides(shape.size(), 1);
    for (int a = static_cast<int>(shape.size()) - 2; a >= 0; --a)
        strides[a] = strides[a + 1] * static_cast<std::size_t>(shape[a + 1]);
    return strides;
}

void require_finite(const SampledFunction& f, const char* who) {
    for (const cd& v : f.values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw numeric_error(std::string(who) + ": non-finite input value");
    }
}

namespace {

// Centered twiddle table W[k*N + i] = exp(-2*pi*i*(i-N/2)(k-N/2)/N). The
// integer phase is reduced mod N before evaluating, which keeps lattice
// identities (Parseval, round trips) at machine precision.
std::vector<cd> twiddle_table(int N, bool forward) {
    std::vector<cd> W(static_cast<std::size_t>(N) * N);
    const double sign = forward ? -1.0 : 1.0;
    for (int k = 0; k < N; ++k) {
        for (int i = 0; i < N; ++i) {
            const long long m = static_cast<long long>(i - N / 2) * (k - N / 2);
            const long long r = ((m % N) + N) % N;
            const double angle = sign * kTwoPi * static_cast<double>(r) / N;
            W[static_cast<std::size_t>(k) * N + i] = cd(std::cos(angle), std::sin(angle));
        }
    }
    return W;
}

// Apply a length-N linear map along one axis of a rectangular array.
void apply_along_axis(std::vector<cd>& data, const std::vector<int>& shape, int axis,
                      const std::vector<cd>& W) {
    const int N = shape[axis];
    const auto strides = row_major_strides(shape);
    const std::size_t stride = strides[axis];
    std::size_t outer = 1;
    for (std::size_t a = 0; a < shape.size(); ++a)
        if (static_cast<int>(a) != axis) outer *= static_cast<std::size_t>(shape[a]);

    std::vector<int> outer_shape;
    std::vector<std::size_t> outer_strides;
    for (std::size_t a = 0; a < shape.size(); ++a) {
        if (static_cast<int>(a) == axis) continue;
        outer_shape.push_back(shape[a]);
        outer_strides.push_back(strides[a]);
    }

    std::vector<cd> line(static_cast<std::size_t>(N));
    std::vector<int> oidx(outer_shape.size(), 0);
    for (std::size_t o = 0; o < outer; ++o) {
        std::size_t base = 0;
        for (std::size_t a = 0; a < outer_shape.size(); ++a)
            base += outer_strides[a] * static_cast<std::size_t>(oidx[a]);
        for (int i = 0; i < N; ++i) line[static_cast<std::size_t>(i)] = data[base + stride * i];
        for (int k = 0; k < N; ++k) {
            cd acc(0.0, 0.0);
            const cd* row = &W[static_cast<std::size_t>(k) * N];
            for (int i = 0; i < N; ++i) acc += row[i] * line[static_cast<std::size_t>(i)];
            data[base + stride * k] = acc;
        }
        for (int a = static_cast<int>(outer_shape.size()) - 1; a >= 0; --a) {
            if (++oidx[a] < outer_shape[a]) break;
            oidx[a] = 0;
        }
    }
}

}  // namespace

std::vector<cd> transform_axes(const std::vector<cd>& values, const GridSpec& grid,
                               const std::vector<int>& axes, bool forward) {
    const int N = grid.points_per_axis;
    std::vector<int> shape(grid.dim, N);
    std::vector<cd> out = values;
    const std::vector<cd> W = twiddle_table(N, forward);
    const double per_axis = forward ? (grid.spacing() / std::sqrt(kTwoPi))
                                    : (grid.freq_step() / std::sqrt(kTwoPi));
    for (int axis : axes) {
        if (axis < 0 || axis >= grid.dim) throw config_error("transform_axes: axis out of range");
        apply_along_axis(out, shape, axis, W);
        for (cd& v : out) v *= per_axis;
    }
    return out;
}

SampledFunction forward_dft(const SampledFunction& f) {
    if (f.domain != Domain::space)
        throw config_error("forward_dft: input must be space-domain");
    require_finite(f, "forward_dft");
    std::vector<int> axes(f.grid.dim);
    for (int a = 0; a < f.grid.dim; ++a) axes[a] = a;
    SampledFunction out(f.grid, Domain::frequency);
    out.values = transform_axes(f.values, f.grid, axes, true);
    return out;
}

SampledFunction inverse_dft(const SampledFunction& F) {
    if (F.domain != Domain::frequency)
        throw config_error("inverse_dft: input must be frequency-domain");
    require_finite(F, "inverse_dft");
    std::vector<int> axes(F.grid.dim);
    for (int a = 0; a < F.grid.dim; ++a) axes[a] = a;
    SampledFunction out(F.grid, Domain::space);
    out.values = transform_axes(F.values, F.grid, axes, false);
    return out;
}

cd quadrature_integral(const SampledFunction& f) {
    require_finite(f, "quadrature_integral");
    cd acc(0.0, 0.0);
    for (const cd& v : f.values) acc += v;
    double w = 1.0;
    for (int a = 0; a < f.grid.dim; ++a) w *= f.axis_step();
    return acc * w;
}

double l2_norm(const SampledFunction& f) {
    double acc = 0.0;
    for (const cd& v : f.values) acc += std::norm(v);
    double w = 1.0;
    for (int a = 0; a < f.grid.dim; ++a) w *= f.axis_step();
    return std::sqrt(acc * w);
}

SampledFunction sample(const GridSpec& grid, Domain domain,
                       const std::function<cd(const std::vector<double>&)>& fn) {
    SampledFunction f(grid, domain);
    std::vector<double> x(grid.dim);
    MultiIndex mi(std::vector<int>(grid.dim, grid.points_per_axis));
    std::size_t flat = 0;
    do {
        for (int a = 0; a < grid.dim; ++a) x[a] = f.node(mi.index()[a]);
        f.values[flat++] = fn(x);
    } while (mi.next());
    return f;
}

SampledFunction shift_lattice(const SampledFunction& f, const std::vector<int>& steps) {
    if (static_cast<int>(steps.size()) != f.grid.dim)
        throw config_error("shift_lattice: step count mismatch");
    SampledFunction g(f.grid, f.domain);
    const int N = f.grid.points_per_axis;
    const auto strides = row_major_strides(std::vector<int>(f.grid.dim, N));
    MultiIndex mi(std::vector<int>(f.grid.dim, N));
    std::size_t flat = 0;
    do {
        std::size_t src = 0;
        for (int a = 0; a < f.grid.dim; ++a)
            src += strides[a] * static_cast<std::size_t>(f.grid.wrap(mi.index()[a] - steps[a]));
        g.values[flat++] = f.values[src];
    } while (mi.next());
    return g;
}

TrigInterpolator::TrigInterpolator(const SampledFunction& f) : grid_(f.grid) {
    if (f.domain != Domain::space)
        throw config_error("TrigInterpolator: input must be space-domain");
    std::vector<int> axes(grid_.dim);
    for (int a = 0; a < grid_.dim; ++a) axes[a] = a;
    coeffs_ = transform_axes(f.values, grid_, axes, true);
}

cd TrigInterpolator::operator()(const std::vector<double>& x) const {
    const int N = grid_.points_per_axis;
    // Separable mode sum: (2pi)^{-d/2} s^d sum_k F_k e^{i<x, xi_k>}.
    std::vector<std::vector<cd>> phase(grid_.dim, std::vector<cd>(N));
    const double c = grid_.freq_step() / std::sqrt(kTwoPi);
    for (int a = 0; a < grid_.dim; ++a)
        for (int k = 0; k < N; ++k) {
            const double ang = x[a] * grid_.freq(k);
            phase[a][static_cast<std::size_t>(k)] = cd(std::cos(ang), std::sin(ang)) * c;
        }
    cd acc(0.0, 0.0);
    MultiIndex mi(std::vector<int>(grid_.dim, N));
    std::size_t flat = 0;
    do {
        cd w = coeffs_[flat++];
        for (int a = 0; a < grid_.dim; ++a) w *= phase[a][static_cast<std::size_t>(mi.index()[a])];
        acc += w;
    } while (mi.next());
    return acc;
}

BoundaryReport boundary_report(const SampledFunction& f) {
    BoundaryReport rep;
    for (const cd& v : f.values) rep.max_abs = std::max(rep.max_abs, std::abs(v));
    const int N = f.grid.points_per_axis;
    const auto strides = row_major_strides(std::vector<int>(f.grid.dim, N));
    MultiIndex mi(std::vector<int>(f.grid.dim, N));
    std::size_t flat = 0;
    do {
        const auto& idx = mi.index();
        for (int a = 0; a < f.grid.dim; ++a) {
            if (idx[a] == 0) {
                // Low face; its periodic partner is the high face i = N-1.
                const std::size_t partner = flat + strides[a] * static_cast<std::size_t>(N - 1);
                const double lo = std::abs(f.values[flat]);
                const double hi = std::abs(f.values[partner]);
                rep.max_face_value = std::max({rep.max_face_value, lo, hi});
                rep.max_face_jump =
                    std::max(rep.max_face_jump, std::abs(f.values[flat] - f.values[partner]));
            }
        }
        ++flat;
    } while (mi.next());
    return rep;
}

}  // namespace tfop
