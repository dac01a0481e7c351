#include "tfop/operators.hpp"

#include <algorithm>
#include <cmath>

#include "tfop/parallel.hpp"

namespace tfop {

namespace {

std::vector<std::vector<int>> all_indices(int d, int N) {
    std::vector<std::vector<int>> out;
    out.reserve(static_cast<std::size_t>(std::pow(N, d)));
    MultiIndex mi(std::vector<int>(static_cast<std::size_t>(d), N));
    do {
        out.push_back(mi.index());
    } while (mi.next());
    return out;
}

void require_amplitude_fit(const SampledFunction& a, double tol, const char* who) {
    require_finite(a, who);
    const BoundaryReport rep = boundary_report(a);
    const double scale = std::max(1.0, rep.max_abs);
    if (rep.max_face_jump > tol * scale)
        throw numeric_error(std::string(who) +
                            ": amplitude fitness failure (periodic face jump " +
                            std::to_string(rep.max_face_jump) + ")");
}

void require_self_dual(const GridSpec& grid, const char* who) {
    if (!grid.is_self_dual())
        throw numeric_error(std::string(who) +
                            ": grid must be self-dual (spacing == frequency step)");
}

// Relative spectral mass on the unpaired Nyquist bins along the given axes.
double nyquist_mass(const std::vector<cd>& modes, const GridSpec& grid,
                    const std::vector<int>& axes) {
    const int N = grid.points_per_axis;
    double total = 0.0, edge = 0.0;
    MultiIndex mi(std::vector<int>(static_cast<std::size_t>(grid.dim), N));
    std::size_t flat = 0;
    do {
        const double m = std::abs(modes[flat++]);
        total += m;
        for (int a : axes)
            if (mi.index()[a] == 0) {
                edge += m;
                break;
            }
    } while (mi.next());
    return total > 0.0 ? edge / total : 0.0;
}

// J(theta) = int_0^1 (1-t) e^{i t theta} dt = -(e^{i theta} - 1 - i theta)/theta^2.
cd taylor_kernel(double theta) {
    if (std::abs(theta) < 1e-4) {
        // series: 1/2 + i theta/6 - theta^2/24 - i theta^3/120
        return cd(0.5 - theta * theta / 24.0, theta / 6.0 - theta * theta * theta / 120.0);
    }
    const cd e(std::cos(theta), std::sin(theta));
    return -(e - cd(1.0, 0.0) - cd(0.0, theta)) / (theta * theta);
}

}  // namespace

// --- PhaseSpec ---------------------------------------------------------------

double PhaseSpec::value(const Eigen::VectorXd& X) const {
    double v = 0.5 * X.dot(A * X) + b.dot(X);
    if (family == Family::perturbed) {
        for (std::size_t i = 0; i < trig_freqs.size(); ++i)
            v += eps * std::cos(trig_freqs[i].dot(X) + trig_phases[i]);
    }
    return v;
}

Eigen::VectorXd PhaseSpec::gradient(const Eigen::VectorXd& X) const {
    Eigen::VectorXd g = A * X + b;
    if (family == Family::perturbed) {
        for (std::size_t i = 0; i < trig_freqs.size(); ++i)
            g -= eps * std::sin(trig_freqs[i].dot(X) + trig_phases[i]) * trig_freqs[i];
    }
    return g;
}

Eigen::MatrixXd PhaseSpec::hessian(const Eigen::VectorXd& X) const {
    Eigen::MatrixXd H = A;
    if (family == Family::perturbed) {
        for (std::size_t i = 0; i < trig_freqs.size(); ++i)
            H -= eps * std::cos(trig_freqs[i].dot(X) + trig_phases[i]) *
                 (trig_freqs[i] * trig_freqs[i].transpose());
    }
    return H;
}

PhaseSpec PhaseSpec::bilinear(int n) {
    PhaseSpec p;
    p.family = Family::bilinear;
    p.n1 = p.n2 = p.m = n;
    const int D = 3 * n;
    p.A = Eigen::MatrixXd::Zero(D, D);
    for (int i = 0; i < n; ++i) {
        p.A(i, 2 * n + i) = 1.0;       // x-zeta
        p.A(2 * n + i, i) = 1.0;
        p.A(n + i, 2 * n + i) = -1.0;  // y-zeta
        p.A(2 * n + i, n + i) = -1.0;
    }
    p.b = Eigen::VectorXd::Zero(D);
    return p;
}

PhaseSpec PhaseSpec::quadratic(int n1, int n2, int m, const Eigen::MatrixXd& A,
                               const Eigen::VectorXd& b) {
    const int D = n1 + n2 + m;
    if (A.rows() != D || A.cols() != D || b.size() != D)
        throw config_error("PhaseSpec::quadratic: shape mismatch");
    if (!A.isApprox(A.transpose(), 1e-12))
        throw config_error("PhaseSpec::quadratic: A must be symmetric");
    PhaseSpec p;
    p.family = Family::quadratic;
    p.n1 = n1;
    p.n2 = n2;
    p.m = m;
    p.A = A;
    p.b = b;
    return p;
}

PhaseSpec PhaseSpec::perturbed(const PhaseSpec& core, double eps,
                               std::vector<Eigen::VectorXd> freqs, std::vector<double> phases) {
    if (freqs.size() != phases.size())
        throw config_error("PhaseSpec::perturbed: freqs/phases length mismatch");
    PhaseSpec p = core;
    p.family = Family::perturbed;
    p.eps = eps;
    p.trig_freqs = std::move(freqs);
    p.trig_phases = std::move(phases);
    return p;
}

PhaseEval phase_eval(const PhaseSpec& phi, const Eigen::VectorXd& X) {
    if (X.size() != phi.total_dim()) throw config_error("phase_eval: point dimension mismatch");
    PhaseEval out;
    out.value = phi.value(X);
    out.gradient = phi.gradient(X);
    const Eigen::MatrixXd H = phi.hessian(X);
    const int nx = phi.n2, ny = phi.n1, nz = phi.m;
    out.xx = H.block(0, 0, nx, nx);
    out.xy = H.block(0, nx, nx, ny);
    out.xz = H.block(0, nx + ny, nx, nz);
    out.yy = H.block(nx, nx, ny, ny);
    out.yz = H.block(nx, nx + ny, ny, nz);
    out.zz = H.block(nx + ny, nx + ny, nz, nz);
    return out;
}

double nondegeneracy(const PhaseSpec& phi, const GridSpec& grid, DetBlock which) {
    const int D = phi.total_dim();
    if (grid.dim != D) throw config_error("nondegeneracy: grid dim must equal n1+n2+m");
    const int nx = phi.n2, ny = phi.n1, nz = phi.m;
    switch (which) {
        case DetBlock::full:
            if (nx + nz != ny + nz) throw config_error("nondegeneracy: full block not square");
            break;
        case DetBlock::yz:
            if (ny != nz) throw config_error("nondegeneracy: y-zeta block not square");
            break;
        case DetBlock::xz:
            if (nx != nz) throw config_error("nondegeneracy: x-zeta block not square");
            break;
        case DetBlock::zz:
            break;
    }

    const int N = grid.points_per_axis;
    double worst = std::numeric_limits<double>::infinity();
    Eigen::VectorXd X(D);
    MultiIndex mi(std::vector<int>(static_cast<std::size_t>(D), N));
    do {
        for (int a = 0; a < D; ++a) X(a) = grid.coord(mi.index()[a]);
        const Eigen::MatrixXd H = phi.hessian(X);
        Eigen::MatrixXd block;
        switch (which) {
            case DetBlock::full: {
                block.resize(nx + nz, ny + nz);
                block.topLeftCorner(nx, ny) = H.block(0, nx, nx, ny);            // x,y
                block.topRightCorner(nx, nz) = H.block(0, nx + ny, nx, nz);      // x,zeta
                block.bottomLeftCorner(nz, ny) = H.block(nx + ny, nx, nz, ny);   // zeta,y
                block.bottomRightCorner(nz, nz) = H.block(nx + ny, nx + ny, nz, nz);
                break;
            }
            case DetBlock::yz:
                block = H.block(nx, nx + ny, ny, nz);
                break;
            case DetBlock::xz:
                block = H.block(0, nx + ny, nx, nz);
                break;
            case DetBlock::zz:
                block = H.block(nx + ny, nx + ny, nz, nz);
                break;
        }
        worst = std::min(worst, std::abs(block.determinant()));
        if (phi.family != PhaseSpec::Family::perturbed) break;  // Hessian constant
    } while (mi.next());
    return worst;
}

SampledFunction OperatorMatrix::apply(const SampledFunction& f) const {
    if (!(f.grid == source)) throw config_error("OperatorMatrix::apply: grid mismatch");
    require_finite(f, "OperatorMatrix::apply");
    SampledFunction out(target, Domain::space);
    Eigen::Map<const Eigen::VectorXcd> fv(f.values.data(), static_cast<Eigen::Index>(f.values.size()));
    Eigen::Map<Eigen::VectorXcd> ov(out.values.data(), static_cast<Eigen::Index>(out.values.size()));
    ov = entries * fv;
    return out;
}

double PhaseTaylorSplit::remainder(const Eigen::VectorXd& X1) const {
    // int_0^1 (1-t) <phi''(X + t X1) X1, X1> dt; the quadratic part is exact
    // and the trig part has the closed form Re[e^{i theta0} J(theta1)].
    double r = 0.5 * X1.dot(phase->A * X1);
    if (phase->family == PhaseSpec::Family::perturbed) {
        for (std::size_t i = 0; i < phase->trig_freqs.size(); ++i) {
            const double th0 = phase->trig_freqs[i].dot(X) + phase->trig_phases[i];
            const double th1 = phase->trig_freqs[i].dot(X1);
            const cd J = taylor_kernel(th1);
            r -= phase->eps * th1 * th1 * (cd(std::cos(th0), std::sin(th0)) * J).real();
        }
    }
    return r;
}

PhaseTaylorSplit phase_taylor_split(const PhaseSpec& phi, const Eigen::VectorXd& X) {
    PhaseTaylorSplit s;
    s.phase = &phi;
    s.X = X;
    s.value = phi.value(X);
    s.gradient = phi.gradient(X);
    return s;
}

// --- FIO constructors -----------------------------------------------------------

OperatorMatrix op_fio(const SampledFunction& a, const PhaseSpec& phi, double fitness_tol) {
    const int n1 = phi.n1, n2 = phi.n2, m = phi.m;
    const int D = phi.total_dim();
    if (a.grid.dim != D) throw config_error("op_fio: amplitude dim must be n2+n1+m");
    require_amplitude_fit(a, fitness_tol, "op_fio");

    const GridSpec& G = a.grid;
    const int N = G.points_per_axis;
    OperatorMatrix T;
    T.source = GridSpec(n1, G.half_width, N);
    T.target = GridSpec(n2, G.half_width, N);
    const auto rows = all_indices(n2, N);
    const auto cols = all_indices(n1, N);
    const auto zetas = all_indices(m, N);
    T.entries.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));

    const auto strides = row_major_strides(std::vector<int>(static_cast<std::size_t>(D), N));
    double c = std::pow(kTwoPi, -0.5 * (n1 + n2)) * std::pow(G.spacing(), m);
    const double src_w = std::pow(G.spacing(), n1);

    parallel_for(rows.size(), [&](std::size_t r) {
        Eigen::VectorXd X(D);
        for (int i = 0; i < n2; ++i) X(i) = G.coord(rows[r][static_cast<std::size_t>(i)]);
        std::size_t base_r = 0;
        for (int i = 0; i < n2; ++i)
            base_r += strides[static_cast<std::size_t>(i)] *
                      static_cast<std::size_t>(rows[r][static_cast<std::size_t>(i)]);
        for (std::size_t cidx = 0; cidx < cols.size(); ++cidx) {
            for (int i = 0; i < n1; ++i) X(n2 + i) = G.coord(cols[cidx][static_cast<std::size_t>(i)]);
            std::size_t base_c = base_r;
            for (int i = 0; i < n1; ++i)
                base_c += strides[static_cast<std::size_t>(n2 + i)] *
                          static_cast<std::size_t>(cols[cidx][static_cast<std::size_t>(i)]);
            cd acc(0.0, 0.0);
            for (const auto& zi : zetas) {
                std::size_t flat = base_c;
                for (int i = 0; i < m; ++i) {
                    X(n2 + n1 + i) = G.coord(zi[static_cast<std::size_t>(i)]);
                    flat += strides[static_cast<std::size_t>(n2 + n1 + i)] *
                            static_cast<std::size_t>(zi[static_cast<std::size_t>(i)]);
                }
                const double ph = phi.value(X);
                acc += a.values[flat] * cd(std::cos(ph), std::sin(ph));
            }
            T.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cidx)) =
                acc * c * src_w;
        }
    });
    return T;
}

SampledFunction fio_kernel(const SampledFunction& a, const PhaseSpec& phi, double fitness_tol) {
    const int n1 = phi.n1, n2 = phi.n2, m = phi.m;
    const int D = phi.total_dim();
    if (a.grid.dim != D) throw config_error("fio_kernel: amplitude dim must be n2+n1+m");
    require_amplitude_fit(a, fitness_tol, "fio_kernel");

    const GridSpec& G = a.grid;
    const int N = G.points_per_axis;
    SampledFunction K(GridSpec(n2 + n1, G.half_width, N), Domain::space);
    const auto pts = all_indices(n2 + n1, N);
    const auto zetas = all_indices(m, N);
    const auto strides = row_major_strides(std::vector<int>(static_cast<std::size_t>(D), N));
    const double c = std::pow(kTwoPi, -0.5 * (n1 + n2)) * std::pow(G.spacing(), m);

    parallel_for(pts.size(), [&](std::size_t pidx) {
        Eigen::VectorXd X(D);
        std::size_t base = 0;
        for (int i = 0; i < n2 + n1; ++i) {
            X(i) = G.coord(pts[pidx][static_cast<std::size_t>(i)]);
            base += strides[static_cast<std::size_t>(i)] *
                    static_cast<std::size_t>(pts[pidx][static_cast<std::size_t>(i)]);
        }
        cd acc(0.0, 0.0);
        for (const auto& zi : zetas) {
            std::size_t flat = base;
            for (int i = 0; i < m; ++i) {
                X(n2 + n1 + i) = G.coord(zi[static_cast<std::size_t>(i)]);
                flat += strides[static_cast<std::size_t>(n2 + n1 + i)] *
                        static_cast<std::size_t>(zi[static_cast<std::size_t>(i)]);
            }
            const double ph = phi.value(X);
            acc += a.values[flat] * cd(std::cos(ph), std::sin(ph));
        }
        K.values[pidx] = acc * c;
    });
    return K;
}

SampledFunction lift_amplitude_xz(const SampledFunction& a2, int n1) {
    const int two_n = a2.grid.dim;
    if (two_n % 2 != 0) throw config_error("lift_amplitude_xz: amplitude dim must be 2n");
    const int n = two_n / 2;
    const int N = a2.grid.points_per_axis;
    SampledFunction a3(GridSpec(n + n1 + n, a2.grid.half_width, N), Domain::space);
    const auto s2 = row_major_strides(std::vector<int>(static_cast<std::size_t>(two_n), N));
    MultiIndex mi(std::vector<int>(static_cast<std::size_t>(n + n1 + n), N));
    std::size_t flat = 0;
    do {
        const auto& idx = mi.index();
        std::size_t src = 0;
        for (int i = 0; i < n; ++i)
            src += s2[static_cast<std::size_t>(i)] * static_cast<std::size_t>(idx[i]);
        for (int i = 0; i < n; ++i)
            src += s2[static_cast<std::size_t>(n + i)] * static_cast<std::size_t>(idx[n + n1 + i]);
        a3.values[flat++] = a2.values[src];
    } while (mi.next());
    return a3;
}

SampledFunction apply_kernel(const SampledFunction& K, const SampledFunction& f) {
    const int d = K.grid.dim;
    const int n1 = f.grid.dim;
    const int n2 = d - n1;
    if (n2 < 1) throw config_error("apply_kernel: kernel/function dims incompatible");
    if (K.grid.points_per_axis != f.grid.points_per_axis ||
        K.grid.half_width != f.grid.half_width)
        throw config_error("apply_kernel: grid mismatch");
    require_finite(f, "apply_kernel");
    const int N = K.grid.points_per_axis;
    const std::size_t rows = GridSpec(n2, K.grid.half_width, N).point_count();
    const std::size_t cols = f.grid.point_count();
    SampledFunction out(GridSpec(n2, K.grid.half_width, N), Domain::space);
    const double w = std::pow(f.grid.spacing(), n1);
    for (std::size_t r = 0; r < rows; ++r) {
        cd acc(0.0, 0.0);
        for (std::size_t ccol = 0; ccol < cols; ++ccol)
            acc += K.values[r * cols + ccol] * f.values[ccol];
        out.values[r] = acc * w;
    }
    return out;
}

OperatorMatrix kernel_to_operator(const SampledFunction& K, const GridSpec& source) {
    const int n1 = source.dim;
    const int n2 = K.grid.dim - n1;
    if (n2 < 1) throw config_error("kernel_to_operator: dims incompatible");
    OperatorMatrix T;
    T.source = source;
    T.target = GridSpec(n2, K.grid.half_width, K.grid.points_per_axis);
    const std::size_t rows = T.target.point_count();
    const std::size_t cols = source.point_count();
    const double w = std::pow(source.spacing(), n1);
    T.entries.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t ccol = 0; ccol < cols; ++ccol)
            T.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(ccol)) =
                K.values[r * cols + ccol] * w;
    return T;
}

// --- pseudo-differential operators ------------------------------------------------

namespace {

// F2^{-1} a on the (x, q) lattice plus x-axis mode data for off-lattice
// evaluation of the first block.
struct SymbolKernelData {
    int n = 1;
    GridSpec grid;           // 2n-dim symbol grid
    std::vector<cd> G;       // (F2^{-1} a)(x_j, q_l)
    std::vector<cd> Gmodes;  // forward transform of G along the x axes
};

SymbolKernelData symbol_kernel_data(const SampledFunction& a, bool need_modes) {
    if (a.grid.dim % 2 != 0) throw config_error("op_pseudo: symbol dim must be 2n");
    require_self_dual(a.grid, "op_pseudo");
    require_finite(a, "op_pseudo");
    SymbolKernelData d;
    d.n = a.grid.dim / 2;
    d.grid = a.grid;
    std::vector<int> xi_axes, x_axes;
    for (int i = 0; i < d.n; ++i) x_axes.push_back(i);
    for (int i = d.n; i < 2 * d.n; ++i) xi_axes.push_back(i);
    d.G = transform_axes(a.values, a.grid, xi_axes, false);
    if (need_modes) {
        d.Gmodes = transform_axes(d.G, a.grid, x_axes, true);
        if (nyquist_mass(d.Gmodes, a.grid, x_axes) > 1e-8)
            throw numeric_error(
                "op_pseudo: interpolation fitness failure (Nyquist content along x)");
    }
    return d;
}

// G(u, q_index) for arbitrary u via the x-axis modes.
cd eval_G_offgrid(const SymbolKernelData& d, const std::vector<double>& u,
                  const std::vector<int>& q_idx) {
    const int N = d.grid.points_per_axis;
    const int n = d.n;
    const auto strides = row_major_strides(std::vector<int>(static_cast<std::size_t>(2 * n), N));
    std::size_t base = 0;
    for (int i = 0; i < n; ++i)
        base += strides[static_cast<std::size_t>(n + i)] *
                static_cast<std::size_t>(q_idx[static_cast<std::size_t>(i)]);
    const double c = std::pow(d.grid.freq_step() / std::sqrt(kTwoPi), n);
    cd acc(0.0, 0.0);
    MultiIndex mi(std::vector<int>(static_cast<std::size_t>(n), N));
    do {
        std::size_t flat = base;
        double ang = 0.0;
        for (int i = 0; i < n; ++i) {
            flat += strides[static_cast<std::size_t>(i)] * static_cast<std::size_t>(mi.index()[i]);
            ang += u[static_cast<std::size_t>(i)] * d.grid.freq(mi.index()[i]);
        }
        acc += d.Gmodes[flat] * cd(std::cos(ang), std::sin(ang));
    } while (mi.next());
    return acc * c;
}

}  // namespace

SampledFunction pseudo_kernel(const SampledFunction& a, double t) {
    const bool on_lattice = (t == 0.0 || t == 1.0);
    SymbolKernelData d = symbol_kernel_data(a, !on_lattice);
    const int n = d.n;
    const int N = d.grid.points_per_axis;
    const GridSpec& G = d.grid;
    const auto strides = row_major_strides(std::vector<int>(static_cast<std::size_t>(2 * n), N));
    const double c = std::pow(kTwoPi, -0.5 * n);

    SampledFunction K(GridSpec(2 * n, G.half_width, N), Domain::space);
    const auto pts = all_indices(2 * n, N);
    parallel_for(pts.size(), [&](std::size_t p) {
        const auto& idx = pts[p];
        std::vector<int> q_idx(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            q_idx[static_cast<std::size_t>(i)] = G.wrap(idx[i] - idx[n + i] + N / 2);
        cd val;
        if (on_lattice) {
            std::size_t flat = 0;
            for (int i = 0; i < n; ++i) {
                const int xi = (t == 0.0) ? idx[i] : idx[n + i];
                flat += strides[static_cast<std::size_t>(i)] * static_cast<std::size_t>(xi);
                flat += strides[static_cast<std::size_t>(n + i)] *
                        static_cast<std::size_t>(q_idx[static_cast<std::size_t>(i)]);
            }
            val = d.G[flat];
        } else {
            std::vector<double> u(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                u[static_cast<std::size_t>(i)] =
                    (1.0 - t) * G.coord(idx[i]) + t * G.coord(idx[n + i]);
            val = eval_G_offgrid(d, u, q_idx);
        }
        K.values[p] = c * val;
    });
    return K;
}

OperatorMatrix op_pseudo(const SampledFunction& a, double t) {
    const int n = a.grid.dim / 2;
    const SampledFunction K = pseudo_kernel(a, t);
    return kernel_to_operator(K, GridSpec(n, a.grid.half_width, a.grid.points_per_axis));
}

OperatorMatrix op_pseudo_direct(const SampledFunction& a, double t) {
    if (a.grid.dim % 2 != 0) throw config_error("op_pseudo_direct: symbol dim must be 2n");
    require_self_dual(a.grid, "op_pseudo_direct");
    require_finite(a, "op_pseudo_direct");
    const int n = a.grid.dim / 2;
    const GridSpec& G = a.grid;
    const int N = G.points_per_axis;

    const bool on_lattice = (t == 0.0 || t == 1.0);
    std::vector<cd> modes;
    std::vector<int> x_axes;
    for (int i = 0; i < n; ++i) x_axes.push_back(i);
    if (!on_lattice) {
        modes = transform_axes(a.values, G, x_axes, true);
        if (nyquist_mass(modes, G, x_axes) > 1e-8)
            throw numeric_error(
                "op_pseudo_direct: interpolation fitness failure (Nyquist content along x)");
    }
    const auto strides = row_major_strides(std::vector<int>(static_cast<std::size_t>(2 * n), N));
    const auto rows = all_indices(n, N);
    const auto freqs = all_indices(n, N);

    OperatorMatrix T;
    T.source = GridSpec(n, G.half_width, N);
    T.target = T.source;
    T.entries.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    const double c = std::pow(kTwoPi, -static_cast<double>(n)) * std::pow(G.freq_step(), n) *
                     std::pow(G.spacing(), n);
    const double mode_c = std::pow(G.freq_step() / std::sqrt(kTwoPi), n);

    parallel_for(rows.size(), [&](std::size_t r) {
        for (std::size_t ccol = 0; ccol < rows.size(); ++ccol) {
            cd acc(0.0, 0.0);
            for (const auto& kf : freqs) {
                // symbol value at ((1-t)x + t y, xi_k)
                cd av;
                if (on_lattice) {
                    std::size_t flat = 0;
                    for (int i = 0; i < n; ++i) {
                        const int xi = (t == 0.0) ? rows[r][static_cast<std::size_t>(i)]
                                                  : rows[ccol][static_cast<std::size_t>(i)];
                        flat += strides[static_cast<std::size_t>(i)] * static_cast<std::size_t>(xi);
                        flat += strides[static_cast<std::size_t>(n + i)] *
                                static_cast<std::size_t>(kf[static_cast<std::size_t>(i)]);
                    }
                    av = a.values[flat];
                } else {
                    std::size_t base = 0;
                    for (int i = 0; i < n; ++i)
                        base += strides[static_cast<std::size_t>(n + i)] *
                                static_cast<std::size_t>(kf[static_cast<std::size_t>(i)]);
                    cd macc(0.0, 0.0);
                    MultiIndex mi(std::vector<int>(static_cast<std::size_t>(n), N));
                    do {
                        std::size_t flat = base;
                        double ang = 0.0;
                        for (int i = 0; i < n; ++i) {
                            flat += strides[static_cast<std::size_t>(i)] *
                                    static_cast<std::size_t>(mi.index()[i]);
                            const double u = (1.0 - t) * G.coord(rows[r][static_cast<std::size_t>(i)]) +
                                             t * G.coord(rows[ccol][static_cast<std::size_t>(i)]);
                            ang += u * G.freq(mi.index()[i]);
                        }
                        macc += modes[flat] * cd(std::cos(ang), std::sin(ang));
                    } while (mi.next());
                    av = macc * mode_c;
                }
                double ang = 0.0;
                for (int i = 0; i < n; ++i)
                    ang += (G.coord(rows[r][static_cast<std::size_t>(i)]) -
                            G.coord(rows[ccol][static_cast<std::size_t>(i)])) *
                           G.freq(kf[static_cast<std::size_t>(i)]);
                acc += av * cd(std::cos(ang), std::sin(ang));
            }
            T.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(ccol)) = acc * c;
        }
    });
    return T;
}

SampledFunction quantization_transfer(const SampledFunction& a, double s, double t) {
    if (a.grid.dim % 2 != 0) throw config_error("quantization_transfer: symbol dim must be 2n");
    require_finite(a, "quantization_transfer");
    if (s == t) return a;
    const int n = a.grid.dim / 2;
    const int N = a.grid.points_per_axis;

    // x-independent symbols are fixed points: <D_x, D_xi> a = 0.
    {
        const auto strides = row_major_strides(std::vector<int>(static_cast<std::size_t>(2 * n), N));
        bool constant_in_x = true;
        MultiIndex mi(std::vector<int>(static_cast<std::size_t>(2 * n), N));
        std::size_t flat = 0;
        do {
            std::size_t ref = flat;
            for (int i = 0; i < n; ++i)
                ref -= strides[static_cast<std::size_t>(i)] * static_cast<std::size_t>(mi.index()[i]);
            if (a.values[flat] != a.values[ref]) {
                constant_in_x = false;
                break;
            }
            ++flat;
        } while (mi.next());
        if (constant_in_x) return a;
    }

    std::vector<int> axes(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < 2 * n; ++i) axes[static_cast<std::size_t>(i)] = i;
    std::vector<cd> modes = transform_axes(a.values, a.grid, axes, true);
    if (nyquist_mass(modes, a.grid, axes) > 1e-8)
        throw numeric_error("quantization_transfer: aliasing fitness failure");

    // The x-side transform is the forward one while the kernel route pairs
    // the xi-slot with the inverse sign; under the unitary forward transform
    // on both axes the multiplier therefore carries (s - t).
    MultiIndex mi(std::vector<int>(static_cast<std::size_t>(2 * n), N));
    std::size_t flat = 0;
    do {
        double uv = 0.0;
        for (int i = 0; i < n; ++i)
            uv += a.grid.freq(mi.index()[i]) * a.grid.freq(mi.index()[n + i]);
        const double ang = (s - t) * uv;
        modes[flat++] *= cd(std::cos(ang), std::sin(ang));
    } while (mi.next());

    SampledFunction b(a.grid, a.domain);
    b.values = transform_axes(modes, a.grid, axes, false);
    return b;
}

OperatorMatrix op_fio_rotated(const SampledFunction& a, const PhaseSpec& phi, double t1,
                              double t2, double fitness_tol) {
    if (std::abs(t1 * t1 + t2 * t2 - 1.0) > 1e-12)
        throw config_error("op_fio_rotated: t1^2 + t2^2 must equal 1");
    if (a.grid.dim % 2 != 0) throw config_error("op_fio_rotated: amplitude dim must be 2n");
    const int n = a.grid.dim / 2;
    if (phi.n1 != n || phi.n2 != n || phi.m != n)
        throw config_error("op_fio_rotated: phase dims must equal n");
    require_amplitude_fit(a, fitness_tol, "op_fio_rotated");

    const GridSpec& G = a.grid;
    const int N = G.points_per_axis;
    const auto strides = row_major_strides(std::vector<int>(static_cast<std::size_t>(2 * n), N));
    const bool identity_pair = (t1 == 1.0 && t2 == 0.0);

    std::vector<cd> modes;
    std::vector<int> x_axes;
    for (int i = 0; i < n; ++i) x_axes.push_back(i);
    if (!identity_pair) {
        modes = transform_axes(a.values, G, x_axes, true);
        if (nyquist_mass(modes, G, x_axes) > 1e-8)
            throw numeric_error(
                "op_fio_rotated: interpolation fitness failure (Nyquist content along x)");
    }
    const double mode_c = std::pow(G.freq_step() / std::sqrt(kTwoPi), n);

    const auto rows = all_indices(n, N);
    const auto freqs = all_indices(n, N);
    OperatorMatrix T;
    T.source = GridSpec(n, G.half_width, N);
    T.target = T.source;
    T.entries.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    const double c = std::pow(kTwoPi, -static_cast<double>(n)) * std::pow(G.spacing(), 2 * n);

    parallel_for(rows.size(), [&](std::size_t r) {
        Eigen::VectorXd X(3 * n);
        for (std::size_t ccol = 0; ccol < rows.size(); ++ccol) {
            std::vector<double> u(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const double xi = G.coord(rows[r][static_cast<std::size_t>(i)]);
                const double yi = G.coord(rows[ccol][static_cast<std::size_t>(i)]);
                u[static_cast<std::size_t>(i)] = t1 * xi + t2 * yi;
                w[static_cast<std::size_t>(i)] = -t2 * xi + t1 * yi;
                X(i) = u[static_cast<std::size_t>(i)];
                X(n + i) = w[static_cast<std::size_t>(i)];
            }
            cd acc(0.0, 0.0);
            for (const auto& kf : freqs) {
                cd av;
                if (identity_pair) {
                    std::size_t flat = 0;
                    for (int i = 0; i < n; ++i) {
                        flat += strides[static_cast<std::size_t>(i)] *
                                static_cast<std::size_t>(rows[r][static_cast<std::size_t>(i)]);
                        flat += strides[static_cast<std::size_t>(n + i)] *
                                static_cast<std::size_t>(kf[static_cast<std::size_t>(i)]);
                    }
                    av = a.values[flat];
                } else {
                    std::size_t base = 0;
                    for (int i = 0; i < n; ++i)
                        base += strides[static_cast<std::size_t>(n + i)] *
                                static_cast<std::size_t>(kf[static_cast<std::size_t>(i)]);
                    cd macc(0.0, 0.0);
                    MultiIndex mi(std::vector<int>(static_cast<std::size_t>(n), N));
                    do {
                        std::size_t flat = base;
                        double ang = 0.0;
                        for (int i = 0; i < n; ++i) {
                            flat += strides[static_cast<std::size_t>(i)] *
                                    static_cast<std::size_t>(mi.index()[i]);
                            ang += u[static_cast<std::size_t>(i)] * G.freq(mi.index()[i]);
                        }
                        macc += modes[flat] * cd(std::cos(ang), std::sin(ang));
                    } while (mi.next());
                    av = macc * mode_c;
                }
                for (int i = 0; i < n; ++i) X(2 * n + i) = G.coord(kf[static_cast<std::size_t>(i)]);
                const double ph = phi.value(X);
                acc += av * cd(std::cos(ph), std::sin(ph));
            }
            T.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(ccol)) = acc * c;
        }
    });
    return T;
}

// --- STFT reformulation -----------------------------------------------------------

cd stft_reformulation_pair(const SampledFunction& a, const PhaseSpec& phi,
                           const SampledFunction& f, const SampledFunction& g,
                           const ReformulationWindows& windows) {
    if (phi.n1 != 1 || phi.n2 != 1 || phi.m != 1)
        throw config_error("stft_reformulation_pair: desk scale requires n1 = n2 = m = 1");
    if (a.grid.dim != 3) throw config_error("stft_reformulation_pair: amplitude dim must be 3");
    const int N = a.grid.points_per_axis;
    if (N > 16) throw config_error("stft_reformulation_pair: N <= 16 at desk scale");
    if (f.grid.dim != 1 || g.grid.dim != 1 ||
        f.grid.points_per_axis != N || g.grid.points_per_axis != N ||
        f.grid.half_width != a.grid.half_width || g.grid.half_width != a.grid.half_width)
        throw config_error("stft_reformulation_pair: grids must share L and N");
    require_finite(a, "stft_reformulation_pair");
    require_finite(f, "stft_reformulation_pair");
    require_finite(g, "stft_reformulation_pair");

    const GridSpec& G3 = a.grid;
    const GridSpec& G1 = f.grid;
    const double h = G3.spacing();
    const double fs = G3.freq_step();

    // Window normalizations per the construction: ||chi||_2 = ||chi_j||_1 = 1.
    {
        const double l2chi = l2_norm(windows.chi);
        double l1a = 0.0, l1b = 0.0;
        for (const cd& v : windows.chi1.values) l1a += std::abs(v);
        for (const cd& v : windows.chi2.values) l1b += std::abs(v);
        l1a *= h;
        l1b *= h;
        if (std::abs(l2chi - 1.0) > 1e-8 || std::abs(l1a - 1.0) > 1e-8 ||
            std::abs(l1b - 1.0) > 1e-8)
            throw config_error(
                "stft_reformulation_pair: windows must satisfy ||chi||_2 = ||chi_j||_1 = 1");
    }

    // Joint window overlap; the exact discrete identity carries 1/I.
    double overlap = 0.0;
    {
        MultiIndex mi(std::vector<int>(3, N));
        std::size_t flat = 0;
        do {
            const auto& idx = mi.index();
            const double chi2v = windows.chi2.values[static_cast<std::size_t>(idx[0])].real();
            const double chi1v = windows.chi1.values[static_cast<std::size_t>(idx[1])].real();
            const double chiv = windows.chi.values[flat++].real();
            overlap += chiv * chiv * chi1v * chi2v;
        } while (mi.next());
        overlap *= h * h * h;
        if (std::abs(overlap) < 1e-14)
            throw numeric_error("stft_reformulation_pair: degenerate window overlap");
    }

    // STFT tables: V1[jy][ke] = V_{chi1} f(y_j, -eta_k); V2c[jx][kx] =
    // conj(V_{chi2} g(x_j, xi_k)).
    std::vector<cd> V1(static_cast<std::size_t>(N) * N), V2c(static_cast<std::size_t>(N) * N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
            V1[static_cast<std::size_t>(j) * N + k] =
                stft_point(f, windows.chi1, {j}, {-G1.freq(k)});
            V2c[static_cast<std::size_t>(j) * N + k] =
                std::conj(stft_point(g, windows.chi2, {j}, {G1.freq(k)}));
        }

    const auto strides = row_major_strides(std::vector<int>(3, N));
    const auto Xs = all_indices(3, N);
    std::vector<cd> contrib(Xs.size(), cd(0.0, 0.0));
    // H = (2pi)^{(m-N)/2} e^{i phi(X)} F(e^{i psi2} chi^2 a(.+X)) at the
    // shifted frequencies; m - N = -1 here.
    const double transform_c = std::pow(h / std::sqrt(kTwoPi), 3);
    const double hconst = std::pow(kTwoPi, -0.5);

    parallel_for(Xs.size(), [&](std::size_t xi) {
        const auto& jX = Xs[xi];
        Eigen::VectorXd X(3);
        for (int i = 0; i < 3; ++i) X(i) = G3.coord(jX[static_cast<std::size_t>(i)]);
        const PhaseTaylorSplit split = phase_taylor_split(phi, X);
        const double gx = split.gradient(0);
        const double gy = split.gradient(1);
        const double gz = split.gradient(2);

        // Q(ix, iy) = sum_iz e^{i psi2(X1)} chi(X1)^2 a(X+X1) e^{+i zeta1 gz}
        std::vector<cd> Q(static_cast<std::size_t>(N) * N, cd(0.0, 0.0));
        Eigen::VectorXd X1(3);
        for (int ix = 0; ix < N; ++ix) {
            X1(0) = G3.coord(ix);
            const int sx = G3.wrap(jX[0] + ix - N / 2);
            for (int iy = 0; iy < N; ++iy) {
                X1(1) = G3.coord(iy);
                const int sy = G3.wrap(jX[1] + iy - N / 2);
                cd acc(0.0, 0.0);
                for (int iz = 0; iz < N; ++iz) {
                    X1(2) = G3.coord(iz);
                    const int sz = G3.wrap(jX[2] + iz - N / 2);
                    const std::size_t wflat = strides[0] * static_cast<std::size_t>(ix) +
                                              strides[1] * static_cast<std::size_t>(iy) +
                                              strides[2] * static_cast<std::size_t>(iz);
                    const std::size_t aflat = strides[0] * static_cast<std::size_t>(sx) +
                                              strides[1] * static_cast<std::size_t>(sy) +
                                              strides[2] * static_cast<std::size_t>(sz);
                    const double chiv = windows.chi.values[wflat].real();
                    if (chiv == 0.0) continue;
                    const double ph = split.remainder(X1) + X1(2) * gz;
                    acc += a.values[aflat] * (chiv * chiv) * cd(std::cos(ph), std::sin(ph));
                }
                Q[static_cast<std::size_t>(ix) * N + iy] = acc;
            }
        }

        // Per-axis shifted phase tables for the remaining 2-d transform.
        std::vector<cd> ex(static_cast<std::size_t>(N) * N), ey(static_cast<std::size_t>(N) * N);
        for (int k = 0; k < N; ++k) {
            const double fx = G3.freq(k) - gx;
            const double fy = G3.freq(k) - gy;
            for (int i = 0; i < N; ++i) {
                const double xi1 = G3.coord(i);
                ex[static_cast<std::size_t>(k) * N + i] = cd(std::cos(xi1 * fx), -std::sin(xi1 * fx));
                ey[static_cast<std::size_t>(k) * N + i] = cd(std::cos(xi1 * fy), -std::sin(xi1 * fy));
            }
        }

        const cd eiphi(std::cos(split.value), std::sin(split.value));
        cd local(0.0, 0.0);
        for (int kx = 0; kx < N; ++kx) {
            for (int ke = 0; ke < N; ++ke) {
                cd F(0.0, 0.0);
                for (int ix = 0; ix < N; ++ix) {
                    cd rowacc(0.0, 0.0);
                    for (int iy = 0; iy < N; ++iy)
                        rowacc += Q[static_cast<std::size_t>(ix) * N + iy] *
                                  ey[static_cast<std::size_t>(ke) * N + iy];
                    F += rowacc * ex[static_cast<std::size_t>(kx) * N + ix];
                }
                F *= transform_c;
                const cd H = hconst * eiphi * F;
                const double outer = X(0) * G3.freq(kx) + X(1) * G3.freq(ke);
                const cd phase(std::cos(outer), -std::sin(outer));
                local += H * V1[static_cast<std::size_t>(jX[1]) * N + ke] *
                         V2c[static_cast<std::size_t>(jX[0]) * N + kx] * phase;
            }
        }
        contrib[xi] = local;
    });

    cd total(0.0, 0.0);
    for (const cd& v : contrib) total += v;
    total *= std::pow(h, 3) * fs * fs;  // dX and d(xi) d(eta)
    return total / overlap;
}

ReformulationReport reformulation_identity_error(const SampledFunction& a, const PhaseSpec& phi,
                                                 const SampledFunction& f,
                                                 const SampledFunction& g,
                                                 const ReformulationWindows& windows) {
    ReformulationReport rep;
    rep.reformulated = stft_reformulation_pair(a, phi, f, g, windows);
    // Desk-scale boxes leave visible Gaussian tails at the seam; the N-refinement
    // check below is the accuracy control here, not the seam gate.
    const OperatorMatrix T = op_fio(a, phi, 5e-2);
    const SampledFunction Tf = T.apply(f);
    cd pairing(0.0, 0.0);
    for (std::size_t i = 0; i < Tf.values.size(); ++i)
        pairing += Tf.values[i] * std::conj(g.values[i]);
    pairing *= f.grid.spacing();
    rep.direct = pairing;
    rep.rel_error = std::abs(rep.reformulated - rep.direct) / std::abs(rep.direct);
    return rep;
}

// --- kernel/STFT identities ---------------------------------------------------------

double kernel_stft_identity(const SampledFunction& a, const PhaseSpec& phi,
                            const WindowSpec& chi1, const WindowSpec& chi2,
                            const std::vector<LatticeSample>& samples,
                            double fitness_tol, double window_tol) {
    const int n1 = phi.n1, n2 = phi.n2;
    const int N = a.grid.points_per_axis;
    const SampledFunction K = fio_kernel(a, phi, fitness_tol);
    const OperatorMatrix T = op_fio(a, phi, fitness_tol);
    const GridSpec G1(n1, a.grid.half_width, N);
    const GridSpec G2(n2, a.grid.half_width, N);
    const GridSpec GK(n2 + n1, a.grid.half_width, N);

    // Tensor window chi2 (x-side) x chi1 (y-side) on the kernel grid.
    SampledFunction W(GK, Domain::space);
    {
        const auto s1 = row_major_strides(std::vector<int>(static_cast<std::size_t>(n1), N));
        const auto s2 = row_major_strides(std::vector<int>(static_cast<std::size_t>(n2), N));
        MultiIndex mi(std::vector<int>(static_cast<std::size_t>(n2 + n1), N));
        std::size_t flat = 0;
        do {
            const auto& idx = mi.index();
            std::size_t i2 = 0, i1 = 0;
            for (int i = 0; i < n2; ++i)
                i2 += s2[static_cast<std::size_t>(i)] * static_cast<std::size_t>(idx[i]);
            for (int i = 0; i < n1; ++i)
                i1 += s1[static_cast<std::size_t>(i)] * static_cast<std::size_t>(idx[n2 + i]);
            W.values[flat++] = chi2.values.values[i2] * chi1.values.values[i1];
        } while (mi.next());
    }

    const double pairing_c = std::pow(kTwoPi, 0.5 * (n1 + n2));
    double worst = 0.0;
    for (const auto& s : samples) {
        // f = chi1(. - y) e^{-i<., eta>}, g = chi2(. - x) e^{+i<., xi>}.
        std::vector<int> ysteps(static_cast<std::size_t>(n1)), xsteps(static_cast<std::size_t>(n2));
        for (int i = 0; i < n1; ++i) ysteps[static_cast<std::size_t>(i)] = s.y[static_cast<std::size_t>(i)] - N / 2;
        for (int i = 0; i < n2; ++i) xsteps[static_cast<std::size_t>(i)] = s.x[static_cast<std::size_t>(i)] - N / 2;
        SampledFunction fs = shift_lattice(chi1.values, ysteps);
        SampledFunction gs = shift_lattice(chi2.values, xsteps);
        {
            MultiIndex mi(std::vector<int>(static_cast<std::size_t>(n1), N));
            std::size_t flat = 0;
            do {
                double ang = 0.0;
                for (int i = 0; i < n1; ++i)
                    ang -= G1.coord(mi.index()[i]) * G1.freq(s.eta[static_cast<std::size_t>(i)]);
                fs.values[flat++] *= cd(std::cos(ang), std::sin(ang));
            } while (mi.next());
        }
        {
            MultiIndex mi(std::vector<int>(static_cast<std::size_t>(n2), N));
            std::size_t flat = 0;
            do {
                double ang = 0.0;
                for (int i = 0; i < n2; ++i)
                    ang += G2.coord(mi.index()[i]) * G2.freq(s.xi[static_cast<std::size_t>(i)]);
                gs.values[flat++] *= cd(std::cos(ang), std::sin(ang));
            } while (mi.next());
        }

        const SampledFunction Tf = T.apply(fs);
        cd rhs(0.0, 0.0);
        for (std::size_t i = 0; i < Tf.values.size(); ++i)
            rhs += Tf.values[i] * std::conj(gs.values[i]);
        rhs *= std::pow(G2.spacing(), n2);

        std::vector<int> pos;
        std::vector<double> fr;
        for (int i = 0; i < n2; ++i) pos.push_back(s.x[static_cast<std::size_t>(i)]);
        for (int i = 0; i < n1; ++i) pos.push_back(s.y[static_cast<std::size_t>(i)]);
        for (int i = 0; i < n2; ++i) fr.push_back(G2.freq(s.xi[static_cast<std::size_t>(i)]));
        for (int i = 0; i < n1; ++i) fr.push_back(G1.freq(s.eta[static_cast<std::size_t>(i)]));
        const cd lhs = pairing_c * stft_point(K, W, pos, fr);
        worst = std::max(worst, std::abs(lhs - rhs));

        // Magnitude covariance of the wave packets.
        const StftArray Vf = stft(fs, chi1.values, window_tol);
        const StftArray Vref1 = stft(chi1.values, chi1.values, window_tol);
        const StftArray Vg = stft(gs, chi2.values, window_tol);
        const StftArray Vref2 = stft(chi2.values, chi2.values, window_tol);
        const auto s1s = row_major_strides(std::vector<int>(static_cast<std::size_t>(n1), N));
        const auto s2s = row_major_strides(std::vector<int>(static_cast<std::size_t>(n2), N));
        MultiIndex p1(std::vector<int>(static_cast<std::size_t>(n1), N));
        std::size_t jf = 0;
        do {
            std::size_t jref1 = 0, jref2 = 0;
            for (int i = 0; i < n1; ++i)
                jref1 += s1s[static_cast<std::size_t>(i)] *
                         static_cast<std::size_t>(G1.wrap(p1.index()[i] - ysteps[static_cast<std::size_t>(i)]));
            for (int i = 0; i < n2; ++i)
                jref2 += s2s[static_cast<std::size_t>(i)] *
                         static_cast<std::size_t>(G2.wrap(p1.index()[i] - xsteps[static_cast<std::size_t>(i)]));
            MultiIndex k1(std::vector<int>(static_cast<std::size_t>(n1), N));
            std::size_t kf = 0;
            do {
                std::size_t kref = 0, kref2 = 0;
                for (int i = 0; i < n1; ++i) {
                    kref += s1s[static_cast<std::size_t>(i)] *
                            static_cast<std::size_t>(
                                G1.wrap(k1.index()[i] + s.eta[static_cast<std::size_t>(i)] - N / 2));
                    kref2 += s2s[static_cast<std::size_t>(i)] *
                             static_cast<std::size_t>(
                                 G2.wrap(k1.index()[i] - (s.xi[static_cast<std::size_t>(i)] - N / 2)));
                }
                worst = std::max(worst,
                                 std::abs(std::abs(Vf.at(jf, kf)) - std::abs(Vref1.at(jref1, kref))));
                worst = std::max(
                    worst, std::abs(std::abs(Vg.at(jf, kf)) - std::abs(Vref2.at(jref2, kref2))));
                ++kf;
            } while (k1.next());
            ++jf;
        } while (p1.next());
    }
    return worst;
}

double symbol_kernel_stft_check(const SampledFunction& a, double t, const WindowSpec& chi,
                                const std::vector<LatticeSample>& samples) {
    if (a.grid.dim != 2) throw config_error("symbol_kernel_stft_check: desk scale requires n = 1");
    if (!(t == 0.0 || t == 0.5 || t == 1.0))
        throw config_error("symbol_kernel_stft_check: t must be 0, 1/2 or 1");
    require_self_dual(a.grid, "symbol_kernel_stft_check");
    if (chi.family != WindowFamily::gaussian)
        throw config_error("symbol_kernel_stft_check: gaussian window required");
    const GridSpec& G = a.grid;
    const int N = G.points_per_axis;
    const double h = G.spacing();
    const double L = G.half_width;

    // The plain lattice theta-sum would make the kernel 2L-periodic in u - w,
    // which pollutes the far corners of the (u, w) box for t = 1/2 (for
    // t in {0, 1} the lattice map is unimodular and the wraps cancel
    // exactly). Build the kernel and the transported window on a doubled
    // theta-lattice instead: period 4L, no wrap inside the summation range.
    const GridSpec Gf(2, L, 2 * N);
    SampledFunction af(Gf, Domain::space);
    {
        const TrigInterpolator ai(a);
        MultiIndex mi(std::vector<int>(2, 2 * N));
        std::size_t flat = 0;
        do {
            af.values[flat++] = ai({Gf.coord(mi.index()[0]), Gf.coord(mi.index()[1])});
        } while (mi.next());
    }
    const double theta_step = 0.5 * G.freq_step();
    auto theta_at = [&](int m) { return (m - N) * theta_step; };

    // K(u, w) = (2pi)^{-1} sum_m a((1-t)u + t w, theta_m) e^{i(u-w)theta_m} dtheta
    std::vector<cd> K(static_cast<std::size_t>(N) * N, cd(0.0, 0.0));
    for (int iu = 0; iu < N; ++iu)
        for (int iw = 0; iw < N; ++iw) {
            const int mid_idx = static_cast<int>(std::lround(2.0 * ((1.0 - t) * iu + t * iw)));
            const double q = G.coord(iu) - G.coord(iw);
            cd acc(0.0, 0.0);
            for (int m = 0; m < 2 * N; ++m) {
                const double th = theta_at(m);
                acc += af.values[static_cast<std::size_t>(mid_idx) * (2 * N) + m] *
                       cd(std::cos(q * th), std::sin(q * th));
            }
            K[static_cast<std::size_t>(iu) * N + iw] = acc * theta_step / kTwoPi;
        }

    const double spread = chi.spread;
    auto chi_true = [&](double p, double q) {
        return std::exp(-(p * p + q * q) / (2.0 * spread * spread));
    };
    auto psi = [&](double p, double q) {
        cd acc(0.0, 0.0);
        const double pq = p - q;
        for (int m = 0; m < 2 * N; ++m) {
            const double th = theta_at(m);
            acc += chi_true((1.0 - t) * p + t * q, th) * cd(std::cos(pq * th), std::sin(pq * th));
        }
        return acc * theta_step;
    };

    double worst = 0.0;
    for (const auto& smp : samples) {
        const double x = G.coord(smp.x[0]);
        const double y = G.coord(smp.y[0]);
        const double xi = G.freq(smp.xi[0]);
        const double eta = G.freq(smp.eta[0]);
        const double c1 = x - t * y;
        const double c2 = x + (1.0 - t) * y;
        const double th1 = xi + (1.0 - t) * eta;
        const double th2 = -xi + t * eta;

        cd lhs(0.0, 0.0);
        for (int iu = 0; iu < N; ++iu) {
            const double u = G.coord(iu);
            for (int iw = 0; iw < N; ++iw) {
                const double w = G.coord(iw);
                const double ang = -(u * th1 + w * th2);
                lhs += K[static_cast<std::size_t>(iu) * N + iw] * psi(u - c1, w - c2) *
                       cd(std::cos(ang), std::sin(ang));
            }
        }
        lhs *= h * h / kTwoPi;

        const cd rhs = stft_point(a, chi.values, {smp.x[0], smp.xi[0]}, {eta, y});
        worst = std::max(worst, std::abs(std::abs(lhs) - std::abs(rhs)));
    }
    return worst;
}

double gaussian_identity_check(const std::vector<double>& t_values, const GridSpec& grid) {
    double worst = 0.0;
    for (double t : t_values) {
        if (!(t > 0.0)) throw config_error("gaussian_identity_check: t must be positive");
        if (!(t <= 1.0)) throw config_error("gaussian_identity_check: t must lie in (0, 1]");
        const double alpha = (2.0 - t * t) / (t * t);
        const SampledFunction f = sample(grid, Domain::space, [&](const std::vector<double>& x) {
            double r2 = 0.0;
            for (double u : x) r2 += u * u;
            return cd(std::exp(-alpha * r2), 0.0);
        });
        const SampledFunction F = forward_dft(f);
        const int n = grid.dim;
        // Closed form carries the unnormalized transform; reconcile with the
        // (2pi)^{-n/2} convention used by forward_dft.
        const double c = std::pow(kTwoPi, -0.5 * n) * std::pow(kPi, 0.5 * n) * std::pow(t, n) *
                         std::pow(2.0 - t * t, -0.5 * n);
        MultiIndex mi(std::vector<int>(static_cast<std::size_t>(n), grid.points_per_axis));
        std::size_t flat = 0;
        do {
            double xi2 = 0.0;
            for (int a = 0; a < n; ++a) {
                const double xi = grid.freq(mi.index()[a]);
                xi2 += xi * xi;
            }
            const double closed = c * std::exp(-t * t * xi2 / (4.0 * (2.0 - t * t)));
            worst = std::max(worst, std::abs(F.values[flat++] - cd(closed, 0.0)));
        } while (mi.next());
    }
    return worst;
}

}  // namespace tfop
