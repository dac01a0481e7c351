#include "tfop/weights.hpp"

#include <algorithm>
#include <cmath>

namespace tfop {

double WeightSpec::eval(const std::vector<double>& point) const {
    if (static_cast<int>(point.size()) != dim)
        throw config_error("WeightSpec::eval: point dimension mismatch");
    double out = constant;
    for (const auto& f : factors) {
        double q = 1.0;
        for (int a : f.axes) {
            if (a < 0 || a >= dim) throw config_error("WeightSpec: factor axis out of range");
            q += point[static_cast<std::size_t>(a)] * point[static_cast<std::size_t>(a)];
        }
        out *= std::pow(q, 0.5 * f.exponent);
    }
    return out;
}

WeightSpec WeightSpec::one(int dim) {
    WeightSpec w;
    w.dim = dim;
    return w;
}

WeightSpec WeightSpec::bracket(int dim, std::vector<int> axes, double s) {
    WeightSpec w;
    w.dim = dim;
    if (s != 0.0) w.factors.push_back({std::move(axes), s});
    return w;
}

WeightSpec WeightSpec::bracket_all(int dim, double s) {
    std::vector<int> axes(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) axes[static_cast<std::size_t>(a)] = a;
    return bracket(dim, std::move(axes), s);
}

double eval_weight(const WeightSpec& w, const std::vector<double>& point) {
    return w.eval(point);
}

std::vector<double> tabulate_phase_space_weight(const WeightSpec& w, const GridSpec& grid) {
    const int d = grid.dim;
    if (w.dim != 2 * d)
        throw config_error("tabulate_phase_space_weight: weight dim must be 2*grid.dim");
    const int N = grid.points_per_axis;
    std::vector<double> table;
    table.reserve(static_cast<std::size_t>(std::pow(N, 2 * d)));
    std::vector<double> pt(static_cast<std::size_t>(2 * d));
    MultiIndex mi(std::vector<int>(2 * d, N));
    do {
        const auto& idx = mi.index();
        for (int a = 0; a < d; ++a) pt[static_cast<std::size_t>(a)] = grid.coord(idx[a]);
        for (int a = 0; a < d; ++a) pt[static_cast<std::size_t>(d + a)] = grid.freq(idx[d + a]);
        table.push_back(w.eval(pt));
    } while (mi.next());
    return table;
}

double audit_moderate(const WeightSpec& omega, const WeightSpec& v, const GridSpec& grid) {
    if (omega.dim != v.dim) throw config_error("audit_moderate: weight dims differ");
    if (omega.dim != grid.dim) throw config_error("audit_moderate: grid dim mismatch");
    const int N = grid.points_per_axis;
    const int d = grid.dim;
    double worst = 0.0;
    std::vector<double> x(static_cast<std::size_t>(d)), y(static_cast<std::size_t>(d)),
        s(static_cast<std::size_t>(d));
    MultiIndex mx(std::vector<int>(d, N));
    do {
        for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] = grid.coord(mx.index()[a]);
        const double wx = omega.eval(x);
        MultiIndex my(std::vector<int>(d, N));
        do {
            for (int a = 0; a < d; ++a) {
                y[static_cast<std::size_t>(a)] = grid.coord(my.index()[a]);
                s[static_cast<std::size_t>(a)] =
                    x[static_cast<std::size_t>(a)] + y[static_cast<std::size_t>(a)];
            }
            const double r = omega.eval(s) / (wx * v.eval(y));
            worst = std::max(worst, r);
        } while (my.next());
    } while (mx.next());
    return worst;
}

SubmultiplicativeAudit audit_submultiplicative(const WeightSpec& v, const GridSpec& grid) {
    SubmultiplicativeAudit rep;
    rep.c_submultiplicative = audit_moderate(v, v, grid);
    const int N = grid.points_per_axis;
    const int d = grid.dim;
    double worst = 0.0;
    std::vector<double> x(static_cast<std::size_t>(d)), tx(static_cast<std::size_t>(d));
    MultiIndex mx(std::vector<int>(d, N));
    do {
        for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] = grid.coord(mx.index()[a]);
        const double vx = v.eval(x);
        for (int ti = 0; ti <= 10; ++ti) {
            const double t = 0.1 * ti;
            for (int a = 0; a < d; ++a) tx[static_cast<std::size_t>(a)] = t * x[static_cast<std::size_t>(a)];
            worst = std::max(worst, v.eval(tx) / vx);
        }
    } while (mx.next());
    rep.c_scaling = worst;
    return rep;
}

// --- windows -----------------------------------------------------------------

namespace {

double to_box(double u, double L) {
    // Periodic minimal image in [-L, L).
    const double period = 2.0 * L;
    double r = std::fmod(u + L, period);
    if (r < 0.0) r += period;
    return r - L;
}

double bump_profile(const std::vector<double>& x, double radius) {
    double r2 = 0.0;
    for (double u : x) r2 += u * u;
    const double q = r2 / (radius * radius);
    if (q >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - q));
}

double gaussian_profile(const std::vector<double>& x, double spread) {
    double r2 = 0.0;
    for (double u : x) r2 += u * u;
    return std::exp(-r2 / (2.0 * spread * spread));
}

}  // namespace

double WindowSpec::l2() const { return l2_norm(values); }

double WindowSpec::l1() const {
    double acc = 0.0;
    for (const cd& v : values.values) acc += std::abs(v);
    double w = 1.0;
    for (int a = 0; a < grid.dim; ++a) w *= grid.spacing();
    return acc * w;
}

double WindowSpec::face_decay() const {
    const BoundaryReport rep = boundary_report(values);
    return rep.max_abs > 0.0 ? rep.max_face_value / rep.max_abs : 0.0;
}

double WindowSpec::eval(const std::vector<double>& x) const {
    std::vector<double> xb(x.size());
    for (std::size_t a = 0; a < x.size(); ++a) xb[a] = to_box(x[a], grid.half_width);
    switch (family) {
        case WindowFamily::gaussian:
            return gaussian_profile(xb, spread);
        case WindowFamily::bump:
            return bump_profile(xb, spread);
        case WindowFamily::bump_pou: {
            double s = 0.0;
            const int copies = static_cast<int>(std::lround(2.0 * grid.half_width / pou_step));
            std::vector<double> sh(xb.size());
            std::vector<int> idx(xb.size(), 0);
            while (true) {
                for (std::size_t a = 0; a < xb.size(); ++a)
                    sh[a] = to_box(xb[a] - idx[a] * pou_step, grid.half_width);
                s += bump_profile(sh, spread);
                std::size_t a = 0;
                for (; a < xb.size(); ++a) {
                    if (++idx[a] < copies) break;
                    idx[a] = 0;
                }
                if (a == xb.size()) break;
            }
            if (s <= 0.0) throw numeric_error("bump_pou: lattice does not cover the box");
            return bump_profile(xb, spread) / s;
        }
    }
    return 0.0;
}

WindowSpec WindowSpec::gaussian(const GridSpec& grid, double spread) {
    if (!(spread > 0.0)) throw config_error("WindowSpec::gaussian: spread must be positive");
    WindowSpec w;
    w.family = WindowFamily::gaussian;
    w.grid = grid;
    w.spread = spread;
    w.values = sample(grid, Domain::space,
                      [&](const std::vector<double>& x) { return cd(gaussian_profile(x, spread), 0.0); });
    return w;
}

WindowSpec WindowSpec::bump(const GridSpec& grid, double radius) {
    if (!(radius > 0.0)) throw config_error("WindowSpec::bump: radius must be positive");
    if (radius >= grid.half_width)
        throw config_error("WindowSpec::bump: radius must fit inside the box");
    WindowSpec w;
    w.family = WindowFamily::bump;
    w.grid = grid;
    w.spread = radius;
    w.values = sample(grid, Domain::space,
                      [&](const std::vector<double>& x) { return cd(bump_profile(x, radius), 0.0); });
    const double n = l2_norm(w.values);
    if (!(n > 0.0)) throw numeric_error("WindowSpec::bump: window vanishes on the grid");
    for (cd& v : w.values.values) v /= n;
    return w;
}

WindowSpec WindowSpec::bump_pou(const GridSpec& grid, double radius, double step) {
    if (!(step > 0.0)) throw config_error("bump_pou: step must be positive");
    const double copies = 2.0 * grid.half_width / step;
    if (std::abs(copies - std::lround(copies)) > 1e-9)
        throw config_error("bump_pou: step must divide the box period");
    if (radius <= 0.5 * step)
        throw config_error("bump_pou: radius must exceed step/2 to cover the box");
    WindowSpec w;
    w.family = WindowFamily::bump_pou;
    w.grid = grid;
    w.spread = radius;
    w.pou_step = step;
    w.values = sample(grid, Domain::space,
                      [&](const std::vector<double>& x) { return cd(w.eval(x), 0.0); });
    return w;
}

void require_window_fit(const WindowSpec& chi, double tol, const char* who) {
    const double decay = chi.face_decay();
    if (decay > tol)
        throw numeric_error(std::string(who) + ": window does not decay at the box edge (face " +
                            std::to_string(decay) + " > tol " + std::to_string(tol) + ")");
}

}  // namespace tfop
