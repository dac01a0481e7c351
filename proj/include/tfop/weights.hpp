#pragma once

#include <string>
#include <vector>

#include "tfop/grid.hpp"

namespace tfop {

// Product of Peetre-bracket powers: constant * prod_f <x restricted to
// factor axes>^s, where <u> = (1 + |u|^2)^{1/2}. Closed under the
// moderateness algebra and covers every weight used by the toolkit.
struct WeightFactor {
    std::vector<int> axes;
    double exponent = 0.0;
};

struct WeightSpec {
    int dim = 1;
    double constant = 1.0;
    std::vector<WeightFactor> factors;

    double eval(const std::vector<double>& point) const;
    bool is_one() const { return factors.empty() && constant == 1.0; }

    static WeightSpec one(int dim);
    // <selected coords>^s
    static WeightSpec bracket(int dim, std::vector<int> axes, double s);
    // <all coords>^s
    static WeightSpec bracket_all(int dim, double s);
};

double eval_weight(const WeightSpec& w, const std::vector<double>& point);

// Tabulate w on the index set of a 2d-axis phase-space array: the first
// `grid.dim` axes carry spatial nodes, the rest frequency nodes.
std::vector<double> tabulate_phase_space_weight(const WeightSpec& w, const GridSpec& grid);

// --- moderateness audits -----------------------------------------------------

// max over lattice pairs (x, y) of w(x+y) / (w(x) v(y)). Finite-box estimate;
// callers compare against a declared bound, never read it as a proof.
double audit_moderate(const WeightSpec& omega, const WeightSpec& v, const GridSpec& grid);

struct SubmultiplicativeAudit {
    double c_submultiplicative = 0.0;  // audit_moderate with omega = v
    double c_scaling = 0.0;            // max over t in {0,0.1,..,1} of v(t x)/v(x)
};
SubmultiplicativeAudit audit_submultiplicative(const WeightSpec& v, const GridSpec& grid);

// --- windows -----------------------------------------------------------------

enum class WindowFamily { gaussian, bump, bump_pou };

// Window centered at the origin, cached on its grid. Real, non-negative.
struct WindowSpec {
    WindowFamily family = WindowFamily::gaussian;
    GridSpec grid;
    double spread = 1.0;  // gaussian spread, or bump radius
    double pou_step = 0.0;
    SampledFunction values;

    double l2() const;
    double l1() const;
    // max boundary |chi| relative to max |chi|; wrap-error proxy.
    double face_decay() const;
    double eval(const std::vector<double>& x) const;  // closed form, periodic min-image

    static WindowSpec gaussian(const GridSpec& grid, double spread);
    // exp(-1/(1-|x/r|^2)) inside |x|<r, L^2-normalized.
    static WindowSpec bump(const GridSpec& grid, double radius);
    // Translates of this profile on the step-lattice sum to 1 exactly.
    static WindowSpec bump_pou(const GridSpec& grid, double radius, double step);
};

// Throws numeric_error when the window wraps more than tol (relative face
// value). Desk-scale callers pass a looser tol.
void require_window_fit(const WindowSpec& chi, double tol, const char* who);

}  // namespace tfop
