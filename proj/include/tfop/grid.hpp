#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "tfop/errors.hpp"

namespace tfop {

using cd = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

// Uniform periodic grid on the centered box [-L, L)^dim with N points per
// axis. Spatial nodes x_j = j*h for j in {-N/2, ..., N/2-1}, h = 2L/N;
// frequency nodes xi_k = pi*k/L on the same index range. Stored indices run
// 0..N-1 with node index i <-> j = i - N/2.
struct GridSpec {
    int dim = 1;
    double half_width = 1.0;
    int points_per_axis = 2;

    GridSpec() = default;
    GridSpec(int dim_, double half_width_, int points_per_axis_);

    double spacing() const { return 2.0 * half_width / points_per_axis; }
    double freq_step() const { return kPi / half_width; }
    double nyquist() const { return freq_step() * (points_per_axis / 2); }

    // h == pi/L: the spatial lattice and the frequency lattice coincide.
    bool is_self_dual(double rel_tol = 1e-9) const;
    static GridSpec self_dual(int dim, int points_per_axis);

    double coord(int i) const { return (i - points_per_axis / 2) * spacing(); }
    double freq(int k) const { return (k - points_per_axis / 2) * freq_step(); }

    std::size_t point_count() const;
    int wrap(int i) const {
        const int n = points_per_axis;
        return ((i % n) + n) % n;
    }

    bool operator==(const GridSpec&) const = default;
};

enum class Domain { space, frequency };

// Complex samples on a GridSpec, lexicographic order with axis 0 slowest.
struct SampledFunction {
    GridSpec grid;
    Domain domain = Domain::space;
    std::vector<cd> values;

    SampledFunction() = default;
    SampledFunction(GridSpec g, Domain d);

    std::size_t size() const { return values.size(); }
    double axis_step() const {
        return domain == Domain::space ? grid.spacing() : grid.freq_step();
    }
    double node(int axis_index) const {
        return domain == Domain::space ? grid.coord(axis_index) : grid.freq(axis_index);
    }

    cd& at(const std::vector<int>& idx);
    const cd& at(const std::vector<int>& idx) const;
};

// Lexicographic multi-index walker over a rectangular shape.
struct MultiIndex {
    explicit MultiIndex(std::vector<int> shape);
    const std::vector<int>& index() const { return idx_; }
    std::size_t flat() const { return flat_; }
    bool next();  // false once exhausted
    std::size_t count() const { return count_; }

private:
    std::vector<int> shape_;
    std::vector<int> idx_;
    std::size_t flat_ = 0;
    std::size_t count_ = 1;
};

std::vector<std::size_t> row_major_strides(const std::vector<int>& shape);

// --- validation ------------------------------------------------------------

void require_finite(const SampledFunction& f, const char* who);

// --- transforms --------------------------------------------------------------

// Unitary-convention transforms with quadrature weights folded in:
//   forward:  F(xi_k) = (2pi)^{-d/2} h^d   sum_j f(x_j) e^{-i<x_j, xi_k>}
//   inverse:  f(x_j)  = (2pi)^{-d/2} s^d   sum_k F(xi_k) e^{+i<x_j, xi_k>},
// s = pi/L. inverse(forward(f)) == f on the lattice.
SampledFunction forward_dft(const SampledFunction& f);
SampledFunction inverse_dft(const SampledFunction& F);

// Partial transform along a subset of axes (same per-axis constants). The
// domain tag of the result is left equal to the input's; callers that mix
// domains track axis meaning themselves.
std::vector<cd> transform_axes(const std::vector<cd>& values, const GridSpec& grid,
                               const std::vector<int>& axes, bool forward);

// Riemann quadrature: h^d sum (space) or (pi/L)^d sum (frequency).
cd quadrature_integral(const SampledFunction& f);

double l2_norm(const SampledFunction& f);

// --- samplers and lattice maps ----------------------------------------------

SampledFunction sample(const GridSpec& grid, Domain domain,
                       const std::function<cd(const std::vector<double>&)>& fn);

// Circular lattice translate: g(x) = f(x - steps*h) with periodic wrap.
SampledFunction shift_lattice(const SampledFunction& f, const std::vector<int>& steps);

// Evaluate the trigonometric interpolant of a periodic sampled function at
// arbitrary points. Exact on the lattice; spectrally accurate off it for
// band-limited data.
class TrigInterpolator {
public:
    explicit TrigInterpolator(const SampledFunction& f);
    cd operator()(const std::vector<double>& x) const;

private:
    GridSpec grid_;
    std::vector<cd> coeffs_;  // forward_dft values
};

// max |f| over all boundary faces and the largest face-to-face jump of the
// periodic extension; used by fitness gates.
struct BoundaryReport {
    double max_face_value = 0.0;
    double max_face_jump = 0.0;
    double max_abs = 0.0;
};
BoundaryReport boundary_report(const SampledFunction& f);

}  // namespace tfop
