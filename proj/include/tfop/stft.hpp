#pragma once

#include "tfop/grid.hpp"
#include "tfop/weights.hpp"

namespace tfop {

// Sampled short-time Fourier transform V_chi f on the phase-space lattice:
// axes 0..d-1 index the window position x_j, axes d..2d-1 the frequency
// xi_k. Window translates wrap periodically.
struct StftArray {
    GridSpec grid;             // ambient grid (dim d)
    SampledFunction window;    // window samples used for the analysis
    std::vector<cd> values;    // N^d x N^d, position axes first

    std::size_t position_count() const { return grid.point_count(); }
    std::size_t frequency_count() const { return grid.point_count(); }
    cd at(std::size_t pos_flat, std::size_t freq_flat) const {
        return values[pos_flat * frequency_count() + freq_flat];
    }
};

// V_chi f(x_j, xi_k) = forward_dft of y -> f(y) chi(y - x_j), at xi_k.
// Windows must be real; window_tol gates the wrap error (relative boundary
// value of chi). Desk-scale callers pass a looser tolerance.
StftArray stft(const SampledFunction& f, const SampledFunction& window,
               double window_tol = 1e-12);
StftArray stft(const SampledFunction& f, const WindowSpec& chi, double window_tol = 1e-12);

// Single STFT value at a lattice position and an arbitrary real frequency,
// by direct summation.
cd stft_point(const SampledFunction& f, const SampledFunction& window,
              const std::vector<int>& pos_index, const std::vector<double>& xi);

// Inversion: f = (2pi)^{-d/2} ||chi||_2^{-2} * quadrature over (x, xi) of
// V(x, xi) e^{i<., xi>} chi(. - x).
SampledFunction istft(const StftArray& V, const SampledFunction& window);
SampledFunction istft(const StftArray& V, const WindowSpec& chi);

// max over the lattice of | |V(M_xi0 T_x0 f)(x, xi)| - |V f(x-x0, xi-xi0)| |
// with periodic index wrap. x0 must sit on the spatial lattice and xi0 on the
// frequency lattice.
double covariance_check(const SampledFunction& f, const WindowSpec& chi,
                        const std::vector<double>& x0, const std::vector<double>& xi0);

// H(xi_k) = ( h^d sum_j |V f(x_j, xi_k) w(x_j, xi_k)|^p )^{1/p}; max for
// p = infinity. w has dim 2d.
SampledFunction h_profile(const SampledFunction& f, const WindowSpec& chi,
                          const WeightSpec& omega, double p, double window_tol = 1e-12);

// Product-lattice audit of the separable STFT identity for f0(x, y) = f(y)
// with window chi1 (x) tensor chi (y) and weight w0 = w(y,eta) <xi>^t.
double tensor_lift_check(const SampledFunction& f, const WindowSpec& chi,
                         const WindowSpec& chi1, double t, const WeightSpec& omega,
                         double window_tol = 1e-12);

}  // namespace tfop
