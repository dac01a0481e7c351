#pragma once

#include <cmath>
#include <vector>

#include "tfop/grid.hpp"

namespace tfop {

// Separable modulated Gaussian with closed-form partial derivatives of any
// order: amplitude * prod_a exp(-(x_a-c_a)^2 / (2 s_a^2)) exp(i k_a x_a).
// The derivative oracle backs the C^{N,p} norms and the smooth-amplitude
// test families.
struct GaussianAmplitude {
    std::vector<double> center;
    std::vector<double> spread;
    std::vector<double> modulation;  // empty means no modulation
    double amplitude = 1.0;

    int dim() const { return static_cast<int>(center.size()); }

    static GaussianAmplitude isotropic(int dim, double spread, double amp = 1.0) {
        GaussianAmplitude g;
        g.center.assign(static_cast<std::size_t>(dim), 0.0);
        g.spread.assign(static_cast<std::size_t>(dim), spread);
        g.amplitude = amp;
        return g;
    }

    cd eval(const std::vector<double>& x) const {
        cd out(amplitude, 0.0);
        for (std::size_t a = 0; a < center.size(); ++a) {
            const double u = x[a] - center[a];
            double phase = modulation.empty() ? 0.0 : modulation[a] * x[a];
            out *= std::exp(-u * u / (2.0 * spread[a] * spread[a])) *
                   cd(std::cos(phase), std::sin(phase));
        }
        return out;
    }

    // d^alpha of the product, axis by axis. Gaussian-factor derivatives use
    // the polynomial recursion P_{j+1} = P_j' - (u/s^2) P_j.
    cd derivative(const std::vector<int>& alpha, const std::vector<double>& x) const {
        cd out(amplitude, 0.0);
        for (std::size_t a = 0; a < center.size(); ++a) {
            const double u = x[a] - center[a];
            const double s2 = spread[a] * spread[a];
            const double k = modulation.empty() ? 0.0 : modulation[a];
            const int m = alpha[a];

            // Polynomials P_j for g^{(j)} = P_j(u) g(u), coefficients in u.
            std::vector<std::vector<double>> P(static_cast<std::size_t>(m) + 1);
            P[0] = {1.0};
            for (int j = 0; j < m; ++j) {
                const auto& cur = P[static_cast<std::size_t>(j)];
                std::vector<double> next(cur.size() + 1, 0.0);
                for (std::size_t c = 1; c < cur.size(); ++c)
                    next[c - 1] += static_cast<double>(c) * cur[c];  // P'
                for (std::size_t c = 0; c < cur.size(); ++c)
                    next[c + 1] -= cur[c] / s2;  // -(u/s^2) P
                P[static_cast<std::size_t>(j) + 1] = std::move(next);
            }

            const double g = std::exp(-u * u / (2.0 * s2));
            const double phase = k * x[a];
            const cd mod(std::cos(phase), std::sin(phase));
            cd axis(0.0, 0.0);
            double binom = 1.0;
            for (int j = 0; j <= m; ++j) {
                if (j > 0) binom = binom * (m - j + 1) / j;
                double pj = 0.0;
                double up = 1.0;
                for (double c : P[static_cast<std::size_t>(j)]) {
                    pj += c * up;
                    up *= u;
                }
                // (ik)^{m-j}
                cd ik_pow(1.0, 0.0);
                for (int r = 0; r < m - j; ++r) ik_pow *= cd(0.0, k);
                axis += binom * pj * ik_pow;
            }
            out *= axis * g * mod;
        }
        return out;
    }

    SampledFunction sample_on(const GridSpec& grid) const {
        if (grid.dim != dim()) throw config_error("GaussianAmplitude: grid dim mismatch");
        return sample(grid, Domain::space,
                      [&](const std::vector<double>& x) { return eval(x); });
    }
};

}  // namespace tfop
