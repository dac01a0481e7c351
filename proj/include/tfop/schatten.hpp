#pragma once

#include <Eigen/Dense>

#include "tfop/operators.hpp"

namespace tfop {

struct SingularSpectrum {
    std::vector<double> values;  // non-increasing, all >= 0
    std::string source_space = "l2";
    std::string target_space = "l2";
};

// Positive-definite matrix realizing the weighted phase-space inner product
// f* G f = quadrature of |V_chi f * omega|^2 on raw sample vectors.
struct WeightedGram {
    Eigen::MatrixXcd G;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    Eigen::MatrixXcd sqrt;
    Eigen::MatrixXcd inv_sqrt;
};

WeightedGram weighted_gram(const WeightSpec& omega, const WindowSpec& chi, const GridSpec& grid);

// Singular values of G2^{1/2} T G1^{-1/2}, descending; null Grams mean the
// plain sample inner product (valid here because source and target grids
// share dimension and spacing, so the quadrature isometries cancel).
// Entries below 1e-13 * sigma_1 are truncated to zero.
SingularSpectrum singular_values(const OperatorMatrix& T, const WeightedGram* G1 = nullptr,
                                 const WeightedGram* G2 = nullptr);

// (sum sigma_j^p)^{1/p}; p = infinity gives sigma_1.
double schatten_norm(const SingularSpectrum& sigma, double p);

// Log-convexity slack  ||T||_{p1}^{1-theta} ||T||_{p2}^{theta} - ||T||_p
// with 1/p = (1-theta)/p1 + theta/p2; must be >= -1e-10.
double interpolation_audit(const OperatorMatrix& T, double p1, double p2, double theta);

// | ||T_K||_{I_2} - ||K||_{L^2} | for the integral operator of kernel K
// (kernel on a (n+n)-dim grid, operator between n-dim spaces).
double hs_kernel_identity(const SampledFunction& K);

}  // namespace tfop
