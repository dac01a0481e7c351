#include "tfop/schatten.hpp"

#include <algorithm>
#include <cmath>

namespace tfop {

WeightedGram weighted_gram(const WeightSpec& omega, const WindowSpec& chi, const GridSpec& grid) {
    if (omega.dim != 2 * grid.dim) throw config_error("weighted_gram: weight dim must be 2n");
    const std::size_t P = grid.point_count();
    // the analysis matrix has P^3 entries
    if (P > 128) throw config_error("weighted_gram: grid too large for a dense Gram");

    // Columns of the analysis map: STFT of each sample impulse.
    const std::vector<double> w = tabulate_phase_space_weight(omega, grid);
    Eigen::MatrixXcd A(static_cast<Eigen::Index>(P * P), static_cast<Eigen::Index>(P));
    for (std::size_t j = 0; j < P; ++j) {
        SampledFunction e(grid, Domain::space);
        e.values[j] = cd(1.0, 0.0);
        const StftArray V = stft(e, chi.values, 1.0);
        for (std::size_t r = 0; r < P * P; ++r)
            A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = V.values[r] * w[r];
    }
    double cell = 1.0;
    for (int a = 0; a < grid.dim; ++a) cell *= grid.spacing() * grid.freq_step();

    WeightedGram out;
    out.G = (A.adjoint() * A) * cell;
    out.G = 0.5 * (out.G + out.G.adjoint().eval());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.G);
    if (es.info() != Eigen::Success) throw numeric_error("weighted_gram: eigensolver failure");
    const Eigen::VectorXd ev = es.eigenvalues();
    out.min_eigenvalue = ev.minCoeff();
    out.max_eigenvalue = ev.maxCoeff();
    if (!(out.min_eigenvalue > 1e-12 * std::max(1.0, out.max_eigenvalue)))
        throw numeric_error("weighted_gram: positive-definiteness failure (degenerate window/grid)");

    Eigen::VectorXd sq = ev.array().sqrt();
    Eigen::VectorXd isq = sq.array().inverse();
    out.sqrt = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().adjoint();
    out.inv_sqrt = es.eigenvectors() * isq.asDiagonal() * es.eigenvectors().adjoint();
    return out;
}

SingularSpectrum singular_values(const OperatorMatrix& T, const WeightedGram* G1,
                                 const WeightedGram* G2) {
    for (const auto* g : {G1, G2}) {
        if (g && g->min_eigenvalue > 0.0 && g->max_eigenvalue / g->min_eigenvalue > 1e12)
            throw numeric_error("singular_values: ill-conditioned Gram");
    }
    Eigen::MatrixXcd M = T.entries;
    if (G2) {
        if (G2->G.rows() != M.rows()) throw config_error("singular_values: target Gram shape");
        M = G2->sqrt * M;
    }
    if (G1) {
        if (G1->G.rows() != M.cols()) throw config_error("singular_values: source Gram shape");
        M = M * G1->inv_sqrt;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    SingularSpectrum out;
    const Eigen::VectorXd sv = svd.singularValues();
    out.values.assign(sv.data(), sv.data() + sv.size());
    std::sort(out.values.begin(), out.values.end(), std::greater<double>());
    if (!out.values.empty()) {
        const double floor = 1e-13 * out.values.front();
        for (double& s : out.values)
            if (s < floor) s = 0.0;
    }
    out.source_space = G1 ? "weighted" : "l2";
    out.target_space = G2 ? "weighted" : "l2";
    return out;
}

double schatten_norm(const SingularSpectrum& sigma, double p) {
    if (!(p >= 1.0)) throw config_error("schatten_norm: p must lie in [1, inf]");
    if (sigma.values.empty()) return 0.0;
    if (std::isinf(p)) return sigma.values.front();
    if (p == 1.0) {
        double s = 0.0;
        for (double v : sigma.values) s += v;
        return s;
    }
    double s = 0.0;
    for (double v : sigma.values) s += std::pow(v, p);
    return std::pow(s, 1.0 / p);
}

double interpolation_audit(const OperatorMatrix& T, double p1, double p2, double theta) {
    if (!(p1 >= 1.0) || !(p2 >= 1.0))
        throw config_error("interpolation_audit: exponents must lie in [1, inf]");
    if (!(theta >= 0.0 && theta <= 1.0))
        throw config_error("interpolation_audit: theta must lie in [0, 1]");
    const double inv_p = (std::isinf(p1) ? 0.0 : (1.0 - theta) / p1) +
                         (std::isinf(p2) ? 0.0 : theta / p2);
    const double p = inv_p > 0.0 ? 1.0 / inv_p : std::numeric_limits<double>::infinity();
    const SingularSpectrum sigma = singular_values(T);
    const double lhs = std::pow(schatten_norm(sigma, p1), 1.0 - theta) *
                       std::pow(schatten_norm(sigma, p2), theta);
    return lhs - schatten_norm(sigma, p);
}

double hs_kernel_identity(const SampledFunction& K) {
    if (K.grid.dim % 2 != 0) throw config_error("hs_kernel_identity: kernel dim must be even");
    const int n = K.grid.dim / 2;
    const OperatorMatrix T =
        kernel_to_operator(K, GridSpec(n, K.grid.half_width, K.grid.points_per_axis));
    const SingularSpectrum sigma = singular_values(T);
    return std::abs(schatten_norm(sigma, 2.0) - l2_norm(K));
}

}  // namespace tfop
