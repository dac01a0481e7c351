#pragma once

#include <limits>
#include <string>
#include <vector>

#include "tfop/gaussians.hpp"
#include "tfop/stft.hpp"

namespace tfop {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lebesgue exponent tuple, 1..4 entries in [1, inf]. Axis nesting is carried
// by the operations themselves (innermost first).
struct ExponentSpec {
    std::vector<double> values;
    void validate() const;
};

// Coordinate-axis-aligned split of the ambient position axes and their dual
// axes into block 1 / block 2. Axes listed here form block 2; the complement
// forms block 1.
struct SubspacePartition {
    std::vector<int> position_block2;
    std::vector<int> dual_block2;
};

// One level of a nested mixed reduction: exponent p over `axes` of the
// magnitude array, with the product of the per-axis quadrature steps in
// `measure` (1.0 for sup levels and counting measure).
struct ReductionLevel {
    std::vector<int> axes;
    double p = 2.0;
    double measure = 1.0;
};

// Consumes axes innermost-first; the levels must partition the axes.
double nested_reduce(std::vector<double> magnitude, std::vector<int> shape,
                     const std::vector<ReductionLevel>& levels);

// |V| * omega as a flat table over the 2d-axis phase-space index set.
std::vector<double> weighted_magnitude(const StftArray& V, const WeightSpec& omega);

// --- norm functionals ---------------------------------------------------------

// Inner weighted L^p over positions, outer L^q over frequencies.
double modulation_norm(const StftArray& V, double p, double q, const WeightSpec& omega);

// Four-level mixed norm: L^p(V1 pos), L^q(V2 pos), L^r(V3 dual), L^s(V4 dual),
// where block-2 axes come from the partition.
double coorbit_norm(const StftArray& V, const SubspacePartition& part,
                    const ExponentSpec& exps, const WeightSpec& omega);

// Lattice-patch norm: f_alpha = f * chi(. - x_alpha) over the step-lattice,
// F(xi) = (sum_alpha |fhat_alpha(xi) w(x_alpha, xi)|^p)^{1/p}, returns
// ||F||_{L^q}. chi must be a partition-of-unity profile (checked to 1e-10).
double patch_norm(const SampledFunction& f, double lattice_step, const WindowSpec& chi_pou,
                  double p, double q, const WeightSpec& omega);

// Named by the reduction nesting, innermost first. The *_z / *_xi / *_eta
// forms fix the L1 block to the named dual axes; the general forms take the
// block from the partition.
enum class AmplitudeVariant {
    sup_sup_l1,         // sup(zeta, tau) -> L1(u) -> sup(x, y)
    sup_sup_l1_z,
    sup_sup_l1_xi,
    sup_sup_l1_eta,
    lp_sup_z_l1_lp,     // Lp(xi, eta) -> sup(z) -> L1(zeta) -> Lp(x, y)
    lp_sup_zeta_l1_lp,  // Lp(xi, eta) -> sup(zeta) -> L1(z) -> Lp(x, y)
    sup_lp_l1,          // sup(V2 pos) -> Lp(V1 pos + V1' dual) -> L1(V2' dual)
    sup_lp_lq_l1,       // sup(V2 pos) -> Lp(V1 pos) -> Lq(V1' dual) -> L1(V2' dual)
};

struct AmplitudeDims {
    int n1 = 1;
    int n2 = 1;
    int m = 1;
    int N() const { return n1 + n2; }
    int D() const { return n1 + n2 + m; }
};

// Variant-specific nested sup/integral reduction of |Va * omega| over the
// 2(N+m)-axis array, sup realized as lattice max, integrals as quadrature.
// The reduction order follows each variant's display order exactly.
double amplitude_norm(const StftArray& Va, AmplitudeVariant variant, const AmplitudeDims& dims,
                      const SubspacePartition& part, double p, double q,
                      const WeightSpec& omega);

// sum_{|alpha|<=Nd} ( iint || a^(alpha)(x,.,zeta) w(x,.,zeta) ||_inf^p dx dzeta )^{1/p}
// over a 3n-dimensional grid; derivatives from the closed-form oracle.
double cnp_norm(const GaussianAmplitude& a, const GridSpec& grid3n, int Nd, double p,
                const WeightSpec& omega);

// --- embedding diagnostics ----------------------------------------------------

struct NormSpec {
    enum class Kind { modulation, coorbit } kind = Kind::modulation;
    double p = 2.0, q = 2.0, r = 2.0, s = 2.0;
    WeightSpec omega;
    SampledFunction window;
    SubspacePartition part;  // coorbit only
};

double evaluate_norm(const SampledFunction& f, const NormSpec& spec);

struct EmbeddingReport {
    double max_ratio = 0.0;
    std::vector<double> ratios;
};

// max over the family of norm2(f)/norm1(f); diagnostic only.
EmbeddingReport embedding_ratio(const std::vector<SampledFunction>& family,
                                const NormSpec& spec1, const NormSpec& spec2);

}  // namespace tfop
