#pragma once

#include <Eigen/Dense>
#include <optional>

#include "tfop/stft.hpp"
#include "tfop/weights.hpp"

namespace tfop {

// Phase families with closed-form value, gradient and Hessian blocks.
// Variable order throughout: X = (x, y, zeta) with dim x = n2 (output side),
// dim y = n1 (input side), dim zeta = m.
struct PhaseSpec {
    enum class Family { bilinear, quadratic, perturbed };
    Family family = Family::bilinear;
    int n1 = 1, n2 = 1, m = 1;

    // value = 0.5 <A X, X> + <b, X>  (bilinear stores its A here too)
    Eigen::MatrixXd A;
    Eigen::VectorXd b;

    // perturbed adds eps * sum_i cos(<k_i, X> + delta_i)
    double eps = 0.0;
    std::vector<Eigen::VectorXd> trig_freqs;
    std::vector<double> trig_phases;

    int total_dim() const { return n1 + n2 + m; }

    double value(const Eigen::VectorXd& X) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& X) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& X) const;

    // <x - y, zeta>; requires n1 = n2 = m.
    static PhaseSpec bilinear(int n);
    static PhaseSpec quadratic(int n1, int n2, int m, const Eigen::MatrixXd& A,
                               const Eigen::VectorXd& b);
    static PhaseSpec perturbed(const PhaseSpec& core, double eps,
                               std::vector<Eigen::VectorXd> freqs, std::vector<double> phases);
};

struct PhaseEval {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd xx, xy, xz, yy, yz, zz;
};

PhaseEval phase_eval(const PhaseSpec& phi, const Eigen::VectorXd& X);

enum class DetBlock { full, yz, xz, zz };

// d = min over grid points X of |det(block(X))|. `full` assembles
// [[phi_xy, phi_xz], [phi_zy, phi_zz]] (rows x,zeta; columns y,zeta).
double nondegeneracy(const PhaseSpec& phi, const GridSpec& grid, DetBlock which);

// Dense operator between sampled-function spaces; the source quadrature
// weight h^{n1} is folded into the entries, so apply() is a plain
// matrix-vector product.
struct OperatorMatrix {
    GridSpec source;  // dim n1
    GridSpec target;  // dim n2
    Eigen::MatrixXcd entries;

    SampledFunction apply(const SampledFunction& f) const;
};

// Taylor split of the phase at base point X: psi1(X1) = phi(X) +
// <phi'(X), X1>, remainder(X1) = int_0^1 (1-t) <phi''(X + t X1) X1, X1> dt.
struct PhaseTaylorSplit {
    const PhaseSpec* phase = nullptr;
    Eigen::VectorXd X;
    double value = 0.0;
    Eigen::VectorXd gradient;

    double linear_part(const Eigen::VectorXd& X1) const {
        return value + gradient.dot(X1);
    }
    double remainder(const Eigen::VectorXd& X1) const;
};

PhaseTaylorSplit phase_taylor_split(const PhaseSpec& phi, const Eigen::VectorXd& X);

// --- constructors --------------------------------------------------------------

// T[x, y] = (2pi)^{-N/2} h^m sum_zeta a(x, y, zeta) e^{i phi(x, y, zeta)},
// times the source weight h^{n1}. The amplitude grid must share L and N with
// the function grid and is gated on its periodic face jump.
OperatorMatrix op_fio(const SampledFunction& a, const PhaseSpec& phi,
                      double fitness_tol = 1e-10);

// K(x, y) by zeta-quadrature on the (n2+n1)-dim grid.
SampledFunction fio_kernel(const SampledFunction& a, const PhaseSpec& phi,
                           double fitness_tol = 1e-10);

// Lift a(x, zeta) to a(x, y, zeta) constant in y.
SampledFunction lift_amplitude_xz(const SampledFunction& a2, int n1);

// (Tf)(x) = h^{n1} sum_y K(x, y) f(y); bilinear pairing, no conjugation.
SampledFunction apply_kernel(const SampledFunction& K, const SampledFunction& f);
OperatorMatrix kernel_to_operator(const SampledFunction& K, const GridSpec& source);

// t-quantization via the symbol-kernel route. Requires a self-dual grid so
// the symbol's frequency axes coincide with the dual lattice. t outside
// {0, 1} evaluates the symbol at off-lattice points by trigonometric
// interpolation (gated on Nyquist mass along the interpolated axes).
OperatorMatrix op_pseudo(const SampledFunction& a, double t);

// Direct quadrature of the defining oscillatory integral; oracle route.
OperatorMatrix op_pseudo_direct(const SampledFunction& a, double t);

// Kernel samples of the t-quantized operator on the (x, y) lattice.
SampledFunction pseudo_kernel(const SampledFunction& a, double t);

// b with b_t(x,D) = a_s(x,D): multiply the full transform of a by
// e^{i(t-s)<u,v>} over dual pairs (u, v); D = -i d/dx convention.
SampledFunction quantization_transfer(const SampledFunction& a, double s, double t);

// Op_{t1,t2,phi}(a) f(x) = (2pi)^{-N/2} iint a(t1 x + t2 y, xi) f(y)
//   e^{i phi(t1 x + t2 y, -t2 x + t1 y, xi)} dy dxi,  t1^2 + t2^2 = 1.
OperatorMatrix op_fio_rotated(const SampledFunction& a, const PhaseSpec& phi, double t1,
                              double t2, double fitness_tol = 1e-10);

// --- STFT reformulation ----------------------------------------------------------

struct ReformulationWindows {
    SampledFunction chi;   // window on the (x,y,zeta) grid, ||chi||_L2 = 1
    SampledFunction chi1;  // input-side window, ||chi1||_L1 = 1
    SampledFunction chi2;  // output-side window, ||chi2||_L1 = 1
};

// Bilinear form T_{a,phi}(f, g) built from the phase Taylor split and the
// shifted-frequency transform; equals (Op_phi(a) f, g) up to discretization.
cd stft_reformulation_pair(const SampledFunction& a, const PhaseSpec& phi,
                           const SampledFunction& f, const SampledFunction& g,
                           const ReformulationWindows& windows);

struct ReformulationReport {
    cd reformulated;
    cd direct;
    double rel_error = 0.0;
};
ReformulationReport reformulation_identity_error(const SampledFunction& a, const PhaseSpec& phi,
                                                 const SampledFunction& f,
                                                 const SampledFunction& g,
                                                 const ReformulationWindows& windows);

// --- kernel/STFT identities -------------------------------------------------------

struct LatticeSample {
    std::vector<int> x, y, xi, eta;  // lattice indices per block
};

// Checks that the phase-space samples of the kernel match the operator
// pairing against translated wave packets, plus the two magnitude-covariance
// audits of the packet STFTs.
double kernel_stft_identity(const SampledFunction& a, const PhaseSpec& phi,
                            const WindowSpec& chi1, const WindowSpec& chi2,
                            const std::vector<LatticeSample>& samples,
                            double fitness_tol = 1e-10, double window_tol = 1e-12);

// Magnitude identity between phase-space samples of the t-quantized kernel
// (windowed by the transported window) and of the symbol (windowed by chi).
double symbol_kernel_stft_check(const SampledFunction& a, double t, const WindowSpec& chi,
                                const std::vector<LatticeSample>& samples);

// Closed-form check for the dilated Gaussian product transform
// F(e^{-2|y/t|^2} e^{|y|^2}); returns max pointwise error over the xi grid
// and the t list.
double gaussian_identity_check(const std::vector<double>& t_values, const GridSpec& grid);

}  // namespace tfop
