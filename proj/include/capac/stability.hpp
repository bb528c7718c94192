#pragma once

#include <functional>
#include <string>
#include <vector>

#include "capac/geometry.hpp"

namespace capac {

/// 1-D Jacobi problem for normal perturbations of a capillary curve. The
/// kernel equation is omega'' + q omega = const with the Robin closure
/// d_tau omega = r omega at each endpoint (d_tau the outward conormal
/// derivative); q = |II_Sigma|^2 + Ric(nu, nu) and
/// r = (kappa_dM + cos(theta) kappa_Sigma) / sin(theta),
/// kappa_Sigma carrying the mean-curvature-vector sign of the curve type.
struct JacobiProblem {
    double length = 0.0;
    double theta = 0.0;
    std::function<double(double)> potential_coeff;  // q(s)
    double robin0 = 0.0;
    double robinL = 0.0;
    int n_nodes = 256;  // finest assembly size
    // Flip the sign of the zeroth-order term. The default convention is the
    // one whose kernels reproduce the ambient translation and rotation
    // fields exactly; the flipped form is kept reachable for comparison.
    bool literal_zeroth_sign = false;
};

JacobiProblem assemble_jacobi(const CapillaryCurve& curve,
                              const PlanarDomain& dom, int n_nodes);

/// Weight-symmetrized finite-difference form on n nodes: W*J is symmetric
/// tridiagonal with trapezoid weights W; Robin ends enter by ghost-node
/// elimination, so affine kernels are reproduced exactly.
struct JacobiMatrix {
    int n = 0;
    double h = 0.0;
    std::vector<double> s;       // nodes
    std::vector<double> weight;  // trapezoid weights
    std::vector<double> diag;    // W*J diagonal, n entries
    std::vector<double> off;     // W*J off-diagonal, n-1 entries
};
JacobiMatrix discretize_jacobi(const JacobiProblem& jp, int n);

/// (W*J) omega, for residual checks against analytic Jacobi fields.
std::vector<double> apply_weighted(const JacobiMatrix& m,
                                   const std::vector<double>& omega);

/// Volume-constrained nondegeneracy via the bordered operator
/// (omega, c) -> (J omega + c, integral of omega), discretized symmetrically
/// and swept over a refinement ladder.
struct NondegeneracyReport {
    std::string verdict;  // "nondegenerate" | "degenerate" | "inconclusive"
    double smallest_singular_value = 0.0;   // finest level
    double smallest_singular_extrap = 0.0;  // h^2 Richardson over the ladder
    int kernel_dim = 0;
    std::vector<double> spectrum_head;  // leading constrained eigenvalues
    std::vector<int> ladder;            // node counts used
    std::vector<double> sigma_ladder;   // bordered smallest singular values
    // Unit-norm bordered kernel estimate on the finest grid (empty unless
    // the verdict is degenerate).
    std::vector<double> kernel_s;
    std::vector<double> kernel_element;
    double kernel_constant = 0.0;
};

NondegeneracyReport check_nondegeneracy(const JacobiProblem& jp);

} // namespace capac
