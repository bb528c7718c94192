#include "capac/stability.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "capac/errors.hpp"

namespace capac {

JacobiProblem assemble_jacobi(const CapillaryCurve& curve,
                              const PlanarDomain& dom, int n_nodes) {
    if (n_nodes < 32)
        throw ConfigError("Jacobi assembly needs at least 32 nodes");
    if (dom.kind() != curve.domain().kind())
        throw ConfigError("Jacobi assembly domain does not match the curve");
    const double st = std::sin(curve.theta());
    if (!(st > 1e-12))
        throw ConfigError("contact angle too small for the Robin coefficient");

    JacobiProblem jp;
    jp.length = curve.length();
    jp.theta = curve.theta();
    jp.n_nodes = n_nodes;
    const double kappa = curve.kappa();
    jp.potential_coeff = [kappa](double) { return kappa * kappa; };
    const double ct = std::cos(curve.theta());
    jp.robin0 = (curve.end(0).kappa_dM + ct * kappa) / st;
    jp.robinL = (curve.end(1).kappa_dM + ct * kappa) / st;
    return jp;
}

JacobiMatrix discretize_jacobi(const JacobiProblem& jp, int n) {
    if (n < 32) throw ConfigError("Jacobi discretization needs >= 32 nodes");
    if (!(jp.length > 0.0)) throw ConfigError("Jacobi problem has no length");
    if (!jp.potential_coeff)
        throw ConfigError("Jacobi problem is missing its potential coefficient");

    JacobiMatrix m;
    m.n = n;
    m.h = jp.length / (n - 1);
    m.s.resize(n);
    m.weight.resize(n);
    m.diag.resize(n);
    m.off.assign(n - 1, -1.0 / m.h);
    const double sgn = jp.literal_zeroth_sign ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) {
        m.s[i] = jp.length * i / (n - 1);
        m.weight[i] = (i == 0 || i == n - 1) ? m.h / 2.0 : m.h;
        double q = sgn * jp.potential_coeff(m.s[i]);
        m.diag[i] = 2.0 / m.h - m.h * q;
    }
    // Ghost-node elimination of d_tau omega = r omega folds the Robin term
    // into the weighted diagonal.
    double q0 = sgn * jp.potential_coeff(0.0);
    double qL = sgn * jp.potential_coeff(jp.length);
    m.diag[0] = 1.0 / m.h - jp.robin0 - (m.h / 2.0) * q0;
    m.diag[n - 1] = 1.0 / m.h - jp.robinL - (m.h / 2.0) * qL;
    return m;
}

std::vector<double> apply_weighted(const JacobiMatrix& m,
                                   const std::vector<double>& omega) {
    if (static_cast<int>(omega.size()) != m.n)
        throw ConfigError("apply_weighted size mismatch");
    std::vector<double> out(m.n);
    for (int i = 0; i < m.n; ++i) {
        double v = m.diag[i] * omega[i];
        if (i > 0) v += m.off[i - 1] * omega[i - 1];
        if (i + 1 < m.n) v += m.off[i] * omega[i + 1];
        out[i] = v;
    }
    return out;
}

namespace {

struct LevelResult {
    double sigma_min = 0.0;
    Eigen::VectorXd bordered_kernel;  // eigenvector of the smallest |eig|
    Eigen::VectorXd eig_abs_sorted;
};

// Symmetric bordered matrix in weight-normalized coordinates
// y = sqrt(W) omega: [[S, u], [u^T, 0]] with S = W^{-1/2}(WJ)W^{-1/2} and
// u_i = sqrt(w_i) the constraint direction.
LevelResult solve_level(const JacobiMatrix& m) {
    const int n = m.n;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int i = 0; i < n; ++i) {
        B(i, i) = m.diag[i] / m.weight[i];
        if (i + 1 < n)
            B(i, i + 1) = B(i + 1, i) =
                m.off[i] / std::sqrt(m.weight[i] * m.weight[i + 1]);
        B(i, n) = B(n, i) = std::sqrt(m.weight[i]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    const auto& ev = es.eigenvalues();
    int best = 0;
    for (int k = 1; k <= n; ++k)
        if (std::abs(ev(k)) < std::abs(ev(best))) best = k;
    LevelResult out;
    out.sigma_min = std::abs(ev(best));
    out.bordered_kernel = es.eigenvectors().col(best);
    out.eig_abs_sorted = ev.cwiseAbs();
    std::sort(out.eig_abs_sorted.data(),
              out.eig_abs_sorted.data() + out.eig_abs_sorted.size());
    return out;
}

// Constrained spectrum: S projected on the complement of the constraint
// direction by a Householder basis.
std::vector<double> constrained_spectrum(const JacobiMatrix& m, int count) {
    const int n = m.n;
    Eigen::MatrixXd S(n, n);
    S.setZero();
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) {
        S(i, i) = m.diag[i] / m.weight[i];
        if (i + 1 < n)
            S(i, i + 1) = S(i + 1, i) =
                m.off[i] / std::sqrt(m.weight[i] * m.weight[i + 1]);
        u(i) = std::sqrt(m.weight[i]);
    }
    u.normalize();
    Eigen::VectorXd v = u;
    v(n - 1) -= 1.0;
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    double vv = v.squaredNorm();
    if (vv > 1e-28) H -= (2.0 / vv) * (v * v.transpose());
    Eigen::MatrixXd Q = H.leftCols(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q.transpose() * S * Q);
    std::vector<double> head;
    for (int k = 0; k < std::min<int>(count, n - 1); ++k)
        head.push_back(es.eigenvalues()(k));
    return head;
}

} // namespace

NondegeneracyReport check_nondegeneracy(const JacobiProblem& jp) {
    std::vector<int> ladder = {64, 128, 256};
    if (jp.n_nodes > 256) ladder.push_back(jp.n_nodes);

    NondegeneracyReport rep;
    rep.ladder = ladder;
    std::vector<LevelResult> lv;
    JacobiMatrix finest;
    for (int n : ladder) {
        finest = discretize_jacobi(jp, n);
        lv.push_back(solve_level(finest));
        rep.sigma_ladder.push_back(lv.back().sigma_min);
    }
    const int nl = static_cast<int>(ladder.size());
    rep.smallest_singular_value = rep.sigma_ladder.back();
    rep.smallest_singular_extrap = std::max(
        0.0,
        (4.0 * rep.sigma_ladder[nl - 1] - rep.sigma_ladder[nl - 2]) / 3.0);
    rep.spectrum_head = constrained_spectrum(finest, 5);

    double qmax = 0.0;
    for (int i = 0; i < finest.n; ++i)
        qmax = std::max(qmax, std::abs(jp.potential_coeff(finest.s[i])));
    const double scale = 1.0 + qmax + 1.0 / (jp.length * jp.length);
    const double floor_tol = 1e-9 * scale;
    const double zero_tol = 1e-6 * scale;

    bool shrinking = true;
    for (int k = 1; k < nl; ++k)
        if (rep.sigma_ladder[k] > 0.6 * rep.sigma_ladder[k - 1])
            shrinking = false;
    bool ratios_settled = true;
    for (int k = std::max(1, nl - 2); k < nl; ++k) {
        double r = std::abs(rep.sigma_ladder[k] - rep.sigma_ladder[k - 1]) /
                   std::max(rep.sigma_ladder[k], 1e-300);
        if (r > 0.10) ratios_settled = false;
    }

    if (rep.smallest_singular_value <= floor_tol ||
        (shrinking && rep.smallest_singular_extrap <= zero_tol)) {
        rep.verdict = "degenerate";
    } else if (ratios_settled && rep.smallest_singular_value > zero_tol) {
        rep.verdict = "nondegenerate";
    } else {
        rep.verdict = "inconclusive";
    }

    const LevelResult& fin = lv.back();
    if (rep.verdict == "degenerate") {
        double thresh = std::max(10.0 * rep.smallest_singular_value, floor_tol);
        rep.kernel_dim = 0;
        for (int k = 0; k < fin.eig_abs_sorted.size(); ++k)
            if (fin.eig_abs_sorted(k) <= thresh) ++rep.kernel_dim;
        const int n = finest.n;
        rep.kernel_s = finest.s;
        rep.kernel_element.resize(n);
        for (int i = 0; i < n; ++i)
            rep.kernel_element[i] =
                fin.bordered_kernel(i) / std::sqrt(finest.weight[i]);
        rep.kernel_constant = fin.bordered_kernel(n);
        // Fix sign and normalize sup = 1.
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(rep.kernel_element[i]) >
                std::abs(rep.kernel_element[imax]))
                imax = i;
        double sc = rep.kernel_element[imax];
        for (double& w : rep.kernel_element) w /= sc;
        rep.kernel_constant /= sc;
    }
    return rep;
}

} // namespace capac
