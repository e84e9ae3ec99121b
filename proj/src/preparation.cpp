#include "mqm/preparation.hpp"

#include "mqm/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <sstream>

namespace mqm {

const char* to_string(Provenance p)
{
    switch (p) {
    case Provenance::closed_form: return "closed_form";
    case Provenance::riccati: return "riccati";
    case Provenance::wiener_hopf: return "wiener_hopf";
    }
    return "unknown";
}

namespace {

std::vector<std::string> regime_warnings(const NoiseBudget& b)
{
    std::vector<std::string> w;
    if (b.omega_m > 0.1 * b.omega_q) {
        std::ostringstream os;
        os << "omega_m/omega_q = " << b.omega_m / b.omega_q << " > 0.1: outside the free-mass regime";
        w.push_back(os.str());
    }
    return w;
}

struct Scaled {
    Mat2 A;
    double q;  // force intensity on p
    double r;  // measurement intensity
};

Mat2 lyapunov(const Mat2& A, const Mat2& W)
{
    // solve A X + X A^T = W for symmetric X = [[x0, x1], [x1, x2]]
    Eigen::Matrix3d K;
    K << 2 * A(0, 0), 2 * A(0, 1), 0,
         A(1, 0), A(0, 0) + A(1, 1), A(0, 1),
         0, 2 * A(1, 0), 2 * A(1, 1);
    const Eigen::Vector3d rhs(W(0, 0), W(0, 1), W(1, 1));
    const Eigen::Vector3d x = K.fullPivLu().solve(rhs);
    Mat2 X;
    X << x(0), x(1), x(1), x(2);
    return X;
}

Mat2 riccati_lhs(const Mat2& P, const Scaled& s)
{
    Mat2 Q = Mat2::Zero();
    Q(1, 1) = s.q;
    const Eigen::RowVector2d C(1.0, 0.0);
    return s.A * P + P * s.A.transpose() - P * C.transpose() * C * P / s.r + Q;
}

Mat2 hamiltonian_solution(const Scaled& s)
{
    Eigen::Matrix4d H = Eigen::Matrix4d::Zero();
    H.topLeftCorner<2, 2>() = s.A.transpose();
    Mat2 CRC = Mat2::Zero();
    CRC(0, 0) = 1.0 / s.r;
    Mat2 Q = Mat2::Zero();
    Q(1, 1) = s.q;
    H.topRightCorner<2, 2>() = -CRC;
    H.bottomLeftCorner<2, 2>() = -Q;
    H.bottomRightCorner<2, 2>() = -s.A;
    Eigen::EigenSolver<Eigen::Matrix4d> es(H);
    Eigen::Matrix<std::complex<double>, 4, 2> U;
    int k = 0;
    for (int i = 0; i < 4 && k < 2; ++i)
        if (es.eigenvalues()(i).real() < 0) U.col(k++) = es.eigenvectors().col(i);
    if (k != 2) throw NumericalError("riccati: Hamiltonian matrix has no 2-dimensional stable subspace");
    const Eigen::Matrix2cd U1 = U.topRows<2>();
    const Eigen::Matrix2cd U2 = U.bottomRows<2>();
    const Mat2 P = (U2 * U1.inverse()).real();
    return 0.5 * (P + P.transpose());
}

Mat2 newton_refine(Mat2 P, const Scaled& s)
{
    const double qnorm = std::abs(s.q);
    double res = riccati_lhs(P, s).norm() / qnorm;
    for (int it = 0; it < 50 && res > 1e-14; ++it) {
        // Kleinman step: (A - P C^T C / r) X + X (...)^T = -(Q + P C^T C P / r)
        Mat2 Ac = s.A;
        Ac(0, 0) -= P(0, 0) / s.r;
        Ac(1, 0) -= P(1, 0) / s.r;
        Mat2 W = Mat2::Zero();
        W(1, 1) = -s.q;
        W(0, 0) -= P(0, 0) * P(0, 0) / s.r;
        W(0, 1) -= P(0, 0) * P(0, 1) / s.r;
        W(1, 0) = W(0, 1);
        W(1, 1) -= P(0, 1) * P(0, 1) / s.r;
        const Mat2 next = lyapunov(Ac, W);
        const double next_res = riccati_lhs(next, s).norm() / qnorm;
        if (!(next_res < res)) break;
        P = next;
        res = next_res;
    }
    if (!(res < 1e-9)) {
        std::ostringstream os;
        os << "riccati: iteration did not converge, relative residual " << res;
        throw NumericalError(os.str());
    }
    return P;
}

} // namespace

Mat2 free_mass_conditional_cov(double mass, double omega, double n_f, double n_x)
{
    using constants::hbar;
    const double dx2 = hbar / (2.0 * mass * omega);
    const double dp2 = hbar * mass * omega / 2.0;
    const double r2 = std::sqrt(2.0);
    Mat2 v;
    v(0, 0) = std::pow(n_f, 0.25) * std::pow(n_x, 0.75) * r2 * dx2;
    v(0, 1) = v(1, 0) = std::sqrt(n_f * n_x) * hbar / 2.0;
    v(1, 1) = std::pow(n_f, 0.75) * std::pow(n_x, 0.25) * r2 * dp2;
    return v;
}

ConditionalState conditional_covariance(const NoiseBudget& b)
{
    b.validate();
    const double omega = std::exp(b.q) * b.omega_q;
    const double zf = b.omega_f / omega;
    const double zx = omega / b.omega_x;
    ConditionalState c;
    c.budget = b;
    c.provenance = Provenance::closed_form;
    c.state.cov = free_mass_conditional_cov(b.mass, omega, 1.0 + 2.0 * zf * zf, 1.0 + 2.0 * zx * zx);
    c.warnings = regime_warnings(b);
    return c;
}

Mat2 solve_filter_riccati(double mass, double omega_m, double gamma_m, double s_force, double s_meas)
{
    if (!(mass > 0) || !(s_force > 0) || !(s_meas > 0) || omega_m < 0 || gamma_m < 0)
        throw ValidationError("riccati: requires m > 0, positive noise densities, omega_m, gamma_m >= 0");
    const double Q = s_force / 2.0;
    const double R = s_meas / 2.0;
    if (omega_m == 0 && gamma_m == 0) {
        // free mass: closed-form roots of the three scalar equations
        const double pxp = std::sqrt(Q * R);
        const double pxx = std::sqrt(2.0 * pxp * R / mass);
        const double ppp = mass * pxx * pxp / R;
        Mat2 P;
        P << pxx, pxp, pxp, ppp;
        return P;
    }
    // work in units where the quantum noise levels are O(1)
    const double w0 = std::sqrt(std::sqrt(Q / R) / mass);  // free-mass filter bandwidth
    const double x0 = std::sqrt(R * w0);
    const double p0 = mass * w0 * x0;
    Scaled s;
    s.A << 0, 1, -(omega_m / w0) * (omega_m / w0), -2 * gamma_m / w0;
    s.q = Q / (p0 * p0 * w0);
    s.r = R * w0 / (x0 * x0);
    Mat2 P = newton_refine(hamiltonian_solution(s), s);
    const Eigen::DiagonalMatrix<double, 2> D(x0, p0);
    return D * P * D;
}

double filter_riccati_residual(const Mat2& P, double mass, double omega_m, double gamma_m, double s_force,
                               double s_meas)
{
    Mat2 A;
    A << 0, 1.0 / mass, -mass * omega_m * omega_m, -2 * gamma_m;
    Mat2 Q = Mat2::Zero();
    Q(1, 1) = s_force / 2.0;
    const double R = s_meas / 2.0;
    const Eigen::RowVector2d C(1.0, 0.0);
    const Mat2 lhs = A * P + P * A.transpose() - P * C.transpose() * C * P / R + Q;
    return lhs.norm() / Q.norm();
}

ConditionalState riccati_steady_state(const NoiseBudget& b)
{
    const DerivedScales d = derive(b);
    ConditionalState c;
    c.budget = b;
    c.provenance = Provenance::riccati;
    c.state.cov = solve_filter_riccati(b.mass, b.omega_m, b.gamma_m, d.s_f_th + d.s_f_ba, d.s_x_th + d.s_x_sh);
    c.warnings = regime_warnings(b);
    return c;
}

EffectiveN riccati_effective_n(const NoiseBudget& b)
{
    const DerivedScales d = derive(b);
    using constants::hbar;
    const double omega = std::exp(b.q) * b.omega_q;
    EffectiveN n;
    n.n_f = (d.s_f_th + d.s_f_ba) / (hbar * b.mass * omega * omega);
    n.n_x = (d.s_x_th + d.s_x_sh) * b.mass * omega * omega / hbar;
    return n;
}

OrderOfMagnitude order_of_magnitude_prepared(const NoiseBudget& b, double tau)
{
    if (!(tau > 0)) throw ValidationError("order_of_magnitude_prepared: tau must be positive");
    const DerivedScales d = derive(b);
    const double sx = d.s_x_th + d.s_x_sh;
    const double sf = d.s_f_th + d.s_f_ba;
    const double m = b.mass;
    OrderOfMagnitude o;
    o.dx2 = sx / tau + tau * tau * tau * sf / (m * m);
    o.dp2 = m * m * sx / (tau * tau * tau) + tau * sf;
    o.u_est = 2.0 / constants::hbar * std::sqrt(o.dx2 * o.dp2);
    o.u_nx_nf = d.n_x * d.n_f;
    return o;
}

} // namespace mqm
