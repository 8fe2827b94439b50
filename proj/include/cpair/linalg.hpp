#pragma once

#include "cpair/rational.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace cpair {

/// Orthonormal basis of the null space of A (SVD, relative threshold).
inline Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& A, double rel_tol = 1e-10) {
    if (A.rows() == 0) return Eigen::MatrixXd::Identity(A.cols(), A.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    double tol = rel_tol * std::max(1.0, smax);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank;
    return svd.matrixV().rightCols(A.cols() - rank);
}

struct LinearSolve {
    Eigen::VectorXd x;
    double residual = 0;
    double condition = 0;
    bool unique = false;
};

/// Least-squares solve of A x = b with uniqueness (full column rank) check.
inline LinearSolve solve_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                       double rel_tol = 1e-10) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
    LinearSolve r;
    r.x = svd.solve(b);
    r.residual = (A * r.x - b).norm();
    r.condition = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
    int rank = 0;
    double tol = rel_tol * std::max(1.0, smax);
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank;
    r.unique = (rank == A.cols());
    return r;
}

/// Classic fixed-step RK4 for x' = f(x).
inline Eigen::VectorXd rk4_flow(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                Eigen::VectorXd x, double total_time, double step) {
    int nsteps = static_cast<int>(std::round(std::abs(total_time) / step));
    double h = total_time / std::max(nsteps, 1);
    for (int s = 0; s < nsteps; ++s) {
        Eigen::VectorXd k1 = f(x);
        Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
        Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
        Eigen::VectorXd k4 = f(x + h * k3);
        x += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return x;
}

/// RK4 for the flow together with its Jacobian along the trajectory
/// (variational equation J' = Df(x) J integrated with the same steps).
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> rk4_flow_with_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& df, Eigen::VectorXd x,
    double total_time, double step) {
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
    int nsteps = static_cast<int>(std::round(std::abs(total_time) / step));
    double h = total_time / std::max(nsteps, 1);
    for (int s = 0; s < nsteps; ++s) {
        Eigen::VectorXd k1 = f(x);
        Eigen::MatrixXd K1 = df(x) * J;
        Eigen::VectorXd x2 = x + 0.5 * h * k1;
        Eigen::VectorXd k2 = f(x2);
        Eigen::MatrixXd K2 = df(x2) * (J + 0.5 * h * K1);
        Eigen::VectorXd x3 = x + 0.5 * h * k2;
        Eigen::VectorXd k3 = f(x3);
        Eigen::MatrixXd K3 = df(x3) * (J + 0.5 * h * K2);
        Eigen::VectorXd x4 = x + h * k3;
        Eigen::VectorXd k4 = f(x4);
        Eigen::MatrixXd K4 = df(x4) * (J + h * K3);
        x += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
        J += (h / 6.0) * (K1 + 2 * K2 + 2 * K3 + K4);
    }
    return {x, J};
}

}  // namespace cpair
