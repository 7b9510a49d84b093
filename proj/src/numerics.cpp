#include "kgsym/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kgsym {

OdeTrajectory rk4(const OdeProblem& p) {
    OdeTrajectory out;
    const int n = static_cast<int>(std::ceil((p.t1 - p.t0) / p.step - 1e-12));
    std::vector<double> s = p.initial_state;
    double t = p.t0;
    out.times.push_back(t);
    out.states.push_back(s);
    auto axpy = [](const std::vector<double>& a, double c, const std::vector<double>& b) {
        std::vector<double> r(a.size());
        for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + c * b[i];
        return r;
    };
    for (int k = 0; k < n; ++k) {
        double h = std::min(p.step, p.t1 - t);
        std::vector<double> k1 = p.rhs(t, s);
        std::vector<double> k2 = p.rhs(t + h / 2, axpy(s, h / 2, k1));
        std::vector<double> k3 = p.rhs(t + h / 2, axpy(s, h / 2, k2));
        std::vector<double> k4 = p.rhs(t + h, axpy(s, h, k3));
        for (size_t i = 0; i < s.size(); ++i)
            s[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        t += h;
        bool finite = true;
        for (double v : s)
            if (!std::isfinite(v)) finite = false;
        if (!finite) {
            out.completed = false;
            out.last_valid = out.times.back();
            return out;
        }
        out.times.push_back(t);
        out.states.push_back(s);
    }
    out.last_valid = t;
    return out;
}

OdeSolution::OdeSolution(OdeTrajectory traj) : traj_(std::move(traj)) {
    if (traj_.times.size() < 2)
        throw std::invalid_argument("trajectory too short for dense output");
    if (traj_.states.front().size() < 2)
        throw std::invalid_argument("dense output expects (value, derivative) states");
}

std::pair<std::size_t, double> OdeSolution::locate(double tau) const {
    const auto& ts = traj_.times;
    if (tau < ts.front() - 1e-9 || tau > ts.back() + 1e-9)
        throw std::out_of_range("dense output query outside trajectory");
    auto it = std::upper_bound(ts.begin(), ts.end(), tau);
    std::size_t i = (it == ts.begin()) ? 0 : static_cast<std::size_t>(it - ts.begin() - 1);
    if (i >= ts.size() - 1) i = ts.size() - 2;
    double h = ts[i + 1] - ts[i];
    double s = (tau - ts[i]) / h;
    return {i, s};
}

double OdeSolution::value(double tau) const {
    auto [i, s] = locate(tau);
    double h = traj_.times[i + 1] - traj_.times[i];
    double y0 = traj_.states[i][0], y1 = traj_.states[i + 1][0];
    double d0 = traj_.states[i][1], d1 = traj_.states[i + 1][1];
    double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 +
           (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

double OdeSolution::deriv(double tau) const {
    auto [i, s] = locate(tau);
    double h = traj_.times[i + 1] - traj_.times[i];
    double y0 = traj_.states[i][0], y1 = traj_.states[i + 1][0];
    double d0 = traj_.states[i][1], d1 = traj_.states[i + 1][1];
    double s2 = s * s;
    return ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * h * d0 +
            (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * h * d1) /
           h;
}

double fd_residual(const DiagonalMetric& m, const Expr& V, const PointFn& u,
                   const std::array<double, 4>& p, double h) {
    Assignment a;
    for (int i = 0; i < 4; ++i) a[m.coords[i]] = p[i];
    double uc = u(p);
    double acc = eval_at(V, a) * uc;
    for (int i = 0; i < 4; ++i) {
        std::array<double, 4> up = p, dn = p;
        up[i] += h;
        dn[i] -= h;
        double uu = u(up), ud = u(dn);
        double d1 = (uu - ud) / (2 * h);
        double d2 = (uu - 2 * uc + ud) / (h * h);
        // Delta u = g^{ii} u_,ii + (1/sqrt g) d_i(sqrt g g^{ii}) u_,i per axis.
        double gi = eval_at(m.ginv(i), a);
        Expr damp = simplify(differentiate(m.sqrt_det * m.ginv(i), m.coords[i]) / m.sqrt_det);
        acc += gi * d2 + eval_at(damp, a) * d1;
    }
    return acc;
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& A,
                                  const std::vector<double>& b, double* residual) {
    const std::size_t rows = A.size();
    if (rows == 0) throw std::invalid_argument("least_squares: empty system");
    const std::size_t cols = A[0].size();
    // Normal equations: (A^T A) c = A^T b.
    std::vector<std::vector<double>> M(cols, std::vector<double>(cols + 1, 0.0));
    for (std::size_t i = 0; i < cols; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            double s = 0;
            for (std::size_t r = 0; r < rows; ++r) s += A[r][i] * A[r][j];
            M[i][j] = s;
        }
        double s = 0;
        for (std::size_t r = 0; r < rows; ++r) s += A[r][i] * b[r];
        M[i][cols] = s;
    }
    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < cols; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < cols; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        std::swap(M[col], M[piv]);
        double d = M[col][col];
        if (std::abs(d) < 1e-13) d = (d < 0 ? -1e-13 : 1e-13);
        for (std::size_t c = col; c <= cols; ++c) M[col][c] /= d;
        for (std::size_t r = 0; r < cols; ++r) {
            if (r == col) continue;
            double f = M[r][col];
            if (f == 0) continue;
            for (std::size_t c = col; c <= cols; ++c) M[r][c] -= f * M[col][c];
        }
    }
    std::vector<double> c(cols);
    for (std::size_t i = 0; i < cols; ++i) c[i] = M[i][cols];
    if (residual) {
        double worst = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            double s = -b[r];
            for (std::size_t i = 0; i < cols; ++i) s += A[r][i] * c[i];
            worst = std::max(worst, std::abs(s));
        }
        *residual = worst;
    }
    return c;
}

}  // namespace kgsym
