#ifndef KGSYM_NUMERICS_HPP
#define KGSYM_NUMERICS_HPP

#include <array>
#include <functional>
#include <vector>

#include "kgsym/geometry.hpp"
#include "kgsym/lambert.hpp"

namespace kgsym {

/// First-order system s' = f(tau, s) integrated at fixed step.
struct OdeProblem {
    std::function<std::vector<double>(double, const std::vector<double>&)> rhs;
    std::vector<double> initial_state;
    double t0 = 0.0;
    double t1 = 1.0;
    double step = 1e-3;
};

struct OdeTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    bool completed = true;   // false when a non-finite state aborted the run
    double last_valid = 0.0;
};

/// Classical fourth-order Runge-Kutta at fixed step. Aborts on non-finite
/// state, reporting the last valid time.
OdeTrajectory rk4(const OdeProblem& p);

/// Dense output for a scalar second-order ODE trajectory with states
/// (sigma, sigma'). Cubic Hermite interpolation between stored nodes gives
/// O(step^4) accuracy for both the value and the derivative.
class OdeSolution {
  public:
    explicit OdeSolution(OdeTrajectory traj);
    double value(double tau) const;
    double deriv(double tau) const;
    double t_min() const { return traj_.times.front(); }
    double t_max() const { return traj_.times.back(); }

  private:
    OdeTrajectory traj_;
    std::pair<std::size_t, double> locate(double tau) const;
};

/// Axis-aligned evaluation grid.
struct Grid {
    std::array<double, 4> lo;
    std::array<double, 4> hi;
    std::array<int, 4> count;

    template <typename F>
    void for_each(F&& f) const {
        std::array<double, 4> p;
        for (int a = 0; a < count[0]; ++a) {
            p[0] = node(0, a);
            for (int b = 0; b < count[1]; ++b) {
                p[1] = node(1, b);
                for (int c = 0; c < count[2]; ++c) {
                    p[2] = node(2, c);
                    for (int d = 0; d < count[3]; ++d) {
                        p[3] = node(3, d);
                        f(p);
                    }
                }
            }
        }
    }

    double node(int axis, int k) const {
        if (count[axis] <= 1) return 0.5 * (lo[axis] + hi[axis]);
        return lo[axis] + (hi[axis] - lo[axis]) * k / (count[axis] - 1);
    }
};

using PointFn = std::function<double(const std::array<double, 4>&)>;

/// Central-difference approximation of the Klein-Gordon residual
/// Delta u + V u at point p, O(h^2) accurate. The metric is diagonal, so an
/// axis-aligned stencil suffices.
double fd_residual(const DiagonalMetric& m, const Expr& V, const PointFn& u,
                   const std::array<double, 4>& p, double h);

/// Dense least-squares solve of A c = b (rows >= cols) by normal equations
/// with partial pivoting. Returns the residual norm through *residual.
std::vector<double> least_squares(const std::vector<std::vector<double>>& A,
                                  const std::vector<double>& b, double* residual);

}  // namespace kgsym

#endif
