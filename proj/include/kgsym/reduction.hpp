#ifndef KGSYM_REDUCTION_HPP
#define KGSYM_REDUCTION_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "kgsym/catalog.hpp"
#include "kgsym/numerics.hpp"

namespace kgsym {

enum class ReductionCaseId { A1, A2, BPlusX, BMinusX, BPlusY, BMinusY };

const char* reduction_case_name(ReductionCaseId id);

class ReductionGateError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};
class UnsupportedGenerator : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};
class DegenerateRootError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};
class SingularIntervalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Parameters of one reduction run. Only the fields of the selected case are
/// read. Free-function instances are expressions in the symbol `s`.
struct ReductionCase {
    ReductionCaseId id = ReductionCaseId::A1;
    // Case A1: general diagonal background, V = V(t).
    Expr A = Expr::integer(1), B = Expr::integer(1), C = Expr::integer(1);
    Expr V_t = Expr::integer(0);
    double mu1 = 0, mu2 = 0, mu3 = 0;
    std::array<int, 3> a1_order{1, 2, 3};  // reduction order of the translations
    // Case A2: power-law background (U = 1/t), V = (1/t^2) V'((y^2+z^2) t^-2beta).
    Rational alpha{0}, beta{1, 2};
    double mu4 = 0, mu5 = 0;
    Expr V_free = Expr::integer(0);  // V'(s) for A2; V(s) for the B cases
    // B cases:
    double mu6 = 0, mu7 = 0;
};

/// Second-order reduced ODE c2 sigma'' + c1 sigma' + c0 sigma = 0 with
/// coefficients as expressions in the symbol `s`.
struct ReducedOde {
    std::string var_name;
    Expr c2 = Expr::integer(1), c1 = Expr::integer(0), c0 = Expr::integer(0);
    std::vector<double> singular_points;
};

/// Invariant ansatz u = phi(t,x,y,z) * sigma(zeta(t,x,y,z)).
struct InvariantSolution {
    Expr phi;
    Expr zeta;
    DiagonalMetric metric;
    Expr potential;  // the coordinate-space V entering the field equation
};

std::pair<ReducedOde, InvariantSolution> reduce_case(const ReductionCase& c);

/// Scalar profile with derivative access, either closed form or dense ODE
/// output.
struct SigmaFunction {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    double lo = 0, hi = 0;
};

SigmaFunction sigma_from_expr(const Expr& sigma_in_s, double lo, double hi);

/// Integrates the reduced ODE from (v0, d0) at z0. Throws when a singular
/// point of the ODE lies inside [z0, z1]. The default step keeps the dense
/// output's interpolation error negligible against the O(h^2) stencils that
/// later differentiate through it.
SigmaFunction sigma_from_ode(const ReducedOde& ode, double z0, double z1, double v0,
                             double d0, double step = 2.5e-4);

/// sigma'' + 2 sigma' + mu3^2 sigma = 0: the closed form of the exponential
/// B-case subfamily. Distinct roots -1 +- sqrt(1-mu3^2) for |mu3| < 1; real
/// damped oscillations for |mu3| > 1; |mu3| = 1 raises (see the degenerate
/// completion below).
Expr closed_form_sigma(double mu3, double s1, double s2);

/// Repeated-root completion (sigma1 + sigma2 s) e^-s for |mu3| = 1.
Expr closed_form_sigma_degenerate(double s1, double s2);

/// sigma'' - 2 sigma' = 0 solution sigma0 + sigma1 e^{2 s} for the mirrored
/// exponential subfamily.
Expr closed_form_sigma_minus(double s0, double s1);

/// Numeric lift of an invariant solution.
class LiftedSolution {
  public:
    LiftedSolution(InvariantSolution inv, SigmaFunction sigma);
    double value(const std::array<double, 4>& p) const;
    std::array<double, 4> gradient(const std::array<double, 4>& p) const;
    PointFn as_point_fn() const;
    const InvariantSolution& invariant() const { return inv_; }

  private:
    InvariantSolution inv_;
    SigmaFunction sigma_;
    std::array<Expr, 4> dphi_, dzeta_;
};

/// Max over the grid of |Delta u + V u| / max(|u|, 1) by central differences.
double verify_invariant_solution(const DiagonalMetric& m, const Expr& V, const PointFn& u,
                                 const std::vector<std::array<double, 4>>& grid, double h);

std::vector<std::array<double, 4>> grid_points(const Grid& g);

/// Stage check for a reduction: at sampled spacetime points, the effective
/// (c2, c1, c0) of the operator sigma -> KG(phi sigma(zeta)) are extracted by
/// probing with sigma in {1, s, s^2} and compared (as cross products) against
/// the claimed reduced-ODE coefficients. Returns the worst normalized
/// mismatch; ~0 certifies the reduction stage.
double reduction_coefficient_check(const ReductionCase& c, const ReducedOde& ode,
                                   const InvariantSolution& inv, int samples,
                                   std::uint64_t seed);

/// Zero-order invariants of the catalog generator `label` + mu * u d_u:
/// three coordinate invariants plus the u-invariant, as expressions over
/// (t,x,y,z,u). For the scaling generator "X5" the family supplies the
/// exponents and mu is the exponent of the t-power in the u-invariant.
std::vector<Expr> zero_order_invariants(const std::string& label, double mu,
                                        const BianchiFamily& fam);

}  // namespace kgsym

#endif
