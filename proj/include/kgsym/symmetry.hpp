#ifndef KGSYM_SYMMETRY_HPP
#define KGSYM_SYMMETRY_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "kgsym/geometry.hpp"

namespace kgsym {

/// Generic point-symmetry generator of the scalar field equation:
/// X = xi^i(x) d_i + ((2-n)/2 psi + a0) u d_u + b(x) d_u with n = 4.
/// xi is a conformal vector with factor psi; b solves the field equation.
struct SymmetryGenerator {
    VectorField xi;
    Expr psi = Expr::integer(0);
    Rational a0{0};
    Expr b = Expr::integer(0);

    Expr eta_u_coeff() const;  // -psi + a0
    Expr eta() const;          // eta_u_coeff * u + b
};

SymmetryGenerator generic_symmetry(VectorField xi, Expr psi, Rational a0, Expr b);

/// Jet coordinates are plain symbols: u, u_<c>, u_<c><d> (c <= d in coordinate
/// order). Prolongation coefficients and condition residuals are expressions
/// over chart coordinates plus these jet symbols, evaluated at sampled points.
std::string jet_u();
std::string jet_du(const DiagonalMetric& m, int i);
std::string jet_ddu(const DiagonalMetric& m, int i, int j);

/// Numeric jet point: chart coordinates, u, first and (symmetric) second
/// derivatives bundled as an evaluation assignment.
struct JetPoint {
    std::array<double, 4> x{};
    double u = 0;
    std::array<double, 4> du{};
    std::array<std::array<double, 4>, 4> ddu{};
    Assignment assignment(const DiagonalMetric& m) const;
};

/// Second prolongation of a generator: eta, eta_i and eta_ij as expressions
/// in chart + jet symbols, via the standard coefficient formulas for a single
/// dependent variable (the xi_{,u} terms are kept and vanish identically).
struct Prolongation2 {
    Expr eta;
    std::array<Expr, 4> eta_i;
    std::array<std::array<Expr, 4>, 4> eta_ij;
};

Prolongation2 prolong2(const DiagonalMetric& m, const SymmetryGenerator& g);

/// The field operator H = Delta u + V u written in chart + jet symbols.
Expr kg_operator(const DiagonalMetric& m, const Expr& V);

/// u_tt solved from H = 0 (g^tt never vanishes on these charts).
Expr kg_utt_solved(const DiagonalMetric& m, const Expr& V);

/// X^{(2)}(H) as an expression in chart + jet symbols.
Expr prolonged_action_on_kg(const DiagonalMetric& m, const Expr& V,
                            const SymmetryGenerator& g);

struct LieConditionReport {
    double max_residual = 0.0;
    bool pass = false;
    std::vector<double> lambda_estimates;  // off-shell X(H)/H diagnostics
};

/// On-shell Lie condition: u_tt is eliminated through H = 0 at each sampled
/// jet point and X^{(2)}(H) must vanish.
LieConditionReport lie_condition_residual(const DiagonalMetric& m, const Expr& V,
                                          const SymmetryGenerator& g, int samples,
                                          double tol, std::uint64_t seed);

/// Constraint tying a conformal vector to an admissible potential (n = 4):
/// xi^k V_,k + 2 psi V - Delta psi, simplified. A zero residual is the
/// admissibility condition. `two_dimensional` drops the Delta psi term
/// (the n = 2 branch).
Expr constraint_residual(const DiagonalMetric& m, const VectorField& xi, const Expr& psi,
                         const Expr& V, bool two_dimensional = false);

/// The same constraint with the opposite sign on the Delta psi term, as the
/// determining equations are sometimes quoted. The two forms differ only for
/// proper CKVs; verify-tables reports any row where they disagree.
Expr constraint_residual_alt_sign(const DiagonalMetric& m, const VectorField& xi,
                                  const Expr& psi, const Expr& V);

/// First-order field Lagrangian (1/2) sqrt g g^{ij} u_i u_j - (1/2) sqrt g V u^2
/// in chart + jet symbols.
Expr lagrangian_density(const DiagonalMetric& m, const Expr& V);

/// Variational gauge generated by a conformal factor: contravariant components
/// A^i = ((2-n)/4) sqrt g g^{ij} psi_,j u^2 with n = 4; zero whenever psi is
/// constant.
struct NoetherGauge {
    std::array<Expr, 4> A;
};

NoetherGauge noether_gauge(const DiagonalMetric& m, const Expr& psi);

/// Max |X^{(1)}L + L D_i xi^i - D_i A^i| over sampled jet points. This is an
/// identity in the jet variables for variational symmetries; no on-shell
/// restriction is applied.
double noether_condition_residual(const DiagonalMetric& m, const Expr& V,
                                  const SymmetryGenerator& g, const NoetherGauge& gauge,
                                  int samples, std::uint64_t seed);

/// Conserved current I^i = xi^k (u_k dL/du_i - delta^i_k L) - eta dL/du_i + A^i
/// as expressions in chart + first-jet symbols.
std::array<Expr, 4> noether_current(const DiagonalMetric& m, const Expr& V,
                                    const SymmetryGenerator& g, const NoetherGauge& gauge);

/// Field configuration for evaluating currents along a solution.
struct FieldOnGrid {
    std::function<double(const std::array<double, 4>&)> u;
    std::function<std::array<double, 4>(const std::array<double, 4>&)> grad;
};

/// Max over the grid of the central-difference total divergence D_i I^i of the
/// current evaluated along the given field.
double current_divergence_on_solution(const DiagonalMetric& m,
                                      const std::array<Expr, 4>& current,
                                      const FieldOnGrid& field,
                                      const std::vector<std::array<double, 4>>& grid,
                                      double h);

/// Wave-equation admissibility (V == 0): Delta psi must vanish.
bool wave_mode_check(const DiagonalMetric& m, const Expr& psi, const ZeroTestOptions& opt);

}  // namespace kgsym

#endif
