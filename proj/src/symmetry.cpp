#include "kgsym/symmetry.hpp"

#include <cmath>

#include "kgsym/rng.hpp"

namespace kgsym {

namespace {

Expr num(long long n) { return Expr::integer(n); }

Expr u_sym() { return Expr::symbol("u"); }

Expr du_sym(const DiagonalMetric& m, int i) { return Expr::symbol("u_" + m.coords[i]); }

Expr ddu_sym(const DiagonalMetric& m, int i, int j) {
    if (i > j) std::swap(i, j);
    return Expr::symbol("u_" + m.coords[i] + m.coords[j]);
}

// Per-axis damping coefficient of the wave operator:
// Delta u = g^{ii} u_,ii + d_i u_,i with d_i = (1/sqrt g) d_i(sqrt g g^{ii}).
Expr damping(const DiagonalMetric& m, int i) {
    return simplify(differentiate(m.sqrt_det * m.ginv(i), m.coords[i]) / m.sqrt_det);
}

Box jet_box(const DiagonalMetric& m, bool with_second) {
    Box b = m.domain;
    b.set("u", -1.0, 1.0);
    for (int i = 0; i < 4; ++i) b.set("u_" + m.coords[i], -1.0, 1.0);
    if (with_second) {
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j)
                b.set("u_" + m.coords[i] + m.coords[j], -1.0, 1.0);
    }
    return b;
}

}  // namespace

std::string jet_u() { return "u"; }

std::string jet_du(const DiagonalMetric& m, int i) { return "u_" + m.coords[i]; }

std::string jet_ddu(const DiagonalMetric& m, int i, int j) {
    if (i > j) std::swap(i, j);
    return "u_" + m.coords[i] + m.coords[j];
}

Assignment JetPoint::assignment(const DiagonalMetric& m) const {
    Assignment a;
    for (int i = 0; i < 4; ++i) a[m.coords[i]] = x[i];
    a[jet_u()] = u;
    for (int i = 0; i < 4; ++i) a[jet_du(m, i)] = du[i];
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) a[jet_ddu(m, i, j)] = ddu[i][j];
    return a;
}

Expr SymmetryGenerator::eta_u_coeff() const {
    return simplify(-psi + Expr::rational(a0));
}

Expr SymmetryGenerator::eta() const { return simplify(eta_u_coeff() * u_sym() + b); }

SymmetryGenerator generic_symmetry(VectorField xi, Expr psi, Rational a0, Expr b) {
    SymmetryGenerator g;
    g.xi = std::move(xi);
    g.psi = simplify(std::move(psi));
    g.a0 = a0;
    g.b = simplify(std::move(b));
    return g;
}

Prolongation2 prolong2(const DiagonalMetric& m, const SymmetryGenerator& g) {
    Prolongation2 out;
    const Expr eta = g.eta();
    out.eta = eta;

    // Precompute derivatives. xi is u-independent; its u-derivatives are kept
    // in the formulas and vanish identically.
    std::array<Expr, 4> eta_x;       // eta_{,i}
    Expr eta_u = differentiate(eta, "u");
    std::array<Expr, 4> eta_xu;      // eta_{,iu}
    Expr eta_uu = differentiate(eta_u, "u");
    std::array<std::array<Expr, 4>, 4> xi_x;   // xi^k_{,i} indexed [k][i]
    std::array<Expr, 4> xi_u;                  // xi^k_{,u}
    for (int i = 0; i < 4; ++i) {
        eta_x[i] = differentiate(eta, m.coords[i]);
        eta_xu[i] = differentiate(eta_x[i], "u");
        xi_u[i] = differentiate(g.xi.comp[i], "u");
        for (int k = 0; k < 4; ++k) xi_x[k][i] = differentiate(g.xi.comp[k], m.coords[i]);
    }

    for (int i = 0; i < 4; ++i) {
        Expr ei = eta_x[i] + du_sym(m, i) * eta_u;
        for (int j = 0; j < 4; ++j) {
            ei = ei - xi_x[j][i] * du_sym(m, j);
            ei = ei - du_sym(m, i) * du_sym(m, j) * xi_u[j];
        }
        out.eta_i[i] = simplify(ei);
    }

    for (int i = 0; i < 4; ++i) {
        for (int j = i; j < 4; ++j) {
            Expr e = differentiate(eta_x[i], m.coords[j]);
            e = e + eta_xu[i] * du_sym(m, j) + eta_xu[j] * du_sym(m, i);
            e = e + eta_uu * du_sym(m, i) * du_sym(m, j);
            e = e + eta_u * ddu_sym(m, i, j);
            for (int k = 0; k < 4; ++k) {
                Expr dk = du_sym(m, k);
                e = e - differentiate(xi_x[k][i], m.coords[j]) * dk;
                e = e - (differentiate(xi_u[k], m.coords[i]) * du_sym(m, j) +
                         differentiate(xi_u[k], m.coords[j]) * du_sym(m, i)) *
                            dk;
                e = e - differentiate(xi_u[k], "u") * du_sym(m, i) * du_sym(m, j) * dk;
                e = e - xi_x[k][j] * ddu_sym(m, i, k) - xi_x[k][i] * ddu_sym(m, j, k);
                e = e - xi_u[k] * (dk * ddu_sym(m, i, j) + du_sym(m, j) * ddu_sym(m, i, k) +
                                   du_sym(m, i) * ddu_sym(m, j, k));
            }
            Expr v = simplify(e);
            out.eta_ij[i][j] = v;
            out.eta_ij[j][i] = v;
        }
    }
    return out;
}

Expr kg_operator(const DiagonalMetric& m, const Expr& V) {
    Expr H = V * u_sym();
    for (int i = 0; i < 4; ++i) {
        H = H + m.ginv(i) * ddu_sym(m, i, i);
        H = H + damping(m, i) * du_sym(m, i);
    }
    return simplify(H);
}

Expr kg_utt_solved(const DiagonalMetric& m, const Expr& V) {
    Expr H = kg_operator(m, V);
    Expr rest = substitute(H, jet_ddu(m, 0, 0), num(0));
    return simplify(-rest / m.ginv(0));
}

Expr prolonged_action_on_kg(const DiagonalMetric& m, const Expr& V,
                            const SymmetryGenerator& g) {
    Expr H = kg_operator(m, V);
    Prolongation2 pr = prolong2(m, g);
    Expr X = Expr::integer(0);
    for (int k = 0; k < 4; ++k) X = X + g.xi.comp[k] * differentiate(H, m.coords[k]);
    X = X + pr.eta * differentiate(H, "u");
    for (int i = 0; i < 4; ++i) X = X + pr.eta_i[i] * differentiate(H, jet_du(m, i));
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            X = X + pr.eta_ij[i][j] * differentiate(H, jet_ddu(m, i, j));
    return simplify(X);
}

LieConditionReport lie_condition_residual(const DiagonalMetric& m, const Expr& V,
                                          const SymmetryGenerator& g, int samples,
                                          double tol, std::uint64_t seed) {
    LieConditionReport rep;
    Expr X2H = prolonged_action_on_kg(m, V, g);
    Expr utt = kg_utt_solved(m, V);
    Expr onshell = substitute(X2H, jet_ddu(m, 0, 0), utt);
    Box box = jet_box(m, true);
    box.ranges.erase(jet_ddu(m, 0, 0));
    rep.max_residual = max_abs_on_box(onshell, box, samples, sub_seed(seed, "lie-onshell"));
    rep.pass = rep.max_residual < tol;

    // Off-shell lambda diagnostics: X(H)/H at nondegenerate samples.
    Expr H = kg_operator(m, V);
    Box full = jet_box(m, true);
    SeededRng rng(sub_seed(seed, "lie-lambda"));
    int tries = 0;
    while (rep.lambda_estimates.size() < 5 && tries < 200) {
        ++tries;
        Assignment a;
        for (const auto& kv : full.ranges)
            a[kv.first] = rng.uniform(kv.second.first, kv.second.second);
        try {
            double h = eval_at(H, a);
            if (std::abs(h) < 1e-3) continue;
            rep.lambda_estimates.push_back(eval_at(X2H, a) / h);
        } catch (const EvalError&) {
            continue;
        }
    }
    return rep;
}

Expr constraint_residual(const DiagonalMetric& m, const VectorField& xi, const Expr& psi,
                         const Expr& V, bool two_dimensional) {
    Expr r = Expr::integer(2) * psi * V;
    for (int k = 0; k < 4; ++k) r = r + xi.comp[k] * differentiate(V, m.coords[k]);
    if (!two_dimensional) r = r - laplacian(m, psi);
    return simplify(r);
}

Expr constraint_residual_alt_sign(const DiagonalMetric& m, const VectorField& xi,
                                  const Expr& psi, const Expr& V) {
    Expr r = Expr::integer(2) * psi * V;
    for (int k = 0; k < 4; ++k) r = r + xi.comp[k] * differentiate(V, m.coords[k]);
    return simplify(r + laplacian(m, psi));
}

Expr lagrangian_density(const DiagonalMetric& m, const Expr& V) {
    Expr kinetic = Expr::integer(0);
    for (int i = 0; i < 4; ++i) kinetic = kinetic + m.ginv(i) * pow(du_sym(m, i), 2);
    return simplify(Expr::rational(1, 2) * m.sqrt_det * kinetic -
                    Expr::rational(1, 2) * m.sqrt_det * V * pow(u_sym(), 2));
}

NoetherGauge noether_gauge(const DiagonalMetric& m, const Expr& psi) {
    NoetherGauge gauge;
    for (int i = 0; i < 4; ++i) {
        gauge.A[i] = simplify(Expr::rational(-1, 2) * m.sqrt_det * m.ginv(i) *
                              differentiate(psi, m.coords[i]) * pow(u_sym(), 2));
    }
    return gauge;
}

double noether_condition_residual(const DiagonalMetric& m, const Expr& V,
                                  const SymmetryGenerator& g, const NoetherGauge& gauge,
                                  int samples, std::uint64_t seed) {
    Expr L = lagrangian_density(m, V);
    Prolongation2 pr = prolong2(m, g);
    Expr r = Expr::integer(0);
    for (int k = 0; k < 4; ++k) r = r + g.xi.comp[k] * differentiate(L, m.coords[k]);
    r = r + pr.eta * differentiate(L, "u");
    for (int i = 0; i < 4; ++i) r = r + pr.eta_i[i] * differentiate(L, jet_du(m, i));
    Expr div_xi = Expr::integer(0);
    for (int k = 0; k < 4; ++k) div_xi = div_xi + differentiate(g.xi.comp[k], m.coords[k]);
    r = r + L * div_xi;
    for (int i = 0; i < 4; ++i) {
        r = r - differentiate(gauge.A[i], m.coords[i]);
        r = r - du_sym(m, i) * differentiate(gauge.A[i], "u");
    }
    r = simplify(r);
    return max_abs_on_box(r, jet_box(m, false), samples, sub_seed(seed, "noether"));
}

std::array<Expr, 4> noether_current(const DiagonalMetric& m, const Expr& V,
                                    const SymmetryGenerator& g, const NoetherGauge& gauge) {
    Expr L = lagrangian_density(m, V);
    Expr eta = g.eta();
    std::array<Expr, 4> I;
    for (int i = 0; i < 4; ++i) {
        Expr dLdui = differentiate(L, jet_du(m, i));
        Expr v = Expr::integer(0);
        for (int k = 0; k < 4; ++k) v = v + g.xi.comp[k] * du_sym(m, k) * dLdui;
        v = v - g.xi.comp[i] * L;
        v = v - eta * dLdui;
        v = v + gauge.A[i];
        I[i] = simplify(v);
    }
    return I;
}

double current_divergence_on_solution(const DiagonalMetric& m,
                                      const std::array<Expr, 4>& current,
                                      const FieldOnGrid& field,
                                      const std::vector<std::array<double, 4>>& grid,
                                      double h) {
    auto eval_current = [&](int i, const std::array<double, 4>& p) {
        Assignment a;
        for (int k = 0; k < 4; ++k) a[m.coords[k]] = p[k];
        a[jet_u()] = field.u(p);
        auto grad = field.grad(p);
        for (int k = 0; k < 4; ++k) a[jet_du(m, k)] = grad[k];
        return eval_at(current[i], a);
    };
    double worst = 0.0;
    for (const auto& p : grid) {
        double div = 0.0;
        for (int i = 0; i < 4; ++i) {
            std::array<double, 4> up = p, dn = p;
            up[i] += h;
            dn[i] -= h;
            div += (eval_current(i, up) - eval_current(i, dn)) / (2 * h);
        }
        worst = std::max(worst, std::abs(div));
    }
    return worst;
}

bool wave_mode_check(const DiagonalMetric& m, const Expr& psi, const ZeroTestOptions& opt) {
    Expr lap = laplacian(m, psi);
    if (lap.is_zero()) return true;
    return is_zero_probabilistic(lap, m.domain, opt.samples, opt.tol,
                                 sub_seed(opt.seed, "wave-mode"));
}

}  // namespace kgsym
