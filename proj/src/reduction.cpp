#include "kgsym/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "kgsym/rng.hpp"

namespace kgsym {

namespace {

Expr num(long long n) { return Expr::integer(n); }
Expr real(double v) { return Expr::real(v); }

const Expr T = Expr::symbol("t");
const Expr X = Expr::symbol("x");
const Expr Y = Expr::symbol("y");
const Expr Z = Expr::symbol("z");
const Expr S = Expr::symbol("s");

BianchiFamily a1_family(const ReductionCase& c) {
    FamilySpec spec;
    spec.kind = FamilyKind::GeneralDiagonal;
    spec.A = c.A;
    spec.B = c.B;
    spec.C = c.C;
    return build_family(spec);
}

BianchiFamily a2_family(const ReductionCase& c) {
    FamilySpec spec;
    spec.kind = FamilyKind::ProperCkv;
    spec.alpha = c.alpha;
    spec.beta = c.beta;
    spec.gamma = c.beta;
    spec.U = Expr::integer(1) / T;
    spec.intU = ln(T);
    spec.t_range = {0.6, 1.6};
    return build_family(spec);
}

BianchiFamily trig_family() {
    FamilySpec spec;
    spec.kind = FamilyKind::ConformallyFlatTrig;
    spec.t_range = {0.4, 1.1};
    return build_family(spec);
}

std::pair<ReducedOde, InvariantSolution> reduce_a1(const ReductionCase& c) {
    BianchiFamily fam = a1_family(c);
    ReducedOde ode;
    ode.var_name = "t";
    ode.c2 = num(1);
    Expr damping = Expr::integer(0);
    for (const Expr& f : {fam.A, fam.B, fam.C})
        damping = damping + differentiate(f, "t") / f;
    ode.c1 = substitute(damping, "t", S);
    // The mu^2 terms carry the inverse metric factors of their axes; each
    // reduction step contributes its own term, in the requested order.
    const double mus[4] = {0, c.mu1, c.mu2, c.mu3};
    const Expr scales[4] = {num(0), fam.A, fam.B, fam.C};
    Expr mass = substitute(c.V_t, "t", S);
    for (int axis : c.a1_order) {
        Expr contrib = real(mus[axis] * mus[axis]) * pow(scales[axis], -2);
        mass = mass + substitute(contrib, "t", S);
    }
    ode.c0 = simplify(-mass);

    InvariantSolution inv;
    inv.phi = simplify(exp(real(c.mu1) * X + real(c.mu2) * Y + real(c.mu3) * Z));
    inv.zeta = T;
    inv.metric = fam.metric;
    inv.potential = simplify(c.V_t);
    return {ode, inv};
}

std::pair<ReducedOde, InvariantSolution> reduce_a2(const ReductionCase& c) {
    if (c.mu1 != 0.0 && !c.alpha.is_zero())
        throw ReductionGateError(
            "the scaling symmetry is not inherited unless mu1 = 0 or alpha = 0 "
            "(its commutator with the x-translation is alpha Y1)");
    BianchiFamily fam = a2_family(c);
    const double beta = c.beta.to_double();
    const double alpha = c.alpha.to_double();

    ReducedOde ode;
    ode.var_name = "zeta";
    Expr b = real(beta);
    ode.c2 = simplify(num(1) - pow(b * S, 2));
    ode.c1 = simplify(b * S * real(2 * c.mu5 + 2 - 3 * beta - alpha) + pow(S, -1));
    // Effective potential: V'(zeta^2) plus the angular correction as printed
    // (mu4, exact for mu4 in {0,1}), plus mu1^2 on the alpha = 0 branch, plus
    // the scaling-exponent mass term.
    Expr K = substitute(c.V_free, "s", pow(S, 2));
    K = K + real(c.mu4) * pow(S, -2);
    if (c.alpha.is_zero() && c.mu1 != 0.0) K = K + real(c.mu1 * c.mu1);
    K = K + real(c.mu5 * (alpha + 2 * beta - 2 - c.mu5));
    ode.c0 = simplify(K);
    if (beta != 0.0) ode.singular_points = {0.0, 1.0 / std::abs(beta)};

    InvariantSolution inv;
    Expr r2 = pow(Y, 2) + pow(Z, 2);
    inv.zeta = simplify(pow(r2, Expr::rational(1, 2)) * pow(T, real(-beta)));
    inv.phi = simplify(pow(T, real(c.mu5)) * exp(real(c.mu4) * arctan(Z / Y)) *
                       exp(real(c.mu1) * X));
    inv.metric = fam.metric;
    inv.potential =
        simplify(pow(T, -2) * substitute(c.V_free, "s", r2 * pow(T, real(-2 * beta))));
    return {ode, inv};
}

std::pair<ReducedOde, InvariantSolution> reduce_b(const ReductionCase& c) {
    BianchiFamily fam = trig_family();
    ReducedOde ode;
    InvariantSolution inv;
    inv.metric = fam.metric;
    Expr zeta;
    double muA = 0, muB = 0;  // coefficients of the exponential pair
    int sign = +1;            // sign of the sigma' coefficient
    switch (c.id) {
        case ReductionCaseId::BPlusX:
            zeta = X + ln(sin(T));
            muA = c.mu4;
            muB = c.mu5;
            sign = +1;
            // The second exponential is the reciprocal of Ybar5's prefactor,
            // e^{-x+y}; substitution fails with e^{x-y} there.
            inv.phi = exp(real(c.mu3) * Z -
                          cot(T) / num(2) *
                              (real(c.mu4) * exp(-X - Y) + real(c.mu5) * exp(-X + Y)));
            break;
        case ReductionCaseId::BMinusX:
            zeta = X - ln(sin(T));
            muA = c.mu6;
            muB = c.mu7;
            sign = -1;
            inv.phi = exp(real(c.mu3) * Z -
                          cot(T) / num(2) *
                              (real(c.mu6) * exp(X - Y) + real(c.mu7) * exp(X + Y)));
            break;
        case ReductionCaseId::BPlusY:
            zeta = Y + ln(cos(T));
            muA = c.mu4;
            muB = c.mu6;
            sign = +1;
            inv.phi = exp(real(c.mu3) * Z +
                          tan(T) / num(2) *
                              (real(c.mu4) * exp(-X - Y) + real(c.mu6) * exp(X - Y)));
            break;
        case ReductionCaseId::BMinusY:
            zeta = Y - ln(cos(T));
            muA = c.mu5;
            muB = c.mu7;
            sign = -1;
            inv.phi = exp(real(c.mu3) * Z +
                          tan(T) / num(2) *
                              (real(c.mu5) * exp(-X + Y) + real(c.mu7) * exp(X + Y)));
            break;
        default:
            throw std::logic_error("not a B case");
    }
    inv.zeta = simplify(zeta);
    inv.phi = simplify(inv.phi);
    inv.potential = simplify(substitute(c.V_free, "s", zeta));

    ode.var_name = sign > 0 ? "zeta" : "xi";
    ode.c2 = num(1);
    ode.c1 = num(2 * sign);
    Expr cross = real(muA * muB) * exp(num(-2 * sign) * S);
    ode.c0 = simplify(substitute(c.V_free, "s", S) + real(c.mu3 * c.mu3) - cross);
    return {ode, inv};
}

}  // namespace

const char* reduction_case_name(ReductionCaseId id) {
    switch (id) {
        case ReductionCaseId::A1: return "a1";
        case ReductionCaseId::A2: return "a2";
        case ReductionCaseId::BPlusX: return "b-plus-x";
        case ReductionCaseId::BMinusX: return "b-minus-x";
        case ReductionCaseId::BPlusY: return "b-plus-y";
        case ReductionCaseId::BMinusY: return "b-minus-y";
    }
    return "?";
}

std::pair<ReducedOde, InvariantSolution> reduce_case(const ReductionCase& c) {
    switch (c.id) {
        case ReductionCaseId::A1: return reduce_a1(c);
        case ReductionCaseId::A2: return reduce_a2(c);
        default: return reduce_b(c);
    }
}

SigmaFunction sigma_from_expr(const Expr& sigma_in_s, double lo, double hi) {
    SigmaFunction f;
    Expr v = simplify(sigma_in_s);
    Expr d = differentiate(v, "s");
    f.value = [v](double s) { return eval_at(v, {{"s", s}}); };
    f.deriv = [d](double s) { return eval_at(d, {{"s", s}}); };
    f.lo = lo;
    f.hi = hi;
    return f;
}

SigmaFunction sigma_from_ode(const ReducedOde& ode, double z0, double z1, double v0,
                             double d0, double step) {
    for (double sp : ode.singular_points) {
        if (sp > std::min(z0, z1) - 1e-12 && sp < std::max(z0, z1) + 1e-12)
            throw SingularIntervalError("reduced ODE is singular at " + std::to_string(sp) +
                                        " inside the integration interval");
    }
    Expr c2 = ode.c2, c1 = ode.c1, c0 = ode.c0;
    OdeProblem p;
    p.rhs = [c2, c1, c0](double s, const std::vector<double>& st) {
        Assignment a{{"s", s}};
        double k2 = eval_at(c2, a);
        double k1 = eval_at(c1, a);
        double k0 = eval_at(c0, a);
        return std::vector<double>{st[1], -(k1 * st[1] + k0 * st[0]) / k2};
    };
    p.initial_state = {v0, d0};
    p.t0 = z0;
    p.t1 = z1;
    p.step = step;
    auto sol = std::make_shared<OdeSolution>(rk4(p));
    SigmaFunction f;
    f.value = [sol](double s) { return sol->value(s); };
    f.deriv = [sol](double s) { return sol->deriv(s); };
    f.lo = z0;
    f.hi = z1;
    return f;
}

Expr closed_form_sigma(double mu3, double s1, double s2) {
    double disc = 1.0 - mu3 * mu3;
    if (disc == 0.0)
        throw DegenerateRootError("mu3 = +-1 gives a repeated root; use the degenerate form");
    if (disc > 0) {
        double rp = -1 + std::sqrt(disc), rm = -1 - std::sqrt(disc);
        return simplify(real(s1) * exp(real(rp) * S) + real(s2) * exp(real(rm) * S));
    }
    double w = std::sqrt(-disc);
    return simplify(exp(-S) * (real(s1) * cos(real(w) * S) + real(s2) * sin(real(w) * S)));
}

Expr closed_form_sigma_degenerate(double s1, double s2) {
    return simplify((real(s1) + real(s2) * S) * exp(-S));
}

Expr closed_form_sigma_minus(double s0, double s1) {
    return simplify(real(s0) + real(s1) * exp(num(2) * S));
}

LiftedSolution::LiftedSolution(InvariantSolution inv, SigmaFunction sigma)
    : inv_(std::move(inv)), sigma_(std::move(sigma)) {
    for (int i = 0; i < 4; ++i) {
        dphi_[i] = differentiate(inv_.phi, inv_.metric.coords[i]);
        dzeta_[i] = differentiate(inv_.zeta, inv_.metric.coords[i]);
    }
}

double LiftedSolution::value(const std::array<double, 4>& p) const {
    Assignment a;
    for (int i = 0; i < 4; ++i) a[inv_.metric.coords[i]] = p[i];
    return eval_at(inv_.phi, a) * sigma_.value(eval_at(inv_.zeta, a));
}

std::array<double, 4> LiftedSolution::gradient(const std::array<double, 4>& p) const {
    Assignment a;
    for (int i = 0; i < 4; ++i) a[inv_.metric.coords[i]] = p[i];
    double z = eval_at(inv_.zeta, a);
    double sv = sigma_.value(z), sd = sigma_.deriv(z);
    double phi = eval_at(inv_.phi, a);
    std::array<double, 4> g;
    for (int i = 0; i < 4; ++i)
        g[i] = eval_at(dphi_[i], a) * sv + phi * sd * eval_at(dzeta_[i], a);
    return g;
}

PointFn LiftedSolution::as_point_fn() const {
    return [this](const std::array<double, 4>& p) { return value(p); };
}

double verify_invariant_solution(const DiagonalMetric& m, const Expr& V, const PointFn& u,
                                 const std::vector<std::array<double, 4>>& grid,
                                 double h) {
    double worst = 0;
    for (const auto& p : grid) {
        double res = fd_residual(m, V, u, p, h);
        double mag = std::max(std::abs(u(p)), 1.0);
        worst = std::max(worst, std::abs(res) / mag);
    }
    return worst;
}

std::vector<std::array<double, 4>> grid_points(const Grid& g) {
    std::vector<std::array<double, 4>> pts;
    g.for_each([&](const std::array<double, 4>& p) { pts.push_back(p); });
    return pts;
}

double reduction_coefficient_check(const ReductionCase& c, const ReducedOde& ode,
                                   const InvariantSolution& inv, int samples,
                                   std::uint64_t seed) {
    (void)c;
    const DiagonalMetric& m = inv.metric;
    // KG applied to phi * f(zeta) for the probe profiles f = 1, s, s^2.
    Expr u1 = inv.phi;
    Expr us = simplify(inv.phi * inv.zeta);
    Expr uss = simplify(inv.phi * pow(inv.zeta, 2));
    Expr k1 = simplify(laplacian(m, u1) + inv.potential * u1);
    Expr ks = simplify(laplacian(m, us) + inv.potential * us);
    Expr kss = simplify(laplacian(m, uss) + inv.potential * uss);

    SeededRng rng(sub_seed(seed, "reduction-stage"));
    double worst = 0;
    int accepted = 0, tries = 0;
    while (accepted < samples && tries < 60 * samples) {
        ++tries;
        Assignment a;
        for (const auto& kv : m.domain.ranges)
            a[kv.first] = rng.uniform(kv.second.first, kv.second.second);
        try {
            double z = eval_at(inv.zeta, a);
            Assignment az{{"s", z}};
            double c2 = eval_at(ode.c2, az);
            double c1v = eval_at(ode.c1, az);
            double c0v = eval_at(ode.c0, az);
            double v1 = eval_at(k1, a);
            double vs = eval_at(ks, a);
            double vss = eval_at(kss, a);
            double e0 = v1;
            double e1 = vs - z * e0;
            double e2 = (vss - 2 * z * e1 - z * z * e0) / 2;
            double scale = std::max({std::abs(e0) + std::abs(e1) + std::abs(e2),
                                     std::abs(c0v) + std::abs(c1v) + std::abs(c2), 1.0});
            double r1 = std::abs(e2 * c1v - e1 * c2) / (scale * scale);
            double r2 = std::abs(e2 * c0v - e0 * c2) / (scale * scale);
            worst = std::max({worst, r1, r2});
            ++accepted;
        } catch (const EvalError&) {
            continue;
        }
    }
    if (accepted < samples)
        throw std::runtime_error("reduction stage check could not sample the domain");
    return worst;
}

std::vector<Expr> zero_order_invariants(const std::string& label, double mu,
                                        const BianchiFamily& fam) {
    const Expr U = Expr::symbol("u");
    const Expr M = real(mu);
    if (label == "Y1") return {T, Y, Z, simplify(exp(-M * X) * U)};
    if (label == "Y2") return {T, X, Z, simplify(exp(-M * Y) * U)};
    if (label == "Y3") return {T, X, Y, simplify(exp(-M * Z) * U)};
    // The rotation angle with Y4(theta) = +1 is arctan(y/z); the z/y variant
    // flips the sign of the flow parameter.
    if (label == "Y4")
        return {T, X, simplify(pow(Y, 2) + pow(Z, 2)),
                simplify(exp(-M * arctan(Y / Z)) * U)};
    if (label == "X5") {
        if (fam.kind != FamilyKind::ProperCkv)
            throw UnsupportedGenerator("X5 invariants need the proper-ckv family");
        Expr a = Expr::rational(fam.alpha), b = Expr::rational(fam.beta),
             g = Expr::rational(fam.gamma);
        return {simplify(X * pow(T, -a)), simplify(Y * pow(T, -b)),
                simplify(Z * pow(T, -g)), simplify(U * pow(T, -M))};
    }
    if (label.rfind("Ybar", 0) == 0 && label.size() == 5) {
        if (fam.kind != FamilyKind::ConformallyFlatTrig)
            throw UnsupportedGenerator("Ybar invariants need the conformally flat metric");
        int e1 = 0, e2 = 0;
        switch (label[4]) {
            case '4': e1 = +1; e2 = +1; break;
            case '5': e1 = +1; e2 = -1; break;
            case '6': e1 = -1; e2 = +1; break;
            case '7': e1 = -1; e2 = -1; break;
            default: throw UnsupportedGenerator("unknown generator " + label);
        }
        Expr i1 = simplify(X + num(e1) * ln(sin(T)));
        Expr i2 = simplify(Y + num(e2) * ln(cos(T)));
        Expr uinv = simplify(
            U * exp(M / num(2) * exp(num(-e1) * X - num(e2) * Y) * cot(T)));
        return {i1, i2, Z, uinv};
    }
    throw UnsupportedGenerator("zero-order invariants unsupported for generator " + label);
}

}  // namespace kgsym
