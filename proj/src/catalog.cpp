#include "kgsym/catalog.hpp"

#include <algorithm>
#include <cmath>

#include "kgsym/numerics.hpp"
#include "kgsym/rng.hpp"

namespace kgsym {

namespace {

Expr sym(const char* s) { return Expr::symbol(s); }
Expr num(long long n) { return Expr::integer(n); }
Expr rat(const Rational& r) { return Expr::rational(r); }

const Expr T = sym("t");
const Expr X = sym("x");
const Expr Y = sym("y");
const Expr Z = sym("z");

Box default_box(double tlo, double thi) {
    Box b;
    b.set("t", tlo, thi);
    b.set("x", 0.3, 1.2);
    b.set("y", 0.3, 1.2);
    b.set("z", 0.4, 1.2);
    return b;
}

VectorField vf(Expr t, Expr x, Expr y, Expr z) {
    VectorField v;
    v.comp = {std::move(t), std::move(x), std::move(y), std::move(z)};
    return v;
}

}  // namespace

const char* family_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::GeneralDiagonal: return "general";
        case FamilyKind::ClassALrs: return "lrs";
        case FamilyKind::ProperCkv: return "proper-ckv";
        case FamilyKind::ConformallyFlatTrig: return "conformally-flat-trig";
        case FamilyKind::ConformallyFlatHyp: return "conformally-flat-hyp";
    }
    return "?";
}

BianchiFamily build_family(const FamilySpec& spec) {
    BianchiFamily fam;
    fam.kind = spec.kind;
    auto& m = fam.metric;
    switch (spec.kind) {
        case FamilyKind::GeneralDiagonal:
        case FamilyKind::ClassALrs: {
            if (!spec.A || !spec.B || (spec.kind == FamilyKind::GeneralDiagonal && !spec.C))
                throw FamilyError("scale factors A, B (and C) are required");
            fam.A = simplify(*spec.A);
            fam.B = simplify(*spec.B);
            fam.C = spec.kind == FamilyKind::ClassALrs ? fam.B : simplify(*spec.C);
            break;
        }
        case FamilyKind::ProperCkv: {
            if (!spec.U) throw FamilyError("proper-ckv family requires U(t)");
            if (!spec.intU)
                throw FamilyError("proper-ckv family requires a closed-form primitive of U");
            if (spec.alpha.is_zero() && spec.beta.is_zero() && spec.gamma.is_zero())
                throw FamilyError("alpha = beta = gamma = 0 is a degenerate combination");
            {
                Box tb;
                auto tr = spec.t_range.value_or(std::make_pair(0.5, 2.5));
                tb.set("t", tr.first, tr.second);
                Expr mismatch = simplify(differentiate(simplify(*spec.intU), "t") -
                                         simplify(*spec.U));
                if (!is_zero_probabilistic(mismatch, tb, 20, 1e-9, 913))
                    throw FamilyError("intU does not differentiate to U on the t-range");
            }
            fam.alpha = spec.alpha;
            fam.beta = spec.beta;
            fam.gamma = spec.gamma;
            fam.U = simplify(*spec.U);
            fam.intU = simplify(*spec.intU);
            fam.Abar = simplify(exp(-rat(fam.alpha) * fam.intU));
            fam.Bbar = simplify(exp(-rat(fam.beta) * fam.intU));
            fam.Cbar = simplify(exp(-rat(fam.gamma) * fam.intU));
            fam.A = simplify(fam.Abar / fam.U);
            fam.B = simplify(fam.Bbar / fam.U);
            fam.C = simplify(fam.Cbar / fam.U);
            fam.psi5 = simplify(-differentiate(fam.U, "t") / pow(fam.U, 2));
            break;
        }
        case FamilyKind::ConformallyFlatTrig:
            fam.A = sin(T);
            fam.B = cos(T);
            fam.C = num(1);
            break;
        case FamilyKind::ConformallyFlatHyp:
            fam.A = sinh(T);
            fam.B = cosh(T);
            fam.C = num(1);
            break;
    }
    m.components = {num(1), simplify(pow(fam.A, 2)), simplify(pow(fam.B, 2)),
                    simplify(pow(fam.C, 2))};
    m.sqrt_det = simplify(fam.A * fam.B * fam.C);
    double tlo = 0.5, thi = 2.5;
    if (spec.kind == FamilyKind::ConformallyFlatTrig ||
        spec.kind == FamilyKind::ConformallyFlatHyp) {
        tlo = 0.2;
        thi = 1.3;
    }
    if (spec.t_range) {
        tlo = spec.t_range->first;
        thi = spec.t_range->second;
    }
    m.domain = default_box(tlo, thi);
    return fam;
}

PointGenerator bracket(const PointGenerator& a, const PointGenerator& b) {
    static const std::array<std::string, 4> coords{"t", "x", "y", "z"};
    PointGenerator out;
    out.xi = lie_bracket(a.xi, b.xi);
    Expr u = Expr::integer(0);
    for (int j = 0; j < 4; ++j) {
        u = u + a.xi.comp[j] * differentiate(b.u_coeff, coords[j]);
        u = u - b.xi.comp[j] * differentiate(a.u_coeff, coords[j]);
    }
    out.u_coeff = u;
    return out;
}

std::vector<CatalogVector> catalog_vectors(const BianchiFamily& fam) {
    std::vector<CatalogVector> out;
    auto kv = [&](const std::string& label, VectorField v) {
        out.push_back({label, std::move(v), Expr::integer(0), CollineationTag::KV});
    };
    kv("Y1", vf(num(0), num(1), num(0), num(0)));
    kv("Y2", vf(num(0), num(0), num(1), num(0)));
    kv("Y3", vf(num(0), num(0), num(0), num(1)));

    switch (fam.kind) {
        case FamilyKind::GeneralDiagonal:
        case FamilyKind::ConformallyFlatHyp:
            break;
        case FamilyKind::ClassALrs:
            kv("Y4", vf(num(0), num(0), Z, -Y));
            break;
        case FamilyKind::ProperCkv: {
            if (fam.beta == fam.gamma) kv("Y4", vf(num(0), num(0), Z, -Y));
            CollineationTag tag = CollineationTag::CKV;
            if (differentiate(fam.psi5, "t").is_zero())
                tag = fam.psi5.is_zero() ? CollineationTag::KV : CollineationTag::HV;
            out.push_back({"Y5",
                           vf(simplify(num(1) / fam.U), rat(fam.alpha) * X,
                              rat(fam.beta) * Y, rat(fam.gamma) * Z),
                           fam.psi5, tag});
            break;
        }
        case FamilyKind::ConformallyFlatTrig: {
            // Exponential Killing vectors.
            kv("Ybar4", vf(exp(X + Y), -exp(X + Y) * cot(T), exp(X + Y) * tan(T), num(0)));
            kv("Ybar5", vf(exp(X - Y), -exp(X - Y) * cot(T), -exp(X - Y) * tan(T), num(0)));
            kv("Ybar6", vf(exp(-X + Y), exp(-X + Y) * cot(T), exp(-X + Y) * tan(T), num(0)));
            kv("Ybar7", vf(exp(-X - Y), exp(-X - Y) * cot(T), -exp(-X - Y) * tan(T), num(0)));
            // Proper conformal Killing vectors with their conformal factors.
            auto ckv = [&](const std::string& label, VectorField v, Expr psi) {
                out.push_back({label, std::move(v), simplify(psi), CollineationTag::CKV});
            };
            for (int s : {+1, -1}) {
                Expr ex = exp(num(s) * X);
                std::string sx = s > 0 ? "+x" : "-x";
                ckv("C1" + sx,
                    vf(ex * cos(T) * cos(Z), -num(s) * ex * cos(Z) / sin(T), num(0),
                       -ex * sin(T) * sin(Z)),
                    -ex * sin(T) * cos(Z));
                ckv("C2" + sx,
                    vf(ex * cos(T) * sin(Z), -num(s) * ex * sin(Z) / sin(T), num(0),
                       ex * sin(T) * cos(Z)),
                    -ex * sin(T) * sin(Z));
            }
            for (int s : {+1, -1}) {
                Expr ey = exp(num(s) * Y);
                std::string sy = s > 0 ? "+y" : "-y";
                ckv("C1" + sy,
                    vf(ey * sin(T) * sin(Z), num(0), num(s) * ey * sin(Z) / cos(T),
                       -ey * cos(T) * cos(Z)),
                    ey * cos(T) * sin(Z));
                ckv("C2" + sy,
                    vf(ey * sin(T) * cos(Z), num(0), num(s) * ey * cos(Z) / cos(T),
                       ey * cos(T) * sin(Z)),
                    ey * cos(T) * cos(Z));
            }
            break;
        }
    }
    return out;
}

const CatalogVector& find_vector(const std::vector<CatalogVector>& vs,
                                 const std::string& label) {
    for (const auto& v : vs)
        if (v.label == label) return v;
    throw std::out_of_range("no catalog vector labelled '" + label + "'");
}

// ---------------------------------------------------------------------------
// Commutator tables
// ---------------------------------------------------------------------------

namespace {

std::vector<std::pair<std::string, PointGenerator>> symmetry_basis(const BianchiFamily& fam) {
    auto vectors = catalog_vectors(fam);
    std::vector<std::pair<std::string, PointGenerator>> basis;
    for (const auto& v : vectors) {
        PointGenerator g;
        g.xi = v.xi;
        if (v.declared_tag == CollineationTag::CKV || v.declared_tag == CollineationTag::HV) {
            // Symmetry combination pairs a conformal vector with -psi u d_u.
            g.u_coeff = simplify(-v.declared_psi);
            basis.push_back({"X" + v.label.substr(1), std::move(g)});
        } else {
            basis.push_back({v.label, std::move(g)});
        }
    }
    // The trigonometric family's commutator table covers the Killing part.
    if (fam.kind == FamilyKind::ConformallyFlatTrig) {
        basis.erase(std::remove_if(basis.begin(), basis.end(),
                                   [](const auto& p) { return p.first[0] == 'X'; }),
                    basis.end());
    }
    return basis;
}

Rational snap_rational(double v, bool* ok) {
    *ok = false;
    for (long long den = 1; den <= 24; ++den) {
        double scaled = v * static_cast<double>(den);
        double r = std::round(scaled);
        if (std::abs(scaled - r) < 1e-6 && std::abs(r) < 1e15) {
            *ok = true;
            return Rational(static_cast<long long>(r), den);
        }
    }
    return Rational(0);
}

}  // namespace

CommutatorTable commutator_table(const BianchiFamily& fam, const ZeroTestOptions& opt) {
    CommutatorTable table;
    auto basis = symmetry_basis(fam);
    for (const auto& b : basis) table.labels.push_back(b.first);
    const int npts = 10;
    SeededRng rng(sub_seed(opt.seed, "commutators"));
    std::vector<Assignment> pts;
    for (int i = 0; i < npts; ++i) {
        Assignment a;
        for (const auto& kv : fam.metric.domain.ranges)
            a[kv.first] = rng.uniform(kv.second.first, kv.second.second);
        pts.push_back(a);
    }
    const std::size_t n = basis.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            BracketExpansion be;
            be.left = basis[i].first;
            be.right = basis[j].first;
            PointGenerator br = bracket(basis[i].second, basis[j].second);
            // Solve bracket = sum_k c_k basis_k at the sample points.
            std::vector<std::vector<double>> A;
            std::vector<double> rhs;
            for (const auto& p : pts) {
                for (int comp = 0; comp < 5; ++comp) {
                    std::vector<double> row(n);
                    for (std::size_t k = 0; k < n; ++k) {
                        const PointGenerator& g = basis[k].second;
                        row[k] = comp < 4 ? eval_at(g.xi.comp[comp], p)
                                          : eval_at(g.u_coeff, p);
                    }
                    A.push_back(std::move(row));
                    rhs.push_back(comp < 4 ? eval_at(br.xi.comp[comp], p)
                                           : eval_at(br.u_coeff, p));
                }
            }
            double lsq_res = 0;
            std::vector<double> c = least_squares(A, rhs, &lsq_res);
            bool all_snapped = true;
            for (double v : c) {
                bool ok = false;
                be.coeffs.push_back(snap_rational(v, &ok));
                if (!ok) all_snapped = false;
            }
            // Zero-test the residual of the snapped expansion.
            PointGenerator recon;
            recon.u_coeff = Expr::integer(0);
            for (std::size_t k = 0; k < n; ++k) {
                Expr ck = rat(be.coeffs[k]);
                recon.xi = recon.xi + (ck * basis[k].second.xi);
                recon.u_coeff = recon.u_coeff + ck * basis[k].second.u_coeff;
            }
            double worst = 0;
            for (int comp = 0; comp < 5; ++comp) {
                Expr res = comp < 4 ? simplify(br.xi.comp[comp] - recon.xi.comp[comp])
                                    : simplify(br.u_coeff - recon.u_coeff);
                worst = std::max(worst, max_abs_on_box(res, fam.metric.domain, opt.samples,
                                                       sub_seed(opt.seed, "commutator-residual")));
            }
            be.residual = worst;
            be.in_span = all_snapped && worst < std::max(opt.tol, 1e-9);
            table.entries.push_back(std::move(be));
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Free-function instances
// ---------------------------------------------------------------------------

namespace {

Expr gaussian_body(const std::vector<Expr>& args) {
    Expr s = Expr::integer(0);
    for (const auto& a : args) s = s + pow(a, 2);
    return exp(-s);
}

Expr polynomial_body(const std::vector<Expr>& args) {
    Expr acc = Expr::integer(0);
    Expr prefix = Expr::integer(1);
    for (const auto& a : args) {
        prefix = prefix * a;
        acc = acc + prefix;
    }
    return acc;
}

}  // namespace

FreeFunctionInstance gaussian_instance() { return {"gaussian", &gaussian_body}; }
FreeFunctionInstance polynomial_instance() { return {"polynomial", &polynomial_body}; }

Expr realize_potential(const PotentialTemplate& tmpl, const FreeFunctionInstance& f) {
    return simplify(tmpl.base + tmpl.scale * f(tmpl.args));
}

// ---------------------------------------------------------------------------
// Potential tables
// ---------------------------------------------------------------------------

namespace {

PotentialTemplate args_only(std::vector<Expr> args) {
    PotentialTemplate t;
    t.args = std::move(args);
    return t;
}

void require_nonzero(const Rational& r, const char* what) {
    if (r.is_zero()) throw FamilyError(std::string(what) + " must be nonzero for this table");
}

std::vector<PotentialTableEntry> table1(const TableRowParams& p) {
    const Rational &a = p.a, &b = p.b, &c = p.c;
    std::vector<PotentialTableEntry> rows;
    auto add = [&](int row, const std::string& desc,
                   std::vector<std::pair<Rational, std::string>> combo,
                   std::vector<Expr> args) {
        PotentialTableEntry e;
        e.table = 1;
        e.row = row;
        e.description = desc;
        e.combo = std::move(combo);
        e.tmpl = args_only(std::move(args));
        rows.push_back(std::move(e));
    };
    PotentialTableEntry trivial;
    trivial.table = 1;
    trivial.row = 1;
    trivial.description = "V(t,x,y,z); u du";
    trivial.noether = false;
    trivial.trivial_u = true;
    trivial.tmpl = args_only({T, X, Y, Z});
    rows.push_back(std::move(trivial));
    add(2, "V(t,y,z); Y1", {{Rational(1), "Y1"}}, {T, Y, Z});
    add(3, "V(t,x,z); Y2", {{Rational(1), "Y2"}}, {T, X, Z});
    add(4, "V(t,x,y); Y3", {{Rational(1), "Y3"}}, {T, X, Y});
    add(5, "V(t, y-(b/a)x, z); aY1+bY2", {{a, "Y1"}, {b, "Y2"}},
        {T, Y - rat(b / a) * X, Z});
    add(6, "V(t, z-(b/a)x, y); aY1+bY3", {{a, "Y1"}, {b, "Y3"}},
        {T, Z - rat(b / a) * X, Y});
    add(7, "V(t, x, z-(b/a)y); aY2+bY3", {{a, "Y2"}, {b, "Y3"}},
        {T, X, Z - rat(b / a) * Y});
    add(8, "V(t, y-(b/a)x, z-(c/a)x); aY1+bY2+cY3", {{a, "Y1"}, {b, "Y2"}, {c, "Y3"}},
        {T, Y - rat(b / a) * X, Z - rat(c / a) * X});
    return rows;
}

std::vector<PotentialTableEntry> table2(const TableRowParams& p) {
    const Rational &a = p.a, &b = p.b, &c = p.c, &d = p.d;
    std::vector<PotentialTableEntry> rows;
    Expr r2 = pow(Y, 2) + pow(Z, 2);
    auto add = [&](int row, const std::string& desc,
                   std::vector<std::pair<Rational, std::string>> combo,
                   std::vector<Expr> args) -> PotentialTableEntry& {
        PotentialTableEntry e;
        e.table = 2;
        e.row = row;
        e.description = desc;
        e.combo = std::move(combo);
        e.tmpl = args_only(std::move(args));
        rows.push_back(std::move(e));
        return rows.back();
    };
    add(1, "V(t, x, y^2+z^2); Y4", {{Rational(1), "Y4"}}, {T, X, r2});
    add(2, "V(t, x-(a/b)arctan(y/z), y^2+z^2); aY1+bY4", {{a, "Y1"}, {b, "Y4"}},
        {T, X - rat(a / b) * arctan(Y / Z), r2});
    add(3, "V(t, x, (y^2+z^2)/2+(a/b)z); aY2+bY4", {{a, "Y2"}, {b, "Y4"}},
        {T, X, Expr::rational(1, 2) * r2 + rat(a / b) * Z});
    {
        auto& e = add(4, "V(t, x, (y^2+z^2)/2-(a/b)y); aY3+bY4", {{a, "Y3"}, {b, "Y4"}},
                      {T, X, Expr::rational(1, 2) * r2 - rat(a / b) * Y});
        e.verbatim = args_only({T, X, Expr::rational(1, 2) * r2 + rat(a / b) * Y});
        e.typo_note = "printed +(a/b)y is not invariant under aY3+bY4; sign flipped";
    }
    add(5, "V(t, x-(a/c)arctan(cy/(b+cz)), (y^2+z^2)/2+(b/c)z); aY1+bY2+cY4",
        {{a, "Y1"}, {b, "Y2"}, {c, "Y4"}},
        {T, X - rat(a / c) * arctan(rat(c) * Y / (rat(b) + rat(c) * Z)),
         Expr::rational(1, 2) * r2 + rat(b / c) * Z});
    {
        auto& e = add(6, "V(t, x-(a/c)arctan((cy-b)/(cz)), (y^2+z^2)/2-(b/c)y); aY1+bY3+cY4",
                      {{a, "Y1"}, {b, "Y3"}, {c, "Y4"}},
                      {T, X - rat(a / c) * arctan((rat(c) * Y - rat(b)) / (rat(c) * Z)),
                       Expr::rational(1, 2) * r2 - rat(b / c) * Y});
        e.verbatim = args_only({T, X - rat(a / c) * arctan((rat(c) * Y - rat(b)) / (rat(c) * Z)),
                                Expr::rational(1, 2) * r2 + rat(b / c) * Y});
        e.typo_note = "printed +(b/c)y is not invariant under aY1+bY3+cY4; sign flipped";
    }
    add(7, "V(t, x, (c/2)(y^2+z^2)-(by-az)); aY2+bY3+cY4", {{a, "Y2"}, {b, "Y3"}, {c, "Y4"}},
        {T, X, rat(c / Rational(2)) * r2 - (rat(b) * Y - rat(a) * Z)});
    {
        auto& e = add(8,
                      "V(t, x-(a/d)arctan((dy-c)/(dz+b)), (d/2)(y^2+z^2)-(cy-bz)); "
                      "aY1+bY2+cY3+dY4",
                      {{a, "Y1"}, {b, "Y2"}, {c, "Y3"}, {d, "Y4"}},
                      {T, X - rat(a / d) * arctan((rat(d) * Y - rat(c)) / (rat(d) * Z + rat(b))),
                       rat(d / Rational(2)) * r2 - (rat(c) * Y - rat(b) * Z)});
        e.verbatim =
            args_only({T, X - rat(a / d) * arctan((rat(d) * Y - rat(c)) / (rat(d) * Z + rat(c))),
                       rat(d / Rational(2)) * r2 - (rat(c) * Y - rat(b) * Z)});
        e.typo_note = "printed arctan denominator dz+c is not invariant; dz+b restores it";
    }
    return rows;
}

std::vector<PotentialTableEntry> table3(const BianchiFamily& fam, const TableRowParams& p) {
    if (fam.kind != FamilyKind::ProperCkv)
        throw FamilyError("table 3 applies to the proper-ckv family");
    const Rational &a = p.a, &b = p.b, &c = p.c, &d = p.d;
    require_nonzero(fam.alpha, "alpha");
    require_nonzero(fam.beta, "beta");
    require_nonzero(fam.gamma, "gamma");
    Expr U2 = simplify(pow(fam.U, 2));
    Rational ia = Rational(1) / fam.alpha;
    Rational ib = Rational(1) / fam.beta;
    Rational ig = Rational(1) / fam.gamma;
    std::vector<PotentialTableEntry> rows;
    auto add = [&](int row, const std::string& desc,
                   std::vector<std::pair<Rational, std::string>> combo,
                   std::vector<Expr> args) -> PotentialTableEntry& {
        PotentialTableEntry e;
        e.table = 3;
        e.row = row;
        e.description = desc;
        e.combo = std::move(combo);
        e.tmpl = args_only(std::move(args));
        e.tmpl.scale = U2;
        rows.push_back(std::move(e));
        return rows.back();
    };
    Expr xA = X * fam.Abar, yB = Y * fam.Bbar, zC = Z * fam.Cbar;
    add(1, "U^2 V(x Abar, y Bbar, z Cbar); X5", {{Rational(1), "Y5"}}, {xA, yB, zC});
    add(2, "U^2 V((x+(1/alpha)(a/b))Abar, y Bbar, z Cbar); aY1+bX5",
        {{a, "Y1"}, {b, "Y5"}}, {(X + rat(ia * (a / b))) * fam.Abar, yB, zC});
    {
        auto& e = add(3, "U^2 V(x Abar, (y+(1/beta)(a/b))Bbar, z Cbar); aY2+bX5",
                      {{a, "Y2"}, {b, "Y5"}},
                      {xA, (Y + rat(ib * (a / b))) * fam.Bbar, zC});
        e.verbatim = e.tmpl;
        e.verbatim->args[1] = simplify((Y + rat(ib * (a / b))) * Y * fam.Bbar);
        e.typo_note = "printed stray factor y in the second argument; dropped";
    }
    add(4, "U^2 V(x Abar, y Bbar, (z+(1/gamma)(a/b))Cbar); aY3+bX5",
        {{a, "Y3"}, {b, "Y5"}}, {xA, yB, (Z + rat(ig * (a / b))) * fam.Cbar});
    add(5, "U^2 V((x+(1/alpha)(a/c))Abar, (y+(1/beta)(b/c))Bbar, z Cbar); aY1+bY2+cX5",
        {{a, "Y1"}, {b, "Y2"}, {c, "Y5"}},
        {(X + rat(ia * (a / c))) * fam.Abar, (Y + rat(ib * (b / c))) * fam.Bbar, zC});
    add(6, "U^2 V((x+(1/alpha)(a/c))Abar, y Bbar, (z+(1/gamma)(b/c))Cbar); aY1+bY3+cX5",
        {{a, "Y1"}, {b, "Y3"}, {c, "Y5"}},
        {(X + rat(ia * (a / c))) * fam.Abar, yB, (Z + rat(ig * (b / c))) * fam.Cbar});
    {
        auto& e = add(7,
                      "U^2 V(x Abar, (y+(1/beta)(a/c))Bbar, (z+(1/gamma)(b/c))Cbar); "
                      "aY2+bY3+cX5",
                      {{a, "Y2"}, {b, "Y3"}, {c, "Y5"}},
                      {xA, (Y + rat(ib * (a / c))) * fam.Bbar,
                       (Z + rat(ig * (b / c))) * fam.Cbar});
        e.verbatim = e.tmpl;
        e.verbatim->args[1] = simplify((Y + rat((Rational(1) / b) * (a / c))) * fam.Bbar);
        e.typo_note = "printed shift (1/b)(a/c) reads (1/beta)(a/c); both run";
    }
    add(8,
        "U^2 V((x+(1/alpha)(a/d))Abar, (y+(1/beta)(b/d))Bbar, (z+(1/gamma)(c/d))Cbar); "
        "aY1+bY2+cY3+dX5",
        {{a, "Y1"}, {b, "Y2"}, {c, "Y3"}, {d, "Y5"}},
        {(X + rat(ia * (a / d))) * fam.Abar, (Y + rat(ib * (b / d))) * fam.Bbar,
         (Z + rat(ig * (c / d))) * fam.Cbar});
    return rows;
}

std::vector<PotentialTableEntry> table5() {
    std::vector<PotentialTableEntry> rows;
    Expr lnsin = ln(sin(T)), lncos = ln(cos(T));
    auto add = [&](int row, const std::string& desc, const std::string& label,
                   std::vector<Expr> args) {
        PotentialTableEntry e;
        e.table = 5;
        e.row = row;
        e.description = desc;
        e.combo = {{Rational(1), label}};
        e.tmpl = args_only(std::move(args));
        rows.push_back(std::move(e));
    };
    add(1, "V(x+ln sin t, y+ln cos t, z); Ybar4", "Ybar4", {X + lnsin, Y + lncos, Z});
    add(2, "V(x+ln sin t, y-ln cos t, z); Ybar5", "Ybar5", {X + lnsin, Y - lncos, Z});
    add(3, "V(x-ln sin t, y+ln cos t, z); Ybar6", "Ybar6", {X - lnsin, Y + lncos, Z});
    add(4, "V(x-ln sin t, y-ln cos t, z); Ybar7", "Ybar7", {X - lnsin, Y - lncos, Z});
    return rows;
}

std::vector<PotentialTableEntry> table6() {
    std::vector<PotentialTableEntry> rows;
    // (1 - cos 2t)/sin 2t = tan t, kept in the printed form.
    Expr ratio = (num(1) - cos(num(2) * T)) / sin(num(2) * T);
    Expr lnratio = ln(ratio);
    Expr base_x = num(1) - Expr::rational(1, 2) / pow(cos(T), 2);
    Expr scale_x = pow(cos(T), -2);
    Expr base_y = num(1) - Expr::rational(1, 2) / pow(sin(T), 2);
    Expr scale_y = pow(sin(T), -2);
    int row = 0;
    auto add = [&](const std::string& desc, const std::string& label, Expr base, Expr scale,
                   std::vector<Expr> args,
                   std::optional<std::vector<Expr>> verbatim_args = std::nullopt,
                   const std::string& note = "") {
        PotentialTableEntry e;
        e.table = 6;
        e.row = ++row;
        e.description = desc;
        e.combo = {{Rational(1), label}};
        e.tmpl.base = simplify(base);
        e.tmpl.scale = simplify(scale);
        e.tmpl.args = std::move(args);
        if (verbatim_args) {
            e.verbatim = e.tmpl;
            e.verbatim->args = std::move(*verbatim_args);
            e.typo_note = note;
        }
        rows.push_back(std::move(e));
    };
    for (int s : {+1, -1}) {
        std::string pm = s > 0 ? "+" : "-";
        add("1-1/(2cos^2 t)+(1/cos^2 t)V(x" + pm + "ln((1-cos2t)/sin2t), y, cos t/sin z); C1" +
                pm + "x",
            "C1" + pm + "x", base_x, scale_x,
            {X + num(s) * lnratio, Y, cos(T) / sin(Z)});
        add("1-1/(2cos^2 t)+(1/cos^2 t)V(x" + pm + "ln((1-cos2t)/sin2t), y, cos t/cos z); C2" +
                pm + "x",
            "C2" + pm + "x", base_x, scale_x,
            {X + num(s) * lnratio, Y, cos(T) / cos(Z)});
    }
    for (int s : {+1, -1}) {
        std::string pm = s > 0 ? "+" : "-";
        std::string mp = s > 0 ? "-" : "+";
        add("1-1/(2sin^2 t)+(1/sin^2 t)V(x, y" + mp + "ln((1-cos2t)/sin2t), sin t/cos z); C1" +
                pm + "y",
            "C1" + pm + "y", base_y, scale_y,
            {X, Y - num(s) * lnratio, sin(T) / cos(Z)},
            std::vector<Expr>{X, Y - num(s) * ratio, sin(T) / cos(Z)},
            "printed argument lacks the logarithm; y -/+ ln((1-cos2t)/sin2t) restores "
            "invariance");
        add("1-1/(2sin^2 t)+(1/sin^2 t)V(x, y" + mp + "ln((1-cos2t)/sin2t), sin t/sin z); C2" +
                pm + "y",
            "C2" + pm + "y", base_y, scale_y,
            {X, Y - num(s) * lnratio, sin(T) / sin(Z)},
            std::vector<Expr>{X, Y - num(s) * ratio, sin(T) / sin(Z)},
            "printed argument lacks the logarithm; y -/+ ln((1-cos2t)/sin2t) restores "
            "invariance");
    }
    return rows;
}

}  // namespace

std::vector<PotentialTableEntry> table_entries(int table_id, const BianchiFamily& fam,
                                               const TableRowParams& p) {
    switch (table_id) {
        case 1: return table1(p);
        case 2:
            if (fam.kind != FamilyKind::ClassALrs &&
                !(fam.kind == FamilyKind::ProperCkv && fam.beta == fam.gamma))
                throw FamilyError("table 2 requires B = C");
            return table2(p);
        case 3: return table3(fam, p);
        case 5:
            if (fam.kind != FamilyKind::ConformallyFlatTrig)
                throw FamilyError("table 5 applies to the conformally flat (trig) metric");
            return table5();
        case 6:
            if (fam.kind != FamilyKind::ConformallyFlatTrig)
                throw FamilyError("table 6 applies to the conformally flat (trig) metric");
            return table6();
        default:
            throw FamilyError("unknown table id " + std::to_string(table_id));
    }
}

std::vector<int> family_tables(FamilyKind k) {
    switch (k) {
        case FamilyKind::GeneralDiagonal: return {1};
        case FamilyKind::ClassALrs: return {1, 2};
        case FamilyKind::ProperCkv: return {1, 3};
        case FamilyKind::ConformallyFlatTrig: return {1, 5, 6};
        case FamilyKind::ConformallyFlatHyp: return {1};
    }
    return {};
}

RowGenerator row_generator(const PotentialTableEntry& row, const BianchiFamily& fam) {
    RowGenerator g;
    if (row.trivial_u) {
        g.a0 = Rational(1);
        return g;
    }
    auto vectors = catalog_vectors(fam);
    for (const auto& [coeff, label] : row.combo) {
        const CatalogVector& v = find_vector(vectors, label);
        g.xi = g.xi + (rat(coeff) * v.xi);
        g.psi = g.psi + rat(coeff) * v.declared_psi;
    }
    g.psi = simplify(g.psi);
    return g;
}

Expr bkg05_residual(const Expr& L, const Rational& alpha, const Rational& beta,
                    const Rational& gamma) {
    Expr L1 = differentiate(L, "t");
    Expr L2 = differentiate(L1, "t");
    Expr L3 = differentiate(L2, "t");
    Expr M = rat(alpha + beta + gamma);
    return simplify(L3 + (num(3) * L1 - M) * L2 / L);
}

}  // namespace kgsym
