#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "kgsym/catalog.hpp"
#include "kgsym/parse.hpp"
#include "kgsym/rng.hpp"
#include "kgsym/symmetry.hpp"

using namespace kgsym;

namespace {

const ZeroTestOptions kOpt{20, 1e-9, 42};

BianchiFamily power_family(Rational a, Rational b, Rational g) {
    FamilySpec s;
    s.kind = FamilyKind::ProperCkv;
    s.alpha = a;
    s.beta = b;
    s.gamma = g;
    s.U = parse("1/t");
    s.intU = parse("ln(t)");
    return build_family(s);
}

BianchiFamily lambert_family() {
    // L1(t) = W(exp(9t))/3 + 1/3 with alpha = beta = gamma = 1, so M = 3 and
    // the primitive of U = 1/L1 is ln(W(exp(9t)))/3.
    FamilySpec s;
    s.kind = FamilyKind::ProperCkv;
    s.alpha = Rational(1);
    s.beta = Rational(1);
    s.gamma = Rational(1);
    s.U = parse("1/(lambertW(exp(9*t))/3 + 1/3)");
    s.intU = parse("ln(lambertW(exp(9*t)))/3");
    s.t_range = {0.1, 1.0};
    return build_family(s);
}

BianchiFamily trig_family() {
    FamilySpec s;
    s.kind = FamilyKind::ConformallyFlatTrig;
    return build_family(s);
}

BianchiFamily lrs_family() {
    FamilySpec s;
    s.kind = FamilyKind::ClassALrs;
    s.A = parse("t");
    s.B = parse("t^2");
    return build_family(s);
}

std::map<std::string, std::map<std::string, std::string>> expected_table(
    const std::vector<std::string>& labels,
    std::initializer_list<std::tuple<const char*, const char*, const char*>> entries) {
    std::map<std::string, std::map<std::string, std::string>> out;
    for (const auto& l : labels)
        for (const auto& r : labels) out[l][r] = "0";
    for (const auto& [l, r, v] : entries) out[l][r] = v;
    return out;
}

std::string expansion_text(const BracketExpansion& be,
                           const std::vector<std::string>& labels) {
    std::string s;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (be.coeffs[i].is_zero()) continue;
        if (!s.empty()) s += " + ";
        s += be.coeffs[i].str() + "*" + labels[i];
    }
    return s.empty() ? "0" : s;
}

}  // namespace

TEST_CASE("family construction") {
    // Power-law family realizes the expected components.
    BianchiFamily f = power_family(Rational(1, 2), Rational(1, 4), Rational(1, 4));
    CHECK(simplify(f.metric.components[1] - parse("t")).is_zero());        // t^{2-2a} = t
    CHECK(simplify(f.metric.components[2] - parse("t^(3/2)")).is_zero());  // t^{2-2b}
    CHECK(f.psi5.same_as(Expr::integer(1)));

    // Conformally flat (trig) metric.
    BianchiFamily tr = trig_family();
    CHECK(simplify(tr.metric.components[1] - parse("sin(t)^2")).is_zero());
    CHECK(simplify(tr.metric.components[2] - parse("cos(t)^2")).is_zero());
    CHECK(tr.metric.components[3].is_one());

    // Errors: missing primitive, degenerate exponents, missing scale factors.
    FamilySpec bad;
    bad.kind = FamilyKind::ProperCkv;
    bad.alpha = Rational(1);
    bad.U = parse("1/t");
    CHECK_THROWS_AS(build_family(bad), FamilyError);
    bad.intU = parse("ln(t)");
    bad.alpha = Rational(0);
    CHECK_THROWS_AS(build_family(bad), FamilyError);
    FamilySpec nogen;
    nogen.kind = FamilyKind::GeneralDiagonal;
    CHECK_THROWS_AS(build_family(nogen), FamilyError);
}

TEST_CASE("catalog vector counts") {
    FamilySpec gen;
    gen.kind = FamilyKind::GeneralDiagonal;
    gen.A = parse("t");
    gen.B = parse("t^2");
    gen.C = parse("t^3");
    CHECK(catalog_vectors(build_family(gen)).size() == 3);
    CHECK(catalog_vectors(lrs_family()).size() == 4);
    CHECK(catalog_vectors(power_family(Rational(1), Rational(2), Rational(3))).size() == 4);
    CHECK(catalog_vectors(power_family(Rational(1), Rational(2), Rational(2))).size() == 5);
    CHECK(catalog_vectors(trig_family()).size() == 15);
}

TEST_CASE("every catalog vector classifies to its declared class") {
    std::vector<BianchiFamily> fams;
    {
        FamilySpec gen;
        gen.kind = FamilyKind::GeneralDiagonal;
        gen.A = parse("t");
        gen.B = parse("t^2");
        gen.C = parse("t^3");
        fams.push_back(build_family(gen));
    }
    fams.push_back(lrs_family());
    fams.push_back(power_family(Rational(1), Rational(2), Rational(2)));
    fams.push_back(lambert_family());
    fams.push_back(trig_family());
    for (const auto& fam : fams) {
        for (const auto& v : catalog_vectors(fam)) {
            auto cls = classify_collineation(fam.metric, v.xi, kOpt);
            CHECK_MESSAGE(cls.tag == v.declared_tag, family_name(fam.kind), "/", v.label);
            if (cls.tag != CollineationTag::NotConformal) {
                REQUIRE(cls.psi.has_value());
                CHECK_MESSAGE(is_zero_probabilistic(simplify(*cls.psi - v.declared_psi),
                                                    fam.metric.domain, kOpt),
                              family_name(fam.kind), "/", v.label, " conformal factor");
            }
        }
    }
    // The Lambert family's Y5 really is a proper (nonconstant) CKV.
    BianchiFamily lam = lambert_family();
    const auto& y5 = find_vector(catalog_vectors(lam), "Y5");
    CHECK(y5.declared_tag == CollineationTag::CKV);
}

TEST_CASE("commutator table of the scaling family matches the catalog") {
    // alpha = 1, beta = gamma = 2 and U = 1/t (so X5 carries -u d_u).
    BianchiFamily fam = power_family(Rational(1), Rational(2), Rational(2));
    auto table = commutator_table(fam, kOpt);
    REQUIRE(table.labels == std::vector<std::string>{"Y1", "Y2", "Y3", "Y4", "X5"});
    auto expected = expected_table(table.labels, {
        {"Y2", "Y4", "-1*Y3"},
        {"Y3", "Y4", "1*Y2"},
        {"Y1", "X5", "1*Y1"},   // alpha Y1
        {"Y2", "X5", "2*Y2"},   // beta Y2
        {"Y3", "X5", "2*Y3"},   // beta Y3
    });
    int checked = 0;
    for (const auto& be : table.entries) {
        CHECK_MESSAGE(be.in_span, be.left, ",", be.right);
        CHECK_MESSAGE(expansion_text(be, table.labels) == expected[be.left][be.right],
                      be.left, ",", be.right);
        ++checked;
    }
    CHECK(checked == 15);  // upper triangle incl. diagonal of a 5-basis
}

TEST_CASE("commutator table of the conformally flat KV algebra") {
    BianchiFamily fam = trig_family();
    auto table = commutator_table(fam, kOpt);
    REQUIRE(table.labels ==
            std::vector<std::string>{"Y1", "Y2", "Y3", "Ybar4", "Ybar5", "Ybar6", "Ybar7"});
    auto expected = expected_table(
        table.labels,
        {
            {"Y1", "Ybar4", "1*Ybar4"},
            {"Y1", "Ybar5", "1*Ybar5"},
            {"Y1", "Ybar6", "-1*Ybar6"},
            {"Y1", "Ybar7", "-1*Ybar7"},
            {"Y2", "Ybar4", "1*Ybar4"},
            {"Y2", "Ybar5", "-1*Ybar5"},
            {"Y2", "Ybar6", "1*Ybar6"},
            {"Y2", "Ybar7", "-1*Ybar7"},
            {"Ybar4", "Ybar7", "-4*Y1 + -4*Y2"},
            {"Ybar5", "Ybar6", "-4*Y1 + 4*Y2"},
        });
    int nontrivial = 0;
    for (const auto& be : table.entries) {
        CHECK_MESSAGE(be.in_span, be.left, ",", be.right);
        CHECK_MESSAGE(expansion_text(be, table.labels) == expected[be.left][be.right],
                      be.left, ",", be.right, " -> ", expansion_text(be, table.labels));
        if (expected[be.left][be.right] != "0") ++nontrivial;
        if (be.left == be.right) {
            for (const auto& c : be.coeffs) CHECK(c.is_zero());
        }
    }
    CHECK(nontrivial == 10);
    CHECK(table.entries.size() == 28);  // 7*8/2 incl. diagonal
}

TEST_CASE("potential table row shapes") {
    BianchiFamily fam = power_family(Rational(1), Rational(2), Rational(2));
    // Table 1 row 2: V = F(t,y,z) under Y1.
    auto t1 = table_entries(1, fam, TableRowParams{});
    REQUIRE(t1.size() == 8);
    CHECK(t1[0].trivial_u);
    CHECK_FALSE(t1[0].noether);
    CHECK(t1[1].noether);
    CHECK(t1[1].tmpl.args.size() == 3);
    CHECK(t1[1].tmpl.args[0].same_as(Expr::symbol("t")));

    // Table 2 row 1: V = F(t, x, y^2+z^2) under Y4.
    auto t2 = table_entries(2, lrs_family(), TableRowParams{});
    REQUIRE(t2.size() == 8);
    CHECK(t2[0].tmpl.args[2].same_as(simplify(parse("y^2+z^2"))));
    CHECK(t2[0].combo[0].second == "Y4");
    // Typo-flagged rows carry a verbatim reading.
    CHECK(t2[3].verbatim.has_value());
    CHECK(t2[5].verbatim.has_value());
    CHECK(t2[7].verbatim.has_value());

    // Table 5 row 1: V = F(x + ln sin t, y + ln cos t, z) under Ybar4.
    auto t5 = table_entries(5, trig_family(), TableRowParams{});
    REQUIRE(t5.size() == 4);
    CHECK(t5[0].tmpl.args[0].same_as(simplify(parse("x + ln(sin(t))"))));
    CHECK(t5[0].combo[0].second == "Ybar4");

    auto t3 = table_entries(3, fam, TableRowParams{});
    REQUIRE(t3.size() == 8);
    CHECK(t3[2].verbatim.has_value());
    CHECK(t3[6].verbatim.has_value());
    auto t6 = table_entries(6, trig_family(), TableRowParams{});
    REQUIRE(t6.size() == 8);

    // Unsupported pairings are rejected.
    CHECK_THROWS_AS(table_entries(5, fam, TableRowParams{}), FamilyError);
    CHECK_THROWS_AS(table_entries(4, fam, TableRowParams{}), FamilyError);
}

TEST_CASE("KV table rows: free-function arguments are invariants") {
    // For KV rows the constraint reduces to xi(V) = 0 for arbitrary F, which
    // holds iff each argument is annihilated by the combination.
    struct Sweep {
        BianchiFamily fam;
        int table;
    };
    std::vector<Sweep> sweeps;
    {
        FamilySpec gen;
        gen.kind = FamilyKind::GeneralDiagonal;
        gen.A = parse("t");
        gen.B = parse("t^2");
        gen.C = parse("t^3");
        sweeps.push_back({build_family(gen), 1});
    }
    sweeps.push_back({lrs_family(), 2});
    sweeps.push_back({trig_family(), 5});
    for (const auto& sweep : sweeps) {
        for (const auto& row : table_entries(sweep.table, sweep.fam, TableRowParams{})) {
            if (row.trivial_u) continue;
            RowGenerator rg = row_generator(row, sweep.fam);
            for (const auto& arg : row.tmpl.args) {
                Expr directional = Expr::integer(0);
                for (int k = 0; k < 4; ++k)
                    directional = directional +
                                  rg.xi.comp[k] * differentiate(arg, sweep.fam.metric.coords[k]);
                CHECK_MESSAGE(is_zero_probabilistic(simplify(directional),
                                                    sweep.fam.metric.domain, kOpt),
                              "table ", row.table, " row ", row.row);
            }
        }
    }
}

TEST_CASE("typo-flagged rows: corrected reading passes, verbatim fails") {
    BianchiFamily lrs = lrs_family();
    auto t2 = table_entries(2, lrs, TableRowParams{});
    for (int rowidx : {3, 5, 7}) {  // rows 4, 6, 8
        const auto& row = t2[rowidx];
        REQUIRE(row.verbatim.has_value());
        RowGenerator rg = row_generator(row, lrs);
        for (const auto& inst : {gaussian_instance(), polynomial_instance()}) {
            Expr good = constraint_residual(lrs.metric, rg.xi, rg.psi,
                                            realize_potential(row.tmpl, inst));
            CHECK(max_abs_on_box(good, lrs.metric.domain, 20, 42) < 1e-9);
        }
        Expr bad = constraint_residual(lrs.metric, rg.xi, rg.psi,
                                       realize_potential(*row.verbatim, gaussian_instance()));
        CHECK(max_abs_on_box(bad, lrs.metric.domain, 20, 42) > 1e-3);
    }

    // beta = 3 differs from the combination parameter b = 2, so row 7's two
    // readings are genuinely distinct.
    BianchiFamily pf = power_family(Rational(1), Rational(3), Rational(3));
    auto t3 = table_entries(3, pf, TableRowParams{});
    for (int rowidx : {2, 6}) {  // table 3 rows 3 and 7
        const auto& row = t3[rowidx];
        REQUIRE(row.verbatim.has_value());
        RowGenerator rg = row_generator(row, pf);
        Expr good = constraint_residual(pf.metric, rg.xi, rg.psi,
                                        realize_potential(row.tmpl, gaussian_instance()));
        CHECK(max_abs_on_box(good, pf.metric.domain, 20, 42) < 1e-8);
        Expr bad = constraint_residual(pf.metric, rg.xi, rg.psi,
                                       realize_potential(*row.verbatim, gaussian_instance()));
        CHECK(max_abs_on_box(bad, pf.metric.domain, 20, 42) > 1e-3);
    }
}

TEST_CASE("bkg05 residual") {
    // L2(t) = t is an exact solution: the residual simplifies to literal zero.
    CHECK(bkg05_residual(parse("t"), Rational(1), Rational(1), Rational(1)).is_zero());

    // Lambert-W branch with M = 3, c1 = 0.
    Expr L1 = simplify(parse("lambertW(exp(9*t))/3 + 1/3"));
    Expr res = bkg05_residual(L1, Rational(1), Rational(1), Rational(1));
    Box tbox;
    tbox.set("t", 0.1, 1.0);
    CHECK(max_abs_on_box(res, tbox, 20, 42) < 1e-7);

    // A non-solution is flagged as such.
    Expr res2 = bkg05_residual(parse("t^2"), Rational(1), Rational(1), Rational(1));
    CHECK(max_abs_on_box(res2, tbox, 20, 42) > 1e-3);
}

TEST_CASE("table 6 additive structure") {
    auto rows = table_entries(6, trig_family(), TableRowParams{});
    // base + scale * F with base and scale pinned to the printed forms.
    const auto& r1 = rows[0];
    CHECK(is_zero_probabilistic(
        simplify(r1.tmpl.base - parse("1 - 1/(2*cos(t)^2)")),
        trig_family().metric.domain, kOpt));
    CHECK(is_zero_probabilistic(simplify(r1.tmpl.scale - parse("1/cos(t)^2")),
                                trig_family().metric.domain, kOpt));
    // The +-y rows carry the missing-logarithm verbatim reading.
    CHECK(rows[4].verbatim.has_value());
    CHECK(rows[4].typo_note.find("logarithm") != std::string::npos);
}

TEST_CASE("catalog expressions differentiate consistently with finite differences") {
    // Sweep every expression the catalog carries for the trig family and the
    // scaling family: metric components, vector components, conformal factors,
    // realized row potentials.
    std::vector<std::pair<BianchiFamily, int>> fams = {
        {trig_family(), 5},
        {power_family(Rational(1), Rational(2), Rational(2)), 3},
        {lambert_family(), 0},
    };
    SeededRng rng(23);
    auto fd_check = [&](const Expr& e, const Box& box) {
        for (const auto& coord : {"t", "x", "y", "z"}) {
            Expr d = differentiate(e, coord);
            for (int i = 0; i < 20; ++i) {
                Assignment a;
                for (const auto& kv : box.ranges)
                    a[kv.first] = rng.uniform(kv.second.first, kv.second.second);
                for (const auto& c : {"t", "x", "y", "z"})
                    if (!a.count(c)) a[c] = rng.uniform(0.4, 1.0);
                double exact, up, dn;
                const double h = 1e-5;
                try {
                    exact = eval_at(d, a);
                    Assignment au = a, ad = a;
                    au[coord] += h;
                    ad[coord] -= h;
                    up = eval_at(e, au);
                    dn = eval_at(e, ad);
                } catch (const EvalError&) {
                    continue;
                }
                double fd = (up - dn) / (2 * h);
                CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
            }
        }
    };
    for (const auto& [fam, table] : fams) {
        for (int i = 0; i < 4; ++i) fd_check(fam.metric.components[i], fam.metric.domain);
        for (const auto& v : catalog_vectors(fam)) {
            for (int i = 0; i < 4; ++i) fd_check(v.xi.comp[i], fam.metric.domain);
            fd_check(v.declared_psi, fam.metric.domain);
        }
        if (table != 0) {
            for (const auto& row : table_entries(table, fam, TableRowParams{}))
                fd_check(realize_potential(row.tmpl, gaussian_instance()),
                         fam.metric.domain);
        }
    }
}
