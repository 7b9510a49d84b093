#include "kgsym/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include "kgsym/parse.hpp"
#include "kgsym/rng.hpp"
#include "kgsym/symmetry.hpp"

namespace kgsym {

namespace {

// Tolerances pinned by the verification design: symbolic-residual zero tests
// run at the run tolerance (default 1e-9); sampled jet-condition residuals at
// 1e-7 (conditioning of the nine-term second-prolongation sum); the
// numerically verified tables 3 and 6 at 1e-8.
constexpr double kJetTol = 1e-7;
constexpr double kNumericTableTol = 1e-8;

Rational parse_rational(const std::string& text, const char* what) {
    Expr e = simplify(parse(text));
    if (e.kind() != Expr::Kind::Rational)
        throw FamilyError(std::string(what) + " must be rational, got " + text);
    return e.rat();
}

FamilyKind family_kind_from_name(const std::string& name) {
    if (name == "general") return FamilyKind::GeneralDiagonal;
    if (name == "lrs") return FamilyKind::ClassALrs;
    if (name == "proper-ckv") return FamilyKind::ProperCkv;
    if (name == "conformally-flat-trig") return FamilyKind::ConformallyFlatTrig;
    if (name == "conformally-flat-hyp") return FamilyKind::ConformallyFlatHyp;
    throw FamilyError("unknown family '" + name + "'");
}

std::string status_note(bool pass) { return pass ? "" : "exceeds tolerance"; }

}  // namespace

BianchiFamily family_from_options(const FamilyOptions& opt) {
    FamilySpec spec;
    spec.kind = family_kind_from_name(opt.family);
    switch (spec.kind) {
        case FamilyKind::GeneralDiagonal:
            spec.A = parse(opt.A.value_or("t"));
            spec.B = parse(opt.B.value_or("t^2"));
            spec.C = parse(opt.C.value_or("t^3"));
            break;
        case FamilyKind::ClassALrs:
            spec.A = parse(opt.A.value_or("t"));
            spec.B = parse(opt.B.value_or("t^2"));
            break;
        case FamilyKind::ProperCkv: {
            spec.alpha = parse_rational(opt.alpha.value_or("1"), "alpha");
            spec.beta = parse_rational(opt.beta.value_or("2"), "beta");
            spec.gamma = parse_rational(opt.gamma.value_or("2"), "gamma");
            bool have_u = opt.U.has_value();
            bool have_int = opt.intU.has_value();
            if (have_u != have_int)
                throw FamilyError(
                    "proper-ckv: U and intU must be supplied together (a closed-form "
                    "primitive is required)");
            spec.U = parse(opt.U.value_or("1/t"));
            spec.intU = parse(opt.intU.value_or("ln(t)"));
            break;
        }
        case FamilyKind::ConformallyFlatTrig:
        case FamilyKind::ConformallyFlatHyp:
            break;
    }
    return build_family(spec);
}

// ---------------------------------------------------------------------------
// collineations
// ---------------------------------------------------------------------------

Report cmd_collineations(const FamilyOptions& fam_opt, const RunOptions& run) {
    Report rep;
    rep.seed = run.seed;
    rep.tol = run.tol;
    BianchiFamily fam = family_from_options(fam_opt);
    ZeroTestOptions opt{20, run.tol, run.seed};
    for (const auto& v : catalog_vectors(fam)) {
        std::string id = "collineations/" + std::string(family_name(fam.kind)) + "/" + v.label;
        std::string anchor = "conformal catalog: " + v.label;
        auto cls = classify_collineation(fam.metric, v.xi, opt);
        bool tag_ok = cls.tag == v.declared_tag;
        bool psi_ok = true;
        if (cls.psi.has_value())
            psi_ok = is_zero_probabilistic(simplify(*cls.psi - v.declared_psi),
                                           fam.metric.domain, opt);
        std::string desc = std::string("classified ") + collineation_name(cls.tag) +
                           ", declared " + collineation_name(v.declared_tag);
        if (tag_ok && psi_ok) rep.pass(id, anchor, desc, cls.max_residual);
        else rep.fail(id, anchor, desc + (psi_ok ? "" : "; conformal factor mismatch"),
                      cls.max_residual);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// verify-tables
// ---------------------------------------------------------------------------

namespace {

BianchiFamily default_family_for_table(int table, const FamilyOptions& fam_opt) {
    FamilyOptions opt = fam_opt;
    switch (table) {
        case 1: opt.family = "general"; break;
        case 2: opt.family = "lrs"; break;
        case 3: opt.family = "proper-ckv"; break;
        case 5:
        case 6: opt.family = "conformally-flat-trig"; break;
        default: throw FamilyError("unknown table id " + std::to_string(table));
    }
    return family_from_options(opt);
}

struct RowCheck {
    double corrected = 0.0;
    double verbatim = -1.0;  // <0: no verbatim reading
    bool corrected_ok = false;
    bool verbatim_ok = false;
};

RowCheck constraint_check(const PotentialTableEntry& row, const BianchiFamily& fam,
                          const FreeFunctionInstance& inst, double tol, int samples,
                          std::uint64_t seed) {
    RowCheck rc;
    RowGenerator rg = row_generator(row, fam);
    if (row.trivial_u) {
        // The u d_u symmetry has no constraint; it is a Lie symmetry for any V.
        rc.corrected_ok = true;
        return rc;
    }
    Expr V = realize_potential(row.tmpl, inst);
    rc.corrected = max_abs_on_box(constraint_residual(fam.metric, rg.xi, rg.psi, V),
                                  fam.metric.domain, samples, sub_seed(seed, "constraint"));
    rc.corrected_ok = rc.corrected < tol;
    if (row.verbatim) {
        Expr Vv = realize_potential(*row.verbatim, inst);
        rc.verbatim = max_abs_on_box(constraint_residual(fam.metric, rg.xi, rg.psi, Vv),
                                     fam.metric.domain, samples,
                                     sub_seed(seed, "constraint-verbatim"));
        rc.verbatim_ok = rc.verbatim < tol;
    }
    return rc;
}

}  // namespace

Report cmd_verify_tables(const VerifyTablesOptions& opt, const FamilyOptions& fam_opt,
                         const RunOptions& run) {
    Report rep;
    rep.seed = run.seed;
    rep.tol = run.tol;
    const std::array<FreeFunctionInstance, 2> instances{gaussian_instance(),
                                                        polynomial_instance()};
    for (int table : opt.tables) {
        BianchiFamily fam = default_family_for_table(table, fam_opt);
        TableRowParams params;
        if (opt.random_params) {
            SeededRng rng(sub_seed(run.seed, "row-params"));
            auto draw = [&rng]() {
                long long num = 1 + static_cast<long long>(rng.uniform(0, 7));
                long long den = 1 + static_cast<long long>(rng.uniform(0, 3));
                return Rational(num, den);
            };
            params = {draw(), draw(), draw(), draw()};
        }
        double constraint_tol = (table == 3 || table == 6) ? kNumericTableTol : run.tol;
        bool sign_discrepancy = false;
        double sign_residual = 0.0;
        for (const auto& row : table_entries(table, fam, params)) {
            if (opt.row && row.row != *opt.row) continue;
            std::string anchor =
                "table " + std::to_string(table) + " row " + std::to_string(row.row);
            std::string base_id =
                "table" + std::to_string(table) + "/row" + std::to_string(row.row);
            RowGenerator rg = row_generator(row, fam);

            // Constraint residual, both free-function instances, both readings.
            for (std::size_t k = 0; k < instances.size(); ++k) {
                RowCheck rc = constraint_check(row, fam, instances[k], constraint_tol,
                                               20, run.seed);
                std::string id = base_id + "/constraint/" + instances[k].name;
                if (row.trivial_u) {
                    rep.pass(id, anchor, "no constraint for the trivial symmetry", 0.0);
                    continue;
                }
                if (rc.verbatim >= 0.0 && !rc.verbatim_ok && rc.corrected_ok) {
                    rep.flagged(id, anchor,
                                "corrected reading passes; printed reading residual=" +
                                    format_float_17(rc.verbatim) +
                                    (row.typo_note.empty() ? "" : " (" + row.typo_note + ")"),
                                rc.corrected);
                } else if (rc.corrected_ok) {
                    rep.pass(id, anchor, row.description, rc.corrected);
                } else {
                    rep.fail(id, anchor, row.description, rc.corrected);
                }
            }

            // Alternate-sign constraint (the printed determining-equation form).
            if (!row.trivial_u) {
                Expr V = realize_potential(row.tmpl, instances[0]);
                double alt = max_abs_on_box(
                    constraint_residual_alt_sign(fam.metric, rg.xi, rg.psi, V),
                    fam.metric.domain, 20, sub_seed(run.seed, "constraint-alt"));
                if (alt >= constraint_tol) {
                    sign_discrepancy = true;
                    sign_residual = std::max(sign_residual, alt);
                }
            }

            // On-shell Lie condition and the Noether identity with the
            // conformal-factor gauge.
            Expr V = realize_potential(row.tmpl, instances[0]);
            SymmetryGenerator g = generic_symmetry(rg.xi, rg.psi, rg.a0, Expr::integer(0));
            auto lie = lie_condition_residual(fam.metric, V, g, 20, kJetTol, run.seed);
            if (lie.pass)
                rep.pass(base_id + "/lie-onshell", anchor, "", lie.max_residual);
            else
                rep.fail(base_id + "/lie-onshell", anchor, status_note(false),
                         lie.max_residual);

            auto gauge = noether_gauge(fam.metric, g.psi);
            double nres =
                noether_condition_residual(fam.metric, V, g, gauge, 20, run.seed);
            if (row.noether) {
                if (nres < kJetTol)
                    rep.pass(base_id + "/noether", anchor, "", nres);
                else
                    rep.fail(base_id + "/noether", anchor, status_note(false), nres);
            } else {
                // The trivial symmetry must fail the Noether identity.
                if (nres > 1e-3)
                    rep.pass(base_id + "/noether", anchor,
                             "not a Noether symmetry, as catalogued", nres);
                else
                    rep.fail(base_id + "/noether", anchor,
                             "unexpectedly satisfies the Noether identity", nres);
            }

            // Wave-equation admissibility: tables 1-5 carry over to V = 0,
            // table 6 does not.
            ZeroTestOptions zopt{20, run.tol, run.seed};
            bool admissible = wave_mode_check(fam.metric, rg.psi, zopt);
            bool expected_admissible = table != 6;
            double lap_res = admissible ? 0.0
                                        : max_abs_on_box(laplacian(fam.metric, rg.psi),
                                                         fam.metric.domain, 20,
                                                         sub_seed(run.seed, "wave-mode"));
            if (admissible == expected_admissible)
                rep.pass(base_id + "/wave-mode", anchor,
                         admissible ? "wave-admissible" : "not wave-admissible", lap_res);
            else
                rep.fail(base_id + "/wave-mode", anchor,
                         admissible ? "unexpectedly wave-admissible"
                                    : "unexpectedly not wave-admissible",
                         lap_res);
        }
        if (sign_discrepancy) {
            rep.flagged("table" + std::to_string(table) + "/constraint-delta-psi-sign",
                        "table " + std::to_string(table),
                        "the opposite-sign Delta psi form of the constraint fails where "
                        "the implemented form passes; the printed determining equation "
                        "carries the flipped sign",
                        sign_residual);
        }
    }
    return rep;
}

namespace {

std::string template_text(const PotentialTemplate& t) {
    std::string args;
    for (const auto& a : t.args) {
        if (!args.empty()) args += ", ";
        args += a.str();
    }
    std::string f = "F(" + args + ")";
    std::string out;
    if (!t.base.is_zero()) out = t.base.str() + " + ";
    if (!t.scale.is_one()) out += "(" + t.scale.str() + ")*";
    return out + f;
}

void json_string(std::ostringstream& os, const std::string& s) {
    os << '"';
    for (char ch : s) {
        if (ch == '"' || ch == '\\') os << '\\';
        os << ch;
    }
    os << '"';
}

}  // namespace

std::string export_catalog_rows(const std::vector<int>& tables,
                                const FamilyOptions& fam_opt, bool json) {
    std::ostringstream os;
    if (json) os << "{\"rows\":[";
    bool first = true;
    for (int table : tables) {
        BianchiFamily fam = default_family_for_table(table, fam_opt);
        for (const auto& row : table_entries(table, fam, TableRowParams{})) {
            std::string tmpl = row.trivial_u ? "F(t, x, y, z)" : template_text(row.tmpl);
            if (json) {
                if (!first) os << ",";
                first = false;
                os << "{\"table\":" << row.table << ",\"row\":" << row.row
                   << ",\"template\":";
                json_string(os, tmpl);
                os << ",\"symmetry\":[";
                if (row.trivial_u) {
                    os << "\"u du\"";
                } else {
                    for (std::size_t i = 0; i < row.combo.size(); ++i) {
                        if (i) os << ",";
                        json_string(os, row.combo[i].second);
                    }
                }
                os << "],\"coefficients\":[";
                if (!row.trivial_u) {
                    for (std::size_t i = 0; i < row.combo.size(); ++i) {
                        if (i) os << ",";
                        json_string(os, row.combo[i].first.str());
                    }
                }
                os << "],\"noether\":" << (row.noether ? "true" : "false") << "}";
            } else {
                os << "table=" << row.table << " row=" << row.row << " template=\"" << tmpl
                   << "\" symmetry=\"";
                if (row.trivial_u) {
                    os << "u du";
                } else {
                    for (std::size_t i = 0; i < row.combo.size(); ++i) {
                        if (i) os << " + ";
                        os << row.combo[i].first.str() << "*" << row.combo[i].second;
                    }
                }
                os << "\" noether=" << (row.noether ? "yes" : "no") << "\n";
            }
        }
    }
    if (json) os << "]}";
    return os.str();
}

// ---------------------------------------------------------------------------
// commutators
// ---------------------------------------------------------------------------

namespace {

std::string expansion_text(const BracketExpansion& be,
                           const std::vector<std::string>& labels) {
    std::string s;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (be.coeffs[i].is_zero()) continue;
        if (!s.empty()) s += " + ";
        std::string c = be.coeffs[i].str();
        s += (c == "1" ? "" : c + "*") + labels[i];
    }
    return s.empty() ? "0" : s;
}

// Catalogued expectations, as expansion text keyed by (left, right).
std::map<std::pair<std::string, std::string>, std::string> expected_commutators(
    const BianchiFamily& fam) {
    std::map<std::pair<std::string, std::string>, std::string> out;
    if (fam.kind == FamilyKind::ProperCkv && fam.beta == fam.gamma) {
        auto coeff = [](const Rational& r, const std::string& l) {
            if (r.is_zero()) return std::string("0");
            if (r.is_one()) return l;
            return r.str() + "*" + l;
        };
        out[{"Y2", "Y4"}] = "-1*Y3";
        out[{"Y3", "Y4"}] = "Y2";
        out[{"Y1", "X5"}] = coeff(fam.alpha, "Y1");
        out[{"Y2", "X5"}] = coeff(fam.beta, "Y2");
        out[{"Y3", "X5"}] = coeff(fam.beta, "Y3");
    } else if (fam.kind == FamilyKind::ConformallyFlatTrig) {
        out[{"Y1", "Ybar4"}] = "Ybar4";
        out[{"Y1", "Ybar5"}] = "Ybar5";
        out[{"Y1", "Ybar6"}] = "-1*Ybar6";
        out[{"Y1", "Ybar7"}] = "-1*Ybar7";
        out[{"Y2", "Ybar4"}] = "Ybar4";
        out[{"Y2", "Ybar5"}] = "-1*Ybar5";
        out[{"Y2", "Ybar6"}] = "Ybar6";
        out[{"Y2", "Ybar7"}] = "-1*Ybar7";
        out[{"Ybar4", "Ybar7"}] = "-4*Y1 + -4*Y2";
        out[{"Ybar5", "Ybar6"}] = "-4*Y1 + 4*Y2";
    }
    return out;
}

}  // namespace

Report cmd_commutators(const FamilyOptions& fam_opt, const RunOptions& run) {
    Report rep;
    rep.seed = run.seed;
    rep.tol = run.tol;
    BianchiFamily fam = family_from_options(fam_opt);
    ZeroTestOptions opt{20, run.tol, run.seed};
    auto table = commutator_table(fam, opt);
    auto expected = expected_commutators(fam);
    for (const auto& be : table.entries) {
        std::string id = "commutators/" + std::string(family_name(fam.kind)) + "/[" +
                         be.left + "," + be.right + "]";
        std::string anchor = "commutator table: [" + be.left + "," + be.right + "]";
        std::string got = expansion_text(be, table.labels);
        auto it = expected.find({be.left, be.right});
        std::string want = it != expected.end() ? it->second
                           : be.left == be.right ? "0"
                                                 : "";
        bool ok = be.in_span;
        std::string desc = "= " + got;
        if (!want.empty()) {
            ok = ok && got == want;
            if (got != want) desc += " (catalogued: " + want + ")";
        }
        if (ok) rep.pass(id, anchor, desc, be.residual);
        else rep.fail(id, anchor, desc, be.residual);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// reduce
// ---------------------------------------------------------------------------

namespace {

ReductionCaseId case_id_from_name(const std::string& name) {
    if (name == "a1") return ReductionCaseId::A1;
    if (name == "a2") return ReductionCaseId::A2;
    if (name == "b-plus-x") return ReductionCaseId::BPlusX;
    if (name == "b-minus-x") return ReductionCaseId::BMinusX;
    if (name == "b-plus-y") return ReductionCaseId::BPlusY;
    if (name == "b-minus-y") return ReductionCaseId::BMinusY;
    throw FamilyError("unknown reduction case '" + name + "'");
}

struct CaseDefaults {
    double z0, z1;
    Grid grid;
};

CaseDefaults case_defaults(ReductionCaseId id) {
    switch (id) {
        case ReductionCaseId::A1:
            return {0.5, 1.7, {{0.7, 0.3, 0.3, 0.3}, {1.5, 0.9, 0.9, 0.9}, {4, 4, 4, 4}}};
        case ReductionCaseId::A2:
            return {0.3, 1.2, {{0.9, 0.3, 0.35, 0.35}, {1.3, 0.9, 0.7, 0.7}, {4, 4, 4, 4}}};
        case ReductionCaseId::BPlusX:
            return {-1.1, 1.0, {{0.5, 0.2, 0.2, 0.2}, {1.0, 0.8, 0.8, 0.8}, {4, 4, 4, 4}}};
        case ReductionCaseId::BMinusX:
            return {0.1, 2.0, {{0.5, 0.2, 0.2, 0.2}, {1.0, 0.8, 0.8, 0.8}, {4, 4, 4, 4}}};
        case ReductionCaseId::BPlusY:
            return {-0.8, 0.9, {{0.5, 0.2, 0.2, 0.2}, {1.0, 0.8, 0.8, 0.8}, {4, 4, 4, 4}}};
        case ReductionCaseId::BMinusY:
            return {0.1, 1.8, {{0.5, 0.2, 0.2, 0.2}, {1.0, 0.8, 0.8, 0.8}, {4, 4, 4, 4}}};
    }
    throw std::logic_error("bad case id");
}

}  // namespace

Report cmd_reduce(const ReduceOptions& opt, const RunOptions& run) {
    Report rep;
    rep.seed = run.seed;
    rep.tol = run.tol;
    ReductionCase c;
    c.id = case_id_from_name(opt.case_name);
    c.mu1 = opt.mu1;
    c.mu2 = opt.mu2;
    c.mu3 = opt.mu3;
    c.mu4 = opt.mu4;
    c.mu5 = opt.mu5;
    c.mu6 = opt.mu6;
    c.mu7 = opt.mu7;
    if (opt.alpha) c.alpha = parse_rational(*opt.alpha, "alpha");
    if (opt.beta) c.beta = parse_rational(*opt.beta, "beta");
    if (opt.A) c.A = parse(*opt.A);
    if (opt.B) c.B = parse(*opt.B);
    if (opt.C) c.C = parse(*opt.C);
    if (opt.V) c.V_t = parse(*opt.V);
    if (opt.V_free) c.V_free = simplify(parse(*opt.V_free));

    std::string base_id = "reduce/" + opt.case_name;
    std::string anchor = "reduction case " + opt.case_name;

    if (opt.closed_form) {
        if (c.id == ReductionCaseId::BPlusX || c.id == ReductionCaseId::BPlusY) {
            double prod = c.id == ReductionCaseId::BPlusX ? c.mu4 * c.mu5 : c.mu4 * c.mu6;
            c.V_free = simplify(Expr::real(prod) *
                                exp(Expr::integer(-2) * Expr::symbol("s")));
        } else if (c.id == ReductionCaseId::BMinusX || c.id == ReductionCaseId::BMinusY) {
            double prod = c.id == ReductionCaseId::BMinusX ? c.mu6 * c.mu7 : c.mu5 * c.mu7;
            c.V_free = simplify(Expr::real(prod) * exp(Expr::integer(2) * Expr::symbol("s")) -
                                Expr::real(c.mu3 * c.mu3));
        } else {
            throw FamilyError("--closed-form applies to the exponential B subfamilies");
        }
    }

    auto [ode, inv] = reduce_case(c);
    double stage = reduction_coefficient_check(c, ode, inv, 12, run.seed);
    if (stage < 1e-9) rep.pass(base_id + "/stage", anchor, "reduced-operator match", stage);
    else rep.fail(base_id + "/stage", anchor, "reduced-operator mismatch", stage);

    CaseDefaults defaults = case_defaults(c.id);
    double z0 = opt.z0.value_or(defaults.z0);
    double z1 = opt.z1.value_or(defaults.z1);

    SigmaFunction sigma;
    if (opt.closed_form) {
        Expr sig_expr;
        if (c.id == ReductionCaseId::BPlusX || c.id == ReductionCaseId::BPlusY) {
            sig_expr = std::abs(std::abs(c.mu3) - 1.0) < 1e-14
                           ? closed_form_sigma_degenerate(1.0, 0.5)
                           : closed_form_sigma(c.mu3, 1.0, 0.5);
        } else {
            sig_expr = closed_form_sigma_minus(1.0, 0.5);
        }
        // Direct substitution into the reduced equation.
        Expr d1 = differentiate(sig_expr, "s");
        Expr d2 = differentiate(d1, "s");
        Expr res = simplify(ode.c2 * d2 + ode.c1 * d1 + ode.c0 * sig_expr);
        Box sbox;
        sbox.set("s", z0, z1);
        double sub_res = max_abs_on_box(res, sbox, 20, sub_seed(run.seed, "closed-form"));
        if (sub_res < 1e-10)
            rep.pass(base_id + "/closed-form", anchor, "direct substitution", sub_res);
        else
            rep.fail(base_id + "/closed-form", anchor, "direct substitution", sub_res);
        sigma = sigma_from_expr(sig_expr, z0, z1);
    } else {
        sigma = sigma_from_ode(ode, z0, z1, 1.0, 0.3);
    }

    LiftedSolution lift(inv, sigma);
    auto grid = grid_points(defaults.grid);
    double res = verify_invariant_solution(inv.metric, inv.potential, lift.as_point_fn(),
                                           grid, opt.h);
    double res_half = verify_invariant_solution(inv.metric, inv.potential,
                                                lift.as_point_fn(), grid, opt.h / 2);
    bool ok = res < 1e-4 && res_half < std::max(res / 2.0, 1e-6);
    std::string desc = "lifted residual at h/2: " + format_float_17(res_half);
    if (ok) rep.pass(base_id + "/lift", anchor, desc, res);
    else rep.fail(base_id + "/lift", anchor, desc, res);
    return rep;
}

// ---------------------------------------------------------------------------
// residual
// ---------------------------------------------------------------------------

Report cmd_residual(const ResidualOptions& opt, const FamilyOptions& fam_opt,
                    const RunOptions& run) {
    Report rep;
    rep.seed = run.seed;
    rep.tol = run.tol;
    BianchiFamily fam = family_from_options(fam_opt);
    Expr V = simplify(parse(opt.V));
    Expr u = simplify(parse(opt.u));
    PointFn ufn = [&fam, u](const std::array<double, 4>& p) {
        Assignment a;
        for (int i = 0; i < 4; ++i) a[fam.metric.coords[i]] = p[i];
        return eval_at(u, a);
    };
    // 3^4 grid over the interior of the family's sampling domain.
    Grid grid;
    for (int i = 0; i < 4; ++i) {
        auto r = fam.metric.domain.ranges.at(fam.metric.coords[i]);
        double pad = 0.1 * (r.second - r.first);
        grid.lo[i] = r.first + pad;
        grid.hi[i] = r.second - pad;
        grid.count[i] = 3;
    }
    double res = verify_invariant_solution(fam.metric, V, ufn, grid_points(grid), opt.h);
    rep.pass("residual/" + std::string(family_name(fam.kind)), "field residual",
             "max |Delta u + V u| / max(|u|,1) over a 3^4 grid, h=" + format_float_17(opt.h),
             res);
    return rep;
}

// ---------------------------------------------------------------------------
// front end
// ---------------------------------------------------------------------------

int run_cli(int argc, char** argv) {
    CLI::App app{"Symmetry classification and reduction engine for the scalar field "
                 "equation on Bianchi I backgrounds"};
    app.require_subcommand(1);
    // Let --seed/--tol/--json appear after the subcommand as well.
    app.fallthrough();

    RunOptions run;
    app.add_option("--seed", run.seed, "run seed (all sampling derives from it)");
    app.add_option("--tol", run.tol, "zero-test tolerance");
    app.add_flag("--json", run.json, "emit the machine-readable report");

    FamilyOptions fam;
    auto add_family_flags = [&fam](CLI::App* cmd) {
        cmd->add_option("--family", fam.family,
                        "general | lrs | proper-ckv | conformally-flat-trig | "
                        "conformally-flat-hyp");
        cmd->add_option("--A", fam.A, "scale factor A(t)");
        cmd->add_option("--B", fam.B, "scale factor B(t)");
        cmd->add_option("--C", fam.C, "scale factor C(t)");
        cmd->add_option("--alpha", fam.alpha, "proper-ckv exponent (rational)");
        cmd->add_option("--beta", fam.beta, "proper-ckv exponent (rational)");
        cmd->add_option("--gamma", fam.gamma, "proper-ckv exponent (rational)");
        cmd->add_option("--U", fam.U, "proper-ckv profile U(t)");
        cmd->add_option("--intU", fam.intU, "closed-form primitive of U");
    };

    auto* coll = app.add_subcommand("collineations", "classify the family's vector catalog");
    coll->fallthrough();
    add_family_flags(coll);

    auto* verify = app.add_subcommand("verify-tables", "verify potential-table rows");
    verify->fallthrough();
    VerifyTablesOptions vopt;
    std::vector<int> tables;
    verify->add_option("--tables", tables, "table ids (subset of 1 2 3 5 6)")
        ->delimiter(',')
        ->required();
    int row_arg = -1;
    verify->add_option("--row", row_arg, "restrict to one row");
    verify->add_flag("--random-params", vopt.random_params,
                     "sample the combination parameters instead of the defaults");
    bool export_rows = false;
    verify->add_flag("--export", export_rows,
                     "emit the catalog rows themselves instead of running checks");
    add_family_flags(verify);

    auto* comm = app.add_subcommand("commutators", "commutator table of the symmetry basis");
    comm->fallthrough();
    add_family_flags(comm);

    auto* red = app.add_subcommand("reduce", "run a symmetry reduction case");
    red->fallthrough();
    ReduceOptions ropt;
    red->add_option("--case", ropt.case_name,
                    "a1 | a2 | b-plus-x | b-minus-x | b-plus-y | b-minus-y")
        ->required();
    std::vector<double> mu_list;
    red->add_option("--mu", mu_list, "mu1,mu2,mu3 for case a1")->delimiter(',');
    red->add_option("--mu1", ropt.mu1);
    red->add_option("--mu2", ropt.mu2);
    red->add_option("--mu3", ropt.mu3);
    red->add_option("--mu4", ropt.mu4);
    red->add_option("--mu5", ropt.mu5);
    red->add_option("--mu6", ropt.mu6);
    red->add_option("--mu7", ropt.mu7);
    red->add_option("--alpha", ropt.alpha, "case a2 exponent (rational)");
    red->add_option("--beta", ropt.beta, "case a2 exponent (rational)");
    red->add_option("--A", ropt.A, "case a1 scale factor");
    red->add_option("--B", ropt.B, "case a1 scale factor");
    red->add_option("--C", ropt.C, "case a1 scale factor");
    red->add_option("--V", ropt.V, "case a1 potential V(t)");
    red->add_option("--Vfree", ropt.V_free, "free-function instance V(s) / V'(s)");
    red->add_flag("--closed-form", ropt.closed_form,
                  "use the exponential-subfamily closed form");
    red->add_option("--z0", ropt.z0, "reduced-variable interval start");
    red->add_option("--z1", ropt.z1, "reduced-variable interval end");
    red->add_option("--fd-step", ropt.h, "finite-difference step");

    auto* resid = app.add_subcommand("residual", "finite-difference field residual");
    resid->fallthrough();
    ResidualOptions sopt;
    resid->add_option("--V", sopt.V, "potential V(t,x,y,z)");
    resid->add_option("--u", sopt.u, "field u(t,x,y,z)")->required();
    resid->add_option("--fd-step", sopt.h, "finite-difference step");
    add_family_flags(resid);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        Report rep;
        if (app.got_subcommand(coll)) {
            rep = cmd_collineations(fam, run);
        } else if (app.got_subcommand(verify)) {
            vopt.tables = tables;
            if (row_arg >= 0) vopt.row = row_arg;
            if (export_rows) {
                std::string listing = export_catalog_rows(tables, fam, run.json);
                std::cout << listing;
                if (run.json) std::cout << "\n";
                return 0;
            }
            rep = cmd_verify_tables(vopt, fam, run);
        } else if (app.got_subcommand(comm)) {
            rep = cmd_commutators(fam, run);
        } else if (app.got_subcommand(red)) {
            if (!mu_list.empty()) {
                if (mu_list.size() > 0) ropt.mu1 = mu_list[0];
                if (mu_list.size() > 1) ropt.mu2 = mu_list[1];
                if (mu_list.size() > 2) ropt.mu3 = mu_list[2];
            }
            rep = cmd_reduce(ropt, run);
        } else {
            rep = cmd_residual(sopt, fam, run);
        }
        std::cout << (run.json ? rep.to_json() + "\n" : rep.to_text());
        return rep.ok() ? 0 : 1;
    } catch (const ReductionGateError& e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace kgsym
