#ifndef KGSYM_CLI_HPP
#define KGSYM_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kgsym/catalog.hpp"
#include "kgsym/reduction.hpp"
#include "kgsym/report.hpp"

namespace kgsym {

struct RunOptions {
    std::uint64_t seed = 42;
    double tol = 1e-9;
    bool json = false;
};

/// Family selection shared by the catalog-facing commands. Unset expression
/// fields fall back to per-family defaults.
struct FamilyOptions {
    std::string family = "general";
    std::optional<std::string> A, B, C;
    std::optional<std::string> alpha, beta, gamma;  // rationals, e.g. "1/2"
    std::optional<std::string> U, intU;
};

BianchiFamily family_from_options(const FamilyOptions& opt);

/// Classifies every catalog vector of the family against its declared class
/// and conformal factor.
Report cmd_collineations(const FamilyOptions& fam_opt, const RunOptions& run);

struct VerifyTablesOptions {
    std::vector<int> tables;           // subset of {1,2,3,5,6}
    std::optional<int> row;            // restrict to one row
    bool random_params = false;        // resample the combination parameters
};

/// Machine-readable catalog listing: one record per table row with fields
/// {table, row, template-text, symmetry labels, coefficients, noether}.
std::string export_catalog_rows(const std::vector<int>& tables,
                                const FamilyOptions& fam_opt, bool json);

/// Per row: constraint residual for two free-function instances (verbatim
/// readings run alongside and are flagged), the on-shell Lie condition, the
/// gauge-backed Noether identity, and the wave-mode classification.
Report cmd_verify_tables(const VerifyTablesOptions& opt, const FamilyOptions& fam_opt,
                         const RunOptions& run);

/// Commutator table of the family's symmetry basis, checked against the
/// catalog expectations where the catalog pins them.
Report cmd_commutators(const FamilyOptions& fam_opt, const RunOptions& run);

struct ReduceOptions {
    std::string case_name = "a1";  // a1 a2 b-plus-x b-minus-x b-plus-y b-minus-y
    std::optional<std::string> A, B, C, V;  // case A1 inputs
    std::optional<std::string> V_free;      // instance of the free function, in s
    double mu1 = 0, mu2 = 0, mu3 = 0, mu4 = 0, mu5 = 0, mu6 = 0, mu7 = 0;
    std::optional<std::string> alpha, beta;
    bool closed_form = false;
    std::optional<double> z0, z1;
    double h = 1e-3;
};

Report cmd_reduce(const ReduceOptions& opt, const RunOptions& run);

struct ResidualOptions {
    std::string V = "0";
    std::string u;
    double h = 1e-3;
};

/// Finite-difference Klein-Gordon residual of an explicit field u(t,x,y,z).
Report cmd_residual(const ResidualOptions& opt, const FamilyOptions& fam_opt,
                    const RunOptions& run);

/// Full command-line front end; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace kgsym

#endif
