#ifndef KGSYM_CATALOG_HPP
#define KGSYM_CATALOG_HPP

#include <optional>
#include <string>
#include <vector>

#include "kgsym/geometry.hpp"

namespace kgsym {

enum class FamilyKind {
    GeneralDiagonal,      // -dt^2 + A^2 dx^2 + B^2 dy^2 + C^2 dz^2
    ClassALrs,            // B = C, A != B: extra rotational isometry
    ProperCkv,            // scale factors built from U(t): admits a proper CKV
    ConformallyFlatTrig,  // -dt^2 + sin^2 t dx^2 + cos^2 t dy^2 + dz^2
    ConformallyFlatHyp,   // -dt^2 + sinh^2 t dx^2 + cosh^2 t dy^2 + dz^2
};

const char* family_name(FamilyKind k);

struct FamilySpec {
    FamilyKind kind = FamilyKind::GeneralDiagonal;
    std::optional<Expr> A, B, C;          // GeneralDiagonal / ClassALrs
    Rational alpha{0}, beta{0}, gamma{0}; // ProperCkv exponents
    std::optional<Expr> U;                // ProperCkv conformal profile
    std::optional<Expr> intU;             // closed-form primitive of U
    std::optional<std::pair<double, double>> t_range;  // sampling override
};

struct BianchiFamily {
    FamilyKind kind = FamilyKind::GeneralDiagonal;
    DiagonalMetric metric;
    Expr A, B, C;  // realized scale factors
    // ProperCkv data:
    Rational alpha{0}, beta{0}, gamma{0};
    Expr U, intU, Abar, Bbar, Cbar, psi5;
};

class FamilyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

BianchiFamily build_family(const FamilySpec& spec);

/// Point-symmetry shaped generator: xi^i d_i + u_coeff(x) u d_u.
struct PointGenerator {
    VectorField xi;
    Expr u_coeff = Expr::integer(0);
};

/// Jet-space bracket of two affine generators.
PointGenerator bracket(const PointGenerator& a, const PointGenerator& b);

struct CatalogVector {
    std::string label;
    VectorField xi;
    Expr declared_psi;
    CollineationTag declared_tag = CollineationTag::KV;
};

/// The vectors the classification attributes to each family: the three
/// translations always; the y-z rotation for LRS-type metrics; Y5 for the
/// ProperCkv family; the full 15-dimensional conformal algebra for the
/// trigonometric conformally flat metric.
std::vector<CatalogVector> catalog_vectors(const BianchiFamily& fam);

const CatalogVector& find_vector(const std::vector<CatalogVector>& vs,
                                 const std::string& label);

struct BracketExpansion {
    std::string left, right;
    bool in_span = false;
    std::vector<Rational> coeffs;
    double residual = 0.0;
};

struct CommutatorTable {
    std::vector<std::string> labels;
    std::vector<BracketExpansion> entries;  // upper triangle incl. diagonal, row-major
};

/// Expands every pairwise bracket of the family's symmetry basis over that
/// basis by sampling; brackets outside the span are reported as such.
CommutatorTable commutator_table(const BianchiFamily& fam, const ZeroTestOptions& opt);

/// Concrete smooth instances standing in for the arbitrary free functions of
/// the potential tables.
struct FreeFunctionInstance {
    std::string name;
    Expr (*body)(const std::vector<Expr>& args);
    Expr operator()(const std::vector<Expr>& args) const { return body(args); }
};

FreeFunctionInstance gaussian_instance();    // exp(-(s1^2+...+sk^2))
FreeFunctionInstance polynomial_instance();  // s1 + s1 s2 + s1 s2 s3 + ...

/// V = base + scale * F(args...). Exprs are in the chart coordinates with
/// all row parameters already substituted.
struct PotentialTemplate {
    Expr base = Expr::integer(0);
    Expr scale = Expr::integer(1);
    std::vector<Expr> args;
};

Expr realize_potential(const PotentialTemplate& tmpl, const FreeFunctionInstance& f);

struct TableRowParams {
    Rational a{1}, b{2}, c{3}, d{5};
};

struct PotentialTableEntry {
    int table = 0;
    int row = 0;
    std::string description;
    std::vector<std::pair<Rational, std::string>> combo;  // coefficient x vector label
    bool noether = true;
    bool trivial_u = false;  // the u d_u symmetry row (arbitrary potential)
    PotentialTemplate tmpl;
    std::optional<PotentialTemplate> verbatim;  // printed reading, when it differs
    std::string typo_note;
};

/// Full row set of one potential table, realized over `fam` with the given
/// combination parameters. Valid ids: 1 (general), 2 (LRS), 3 (ProperCkv),
/// 5 and 6 (conformally flat, trigonometric form).
std::vector<PotentialTableEntry> table_entries(int table_id, const BianchiFamily& fam,
                                               const TableRowParams& p);

std::vector<int> family_tables(FamilyKind k);

/// Combination generator of a table row: spacetime part, conformal factor of
/// the combination, and the u d_u coefficient (a0 for the trivial symmetry).
struct RowGenerator {
    VectorField xi;
    Expr psi = Expr::integer(0);
    Rational a0{0};
};

RowGenerator row_generator(const PotentialTableEntry& row, const BianchiFamily& fam);

/// L''' + (3 L' - alpha - beta - gamma) L'' / L for L = L(t); the condition
/// for the proper-CKV conformal factor to solve the background wave equation.
Expr bkg05_residual(const Expr& L, const Rational& alpha, const Rational& beta,
                    const Rational& gamma);

}  // namespace kgsym

#endif
