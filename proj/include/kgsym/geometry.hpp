#ifndef KGSYM_GEOMETRY_HPP
#define KGSYM_GEOMETRY_HPP

#include <array>
#include <optional>
#include <string>

#include "kgsym/expr.hpp"

namespace kgsym {

/// 4D diagonal Lorentzian metric, signature (-,+,+,+). `components` are the
/// positive magnitude parts |g_ii|; the sign vector supplies the signature.
/// `domain` is the sampling box that avoids the metric's singular sets.
struct DiagonalMetric {
    std::array<std::string, 4> coords{"t", "x", "y", "z"};
    std::array<int, 4> signs{-1, 1, 1, 1};
    std::array<Expr, 4> components;
    Expr sqrt_det;  // positive on `domain`
    Box domain;

    Expr g(int i) const { return Expr::integer(signs[i]) * components[i]; }
    Expr ginv(int i) const { return Expr::integer(signs[i]) * pow(components[i], -1); }
};

/// Coordinate vector field xi^i(x); no dependence on the field variable.
struct VectorField {
    std::array<Expr, 4> comp{Expr::integer(0), Expr::integer(0), Expr::integer(0),
                             Expr::integer(0)};
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& c, const VectorField& v);

enum class CollineationTag { NotConformal, CKV, SpecialCKV, HV, KV };

const char* collineation_name(CollineationTag t);

/// Raised when the zero tests backing a classification cannot sample the
/// declared domain (e.g. the field drives evaluation into a singular set).
class ClassificationUndecidable : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct CollineationClass {
    CollineationTag tag = CollineationTag::NotConformal;
    std::optional<Expr> psi;        // absent for NotConformal
    double max_residual = 0.0;      // worst sampled |L_X g - 2 psi g|
};

using SymMatrix4 = std::array<std::array<Expr, 4>, 4>;

/// Levi-Civita connection coefficients of a diagonal metric.
struct Christoffel {
    // gamma[i][j][k] = Gamma^i_{jk}; symmetric in (j,k) by construction.
    std::array<std::array<std::array<Expr, 4>, 4>, 4> gamma;
};

Christoffel christoffel(const DiagonalMetric& m);

/// Laplace-Beltrami operator (the wave operator for Lorentzian signature):
/// (1/sqrt|g|) d_i ( sqrt|g| g^{ij} d_j f ), simplified.
Expr laplacian(const DiagonalMetric& m, const Expr& f);

/// (L_X g)_ij = X^k g_ij,k + g_kj X^k,_i + g_ik X^k,_j
SymMatrix4 lie_derivative_metric(const DiagonalMetric& m, const VectorField& X);

/// Trace-extracted conformal factor plus residual zero test. KV when psi == 0,
/// HV when psi is a nonzero constant, SpecialCKV when psi_{;ab} == 0 with psi
/// nonconstant, CKV otherwise; NotConformal when the residual does not vanish.
CollineationClass classify_collineation(const DiagonalMetric& m, const VectorField& X,
                                        const ZeroTestOptions& opt);

/// [X,Y]^i = X^j d_j Y^i - Y^j d_j X^i, simplified.
VectorField lie_bracket(const VectorField& X, const VectorField& Y);

/// Covariant divergence xi^k_{;k} = (1/sqrt|g|) d_k ( sqrt|g| xi^k ).
Expr covariant_divergence(const DiagonalMetric& m, const VectorField& X);

/// Covariant derivative of the metric (identically zero for the Levi-Civita
/// connection; exposed for the compatibility check).
Expr metric_covariant_derivative(const DiagonalMetric& m, const Christoffel& ch,
                                 int k, int i, int j);

/// Second covariant derivative of a scalar: psi_{;ab} = d_a d_b psi - Gamma^c_ab d_c psi.
Expr second_covariant_derivative(const DiagonalMetric& m, const Christoffel& ch,
                                 const Expr& psi, int a, int b);

}  // namespace kgsym

#endif
