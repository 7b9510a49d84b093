#include "kgsym/geometry.hpp"

#include "kgsym/rng.hpp"

namespace kgsym {

VectorField operator+(const VectorField& a, const VectorField& b) {
    VectorField out;
    for (int i = 0; i < 4; ++i) out.comp[i] = a.comp[i] + b.comp[i];
    return out;
}

VectorField operator*(const Expr& c, const VectorField& v) {
    VectorField out;
    for (int i = 0; i < 4; ++i) out.comp[i] = c * v.comp[i];
    return out;
}

const char* collineation_name(CollineationTag t) {
    switch (t) {
        case CollineationTag::NotConformal: return "not-conformal";
        case CollineationTag::CKV: return "CKV";
        case CollineationTag::SpecialCKV: return "special-CKV";
        case CollineationTag::HV: return "HV";
        case CollineationTag::KV: return "KV";
    }
    return "?";
}

Christoffel christoffel(const DiagonalMetric& m) {
    Christoffel ch;
    std::array<Expr, 4> g, ginv;
    for (int i = 0; i < 4; ++i) {
        g[i] = m.g(i);
        ginv[i] = m.ginv(i);
    }
    // Gamma^i_{jk} = (1/2) g^{ii} ( d_j g_ik + d_k g_ij - d_i g_jk ), diagonal g.
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            for (int k = j; k < 4; ++k) {
                Expr term = Expr::integer(0);
                if (k == i) term = term + differentiate(g[i], m.coords[j]);
                if (j == i) term = term + differentiate(g[i], m.coords[k]);
                if (j == k) term = term - differentiate(g[j], m.coords[i]);
                Expr v = Expr::rational(1, 2) * ginv[i] * term;
                ch.gamma[i][j][k] = v;
                ch.gamma[i][k][j] = v;
            }
        }
    }
    return ch;
}

Expr laplacian(const DiagonalMetric& m, const Expr& f) {
    Expr acc = Expr::integer(0);
    for (int i = 0; i < 4; ++i) {
        Expr flux = m.sqrt_det * m.ginv(i) * differentiate(f, m.coords[i]);
        acc = acc + differentiate(flux, m.coords[i]);
    }
    return simplify(acc / m.sqrt_det);
}

SymMatrix4 lie_derivative_metric(const DiagonalMetric& m, const VectorField& X) {
    SymMatrix4 L;
    for (int i = 0; i < 4; ++i) {
        for (int j = i; j < 4; ++j) {
            Expr v = Expr::integer(0);
            if (i == j) {
                for (int k = 0; k < 4; ++k)
                    v = v + X.comp[k] * differentiate(m.g(i), m.coords[k]);
            }
            v = v + m.g(j) * differentiate(X.comp[j], m.coords[i]);
            v = v + m.g(i) * differentiate(X.comp[i], m.coords[j]);
            L[i][j] = v;
            L[j][i] = v;
        }
    }
    return L;
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    static const std::array<std::string, 4> coords{"t", "x", "y", "z"};
    VectorField out;
    for (int i = 0; i < 4; ++i) {
        Expr v = Expr::integer(0);
        for (int j = 0; j < 4; ++j) {
            v = v + X.comp[j] * differentiate(Y.comp[i], coords[j]);
            v = v - Y.comp[j] * differentiate(X.comp[i], coords[j]);
        }
        out.comp[i] = v;
    }
    return out;
}

Expr covariant_divergence(const DiagonalMetric& m, const VectorField& X) {
    Expr acc = Expr::integer(0);
    for (int k = 0; k < 4; ++k)
        acc = acc + differentiate(m.sqrt_det * X.comp[k], m.coords[k]);
    return simplify(acc / m.sqrt_det);
}

Expr metric_covariant_derivative(const DiagonalMetric& m, const Christoffel& ch,
                                 int k, int i, int j) {
    Expr v = Expr::integer(0);
    if (i == j) v = differentiate(m.g(i), m.coords[k]);
    v = v - ch.gamma[j][k][i] * m.g(j);
    v = v - ch.gamma[i][k][j] * m.g(i);
    return simplify(v);
}

Expr second_covariant_derivative(const DiagonalMetric& m, const Christoffel& ch,
                                 const Expr& psi, int a, int b) {
    Expr v = differentiate(differentiate(psi, m.coords[a]), m.coords[b]);
    for (int c = 0; c < 4; ++c)
        v = v - ch.gamma[c][a][b] * differentiate(psi, m.coords[c]);
    return simplify(v);
}

namespace {

CollineationClass classify_collineation_impl(const DiagonalMetric& m, const VectorField& X,
                                             const ZeroTestOptions& opt) {
    SymMatrix4 L = lie_derivative_metric(m, X);
    Expr psi = Expr::integer(0);
    for (int i = 0; i < 4; ++i) psi = psi + m.ginv(i) * L[i][i];
    psi = simplify(Expr::rational(1, 8) * psi);

    CollineationClass out;
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i; j < 4; ++j) {
            // Off-diagonal metric entries vanish, so the residual there is L itself.
            Expr res = (i == j) ? simplify(L[i][i] - Expr::integer(2) * psi * m.g(i))
                                : L[i][j];
            double r = max_abs_on_box(res, m.domain, opt.samples,
                                      sub_seed(opt.seed, "ckv-residual"));
            if (r > worst) worst = r;
        }
    }
    out.max_residual = worst;
    if (worst >= opt.tol) {
        out.tag = CollineationTag::NotConformal;
        return out;
    }
    out.psi = psi;

    bool psi_zero = psi.is_zero() ||
                    is_zero_probabilistic(psi, m.domain, opt.samples, opt.tol,
                                          sub_seed(opt.seed, "psi-zero"));
    if (psi_zero) {
        out.tag = CollineationTag::KV;
        out.psi = Expr::integer(0);
        return out;
    }

    bool psi_const = true;
    for (int i = 0; i < 4; ++i) {
        Expr d = differentiate(psi, m.coords[i]);
        if (d.is_zero()) continue;
        if (!is_zero_probabilistic(d, m.domain, opt.samples, opt.tol,
                                   sub_seed(opt.seed, "psi-const"))) {
            psi_const = false;
            break;
        }
    }
    if (psi_const) {
        out.tag = CollineationTag::HV;
        return out;
    }

    Christoffel ch = christoffel(m);
    bool special = true;
    for (int a = 0; a < 4 && special; ++a) {
        for (int b = a; b < 4 && special; ++b) {
            Expr dd = second_covariant_derivative(m, ch, psi, a, b);
            if (!is_zero_probabilistic(dd, m.domain, opt.samples, opt.tol,
                                       sub_seed(opt.seed, "psi-second-cov")))
                special = false;
        }
    }
    out.tag = special ? CollineationTag::SpecialCKV : CollineationTag::CKV;
    return out;
}

}  // namespace

CollineationClass classify_collineation(const DiagonalMetric& m, const VectorField& X,
                                        const ZeroTestOptions& opt) {
    try {
        return classify_collineation_impl(m, X, opt);
    } catch (const EvalError& e) {
        throw ClassificationUndecidable(std::string("zero test could not sample the "
                                                    "metric domain: ") +
                                        e.what());
    }
}

}  // namespace kgsym
