#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "momglm/errors.hpp"
#include "momglm/links.hpp"

namespace momglm {

/// Law of the scalar index: N(lambda, gamma2).
struct IndexLaw {
    double lambda = 0.0;
    double gamma2 = 0.0;
};

/// Joint law of a pair of indices: N2((lambda1, lambda2), [[gamma11, gamma12],
/// [gamma12, gamma22]]).
struct BivariateIndexLaw {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double gamma11 = 0.0;
    double gamma22 = 0.0;
    double gamma12 = 0.0;
};

inline constexpr double kQuadTol = 1e-10;
inline constexpr double kPsdTol = 1e-8;

namespace detail {

struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // weights for e^{-x^2}; they sum to sqrt(pi)
};

// Golub-Welsch on the Jacobi matrix of the (physicists') Hermite polynomials.
inline HermiteRule compute_hermite_rule(int n) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = std::sqrt(i / 2.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    HermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double sqrt_pi = std::sqrt(M_PI);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = sqrt_pi * v0 * v0;
    }
    return rule;
}

inline const std::array<HermiteRule, 4>& hermite_rules() {
    static const std::array<HermiteRule, 4> rules = {
        compute_hermite_rule(64),
        compute_hermite_rule(128),
        compute_hermite_rule(256),
        compute_hermite_rule(512),
    };
    return rules;
}

template <typename F>
double gauss_hermite_1d(const F& integrand, double lambda, double gamma2) {
    // E[g(Z)], Z ~ N(lambda, gamma2), via z = lambda + sqrt(2 gamma2) u.
    const double scale = std::sqrt(2.0 * gamma2);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    double previous = 0.0;
    bool have_previous = false;
    for (const auto& rule : hermite_rules()) {
        double sum = 0.0;
        const int n = static_cast<int>(rule.nodes.size());
        for (int i = 0; i < n; ++i) {
            sum += rule.weights[i] * integrand(lambda + scale * rule.nodes[i]);
        }
        const double estimate = sum * inv_sqrt_pi;
        if (!std::isfinite(estimate)) {
            raise(ErrorCode::NonFiniteIntegral,
                  "quadrature sum diverged; link grows too fast for the index law");
        }
        if (have_previous && std::abs(estimate - previous) < kQuadTol) {
            return estimate;
        }
        previous = estimate;
        have_previous = true;
    }
    return previous;  // 512-node cap reached
}

inline void check_law(const IndexLaw& law) {
    if (!std::isfinite(law.lambda) || !std::isfinite(law.gamma2) || law.gamma2 < 0.0) {
        raise(ErrorCode::InvalidIndexLaw, "index law requires finite lambda and gamma2 >= 0");
    }
}

}  // namespace detail

/// E[phi^(k)(Z)] with Z ~ N(law.lambda, law.gamma2), k in 0..3.
/// Degenerate variance returns phi^(k)(lambda) exactly.
inline double gaussian_link_moment(const LinkSpec& link, int k, const IndexLaw& law) {
    if (k < 0 || k > 3) {
        raise(ErrorCode::InvalidOrder, "moment order " + std::to_string(k) + " not in 0..3");
    }
    detail::check_law(law);
    if (law.gamma2 == 0.0) {
        const double v = link.deriv(k, law.lambda);
        if (!std::isfinite(v)) {
            raise(ErrorCode::NonFiniteIntegral, "link derivative not finite at lambda");
        }
        return v;
    }
    return detail::gauss_hermite_1d([&](double z) { return link.deriv(k, z); },
                                    law.lambda, law.gamma2);
}

/// Gradient of gaussian_link_moment in (lambda, gamma2). Gaussian integration
/// by parts gives d/dlambda = next moment order and d/dgamma2 = half the one
/// after, so only k in {0, 1} stays within the available derivatives.
inline std::pair<double, double> gaussian_link_moment_grad(const LinkSpec& link, int k,
                                                           const IndexLaw& law) {
    if (k < 0 || k > 1) {
        raise(ErrorCode::InvalidOrder,
              "gradient needs link derivatives up to order k+2; k must be 0 or 1");
    }
    const double dlambda = gaussian_link_moment(link, k + 1, law);
    const double dgamma2 = 0.5 * gaussian_link_moment(link, k + 2, law);
    return {dlambda, dgamma2};
}

namespace detail {

// Clamp small negative diagonal variances and clip gamma12 onto the PSD
// boundary when it overshoots by at most kPsdTol. Anything worse is an error.
inline BivariateIndexLaw project_psd(BivariateIndexLaw law) {
    if (!std::isfinite(law.lambda1) || !std::isfinite(law.lambda2) ||
        !std::isfinite(law.gamma11) || !std::isfinite(law.gamma22) ||
        !std::isfinite(law.gamma12)) {
        raise(ErrorCode::InvalidIndexLaw, "bivariate law has non-finite entries");
    }
    if (law.gamma11 < -kPsdTol || law.gamma22 < -kPsdTol) {
        raise(ErrorCode::NonPSDCovariance, "negative index variance beyond tolerance");
    }
    law.gamma11 = std::max(law.gamma11, 0.0);
    law.gamma22 = std::max(law.gamma22, 0.0);
    const double bound = law.gamma11 * law.gamma22;
    const double excess = law.gamma12 * law.gamma12 - bound;
    if (excess > kPsdTol) {
        raise(ErrorCode::NonPSDCovariance, "cross term exceeds PSD bound beyond tolerance");
    }
    if (excess > 0.0) {
        law.gamma12 = std::copysign(std::sqrt(bound), law.gamma12);
    }
    return law;
}

}  // namespace detail

/// E[link1(Z1) * link2(Z2)] under the bivariate normal law, via a tensor
/// Gauss-Hermite rule applied after factorizing the covariance as L L^T.
inline double bivariate_gaussian_moment(const LinkSpec& link1, const LinkSpec& link2,
                                        const BivariateIndexLaw& raw_law) {
    const BivariateIndexLaw law = detail::project_psd(raw_law);
    if (law.gamma11 == 0.0) {
        // Z1 degenerate at lambda1 (PSD forces gamma12 = 0 here).
        return link1.value(law.lambda1) *
               gaussian_link_moment(link2, 0, IndexLaw{law.lambda2, law.gamma22});
    }
    const double l11 = std::sqrt(law.gamma11);
    const double l21 = law.gamma12 / l11;
    const double residual = std::max(law.gamma22 - l21 * l21, 0.0);
    const double l22 = std::sqrt(residual);

    const double sqrt2 = std::sqrt(2.0);
    const double inv_pi = 1.0 / M_PI;
    double previous = 0.0;
    bool have_previous = false;
    for (const auto& rule : detail::hermite_rules()) {
        const int n = static_cast<int>(rule.nodes.size());
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double u = sqrt2 * rule.nodes[i];
            const double z1 = law.lambda1 + l11 * u;
            const double g1 = rule.weights[i] * link1.value(z1);
            double inner = 0.0;
            for (int j = 0; j < n; ++j) {
                const double v = sqrt2 * rule.nodes[j];
                const double z2 = law.lambda2 + l21 * u + l22 * v;
                inner += rule.weights[j] * link2.value(z2);
            }
            sum += g1 * inner;
        }
        const double estimate = sum * inv_pi;
        if (!std::isfinite(estimate)) {
            raise(ErrorCode::NonFiniteIntegral, "tensor quadrature sum diverged");
        }
        if (have_previous && std::abs(estimate - previous) < kQuadTol) {
            return estimate;
        }
        previous = estimate;
        have_previous = true;
    }
    return previous;
}

}  // namespace momglm
