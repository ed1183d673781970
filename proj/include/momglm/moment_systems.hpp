#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "momglm/gauss_moments.hpp"
#include "momglm/links.hpp"
#include "momglm/ustat.hpp"

namespace momglm {

struct SolveOptions {
    double tol_solve = 1e-10;
    int max_iter = 100;
    double lambda_lo = -6.0;
    double lambda_hi = 6.0;
    double gamma2_lo = 1e-8;
    double gamma2_hi = 25.0;
    double backtrack_factor = 0.5;
};

struct SolveReport {
    std::map<std::string, double> solution;
    double residual_norm = 0.0;
    int iterations = 0;
    bool projected = false;
    double jacobian_condition = 1.0;
};

/// Quadratic-form component of the zero-mean system: m = f1(0, g)^2 * g.
inline double glm0_forward(const LinkSpec& link, double gamma2) {
    const double f1 = gaussian_link_moment(link, 1, IndexLaw{0.0, gamma2});
    return f1 * f1 * gamma2;
}

/// Two-component index map: (f0(law), f1(law)^2 * gamma2).
inline std::pair<double, double> glm_forward(const LinkSpec& link, const IndexLaw& law) {
    const double f0 = gaussian_link_moment(link, 0, law);
    const double f1 = gaussian_link_moment(link, 1, law);
    return {f0, f1 * f1 * law.gamma2};
}

/// Analytic Jacobian of glm_forward, rows = components, columns = (lambda,
/// gamma2). Entries follow from the Gaussian integration-by-parts chain.
inline Eigen::Matrix2d glm_forward_jacobian(const LinkSpec& link, const IndexLaw& law) {
    const double f1 = gaussian_link_moment(link, 1, law);
    const double f2 = gaussian_link_moment(link, 2, law);
    const double f3 = gaussian_link_moment(link, 3, law);
    Eigen::Matrix2d j;
    j(0, 0) = f1;
    j(0, 1) = 0.5 * f2;
    j(1, 0) = 2.0 * law.gamma2 * f1 * f2;
    j(1, 1) = f1 * (f1 + law.gamma2 * f3);
    return j;
}

namespace detail {

inline double condition_number_2x2(const Eigen::Matrix2d& m) {
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(m);
    const double smin = svd.singularValues()(1);
    const double smax = svd.singularValues()(0);
    if (smin <= 0.0) return 1e300;
    return smax / smin;
}

}  // namespace detail

/// Inverts glm0_forward over the gamma2 bounds. Out-of-range inputs clamp to
/// the nearer range endpoint and set `projected`.
inline SolveReport glm0_invert(const LinkSpec& link, double m_xy2, const SolveOptions& opts = {}) {
    if (!std::isfinite(m_xy2)) {
        raise(ErrorCode::InvalidIndexLaw, "moment input is not finite");
    }
    const double lo = opts.gamma2_lo;
    const double hi = opts.gamma2_hi;

    // Strict-monotonicity probe at the solver's resolution.
    constexpr int kProbePoints = 33;
    double prev = glm0_forward(link, lo);
    const double f_lo = prev;
    double f_hi = prev;
    for (int i = 1; i < kProbePoints; ++i) {
        const double g = lo + (hi - lo) * i / (kProbePoints - 1);
        const double val = glm0_forward(link, g);
        if (val - prev <= -opts.tol_solve) {
            raise(ErrorCode::NonMonotoneMap, "forward map not strictly monotone on gamma2 bounds");
        }
        prev = val;
        if (i == kProbePoints - 1) f_hi = val;
    }
    if (f_hi - f_lo <= opts.tol_solve) {
        raise(ErrorCode::NonMonotoneMap, "forward map is flat on gamma2 bounds");
    }

    SolveReport report;
    double target = m_xy2;
    if (target < f_lo) {
        target = f_lo;
        report.projected = true;
    } else if (target > f_hi) {
        target = f_hi;
        report.projected = true;
    }

    double a = lo, b = hi;
    double g = report.projected ? (m_xy2 < f_lo ? lo : hi) : 0.5 * (lo + hi);
    double residual = glm0_forward(link, g) - target;
    int iter = 0;
    double deriv = 1.0;
    while (std::abs(residual) > opts.tol_solve && iter < opts.max_iter) {
        ++iter;
        if (residual > 0.0) {
            b = g;
        } else {
            a = g;
        }
        const IndexLaw law{0.0, g};
        const double f1 = gaussian_link_moment(link, 1, law);
        const double f3 = gaussian_link_moment(link, 3, law);
        deriv = f1 * (f1 + g * f3);
        double next = g - residual / deriv;
        if (!(next > a && next < b) || !std::isfinite(next)) {
            next = 0.5 * (a + b);  // bisection fallback keeps the bracket
        }
        g = next;
        residual = glm0_forward(link, g) - target;
    }
    report.solution["gamma2"] = g;
    report.residual_norm = std::abs(residual);
    report.iterations = iter;
    report.jacobian_condition = std::abs(deriv) > 0.0 ? 1.0 / std::abs(deriv) : 1e300;
    return report;
}

namespace detail {

inline double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

inline bool at_bounds(double lambda, double gamma2, const SolveOptions& opts) {
    const double lam_eps = 1e-9 * (opts.lambda_hi - opts.lambda_lo);
    const double gam_eps = 1e-9 * (opts.gamma2_hi - opts.gamma2_lo);
    return lambda <= opts.lambda_lo + lam_eps || lambda >= opts.lambda_hi - lam_eps ||
           gamma2 <= opts.gamma2_lo + gam_eps || gamma2 >= opts.gamma2_hi - gam_eps;
}

// Monotone 1-D solve of f0(lambda, gamma2) = m over the lambda bounds, used
// as the Newton warm start.
inline double start_lambda(const LinkSpec& link, double m, double gamma2,
                           const SolveOptions& opts) {
    double a = opts.lambda_lo, b = opts.lambda_hi;
    double fa = gaussian_link_moment(link, 0, IndexLaw{a, gamma2});
    double fb = gaussian_link_moment(link, 0, IndexLaw{b, gamma2});
    const bool increasing = fb >= fa;
    if (!increasing) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    if (m <= fa) return a;
    if (m >= fb) return b;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (a + b);
        const double fm = gaussian_link_moment(link, 0, IndexLaw{mid, gamma2});
        if (fm < m) {
            a = mid;
        } else {
            b = mid;
        }
        if (std::abs(b - a) < 1e-12) break;
    }
    return 0.5 * (a + b);
}

struct NewtonOutcome {
    double lambda = 0.0;
    double gamma2 = 1.0;
    double norm = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool stalled = false;
};

inline Eigen::Vector2d glm_residual(const LinkSpec& link, double lambda, double gamma2,
                                    double m1, double m2) {
    const auto [c1, c2] = glm_forward(link, IndexLaw{lambda, gamma2});
    return Eigen::Vector2d(c1 - m1, c2 - m2);
}

inline NewtonOutcome newton_from(const LinkSpec& link, double m1, double m2, double lambda,
                                 double gamma2, const SolveOptions& opts) {
    NewtonOutcome out;
    out.lambda = clamp(lambda, opts.lambda_lo, opts.lambda_hi);
    out.gamma2 = clamp(gamma2, opts.gamma2_lo, opts.gamma2_hi);
    Eigen::Vector2d r = glm_residual(link, out.lambda, out.gamma2, m1, m2);
    out.norm = r.norm();
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if (out.norm <= opts.tol_solve) break;
        const Eigen::Matrix2d j =
            glm_forward_jacobian(link, IndexLaw{out.lambda, out.gamma2});
        const double det = j.determinant();
        if (std::abs(det) < 1e-14) {
            raise(ErrorCode::SingularJacobian,
                  "forward-map Jacobian determinant below 1e-14 at the iterate");
        }
        const Eigen::Vector2d step = j.inverse() * (-r);
        double t = 1.0;
        bool improved = false;
        double new_lambda = out.lambda, new_gamma2 = out.gamma2, new_norm = out.norm;
        while (t > 1e-12) {
            const double cl = clamp(out.lambda + t * step(0), opts.lambda_lo, opts.lambda_hi);
            const double cg = clamp(out.gamma2 + t * step(1), opts.gamma2_lo, opts.gamma2_hi);
            const Eigen::Vector2d rc = glm_residual(link, cl, cg, m1, m2);
            if (rc.norm() < out.norm) {
                new_lambda = cl;
                new_gamma2 = cg;
                new_norm = rc.norm();
                improved = true;
                break;
            }
            t *= opts.backtrack_factor;
        }
        out.iterations = iter + 1;
        if (!improved) {
            out.stalled = true;
            break;
        }
        out.lambda = new_lambda;
        out.gamma2 = new_gamma2;
        out.norm = new_norm;
        r = glm_residual(link, out.lambda, out.gamma2, m1, m2);
        out.norm = r.norm();
    }
    return out;
}

}  // namespace detail

/// Damped-Newton inversion of glm_forward with the analytic Jacobian and a
/// coarse multi-start grid as fallback. Clamps at the domain boundary and
/// flags `projected` when the residual tolerance cannot be met there.
inline SolveReport glm_invert(const LinkSpec& link, double m1, double m2,
                              const SolveOptions& opts = {}) {
    if (!std::isfinite(m1) || !std::isfinite(m2)) {
        raise(ErrorCode::InvalidIndexLaw, "moment inputs are not finite");
    }
    const double gamma2_start = detail::clamp(1.0, opts.gamma2_lo, opts.gamma2_hi);
    detail::NewtonOutcome best =
        detail::newton_from(link, m1, m2, detail::start_lambda(link, m1, gamma2_start, opts),
                            gamma2_start, opts);
    int total_iterations = best.iterations;
    if (best.norm > opts.tol_solve) {
        constexpr int kGrid = 8;
        for (int a = 0; a < kGrid && best.norm > opts.tol_solve; ++a) {
            for (int b = 0; b < kGrid && best.norm > opts.tol_solve; ++b) {
                const double lam =
                    opts.lambda_lo + (opts.lambda_hi - opts.lambda_lo) * (a + 0.5) / kGrid;
                const double gam =
                    opts.gamma2_lo + (opts.gamma2_hi - opts.gamma2_lo) * (b + 0.5) / kGrid;
                const auto out = detail::newton_from(link, m1, m2, lam, gam, opts);
                total_iterations += out.iterations;
                if (out.norm < best.norm) best = out;
            }
        }
    }

    SolveReport report;
    report.solution["lambda"] = best.lambda;
    report.solution["gamma2"] = best.gamma2;
    report.residual_norm = best.norm;
    report.iterations = total_iterations;
    report.jacobian_condition = detail::condition_number_2x2(
        glm_forward_jacobian(link, IndexLaw{best.lambda, best.gamma2}));
    if (best.norm <= opts.tol_solve) {
        report.projected = false;
        return report;
    }
    if (detail::at_bounds(best.lambda, best.gamma2, opts)) {
        report.projected = true;
        return report;
    }
    raise(ErrorCode::NoConvergence,
          "index-system inversion failed to reach tolerance from all starts");
}

/// Reduces the four mean-level moments to the two-component index map inputs:
/// (m_Y, m_XY2 + m_Y^2 m_X2 - 2 m_Y m_XY_X).
inline std::pair<double, double> reduce_glm_moments(const MomentSet& ms) {
    const double m_y = ms.get("m_Y");
    const double m_x2 = ms.get("m_X2");
    const double m_xy_x = ms.get("m_XY_X");
    const double m_xy2 = ms.get("m_XY2");
    return {m_y, m_xy2 + m_y * m_y * m_x2 - 2.0 * m_y * m_xy_x};
}

namespace detail {

// Shared stage (i) of the staged solvers: invert the index system for the
// binary/auxiliary response from its four moments, with A in place of Y.
inline SolveReport invert_index_stage(const LinkSpec& link, double m_mean, double m_x2,
                                      double m_cross, double m_quad, const SolveOptions& opts) {
    const double m2 = m_quad + m_mean * m_mean * m_x2 - 2.0 * m_mean * m_cross;
    return glm_invert(link, m_mean, m2, opts);
}

}  // namespace detail

/// Staged solve of the treatment-effect chain: nonlinear propensity-index
/// stage, then a linear solve for (psi, lambda_beta, gamma_alpha_beta,
/// lambda_beta_1).
inline SolveReport solve_ce(const MomentSet& ms, const LinkSpec& link,
                            const SolveOptions& opts = {}) {
    const double m_a = ms.get("m_A");
    const double m_y = ms.get("m_Y");
    const double m_ay = ms.get("m_AY");
    const double m_x2 = ms.get("m_X2");
    const double m_xa_x = ms.get("m_XA_X");
    const double m_xa2 = ms.get("m_XA2");
    const double m_xa_xy = ms.get("m_XA_XY");
    const double m_xay_xa = ms.get("m_XAY_XA");

    SolveReport stage1 = detail::invert_index_stage(link, m_a, m_x2, m_xa_x, m_xa2, opts);
    const IndexLaw law{stage1.solution.at("lambda"), stage1.solution.at("gamma2")};
    const double f1 = gaussian_link_moment(link, 1, law);
    const double f2 = gaussian_link_moment(link, 2, law);
    if (std::abs(f1) < 1e-12) {
        raise(ErrorCode::SingularLinearStage, "propensity derivative moment vanishes");
    }
    const double lambda_alpha_1 = (m_xa2 - m_a * m_xa_x) / f1;

    // Linear stage in (psi, lambda_beta, gamma_alpha_beta, lambda_beta_1).
    Eigen::Matrix4d sys;
    Eigen::Vector4d rhs;
    sys << m_a, 1.0, 0.0, 0.0,
        m_a, m_a, f1, 0.0,
        m_xa2, m_xa_x, 0.0, 1.0,
        m_xa2, m_a * m_xa_x + f1 * lambda_alpha_1, f1 * m_xa_x + f2 * lambda_alpha_1, m_a;
    rhs << m_y, m_ay, m_xa_xy, m_xay_xa;

    Eigen::JacobiSVD<Eigen::Matrix4d> svd(sys, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smin = svd.singularValues()(3);
    const double smax = svd.singularValues()(0);
    const double cond = smin > 0.0 ? smax / smin : 1e300;
    if (cond > 1e12) {
        raise(ErrorCode::SingularLinearStage,
              "linear stage condition number exceeds 1e12");
    }
    const Eigen::Vector4d sol = svd.solve(rhs);

    SolveReport report;
    report.solution["psi"] = sol(0);
    report.solution["lambda_alpha"] = law.lambda;
    report.solution["gamma2_alpha"] = law.gamma2;
    report.solution["lambda_beta"] = sol(1);
    report.solution["gamma_alpha_beta"] = sol(2);
    report.solution["lambda_alpha_1"] = lambda_alpha_1;
    report.solution["lambda_beta_1"] = sol(3);
    report.residual_norm = std::max(stage1.residual_norm, (sys * sol - rhs).cwiseAbs().maxCoeff());
    report.iterations = stage1.iterations;
    report.projected = stage1.projected;
    report.jacobian_condition = std::max(stage1.jacobian_condition, cond);
    return report;
}

/// Staged solve of the missing-data chain: propensity-index stage, then a
/// 2x2 linear solve for (psi, gamma_alpha_beta).
inline SolveReport solve_mar(const MomentSet& ms, const LinkSpec& link,
                             const SolveOptions& opts = {}) {
    const double m_a = ms.get("m_A");
    const double m_x2 = ms.get("m_X2");
    const double m_xa_x = ms.get("m_XA_X");
    const double m_xa2 = ms.get("m_XA2");
    const double m_ay = ms.get("m_AY");
    const double m_xay_x = ms.get("m_XAY_X");

    SolveReport stage1 = detail::invert_index_stage(link, m_a, m_x2, m_xa_x, m_xa2, opts);
    const IndexLaw law{stage1.solution.at("lambda"), stage1.solution.at("gamma2")};
    const double f1 = gaussian_link_moment(link, 1, law);
    const double f2 = gaussian_link_moment(link, 2, law);

    Eigen::Matrix2d sys;
    sys << m_a, f1,
        m_a + m_xa_x, m_x2 * f1 + f2 * law.lambda;
    const double det = sys.determinant();
    const double scale = sys.cwiseAbs().maxCoeff();
    if (std::abs(det) < 1e-12 * std::max(scale * scale, 1e-300)) {
        raise(ErrorCode::SingularLinearStage, "2x2 linear stage nearly singular");
    }
    const Eigen::Vector2d sol = sys.inverse() * Eigen::Vector2d(m_ay, m_xay_x);

    SolveReport report;
    report.solution["psi"] = sol(0);
    report.solution["lambda_alpha"] = law.lambda;
    report.solution["gamma2_alpha"] = law.gamma2;
    report.solution["gamma_alpha_beta"] = sol(1);
    report.residual_norm =
        std::max(stage1.residual_norm,
                 (sys * sol - Eigen::Vector2d(m_ay, m_xay_x)).cwiseAbs().maxCoeff());
    report.iterations = stage1.iterations;
    report.projected = stage1.projected;
    report.jacobian_condition =
        std::max(stage1.jacobian_condition, detail::condition_number_2x2(sys));
    return report;
}

/// Staged solve of the conditional-covariance chain: two independent index
/// inversions, a linear extraction of the cross term, then the bivariate
/// plug-in for the target.
inline SolveReport solve_gcm(const MomentSet& ms, const LinkSpec& link_a, const LinkSpec& link_y,
                             const SolveOptions& opts = {}) {
    const double m_a = ms.get("m_A");
    const double m_y = ms.get("m_Y");
    const double m_x2 = ms.get("m_X2");
    const double m_xa_x = ms.get("m_XA_X");
    const double m_xy_x = ms.get("m_XY_X");
    const double m_xa2 = ms.get("m_XA2");
    const double m_xy2 = ms.get("m_XY2");
    const double m_xa_xy = ms.get("m_XA_XY");

    SolveReport stage_a = detail::invert_index_stage(link_a, m_a, m_x2, m_xa_x, m_xa2, opts);
    SolveReport stage_y = detail::invert_index_stage(link_y, m_y, m_x2, m_xy_x, m_xy2, opts);
    const IndexLaw law_a{stage_a.solution.at("lambda"), stage_a.solution.at("gamma2")};
    const IndexLaw law_y{stage_y.solution.at("lambda"), stage_y.solution.at("gamma2")};
    const double g1 = gaussian_link_moment(link_a, 1, law_a);
    const double f1 = gaussian_link_moment(link_y, 1, law_y);
    if (std::abs(g1 * f1) < 1e-12) {
        raise(ErrorCode::DegenerateG1, "cross-term extraction divides by g1*f1 below 1e-12");
    }
    const double gamma_alpha_beta =
        (m_xa_xy - m_a * m_y * m_x2 - m_a * f1 * law_y.lambda - m_y * g1 * law_a.lambda) /
        (g1 * f1);

    BivariateIndexLaw pair_law;
    pair_law.lambda1 = law_a.lambda;
    pair_law.lambda2 = law_y.lambda;
    pair_law.gamma11 = law_a.gamma2;
    pair_law.gamma22 = law_y.gamma2;
    pair_law.gamma12 = gamma_alpha_beta;
    const double psi = bivariate_gaussian_moment(link_a, link_y, pair_law);

    SolveReport report;
    report.solution["psi"] = psi;
    report.solution["lambda_alpha"] = law_a.lambda;
    report.solution["gamma2_alpha"] = law_a.gamma2;
    report.solution["lambda_beta"] = law_y.lambda;
    report.solution["gamma2_beta"] = law_y.gamma2;
    report.solution["gamma_alpha_beta"] = gamma_alpha_beta;
    report.residual_norm = std::max(stage_a.residual_norm, stage_y.residual_norm);
    report.iterations = stage_a.iterations + stage_y.iterations;
    report.projected = stage_a.projected || stage_y.projected;
    report.jacobian_condition =
        std::max(stage_a.jacobian_condition, stage_y.jacobian_condition);
    return report;
}

// ---------------------------------------------------------------------------
// Forward synthesis of population moment sets from parameters. These are the
// exact right-hand sides of the moment chains; tests and the sampling oracle
// use them to produce consistent inputs and reference values.

/// Mean-level chain for a single outcome: m_Y, m_X2, m_XY_X, m_XY2.
inline MomentSet forward_glm_moments(const LinkSpec& link, const IndexLaw& law, double m_x2) {
    const double f0 = gaussian_link_moment(link, 0, law);
    const double f1 = gaussian_link_moment(link, 1, law);
    MomentSet ms;
    ms.set("m_Y", f0, 1);
    ms.set("m_X2", m_x2, 2);
    ms.set("m_XY_X", f0 * m_x2 + f1 * law.lambda, 2);
    ms.set("m_XY2", f0 * f0 * m_x2 + f1 * f1 * law.gamma2 + 2.0 * f0 * f1 * law.lambda, 2);
    return ms;
}

struct CeParams {
    double psi = 0.0;
    double lambda_alpha = 0.0;
    double gamma2_alpha = 1.0;
    double lambda_beta = 0.0;
    double gamma_alpha_beta = 0.0;
};

struct CeForward {
    MomentSet moments;
    double lambda_alpha_1 = 0.0;
    double lambda_beta_1 = 0.0;
};

inline CeForward forward_ce_moments(const LinkSpec& link, const CeParams& p, double m_x2) {
    const IndexLaw law{p.lambda_alpha, p.gamma2_alpha};
    const double f0 = gaussian_link_moment(link, 0, law);
    const double f1 = gaussian_link_moment(link, 1, law);
    const double f2 = gaussian_link_moment(link, 2, law);
    CeForward out;
    const double m_a = f0;
    const double lambda_alpha_1 = m_a * p.lambda_alpha + f1 * p.gamma2_alpha;
    const double lambda_beta_1 = m_a * p.lambda_beta + f1 * p.gamma_alpha_beta;
    const double m_xa_x = m_a * m_x2 + f1 * p.lambda_alpha;
    const double m_xa2 = m_a * m_xa_x + f1 * lambda_alpha_1;
    out.moments.set("m_A", m_a, 1);
    out.moments.set("m_Y", p.psi * m_a + p.lambda_beta, 1);
    out.moments.set("m_AY", (p.psi + p.lambda_beta) * m_a + p.gamma_alpha_beta * f1, 1);
    out.moments.set("m_X2", m_x2, 2);
    out.moments.set("m_XA_X", m_xa_x, 2);
    out.moments.set("m_XA2", m_xa2, 2);
    out.moments.set("m_XA_XY", p.psi * m_xa2 + lambda_beta_1 + p.lambda_beta * m_xa_x, 2);
    out.moments.set("m_XAY_XA",
                    p.psi * m_xa2 + m_a * lambda_beta_1 + p.lambda_beta * m_a * m_xa_x +
                        f1 * (p.lambda_beta * lambda_alpha_1 + p.gamma_alpha_beta * m_xa_x) +
                        f2 * p.gamma_alpha_beta * lambda_alpha_1,
                    2);
    out.lambda_alpha_1 = lambda_alpha_1;
    out.lambda_beta_1 = lambda_beta_1;
    return out;
}

struct MarParams {
    double psi = 0.0;
    double lambda_alpha = 0.0;
    double gamma2_alpha = 1.0;
    double gamma_alpha_beta = 0.0;
};

inline MomentSet forward_mar_moments(const LinkSpec& link, const MarParams& p, double m_x2) {
    const IndexLaw law{p.lambda_alpha, p.gamma2_alpha};
    const double g0 = gaussian_link_moment(link, 0, law);
    const double g1 = gaussian_link_moment(link, 1, law);
    const double g2 = gaussian_link_moment(link, 2, law);
    const double m_xa_x = g0 * m_x2 + g1 * p.lambda_alpha;
    MomentSet ms;
    ms.set("m_A", g0, 1);
    ms.set("m_X2", m_x2, 2);
    ms.set("m_XA_X", m_xa_x, 2);
    ms.set("m_XA2",
           g0 * g0 * m_x2 + g1 * g1 * p.gamma2_alpha + 2.0 * g0 * g1 * p.lambda_alpha, 2);
    ms.set("m_AY", g0 * p.psi + g1 * p.gamma_alpha_beta, 1);
    ms.set("m_XAY_X",
           (g0 + m_xa_x) * p.psi + (m_x2 * g1 + g2 * p.lambda_alpha) * p.gamma_alpha_beta, 2);
    return ms;
}

struct GcmParams {
    double lambda_alpha = 0.0;
    double gamma2_alpha = 1.0;
    double lambda_beta = 0.0;
    double gamma2_beta = 1.0;
    double gamma_alpha_beta = 0.0;
};

inline MomentSet forward_gcm_moments(const LinkSpec& link_a, const LinkSpec& link_y,
                                     const GcmParams& p, double m_x2) {
    const IndexLaw law_a{p.lambda_alpha, p.gamma2_alpha};
    const IndexLaw law_y{p.lambda_beta, p.gamma2_beta};
    const double g0 = gaussian_link_moment(link_a, 0, law_a);
    const double g1 = gaussian_link_moment(link_a, 1, law_a);
    const double f0 = gaussian_link_moment(link_y, 0, law_y);
    const double f1 = gaussian_link_moment(link_y, 1, law_y);
    MomentSet ms;
    ms.set("m_A", g0, 1);
    ms.set("m_Y", f0, 1);
    ms.set("m_X2", m_x2, 2);
    ms.set("m_XA_X", g0 * m_x2 + g1 * p.lambda_alpha, 2);
    ms.set("m_XY_X", f0 * m_x2 + f1 * p.lambda_beta, 2);
    ms.set("m_XA2",
           g0 * g0 * m_x2 + g1 * g1 * p.gamma2_alpha + 2.0 * g0 * g1 * p.lambda_alpha, 2);
    ms.set("m_XY2",
           f0 * f0 * m_x2 + f1 * f1 * p.gamma2_beta + 2.0 * f0 * f1 * p.lambda_beta, 2);
    ms.set("m_XA_XY",
           g0 * f0 * m_x2 + g0 * f1 * p.lambda_beta + f0 * g1 * p.lambda_alpha +
               g1 * f1 * p.gamma_alpha_beta,
           2);
    return ms;
}

}  // namespace momglm
