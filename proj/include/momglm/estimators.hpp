#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "momglm/moment_systems.hpp"
#include "momglm/ustat.hpp"

namespace momglm {

enum class EstimatorMode { KnownSigma, UnknownSigmaSplit, UnknownSigmaLinear };

inline const char* mode_name(EstimatorMode m) {
    switch (m) {
        case EstimatorMode::KnownSigma: return "known_sigma";
        case EstimatorMode::UnknownSigmaSplit: return "unknown_sigma_split";
        case EstimatorMode::UnknownSigmaLinear: return "unknown_sigma_linear";
    }
    return "?";
}

struct EstimateReport {
    std::string estimand;
    std::map<std::string, double> parameters;
    MomentSet moments_used;
    SolveReport solver;
    EstimatorMode mode = EstimatorMode::KnownSigma;
    bool warning_projected = false;

    void finish() {
        warning_projected = solver.projected;
        for (const auto& [key, value] : parameters) {
            if (!std::isfinite(value)) {
                raise(ErrorCode::NoConvergence, "parameter '" + key + "' is not finite");
            }
        }
    }
};

namespace detail {

inline void guard_f1(double f1) {
    if (std::abs(f1) < 1e-12) {
        raise(ErrorCode::DegenerateF1,
              "derivative moment below 1e-12; coordinate division is unstable");
    }
}

inline void check_binary_a(const Dataset& ds) {
    if (!ds.a) {
        raise(ErrorCode::MissingResponseA, "dataset lacks the column a");
    }
    for (Eigen::Index i = 0; i < ds.a->size(); ++i) {
        const double v = (*ds.a)(i);
        if (v != 0.0 && v != 1.0) {
            raise(ErrorCode::NonBinaryA, "column a must contain only 0/1 entries");
        }
    }
}

}  // namespace detail

/// GLM estimation with known design covariance. The zero-mean path inverts the
/// one-dimensional quadratic map; the general path inverts the two-component
/// index map from the reduced moments.
inline EstimateReport estimate_glm(const Dataset& ds, const DesignModel& design,
                                   const LinkSpec& link, const std::vector<Eigen::Index>& coords,
                                   const SolveOptions& opts = {}) {
    if (design.mode() != DesignMode::KnownSigma) {
        raise(ErrorCode::SingularSigma, "estimate_glm needs a known-sigma design model");
    }
    EstimateReport report;
    report.mode = EstimatorMode::KnownSigma;
    if (design.mu_known_zero()) {
        report.estimand = "glm0";
        report.moments_used = collect_moments(ds, design, Estimand::Glm0, coords);
        report.solver = glm0_invert(link, report.moments_used.get("m_XY2"), opts);
        const double gamma2 = report.solver.solution.at("gamma2");
        const double f1 = gaussian_link_moment(link, 1, IndexLaw{0.0, gamma2});
        detail::guard_f1(f1);
        report.parameters["gamma2_beta"] = gamma2;
        for (Eigen::Index j : coords) {
            report.parameters["beta_" + std::to_string(j)] =
                report.moments_used.get(beta_moment_name(j)) / f1;
        }
    } else {
        report.estimand = "glm";
        report.moments_used = collect_moments(ds, design, Estimand::Glm, coords);
        const auto [m1, m2] = reduce_glm_moments(report.moments_used);
        report.solver = glm_invert(link, m1, m2, opts);
        const IndexLaw law{report.solver.solution.at("lambda"),
                           report.solver.solution.at("gamma2")};
        const double f0 = gaussian_link_moment(link, 0, law);
        const double f1 = gaussian_link_moment(link, 1, law);
        detail::guard_f1(f1);
        report.parameters["lambda_beta"] = law.lambda;
        report.parameters["gamma2_beta"] = law.gamma2;
        for (Eigen::Index j : coords) {
            const double m_beta = report.moments_used.get(beta_moment_name(j));
            const double m_nu = report.moments_used.get(nu_moment_name(j));
            report.parameters["beta_" + std::to_string(j)] = (m_beta - f0 * m_nu) / f1;
        }
    }
    report.finish();
    return report;
}

/// Split-sample GLM estimator for unknown design covariance: the second half
/// of the rows forms the Gram matrix, the first half forms the U-statistics,
/// and the Gram-inverse bias is removed by the (n/2 - p - 1)/(n/2) factor.
inline EstimateReport estimate_glm_unknown_sigma(const Dataset& ds, const LinkSpec& link,
                                                 const std::vector<Eigen::Index>& coords,
                                                 const SolveOptions& opts = {}) {
    ds.validate();
    const Eigen::Index n = ds.n();
    const Eigen::Index p = ds.p();
    if (n % 2 != 0) {
        raise(ErrorCode::InsufficientSamples, "split-sample estimator needs an even n");
    }
    const Eigen::Index half = n / 2;
    if (p + 3 >= half) {
        raise(ErrorCode::InsufficientSamples,
              "needs p + 3 < n/2 (got p=" + std::to_string(p) + ", n/2=" + std::to_string(half) +
                  ")");
    }

    const Eigen::MatrixXd x2 = ds.x.bottomRows(half);
    Eigen::MatrixXd gram = (x2.transpose() * x2) / static_cast<double>(half);
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        raise(ErrorCode::SingularGram, "sample Gram matrix is not invertible");
    }

    Dataset first;
    first.x = ds.x.topRows(half);
    first.y = ds.y.head(half);

    const double prefactor =
        (static_cast<double>(half) - static_cast<double>(p) - 1.0) / static_cast<double>(half);

    // Same aggregated second-order statistic as the known-sigma path, with the
    // Gram factorization standing in for sigma.
    const Eigen::MatrixXd w = llt.solve(first.x.transpose());
    Eigen::VectorXd q(half);
    for (Eigen::Index i = 0; i < half; ++i) {
        q(i) = first.x.row(i).dot(w.col(i));
    }
    const Eigen::VectorXd ag = first.x.transpose() * first.y;
    const double cross = ag.dot(llt.solve(ag));
    const double diagonal = (first.y.array().square() * q.array()).sum();
    const double m_xy2 =
        prefactor * (cross - diagonal) /
        (static_cast<double>(half) * (static_cast<double>(half) - 1.0));

    EstimateReport report;
    report.estimand = "glm-unknown-sigma";
    report.mode = EstimatorMode::UnknownSigmaSplit;
    report.moments_used.set("m_XY2", m_xy2, 2);
    report.solver = glm0_invert(link, m_xy2, opts);
    const double gamma2 = report.solver.solution.at("gamma2");
    const double f1 = gaussian_link_moment(link, 1, IndexLaw{0.0, gamma2});
    detail::guard_f1(f1);
    report.parameters["gamma2_beta"] = gamma2;
    for (Eigen::Index j : coords) {
        if (j < 1 || j > p) {
            raise(ErrorCode::IndexOutOfRange, "coordinate " + std::to_string(j) + " not in 1..p");
        }
        Eigen::VectorXd ej = Eigen::VectorXd::Zero(p);
        ej(j - 1) = 1.0;
        const double m_beta = prefactor * ag.dot(llt.solve(ej)) / static_cast<double>(half);
        report.moments_used.set(beta_moment_name(j), m_beta, 1);
        report.parameters["beta_" + std::to_string(j)] = m_beta / f1;
    }
    report.finish();
    return report;
}

/// Homoscedastic linear-model estimators that need neither sigma nor mu:
/// response mean, projection-based quadratic form, and least-squares
/// coordinates.
inline EstimateReport estimate_linear_unknown_sigma(const Dataset& ds,
                                                    const std::vector<Eigen::Index>& coords) {
    ds.validate();
    const Eigen::Index n = ds.n();
    const Eigen::Index p = ds.p();
    if (p >= n) {
        raise(ErrorCode::RankDeficientDesign, "needs p < n");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ds.x);
    if (qr.rank() < p) {
        raise(ErrorCode::RankDeficientDesign, "design matrix is rank deficient");
    }
    const Eigen::VectorXd beta_ls = qr.solve(ds.y);
    const Eigen::VectorXd fitted = ds.x * beta_ls;
    const double yhy = ds.y.dot(fitted);
    const double yy = ds.y.squaredNorm();
    const double ratio = static_cast<double>(p) / static_cast<double>(n);
    const double gamma2 = (yhy - ratio * yy) / static_cast<double>(n - p);

    EstimateReport report;
    report.estimand = "linear-unknown-sigma";
    report.mode = EstimatorMode::UnknownSigmaLinear;
    report.parameters["lambda_beta"] = ustat_mean(ds.y);
    report.parameters["gamma2_beta"] = gamma2;
    for (Eigen::Index j : coords) {
        if (j < 1 || j > p) {
            raise(ErrorCode::IndexOutOfRange, "coordinate " + std::to_string(j) + " not in 1..p");
        }
        report.parameters["beta_" + std::to_string(j)] = beta_ls(j - 1);
    }
    report.finish();
    return report;
}

/// Second-order statistic with the identity weighting; zero in expectation
/// iff the coefficient vector vanishes. Usable without knowing sigma.
inline double null_test_statistic(const Dataset& ds) {
    ds.validate();
    if (ds.n() < 2) {
        raise(ErrorCode::EmptyDataset, "null test needs n >= 2");
    }
    const Eigen::VectorXd a = ds.x.transpose() * ds.y;
    double diagonal = 0.0;
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        diagonal += ds.y(i) * ds.y(i) * ds.x.row(i).squaredNorm();
    }
    const double n = static_cast<double>(ds.n());
    return (a.squaredNorm() - diagonal) / (n * (n - 1.0));
}

inline EstimateReport estimate_ce(const Dataset& ds, const DesignModel& design,
                                  const LinkSpec& propensity_link,
                                  const SolveOptions& opts = {}) {
    detail::check_binary_a(ds);
    EstimateReport report;
    report.estimand = "ce";
    report.mode = EstimatorMode::KnownSigma;
    report.moments_used = collect_moments(ds, design, Estimand::Ce);
    report.solver = solve_ce(report.moments_used, propensity_link, opts);
    report.parameters = report.solver.solution;
    report.finish();
    return report;
}

inline EstimateReport estimate_mar(const Dataset& ds, const DesignModel& design,
                                   const LinkSpec& missingness_link,
                                   const SolveOptions& opts = {}) {
    detail::check_binary_a(ds);
    EstimateReport report;
    report.estimand = "mar";
    report.mode = EstimatorMode::KnownSigma;
    report.moments_used = collect_moments(ds, design, Estimand::Mar);
    report.solver = solve_mar(report.moments_used, missingness_link, opts);
    report.parameters = report.solver.solution;
    report.finish();
    return report;
}

inline EstimateReport estimate_gcm(const Dataset& ds, const DesignModel& design,
                                   const LinkSpec& link_a, const LinkSpec& link_y,
                                   const SolveOptions& opts = {}) {
    if (!ds.a) {
        raise(ErrorCode::MissingResponseA, "gcm requires the column a");
    }
    EstimateReport report;
    report.estimand = "gcm";
    report.mode = EstimatorMode::KnownSigma;
    report.moments_used = collect_moments(ds, design, Estimand::Gcm);
    report.solver = solve_gcm(report.moments_used, link_a, link_y, opts);
    report.parameters = report.solver.solution;
    report.finish();
    return report;
}

}  // namespace momglm
