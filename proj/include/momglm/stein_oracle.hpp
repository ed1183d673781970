#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "momglm/moment_systems.hpp"
#include "momglm/rng.hpp"

namespace momglm {

/// Result of one sampling check: a population identity's left side estimated
/// by plain Monte Carlo against its analytic right side, with the z-score of
/// the discrepancy.
struct OracleReport {
    std::string id;
    double lhs = 0.0;
    double rhs = 0.0;
    double se = 0.0;
    double z = 0.0;
};

namespace oracle_detail {

struct Model {
    std::string family;  // glm0 | glm | ce | mar | gcm
    LinkSpec link_a;
    LinkSpec link_y;
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    double psi = 0.0;
    double noise_sd = 0.2;

    double lambda_alpha() const { return alpha.size() ? alpha.dot(mu) : 0.0; }
    double gamma2_alpha() const { return alpha.size() ? alpha.dot(sigma * alpha) : 0.0; }
    double lambda_beta() const { return beta.dot(mu); }
    double gamma2_beta() const { return beta.dot(sigma * beta); }
    double gamma_alpha_beta() const { return alpha.size() ? alpha.dot(sigma * beta) : 0.0; }
    double m_x2() const {
        const Eigen::VectorXd w = sigma.llt().solve(mu);
        return mu.dot(w);
    }
};

inline Eigen::MatrixXd ar_sigma(int p, double rho) {
    Eigen::MatrixXd s(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) s(i, j) = std::pow(rho, std::abs(i - j));
    }
    return s;
}

inline Eigen::VectorXd scaled_to(const Eigen::VectorXd& direction, const Eigen::MatrixXd& sigma,
                                 double target_gamma2) {
    const double raw = direction.dot(sigma * direction);
    return direction * std::sqrt(target_gamma2 / raw);
}

inline Model make_model(const std::string& family, int point) {
    constexpr int p = 6;
    Model m;
    m.family = family;
    Eigen::VectorXd dir_b(p), dir_a(p);
    dir_b << 1.0, -1.0, 0.5, 0.0, 0.3, -0.2;
    dir_a << 0.4, 0.8, -0.3, 0.6, 0.0, 0.2;
    if (family == "glm0") {
        m.mu = Eigen::VectorXd::Zero(p);
        if (point == 0) {
            m.link_y = logistic_link();
            m.sigma = ar_sigma(p, 0.3);
            m.beta = scaled_to(dir_b, m.sigma, 1.0);
        } else {
            m.link_y = probit_link();
            m.sigma = Eigen::MatrixXd::Identity(p, p);
            m.beta = scaled_to(dir_a, m.sigma, 0.6);
        }
    } else if (family == "glm") {
        if (point == 0) {
            m.link_y = logistic_link();
            m.sigma = Eigen::MatrixXd::Identity(p, p);
            m.beta = Eigen::VectorXd::Zero(p);
            m.beta(0) = 1.0;  // gamma2 = 1
            m.mu = Eigen::VectorXd::Zero(p);
            m.mu(0) = 0.3;                 // lambda = 0.3
            m.mu(1) = std::sqrt(0.41);     // so mu' sigma^{-1} mu = 0.5
        } else {
            m.link_y = loglinear_link();
            m.sigma = ar_sigma(p, 0.3);
            m.beta = scaled_to(dir_b, m.sigma, 0.3);
            m.mu.resize(p);
            m.mu << 0.2, -0.1, 0.05, 0.0, 0.1, 0.0;
        }
    } else if (family == "ce") {
        m.link_a = logistic_link();
        m.link_y = identity_link();
        if (point == 0) {
            m.sigma = ar_sigma(p, 0.3);
            m.mu.resize(p);
            m.mu << 0.2, -0.1, 0.15, 0.0, 0.1, -0.05;
            m.alpha = scaled_to(dir_a, m.sigma, 0.8);
            m.beta = scaled_to(dir_b, m.sigma, 0.9);
            m.psi = 0.7;
        } else {
            m.sigma = Eigen::MatrixXd::Identity(p, p);
            m.mu = Eigen::VectorXd::Zero(p);
            m.alpha = scaled_to(dir_a, m.sigma, 1.0);
            m.beta = scaled_to(dir_b, m.sigma, 0.7);
            m.psi = 0.0;
        }
    } else if (family == "mar" || family == "stein") {
        m.family = "mar";
        m.link_a = floored_logistic_link();
        m.link_y = identity_link();
        if (point == 0) {
            m.sigma = ar_sigma(p, 0.3);
            m.mu.resize(p);
            m.mu << 0.15, 0.1, -0.1, 0.05, 0.0, 0.1;
            m.alpha = scaled_to(dir_a, m.sigma, 1.0);
            m.beta = scaled_to(dir_b, m.sigma, 0.8);
        } else {
            m.sigma = Eigen::MatrixXd::Identity(p, p);
            m.mu = Eigen::VectorXd::Zero(p);
            m.alpha = scaled_to(dir_a, m.sigma, 0.9);
            m.beta = scaled_to(dir_b, m.sigma, 1.0);
        }
    } else if (family == "gcm") {
        m.link_a = logistic_link();
        if (point == 0) {
            m.link_y = logistic_link();
            m.sigma = ar_sigma(p, 0.3);
            m.mu.resize(p);
            m.mu << 0.2, 0.0, -0.15, 0.1, 0.05, 0.0;
            m.alpha = scaled_to(dir_a, m.sigma, 0.9);
            m.beta = scaled_to(dir_b, m.sigma, 1.1);
        } else {
            m.link_y = probit_link();
            m.sigma = Eigen::MatrixXd::Identity(p, p);
            m.mu = Eigen::VectorXd::Zero(p);
            m.alpha = scaled_to(dir_a, m.sigma, 1.0);
            m.beta = scaled_to(dir_b, m.sigma, 0.8);
        }
    } else {
        raise(ErrorCode::UnknownIdentity, "unknown identity family '" + family + "'");
    }
    return m;
}

struct Draws {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd a;
};

inline std::uint64_t fnv_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

inline Draws draw(const Model& m, long samples, std::uint64_t seed, int point) {
    const int p = static_cast<int>(m.beta.size());
    Draws d;
    d.x.resize(samples, p);
    const Eigen::MatrixXd chol = Eigen::MatrixXd(m.sigma.llt().matrixL());
    CounterRng rng(seed, fnv_hash(m.family), static_cast<std::uint64_t>(point), 11);
    Eigen::VectorXd z(p);
    for (long i = 0; i < samples; ++i) {
        for (int j = 0; j < p; ++j) z(j) = rng.normal();
        d.x.row(i) = (m.mu + chol * z).transpose();
    }
    const Eigen::VectorXd beta_index = d.x * m.beta;
    CounterRng rng_resp(seed, fnv_hash(m.family), static_cast<std::uint64_t>(point), 12);
    if (m.family == "glm0" || m.family == "glm") {
        d.y.resize(samples);
        if (m.link_y.name == "log-linear") {
            for (long i = 0; i < samples; ++i) {
                d.y(i) = static_cast<double>(rng_resp.poisson(std::exp(beta_index(i))));
            }
        } else {
            for (long i = 0; i < samples; ++i) {
                d.y(i) = rng_resp.bernoulli(m.link_y.value(beta_index(i))) ? 1.0 : 0.0;
            }
        }
        return d;
    }
    const Eigen::VectorXd alpha_index = d.x * m.alpha;
    d.a.resize(samples);
    for (long i = 0; i < samples; ++i) {
        d.a(i) = rng_resp.bernoulli(m.link_a.value(alpha_index(i))) ? 1.0 : 0.0;
    }
    d.y.resize(samples);
    if (m.family == "ce") {
        for (long i = 0; i < samples; ++i) {
            d.y(i) = m.psi * d.a(i) + beta_index(i) + m.noise_sd * rng_resp.normal();
        }
    } else if (m.family == "mar") {
        for (long i = 0; i < samples; ++i) {
            d.y(i) = beta_index(i) + m.noise_sd * rng_resp.normal();
        }
    } else {  // gcm: both responses are conditional-mean draws
        if (m.link_y.name == "log-linear") {
            for (long i = 0; i < samples; ++i) {
                d.y(i) = static_cast<double>(rng_resp.poisson(std::exp(beta_index(i))));
            }
        } else {
            for (long i = 0; i < samples; ++i) {
                d.y(i) = rng_resp.bernoulli(m.link_y.value(beta_index(i))) ? 1.0 : 0.0;
            }
        }
    }
    return d;
}

struct LhsEstimate {
    double value = 0.0;
    double se = 0.0;
};

inline LhsEstimate order1_mean(const Eigen::VectorXd& s) {
    const double n = static_cast<double>(s.size());
    const double mean = s.mean();
    const double var = (s.array() - mean).square().sum() / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

// Second-order U-statistic with kernel f_1 X_1' Omega X_2 g_2 (symmetrized)
// through the aggregated sums; the standard error comes from the empirical
// first-order projection of the kernel.
inline LhsEstimate order2_bilinear(const Eigen::MatrixXd& x, const Eigen::VectorXd& f,
                                   const Eigen::VectorXd& g, const Eigen::MatrixXd& sigma) {
    const double n = static_cast<double>(x.rows());
    const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    const Eigen::MatrixXd omega =
        llt.solve(Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols()));
    const Eigen::VectorXd af = x.transpose() * f;
    const Eigen::VectorXd ag = x.transpose() * g;
    const Eigen::VectorXd wf = omega * af;
    const Eigen::VectorXd wg = omega * ag;
    const Eigen::VectorXd q = ((x * omega).cwiseProduct(x)).rowwise().sum();
    const double diagonal = (f.array() * g.array() * q.array()).sum();
    const double cross = 0.5 * (af.dot(wg) + ag.dot(wf));
    const double value = (cross - diagonal) / (n * (n - 1.0));

    // projection: zeta_i = (f_i x_i' Omega gbar + g_i x_i' Omega fbar) / 2
    const Eigen::VectorXd proj_g = x * (wg / n);
    const Eigen::VectorXd proj_f = x * (wf / n);
    Eigen::VectorXd zeta =
        0.5 * (f.array() * proj_g.array() + g.array() * proj_f.array()).matrix();
    const double mean = zeta.mean();
    const double var = (zeta.array() - mean).square().sum() / (n - 1.0);
    return {value, 2.0 * std::sqrt(var / n)};
}

}  // namespace oracle_detail

inline std::vector<std::string> registered_identities() {
    return {
        "glm0.m_XY2",  "glm0.m_beta_j",
        "glm.m_Y",     "glm.m_X2",     "glm.m_XY_X",  "glm.m_XY2",
        "glm.m_nu_j",  "glm.m_beta_j",
        "ce.m_A",      "ce.m_Y",       "ce.m_AY",     "ce.m_XA_X",
        "ce.m_XA2",    "ce.m_XA_XY",   "ce.m_XAY_XA",
        "mar.m_A",     "mar.m_XA_X",   "mar.m_XA2",   "mar.m_AY",
        "mar.m_XAY_X", "mar.m_XAY_XA",
        "gcm.m_XA_XY",
        "stein.first_order_projection",
    };
}

/// Estimates the identity's left side by plain Monte Carlo at a registered
/// parameter point (0 or 1) and compares it with the analytic right side.
inline OracleReport stein_oracle_check(const std::string& id, int point, long samples,
                                       std::uint64_t seed) {
    const auto ids = registered_identities();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        raise(ErrorCode::UnknownIdentity, "identity '" + id + "' is not registered");
    }
    if (point != 0 && point != 1) {
        raise(ErrorCode::UnknownIdentity, "parameter point must be 0 or 1");
    }
    if (samples < 100) {
        raise(ErrorCode::InsufficientSamples, "oracle check needs at least 100 samples");
    }
    const auto dot = id.find('.');
    const std::string family = id.substr(0, dot);
    const std::string moment = id.substr(dot + 1);

    const oracle_detail::Model m = oracle_detail::make_model(family, point);
    const oracle_detail::Draws d = oracle_detail::draw(m, samples, seed, point);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d.x.rows());

    const IndexLaw law_b{m.lambda_beta(), m.gamma2_beta()};
    const IndexLaw law_a{m.lambda_alpha(), m.gamma2_alpha()};
    const Eigen::VectorXd nu = m.sigma.llt().solve(m.mu);

    oracle_detail::LhsEstimate lhs;
    double rhs = 0.0;
    if (family == "glm0") {
        if (moment == "m_XY2") {
            lhs = oracle_detail::order2_bilinear(d.x, d.y, d.y, m.sigma);
            rhs = glm0_forward(m.link_y, m.gamma2_beta());
        } else {  // m_beta_j, j = 1
            Eigen::VectorXd e1 = Eigen::VectorXd::Zero(d.x.cols());
            e1(0) = 1.0;
            const Eigen::VectorXd w = m.sigma.llt().solve(e1);
            lhs = oracle_detail::order1_mean((d.x * w).cwiseProduct(d.y));
            rhs = gaussian_link_moment(m.link_y, 1, IndexLaw{0.0, m.gamma2_beta()}) * m.beta(0);
        }
    } else if (family == "glm") {
        const MomentSet fw = forward_glm_moments(m.link_y, law_b, m.m_x2());
        if (moment == "m_Y") {
            lhs = oracle_detail::order1_mean(d.y);
            rhs = fw.get("m_Y");
        } else if (moment == "m_X2") {
            lhs = oracle_detail::order2_bilinear(d.x, ones, ones, m.sigma);
            rhs = fw.get("m_X2");
        } else if (moment == "m_XY_X") {
            lhs = oracle_detail::order2_bilinear(d.x, d.y, ones, m.sigma);
            rhs = fw.get("m_XY_X");
        } else if (moment == "m_XY2") {
            lhs = oracle_detail::order2_bilinear(d.x, d.y, d.y, m.sigma);
            rhs = fw.get("m_XY2");
        } else if (moment == "m_nu_j") {
            Eigen::VectorXd e1 = Eigen::VectorXd::Zero(d.x.cols());
            e1(0) = 1.0;
            const Eigen::VectorXd w = m.sigma.llt().solve(e1);
            lhs = oracle_detail::order1_mean(d.x * w);
            rhs = nu(0);
        } else {  // m_beta_j
            Eigen::VectorXd e1 = Eigen::VectorXd::Zero(d.x.cols());
            e1(0) = 1.0;
            const Eigen::VectorXd w = m.sigma.llt().solve(e1);
            lhs = oracle_detail::order1_mean((d.x * w).cwiseProduct(d.y));
            rhs = gaussian_link_moment(m.link_y, 0, law_b) * nu(0) +
                  gaussian_link_moment(m.link_y, 1, law_b) * m.beta(0);
        }
    } else if (family == "ce") {
        const CeForward fw = forward_ce_moments(
            m.link_a,
            CeParams{m.psi, m.lambda_alpha(), m.gamma2_alpha(), m.lambda_beta(),
                     m.gamma_alpha_beta()},
            m.m_x2());
        const Eigen::VectorXd ay = d.a.cwiseProduct(d.y);
        if (moment == "m_A") {
            lhs = oracle_detail::order1_mean(d.a);
        } else if (moment == "m_Y") {
            lhs = oracle_detail::order1_mean(d.y);
        } else if (moment == "m_AY") {
            lhs = oracle_detail::order1_mean(ay);
        } else if (moment == "m_XA_X") {
            lhs = oracle_detail::order2_bilinear(d.x, d.a, ones, m.sigma);
        } else if (moment == "m_XA2") {
            lhs = oracle_detail::order2_bilinear(d.x, d.a, d.a, m.sigma);
        } else if (moment == "m_XA_XY") {
            lhs = oracle_detail::order2_bilinear(d.x, d.a, d.y, m.sigma);
        } else {  // m_XAY_XA
            lhs = oracle_detail::order2_bilinear(d.x, ay, d.a, m.sigma);
        }
        rhs = fw.moments.get(moment);
    } else if (family == "mar") {
        const MarParams params{m.lambda_beta(), m.lambda_alpha(), m.gamma2_alpha(),
                               m.gamma_alpha_beta()};
        const MomentSet fw = forward_mar_moments(m.link_a, params, m.m_x2());
        const Eigen::VectorXd ay = d.a.cwiseProduct(d.y);
        if (moment == "m_A") {
            lhs = oracle_detail::order1_mean(d.a);
            rhs = fw.get("m_A");
        } else if (moment == "m_XA_X") {
            lhs = oracle_detail::order2_bilinear(d.x, d.a, ones, m.sigma);
            rhs = fw.get("m_XA_X");
        } else if (moment == "m_XA2") {
            lhs = oracle_detail::order2_bilinear(d.x, d.a, d.a, m.sigma);
            rhs = fw.get("m_XA2");
        } else if (moment == "m_AY") {
            lhs = oracle_detail::order1_mean(ay);
            rhs = fw.get("m_AY");
        } else if (moment == "m_XAY_X") {
            lhs = oracle_detail::order2_bilinear(d.x, ay, ones, m.sigma);
            rhs = fw.get("m_XAY_X");
        } else {  // m_XAY_XA: the alternative-identification cross-check
            lhs = oracle_detail::order2_bilinear(d.x, ay, d.a, m.sigma);
            const double g0 = gaussian_link_moment(m.link_a, 0, law_a);
            const double g1 = gaussian_link_moment(m.link_a, 1, law_a);
            const double g2 = gaussian_link_moment(m.link_a, 2, law_a);
            const double m_xa_x = fw.get("m_XA_X");
            const double m_xa2 = fw.get("m_XA2");
            const double la1 = g0 * m.lambda_alpha() + g1 * m.gamma2_alpha();
            rhs = (m_xa2 + g0 * g0) * params.psi +
                  (g0 * g1 + g1 * m_xa_x + g2 * la1) * params.gamma_alpha_beta;
        }
    } else if (family == "gcm") {
        const GcmParams params{m.lambda_alpha(), m.gamma2_alpha(), m.lambda_beta(),
                               m.gamma2_beta(), m.gamma_alpha_beta()};
        const MomentSet fw = forward_gcm_moments(m.link_a, m.link_y, params, m.m_x2());
        lhs = oracle_detail::order2_bilinear(d.x, d.a, d.y, m.sigma);
        rhs = fw.get("m_XA_XY");
    } else {  // stein.first_order_projection on the mar model
        const Eigen::VectorXd index = d.x * m.beta;
        lhs = oracle_detail::order1_mean(index.cwiseProduct(d.a));
        rhs = m.lambda_beta() * gaussian_link_moment(m.link_a, 0, law_a) +
              m.gamma_alpha_beta() * gaussian_link_moment(m.link_a, 1, law_a);
    }

    OracleReport report;
    report.id = id;
    report.lhs = lhs.value;
    report.rhs = rhs;
    report.se = lhs.se;
    const double scale = std::max({1.0, std::abs(lhs.value), std::abs(rhs)});
    if (lhs.se < 1e-12 * scale) {
        report.z = std::abs(lhs.value - rhs) < 1e-9 * scale ? 0.0
                                                            : std::numeric_limits<double>::infinity();
    } else {
        report.z = (lhs.value - rhs) / lhs.se;
    }
    return report;
}

}  // namespace momglm
