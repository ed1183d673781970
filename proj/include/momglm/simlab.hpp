#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "momglm/csv.hpp"
#include "momglm/estimators.hpp"
#include "momglm/rng.hpp"

namespace momglm {

enum class DesignKind { GaussianIdentity, GaussianGeneral, Rademacher };
enum class CoefScheme { DenseUniform, SparseRootP, SingleSpike };

inline const char* design_kind_name(DesignKind k) {
    switch (k) {
        case DesignKind::GaussianIdentity: return "gaussian-identity";
        case DesignKind::GaussianGeneral: return "gaussian-general";
        case DesignKind::Rademacher: return "rademacher";
    }
    return "?";
}

inline const char* coef_scheme_name(CoefScheme s) {
    switch (s) {
        case CoefScheme::DenseUniform: return "dense-uniform";
        case CoefScheme::SparseRootP: return "sparse-root-p";
        case CoefScheme::SingleSpike: return "single-spike";
    }
    return "?";
}

struct SimConfig {
    std::string estimand = "glm";  // glm0|glm|ce|mar|gcm|linear-unknown-sigma|glm-unknown-sigma
    std::string link = "logistic";
    std::string link_a;  // second link for gcm; defaults to `link`
    DesignKind design = DesignKind::GaussianIdentity;
    Eigen::MatrixXd sigma;  // gaussian-general only
    Eigen::VectorXd mu;     // gaussian-general only
    CoefScheme coef_scheme = CoefScheme::DenseUniform;
    std::vector<int> n_grid;
    double ratio = 1.2;
    int replicates = 1;
    std::uint64_t seed = 1;
    double psi_true = 0.0;  // treatment effect for the ce estimand
    double noise_sd = 0.2;  // gaussian outcome noise
    bool freeze_coefficients = false;
    std::vector<Eigen::Index> coords;
    std::string mu_paths = "both";  // glm estimand: both|general|mu0
    std::optional<Eigen::VectorXd> true_alpha;
    std::optional<Eigen::VectorXd> true_beta;

    Eigen::Index dim_for(int n) const {
        const double raw = static_cast<double>(n) * ratio;
        return static_cast<Eigen::Index>(std::llround(raw));
    }

    void validate() const {
        static const std::vector<std::string> estimands = {
            "glm0", "glm", "ce", "mar", "gcm", "linear-unknown-sigma", "glm-unknown-sigma"};
        if (std::find(estimands.begin(), estimands.end(), estimand) == estimands.end()) {
            raise(ErrorCode::ConfigInvalid, "unknown estimand '" + estimand + "'");
        }
        if (!(ratio > 0.0)) {
            raise(ErrorCode::ConfigInvalid, "ratio must be positive");
        }
        if (replicates < 1) {
            raise(ErrorCode::ConfigInvalid, "replicates must be >= 1");
        }
        if (n_grid.empty()) {
            raise(ErrorCode::ConfigInvalid, "n_grid must not be empty");
        }
        for (int n : n_grid) {
            if (n < 2) raise(ErrorCode::ConfigInvalid, "every n must be >= 2");
            const double raw = static_cast<double>(n) * ratio;
            const double rounded = std::llround(raw);
            if (std::abs(raw - rounded) > 1e-9 || rounded < 1) {
                raise(ErrorCode::ConfigInvalid,
                      "n * ratio must round to an integer p >= 1 (n=" + std::to_string(n) + ")");
            }
        }
        if (mu_paths != "both" && mu_paths != "general" && mu_paths != "mu0") {
            raise(ErrorCode::ConfigInvalid, "mu_paths must be both|general|mu0");
        }
        find_link(link);
        if (!link_a.empty()) find_link(link_a);
        if (design == DesignKind::GaussianGeneral) {
            if (sigma.rows() == 0 || sigma.rows() != sigma.cols()) {
                raise(ErrorCode::ConfigInvalid, "gaussian-general design needs a square sigma");
            }
            if (mu.size() != sigma.rows()) {
                raise(ErrorCode::ConfigInvalid, "mu length must match sigma dimension");
            }
        }
    }
};

struct GeneratedData {
    Dataset ds;
    std::map<std::string, double> truth;
};

namespace detail {

enum class ResponseFamily { Bernoulli, Gaussian, Poisson };

inline ResponseFamily response_family(const LinkSpec& link) {
    if (link.name == "identity") return ResponseFamily::Gaussian;
    if (link.name == "log-linear") return ResponseFamily::Poisson;
    return ResponseFamily::Bernoulli;
}

// Stream purposes; part of the reproducibility contract.
inline constexpr std::uint64_t kPurposeDesign = 1;
inline constexpr std::uint64_t kPurposeCoefA = 2;
inline constexpr std::uint64_t kPurposeCoefB = 3;
inline constexpr std::uint64_t kPurposeResponseA = 4;
inline constexpr std::uint64_t kPurposeResponseY = 5;

inline Eigen::VectorXd draw_coefficients(const SimConfig& config, Eigen::Index p,
                                         CounterRng& rng) {
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(p);
    switch (config.coef_scheme) {
        case CoefScheme::DenseUniform: {
            const double half_width = std::sqrt(3.0 / static_cast<double>(p));
            for (Eigen::Index j = 0; j < p; ++j) {
                coef(j) = rng.uniform(-half_width, half_width);
            }
            break;
        }
        case CoefScheme::SparseRootP: {
            const Eigen::Index support =
                std::max<Eigen::Index>(1, static_cast<Eigen::Index>(
                                              std::llround(std::sqrt(static_cast<double>(p)))));
            const double size = std::pow(static_cast<double>(p), -0.25);
            for (Eigen::Index j = 0; j < support; ++j) coef(j) = size;
            break;
        }
        case CoefScheme::SingleSpike:
            coef(0) = 1.0;
            break;
    }
    return coef;
}

inline double response_draw(ResponseFamily family, double index, const LinkSpec& link,
                            double noise_sd, CounterRng& rng) {
    switch (family) {
        case ResponseFamily::Bernoulli:
            return rng.bernoulli(link.value(index)) ? 1.0 : 0.0;
        case ResponseFamily::Gaussian:
            return index + noise_sd * rng.normal();
        case ResponseFamily::Poisson:
            return static_cast<double>(rng.poisson(link.value(index)));
    }
    return 0.0;
}

}  // namespace detail

/// Deterministic function of (seed, n, replicate): draws the design, the
/// coefficients, and the responses, and returns the realized truth of every
/// parameter the configured estimator reports.
inline GeneratedData generate_dataset(const SimConfig& config, int n, int replicate) {
    config.validate();
    const Eigen::Index p = config.dim_for(n);
    const std::uint64_t rep_key = static_cast<std::uint64_t>(replicate);
    const std::uint64_t coef_key =
        config.freeze_coefficients ? 0ULL : static_cast<std::uint64_t>(replicate);
    const std::uint64_t n_key = static_cast<std::uint64_t>(n);

    GeneratedData out;
    out.ds.x.resize(n, p);
    {
        CounterRng rng(config.seed, n_key, rep_key, detail::kPurposeDesign);
        switch (config.design) {
            case DesignKind::GaussianIdentity:
                for (Eigen::Index i = 0; i < n; ++i)
                    for (Eigen::Index j = 0; j < p; ++j) out.ds.x(i, j) = rng.normal();
                break;
            case DesignKind::Rademacher:
                for (Eigen::Index i = 0; i < n; ++i)
                    for (Eigen::Index j = 0; j < p; ++j) out.ds.x(i, j) = rng.rademacher();
                break;
            case DesignKind::GaussianGeneral: {
                if (config.sigma.rows() != p) {
                    raise(ErrorCode::ConfigInvalid,
                          "gaussian-general sigma dimension must equal p = n * ratio");
                }
                Eigen::LLT<Eigen::MatrixXd> llt(config.sigma);
                if (llt.info() != Eigen::Success) {
                    raise(ErrorCode::ConfigInvalid, "gaussian-general sigma is not PD");
                }
                const Eigen::MatrixXd chol = llt.matrixL();
                Eigen::VectorXd z(p);
                for (Eigen::Index i = 0; i < n; ++i) {
                    for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
                    out.ds.x.row(i) = (config.mu + chol * z).transpose();
                }
                break;
            }
        }
    }

    const Eigen::MatrixXd sigma_pop = config.design == DesignKind::GaussianGeneral
                                          ? config.sigma
                                          : Eigen::MatrixXd::Identity(p, p);
    const Eigen::VectorXd mu_pop = config.design == DesignKind::GaussianGeneral
                                       ? config.mu
                                       : Eigen::VectorXd::Zero(p);

    const bool doubly_robust =
        config.estimand == "ce" || config.estimand == "mar" || config.estimand == "gcm";

    Eigen::VectorXd beta;
    if (config.true_beta) {
        if (config.true_beta->size() != p) {
            raise(ErrorCode::ConfigInvalid, "true_beta length must equal p");
        }
        beta = *config.true_beta;
    } else {
        CounterRng rng(config.seed, n_key, coef_key, detail::kPurposeCoefB);
        beta = detail::draw_coefficients(config, p, rng);
    }
    Eigen::VectorXd alpha;
    if (doubly_robust) {
        if (config.true_alpha) {
            if (config.true_alpha->size() != p) {
                raise(ErrorCode::ConfigInvalid, "true_alpha length must equal p");
            }
            alpha = *config.true_alpha;
        } else {
            CounterRng rng(config.seed, n_key, coef_key, detail::kPurposeCoefA);
            alpha = detail::draw_coefficients(config, p, rng);
        }
    }

    const LinkSpec link_y = find_link(config.link);
    const LinkSpec link_a = find_link(config.link_a.empty() ? config.link : config.link_a);
    const auto y_family = detail::response_family(link_y);

    const Eigen::VectorXd beta_index = out.ds.x * beta;
    if (config.estimand == "ce") {
        const Eigen::VectorXd alpha_index = out.ds.x * alpha;
        out.ds.a = Eigen::VectorXd(n);
        CounterRng rng_a(config.seed, n_key, rep_key, detail::kPurposeResponseA);
        for (Eigen::Index i = 0; i < n; ++i) {
            (*out.ds.a)(i) = rng_a.bernoulli(link_a.value(alpha_index(i))) ? 1.0 : 0.0;
        }
        CounterRng rng_y(config.seed, n_key, rep_key, detail::kPurposeResponseY);
        out.ds.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            out.ds.y(i) = config.psi_true * (*out.ds.a)(i) + beta_index(i) +
                          config.noise_sd * rng_y.normal();
        }
    } else if (config.estimand == "mar") {
        const Eigen::VectorXd alpha_index = out.ds.x * alpha;
        out.ds.a = Eigen::VectorXd(n);
        CounterRng rng_a(config.seed, n_key, rep_key, detail::kPurposeResponseA);
        for (Eigen::Index i = 0; i < n; ++i) {
            (*out.ds.a)(i) = rng_a.bernoulli(link_a.value(alpha_index(i))) ? 1.0 : 0.0;
        }
        CounterRng rng_y(config.seed, n_key, rep_key, detail::kPurposeResponseY);
        out.ds.y = beta_index;
        for (Eigen::Index i = 0; i < n; ++i) {
            out.ds.y(i) += config.noise_sd * rng_y.normal();
        }
    } else if (config.estimand == "gcm") {
        const Eigen::VectorXd alpha_index = out.ds.x * alpha;
        const auto a_family = detail::response_family(link_a);
        out.ds.a = Eigen::VectorXd(n);
        CounterRng rng_a(config.seed, n_key, rep_key, detail::kPurposeResponseA);
        for (Eigen::Index i = 0; i < n; ++i) {
            (*out.ds.a)(i) =
                detail::response_draw(a_family, alpha_index(i), link_a, config.noise_sd, rng_a);
        }
        CounterRng rng_y(config.seed, n_key, rep_key, detail::kPurposeResponseY);
        out.ds.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            out.ds.y(i) =
                detail::response_draw(y_family, beta_index(i), link_y, config.noise_sd, rng_y);
        }
    } else {
        CounterRng rng_y(config.seed, n_key, rep_key, detail::kPurposeResponseY);
        out.ds.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            out.ds.y(i) =
                detail::response_draw(y_family, beta_index(i), link_y, config.noise_sd, rng_y);
        }
    }

    // Realized truth of the drawn coefficients.
    const double lambda_beta = beta.dot(mu_pop);
    const double gamma2_beta = beta.dot(sigma_pop * beta);
    out.truth["lambda_beta"] = lambda_beta;
    out.truth["gamma2_beta"] = gamma2_beta;
    for (Eigen::Index j : config.coords) {
        if (j >= 1 && j <= p) out.truth["beta_" + std::to_string(j)] = beta(j - 1);
    }
    if (doubly_robust) {
        const double lambda_alpha = alpha.dot(mu_pop);
        const double gamma2_alpha = alpha.dot(sigma_pop * alpha);
        const double gamma_alpha_beta = alpha.dot(sigma_pop * beta);
        out.truth["lambda_alpha"] = lambda_alpha;
        out.truth["gamma2_alpha"] = gamma2_alpha;
        out.truth["gamma_alpha_beta"] = gamma_alpha_beta;
        const IndexLaw law_a{lambda_alpha, gamma2_alpha};
        if (config.estimand == "ce") {
            out.truth["psi"] = config.psi_true;
            const double f0 = gaussian_link_moment(link_a, 0, law_a);
            const double f1 = gaussian_link_moment(link_a, 1, law_a);
            out.truth["lambda_alpha_1"] = f0 * lambda_alpha + f1 * gamma2_alpha;
            out.truth["lambda_beta_1"] = f0 * lambda_beta + f1 * gamma_alpha_beta;
        } else if (config.estimand == "mar") {
            out.truth["psi"] = lambda_beta;
        } else {
            BivariateIndexLaw pair_law;
            pair_law.lambda1 = lambda_alpha;
            pair_law.lambda2 = lambda_beta;
            pair_law.gamma11 = gamma2_alpha;
            pair_law.gamma22 = gamma2_beta;
            pair_law.gamma12 = gamma_alpha_beta;
            out.truth["psi"] = bivariate_gaussian_moment(link_a, link_y, pair_law);
        }
    }
    return out;
}

struct ReplicateRecord {
    int n = 0;
    int replicate = 0;
    std::map<std::string, double> estimates;
    std::map<std::string, double> truth;
    int failure_code = 0;  // 0 = success; otherwise ErrorCode as int, 1-based
    std::string failure_name;
};

struct SummaryRow {
    int n = 0;
    std::string parameter;
    double sqrtn_bias = 0.0;
    double variance = 0.0;
    double mse = 0.0;
    double qq_correlation = std::numeric_limits<double>::quiet_NaN();
    int n_failures = 0;
};

struct QqDiagnostics {
    double qq_correlation = 0.0;
    std::vector<std::pair<double, double>> pairs;  // (normal quantile, standardized value)
};

struct SimResult {
    std::vector<ReplicateRecord> replicates;
    std::vector<SummaryRow> summary;
    // (n, parameter) -> qq pairs of standardized errors
    std::map<std::pair<int, std::string>, QqDiagnostics> qq_data;
};

/// Correlation between sorted standardized values and normal plotting-position
/// quantiles. Values are centered at `truth` first; standardization uses the
/// empirical mean and standard deviation.
inline QqDiagnostics normality_diagnostics(const std::vector<double>& estimates, double truth) {
    const std::size_t m = estimates.size();
    if (m < 30) {
        raise(ErrorCode::TooFewReplicates, "normality diagnostics need at least 30 estimates");
    }
    std::vector<double> centered(m);
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        centered[i] = estimates[i] - truth;
        mean += centered[i];
    }
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (double v : centered) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(m - 1));
    if (!(sd > 0.0)) {
        raise(ErrorCode::DegenerateSample, "estimates have zero standard deviation");
    }
    for (double& v : centered) v = (v - mean) / sd;
    std::sort(centered.begin(), centered.end());

    QqDiagnostics diag;
    diag.pairs.reserve(m);
    double sum_q = 0.0, sum_v = 0.0, sum_qq = 0.0, sum_vv = 0.0, sum_qv = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double q = normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(m));
        const double v = centered[i];
        diag.pairs.emplace_back(q, v);
        sum_q += q;
        sum_v += v;
        sum_qq += q * q;
        sum_vv += v * v;
        sum_qv += q * v;
    }
    const double dm = static_cast<double>(m);
    const double cov = sum_qv - sum_q * sum_v / dm;
    const double var_q = sum_qq - sum_q * sum_q / dm;
    const double var_v = sum_vv - sum_v * sum_v / dm;
    diag.qq_correlation = cov / std::sqrt(var_q * var_v);
    return diag;
}

namespace detail {

inline std::map<std::string, double> run_estimator(const SimConfig& config,
                                                   const GeneratedData& data) {
    const LinkSpec link_y = find_link(config.link);
    const LinkSpec link_a = find_link(config.link_a.empty() ? config.link : config.link_a);
    const Eigen::Index p = data.ds.p();
    std::map<std::string, double> estimates;
    auto design_with = [&](bool mu_zero) {
        if (config.design == DesignKind::GaussianGeneral) {
            return DesignModel::known_sigma(config.sigma, mu_zero);
        }
        return DesignModel::identity_sigma(p, mu_zero);
    };
    if (config.estimand == "glm0") {
        const auto rep = estimate_glm(data.ds, design_with(true), link_y, config.coords);
        estimates = rep.parameters;
    } else if (config.estimand == "glm") {
        if (config.mu_paths == "general" || config.mu_paths == "both") {
            const auto rep = estimate_glm(data.ds, design_with(false), link_y, config.coords);
            for (const auto& [k, v] : rep.parameters) estimates[k] = v;
        }
        if (config.mu_paths == "mu0" || config.mu_paths == "both") {
            const auto rep = estimate_glm(data.ds, design_with(true), link_y, config.coords);
            const std::string suffix = config.mu_paths == "both" ? "_mu0" : "";
            for (const auto& [k, v] : rep.parameters) estimates[k + suffix] = v;
        }
    } else if (config.estimand == "ce") {
        estimates = estimate_ce(data.ds, design_with(false), link_a).parameters;
    } else if (config.estimand == "mar") {
        estimates = estimate_mar(data.ds, design_with(false), link_a).parameters;
    } else if (config.estimand == "gcm") {
        estimates = estimate_gcm(data.ds, design_with(false), link_a, link_y).parameters;
    } else if (config.estimand == "linear-unknown-sigma") {
        estimates = estimate_linear_unknown_sigma(data.ds, config.coords).parameters;
    } else if (config.estimand == "glm-unknown-sigma") {
        estimates = estimate_glm_unknown_sigma(data.ds, link_y, config.coords).parameters;
    }
    return estimates;
}

}  // namespace detail

/// Runs the replicated experiment. Replicates execute concurrently on
/// independent random streams; the result is independent of the thread count.
/// Failed replicates are recorded with their error and excluded from
/// summaries, never silently dropped.
inline SimResult run_experiment(const SimConfig& config, int threads = 1) {
    config.validate();
    SimResult result;
    const int n_count = static_cast<int>(config.n_grid.size());
    const int total = n_count * config.replicates;
    result.replicates.resize(static_cast<std::size_t>(total));

    std::atomic<int> next_task{0};
    auto worker = [&]() {
        for (;;) {
            const int task = next_task.fetch_add(1);
            if (task >= total) break;
            const int n = config.n_grid[static_cast<std::size_t>(task / config.replicates)];
            const int rep = task % config.replicates;
            ReplicateRecord record;
            record.n = n;
            record.replicate = rep;
            try {
                const GeneratedData data = generate_dataset(config, n, rep);
                record.truth = data.truth;
                record.estimates = detail::run_estimator(config, data);
            } catch (const Error& e) {
                record.failure_code = static_cast<int>(e.code()) + 1;
                record.failure_name = error_name(e.code());
            }
            result.replicates[static_cast<std::size_t>(task)] = std::move(record);
        }
    };
    const int worker_count = std::max(1, threads);
    if (worker_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(worker_count));
        for (int t = 0; t < worker_count; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Summaries per (n, parameter) over the error e = estimate - realized
    // truth. Variance uses 1/m so that mse = variance + (sqrtn_bias/sqrt(n))^2
    // holds exactly.
    for (int n : config.n_grid) {
        std::map<std::string, std::vector<double>> errors;
        int failures = 0;
        for (const auto& record : result.replicates) {
            if (record.n != n) continue;
            if (record.failure_code != 0) {
                ++failures;
                continue;
            }
            for (const auto& [param, est] : record.estimates) {
                std::string truth_key = param;
                const std::string suffix = "_mu0";
                if (truth_key.size() > suffix.size() &&
                    truth_key.compare(truth_key.size() - suffix.size(), suffix.size(), suffix) ==
                        0) {
                    truth_key = truth_key.substr(0, truth_key.size() - suffix.size());
                }
                auto it = record.truth.find(truth_key);
                if (it == record.truth.end()) continue;
                errors[param].push_back(est - it->second);
            }
        }
        for (auto& [param, errs] : errors) {
            SummaryRow row;
            row.n = n;
            row.parameter = param;
            row.n_failures = failures;
            const double m = static_cast<double>(errs.size());
            double mean = 0.0;
            for (double e : errs) mean += e;
            mean /= m;
            double var = 0.0, mse = 0.0;
            for (double e : errs) {
                var += (e - mean) * (e - mean);
                mse += e * e;
            }
            var /= m;
            mse /= m;
            row.sqrtn_bias = std::sqrt(static_cast<double>(n)) * mean;
            row.variance = var;
            row.mse = mse;
            if (errs.size() >= 30 && var > 0.0) {
                const auto diag = normality_diagnostics(errs, 0.0);
                row.qq_correlation = diag.qq_correlation;
                result.qq_data[{n, param}] = diag;
            }
            result.summary.push_back(std::move(row));
        }
        if (errors.empty() && failures > 0) {
            SummaryRow row;
            row.n = n;
            row.parameter = "(none)";
            row.n_failures = failures;
            result.summary.push_back(std::move(row));
        }
    }
    return result;
}

inline void write_replicates_csv(const SimResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::ConfigInvalid, "cannot open '" + path + "' for writing");
    out << "n,replicate,parameter,estimate,truth,failure_code\n";
    for (const auto& record : result.replicates) {
        if (record.failure_code != 0) {
            out << record.n << ',' << record.replicate << ',' << record.failure_name << ",,,"
                << record.failure_code << '\n';
            continue;
        }
        for (const auto& [param, est] : record.estimates) {
            std::string truth_key = param;
            const std::string suffix = "_mu0";
            if (truth_key.size() > suffix.size() &&
                truth_key.compare(truth_key.size() - suffix.size(), suffix.size(), suffix) == 0) {
                truth_key = truth_key.substr(0, truth_key.size() - suffix.size());
            }
            auto it = record.truth.find(truth_key);
            out << record.n << ',' << record.replicate << ',' << param << ','
                << format_double(est) << ','
                << (it != record.truth.end() ? format_double(it->second) : std::string()) << ",0\n";
        }
    }
}

inline void write_summary_csv(const SimResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::ConfigInvalid, "cannot open '" + path + "' for writing");
    out << "n,parameter,sqrtn_bias,variance,mse,qq_correlation,n_failures\n";
    for (const auto& row : result.summary) {
        out << row.n << ',' << row.parameter << ',' << format_double(row.sqrtn_bias) << ','
            << format_double(row.variance) << ',' << format_double(row.mse) << ','
            << (std::isnan(row.qq_correlation) ? std::string()
                                               : format_double(row.qq_correlation))
            << ',' << row.n_failures << '\n';
    }
}

inline void write_qq_csv(const QqDiagnostics& diag, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::ConfigInvalid, "cannot open '" + path + "' for writing");
    out << "normal_quantile,standardized\n";
    for (const auto& [q, v] : diag.pairs) {
        out << format_double(q) << ',' << format_double(v) << '\n';
    }
}

}  // namespace momglm
