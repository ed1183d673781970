#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "momglm/momglm.hpp"
#include "momglm/reference.hpp"
#include "momglm/run_config.hpp"

namespace {

using namespace momglm;

constexpr int kExitOk = 0;
constexpr int kExitSelftestFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

int exit_code_for(const Error& e) {
    return is_validation_error(e.code()) ? kExitValidation : kExitSolver;
}

std::vector<Eigen::Index> parse_coords(const std::string& spec) {
    std::vector<Eigen::Index> coords;
    if (spec.empty()) return coords;
    std::istringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            coords.push_back(std::stol(item));
        } catch (const std::exception&) {
            raise(ErrorCode::ConfigInvalid, "bad coordinate '" + item + "'");
        }
    }
    return coords;
}

void write_report(const EstimateReport& report, std::ostream& out) {
    out << "key,value\n";
    out << "estimand," << report.estimand << '\n';
    out << "mode," << mode_name(report.mode) << '\n';
    for (const auto& [key, value] : report.parameters) {
        out << key << ',' << format_double(value) << '\n';
    }
    out << "residual_norm," << format_double(report.solver.residual_norm) << '\n';
    out << "iterations," << report.solver.iterations << '\n';
    out << "projected," << (report.solver.projected ? 1 : 0) << '\n';
    out << "jacobian_condition," << format_double(report.solver.jacobian_condition) << '\n';
    out << "warning_projected," << (report.warning_projected ? 1 : 0) << '\n';
    for (const auto& [name, moment] : report.moments_used.all()) {
        out << "moment." << name << ',' << format_double(moment.value) << '\n';
    }
}

int cmd_estimate(const std::string& data_path, const std::string& estimand,
                 const std::string& link_name, const std::string& link_a_name,
                 const std::string& sigma_spec, const std::string& coords_spec,
                 const std::string& out_path) {
    const Dataset ds = load_dataset_csv(data_path);
    const auto coords = parse_coords(coords_spec);
    const LinkSpec link = find_link(link_name);
    const LinkSpec link_a = find_link(link_a_name.empty() ? link_name : link_a_name);

    auto make_design = [&](bool mu_zero) {
        if (sigma_spec == "identity") {
            return DesignModel::identity_sigma(ds.p(), mu_zero);
        }
        Eigen::MatrixXd sigma = load_matrix_csv(sigma_spec);
        if (sigma.rows() != ds.p()) {
            raise(ErrorCode::DimensionMismatch,
                  "sigma dimension " + std::to_string(sigma.rows()) +
                      " does not match p = " + std::to_string(ds.p()));
        }
        return DesignModel::known_sigma(std::move(sigma), mu_zero);
    };

    EstimateReport report;
    if (estimand == "glm0") {
        report = estimate_glm(ds, make_design(true), link, coords);
    } else if (estimand == "glm") {
        report = estimate_glm(ds, make_design(false), link, coords);
    } else if (estimand == "ce") {
        report = estimate_ce(ds, make_design(false), link);
    } else if (estimand == "mar") {
        report = estimate_mar(ds, make_design(false), link);
    } else if (estimand == "gcm") {
        report = estimate_gcm(ds, make_design(false), link_a, link);
    } else if (estimand == "linear-unknown-sigma") {
        report = estimate_linear_unknown_sigma(ds, coords);
    } else if (estimand == "glm-unknown-sigma") {
        report = estimate_glm_unknown_sigma(ds, link, coords);
    } else {
        raise(ErrorCode::ConfigInvalid, "unknown estimand '" + estimand + "'");
    }

    if (out_path.empty()) {
        write_report(report, std::cout);
    } else {
        std::ofstream out(out_path);
        if (!out) {
            raise(ErrorCode::ConfigInvalid, "cannot open '" + out_path + "' for writing");
        }
        write_report(report, out);
    }
    if (report.warning_projected) {
        std::cerr << "warning: solution was projected onto the parameter bounds\n";
    }
    return kExitOk;
}

std::string sanitize_for_filename(std::string s) {
    for (char& c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    }
    return s;
}

int cmd_simulate(const std::string& config_path, int threads) {
    const RunConfig config = parse_run_config(config_path);
    std::filesystem::create_directories(config.output_dir);
    const SimResult result = run_experiment(config.sim, threads);

    const auto dir = std::filesystem::path(config.output_dir);
    write_replicates_csv(result, (dir / "replicates.csv").string());
    write_summary_csv(result, (dir / "summary.csv").string());
    for (const auto& [key, diag] : result.qq_data) {
        const auto& [n, param] = key;
        write_qq_csv(diag, (dir / ("qq_" + sanitize_for_filename(param) + "_n" +
                                   std::to_string(n) + ".csv"))
                               .string());
    }

    std::cout << "n          parameter               sqrtn_bias     variance       mse"
                 "            qq_corr   failures\n";
    for (const auto& row : result.summary) {
        std::printf("%-10d %-22s %#14.6g %#14.6g %#14.6g %9.4f %7d\n", row.n,
                    row.parameter.c_str(), row.sqrtn_bias, row.variance, row.mse,
                    row.qq_correlation, row.n_failures);
    }
    std::cout << "wrote " << (dir / "replicates.csv").string() << ", "
              << (dir / "summary.csv").string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// selftest

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

CheckResult check_closed_forms() {
    CheckResult result{"quadrature closed forms", true, ""};
    double worst = 0.0;
    const LinkSpec loglin = loglinear_link();
    for (double lambda : {-2.0, -0.5, 0.0, 1.0, 2.0}) {
        for (double gamma2 : {0.05, 1.0, 2.2, 4.0}) {
            const double expected = std::exp(lambda + 0.5 * gamma2);
            for (int k = 0; k <= 3; ++k) {
                const double got = gaussian_link_moment(loglin, k, IndexLaw{lambda, gamma2});
                worst = std::max(worst, std::abs(got - expected));
            }
        }
    }
    if (worst > 1e-10) {
        result.pass = false;
        result.detail += "log-linear error " + format_double(worst) + "; ";
    }
    const LinkSpec probit = probit_link();
    double worst_probit = 0.0;
    for (double lambda : {-2.0, -0.5, 0.0, 1.0, 2.0}) {
        for (double gamma2 : {0.05, 1.0, 2.2, 4.0}) {
            const double denom = 1.0 + gamma2;
            const double f0_expected = 0.5 * std::erfc(-(lambda / std::sqrt(denom)) / std::sqrt(2.0));
            const double f1_expected =
                std::exp(-lambda * lambda / (2.0 * denom)) / std::sqrt(2.0 * M_PI * denom);
            worst_probit = std::max(
                worst_probit,
                std::abs(gaussian_link_moment(probit, 0, IndexLaw{lambda, gamma2}) - f0_expected));
            worst_probit = std::max(
                worst_probit,
                std::abs(gaussian_link_moment(probit, 1, IndexLaw{lambda, gamma2}) - f1_expected));
        }
    }
    if (worst_probit > 1e-8) {
        result.pass = false;
        result.detail += "probit error " + format_double(worst_probit) + "; ";
    }
    const LinkSpec logistic = logistic_link();
    double worst_logistic = 0.0;
    for (double gamma2 : {0.05, 0.7, 1.0, 2.5, 4.0}) {
        worst_logistic = std::max(
            worst_logistic,
            std::abs(gaussian_link_moment(logistic, 0, IndexLaw{0.0, gamma2}) - 0.5));
    }
    if (worst_logistic > 1e-12) {
        result.pass = false;
        result.detail += "logistic symmetry error " + format_double(worst_logistic) + "; ";
    }
    if (result.pass) {
        result.detail = "max errors: log-linear " + format_double(worst) + ", probit " +
                        format_double(worst_probit) + ", logistic " +
                        format_double(worst_logistic);
    }
    return result;
}

CheckResult check_derivative_identities() {
    CheckResult result{"derivative identities vs finite differences", true, ""};
    const double h = 1e-4;
    double worst = 0.0;
    for (const auto& [name, link] : link_registry()) {
        for (int k = 0; k <= 1; ++k) {
            for (int i = 0; i < 5; ++i) {
                for (int j = 0; j < 5; ++j) {
                    const double lambda = -2.0 + i;
                    const double gamma2 = 0.05 + j * (4.0 - 0.05) / 4.0;
                    const auto [dl, dg] =
                        gaussian_link_moment_grad(link, k, IndexLaw{lambda, gamma2});
                    const double fd_l =
                        (gaussian_link_moment(link, k, IndexLaw{lambda + h, gamma2}) -
                         gaussian_link_moment(link, k, IndexLaw{lambda - h, gamma2})) /
                        (2.0 * h);
                    const double fd_g =
                        (gaussian_link_moment(link, k, IndexLaw{lambda, gamma2 + h}) -
                         gaussian_link_moment(link, k, IndexLaw{lambda, gamma2 - h})) /
                        (2.0 * h);
                    worst = std::max({worst, std::abs(dl - fd_l), std::abs(dg - fd_g)});
                }
            }
        }
    }
    result.pass = worst <= 1e-6;
    result.detail = "max deviation " + format_double(worst);
    return result;
}

CheckResult check_ustat_enumeration() {
    CheckResult result{"u-statistic enumeration oracle", true, ""};
    double worst = 0.0;
    for (int instance = 0; instance < 20; ++instance) {
        CounterRng rng(97531, 0, static_cast<std::uint64_t>(instance), 0);
        const Eigen::Index n = 10 + static_cast<Eigen::Index>(rng.uniform() * 40);
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng.uniform() * 6);
        Dataset ds;
        ds.x.resize(n, p);
        ds.y.resize(n);
        ds.a = Eigen::VectorXd(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) ds.x(i, j) = rng.normal();
            ds.y(i) = rng.normal();
            (*ds.a)(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
        }
        Eigen::MatrixXd base(p, p);
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < p; ++j) base(i, j) = rng.normal();
        const Eigen::MatrixXd sigma =
            base * base.transpose() + Eigen::MatrixXd::Identity(p, p) * static_cast<double>(p);
        const DesignModel design = DesignModel::known_sigma(sigma);
        for (Estimand estimand :
             {Estimand::Glm0, Estimand::Glm, Estimand::Ce, Estimand::Mar, Estimand::Gcm}) {
            const MomentSet fast = collect_moments(ds, design, estimand, {1});
            const MomentSet slow = naive_collect_moments(ds, sigma, estimand, {1});
            for (const auto& [name, moment] : fast.all()) {
                const double denom = std::max(1.0, std::abs(slow.get(name)));
                worst = std::max(worst, std::abs(moment.value - slow.get(name)) / denom);
            }
        }
    }
    result.pass = worst <= 1e-12;
    result.detail = "max relative deviation " + format_double(worst);
    return result;
}

CheckResult check_round_trips() {
    CheckResult result{"forward/inverse round trips", true, ""};
    double worst = 0.0;
    for (const auto& name : {"logistic", "probit", "log-linear", "identity"}) {
        const LinkSpec link = find_link(name);
        for (double gamma2 : {0.3, 1.0, 2.7}) {
            const auto rep = glm0_invert(link, glm0_forward(link, gamma2));
            worst = std::max(worst, std::abs(rep.solution.at("gamma2") - gamma2));
        }
        for (double lambda : {-0.8, 0.0, 0.6}) {
            for (double gamma2 : {0.4, 1.4}) {
                const auto [m1, m2] = glm_forward(link, IndexLaw{lambda, gamma2});
                const auto rep = glm_invert(link, m1, m2);
                worst = std::max({worst, std::abs(rep.solution.at("lambda") - lambda),
                                  std::abs(rep.solution.at("gamma2") - gamma2)});
            }
        }
    }
    {
        const LinkSpec link = logistic_link();
        const CeParams truth{0.7, 0.2, 1.0, 0.1, 0.3};
        const CeForward fw = forward_ce_moments(link, truth, 0.4);
        const auto rep = solve_ce(fw.moments, link);
        worst = std::max({worst, std::abs(rep.solution.at("psi") - truth.psi),
                          std::abs(rep.solution.at("lambda_alpha") - truth.lambda_alpha),
                          std::abs(rep.solution.at("gamma2_alpha") - truth.gamma2_alpha),
                          std::abs(rep.solution.at("lambda_beta") - truth.lambda_beta),
                          std::abs(rep.solution.at("gamma_alpha_beta") - truth.gamma_alpha_beta),
                          std::abs(rep.solution.at("lambda_alpha_1") - fw.lambda_alpha_1),
                          std::abs(rep.solution.at("lambda_beta_1") - fw.lambda_beta_1)});
    }
    {
        const LinkSpec link = floored_logistic_link();
        const MarParams truth{0.7, 0.3, 1.0, 0.4};
        const MomentSet fw = forward_mar_moments(link, truth, 0.5);
        const auto rep = solve_mar(fw, link);
        worst = std::max({worst, std::abs(rep.solution.at("psi") - truth.psi),
                          std::abs(rep.solution.at("lambda_alpha") - truth.lambda_alpha),
                          std::abs(rep.solution.at("gamma2_alpha") - truth.gamma2_alpha),
                          std::abs(rep.solution.at("gamma_alpha_beta") - truth.gamma_alpha_beta)});
    }
    {
        const LinkSpec link = logistic_link();
        const GcmParams truth{0.2, 0.9, -0.1, 1.2, 0.35};
        const MomentSet fw = forward_gcm_moments(link, link, truth, 0.3);
        const auto rep = solve_gcm(fw, link, link);
        worst = std::max({worst, std::abs(rep.solution.at("lambda_alpha") - truth.lambda_alpha),
                          std::abs(rep.solution.at("gamma2_alpha") - truth.gamma2_alpha),
                          std::abs(rep.solution.at("lambda_beta") - truth.lambda_beta),
                          std::abs(rep.solution.at("gamma2_beta") - truth.gamma2_beta),
                          std::abs(rep.solution.at("gamma_alpha_beta") - truth.gamma_alpha_beta)});
    }
    result.pass = worst <= 1e-7;
    result.detail = "max parameter recovery error " + format_double(worst);
    return result;
}

// Reports the three consistency checks that pin the quadratic component of
// the two-component index map to f1^2 * gamma2 rather than f1 * gamma2.
CheckResult check_quadratic_component_convention(bool verbose) {
    CheckResult result{"quadratic-component convention", true, ""};
    const LinkSpec link = logistic_link();
    const double gamma2 = 1.3;
    const IndexLaw zero_mean{0.0, gamma2};
    const double f1 = gaussian_link_moment(link, 1, zero_mean);
    const double squared_convention = glm_forward(link, zero_mean).second;
    const double zero_mean_map = glm0_forward(link, gamma2);
    const double check1 = std::abs(squared_convention - zero_mean_map);
    const double alt1 = std::abs(f1 * gamma2 - zero_mean_map);

    const IndexLaw law{0.3, 1.0};
    const double m_x2 = 0.5;
    const MomentSet synth = forward_glm_moments(link, law, m_x2);
    const auto [m1, m2] = reduce_glm_moments(synth);
    const double f1_law = gaussian_link_moment(link, 1, law);
    const double check2 = std::abs(m2 - f1_law * f1_law * law.gamma2);
    const double alt2 = std::abs(m2 - f1_law * law.gamma2);

    const double h = 1e-5;
    const double fd =
        (glm_forward(link, IndexLaw{law.lambda, law.gamma2 + h}).second -
         glm_forward(link, IndexLaw{law.lambda, law.gamma2 - h}).second) /
        (2.0 * h);
    const double jac22 = glm_forward_jacobian(link, law)(1, 1);
    const double check3 = std::abs(fd - jac22);

    result.pass = check1 <= 1e-12 && check2 <= 1e-12 && check3 <= 1e-6 && alt1 > 1e-3 &&
                  alt2 > 1e-3;
    std::ostringstream detail;
    detail << "zero-mean agreement " << format_double(check1) << " (f1*g alternative off by "
           << format_double(alt1) << "); substitution residual " << format_double(check2)
           << " (alternative off by " << format_double(alt2) << "); jacobian(2,2) vs fd "
           << format_double(check3);
    result.detail = detail.str();
    if (verbose) {
        std::cout << "  convention report: " << result.detail << '\n';
    }
    return result;
}

CheckResult check_sampling_identities() {
    CheckResult result{"sampling identity suite", true, ""};
    double worst = 0.0;
    std::string worst_id;
    for (const auto& id : registered_identities()) {
        for (int point = 0; point < 2; ++point) {
            const OracleReport rep = stein_oracle_check(id, point, 1000000, 20240801);
            if (std::abs(rep.z) > std::abs(worst)) {
                worst = rep.z;
                worst_id = id + "@" + std::to_string(point);
            }
            if (std::abs(rep.z) > 4.0) {
                result.pass = false;
                result.detail += id + "@" + std::to_string(point) + " z=" + format_double(rep.z) +
                                 "; ";
            }
        }
    }
    if (result.pass) {
        result.detail = "worst |z| " + format_double(std::abs(worst)) + " at " + worst_id;
    }
    return result;
}

int cmd_selftest(bool quick) {
    std::vector<CheckResult> checks;
    checks.push_back(check_closed_forms());
    checks.push_back(check_derivative_identities());
    checks.push_back(check_ustat_enumeration());
    checks.push_back(check_round_trips());
    checks.push_back(check_quadratic_component_convention(true));
    if (!quick) {
        checks.push_back(check_sampling_identities());
    }
    bool all_pass = true;
    for (const auto& check : checks) {
        std::cout << (check.pass ? "ok   " : "FAIL ") << check.name << " — " << check.detail
                  << '\n';
        all_pass = all_pass && check.pass;
    }
    return all_pass ? kExitOk : kExitSelftestFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Method-of-moments estimation for high-dimensional GLM functionals"};
    app.require_subcommand(1);

    auto* estimate = app.add_subcommand("estimate", "Estimate from a dataset CSV");
    std::string data_path, estimand, link_name = "logistic", link_a_name, sigma_spec = "identity",
                           coords_spec, out_path;
    estimate->add_option("--data", data_path, "dataset CSV (header: y[,a],x1..xp)")->required();
    estimate
        ->add_option("--estimand", estimand,
                     "glm|glm0|ce|mar|gcm|linear-unknown-sigma|glm-unknown-sigma")
        ->required();
    estimate->add_option("--link", link_name, "link name (default logistic)");
    estimate->add_option("--link-a", link_a_name, "auxiliary-response link (gcm)");
    estimate->add_option("--sigma", sigma_spec, "covariance CSV path or 'identity'");
    estimate->add_option("--coords", coords_spec, "comma-separated coordinate list, 1-based");
    estimate->add_option("--out", out_path, "output CSV path (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "Run a simulation campaign from a config");
    std::string config_path;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    simulate->add_option("--config", config_path, "campaign config file")->required();
    simulate->add_option("--threads", threads, "worker count (default: available parallelism)");

    auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle checks");
    bool quick = false;
    selftest->add_flag("--quick", quick, "skip the Monte Carlo identity suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (estimate->parsed()) {
            return cmd_estimate(data_path, estimand, link_name, link_a_name, sigma_spec,
                                coords_spec, out_path);
        }
        if (simulate->parsed()) {
            return cmd_simulate(config_path, threads);
        }
        return cmd_selftest(quick);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSolver;
    }
}
