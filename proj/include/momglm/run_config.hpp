#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "momglm/dataset.hpp"
#include "momglm/simlab.hpp"

namespace momglm {

/// Parsed simulation campaign file: a sectioned key-value format with the
/// sections [model], [design], [sim], [output].
struct RunConfig {
    SimConfig sim;
    std::string output_dir;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline long parse_long(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        raise(ErrorCode::ConfigInvalid, "key '" + key + "' needs an integer, got '" + value + "'");
    }
}

inline bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    raise(ErrorCode::ConfigInvalid, "key '" + key + "' needs true/false, got '" + value + "'");
}

}  // namespace detail

inline RunConfig parse_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::ConfigInvalid, "cannot open config file '" + path + "'");
    }
    static const std::map<std::string, std::set<std::string>> schema = {
        {"model", {"estimand", "link", "link_a", "psi", "noise_sd"}},
        {"design", {"kind", "sigma", "mu"}},
        {"sim",
         {"n_grid", "ratio", "replicates", "seed", "coef_scheme", "freeze_coefficients",
          "coords", "mu_paths"}},
        {"output", {"dir"}},
    };

    RunConfig config;
    config.sim.n_grid.clear();
    std::string section;
    std::string sigma_path, mu_path;
    bool have_ratio = false, have_replicates = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                raise(ErrorCode::ConfigInvalid,
                      "malformed section header at line " + std::to_string(line_no));
            }
            section = line.substr(1, line.size() - 2);
            if (schema.find(section) == schema.end()) {
                raise(ErrorCode::ConfigInvalid, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || section.empty()) {
            raise(ErrorCode::ConfigInvalid,
                  "expected key = value inside a section at line " + std::to_string(line_no));
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!schema.at(section).count(key)) {
            raise(ErrorCode::ConfigInvalid, "unknown key '" + key + "' in [" + section + "]");
        }

        if (section == "model") {
            if (key == "estimand") config.sim.estimand = value;
            else if (key == "link") config.sim.link = value;
            else if (key == "link_a") config.sim.link_a = value;
            else if (key == "psi") config.sim.psi_true = parse_double(value, "config key psi");
            else config.sim.noise_sd = parse_double(value, "config key noise_sd");
        } else if (section == "design") {
            if (key == "kind") {
                if (value == "gaussian-identity") config.sim.design = DesignKind::GaussianIdentity;
                else if (value == "gaussian-general") config.sim.design = DesignKind::GaussianGeneral;
                else if (value == "rademacher") config.sim.design = DesignKind::Rademacher;
                else raise(ErrorCode::ConfigInvalid, "unknown design kind '" + value + "'");
            } else if (key == "sigma") {
                sigma_path = value;
            } else {
                mu_path = value;
            }
        } else if (section == "sim") {
            if (key == "n_grid") {
                for (const auto& item : detail::split_list(value)) {
                    config.sim.n_grid.push_back(static_cast<int>(detail::parse_long(item, key)));
                }
            } else if (key == "ratio") {
                config.sim.ratio = parse_double(value, "config key ratio");
                have_ratio = true;
            } else if (key == "replicates") {
                config.sim.replicates = static_cast<int>(detail::parse_long(value, key));
                have_replicates = true;
            } else if (key == "seed") {
                config.sim.seed = static_cast<std::uint64_t>(detail::parse_long(value, key));
            } else if (key == "coef_scheme") {
                if (value == "dense-uniform") config.sim.coef_scheme = CoefScheme::DenseUniform;
                else if (value == "sparse-root-p") config.sim.coef_scheme = CoefScheme::SparseRootP;
                else if (value == "single-spike") config.sim.coef_scheme = CoefScheme::SingleSpike;
                else raise(ErrorCode::ConfigInvalid, "unknown coef_scheme '" + value + "'");
            } else if (key == "freeze_coefficients") {
                config.sim.freeze_coefficients = detail::parse_bool(value, key);
            } else if (key == "coords") {
                for (const auto& item : detail::split_list(value)) {
                    config.sim.coords.push_back(detail::parse_long(item, key));
                }
            } else {
                config.sim.mu_paths = value;
            }
        } else {  // output
            config.output_dir = value;
        }
    }
    if (config.output_dir.empty()) {
        raise(ErrorCode::ConfigInvalid, "[output] dir is required");
    }
    if (config.sim.n_grid.empty() || !have_ratio || !have_replicates) {
        raise(ErrorCode::ConfigInvalid, "[sim] needs n_grid, ratio, and replicates");
    }
    if (config.sim.design == DesignKind::GaussianGeneral) {
        if (sigma_path.empty() || mu_path.empty()) {
            raise(ErrorCode::ConfigInvalid, "gaussian-general design needs sigma and mu files");
        }
        if (!std::filesystem::exists(sigma_path)) {
            raise(ErrorCode::ConfigInvalid, "sigma file '" + sigma_path + "' does not exist");
        }
        if (!std::filesystem::exists(mu_path)) {
            raise(ErrorCode::ConfigInvalid, "mu file '" + mu_path + "' does not exist");
        }
        config.sim.sigma = load_matrix_csv(sigma_path);
        const Eigen::MatrixXd mu_raw = load_matrix_csv(mu_path);
        config.sim.mu = mu_raw.rows() == 1 ? Eigen::VectorXd(mu_raw.row(0)) : Eigen::VectorXd(mu_raw.col(0));
    } else if (!sigma_path.empty() || !mu_path.empty()) {
        raise(ErrorCode::ConfigInvalid, "sigma/mu files only apply to the gaussian-general design");
    }

    if (const char* env_seed = std::getenv("MOMGLM_SEED")) {
        config.sim.seed = static_cast<std::uint64_t>(
            detail::parse_long(std::string(env_seed), "MOMGLM_SEED"));
    }
    config.sim.validate();
    return config;
}

}  // namespace momglm
