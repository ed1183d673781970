#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "momglm/csv.hpp"
#include "momglm/errors.hpp"

namespace momglm {

/// Immutable n x p design plus response vector(s). `a` is the optional second
/// response (treatment / missingness indicator / auxiliary outcome).
struct Dataset {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::optional<Eigen::VectorXd> a;

    Eigen::Index n() const { return x.rows(); }
    Eigen::Index p() const { return x.cols(); }

    void validate() const {
        if (x.rows() == 0 || x.cols() == 0) {
            raise(ErrorCode::EmptyDataset, "design matrix is empty");
        }
        if (y.size() != x.rows()) {
            raise(ErrorCode::DimensionMismatch, "response length differs from row count");
        }
        if (a && a->size() != x.rows()) {
            raise(ErrorCode::DimensionMismatch, "column a length differs from row count");
        }
        if (!x.allFinite() || !y.allFinite() || (a && !a->allFinite())) {
            raise(ErrorCode::CsvInvalid, "dataset contains non-finite entries");
        }
    }
};

enum class DesignMode { KnownSigma, UnknownSigmaSplit };

/// Known design covariance with a cached Cholesky factorization. Inverse
/// applications always go through triangular solves, never an explicit
/// inverse. `mu_known_zero` selects the zero-mean moment system.
class DesignModel {
public:
    static DesignModel known_sigma(Eigen::MatrixXd sigma, bool mu_known_zero = false) {
        DesignModel m;
        m.mode_ = DesignMode::KnownSigma;
        m.mu_known_zero_ = mu_known_zero;
        const Eigen::Index p = sigma.rows();
        if (sigma.cols() != p) {
            raise(ErrorCode::DimensionMismatch, "sigma must be square");
        }
        if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
            raise(ErrorCode::SingularSigma, "sigma is not symmetric to 1e-10");
        }
        m.is_identity_ = sigma.isIdentity(1e-14);
        m.sigma_ = std::move(sigma);
        if (!m.is_identity_) {
            m.llt_.compute(m.sigma_);
            if (m.llt_.info() != Eigen::Success) {
                raise(ErrorCode::SingularSigma, "sigma factorization failed (not positive definite)");
            }
        }
        return m;
    }

    static DesignModel identity_sigma(Eigen::Index p, bool mu_known_zero = false) {
        return known_sigma(Eigen::MatrixXd::Identity(p, p), mu_known_zero);
    }

    static DesignModel unknown_sigma_split(bool mu_known_zero = true) {
        DesignModel m;
        m.mode_ = DesignMode::UnknownSigmaSplit;
        m.mu_known_zero_ = mu_known_zero;
        return m;
    }

    DesignMode mode() const { return mode_; }
    bool mu_known_zero() const { return mu_known_zero_; }
    bool is_identity() const { return is_identity_; }
    Eigen::Index dim() const { return sigma_.rows(); }
    const Eigen::MatrixXd& sigma() const { return sigma_; }

    /// Sigma^{-1} v by triangular solves.
    Eigen::VectorXd solve(const Eigen::VectorXd& v) const {
        require_known();
        if (v.size() != sigma_.rows()) {
            raise(ErrorCode::DimensionMismatch, "vector length differs from sigma dimension");
        }
        if (is_identity_) return v;
        return llt_.solve(v);
    }

    Eigen::MatrixXd solve_matrix(const Eigen::MatrixXd& m) const {
        require_known();
        if (m.rows() != sigma_.rows()) {
            raise(ErrorCode::DimensionMismatch, "matrix rows differ from sigma dimension");
        }
        if (is_identity_) return m;
        return llt_.solve(m);
    }

private:
    void require_known() const {
        if (mode_ != DesignMode::KnownSigma) {
            raise(ErrorCode::SingularSigma, "design model has no stored sigma");
        }
    }

    DesignMode mode_ = DesignMode::KnownSigma;
    bool mu_known_zero_ = false;
    bool is_identity_ = false;
    Eigen::MatrixXd sigma_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Reads a dataset from CSV. Header row is required: column `y`, optional
/// column `a`, covariate columns `x1..xp` in that order. Non-finite tokens
/// are rejected.
inline Dataset load_dataset_csv(const std::string& path) {
    const auto rows = read_csv_file(path);
    if (rows.size() < 2) {
        raise(ErrorCode::CsvInvalid, "dataset file '" + path + "' needs a header and data rows");
    }
    const auto& header = rows.front();
    int y_col = -1;
    int a_col = -1;
    std::vector<int> x_cols;
    for (size_t c = 0; c < header.size(); ++c) {
        const std::string& name = header[c];
        if (name == "y") {
            if (y_col >= 0) raise(ErrorCode::CsvInvalid, "duplicate column 'y'");
            y_col = static_cast<int>(c);
        } else if (name == "a") {
            if (a_col >= 0) raise(ErrorCode::CsvInvalid, "duplicate column 'a'");
            a_col = static_cast<int>(c);
        } else if (name.size() >= 2 && name[0] == 'x') {
            const size_t expected = x_cols.size() + 1;
            if (name != "x" + std::to_string(expected)) {
                raise(ErrorCode::CsvInvalid,
                      "covariate columns must be x1..xp in order; got '" + name + "'");
            }
            x_cols.push_back(static_cast<int>(c));
        } else {
            raise(ErrorCode::CsvInvalid, "unexpected column '" + name + "'");
        }
    }
    if (y_col < 0) {
        raise(ErrorCode::CsvInvalid, "required column 'y' missing");
    }
    if (x_cols.empty()) {
        raise(ErrorCode::CsvInvalid, "no covariate columns x1..xp found");
    }

    const Eigen::Index n = static_cast<Eigen::Index>(rows.size()) - 1;
    const Eigen::Index p = static_cast<Eigen::Index>(x_cols.size());
    Dataset ds;
    ds.x.resize(n, p);
    ds.y.resize(n);
    if (a_col >= 0) ds.a = Eigen::VectorXd(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<size_t>(i) + 1];
        if (row.size() != header.size()) {
            raise(ErrorCode::CsvInvalid,
                  "row " + std::to_string(i + 2) + " has " + std::to_string(row.size()) +
                      " fields, expected " + std::to_string(header.size()));
        }
        const std::string ctx = "row " + std::to_string(i + 2) + " of '" + path + "'";
        ds.y(i) = parse_double(row[static_cast<size_t>(y_col)], ctx);
        if (a_col >= 0) (*ds.a)(i) = parse_double(row[static_cast<size_t>(a_col)], ctx);
        for (Eigen::Index j = 0; j < p; ++j) {
            ds.x(i, j) = parse_double(row[static_cast<size_t>(x_cols[static_cast<size_t>(j)])], ctx);
        }
    }
    ds.validate();
    return ds;
}

/// Reads a p x p covariance matrix from a headerless CSV of numbers.
inline Eigen::MatrixXd load_matrix_csv(const std::string& path) {
    const auto rows = read_csv_file(path);
    if (rows.empty()) {
        raise(ErrorCode::CsvInvalid, "matrix file '" + path + "' is empty");
    }
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<size_t>(i)].size()) != c) {
            raise(ErrorCode::CsvInvalid, "ragged matrix row in '" + path + "'");
        }
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = parse_double(rows[static_cast<size_t>(i)][static_cast<size_t>(j)],
                                   "matrix '" + path + "'");
        }
    }
    return m;
}

}  // namespace momglm
