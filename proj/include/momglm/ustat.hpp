#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "momglm/dataset.hpp"
#include "momglm/errors.hpp"

namespace momglm {

enum class Estimand { Glm0, Glm, Ce, Mar, Gcm };

inline const char* estimand_name(Estimand e) {
    switch (e) {
        case Estimand::Glm0: return "glm0";
        case Estimand::Glm: return "glm";
        case Estimand::Ce: return "ce";
        case Estimand::Mar: return "mar";
        case Estimand::Gcm: return "gcm";
    }
    return "?";
}

struct Moment {
    double value = 0.0;
    int ustat_order = 1;
};

/// Named collection of estimated population moments with their U-statistic
/// orders. Coordinate moments are keyed as m_beta_<j> / m_nu_<j> (1-based j).
class MomentSet {
public:
    void set(const std::string& name, double value, int order) {
        values_[name] = Moment{value, order};
    }

    bool has(const std::string& name) const { return values_.count(name) != 0; }

    double get(const std::string& name) const {
        auto it = values_.find(name);
        if (it == values_.end()) {
            raise(ErrorCode::MissingMoment, "moment '" + name + "' not in set");
        }
        return it->second.value;
    }

    int order(const std::string& name) const {
        auto it = values_.find(name);
        if (it == values_.end()) {
            raise(ErrorCode::MissingMoment, "moment '" + name + "' not in set");
        }
        return it->second.ustat_order;
    }

    const std::map<std::string, Moment>& all() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::map<std::string, Moment> values_;
};

inline std::string beta_moment_name(Eigen::Index j) { return "m_beta_" + std::to_string(j); }
inline std::string nu_moment_name(Eigen::Index j) { return "m_nu_" + std::to_string(j); }

/// First-order U-statistic: the empirical mean.
inline double ustat_mean(const Eigen::VectorXd& values) {
    if (values.size() == 0) {
        raise(ErrorCode::EmptyDataset, "mean of an empty vector");
    }
    return values.mean();
}

namespace detail {

// Per-row quadratic forms q_i = X_i' Sigma^{-1} X_i, shared by every
// second-order moment on the same dataset.
inline Eigen::VectorXd row_quadratics(const Dataset& ds, const DesignModel& design) {
    if (design.is_identity()) {
        return ds.x.rowwise().squaredNorm();
    }
    const Eigen::MatrixXd w = design.solve_matrix(ds.x.transpose());  // p x n
    Eigen::VectorXd q(ds.n());
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        q(i) = ds.x.row(i).dot(w.col(i));
    }
    return q;
}

// Symmetrized second-order U-statistic with kernel f_i X_i' Sigma^{-1} X_j g_j
// through the aggregated-vector identity: sums over all ordered pairs equal
// a' Sigma^{-1} b + b' Sigma^{-1} a minus the diagonal, over n(n-1).
inline double ustat_bilinear_with_q(const Dataset& ds, const Eigen::VectorXd& f,
                                    const Eigen::VectorXd& g, const DesignModel& design,
                                    const Eigen::VectorXd& q) {
    const Eigen::Index n = ds.n();
    const Eigen::VectorXd a = ds.x.transpose() * f;
    const Eigen::VectorXd b = ds.x.transpose() * g;
    const Eigen::VectorXd sib = design.solve(b);
    const Eigen::VectorXd sia = design.solve(a);
    const double cross = 0.5 * (a.dot(sib) + b.dot(sia));
    const double diagonal = (f.array() * g.array() * q.array()).sum();
    return (cross - diagonal) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace detail

/// Second-order U-statistic U_{n,2}[f_1 X_1' Sigma^{-1} X_2 g_2], symmetrized.
inline double ustat_bilinear(const Dataset& ds, const Eigen::VectorXd& f,
                             const Eigen::VectorXd& g, const DesignModel& design) {
    ds.validate();
    if (ds.n() < 2) {
        raise(ErrorCode::EmptyDataset, "second-order U-statistic needs n >= 2");
    }
    if (f.size() != ds.n() || g.size() != ds.n()) {
        raise(ErrorCode::DimensionMismatch, "weight vectors must have length n");
    }
    if (design.dim() != ds.p()) {
        raise(ErrorCode::DimensionMismatch, "sigma dimension differs from p");
    }
    return detail::ustat_bilinear_with_q(ds, f, g, design, detail::row_quadratics(ds, design));
}

/// First-order directional statistic (1/n) sum_i f_i X_i' Sigma^{-1} e_j,
/// with 1-based coordinate index j.
inline double ustat_direction(const Dataset& ds, const Eigen::VectorXd& f, Eigen::Index j,
                              const DesignModel& design) {
    ds.validate();
    if (j < 1 || j > ds.p()) {
        raise(ErrorCode::IndexOutOfRange, "coordinate " + std::to_string(j) + " not in 1..p");
    }
    if (f.size() != ds.n()) {
        raise(ErrorCode::DimensionMismatch, "weight vector must have length n");
    }
    if (design.dim() != ds.p()) {
        raise(ErrorCode::DimensionMismatch, "sigma dimension differs from p");
    }
    Eigen::VectorXd ej = Eigen::VectorXd::Zero(ds.p());
    ej(j - 1) = 1.0;
    const Eigen::VectorXd w = design.solve(ej);
    const Eigen::VectorXd a = ds.x.transpose() * f;
    return a.dot(w) / static_cast<double>(ds.n());
}

/// Computes exactly the moments appearing in the chosen estimand's moment
/// chain, plus m_beta_j / m_nu_j for each requested coordinate.
inline MomentSet collect_moments(const Dataset& ds, const DesignModel& design, Estimand estimand,
                                 const std::vector<Eigen::Index>& coords = {}) {
    ds.validate();
    if (ds.n() < 2) {
        raise(ErrorCode::EmptyDataset, "moment collection needs n >= 2");
    }
    const bool needs_a =
        estimand == Estimand::Ce || estimand == Estimand::Mar || estimand == Estimand::Gcm;
    if (needs_a && !ds.a) {
        raise(ErrorCode::MissingResponseA,
              std::string(estimand_name(estimand)) + " requires the response column a");
    }

    const Eigen::VectorXd q = detail::row_quadratics(ds, design);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ds.n());
    auto bilinear = [&](const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
        return detail::ustat_bilinear_with_q(ds, f, g, design, q);
    };

    MomentSet ms;
    switch (estimand) {
        case Estimand::Glm0:
            ms.set("m_XY2", bilinear(ds.y, ds.y), 2);
            break;
        case Estimand::Glm:
            ms.set("m_Y", ustat_mean(ds.y), 1);
            ms.set("m_X2", bilinear(ones, ones), 2);
            ms.set("m_XY_X", bilinear(ds.y, ones), 2);
            ms.set("m_XY2", bilinear(ds.y, ds.y), 2);
            break;
        case Estimand::Ce: {
            const Eigen::VectorXd& a = *ds.a;
            const Eigen::VectorXd ay = a.cwiseProduct(ds.y);
            ms.set("m_A", ustat_mean(a), 1);
            ms.set("m_Y", ustat_mean(ds.y), 1);
            ms.set("m_AY", ustat_mean(ay), 1);
            ms.set("m_X2", bilinear(ones, ones), 2);
            ms.set("m_XA_X", bilinear(a, ones), 2);
            ms.set("m_XA2", bilinear(a, a), 2);
            ms.set("m_XA_XY", bilinear(a, ds.y), 2);
            ms.set("m_XAY_XA", bilinear(ay, a), 2);
            break;
        }
        case Estimand::Mar: {
            const Eigen::VectorXd& a = *ds.a;
            const Eigen::VectorXd ay = a.cwiseProduct(ds.y);
            ms.set("m_A", ustat_mean(a), 1);
            ms.set("m_X2", bilinear(ones, ones), 2);
            ms.set("m_XA_X", bilinear(a, ones), 2);
            ms.set("m_XA2", bilinear(a, a), 2);
            ms.set("m_AY", ustat_mean(ay), 1);
            ms.set("m_XAY_X", bilinear(ay, ones), 2);
            break;
        }
        case Estimand::Gcm: {
            const Eigen::VectorXd& a = *ds.a;
            ms.set("m_A", ustat_mean(a), 1);
            ms.set("m_Y", ustat_mean(ds.y), 1);
            ms.set("m_X2", bilinear(ones, ones), 2);
            ms.set("m_XA_X", bilinear(a, ones), 2);
            ms.set("m_XY_X", bilinear(ds.y, ones), 2);
            ms.set("m_XA2", bilinear(a, a), 2);
            ms.set("m_XY2", bilinear(ds.y, ds.y), 2);
            ms.set("m_XA_XY", bilinear(a, ds.y), 2);
            break;
        }
    }
    for (Eigen::Index j : coords) {
        ms.set(beta_moment_name(j), ustat_direction(ds, ds.y, j, design), 1);
        ms.set(nu_moment_name(j), ustat_direction(ds, ones, j, design), 1);
    }
    return ms;
}

/// Optional cross-check moment for the missing-data chain: the second-order
/// statistic pairing the observed-outcome rows against the missingness
/// indicator. Not used by any solver.
inline double mar_crosscheck_moment(const Dataset& ds, const DesignModel& design) {
    if (!ds.a) {
        raise(ErrorCode::MissingResponseA, "cross-check moment requires column a");
    }
    return ustat_bilinear(ds, ds.a->cwiseProduct(ds.y), *ds.a, design);
}

}  // namespace momglm
