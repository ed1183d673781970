#pragma once

#include <Eigen/Dense>
#include <vector>

#include "momglm/ustat.hpp"

namespace momglm {

// Brute-force reference implementations. They deliberately take the slow
// route (ordered-pair loops, explicit matrix inverse) so the fast paths can
// be checked against an independent computation. Used by the self-test
// command and the test suite only.

inline double naive_ustat_bilinear(const Dataset& ds, const Eigen::VectorXd& f,
                                   const Eigen::VectorXd& g, const Eigen::MatrixXd& sigma) {
    const Eigen::MatrixXd omega = sigma.inverse();
    const Eigen::Index n = ds.n();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const Eigen::VectorXd wj = omega * ds.x.row(j).transpose();
            const Eigen::VectorXd wi = omega * ds.x.row(i).transpose();
            const double kernel = f(i) * ds.x.row(i).dot(wj) * g(j);
            const double swapped = f(j) * ds.x.row(j).dot(wi) * g(i);
            sum += 0.5 * (kernel + swapped);
        }
    }
    return sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

inline double naive_ustat_direction(const Dataset& ds, const Eigen::VectorXd& f, Eigen::Index j,
                                    const Eigen::MatrixXd& sigma) {
    const Eigen::MatrixXd omega = sigma.inverse();
    const Eigen::Index n = ds.n();
    const Eigen::VectorXd w = omega.col(j - 1);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        sum += f(i) * ds.x.row(i).dot(w);
    }
    return sum / static_cast<double>(n);
}

inline MomentSet naive_collect_moments(const Dataset& ds, const Eigen::MatrixXd& sigma,
                                       Estimand estimand,
                                       const std::vector<Eigen::Index>& coords = {}) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ds.n());
    MomentSet ms;
    auto bil = [&](const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
        return naive_ustat_bilinear(ds, f, g, sigma);
    };
    switch (estimand) {
        case Estimand::Glm0:
            ms.set("m_XY2", bil(ds.y, ds.y), 2);
            break;
        case Estimand::Glm:
            ms.set("m_Y", ds.y.mean(), 1);
            ms.set("m_X2", bil(ones, ones), 2);
            ms.set("m_XY_X", bil(ds.y, ones), 2);
            ms.set("m_XY2", bil(ds.y, ds.y), 2);
            break;
        case Estimand::Ce: {
            const Eigen::VectorXd ay = ds.a->cwiseProduct(ds.y);
            ms.set("m_A", ds.a->mean(), 1);
            ms.set("m_Y", ds.y.mean(), 1);
            ms.set("m_AY", ay.mean(), 1);
            ms.set("m_X2", bil(ones, ones), 2);
            ms.set("m_XA_X", bil(*ds.a, ones), 2);
            ms.set("m_XA2", bil(*ds.a, *ds.a), 2);
            ms.set("m_XA_XY", bil(*ds.a, ds.y), 2);
            ms.set("m_XAY_XA", bil(ay, *ds.a), 2);
            break;
        }
        case Estimand::Mar: {
            const Eigen::VectorXd ay = ds.a->cwiseProduct(ds.y);
            ms.set("m_A", ds.a->mean(), 1);
            ms.set("m_X2", bil(ones, ones), 2);
            ms.set("m_XA_X", bil(*ds.a, ones), 2);
            ms.set("m_XA2", bil(*ds.a, *ds.a), 2);
            ms.set("m_AY", ay.mean(), 1);
            ms.set("m_XAY_X", bil(ay, ones), 2);
            break;
        }
        case Estimand::Gcm:
            ms.set("m_A", ds.a->mean(), 1);
            ms.set("m_Y", ds.y.mean(), 1);
            ms.set("m_X2", bil(ones, ones), 2);
            ms.set("m_XA_X", bil(*ds.a, ones), 2);
            ms.set("m_XY_X", bil(ds.y, ones), 2);
            ms.set("m_XA2", bil(*ds.a, *ds.a), 2);
            ms.set("m_XY2", bil(ds.y, ds.y), 2);
            ms.set("m_XA_XY", bil(*ds.a, ds.y), 2);
            break;
    }
    for (Eigen::Index j : coords) {
        ms.set(beta_moment_name(j), naive_ustat_direction(ds, ds.y, j, sigma), 1);
        ms.set(nu_moment_name(j), naive_ustat_direction(ds, ones, j, sigma), 1);
    }
    return ms;
}

}  // namespace momglm
