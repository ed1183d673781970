#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "momglm/errors.hpp"

namespace momglm {

/// A scalar link function together with its first three derivatives and the
/// interval of attainable values. Built-ins cover the usual GLM families;
/// user-supplied links only need to fill in the four handles.
struct LinkSpec {
    std::string name;
    std::function<double(double)> value;  // phi
    std::function<double(double)> d1;     // phi'
    std::function<double(double)> d2;     // phi''
    std::function<double(double)> d3;     // phi'''
    double range_lo = -std::numeric_limits<double>::infinity();
    double range_hi = std::numeric_limits<double>::infinity();

    double deriv(int order, double t) const {
        switch (order) {
            case 0: return value(t);
            case 1: return d1(t);
            case 2: return d2(t);
            case 3: return d3(t);
            default:
                raise(ErrorCode::InvalidOrder,
                      "derivative order " + std::to_string(order) + " not in 0..3");
        }
    }
};

namespace detail {

inline double expit(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

inline double std_normal_pdf(double t) {
    static const double inv_sqrt_2pi = 0.3989422804014326779399461;
    return inv_sqrt_2pi * std::exp(-0.5 * t * t);
}

inline double std_normal_cdf(double t) {
    return 0.5 * std::erfc(-t / std::sqrt(2.0));
}

}  // namespace detail

inline LinkSpec logistic_link() {
    LinkSpec s;
    s.name = "logistic";
    s.value = [](double t) { return detail::expit(t); };
    s.d1 = [](double t) {
        const double p = detail::expit(t);
        return p * (1.0 - p);
    };
    s.d2 = [](double t) {
        const double p = detail::expit(t);
        return p * (1.0 - p) * (1.0 - 2.0 * p);
    };
    s.d3 = [](double t) {
        const double p = detail::expit(t);
        return p * (1.0 - p) * (1.0 - 6.0 * p + 6.0 * p * p);
    };
    s.range_lo = 0.0;
    s.range_hi = 1.0;
    return s;
}

inline LinkSpec probit_link() {
    LinkSpec s;
    s.name = "probit";
    s.value = [](double t) { return detail::std_normal_cdf(t); };
    s.d1 = [](double t) { return detail::std_normal_pdf(t); };
    s.d2 = [](double t) { return -t * detail::std_normal_pdf(t); };
    s.d3 = [](double t) { return (t * t - 1.0) * detail::std_normal_pdf(t); };
    s.range_lo = 0.0;
    s.range_hi = 1.0;
    return s;
}

inline LinkSpec loglinear_link() {
    LinkSpec s;
    s.name = "log-linear";
    auto e = [](double t) { return std::exp(t); };
    s.value = e;
    s.d1 = e;
    s.d2 = e;
    s.d3 = e;
    s.range_lo = 0.0;
    return s;
}

inline LinkSpec identity_link() {
    LinkSpec s;
    s.name = "identity";
    s.value = [](double t) { return t; };
    s.d1 = [](double) { return 1.0; };
    s.d2 = [](double) { return 0.0; };
    s.d3 = [](double) { return 0.0; };
    return s;
}

/// offset + scale * expit(t). Used as a propensity/missingness link whose
/// probabilities are bounded away from 0 and 1 (floor 0.1, cap 1.0 by default).
inline LinkSpec floored_logistic_link(double offset = 0.1, double scale = 0.9) {
    LinkSpec s;
    s.name = "floored-logistic";
    LinkSpec base = logistic_link();
    s.value = [=](double t) { return offset + scale * base.value(t); };
    s.d1 = [=](double t) { return scale * base.d1(t); };
    s.d2 = [=](double t) { return scale * base.d2(t); };
    s.d3 = [=](double t) { return scale * base.d3(t); };
    s.range_lo = offset;
    s.range_hi = offset + scale;
    return s;
}

inline const std::map<std::string, LinkSpec>& link_registry() {
    static const std::map<std::string, LinkSpec> registry = {
        {"logistic", logistic_link()},
        {"probit", probit_link()},
        {"log-linear", loglinear_link()},
        {"identity", identity_link()},
        {"floored-logistic", floored_logistic_link()},
    };
    return registry;
}

inline LinkSpec find_link(const std::string& name) {
    const auto& reg = link_registry();
    auto it = reg.find(name);
    if (it == reg.end()) {
        raise(ErrorCode::ConfigInvalid, "unknown link '" + name + "'");
    }
    return it->second;
}

}  // namespace momglm
