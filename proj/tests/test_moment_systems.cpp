#include <catch2/catch.hpp>
#include <cmath>

#include "momglm/moment_systems.hpp"
#include "momglm/rng.hpp"

using namespace momglm;

namespace {

LinkSpec sine_link() {
    LinkSpec s;
    s.name = "sine";
    s.value = [](double t) { return std::sin(t); };
    s.d1 = [](double t) { return std::cos(t); };
    s.d2 = [](double t) { return -std::sin(t); };
    s.d3 = [](double t) { return -std::cos(t); };
    return s;
}

}  // namespace

TEST_CASE("zero-mean quadratic map", "[systems]") {
    SECTION("identity link is the identity map") {
        CHECK(glm0_forward(identity_link(), 2.5) == Approx(2.5));
        CHECK(glm0_forward(logistic_link(), 0.0) == Approx(0.0));
    }
    SECTION("logistic value matches a monte carlo oracle") {
        const LinkSpec logistic = logistic_link();
        CounterRng rng(808, 0, 0, 0);
        const long n = 1000000;
        double sum = 0.0, sumsq = 0.0;
        for (long i = 0; i < n; ++i) {
            const double d = logistic.d1(rng.normal());
            sum += d;
            sumsq += d * d;
        }
        const double f1_hat = sum / n;
        const double f1_se = std::sqrt((sumsq / n - f1_hat * f1_hat) / n);
        const double value = glm0_forward(logistic, 1.0);
        // delta method on f1^2 * 1
        CHECK(std::abs(value - f1_hat * f1_hat) <= 3.0 * 2.0 * f1_hat * f1_se);
    }
}

TEST_CASE("zero-mean inversion", "[systems]") {
    SECTION("identity link inverts exactly") {
        const auto rep = glm0_invert(identity_link(), 2.5);
        CHECK(rep.solution.at("gamma2") == Approx(2.5).margin(1e-9));
        CHECK_FALSE(rep.projected);
    }
    SECTION("negative moment projects to the lower range endpoint") {
        SolveOptions opts;
        const auto rep = glm0_invert(logistic_link(), -0.1, opts);
        CHECK(rep.projected);
        CHECK(rep.solution.at("gamma2") == Approx(opts.gamma2_lo).margin(1e-10));
    }
    SECTION("large moment projects to the upper range endpoint") {
        SolveOptions opts;
        const auto rep = glm0_invert(logistic_link(), 100.0, opts);
        CHECK(rep.projected);
        CHECK(rep.solution.at("gamma2") == Approx(opts.gamma2_hi).margin(1e-6));
    }
    SECTION("round trip") {
        for (const char* name : {"logistic", "probit", "log-linear", "identity"}) {
            const LinkSpec link = find_link(name);
            const auto rep = glm0_invert(link, glm0_forward(link, 1.7));
            CHECK(rep.solution.at("gamma2") == Approx(1.7).margin(1e-8));
            CHECK_FALSE(rep.projected);
        }
    }
    SECTION("a non-monotone map is detected") {
        CHECK_THROWS_AS(glm0_invert(sine_link(), 0.2), Error);
    }
}

TEST_CASE("two-component index map", "[systems]") {
    SECTION("identity link") {
        const auto [m1, m2] = glm_forward(identity_link(), {0.3, 2.0});
        CHECK(m1 == Approx(0.3));
        CHECK(m2 == Approx(2.0));
    }
    SECTION("zero-mean reduction consistency") {
        const auto [m1, m2] = glm_forward(logistic_link(), {0.0, 1.0});
        CHECK(m1 == Approx(0.5).margin(1e-10));
        CHECK(m2 == Approx(glm0_forward(logistic_link(), 1.0)).margin(1e-10));
    }
    SECTION("log-linear closed form") {
        const auto [m1, m2] = glm_forward(loglinear_link(), {0.2, 0.5});
        CHECK(m1 == Approx(std::exp(0.45)).margin(1e-10));
        CHECK(m2 == Approx(std::exp(0.9) * 0.5).margin(1e-10));
    }
}

TEST_CASE("index-map inversion", "[systems]") {
    SECTION("identity link") {
        const auto rep = glm_invert(identity_link(), 0.3, 2.0);
        CHECK(rep.solution.at("lambda") == Approx(0.3).margin(1e-8));
        CHECK(rep.solution.at("gamma2") == Approx(2.0).margin(1e-8));
        CHECK_FALSE(rep.projected);
    }
    SECTION("probit closed-form instance") {
        const double m1 = detail::std_normal_cdf(0.5 / std::sqrt(3.0));
        const double f1 = std::exp(-0.25 / (2.0 * 3.0)) / std::sqrt(2.0 * M_PI * 3.0);
        const auto rep = glm_invert(probit_link(), m1, f1 * f1 * 2.0);
        CHECK(rep.solution.at("lambda") == Approx(0.5).margin(1e-7));
        CHECK(rep.solution.at("gamma2") == Approx(2.0).margin(1e-7));
    }
    SECTION("logistic round trip") {
        const auto [m1, m2] = glm_forward(logistic_link(), {-0.8, 1.4});
        const auto rep = glm_invert(logistic_link(), m1, m2);
        CHECK(rep.solution.at("lambda") == Approx(-0.8).margin(1e-7));
        CHECK(rep.solution.at("gamma2") == Approx(1.4).margin(1e-7));
    }
    SECTION("unattainable mean component projects at the boundary") {
        const auto rep = glm_invert(logistic_link(), 1.2, 0.05);
        CHECK(rep.projected);
    }
}

TEST_CASE("moment reduction", "[systems]") {
    SECTION("zero-mean collapse") {
        MomentSet ms;
        ms.set("m_Y", 0.0, 1);
        ms.set("m_X2", 0.0, 2);
        ms.set("m_XY_X", 0.0, 2);
        ms.set("m_XY2", 0.37, 2);
        const auto [m1, m2] = reduce_glm_moments(ms);
        CHECK(m1 == 0.0);
        CHECK(m2 == Approx(0.37));
    }
    SECTION("all zeros") {
        MomentSet ms;
        ms.set("m_Y", 0.0, 1);
        ms.set("m_X2", 0.0, 2);
        ms.set("m_XY_X", 0.0, 2);
        ms.set("m_XY2", 0.0, 2);
        const auto [m1, m2] = reduce_glm_moments(ms);
        CHECK(m1 == 0.0);
        CHECK(m2 == 0.0);
    }
    SECTION("population synthesis reduces to the squared-derivative component") {
        const LinkSpec logistic = logistic_link();
        const IndexLaw law{0.3, 1.0};
        const MomentSet ms = forward_glm_moments(logistic, law, 0.5);
        const auto [m1, m2] = reduce_glm_moments(ms);
        const double f1 = gaussian_link_moment(logistic, 1, law);
        CHECK(m1 == Approx(gaussian_link_moment(logistic, 0, law)).margin(1e-12));
        CHECK(m2 == Approx(f1 * f1 * law.gamma2).margin(1e-12));
    }
    SECTION("missing inputs are reported") {
        MomentSet ms;
        ms.set("m_Y", 0.1, 1);
        CHECK_THROWS_AS(reduce_glm_moments(ms), Error);
    }
}

TEST_CASE("treatment-effect staged solve", "[systems]") {
    const LinkSpec logistic = logistic_link();
    SECTION("round trip at the reference point") {
        const CeParams truth{0.7, 0.2, 1.0, 0.1, 0.3};
        const CeForward fw = forward_ce_moments(logistic, truth, 0.0);
        const auto rep = solve_ce(fw.moments, logistic);
        CHECK(rep.solution.at("psi") == Approx(0.7).margin(1e-7));
        CHECK(rep.solution.at("lambda_alpha") == Approx(0.2).margin(1e-7));
        CHECK(rep.solution.at("gamma2_alpha") == Approx(1.0).margin(1e-7));
        CHECK(rep.solution.at("lambda_beta") == Approx(0.1).margin(1e-7));
        CHECK(rep.solution.at("gamma_alpha_beta") == Approx(0.3).margin(1e-7));
        CHECK(rep.solution.at("lambda_alpha_1") == Approx(fw.lambda_alpha_1).margin(1e-7));
        CHECK(rep.solution.at("lambda_beta_1") == Approx(fw.lambda_beta_1).margin(1e-7));
        CHECK_FALSE(rep.projected);
    }
    SECTION("null effect with a zero outcome block is a fixed point") {
        const CeParams truth{0.0, 0.4, 0.9, 0.0, 0.0};
        const CeForward fw = forward_ce_moments(logistic, truth, 0.3);
        const auto rep = solve_ce(fw.moments, logistic);
        CHECK(rep.solution.at("psi") == Approx(0.0).margin(1e-9));
        CHECK(rep.solution.at("lambda_beta") == Approx(0.0).margin(1e-9));
        CHECK(rep.solution.at("gamma_alpha_beta") == Approx(0.0).margin(1e-9));
    }
    SECTION("identity-link instance solved by hand") {
        // f0 = lambda_alpha, f1 = 1, f2 = 0 for the identity propensity link;
        // every coefficient below is hand arithmetic.
        MomentSet ms;
        ms.set("m_A", 0.4, 1);
        ms.set("m_Y", 0.32, 1);
        ms.set("m_AY", 0.35, 1);
        ms.set("m_X2", 0.25, 2);
        ms.set("m_XA_X", 0.5, 2);
        ms.set("m_XA2", 1.16, 2);
        ms.set("m_XA_XY", 0.678, 2);
        ms.set("m_XAY_XA", 0.747, 2);
        const auto rep = solve_ce(ms, identity_link());
        CHECK(rep.solution.at("lambda_alpha") == Approx(0.4).margin(1e-8));
        CHECK(rep.solution.at("gamma2_alpha") == Approx(0.8).margin(1e-8));
        CHECK(rep.solution.at("lambda_alpha_1") == Approx(0.96).margin(1e-8));
        CHECK(rep.solution.at("psi") == Approx(0.3).margin(1e-8));
        CHECK(rep.solution.at("lambda_beta") == Approx(0.2).margin(1e-8));
        CHECK(rep.solution.at("gamma_alpha_beta") == Approx(0.15).margin(1e-8));
        CHECK(rep.solution.at("lambda_beta_1") == Approx(0.23).margin(1e-8));
    }
    SECTION("the linear stage is degenerate at a balanced zero-mean point") {
        // With m_A = 1/2, f2 = 0, and m_XA_X = 0 the four linear equations
        // have rank three, so the solve must refuse rather than pick a point.
        const CeParams truth{0.3, 0.0, 0.8, 0.2, 0.15};
        const CeForward fw = forward_ce_moments(logistic, truth, 0.0);
        CHECK_THROWS_AS(solve_ce(fw.moments, logistic), Error);
    }
}

TEST_CASE("missing-data staged solve", "[systems]") {
    const LinkSpec link = floored_logistic_link();
    SECTION("round trip") {
        const MarParams truth{0.7, 0.3, 1.0, 0.4};
        const MomentSet fw = forward_mar_moments(link, truth, 0.5);
        const auto rep = solve_mar(fw, link);
        CHECK(rep.solution.at("psi") == Approx(0.7).margin(1e-8));
        CHECK(rep.solution.at("lambda_alpha") == Approx(0.3).margin(1e-8));
        CHECK(rep.solution.at("gamma2_alpha") == Approx(1.0).margin(1e-8));
        CHECK(rep.solution.at("gamma_alpha_beta") == Approx(0.4).margin(1e-8));
    }
    SECTION("everyone observed leaves the index at the boundary") {
        MomentSet ms;
        ms.set("m_A", 1.0, 1);
        ms.set("m_X2", 0.3, 2);
        ms.set("m_XA_X", 0.3, 2);
        ms.set("m_XA2", 0.3, 2);
        ms.set("m_AY", 0.5, 1);
        ms.set("m_XAY_X", 0.65, 2);
        const auto rep = solve_mar(ms, link);
        CHECK(rep.projected);
    }
    SECTION("zero cross term reduces to the observed-mean ratio") {
        const MarParams truth{0.7, 0.25, 0.9, 0.0};
        const MomentSet fw = forward_mar_moments(link, truth, 0.4);
        const auto rep = solve_mar(fw, link);
        CHECK(rep.solution.at("psi") ==
              Approx(fw.get("m_AY") / fw.get("m_A")).margin(1e-9));
        CHECK(rep.solution.at("gamma_alpha_beta") == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("conditional-covariance staged solve", "[systems]") {
    SECTION("identity links with zero means return the cross term") {
        const LinkSpec ident = identity_link();
        const GcmParams truth{0.0, 0.8, 0.0, 1.1, 0.45};
        const MomentSet fw = forward_gcm_moments(ident, ident, truth, 0.0);
        const auto rep = solve_gcm(fw, ident, ident);
        CHECK(rep.solution.at("psi") ==
              Approx(rep.solution.at("gamma_alpha_beta")).margin(1e-8));
        CHECK(rep.solution.at("gamma_alpha_beta") == Approx(0.45).margin(1e-7));
    }
    SECTION("logistic round trip of the five index parameters") {
        const LinkSpec logistic = logistic_link();
        const GcmParams truth{0.2, 0.9, -0.1, 1.2, 0.35};
        const MomentSet fw = forward_gcm_moments(logistic, logistic, truth, 0.3);
        const auto rep = solve_gcm(fw, logistic, logistic);
        CHECK(rep.solution.at("lambda_alpha") == Approx(0.2).margin(1e-7));
        CHECK(rep.solution.at("gamma2_alpha") == Approx(0.9).margin(1e-7));
        CHECK(rep.solution.at("lambda_beta") == Approx(-0.1).margin(1e-7));
        CHECK(rep.solution.at("gamma2_beta") == Approx(1.2).margin(1e-7));
        CHECK(rep.solution.at("gamma_alpha_beta") == Approx(0.35).margin(1e-7));
    }
    SECTION("independent symmetric logistics give a quarter") {
        const LinkSpec logistic = logistic_link();
        const GcmParams truth{0.0, 1.0, 0.0, 1.0, 0.0};
        const MomentSet fw = forward_gcm_moments(logistic, logistic, truth, 0.0);
        const auto rep = solve_gcm(fw, logistic, logistic);
        CHECK(rep.solution.at("psi") == Approx(0.25).margin(1e-7));
    }
    SECTION("saturated sides abort with a degeneracy error") {
        // A fully saturated auxiliary response drives the index solves into
        // the flat tail of the probit map; the solver must refuse (either the
        // Jacobian-determinant guard or the derivative-product guard fires)
        // rather than extract a cross term from vanishing derivatives.
        const LinkSpec probit = probit_link();
        MomentSet ms;
        ms.set("m_A", 1.0, 1);
        ms.set("m_Y", 1.0, 1);
        ms.set("m_X2", 0.2, 2);
        ms.set("m_XA_X", 0.2, 2);
        ms.set("m_XY_X", 0.2, 2);
        ms.set("m_XA2", 0.2, 2);
        ms.set("m_XY2", 0.2, 2);
        ms.set("m_XA_XY", 0.2, 2);
        bool degenerate = false;
        try {
            solve_gcm(ms, probit, probit);
        } catch (const Error& e) {
            degenerate = e.code() == ErrorCode::DegenerateG1 ||
                         e.code() == ErrorCode::SingularJacobian;
        }
        CHECK(degenerate);
    }
}

TEST_CASE("analytic jacobian matches finite differences for every link", "[systems]") {
    const double h = 1e-4;
    for (const auto& [name, link] : link_registry()) {
        INFO("link " << name);
        double worst = 0.0;
        for (double lambda : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            for (double gamma2 : {0.05, 1.0, 2.0, 3.0, 4.0}) {
                const Eigen::Matrix2d j = glm_forward_jacobian(link, {lambda, gamma2});
                const auto fl = glm_forward(link, {lambda + h, gamma2});
                const auto fl2 = glm_forward(link, {lambda - h, gamma2});
                const auto fg = glm_forward(link, {lambda, gamma2 + h});
                const auto fg2 = glm_forward(link, {lambda, gamma2 - h});
                // normalized by the entry scale: the log-linear map reaches
                // e^{2 lambda + gamma2}, where absolute FD agreement at 1e-6
                // is unattainable
                auto gap = [](double analytic, double fd) {
                    return std::abs(analytic - fd) / std::max(1.0, std::abs(analytic));
                };
                worst = std::max(worst, gap(j(0, 0), (fl.first - fl2.first) / (2 * h)));
                worst = std::max(worst, gap(j(1, 0), (fl.second - fl2.second) / (2 * h)));
                worst = std::max(worst, gap(j(0, 1), (fg.first - fg2.first) / (2 * h)));
                worst = std::max(worst, gap(j(1, 1), (fg.second - fg2.second) / (2 * h)));
            }
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("jacobian determinant positivity and the probit closed form", "[systems]") {
    for (const auto& [name, link] : link_registry()) {
        INFO("link " << name);
        for (double lambda : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            for (double gamma2 : {0.05, 1.0, 2.0, 3.0, 4.0}) {
                CHECK(glm_forward_jacobian(link, {lambda, gamma2}).determinant() > 0.0);
            }
        }
    }
    const LinkSpec probit = probit_link();
    for (double lambda : {-1.5, -0.5, 0.0, 0.8, 1.5}) {
        for (double gamma2 : {0.1, 0.7, 1.5, 3.0}) {
            const double det = glm_forward_jacobian(probit, {lambda, gamma2}).determinant();
            const double denom = 1.0 + gamma2;
            const double expected = std::pow(2.0 * M_PI * denom, -1.5) *
                                    std::exp(-1.5 * lambda * lambda / denom) / denom;
            CHECK(det == Approx(expected).margin(1e-8));
        }
    }
}

TEST_CASE("round trips recover interior parameters", "[systems]") {
    for (const auto& [name, link] : link_registry()) {
        INFO("link " << name);
        for (double lambda : {-1.5, -0.5, 0.0, 0.7, 1.5}) {
            for (double gamma2 : {0.3, 0.9, 1.8, 3.0}) {
                const auto [m1, m2] = glm_forward(link, {lambda, gamma2});
                const auto rep = glm_invert(link, m1, m2);
                CHECK(std::abs(rep.solution.at("lambda") - lambda) <= 1e-7);
                CHECK(std::abs(rep.solution.at("gamma2") - gamma2) <= 1e-7);
                CHECK_FALSE(rep.projected);
            }
        }
    }
}

TEST_CASE("zero-mean consistency of the joint inversion", "[systems]") {
    const LinkSpec logistic = logistic_link();
    for (double gamma2 : {0.4, 1.0, 2.3}) {
        const double m1 = gaussian_link_moment(logistic, 0, {0.0, gamma2});
        const double m2 = glm0_forward(logistic, gamma2);
        const auto joint = glm_invert(logistic, m1, m2);
        const auto scalar = glm0_invert(logistic, m2);
        CHECK(std::abs(joint.solution.at("lambda")) <= 1e-7);
        CHECK(std::abs(joint.solution.at("gamma2") - scalar.solution.at("gamma2")) <= 1e-7);
    }
}
