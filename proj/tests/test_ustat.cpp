#include <catch2/catch.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "momglm/moment_systems.hpp"
#include "momglm/reference.hpp"
#include "momglm/rng.hpp"
#include "momglm/ustat.hpp"

using namespace momglm;

namespace {

Dataset random_dataset(CounterRng& rng, Eigen::Index n, Eigen::Index p, bool with_a) {
    Dataset ds;
    ds.x.resize(n, p);
    ds.y.resize(n);
    if (with_a) ds.a = Eigen::VectorXd(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) ds.x(i, j) = rng.normal();
        ds.y(i) = rng.normal();
        if (with_a) (*ds.a)(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    return ds;
}

Eigen::MatrixXd random_spd(CounterRng& rng, Eigen::Index p) {
    Eigen::MatrixXd base(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) base(i, j) = rng.normal();
    return base * base.transpose() + Eigen::MatrixXd::Identity(p, p) * static_cast<double>(p);
}

}  // namespace

TEST_CASE("first-order mean", "[ustat]") {
    Eigen::VectorXd v(3);
    v << 1.0, 2.0, 3.0;
    CHECK(ustat_mean(v) == Approx(2.0));
    CHECK(ustat_mean(Eigen::VectorXd::Constant(17, 4.25)) == Approx(4.25));
    CounterRng rng(11, 0, 0, 0);
    Eigen::VectorXd r(101);
    double naive = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        r(i) = rng.normal();
        naive += r(i);
    }
    naive /= static_cast<double>(r.size());
    CHECK(ustat_mean(r) == Approx(naive).epsilon(1e-15));
    CHECK_THROWS_AS(ustat_mean(Eigen::VectorXd()), Error);
}

TEST_CASE("second-order bilinear statistic", "[ustat]") {
    SECTION("two-row hand instance") {
        Dataset ds;
        ds.x.resize(2, 2);
        ds.x << 1.0, 0.0, 1.0, 1.0;
        ds.y.resize(2);
        ds.y << 1.0, 2.0;
        const DesignModel design = DesignModel::identity_sigma(2);
        // kernel y1 * x1'x2 * y2 = 1 * 1 * 2 over the single unordered pair
        CHECK(ustat_bilinear(ds, ds.y, ds.y, design) == Approx(2.0));
    }
    SECTION("zero weights annihilate the kernel") {
        CounterRng rng(7, 0, 0, 0);
        Dataset ds = random_dataset(rng, 12, 3, false);
        const DesignModel design = DesignModel::identity_sigma(3);
        CHECK(ustat_bilinear(ds, Eigen::VectorXd::Zero(12), ds.y, design) == Approx(0.0));
    }
    SECTION("fast path matches ordered-pair enumeration") {
        CounterRng rng(13, 0, 0, 0);
        Dataset ds = random_dataset(rng, 40, 5, false);
        const Eigen::MatrixXd sigma = random_spd(rng, 5);
        const DesignModel design = DesignModel::known_sigma(sigma);
        const double fast = ustat_bilinear(ds, ds.y, ds.y, design);
        const double slow = naive_ustat_bilinear(ds, ds.y, ds.y, sigma);
        CHECK(fast == Approx(slow).epsilon(1e-12));
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(40);
        CHECK(ustat_bilinear(ds, ds.y, ones, design) ==
              Approx(naive_ustat_bilinear(ds, ds.y, ones, sigma)).epsilon(1e-12));
    }
    SECTION("dimension mismatch is rejected") {
        CounterRng rng(5, 0, 0, 0);
        Dataset ds = random_dataset(rng, 10, 3, false);
        const DesignModel design = DesignModel::identity_sigma(3);
        CHECK_THROWS_AS(ustat_bilinear(ds, Eigen::VectorXd::Zero(9), ds.y, design), Error);
        const DesignModel wrong = DesignModel::identity_sigma(4);
        CHECK_THROWS_AS(ustat_bilinear(ds, ds.y, ds.y, wrong), Error);
    }
    SECTION("degenerate covariance inputs are rejected") {
        Eigen::MatrixXd asym(2, 2);
        asym << 1.0, 0.2, 0.3, 1.0;
        CHECK_THROWS_AS(DesignModel::known_sigma(asym), Error);
        Eigen::MatrixXd indefinite(2, 2);
        indefinite << 1.0, 2.0, 2.0, 1.0;
        CHECK_THROWS_AS(DesignModel::known_sigma(indefinite), Error);
    }
}

TEST_CASE("directional first-order statistic", "[ustat]") {
    SECTION("rows aligned with a basis vector") {
        Dataset ds;
        ds.x = Eigen::MatrixXd::Zero(6, 4);
        ds.x.col(2).setOnes();
        ds.y = Eigen::VectorXd::Ones(6);
        const DesignModel design = DesignModel::identity_sigma(4);
        CHECK(ustat_direction(ds, Eigen::VectorXd::Ones(6), 3, design) == Approx(1.0));
        CHECK(ustat_direction(ds, Eigen::VectorXd::Zero(6), 3, design) == Approx(0.0));
    }
    SECTION("matches the explicit-inverse reference") {
        CounterRng rng(17, 0, 0, 0);
        Dataset ds = random_dataset(rng, 30, 4, false);
        const Eigen::MatrixXd sigma = random_spd(rng, 4);
        const DesignModel design = DesignModel::known_sigma(sigma);
        for (Eigen::Index j = 1; j <= 4; ++j) {
            CHECK(ustat_direction(ds, ds.y, j, design) ==
                  Approx(naive_ustat_direction(ds, ds.y, j, sigma)).epsilon(1e-10));
        }
    }
    SECTION("coordinate bounds") {
        CounterRng rng(19, 0, 0, 0);
        Dataset ds = random_dataset(rng, 10, 3, false);
        const DesignModel design = DesignModel::identity_sigma(3);
        CHECK_THROWS_AS(ustat_direction(ds, ds.y, 0, design), Error);
        CHECK_THROWS_AS(ustat_direction(ds, ds.y, 4, design), Error);
    }
}

TEST_CASE("moment collection per estimand", "[ustat]") {
    CounterRng rng(23, 0, 0, 0);
    Dataset ds = random_dataset(rng, 25, 4, true);
    const DesignModel design = DesignModel::identity_sigma(4);

    SECTION("zero-mean set is exactly the quadratic moment plus coordinates") {
        const MomentSet ms = collect_moments(ds, design, Estimand::Glm0, {2});
        CHECK(ms.size() == 3);
        CHECK(ms.has("m_XY2"));
        CHECK(ms.has("m_beta_2"));
        CHECK(ms.has("m_nu_2"));
        CHECK(ms.order("m_XY2") == 2);
        CHECK(ms.order("m_beta_2") == 1);
    }
    SECTION("missing-data set matches the chain") {
        const MomentSet ms = collect_moments(ds, design, Estimand::Mar);
        CHECK(ms.size() == 6);
        for (const char* name : {"m_A", "m_X2", "m_XA_X", "m_XA2", "m_AY", "m_XAY_X"}) {
            CHECK(ms.has(name));
        }
    }
    SECTION("zero responses zero out the response-bearing moments") {
        Dataset zero = ds;
        zero.y.setZero();
        const MomentSet ms = collect_moments(zero, design, Estimand::Glm);
        CHECK(ms.get("m_Y") == 0.0);
        CHECK(ms.get("m_XY_X") == 0.0);
        CHECK(ms.get("m_XY2") == 0.0);
        CHECK(ms.get("m_X2") != 0.0);
    }
    SECTION("estimands that need the auxiliary response reject its absence") {
        Dataset no_a = ds;
        no_a.a.reset();
        CHECK_THROWS_AS(collect_moments(no_a, design, Estimand::Ce), Error);
        CHECK_NOTHROW(collect_moments(no_a, design, Estimand::Glm));
    }
    SECTION("missing moment lookups are reported") {
        const MomentSet ms = collect_moments(ds, design, Estimand::Glm0);
        CHECK_THROWS_AS(ms.get("m_Y"), Error);
    }
}

TEST_CASE("row permutations leave every moment unchanged", "[ustat]") {
    CounterRng rng(29, 0, 0, 0);
    Dataset ds = random_dataset(rng, 20, 3, true);
    const Eigen::MatrixXd sigma = random_spd(rng, 3);
    const DesignModel design = DesignModel::known_sigma(sigma);
    Dataset shuffled;
    std::vector<Eigen::Index> perm(20);
    for (Eigen::Index i = 0; i < 20; ++i) perm[static_cast<std::size_t>(i)] = (7 * i + 3) % 20;
    shuffled.x.resize(20, 3);
    shuffled.y.resize(20);
    shuffled.a = Eigen::VectorXd(20);
    for (Eigen::Index i = 0; i < 20; ++i) {
        shuffled.x.row(i) = ds.x.row(perm[static_cast<std::size_t>(i)]);
        shuffled.y(i) = ds.y(perm[static_cast<std::size_t>(i)]);
        (*shuffled.a)(i) = (*ds.a)(perm[static_cast<std::size_t>(i)]);
    }
    for (Estimand estimand :
         {Estimand::Glm0, Estimand::Glm, Estimand::Ce, Estimand::Mar, Estimand::Gcm}) {
        const MomentSet base = collect_moments(ds, design, estimand, {1});
        const MomentSet perm_ms = collect_moments(shuffled, design, estimand, {1});
        for (const auto& [name, moment] : base.all()) {
            CHECK(perm_ms.get(name) == Approx(moment.value).margin(1e-12));
        }
    }
}

TEST_CASE("fast path equals enumeration across random instances", "[ustat]") {
    for (int instance = 0; instance < 25; ++instance) {
        CounterRng rng(31, 0, static_cast<std::uint64_t>(instance), 0);
        const Eigen::Index n = 8 + static_cast<Eigen::Index>(rng.uniform() * 42);
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng.uniform() * 6);
        Dataset ds = random_dataset(rng, n, p, true);
        const Eigen::MatrixXd sigma = random_spd(rng, p);
        const DesignModel design = DesignModel::known_sigma(sigma);
        for (Estimand estimand :
             {Estimand::Glm0, Estimand::Glm, Estimand::Ce, Estimand::Mar, Estimand::Gcm}) {
            const MomentSet fast = collect_moments(ds, design, estimand, {1});
            const MomentSet slow = naive_collect_moments(ds, sigma, estimand, {1});
            for (const auto& [name, moment] : fast.all()) {
                INFO("estimand " << estimand_name(estimand) << " moment " << name);
                const double reference = slow.get(name);
                const double scale = std::max(1.0, std::abs(reference));
                CHECK(std::abs(moment.value - reference) / scale <= 1e-12);
            }
        }
    }
}

TEST_CASE("quadratic response moment is unbiased under a logistic model", "[ustat][mc]") {
    // Fixed logistic model with known mean and covariance; the replicate
    // average of the second-order moment must sit within Monte Carlo noise of
    // the population value from the analytic chain.
    const Eigen::Index n = 500, p = 8;
    const LinkSpec logistic = logistic_link();
    Eigen::VectorXd beta(p), mu(p);
    beta << 0.5, -0.4, 0.3, 0.0, 0.2, -0.1, 0.6, -0.3;
    mu << 0.3, 0.0, -0.2, 0.1, 0.0, 0.0, 0.2, 0.0;
    const double lambda = beta.dot(mu);
    const double gamma2 = beta.squaredNorm();
    const double m_x2 = mu.squaredNorm();
    const double population = forward_glm_moments(logistic, {lambda, gamma2}, m_x2).get("m_XY2");

    const DesignModel design = DesignModel::identity_sigma(p);
    const int replicates = 2000;
    double sum = 0.0, sumsq = 0.0;
    for (int r = 0; r < replicates; ++r) {
        CounterRng rng(1009, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r), 0);
        Dataset ds;
        ds.x.resize(n, p);
        ds.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) ds.x(i, j) = mu(j) + rng.normal();
            ds.y(i) = rng.bernoulli(logistic.value(ds.x.row(i).dot(beta))) ? 1.0 : 0.0;
        }
        const double value = collect_moments(ds, design, Estimand::Glm).get("m_XY2");
        sum += value;
        sumsq += value * value;
    }
    const double mean = sum / replicates;
    const double sd = std::sqrt((sumsq / replicates - mean * mean));
    const double se = sd / std::sqrt(static_cast<double>(replicates));
    CHECK(std::abs(mean - population) <= 4.0 * se);
}

TEST_CASE("dataset csv ingestion", "[ustat]") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "momglm_test_csv";
    fs::create_directories(dir);

    SECTION("round trip with the a column") {
        const fs::path file = dir / "ok.csv";
        std::ofstream out(file);
        out << "y,a,x1,x2\n1.5,1,0.25,-0.5\n-0.5,0,1.0,2.0\n0.0,1,0.5,0.125\n";
        out.close();
        const Dataset ds = load_dataset_csv(file.string());
        CHECK(ds.n() == 3);
        CHECK(ds.p() == 2);
        CHECK(ds.y(0) == 1.5);
        REQUIRE(ds.a.has_value());
        CHECK((*ds.a)(2) == 1.0);
        CHECK(ds.x(1, 1) == 2.0);
    }
    SECTION("rejects non-finite tokens") {
        const fs::path file = dir / "nonfinite.csv";
        std::ofstream out(file);
        out << "y,x1\n1.0,nan\n2.0,0.5\n";
        out.close();
        CHECK_THROWS_AS(load_dataset_csv(file.string()), Error);
    }
    SECTION("requires y and ordered covariates") {
        const fs::path no_y = dir / "noy.csv";
        std::ofstream out1(no_y);
        out1 << "a,x1\n1,0.5\n0,0.25\n";
        out1.close();
        CHECK_THROWS_AS(load_dataset_csv(no_y.string()), Error);

        const fs::path bad_order = dir / "order.csv";
        std::ofstream out2(bad_order);
        out2 << "y,x2,x1\n1,0.5,0.25\n0,0.25,0.5\n";
        out2.close();
        CHECK_THROWS_AS(load_dataset_csv(bad_order.string()), Error);

        const fs::path unknown = dir / "unknown.csv";
        std::ofstream out3(unknown);
        out3 << "y,weight,x1\n1,2,0.5\n0,1,0.25\n";
        out3.close();
        CHECK_THROWS_AS(load_dataset_csv(unknown.string()), Error);
    }
}
