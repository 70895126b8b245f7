#include "oracles.hpp"

#include "pbl/blr.hpp"
#include "pbl/losses.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

pbl::DesignMatrix one_point(double x, double y) {
    return pbl::DesignMatrix(Eigen::MatrixXd::Constant(1, 1, x), Eigen::VectorXd::Constant(1, y));
}

const pbl::ModelConfig kUnit{1.0, 1.0};

TEST(Posterior, EmptySampleRecoversPrior) {
    const pbl::DesignMatrix empty(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0));
    const auto post = pbl::fit_posterior(empty, kUnit);
    EXPECT_TRUE(post.precision().isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-15));
    EXPECT_EQ(post.mean(), Eigen::VectorXd::Zero(2));
}

TEST(Posterior, SinglePoint) {
    const auto post = pbl::fit_posterior(one_point(1.0, 1.0), kUnit);
    EXPECT_NEAR(post.precision()(0, 0), 2.0, 1e-14);
    EXPECT_NEAR(post.mean()[0], 0.5, 1e-14);
}

TEST(Posterior, MatchesRidgeGradientDescent) {
    const auto inst = oracle::random_instance(1, 50, 5);
    const auto post = pbl::fit_posterior(pbl::DesignMatrix(inst.phi, inst.y), {inst.s2, inst.sp2});
    const Eigen::VectorXd w = oracle::ridge_gradient_descent(inst.phi, inst.y, inst.s2, inst.sp2);
    EXPECT_LE((post.mean() - w).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Posterior, CholeskyHasPositiveDiagonal) {
    const auto inst = oracle::random_instance(2, 8, 4);
    const auto post = pbl::fit_posterior(pbl::DesignMatrix(inst.phi, inst.y), {inst.s2, inst.sp2});
    EXPECT_GT(post.chol_precision().diagonal().minCoeff(), 0.0);
    Eigen::MatrixXd a = inst.phi.transpose() * inst.phi / inst.s2;
    a.diagonal().array() += 1.0 / inst.sp2;
    EXPECT_TRUE(post.precision().isApprox(a, 1e-12));
    EXPECT_NEAR(post.trace_covariance(), a.inverse().trace(), 1e-12);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(4, -1.0, 2.0);
    EXPECT_NEAR(post.covariance_quadratic(x), x.dot(a.inverse() * x), 1e-12);
}

TEST(Posterior, RejectsBadFactor) {
    EXPECT_THROW(pbl::GaussianPosterior(Eigen::VectorXd::Zero(1), -Eigen::MatrixXd::Identity(1, 1)),
                 std::invalid_argument);
    EXPECT_THROW(pbl::GaussianPosterior(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(1, 1)),
                 std::invalid_argument);
}

TEST(ModelConfig, Validation) {
    EXPECT_THROW(pbl::ModelConfig({0.0, 1.0}).validate(), std::invalid_argument);
    EXPECT_THROW(pbl::ModelConfig({1.0, -2.0}).validate(), std::invalid_argument);
    EXPECT_NO_THROW(kUnit.validate());
}

TEST(NegLogEvidence, EmptySample) {
    const pbl::DesignMatrix empty(Eigen::MatrixXd(0, 3), Eigen::VectorXd(0));
    EXPECT_NEAR(pbl::neg_log_evidence(empty, kUnit), 0.0, 1e-15);
}

TEST(NegLogEvidence, SinglePoint) {
    // -ln N(1 | 0, 2) = ln(4 pi)/2 + 1/4
    EXPECT_NEAR(pbl::neg_log_evidence(one_point(1.0, 1.0), kUnit), 1.5155121234846454, 1e-12);
    EXPECT_NEAR(pbl::neg_log_evidence(one_point(0.0, 0.0), kUnit), 0.91893853320467274, 1e-12);
}

TEST(NegLogEvidence, MatchesDenseMarginal) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = oracle::random_instance(seed, 5 + 3 * seed, 1 + seed % 6);
        const double expected = oracle::marginal_neg_log_density(inst.phi, inst.y, inst.s2, inst.sp2);
        const double got = pbl::neg_log_evidence(pbl::DesignMatrix(inst.phi, inst.y), {inst.s2, inst.sp2});
        EXPECT_NEAR(got, expected, 1e-9 * std::max(1.0, std::abs(expected))) << "seed " << seed;
    }
}

TEST(NegLogEvidence, MatchesSequentialPredictive) {
    const auto inst = oracle::random_instance(4, 40, 1);
    const double expected =
        oracle::sequential_neg_log_evidence(inst.phi.col(0), inst.y, inst.s2, inst.sp2);
    EXPECT_NEAR(pbl::neg_log_evidence(pbl::DesignMatrix(inst.phi, inst.y), {inst.s2, inst.sp2}),
                expected, 1e-10);
}

TEST(Kl, PriorAgainstItself) {
    EXPECT_NEAR(pbl::gaussian_kl(pbl::GaussianPosterior::prior(3, {1.0, 2.5}), {1.0, 2.5}), 0.0, 1e-15);
}

TEST(Kl, SinglePoint) {
    const auto post = pbl::fit_posterior(one_point(1.0, 1.0), kUnit);
    EXPECT_NEAR(pbl::gaussian_kl(post, kUnit), 0.22157359027997265, 1e-12);
}

TEST(Kl, MatchesDenseOracleAndPositive) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto inst = oracle::random_instance(seed + 100, 12, 1 + seed % 5);
        const pbl::ModelConfig cfg{inst.s2, inst.sp2};
        const auto post = pbl::fit_posterior(pbl::DesignMatrix(inst.phi, inst.y), cfg);
        const Eigen::Index d = inst.phi.cols();
        const double expected = oracle::gaussian_kl(post.mean(), post.covariance(), Eigen::VectorXd::Zero(d),
                                                    inst.sp2 * Eigen::MatrixXd::Identity(d, d));
        const double got = pbl::gaussian_kl(post, cfg);
        EXPECT_NEAR(got, expected, 1e-10);
        EXPECT_GT(got, 0.0);
    }
}

TEST(GibbsEmpirical, SinglePoint) {
    const auto design = one_point(1.0, 1.0);
    const auto post = pbl::fit_posterior(design, kUnit);
    EXPECT_NEAR(pbl::gibbs_expected_empirical_nll(post, design, kUnit), 1.2939385332046727, 1e-12);
}

TEST(GibbsEmpirical, EmptySample) {
    const pbl::DesignMatrix empty(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0));
    const auto post = pbl::fit_posterior(empty, kUnit);
    EXPECT_EQ(pbl::gibbs_expected_empirical_nll(post, empty, kUnit), 0.0);
}

TEST(GibbsEmpirical, MatchesMonteCarlo) {
    const auto inst = oracle::random_instance(7, 30, 4);
    const pbl::ModelConfig cfg{inst.s2, inst.sp2};
    const pbl::DesignMatrix design(inst.phi, inst.y);
    const auto post = pbl::fit_posterior(design, cfg);
    const Eigen::Index m = 100000;
    const Eigen::MatrixXd w = oracle::dense_gaussian_draws(post.mean(), post.covariance(), m, 5);
    Eigen::VectorXd totals(m);
    for (Eigen::Index k = 0; k < m; ++k) totals[k] = pbl::total_nll(w.col(k), design, cfg);
    const double mean = totals.mean();
    const double se = std::sqrt((totals.array() - mean).square().sum() / (m - 1) / m);
    EXPECT_NEAR(pbl::gibbs_expected_empirical_nll(post, design, cfg), mean, 4.0 * se);
}

TEST(EvidenceDecomposition, SinglePoint) {
    const auto r = pbl::evidence_decomposition(one_point(1.0, 1.0), kUnit);
    EXPECT_NEAR(r.gibbs_emp_risk_total, 1.2939385332046727, 1e-12);
    EXPECT_NEAR(r.kl, 0.22157359027997265, 1e-12);
    EXPECT_NEAR(r.neg_log_evidence, 1.5155121234846454, 1e-12);
    EXPECT_EQ(r.n, 1);
    EXPECT_EQ(r.d, 1);
}

TEST(EvidenceDecomposition, EmptySample) {
    const auto r = pbl::evidence_decomposition(pbl::DesignMatrix(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)),
                                               kUnit);
    EXPECT_NEAR(r.neg_log_evidence, 0.0, 1e-15);
    EXPECT_NEAR(r.gibbs_emp_risk_total, 0.0, 1e-15);
    EXPECT_NEAR(r.kl, 0.0, 1e-15);
}

TEST(EvidenceDecomposition, IllConditionedPolynomials) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        pbl::SineTaskSpec spec;
        spec.seed = seed;
        const auto data = pbl::gen_sine_task(spec);
        for (int degree = 1; degree <= 7; ++degree) {
            const auto r = pbl::evidence_decomposition(pbl::polynomial_design(data, degree), {0.5, 200.0});
            EXPECT_NEAR(r.neg_log_evidence, r.gibbs_emp_risk_total + r.kl,
                        1e-8 * std::max(1.0, std::abs(r.neg_log_evidence)));
        }
    }
}

TEST(Density, ScalarExample) {
    const auto post = pbl::fit_posterior(one_point(1.0, 1.0), kUnit);
    EXPECT_NEAR(pbl::log_gibbs_posterior_density(post, Eigen::VectorXd::Constant(1, 0.5)),
                -0.57236494292470009, 1e-12);
}

TEST(Density, ModeValue) {
    const auto inst = oracle::random_instance(9, 10, 3);
    const auto post = pbl::fit_posterior(pbl::DesignMatrix(inst.phi, inst.y), {inst.s2, inst.sp2});
    EXPECT_NEAR(pbl::log_gibbs_posterior_density(post, post.mean()),
                0.5 * post.log_det_precision() - 1.5 * oracle::kLog2Pi, 1e-12);
}

TEST(Density, RatioMatchesUnnormalizedGibbs) {
    const auto inst = oracle::random_instance(10, 15, 3);
    const pbl::ModelConfig cfg{inst.s2, inst.sp2};
    const pbl::DesignMatrix design(inst.phi, inst.y);
    const auto post = pbl::fit_posterior(design, cfg);
    pbl::Rng rng = pbl::make_rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::MatrixXd w = pbl::standard_normal_matrix(3, 2, rng);
        const double lhs = pbl::log_gibbs_posterior_density(post, w.col(0)) -
                           pbl::log_gibbs_posterior_density(post, w.col(1));
        const double rhs = (pbl::log_prior_density(w.col(0), cfg) - pbl::total_nll(w.col(0), design, cfg)) -
                           (pbl::log_prior_density(w.col(1), cfg) - pbl::total_nll(w.col(1), design, cfg));
        EXPECT_NEAR(lhs, rhs, 1e-8);
    }
}

TEST(HeldOutRisk, MatchesAveragedExpectation) {
    const auto inst = oracle::random_instance(12, 20, 2);
    const pbl::ModelConfig cfg{inst.s2, inst.sp2};
    const pbl::DesignMatrix design(inst.phi, inst.y);
    const auto post = pbl::fit_posterior(design, cfg);
    EXPECT_NEAR(pbl::gibbs_nll_risk_on(post, design, cfg),
                pbl::gibbs_expected_empirical_nll(post, design, cfg) / 20.0, 1e-12);
}

}  // namespace
