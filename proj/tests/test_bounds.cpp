#include "oracles.hpp"

#include "pbl/bounds.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace {

// Reference values below were evaluated with 30-digit arithmetic.

TEST(Catoni, TrivialCase) {
    for (double a : {-1.0, 0.0, 2.5}) {
        EXPECT_NEAR(pbl::catoni_bound(a, 0.0, 7.0, 1.0, a, a + 3.0), a, 1e-14);
    }
}

TEST(Catoni, ReferenceValue) {
    EXPECT_NEAR(pbl::catoni_bound(0.2, 1.0, 100.0, 0.05, 0.0, 1.0), 0.33749664381613207, 1e-12);
}

TEST(Catoni, IncreasingInKl) {
    double prev = -std::numeric_limits<double>::infinity();
    for (double kl = 0.0; kl < 50.0; kl += 0.5) {
        const double v = pbl::catoni_bound(1.5, kl, 30.0, 0.05, 1.0, 4.0);
        EXPECT_GT(v, prev);
        EXPECT_LE(v, 4.0);
        prev = v;
    }
}

TEST(Catoni, Preconditions) {
    EXPECT_THROW(pbl::catoni_bound(5.0, 0.0, 1.0, 0.05, 1.0, 4.0), std::invalid_argument);
    EXPECT_THROW(pbl::catoni_bound(2.0, -1.0, 1.0, 0.05, 1.0, 4.0), std::invalid_argument);
    EXPECT_THROW(pbl::catoni_bound(2.0, 0.0, 1.0, 0.0, 1.0, 4.0), std::invalid_argument);
    EXPECT_THROW(pbl::catoni_bound(2.0, 0.0, 0.0, 0.5, 1.0, 4.0), std::invalid_argument);
    EXPECT_THROW(pbl::catoni_bound(2.0, 0.0, 1.0, 0.5, 4.0, 1.0), std::invalid_argument);
}

TEST(CatoniEvidence, TrivialCase) {
    const double a = 1.3;
    const double n = 12.0;
    EXPECT_NEAR(pbl::catoni_evidence_bound(n * a, n, 1.0, a, 4.0), a, 1e-12);
}

TEST(CatoniEvidence, ReferenceValue) {
    EXPECT_NEAR(pbl::catoni_evidence_bound(1.5155, 1.0, 0.05, 1.0, 4.0), 4.0629131800506025, 1e-12);
}

TEST(CatoniEvidence, LargeEvidenceStaysFinite) {
    const double v = pbl::catoni_evidence_bound(1.3e6, 1e6, 0.05, 1.0, 4.0);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_NEAR(v, pbl::catoni_bound(1.3, 0.0, 1e6, 0.05, 1.0, 4.0), 1e-12);
}

TEST(CatoniEvidence, AgreesWithGibbsFormUnderOptimalPosterior) {
    const auto inst = oracle::random_instance(31, 40, 3);
    const pbl::ModelConfig cfg{2.0, 0.5};
    const auto r = pbl::evidence_decomposition(pbl::DesignMatrix(inst.phi, inst.y), cfg);
    const double n = 40.0;
    const double emp = r.gibbs_emp_risk_total / n;
    // a below the NLL floor so that emp is inside [a, b].
    EXPECT_NEAR(pbl::catoni_evidence_bound(r.neg_log_evidence, n, 0.05, 0.0, 6.0),
                pbl::catoni_bound(emp, r.kl, n, 0.05, 0.0, 6.0), 1e-8);
}

TEST(HoeffdingPsi, SpecialLambdas) {
    EXPECT_NEAR(pbl::hoeffding_psi_bound(50.0, 50.0, 1.0, 4.0), 50.0 * 9.0 / 2.0, 1e-12);
    EXPECT_NEAR(pbl::hoeffding_psi_bound(std::sqrt(50.0), 50.0, 1.0, 4.0), 4.5, 1e-12);
    EXPECT_EQ(pbl::hoeffding_psi_bound(3.0, 10.0, 2.0, 2.0), 0.0);
}

TEST(Alquier, LambdaN) {
    const double n = 200.0;
    const double v = pbl::alquier_bound(1.2, 3.0, n, 0.05, n, pbl::hoeffding_psi_bound(n, n, 1.0, 4.0));
    EXPECT_NEAR(v, 1.2 + (3.0 + std::log(20.0)) / n + 4.5, 1e-12);
}

TEST(Alquier, LambdaSqrtN) {
    const double n = 200.0;
    const double l = std::sqrt(n);
    const double v = pbl::alquier_bound(1.2, 3.0, n, 0.05, l, pbl::hoeffding_psi_bound(l, n, 1.0, 4.0));
    EXPECT_NEAR(v, 1.2 + (3.0 + std::log(20.0) + 4.5) / l, 1e-12);
}

TEST(Alquier, Trivial) {
    EXPECT_EQ(pbl::alquier_bound(0.7, 0.0, 10.0, 1.0, 3.0, 0.0), 0.7);
    EXPECT_THROW(pbl::alquier_bound(0.7, 0.0, 10.0, 1.0, 0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(pbl::alquier_bound(0.7, 0.0, 10.0, 1.0, 1.0, -1.0), std::invalid_argument);
}

TEST(Subgaussian, Examples) {
    EXPECT_EQ(pbl::subgaussian_bound(0.9, 0.0, 5.0, 1.0, 0.0), 0.9);
    EXPECT_NEAR(pbl::subgaussian_bound(1.0, 2.0, 10.0, 0.05, 0.28), 1.6395732273553991, 1e-12);
    EXPECT_DOUBLE_EQ(pbl::subgaussian_bound(1.1, 2.0, 10.0, 0.05, 0.3),
                     pbl::subgamma_bound(1.1, 2.0, 10.0, 0.05, 0.3, 0.0));
}

TEST(Subgamma, Gap) {
    const double emp = 1.0;
    const double v = pbl::subgamma_bound(emp, 0.0, 1e12, 1.0, 0.2803, 0.005);
    EXPECT_NEAR(v - emp, 0.2803 / (2.0 * 0.995), 1e-12);
    EXPECT_NEAR(v - emp, 0.14085, 1e-5);
    EXPECT_EQ(pbl::subgamma_bound(emp, 0.0, 4.0, 1.0, 0.0, 0.3), emp);
    EXPECT_THROW(pbl::subgamma_bound(emp, 0.0, 4.0, 1.0, 0.1, 1.0), std::invalid_argument);
}

TEST(SubgammaEvidence, Examples) {
    EXPECT_EQ(pbl::subgamma_evidence_bound(0.0, 3.0, 1.0, 0.0, 0.0), 0.0);
    EXPECT_NEAR(pbl::subgamma_evidence_bound(1.5155, 1.0, 0.05, 0.2803, 0.005), 4.6520865449107749, 1e-12);
}

TEST(SubgammaEvidence, AgreesWithGibbsFormUnderOptimalPosterior) {
    const auto inst = oracle::random_instance(32, 25, 4);
    const pbl::ModelConfig cfg{1.5, 0.3};
    const auto r = pbl::evidence_decomposition(pbl::DesignMatrix(inst.phi, inst.y), cfg);
    EXPECT_NEAR(pbl::subgamma_evidence_bound(r.neg_log_evidence, 25.0, 0.05, 0.28, 0.005),
                pbl::subgamma_bound(r.gibbs_emp_risk_total / 25.0, r.kl, 25.0, 0.05, 0.28, 0.005), 1e-8);
}

TEST(EvaluateBound, DispatchAndEcho) {
    pbl::BoundInputs in;
    in.emp_gibbs_risk = 1.0;
    in.kl = 2.0;
    in.n = 10.0;
    in.subgamma = pbl::SubGammaParams{0.28, 0.0, 1.0};
    const auto r = pbl::evaluate_bound(pbl::BoundFamily::Subgaussian, in);
    EXPECT_NEAR(r.value, 1.6395732273553991, 1e-12);
    EXPECT_EQ(r.family, pbl::BoundFamily::Subgaussian);
    EXPECT_EQ(r.inputs.kl, 2.0);
    EXPECT_THROW(pbl::evaluate_bound(pbl::BoundFamily::Catoni, in), std::invalid_argument);
    EXPECT_THROW(pbl::evaluate_bound(pbl::BoundFamily::AlquierHoeffding, in), std::invalid_argument);
    EXPECT_THROW(pbl::evaluate_bound(pbl::BoundFamily::SubgammaEvidence, in), std::invalid_argument);
    in.neg_log_evidence = 1.5155;
    in.n = 1.0;
    in.subgamma = pbl::SubGammaParams{0.2803, 0.005, 1.0};
    EXPECT_NEAR(pbl::evaluate_bound(pbl::BoundFamily::SubgammaEvidence, in).value, 4.6520865449107749, 1e-12);
}

TEST(BoundFamily, TagsRoundTrip) {
    for (auto f : {pbl::BoundFamily::Catoni, pbl::BoundFamily::CatoniEvidence, pbl::BoundFamily::AlquierHoeffding,
                   pbl::BoundFamily::Subgaussian, pbl::BoundFamily::Subgamma, pbl::BoundFamily::SubgammaEvidence}) {
        EXPECT_EQ(pbl::bound_family_from_string(pbl::to_string(f)), f);
    }
    EXPECT_THROW(pbl::bound_family_from_string("mcallester"), std::invalid_argument);
}

pbl::LinearTaskSpec jensen_task() { return {Eigen::VectorXd::Constant(1, 0.8), 1.0, 0.2, 4}; }

TEST(Jensen, PointMassAgrees) {
    const pbl::GaussianPosterior post(Eigen::VectorXd::Constant(1, 0.3), 1e7 * Eigen::MatrixXd::Identity(1, 1));
    const auto r = pbl::jensen_mean_predictor_risk(post, jensen_task(), pbl::LossSpec::squared(), 100000, 1);
    EXPECT_NEAR(r.gibbs_risk.estimate, r.mean_pred_risk.estimate,
                4.0 * std::hypot(r.gibbs_risk.std_err, r.mean_pred_risk.std_err));
}

TEST(Jensen, MeanPredictorNoWorse) {
    const auto task = jensen_task();
    const auto data = pbl::gen_linear_task(task, 6);
    const auto post = pbl::fit_posterior(pbl::identity_design(data), {0.5, 1.0});
    const auto r = pbl::jensen_mean_predictor_risk(post, task, pbl::LossSpec::squared(), 100000, 2);
    EXPECT_LE(r.mean_pred_risk.estimate,
              r.gibbs_risk.estimate + 4.0 * std::hypot(r.gibbs_risk.std_err, r.mean_pred_risk.std_err));
    // Variance decomposition: the gap is sx^2 tr(A^{-1}) for the squared loss.
    EXPECT_NEAR(r.gap.estimate, post.trace_covariance(), 4.0 * r.gap.std_err);
}

TEST(Jensen, RejectsCroppedLoss) {
    const pbl::GaussianPosterior post = pbl::GaussianPosterior::prior(1, {1.0, 1.0});
    EXPECT_THROW(pbl::jensen_mean_predictor_risk(post, jensen_task(),
                                                 pbl::LossSpec::cropped(pbl::LossSpec::squared(), 0, 1), 10, 0),
                 std::invalid_argument);
}

}  // namespace
