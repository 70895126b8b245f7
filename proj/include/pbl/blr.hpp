#pragma once

// Conjugate Bayesian linear regression with a Gaussian likelihood
// N(y | w.phi(x), noise_var) and an isotropic prior N(0, prior_var I).
//
// Under the negative log-likelihood loss the Bayes posterior is the Gibbs
// posterior minimizing  n E_rho L_nll + KL(rho || prior), and the minimum
// value is the negative log marginal likelihood:
//
//     -ln Z = n E_{w~rho*} L_nll(w) + KL(rho* || prior).
//
// Everything below is expressed through the lower Cholesky factor L of the
// posterior precision A = Phi'Phi / noise_var + I / prior_var. L is obtained
// from a Householder QR of the stacked matrix [Phi / sigma; I / sigma_pi],
// whose R factor satisfies R'R = A, so Phi'Phi is never formed.

#include "pbl/tasks.hpp"

#include <Eigen/Core>

namespace pbl {

struct ModelConfig {
    double noise_var = 1.0;  // sigma^2
    double prior_var = 1.0;  // sigma_pi^2

    /// Throws std::invalid_argument unless both variances are finite and > 0.
    void validate() const;
};

/// N(mean, A^{-1}) stored as (mean, L) with A = L L'.
class GaussianPosterior {
public:
    GaussianPosterior() = default;
    /// `chol_precision` must be lower triangular with a positive diagonal.
    GaussianPosterior(Eigen::VectorXd mean, Eigen::MatrixXd chol_precision);

    /// The prior N(0, prior_var I) viewed as a posterior.
    static GaussianPosterior prior(Eigen::Index d, const ModelConfig& cfg);

    Eigen::Index dim() const { return mean_.size(); }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& chol_precision() const { return chol_; }

    /// A = L L'.
    Eigen::MatrixXd precision() const;
    /// ln|A| = 2 sum ln L_jj.
    double log_det_precision() const;
    /// tr(A^{-1}) = ||L^{-1}||_F^2, via a triangular solve against I.
    double trace_covariance() const;
    /// A^{-1}; for tests and small d only.
    Eigen::MatrixXd covariance() const;
    /// x' A^{-1} x = ||L^{-1} x||^2.
    double covariance_quadratic(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    /// Maps standard-normal columns z to mean + L^{-T} z.
    Eigen::MatrixXd transform_standard(const Eigen::Ref<const Eigen::MatrixXd>& z) const;

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd chol_;
};

/// Per-term breakdown of the negative log marginal likelihood.
struct EvidenceReport {
    double neg_log_evidence = 0.0;      // -ln Z, nats
    double gibbs_emp_risk_total = 0.0;  // n E_{rho*} L_nll
    double kl = 0.0;                    // KL(rho* || prior)
    Eigen::Index n = 0;
    Eigen::Index d = 0;
    double sigma2 = 0.0;
    double sigma_pi2 = 0.0;
};

GaussianPosterior fit_posterior(const DesignMatrix& design, const ModelConfig& cfg);

/// Classic closed form:
///   ||y - Phi w||^2 / 2s^2 + (n/2) ln(2 pi s^2) + ||w||^2 / 2s_pi^2 + ln|A| / 2 + d ln s_pi.
double neg_log_evidence(const DesignMatrix& design, const ModelConfig& cfg);
double neg_log_evidence(const GaussianPosterior& post, const DesignMatrix& design,
                        const ModelConfig& cfg);

/// KL(N(mean, A^{-1}) || N(0, prior_var I)).
double gaussian_kl(const GaussianPosterior& post, const ModelConfig& cfg);

/// n L_nll(w) at a fixed weight vector, i.e. sum_i -ln N(y_i | w.phi_i, s^2).
double total_nll(const Eigen::VectorXd& w, const DesignMatrix& design, const ModelConfig& cfg);

/// n E_{w~post} L_nll(w) = n L_nll(mean) + tr(Phi'Phi A^{-1}) / 2s^2.
double gibbs_expected_empirical_nll(const GaussianPosterior& post, const DesignMatrix& design,
                                    const ModelConfig& cfg);

EvidenceReport evidence_decomposition(const DesignMatrix& design, const ModelConfig& cfg);

/// ln N(w | mean, A^{-1}).
double log_gibbs_posterior_density(const GaussianPosterior& post, const Eigen::VectorXd& w);

/// ln N(w | 0, prior_var I).
double log_prior_density(const Eigen::VectorXd& w, const ModelConfig& cfg);

/// Posterior-mean prediction for each row of `phi`.
Eigen::VectorXd predict_mean(const GaussianPosterior& post, const Eigen::MatrixXd& phi);

/// Average over rows of E_{w~post} nll(w, phi_i, y_i), i.e. the Gibbs NLL risk
/// on a held-out sample.
double gibbs_nll_risk_on(const GaussianPosterior& post, const DesignMatrix& test,
                         const ModelConfig& cfg);

}  // namespace pbl
