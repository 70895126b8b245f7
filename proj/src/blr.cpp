#include "pbl/blr.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pbl {

namespace {

constexpr Eigen::Index kChunkRows = 1024;

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void check_dims(const GaussianPosterior& post, const DesignMatrix& design) {
    if (post.dim() != design.d()) {
        throw std::invalid_argument("posterior has dimension " + std::to_string(post.dim()) +
                                    " but design has " + std::to_string(design.d()) +
                                    " features");
    }
}

// Sum over rows of f(row block, label block), streamed in fixed-size chunks.
template <class F>
void for_each_chunk(const DesignMatrix& design, F&& f) {
    const Eigen::Index n = design.n();
    for (Eigen::Index start = 0; start < n; start += kChunkRows) {
        const Eigen::Index rows = std::min(kChunkRows, n - start);
        f(design.phi().middleRows(start, rows), design.labels().segment(start, rows));
    }
}

}  // namespace

void ModelConfig::validate() const {
    if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
        throw std::invalid_argument("ModelConfig: noise_var must be finite and > 0");
    }
    if (!(prior_var > 0.0) || !std::isfinite(prior_var)) {
        throw std::invalid_argument("ModelConfig: prior_var must be finite and > 0");
    }
}

GaussianPosterior::GaussianPosterior(Eigen::VectorXd mean, Eigen::MatrixXd chol_precision)
    : mean_(std::move(mean)), chol_(std::move(chol_precision)) {
    if (chol_.rows() != mean_.size() || chol_.cols() != mean_.size()) {
        throw std::invalid_argument("GaussianPosterior: factor shape does not match mean");
    }
    if (!mean_.allFinite() || !chol_.allFinite()) {
        throw std::invalid_argument("GaussianPosterior: non-finite parameters");
    }
    for (Eigen::Index j = 0; j < chol_.rows(); ++j) {
        if (!(chol_(j, j) > 0.0)) {
            throw std::invalid_argument("GaussianPosterior: factor diagonal must be positive");
        }
    }
    chol_.triangularView<Eigen::StrictlyUpper>().setZero();
}

GaussianPosterior GaussianPosterior::prior(Eigen::Index d, const ModelConfig& cfg) {
    cfg.validate();
    return GaussianPosterior(Eigen::VectorXd::Zero(d),
                             Eigen::MatrixXd::Identity(d, d) / std::sqrt(cfg.prior_var));
}

Eigen::MatrixXd GaussianPosterior::precision() const {
    return chol_ * chol_.transpose();
}

double GaussianPosterior::log_det_precision() const {
    return 2.0 * chol_.diagonal().array().log().sum();
}

double GaussianPosterior::trace_covariance() const {
    const Eigen::Index d = dim();
    Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(d, d);
    chol_.triangularView<Eigen::Lower>().solveInPlace(inv);
    return inv.squaredNorm();
}

Eigen::MatrixXd GaussianPosterior::covariance() const {
    const Eigen::Index d = dim();
    Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(d, d);
    chol_.triangularView<Eigen::Lower>().solveInPlace(inv);
    return inv.transpose() * inv;
}

double GaussianPosterior::covariance_quadratic(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return chol_.triangularView<Eigen::Lower>().solve(x).squaredNorm();
}

Eigen::MatrixXd GaussianPosterior::transform_standard(
    const Eigen::Ref<const Eigen::MatrixXd>& z) const {
    Eigen::MatrixXd w = chol_.transpose().triangularView<Eigen::Upper>().solve(z);
    w.colwise() += mean_;
    return w;
}

GaussianPosterior fit_posterior(const DesignMatrix& design, const ModelConfig& cfg) {
    cfg.validate();
    const Eigen::Index d = design.d();
    const double inv_sigma = 1.0 / std::sqrt(cfg.noise_var);

    // Running R factor of the stacked system [Phi/s | y/s ; I/s_pi | 0].
    // The last column carries Q'[y/s; 0], which yields the posterior mean.
    Eigen::MatrixXd r_aug = Eigen::MatrixXd::Zero(d + 1, d + 1);
    r_aug.topLeftCorner(d, d).diagonal().setConstant(1.0 / std::sqrt(cfg.prior_var));

    Eigen::MatrixXd stacked;
    for_each_chunk(design, [&](const auto& phi, const auto& y) {
        const Eigen::Index rows = phi.rows();
        stacked.resize(d + 1 + rows, d + 1);
        stacked.topRows(d + 1) = r_aug;
        stacked.bottomLeftCorner(rows, d) = phi * inv_sigma;
        stacked.bottomRightCorner(rows, 1) = y * inv_sigma;
        Eigen::HouseholderQR<Eigen::Ref<Eigen::MatrixXd>> qr(stacked);
        r_aug = qr.matrixQR().topRows(d + 1).triangularView<Eigen::Upper>();
    });

    // Householder reflections may leave negative pivots; flipping a row of R
    // (and of Q'b) preserves R'R and R'Q'b.
    for (Eigen::Index j = 0; j < d; ++j) {
        if (r_aug(j, j) < 0.0) r_aug.row(j) *= -1.0;
    }
    const auto r = r_aug.topLeftCorner(d, d);
    if (!r.allFinite() || (r.diagonal().array() <= 0.0).any()) {
        throw std::runtime_error("fit_posterior: factorization of the precision failed");
    }
    Eigen::VectorXd mean = r.triangularView<Eigen::Upper>().solve(r_aug.col(d).head(d));
    return GaussianPosterior(std::move(mean), r.transpose());
}

double total_nll(const Eigen::VectorXd& w, const DesignMatrix& design, const ModelConfig& cfg) {
    const Eigen::Index n = design.n();
    if (n == 0) return 0.0;
    double rss = 0.0;
    for_each_chunk(design, [&](const auto& phi, const auto& y) {
        rss += (y - phi * w).squaredNorm();
    });
    return 0.5 * static_cast<double>(n) * (kLog2Pi + std::log(cfg.noise_var)) +
           rss / (2.0 * cfg.noise_var);
}

double neg_log_evidence(const GaussianPosterior& post, const DesignMatrix& design,
                        const ModelConfig& cfg) {
    cfg.validate();
    check_dims(post, design);
    const double d = static_cast<double>(post.dim());
    return total_nll(post.mean(), design, cfg) +
           post.mean().squaredNorm() / (2.0 * cfg.prior_var) + 0.5 * post.log_det_precision() +
           0.5 * d * std::log(cfg.prior_var);
}

double neg_log_evidence(const DesignMatrix& design, const ModelConfig& cfg) {
    return neg_log_evidence(fit_posterior(design, cfg), design, cfg);
}

double gaussian_kl(const GaussianPosterior& post, const ModelConfig& cfg) {
    cfg.validate();
    const double d = static_cast<double>(post.dim());
    return 0.5 * (post.trace_covariance() / cfg.prior_var +
                  post.mean().squaredNorm() / cfg.prior_var - d + post.log_det_precision() +
                  d * std::log(cfg.prior_var));
}

double gibbs_expected_empirical_nll(const GaussianPosterior& post, const DesignMatrix& design,
                                    const ModelConfig& cfg) {
    cfg.validate();
    check_dims(post, design);
    if (design.n() == 0) return 0.0;
    // tr(Phi'Phi A^{-1}) = ||L^{-1} Phi'||_F^2
    double trace = 0.0;
    const auto l = post.chol_precision().triangularView<Eigen::Lower>();
    for_each_chunk(design, [&](const auto& phi, const auto&) {
        Eigen::MatrixXd block = phi.transpose();
        l.solveInPlace(block);
        trace += block.squaredNorm();
    });
    return total_nll(post.mean(), design, cfg) + trace / (2.0 * cfg.noise_var);
}

EvidenceReport evidence_decomposition(const DesignMatrix& design, const ModelConfig& cfg) {
    const GaussianPosterior post = fit_posterior(design, cfg);
    EvidenceReport report;
    report.neg_log_evidence = neg_log_evidence(post, design, cfg);
    report.gibbs_emp_risk_total = gibbs_expected_empirical_nll(post, design, cfg);
    report.kl = gaussian_kl(post, cfg);
    report.n = design.n();
    report.d = design.d();
    report.sigma2 = cfg.noise_var;
    report.sigma_pi2 = cfg.prior_var;
    return report;
}

double log_gibbs_posterior_density(const GaussianPosterior& post, const Eigen::VectorXd& w) {
    if (w.size() != post.dim()) {
        throw std::invalid_argument("log_gibbs_posterior_density: dimension mismatch");
    }
    const double d = static_cast<double>(post.dim());
    const double mahalanobis = (post.chol_precision().transpose() * (w - post.mean())).squaredNorm();
    return -0.5 * d * kLog2Pi + 0.5 * post.log_det_precision() - 0.5 * mahalanobis;
}

double log_prior_density(const Eigen::VectorXd& w, const ModelConfig& cfg) {
    const double d = static_cast<double>(w.size());
    return -0.5 * d * (kLog2Pi + std::log(cfg.prior_var)) - w.squaredNorm() / (2.0 * cfg.prior_var);
}

Eigen::VectorXd predict_mean(const GaussianPosterior& post, const Eigen::MatrixXd& phi) {
    return phi * post.mean();
}

double gibbs_nll_risk_on(const GaussianPosterior& post, const DesignMatrix& test,
                         const ModelConfig& cfg) {
    check_dims(post, test);
    if (test.n() == 0) throw std::invalid_argument("gibbs_nll_risk_on: empty test sample");
    const double expected_total = gibbs_expected_empirical_nll(post, test, cfg);
    return expected_total / static_cast<double>(test.n());
}

}  // namespace pbl
