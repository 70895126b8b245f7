#include "pbl/losses.hpp"

#include "pbl/random.hpp"
#include "pbl/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pbl {

double crop(double value, double a, double b) {
    return std::max(a, std::min(b, value));
}

double nll_loss(const Eigen::VectorXd& w, double noise_var, const Eigen::VectorXd& features,
                double y) {
    if (w.size() != features.size()) throw std::invalid_argument("nll_loss: dimension mismatch");
    if (!(noise_var > 0.0)) throw std::invalid_argument("nll_loss: noise_var must be > 0");
    const double r = y - w.dot(features);
    return 0.5 * std::log(2.0 * std::numbers::pi * noise_var) + r * r / (2.0 * noise_var);
}

double squared_loss(const Eigen::VectorXd& w, const Eigen::VectorXd& features, double y) {
    if (w.size() != features.size()) {
        throw std::invalid_argument("squared_loss: dimension mismatch");
    }
    const double r = w.dot(features) - y;
    return r * r;
}

LossSpec LossSpec::nll(double noise_var) {
    if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
        throw std::invalid_argument("LossSpec::nll: noise_var must be finite and > 0");
    }
    LossSpec s;
    s.kind_ = Kind::Nll;
    s.noise_var_ = noise_var;
    s.nll_offset_ = 0.5 * std::log(2.0 * std::numbers::pi * noise_var);
    s.nll_scale_ = 1.0 / (2.0 * noise_var);
    return s;
}

LossSpec LossSpec::squared() {
    return LossSpec{};
}

LossSpec LossSpec::cropped(const LossSpec& inner, double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        throw std::invalid_argument("LossSpec::cropped: need finite a < b");
    }
    LossSpec s = inner;
    s.crop_ = std::make_pair(a, b);
    return s;
}

LossSpec LossSpec::uncropped() const {
    LossSpec s = *this;
    s.crop_.reset();
    return s;
}

double LossSpec::of_mean_squared_residual(double msr) const {
    return kind_ == Kind::Nll ? nll_offset_ + msr * nll_scale_ : msr;
}

std::string LossSpec::name() const {
    std::ostringstream os;
    if (kind_ == Kind::Nll) {
        os << "nll(sigma2=" << noise_var_ << ")";
    } else {
        os << "squared";
    }
    if (crop_) os << " cropped[" << crop_->first << "," << crop_->second << "]";
    return os.str();
}

McEstimate empirical_gibbs_risk_mc(const GaussianPosterior& post, const DesignMatrix& design,
                                   const LossSpec& loss, Eigen::Index m, std::uint64_t seed) {
    if (m < 2) throw std::invalid_argument("empirical_gibbs_risk_mc: need m >= 2");
    if (design.n() == 0) throw std::invalid_argument("empirical_gibbs_risk_mc: empty sample");
    if (design.d() != post.dim()) {
        throw std::invalid_argument("empirical_gibbs_risk_mc: dimension mismatch");
    }

    constexpr Eigen::Index kWeightBlock = 256;
    constexpr Eigen::Index kRowBlock = 512;
    const Eigen::Index n = design.n();
    Rng rng = make_rng(seed, stream::kPosteriorSamples);

    Eigen::VectorXd per_weight(m);
    Eigen::MatrixXd residuals;
    for (Eigen::Index w0 = 0; w0 < m; w0 += kWeightBlock) {
        const Eigen::Index cols = std::min(kWeightBlock, m - w0);
        const Eigen::MatrixXd weights = draw_posterior(post, cols, rng);
        Eigen::VectorXd sums = Eigen::VectorXd::Zero(cols);
        for (Eigen::Index r0 = 0; r0 < n; r0 += kRowBlock) {
            const Eigen::Index rows = std::min(kRowBlock, n - r0);
            residuals.noalias() = -design.phi().middleRows(r0, rows) * weights;
            residuals.colwise() += design.labels().segment(r0, rows);
            for (Eigen::Index j = 0; j < cols; ++j) {
                double s = 0.0;
                const double* col = residuals.col(j).data();
                for (Eigen::Index i = 0; i < rows; ++i) s += loss.of_residual(col[i]);
                sums[j] += s;
            }
        }
        per_weight.segment(w0, cols) = sums / static_cast<double>(n);
    }
    return summarize_samples(per_weight);
}

}  // namespace pbl
