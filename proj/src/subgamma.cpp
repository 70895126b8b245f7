#include "pbl/subgamma.hpp"

#include "pbl/random.hpp"
#include "pbl/sampling.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <vector>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace pbl {

double subgamma_envelope(const SubGammaParams& params, double lambda) {
    const double denom = 1.0 - params.c * lambda;
    if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
    return lambda * lambda * params.s2 / (2.0 * denom);
}

void LinearGaussianModel::validate() const {
    if (!(input_var > 0.0) || !(prior_var > 0.0)) {
        throw std::invalid_argument("LinearGaussianModel: variances must be > 0");
    }
    if (!(noise_var >= 0.0) || !(w_star_sq_norm >= 0.0)) {
        throw std::invalid_argument("LinearGaussianModel: noise_var and ||w*||^2 must be >= 0");
    }
    if (d < 1) throw std::invalid_argument("LinearGaussianModel: d must be >= 1");
}

namespace {

void check_lambda(double lambda, double c) {
    if (!(lambda > 0.0) || !(lambda * c < 1.0)) {
        throw std::invalid_argument("sub-gamma parameters: lambda = " + std::to_string(lambda) +
                                    " outside (0, 1/c) with c = " + std::to_string(c));
    }
}

// sx^2 (spi^2 d + ||w*||^2)
double signal_term(const LinearGaussianModel& m) {
    return m.input_var * (m.prior_var * static_cast<double>(m.d) + m.w_star_sq_norm);
}

double log_mean_exp(const Eigen::Ref<const Eigen::ArrayXd>& x) {
    const double hi = x.maxCoeff();
    return hi + std::log((x - hi).exp().mean());
}

}  // namespace

SubGammaParams squared_loss_subgamma_params(const LinearGaussianModel& model, double lambda) {
    model.validate();
    SubGammaParams p;
    p.c = 2.0 * model.input_var * model.prior_var;
    check_lambda(lambda, p.c);
    p.s2 = (2.0 / lambda) * (signal_term(model) + model.noise_var * (1.0 - lambda * p.c));
    p.lambda_used = lambda;
    return p;
}

SubGammaParams nll_subgamma_params(double noise_var, const LinearGaussianModel& model,
                                   double lambda) {
    model.validate();
    if (!(noise_var > 0.0)) throw std::invalid_argument("nll_subgamma_params: noise_var must be > 0");
    SubGammaParams p;
    p.c = model.input_var * model.prior_var / noise_var;
    check_lambda(lambda, p.c);
    p.s2 = (signal_term(model) + model.noise_var * (1.0 - lambda * p.c)) / (lambda * noise_var);
    p.lambda_used = lambda;
    return p;
}

bool MgfReport::all_dominated() const {
    return std::all_of(points.begin(), points.end(), [](const MgfPoint& p) { return p.dominated; });
}

MgfReport empirical_mgf_check(const LinearTaskSpec& task, double prior_var, const LossSpec& loss,
                              const SubGammaParams& params, const std::vector<double>& lambda_grid,
                              const MgfCheckOptions& options) {
    task.validate();
    if (!(prior_var > 0.0)) throw std::invalid_argument("empirical_mgf_check: prior_var must be > 0");
    if (loss.is_cropped()) {
        throw std::invalid_argument("empirical_mgf_check: cropped losses have no closed-form risk");
    }
    if (options.samples < 10'000) {
        throw std::invalid_argument("empirical_mgf_check: need at least 1e4 samples");
    }
    if (options.bootstrap_resamples < 2) {
        throw std::invalid_argument("empirical_mgf_check: need at least 2 bootstrap resamples");
    }
    for (double lambda : lambda_grid) check_lambda(lambda, params.c);

    const Eigen::Index m = options.samples;
    const Eigen::Index d = task.d();
    Rng rng = make_rng(options.seed, stream::kMgf);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double prior_sd = std::sqrt(prior_var);
    const double input_sd = std::sqrt(task.input_var);
    const double noise_sd = std::sqrt(task.noise_var);

    // V = L_D(f_w) - loss(f_w, x, y) for joint draws of (w, x, y).
    Eigen::ArrayXd v(m);
    Eigen::VectorXd w(d);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index j = 0; j < d; ++j) w[j] = prior_sd * normal(rng);
        double residual = noise_sd * normal(rng);
        for (Eigen::Index j = 0; j < d; ++j) residual += (task.w_star[j] - w[j]) * input_sd * normal(rng);
        const double risk_sq = task.input_var * (task.w_star - w).squaredNorm() + task.noise_var;
        v[k] = loss.of_mean_squared_residual(risk_sq) - loss.of_residual(residual);
    }

    MgfReport report;
    report.samples = m;
    report.bootstrap_resamples = options.bootstrap_resamples;
    report.band_multiplier = options.band_multiplier;

    const auto n_lambda = static_cast<Eigen::Index>(lambda_grid.size());
    // Shifted exponentials, one row per sample, so a bootstrap replicate is a
    // sequence of contiguous gathers.
    std::vector<double> shifted(static_cast<std::size_t>(m * n_lambda));
    Eigen::VectorXd shift(n_lambda);
    for (Eigen::Index l = 0; l < n_lambda; ++l) {
        const Eigen::ArrayXd scaled = lambda_grid[l] * v;
        shift[l] = scaled.maxCoeff();
        const Eigen::ArrayXd e = (scaled - shift[l]).exp();
        for (Eigen::Index k = 0; k < m; ++k) shifted[static_cast<std::size_t>(k * n_lambda + l)] = e[k];
        const double psi = log_mean_exp(scaled);
        if (!std::isfinite(psi)) {
            throw std::runtime_error("empirical_mgf_check: non-finite MGF estimate at lambda = " +
                                     std::to_string(lambda_grid[l]));
        }
        MgfPoint point;
        point.lambda = lambda_grid[l];
        point.psi_hat = psi;
        point.envelope = subgamma_envelope(params, lambda_grid[l]);
        report.points.push_back(point);
    }

    // Poisson bootstrap: every sample enters a replicate with an independent
    // Poisson(1) multiplicity, drawn by inversion of a 64-bit uniform against
    // the cumulative table. Replicates then stream through memory in order.
    std::array<std::uint64_t, 12> cdf{};
    {
        double p = std::exp(-1.0);
        double acc = 0.0;
        for (std::size_t j = 0; j < cdf.size(); ++j) {
            acc += p;
            p /= static_cast<double>(j + 1);
            cdf[j] = acc >= 1.0 ? std::numeric_limits<std::uint64_t>::max()
                                : static_cast<std::uint64_t>(std::ldexp(acc, 64));
        }
        cdf.back() = std::numeric_limits<std::uint64_t>::max();
    }
    Rng boot_rng = make_rng(options.seed, stream::kBootstrap);
    const Eigen::Index reps = options.bootstrap_resamples;
    Eigen::MatrixXd replicates(reps, n_lambda);
    std::vector<double> sums(static_cast<std::size_t>(n_lambda));
    for (Eigen::Index b = 0; b < reps; ++b) {
        std::fill(sums.begin(), sums.end(), 0.0);
        double weight_total = 0.0;
        const double* row = shifted.data();
        for (Eigen::Index k = 0; k < m; ++k, row += n_lambda) {
            const std::uint64_t u = boot_rng();
            unsigned count = 0;
            while (u > cdf[count]) ++count;
            if (count == 0) continue;
            const double w = count;
            weight_total += w;
            for (Eigen::Index l = 0; l < n_lambda; ++l) sums[static_cast<std::size_t>(l)] += w * row[l];
        }
        for (Eigen::Index l = 0; l < n_lambda; ++l) {
            replicates(b, l) = shift[l] + std::log(sums[static_cast<std::size_t>(l)] / weight_total);
        }
    }
    for (Eigen::Index l = 0; l < n_lambda; ++l) {
        auto& point = report.points[static_cast<std::size_t>(l)];
        point.band = summarize_samples(replicates.col(l)).std_err *
                     std::sqrt(static_cast<double>(reps));
        point.dominated = point.psi_hat <= point.envelope + options.band_multiplier * point.band;
    }
    return report;
}

}  // namespace pbl
