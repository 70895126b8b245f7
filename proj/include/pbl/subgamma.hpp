#pragma once

// Sub-gamma parameters of the squared and NLL losses for linear predictors
// w ~ N(0, prior_var I), inputs x ~ N(0, input_var I_d) and labels
// y = w*.x + eps, eps ~ N(0, noise_var), together with a Monte-Carlo check of
// the moment-generating-function envelope
//
//     psi_V(lambda) = ln E exp(lambda V) <= lambda^2 s^2 / (2 (1 - c lambda)),
//
// where V = L_D(f_w) - loss(f_w, x, y).
//
// NOTE: s^2 depends on ||w*||^2, which is only known for synthetic tasks. The
// parameters are an oracle quantity, not something estimated from data.

#include "pbl/losses.hpp"
#include "pbl/tasks.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace pbl {

struct SubGammaParams {
    double s2 = 0.0;
    double c = 0.0;
    double lambda_used = 1.0;
};

/// lambda^2 s^2 / (2 (1 - c lambda)); +inf when c lambda >= 1.
double subgamma_envelope(const SubGammaParams& params, double lambda);

/// Generating-model constants shared by both parameter formulas.
struct LinearGaussianModel {
    double input_var = 1.0;       // sigma_x^2
    double prior_var = 1.0;       // sigma_pi^2
    Eigen::Index d = 1;
    double w_star_sq_norm = 0.0;  // ||w*||^2
    double noise_var = 0.0;       // sigma_eps^2

    void validate() const;
};

/// c = 2 sx^2 spi^2,  s^2 = (2/lambda) [sx^2 (spi^2 d + ||w*||^2) + seps^2 (1 - lambda c)].
/// Throws std::invalid_argument if lambda is not in (0, 1/c).
SubGammaParams squared_loss_subgamma_params(const LinearGaussianModel& model,
                                            double lambda = 1.0);

/// c = sx^2 spi^2 / s^2,  s^2 = 1/(lambda s^2) [sx^2 (spi^2 d + ||w*||^2) + seps^2 (1 - lambda c)],
/// with s^2 the likelihood variance `noise_var`.
SubGammaParams nll_subgamma_params(double noise_var, const LinearGaussianModel& model,
                                   double lambda = 1.0);

struct MgfPoint {
    double lambda = 0.0;
    double psi_hat = 0.0;
    double envelope = 0.0;
    double band = 0.0;  // bootstrap standard deviation of psi_hat
    bool dominated = false;  // psi_hat <= envelope + band_multiplier * band
};

struct MgfReport {
    std::vector<MgfPoint> points;
    Eigen::Index samples = 0;
    Eigen::Index bootstrap_resamples = 0;
    double band_multiplier = 3.0;
    bool all_dominated() const;
};

struct MgfCheckOptions {
    Eigen::Index samples = 1'000'000;
    Eigen::Index bootstrap_resamples = 200;
    double band_multiplier = 3.0;
    std::uint64_t seed = 0;
};

/// Estimates psi_V on `lambda_grid` by sampling (w, x, y) jointly with
/// w ~ N(0, prior_var I) and (x, y) from `task`; L_D(f_w) uses its closed form
/// sx^2 ||w* - w||^2 + seps^2 (mapped through the NLL affine transform when
/// `loss` is NLL). Cropped losses are rejected. Throws std::runtime_error on a
/// non-finite estimate.
MgfReport empirical_mgf_check(const LinearTaskSpec& task, double prior_var, const LossSpec& loss,
                              const SubGammaParams& params, const std::vector<double>& lambda_grid,
                              const MgfCheckOptions& options);

}  // namespace pbl
