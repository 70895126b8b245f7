#pragma once

#include "pbl/blr.hpp"
#include "pbl/sampling.hpp"
#include "pbl/tasks.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>

namespace pbl {

/// max(a, min(b, value)).
double crop(double value, double a, double b);

/// 1/2 ln(2 pi s^2) + (y - w.features)^2 / 2s^2.
double nll_loss(const Eigen::VectorXd& w, double noise_var, const Eigen::VectorXd& features,
                double y);

/// (w.features - y)^2.
double squared_loss(const Eigen::VectorXd& w, const Eigen::VectorXd& features, double y);

/// A regression loss; every supported loss is a function of the residual
/// y - w.phi(x) only. Cropping is applied per example.
class LossSpec {
public:
    enum class Kind { Nll, Squared };

    static LossSpec nll(double noise_var);
    static LossSpec squared();
    /// Throws std::invalid_argument unless a < b, both finite.
    static LossSpec cropped(const LossSpec& inner, double a, double b);

    Kind kind() const { return kind_; }
    double noise_var() const { return noise_var_; }
    bool is_cropped() const { return crop_.has_value(); }
    double crop_lo() const { return crop_ ? crop_->first : 0.0; }
    double crop_hi() const { return crop_ ? crop_->second : 0.0; }
    /// Same loss without the crop.
    LossSpec uncropped() const;

    double of_residual(double residual) const {
        const double r2 = residual * residual;
        double v = kind_ == Kind::Nll ? nll_offset_ + r2 * nll_scale_ : r2;
        if (crop_) v = crop(v, crop_->first, crop_->second);
        return v;
    }

    /// Loss of the raw (uncropped) expected squared residual: for NLL the
    /// affine map m -> 1/2 ln(2 pi s^2) + m / 2s^2, for squared the identity.
    double of_mean_squared_residual(double msr) const;

    std::string name() const;

private:
    Kind kind_ = Kind::Squared;
    double noise_var_ = 1.0;
    double nll_offset_ = 0.0;
    double nll_scale_ = 1.0;
    std::optional<std::pair<double, double>> crop_;
};

/// Monte-Carlo estimate of E_{w~post} (1/n) sum_i loss(w, phi_i, y_i) with m
/// exact posterior draws. Throws std::invalid_argument if m < 2 or n == 0.
McEstimate empirical_gibbs_risk_mc(const GaussianPosterior& post, const DesignMatrix& design,
                                   const LossSpec& loss, Eigen::Index m, std::uint64_t seed);

}  // namespace pbl
