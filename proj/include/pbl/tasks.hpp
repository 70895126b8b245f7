#pragma once

#include "pbl/random.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>

namespace pbl {

/// A learning sample: raw inputs (one row per example) and their labels.
struct Dataset {
    Eigen::MatrixXd inputs;  // n x k
    Eigen::VectorXd labels;  // n

    Eigen::Index size() const { return labels.size(); }
    Eigen::Index input_dim() const { return inputs.cols(); }
};

/// Feature-mapped inputs. Row i of `phi` is phi(x_i).
class DesignMatrix {
public:
    DesignMatrix() = default;
    /// Throws std::invalid_argument if the row counts disagree or any entry is
    /// non-finite.
    DesignMatrix(Eigen::MatrixXd phi, Eigen::VectorXd labels);

    const Eigen::MatrixXd& phi() const { return phi_; }
    const Eigen::VectorXd& labels() const { return labels_; }
    Eigen::Index n() const { return phi_.rows(); }
    Eigen::Index d() const { return phi_.cols(); }

private:
    Eigen::MatrixXd phi_;
    Eigen::VectorXd labels_;
};

/// y = sin(x) + eps with x ~ U[lo, hi] and eps ~ N(0, noise_var).
struct SineTaskSpec {
    Eigen::Index n = 15;
    double noise_var = 0.25;
    double lo = 0.0;
    double hi = 6.283185307179586;
    std::uint64_t seed = 0;

    void validate() const;
};

/// y = w*.x + eps with x ~ N(0, input_var I_d) and eps ~ N(0, noise_var).
struct LinearTaskSpec {
    Eigen::VectorXd w_star;
    double input_var = 1.0;
    double noise_var = 1.0 / 9.0;
    std::uint64_t seed = 0;

    Eigen::Index d() const { return w_star.size(); }
    void validate() const;
};

/// Returns a length-d weight vector of Euclidean norm `norm`, spread evenly
/// over all coordinates.
Eigen::VectorXd uniform_direction(Eigen::Index d, double norm);

/// [1, x, x^2, ..., x^degree].
Eigen::VectorXd polynomial_features(double x, int degree);

/// `stream_id` selects an independent stream of `spec.seed` (train vs test).
Dataset gen_sine_task(const SineTaskSpec& spec, std::uint64_t stream_id = stream::kTrainData);

/// Draws n examples. `stream_id` selects an independent stream of `spec.seed`, so
/// that e.g. train and test sets or repeated trials never share draws.
Dataset gen_linear_task(const LinearTaskSpec& spec, Eigen::Index n,
                        std::uint64_t stream_id = stream::kTrainData);

/// Maps a scalar-input dataset through polynomial_features.
DesignMatrix polynomial_design(const Dataset& data, int degree);

/// phi(x) = x.
DesignMatrix identity_design(const Dataset& data);
DesignMatrix identity_design(Dataset&& data);

/// Header `x_0,...,x_{k-1},y`, one row per example, LF line endings.
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace pbl
