#include "pbl/sampling.hpp"

#include <cmath>
#include <random>

namespace pbl {

McEstimate summarize_samples(const Eigen::Ref<const Eigen::VectorXd>& draws) {
    McEstimate out;
    out.samples = draws.size();
    if (out.samples == 0) return out;
    out.estimate = draws.mean();
    if (out.samples > 1) {
        const double var = (draws.array() - out.estimate).square().sum() /
                           static_cast<double>(out.samples - 1);
        out.std_err = std::sqrt(var / static_cast<double>(out.samples));
    }
    return out;
}

Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd z(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = normal(rng);
    }
    return z;
}

Eigen::MatrixXd draw_posterior(const GaussianPosterior& post, Eigen::Index m, Rng& rng) {
    return post.transform_standard(standard_normal_matrix(post.dim(), m, rng));
}

}  // namespace pbl
