#pragma once

#include "pbl/blr.hpp"
#include "pbl/random.hpp"

#include <Eigen/Core>

namespace pbl {

/// Sample mean of iid draws with its standard error.
struct McEstimate {
    double estimate = 0.0;
    double std_err = 0.0;
    Eigen::Index samples = 0;
};

/// Mean and standard error (sample sd / sqrt(m)) of the entries of `draws`.
McEstimate summarize_samples(const Eigen::Ref<const Eigen::VectorXd>& draws);

/// rows x cols matrix of iid N(0, 1).
Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// m exact draws from the posterior as the columns of a d x m matrix.
Eigen::MatrixXd draw_posterior(const GaussianPosterior& post, Eigen::Index m, Rng& rng);

}  // namespace pbl
