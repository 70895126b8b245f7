#include "pbl/tasks.hpp"

#include "pbl/random.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace pbl {

DesignMatrix::DesignMatrix(Eigen::MatrixXd phi, Eigen::VectorXd labels)
    : phi_(std::move(phi)), labels_(std::move(labels)) {
    if (phi_.rows() != labels_.size()) {
        throw std::invalid_argument("DesignMatrix: " + std::to_string(phi_.rows()) +
                                    " rows but " + std::to_string(labels_.size()) + " labels");
    }
    if (!phi_.allFinite() || !labels_.allFinite()) {
        throw std::invalid_argument("DesignMatrix: non-finite entry");
    }
}

void SineTaskSpec::validate() const {
    if (n < 0) throw std::invalid_argument("SineTaskSpec: n must be >= 0");
    if (!(lo < hi)) throw std::invalid_argument("SineTaskSpec: need lo < hi");
    if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
        throw std::invalid_argument("SineTaskSpec: noise_var must be finite and >= 0");
    }
}

void LinearTaskSpec::validate() const {
    if (w_star.size() < 1) throw std::invalid_argument("LinearTaskSpec: d must be >= 1");
    if (!(input_var > 0.0) || !std::isfinite(input_var)) {
        throw std::invalid_argument("LinearTaskSpec: input_var must be > 0");
    }
    if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
        throw std::invalid_argument("LinearTaskSpec: noise_var must be finite and >= 0");
    }
    if (!w_star.allFinite()) throw std::invalid_argument("LinearTaskSpec: non-finite w_star");
}

Eigen::VectorXd uniform_direction(Eigen::Index d, double norm) {
    return Eigen::VectorXd::Constant(d, norm / std::sqrt(static_cast<double>(d)));
}

Eigen::VectorXd polynomial_features(double x, int degree) {
    if (degree < 0) throw std::invalid_argument("polynomial_features: degree must be >= 0");
    Eigen::VectorXd phi(degree + 1);
    double p = 1.0;
    for (int k = 0; k <= degree; ++k) {
        phi[k] = p;
        p *= x;
    }
    return phi;
}

Dataset gen_sine_task(const SineTaskSpec& spec, std::uint64_t stream_id) {
    spec.validate();
    Rng rng = make_rng(spec.seed, stream_id);
    std::uniform_real_distribution<double> unif(spec.lo, spec.hi);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double noise_sd = std::sqrt(spec.noise_var);

    Dataset data{Eigen::MatrixXd(spec.n, 1), Eigen::VectorXd(spec.n)};
    for (Eigen::Index i = 0; i < spec.n; ++i) {
        const double x = unif(rng);
        data.inputs(i, 0) = x;
        data.labels[i] = std::sin(x) + noise_sd * normal(rng);
    }
    return data;
}

Dataset gen_linear_task(const LinearTaskSpec& spec, Eigen::Index n, std::uint64_t stream_id) {
    spec.validate();
    if (n < 0) throw std::invalid_argument("gen_linear_task: n must be >= 0");
    Rng rng = make_rng(spec.seed, stream_id);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double input_sd = std::sqrt(spec.input_var);
    const double noise_sd = std::sqrt(spec.noise_var);
    const Eigen::Index d = spec.d();

    Dataset data{Eigen::MatrixXd(n, d), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        double signal = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            const double x = input_sd * normal(rng);
            data.inputs(i, j) = x;
            signal += spec.w_star[j] * x;
        }
        data.labels[i] = signal + noise_sd * normal(rng);
    }
    return data;
}

DesignMatrix polynomial_design(const Dataset& data, int degree) {
    if (data.input_dim() != 1 && data.size() > 0) {
        throw std::invalid_argument("polynomial_design: inputs must be scalar");
    }
    Eigen::MatrixXd phi(data.size(), degree + 1);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        phi.row(i) = polynomial_features(data.inputs(i, 0), degree).transpose();
    }
    return DesignMatrix(std::move(phi), data.labels);
}

DesignMatrix identity_design(const Dataset& data) {
    return DesignMatrix(data.inputs, data.labels);
}

DesignMatrix identity_design(Dataset&& data) {
    return DesignMatrix(std::move(data.inputs), std::move(data.labels));
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    const auto k = data.input_dim();
    for (Eigen::Index j = 0; j < k; ++j) out << "x_" << j << ',';
    out << "y\n";
    const auto old_precision = out.precision(17);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        for (Eigen::Index j = 0; j < k; ++j) out << data.inputs(i, j) << ',';
        out << data.labels[i] << '\n';
    }
    out.precision(old_precision);
}

}  // namespace pbl
