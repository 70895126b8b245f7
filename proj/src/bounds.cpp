#include "pbl/bounds.hpp"

#include "pbl/random.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pbl {

namespace {

void check_common(double kl, double n, double delta) {
    if (!(n >= 1.0)) throw std::invalid_argument("bound: n must be >= 1");
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("bound: delta must be in (0, 1]");
    // Tolerate round-off in a KL computed for a posterior equal to the prior.
    if (!(kl >= -1e-9)) throw std::invalid_argument("bound: KL must be >= 0");
}

void check_range(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        throw std::invalid_argument("bound: need finite a < b");
    }
}

void check_subgamma(double s2, double c) {
    if (!(s2 >= 0.0) || !std::isfinite(s2)) throw std::invalid_argument("bound: s2 must be >= 0");
    if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("bound: sub-gamma scale c must be in [0, 1)");
}

// a + (b-a)/(1-e^{a-b}) (1 - e^{exponent}), with both 1 - e^t via expm1.
double catoni_shape(double a, double b, double exponent) {
    return a + (b - a) / -std::expm1(a - b) * -std::expm1(exponent);
}

}  // namespace

std::string to_string(BoundFamily family) {
    switch (family) {
        case BoundFamily::Catoni: return "catoni";
        case BoundFamily::CatoniEvidence: return "catoni_evidence";
        case BoundFamily::AlquierHoeffding: return "alquier_hoeffding";
        case BoundFamily::Subgaussian: return "subgaussian";
        case BoundFamily::Subgamma: return "subgamma";
        case BoundFamily::SubgammaEvidence: return "subgamma_evidence";
    }
    return "unknown";
}

BoundFamily bound_family_from_string(const std::string& tag) {
    for (BoundFamily f : {BoundFamily::Catoni, BoundFamily::CatoniEvidence,
                          BoundFamily::AlquierHoeffding, BoundFamily::Subgaussian,
                          BoundFamily::Subgamma, BoundFamily::SubgammaEvidence}) {
        if (to_string(f) == tag) return f;
    }
    throw std::invalid_argument("unknown bound family '" + tag + "'");
}

double catoni_bound(double emp, double kl, double n, double delta, double a, double b) {
    check_common(kl, n, delta);
    check_range(a, b);
    if (!(emp >= a && emp <= b)) {
        throw std::invalid_argument("catoni_bound: empirical risk outside [a, b]; crop the loss first");
    }
    return catoni_shape(a, b, -emp + a - (kl + std::log(1.0 / delta)) / n);
}

double catoni_evidence_bound(double neg_log_evidence, double n, double delta, double a, double b) {
    check_common(0.0, n, delta);
    check_range(a, b);
    // e^a (Z delta)^{1/n} = exp(a + (ln delta - (-ln Z)) / n)
    return catoni_shape(a, b, a + (std::log(delta) - neg_log_evidence) / n);
}

double hoeffding_psi_bound(double lambda, double n, double a, double b) {
    if (!(lambda > 0.0)) throw std::invalid_argument("hoeffding_psi_bound: lambda must be > 0");
    if (!(n >= 1.0)) throw std::invalid_argument("hoeffding_psi_bound: n must be >= 1");
    const double width = b - a;
    return lambda * lambda * width * width / (2.0 * n);
}

double alquier_bound(double emp, double kl, double n, double delta, double lambda,
                     double psi_bound) {
    check_common(kl, n, delta);
    if (!(lambda > 0.0)) throw std::invalid_argument("alquier_bound: lambda must be > 0");
    if (!(psi_bound >= 0.0)) throw std::invalid_argument("alquier_bound: psi bound must be >= 0");
    return emp + (kl + std::log(1.0 / delta) + psi_bound) / lambda;
}

double subgaussian_bound(double emp, double kl, double n, double delta, double s2) {
    return subgamma_bound(emp, kl, n, delta, s2, 0.0);
}

double subgamma_bound(double emp, double kl, double n, double delta, double s2, double c) {
    check_common(kl, n, delta);
    check_subgamma(s2, c);
    return emp + (kl + std::log(1.0 / delta)) / n + s2 / (2.0 * (1.0 - c));
}

double subgamma_evidence_bound(double neg_log_evidence, double n, double delta, double s2,
                               double c) {
    check_common(0.0, n, delta);
    check_subgamma(s2, c);
    return s2 / (2.0 * (1.0 - c)) + (neg_log_evidence - std::log(delta)) / n;
}

BoundReport evaluate_bound(BoundFamily family, const BoundInputs& in) {
    auto need_range = [&] {
        if (!in.range) throw std::invalid_argument(to_string(family) + " bound needs (a, b)");
        return *in.range;
    };
    auto need_subgamma = [&] {
        if (!in.subgamma) throw std::invalid_argument(to_string(family) + " bound needs (s2, c)");
        return *in.subgamma;
    };
    auto need_evidence = [&] {
        if (!in.neg_log_evidence) {
            throw std::invalid_argument(to_string(family) + " bound needs -ln Z");
        }
        return *in.neg_log_evidence;
    };

    BoundReport report{family, 0.0, in};
    switch (family) {
        case BoundFamily::Catoni: {
            const auto [a, b] = need_range();
            report.value = catoni_bound(in.emp_gibbs_risk, in.kl, in.n, in.delta, a, b);
            break;
        }
        case BoundFamily::CatoniEvidence: {
            const auto [a, b] = need_range();
            report.value = catoni_evidence_bound(need_evidence(), in.n, in.delta, a, b);
            break;
        }
        case BoundFamily::AlquierHoeffding: {
            const auto [a, b] = need_range();
            if (!in.lambda) throw std::invalid_argument("alquier_hoeffding bound needs lambda");
            report.value = alquier_bound(in.emp_gibbs_risk, in.kl, in.n, in.delta, *in.lambda,
                                         hoeffding_psi_bound(*in.lambda, in.n, a, b));
            break;
        }
        case BoundFamily::Subgaussian:
            report.value = subgaussian_bound(in.emp_gibbs_risk, in.kl, in.n, in.delta,
                                             need_subgamma().s2);
            break;
        case BoundFamily::Subgamma: {
            const SubGammaParams p = need_subgamma();
            report.value = subgamma_bound(in.emp_gibbs_risk, in.kl, in.n, in.delta, p.s2, p.c);
            break;
        }
        case BoundFamily::SubgammaEvidence: {
            const SubGammaParams p = need_subgamma();
            report.value = subgamma_evidence_bound(need_evidence(), in.n, in.delta, p.s2, p.c);
            break;
        }
    }
    if (!std::isfinite(report.value)) {
        throw std::runtime_error(to_string(family) + " bound is not finite");
    }
    return report;
}

JensenResult jensen_mean_predictor_risk(const GaussianPosterior& post, const LinearTaskSpec& task,
                                        const LossSpec& loss, Eigen::Index m, std::uint64_t seed) {
    task.validate();
    if (loss.is_cropped()) {
        throw std::invalid_argument("jensen_mean_predictor_risk: loss must be convex (uncropped)");
    }
    if (post.dim() != task.d()) throw std::invalid_argument("jensen_mean_predictor_risk: dimension mismatch");
    if (m < 2) throw std::invalid_argument("jensen_mean_predictor_risk: need m >= 2");

    Rng rng = make_rng(seed, stream::kJensen);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double input_sd = std::sqrt(task.input_var);
    const double noise_sd = std::sqrt(task.noise_var);
    const Eigen::Index d = task.d();

    Eigen::VectorXd mean_losses(m), gibbs_losses(m);
    Eigen::VectorXd x(d);
    for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::VectorXd w = draw_posterior(post, 1, rng);
        for (Eigen::Index j = 0; j < d; ++j) x[j] = input_sd * normal(rng);
        const double y = task.w_star.dot(x) + noise_sd * normal(rng);
        mean_losses[k] = loss.of_residual(y - post.mean().dot(x));
        gibbs_losses[k] = loss.of_residual(y - w.dot(x));
    }
    return JensenResult{summarize_samples(mean_losses), summarize_samples(gibbs_losses),
                        summarize_samples(gibbs_losses - mean_losses)};
}

}  // namespace pbl
