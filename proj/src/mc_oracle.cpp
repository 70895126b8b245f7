#include "pbl/mc_oracle.hpp"

#include "pbl/bounds.hpp"
#include "pbl/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace pbl {

Eigen::MatrixXd sample_posterior(const GaussianPosterior& post, Eigen::Index m, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("sample_posterior: need m >= 1");
    Rng rng = make_rng(seed, stream::kPosteriorSamples);
    return draw_posterior(post, m, rng);
}

McEstimate gibbs_generalization_risk(const GaussianPosterior& post, const LinearTaskSpec& task,
                                     const LossSpec& loss, Eigen::Index m_weights,
                                     Eigen::Index m_test, std::uint64_t seed) {
    task.validate();
    if (post.dim() != task.d()) throw std::invalid_argument("gibbs_generalization_risk: dimension mismatch");
    if (m_weights < 2) throw std::invalid_argument("gibbs_generalization_risk: need m_weights >= 2");
    if (loss.is_cropped() && m_test < 1) {
        throw std::invalid_argument("gibbs_generalization_risk: need m_test >= 1 for cropped losses");
    }

    Rng rng = make_rng(seed, stream::kGeneralization);
    const Eigen::MatrixXd weights = draw_posterior(post, m_weights, rng);
    Eigen::VectorXd per_weight(m_weights);

    if (!loss.is_cropped()) {
        const Eigen::VectorXd dist_sq = (weights.colwise() - task.w_star).colwise().squaredNorm();
        for (Eigen::Index j = 0; j < m_weights; ++j) {
            per_weight[j] = loss.of_mean_squared_residual(task.input_var * dist_sq[j] + task.noise_var);
        }
        return summarize_samples(per_weight);
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    const double input_sd = std::sqrt(task.input_var);
    const double noise_sd = std::sqrt(task.noise_var);
    const Eigen::Index d = task.d();
    for (Eigen::Index j = 0; j < m_weights; ++j) {
        const Eigen::VectorXd diff = task.w_star - weights.col(j);
        double acc = 0.0;
        for (Eigen::Index k = 0; k < m_test; ++k) {
            double residual = noise_sd * normal(rng);
            for (Eigen::Index i = 0; i < d; ++i) residual += diff[i] * input_sd * normal(rng);
            acc += loss.of_residual(residual);
        }
        per_weight[j] = acc / static_cast<double>(m_test);
    }
    return summarize_samples(per_weight);
}

std::string to_string(StudyFamily family) {
    switch (family) {
        case StudyFamily::Subgamma: return "subgamma";
        case StudyFamily::SubgammaEvidence: return "subgamma_evidence";
        case StudyFamily::CatoniCropped: return "catoni_cropped";
        case StudyFamily::AlquierNCropped: return "alquier_n_cropped";
        case StudyFamily::AlquierSqrtNCropped: return "alquier_sqrtn_cropped";
        case StudyFamily::Sentinel: return "sentinel";
    }
    return "unknown";
}

StudyFamily study_family_from_string(const std::string& tag) {
    for (StudyFamily f : {StudyFamily::Subgamma, StudyFamily::SubgammaEvidence,
                          StudyFamily::CatoniCropped, StudyFamily::AlquierNCropped,
                          StudyFamily::AlquierSqrtNCropped, StudyFamily::Sentinel}) {
        if (to_string(f) == tag) return f;
    }
    throw std::invalid_argument("unknown study family '" + tag + "'");
}

void ValidityStudyConfig::validate() const {
    task.validate();
    model.validate();
    if (trials < 1) throw std::invalid_argument("validity study: need trials >= 1");
    if (n < 1) throw std::invalid_argument("validity study: need n >= 1");
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("validity study: delta must be in (0, 1]");
    if (!(crop_a < crop_b)) throw std::invalid_argument("validity study: need crop a < b");
    if (m_weights < 2 || m_test < 1) throw std::invalid_argument("validity study: MC sizes too small");
    if (families.empty()) throw std::invalid_argument("validity study: no bound families");
}

double CoverageReport::tolerance_rate() const {
    const double delta = config.delta;
    return delta + 2.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(config.trials));
}

bool CoverageReport::all_within_tolerance() const {
    const double tol = tolerance_rate();
    return std::all_of(families.begin(), families.end(),
                       [tol](const FamilyCoverage& f) { return f.rate <= tol; });
}

namespace {

struct TrialOutcome {
    std::vector<double> bound;
    std::vector<double> risk;
    std::vector<bool> violated;
};

bool needs_cropped(StudyFamily f) {
    return f == StudyFamily::CatoniCropped || f == StudyFamily::AlquierNCropped ||
           f == StudyFamily::AlquierSqrtNCropped;
}

TrialOutcome run_trial(const ValidityStudyConfig& cfg, const SubGammaParams& sg, Eigen::Index t) {
    const std::uint64_t trial_seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(t));
    LinearTaskSpec task = cfg.task;
    task.seed = trial_seed;
    const DesignMatrix design = identity_design(gen_linear_task(task, cfg.n, stream::kTrainData));
    const GaussianPosterior post = fit_posterior(design, cfg.model);
    const double n = static_cast<double>(cfg.n);

    const double gibbs_total = gibbs_expected_empirical_nll(post, design, cfg.model);
    const double kl = gaussian_kl(post, cfg.model);
    const double nle = neg_log_evidence(post, design, cfg.model);

    const LossSpec nll = LossSpec::nll(cfg.model.noise_var);
    const LossSpec cropped = LossSpec::cropped(nll, cfg.crop_a, cfg.crop_b);

    const bool any_cropped = std::any_of(cfg.families.begin(), cfg.families.end(), needs_cropped);
    McEstimate emp_cropped, risk_cropped;
    if (any_cropped) {
        emp_cropped = empirical_gibbs_risk_mc(post, design, cropped, cfg.m_weights, trial_seed);
        risk_cropped = gibbs_generalization_risk(post, task, cropped, cfg.m_weights, cfg.m_test, trial_seed);
    }
    const McEstimate risk_nll =
        gibbs_generalization_risk(post, task, nll, cfg.m_weights, cfg.m_test, trial_seed);

    TrialOutcome out;
    for (StudyFamily f : cfg.families) {
        double bound = 0.0;
        McEstimate risk = risk_nll;
        switch (f) {
            case StudyFamily::Subgamma:
                bound = subgamma_bound(gibbs_total / n, kl, n, cfg.delta, sg.s2, sg.c);
                break;
            case StudyFamily::SubgammaEvidence:
                bound = subgamma_evidence_bound(nle, n, cfg.delta, sg.s2, sg.c);
                break;
            case StudyFamily::CatoniCropped:
                bound = catoni_bound(emp_cropped.estimate, kl, n, cfg.delta, cfg.crop_a, cfg.crop_b);
                risk = risk_cropped;
                break;
            case StudyFamily::AlquierNCropped:
                bound = alquier_bound(emp_cropped.estimate, kl, n, cfg.delta, n,
                                      hoeffding_psi_bound(n, n, cfg.crop_a, cfg.crop_b));
                risk = risk_cropped;
                break;
            case StudyFamily::AlquierSqrtNCropped: {
                const double lambda = std::sqrt(n);
                bound = alquier_bound(emp_cropped.estimate, kl, n, cfg.delta, lambda,
                                      hoeffding_psi_bound(lambda, n, cfg.crop_a, cfg.crop_b));
                risk = risk_cropped;
                break;
            }
            case StudyFamily::Sentinel:
                bound = std::numeric_limits<double>::infinity();
                break;
        }
        out.bound.push_back(bound);
        out.risk.push_back(risk.estimate);
        out.violated.push_back(risk.estimate - 3.0 * risk.std_err > bound);
    }
    return out;
}

}  // namespace

CoverageReport run_validity_study(const ValidityStudyConfig& cfg) {
    cfg.validate();
    const SubGammaParams sg = cfg.subgamma.value_or(nll_subgamma_params(
        cfg.model.noise_var, LinearGaussianModel{cfg.task.input_var, cfg.model.prior_var,
                                                 cfg.task.d(), cfg.task.w_star.squaredNorm(),
                                                 cfg.task.noise_var}));

    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<Eigen::Index>(threads, cfg.trials));
    std::atomic<Eigen::Index> next{0};
    auto worker = [&] {
        for (Eigen::Index t = next++; t < cfg.trials; t = next++) {
            outcomes[static_cast<std::size_t>(t)] = run_trial(cfg, sg, t);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    CoverageReport report;
    report.config = cfg;
    report.subgamma = sg;
    for (std::size_t k = 0; k < cfg.families.size(); ++k) {
        FamilyCoverage fc;
        fc.family = cfg.families[k];
        fc.trials = cfg.trials;
        double bound_sum = 0.0, risk_sum = 0.0;
        for (const auto& o : outcomes) {
            fc.violations += o.violated[k] ? 1 : 0;
            bound_sum += o.bound[k];
            risk_sum += o.risk[k];
        }
        fc.rate = static_cast<double>(fc.violations) / static_cast<double>(cfg.trials);
        fc.mean_bound = bound_sum / static_cast<double>(cfg.trials);
        fc.mean_risk = risk_sum / static_cast<double>(cfg.trials);
        report.families.push_back(fc);
    }
    return report;
}

}  // namespace pbl
