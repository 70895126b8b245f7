#pragma once

// Monte-Carlo oracles that are independent of the closed forms in blr.hpp:
// posterior sampling, the true Gibbs generalization risk on a synthetic linear
// task, and the frequentist coverage study of the bounds.

#include "pbl/blr.hpp"
#include "pbl/losses.hpp"
#include "pbl/sampling.hpp"
#include "pbl/subgamma.hpp"
#include "pbl/tasks.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pbl {

/// d x m matrix of exact draws mean + L^{-T} z; deterministic given seed.
Eigen::MatrixXd sample_posterior(const GaussianPosterior& post, Eigen::Index m, std::uint64_t seed);

/// Gibbs generalization risk E_{w~post} L_D(f_w). For uncropped losses the
/// inner expectation is exact, E (y - w.x)^2 = sx^2 ||w* - w||^2 + seps^2, and
/// only w is sampled. Cropped losses draw `m_test` fresh examples per weight.
McEstimate gibbs_generalization_risk(const GaussianPosterior& post, const LinearTaskSpec& task,
                                     const LossSpec& loss, Eigen::Index m_weights,
                                     Eigen::Index m_test, std::uint64_t seed);

enum class StudyFamily {
    Subgamma,             // NLL, empirical Gibbs risk + KL form
    SubgammaEvidence,     // NLL, evidence form
    CatoniCropped,        // cropped NLL
    AlquierNCropped,      // cropped NLL, lambda = n
    AlquierSqrtNCropped,  // cropped NLL, lambda = sqrt(n)
    Sentinel,             // +inf; exercises the plumbing only
};

std::string to_string(StudyFamily family);
StudyFamily study_family_from_string(const std::string& tag);

struct ValidityStudyConfig {
    LinearTaskSpec task;
    ModelConfig model;
    Eigen::Index n = 20;
    Eigen::Index trials = 500;
    double delta = 0.05;
    std::vector<StudyFamily> families{StudyFamily::Subgamma, StudyFamily::CatoniCropped,
                                      StudyFamily::AlquierSqrtNCropped};
    double crop_a = 1.0;
    double crop_b = 4.0;
    Eigen::Index m_weights = 200;
    Eigen::Index m_test = 200;
    std::uint64_t master_seed = 0;
    /// Defaults to nll_subgamma_params of the task and model at lambda = 1.
    std::optional<SubGammaParams> subgamma;
    /// Worker threads; 0 picks the hardware concurrency.
    unsigned threads = 0;

    void validate() const;
};

struct FamilyCoverage {
    StudyFamily family = StudyFamily::Sentinel;
    Eigen::Index trials = 0;
    Eigen::Index violations = 0;
    double rate = 0.0;
    double mean_bound = 0.0;
    double mean_risk = 0.0;
};

struct CoverageReport {
    std::vector<FamilyCoverage> families;
    ValidityStudyConfig config;
    SubGammaParams subgamma;
    /// delta + 2 sqrt(delta (1 - delta) / T)
    double tolerance_rate() const;
    bool all_within_tolerance() const;
};

/// Trial t draws its sample from stream (master_seed, t), fits rho*, and
/// compares every requested bound with the MC Gibbs generalization risk. A
/// violation is risk - 3 std_err > bound. Results do not depend on the thread
/// count.
CoverageReport run_validity_study(const ValidityStudyConfig& cfg);

}  // namespace pbl
