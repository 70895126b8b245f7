#pragma once

// PAC-Bayesian generalization bounds as pure functions of their inputs. Each
// bound holds with probability >= 1 - delta over the draw of an n-sample,
// simultaneously for every posterior rho:
//
//   catoni              a + (b-a)/(1-e^{a-b}) [1 - exp(-emp + a - (KL + ln 1/delta)/n)]
//   catoni_evidence     a + (b-a)/(1-e^{a-b}) [1 - e^a (Z delta)^{1/n}]           (rho = rho*)
//   alquier_hoeffding   emp + (KL + ln 1/delta + lambda^2 (b-a)^2 / 2n) / lambda
//   subgaussian         emp + (KL + ln 1/delta)/n + s^2/2
//   subgamma            emp + (KL + ln 1/delta)/n + s^2/(2(1-c))
//   subgamma_evidence   s^2/(2(1-c)) - ln(Z delta)/n                              (rho = rho*)
//
// `emp` is the Gibbs empirical risk E_rho L_hat. Evidence forms take -ln Z and
// never exponentiate it.

#include "pbl/blr.hpp"
#include "pbl/losses.hpp"
#include "pbl/sampling.hpp"
#include "pbl/subgamma.hpp"
#include "pbl/tasks.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace pbl {

enum class BoundFamily {
    Catoni,
    CatoniEvidence,
    AlquierHoeffding,
    Subgaussian,
    Subgamma,
    SubgammaEvidence,
};

std::string to_string(BoundFamily family);

/// Throws std::invalid_argument for an unknown tag.
BoundFamily bound_family_from_string(const std::string& tag);

double catoni_bound(double emp, double kl, double n, double delta, double a, double b);
double catoni_evidence_bound(double neg_log_evidence, double n, double delta, double a, double b);
/// lambda^2 (b-a)^2 / 2n.
double hoeffding_psi_bound(double lambda, double n, double a, double b);
double alquier_bound(double emp, double kl, double n, double delta, double lambda,
                     double psi_bound);
double subgaussian_bound(double emp, double kl, double n, double delta, double s2);
double subgamma_bound(double emp, double kl, double n, double delta, double s2, double c);
double subgamma_evidence_bound(double neg_log_evidence, double n, double delta, double s2,
                               double c);

struct BoundInputs {
    double emp_gibbs_risk = 0.0;
    double kl = 0.0;
    double n = 1.0;
    double delta = 0.05;
    std::optional<std::pair<double, double>> range;  // (a, b)
    std::optional<double> lambda;
    std::optional<SubGammaParams> subgamma;
    std::optional<double> neg_log_evidence;
};

struct BoundReport {
    BoundFamily family = BoundFamily::Subgamma;
    double value = 0.0;
    BoundInputs inputs;
};

/// Dispatches on `family`; throws std::invalid_argument when a field the
/// family needs is missing.
BoundReport evaluate_bound(BoundFamily family, const BoundInputs& inputs);

struct JensenResult {
    McEstimate mean_pred_risk;  // L_D(F_rho), F_rho(x) = E_rho f(x)
    McEstimate gibbs_risk;      // E_rho L_D(f)
    McEstimate gap;             // paired estimate of gibbs_risk - mean_pred_risk
};

/// Risk of the posterior-mean regressor against the Gibbs risk on m fresh
/// draws of (w, x, y). The loss must be convex in the prediction (uncropped).
JensenResult jensen_mean_predictor_risk(const GaussianPosterior& post, const LinearTaskSpec& task,
                                        const LossSpec& loss, Eigen::Index m, std::uint64_t seed);

}  // namespace pbl
