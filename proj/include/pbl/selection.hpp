#pragma once

#include "pbl/blr.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pbl {

struct ModelEntry {
    int id = 0;
    int degree = 0;
    ModelConfig config;
    EvidenceReport evidence;
};

/// L candidate models fitted on one dataset, under the uniform hyperprior 1/L.
class ModelFamily {
public:
    /// Throws std::invalid_argument when empty, when the entries disagree on n,
    /// or when `hyperprior` is given and is not uniform.
    explicit ModelFamily(std::vector<ModelEntry> entries,
                         const std::optional<std::vector<double>>& hyperprior = std::nullopt);

    const std::vector<ModelEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    Eigen::Index n() const { return entries_.front().evidence.n; }
    /// Largest parameter dimension; sub-gamma parameters should be computed for it.
    Eigen::Index max_dim() const;

private:
    std::vector<ModelEntry> entries_;
};

struct ModelBound {
    int id = 0;
    int degree = 0;
    double neg_log_evidence = 0.0;
    double bound = 0.0;
};

struct SelectionResult {
    std::vector<ModelBound> models;
    int selected_id = 0;  // argmin bound, ties to the smallest id
};

/// bound_i = s^2/(2(1-c)) + (-ln Z_i - ln(delta/L)) / n.
SelectionResult model_selection_bounds(const ModelFamily& family, double delta, double s2, double c);

/// s^2/(2(1-c)) - ln((delta/L) sum_i Z_i) / n, with a log-sum-exp over -(-ln Z_i).
double hierarchical_bound(const ModelFamily& family, double delta, double s2, double c);

struct SelectionReport {
    SelectionResult selection;
    double hierarchical_bound = 0.0;
    double gap = 0.0;  // min_i bound_i - hierarchical_bound
    double delta = 0.0;
    double s2 = 0.0;
    double c = 0.0;
    Eigen::Index params_dim = 0;  // the d the (s2, c) pair was derived for
    // Deterministic hyperposterior on the selected model:
    //   KL(rho || pi) = ln L + KL(rho_sel || pi_sel)
    //   n E L_hat + KL(rho || pi) = -ln(Z_sel / L)
    double hierarchical_kl = 0.0;
    double selected_kl = 0.0;
    double kl_identity_residual = 0.0;  // |lhs - rhs| of the second line
};

SelectionReport selection_vs_averaging_report(const ModelFamily& family, double delta, double s2,
                                              double c, Eigen::Index params_dim = 0);

}  // namespace pbl
