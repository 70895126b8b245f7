#include "pbl/selection.hpp"

#include "pbl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pbl {

ModelFamily::ModelFamily(std::vector<ModelEntry> entries,
                         const std::optional<std::vector<double>>& hyperprior)
    : entries_(std::move(entries)) {
    if (entries_.empty()) throw std::invalid_argument("ModelFamily: no models");
    const Eigen::Index n = entries_.front().evidence.n;
    for (const auto& e : entries_) {
        if (e.evidence.n != n) {
            throw std::invalid_argument("ModelFamily: models were fitted on different samples");
        }
    }
    if (hyperprior) {
        if (hyperprior->size() != entries_.size()) {
            throw std::invalid_argument("ModelFamily: hyperprior size differs from model count");
        }
        const double uniform = 1.0 / static_cast<double>(entries_.size());
        for (double p : *hyperprior) {
            if (std::abs(p - uniform) > 1e-12) {
                throw std::invalid_argument("ModelFamily: only the uniform hyperprior is supported");
            }
        }
    }
}

Eigen::Index ModelFamily::max_dim() const {
    Eigen::Index d = 0;
    for (const auto& e : entries_) d = std::max(d, e.evidence.d);
    return d;
}

namespace {

double sample_size(const ModelFamily& family) {
    // An empty sample carries no information; the bounds need n >= 1.
    if (family.n() < 1) throw std::invalid_argument("model selection: need n >= 1");
    return static_cast<double>(family.n());
}

}  // namespace

SelectionResult model_selection_bounds(const ModelFamily& family, double delta, double s2, double c) {
    const double n = sample_size(family);
    const double split_delta = delta / static_cast<double>(family.size());
    SelectionResult result;
    for (const auto& e : family.entries()) {
        result.models.push_back(
            {e.id, e.degree, e.evidence.neg_log_evidence,
             subgamma_evidence_bound(e.evidence.neg_log_evidence, n, split_delta, s2, c)});
    }
    const auto best = std::min_element(result.models.begin(), result.models.end(),
                                       [](const ModelBound& l, const ModelBound& r) {
                                           if (l.bound != r.bound) return l.bound < r.bound;
                                           return l.id < r.id;
                                       });
    result.selected_id = best->id;
    return result;
}

double hierarchical_bound(const ModelFamily& family, double delta, double s2, double c) {
    const double n = sample_size(family);
    // ln sum_i Z_i
    double max_log_z = -std::numeric_limits<double>::infinity();
    for (const auto& e : family.entries()) max_log_z = std::max(max_log_z, -e.evidence.neg_log_evidence);
    double acc = 0.0;
    for (const auto& e : family.entries()) acc += std::exp(-e.evidence.neg_log_evidence - max_log_z);
    const double log_sum_z = max_log_z + std::log(acc);
    const double log_l = std::log(static_cast<double>(family.size()));
    // s^2/(2(1-c)) - (ln delta - ln L + ln sum Z) / n
    return subgamma_evidence_bound(-(log_sum_z - log_l), n, delta, s2, c);
}

SelectionReport selection_vs_averaging_report(const ModelFamily& family, double delta, double s2,
                                              double c, Eigen::Index params_dim) {
    SelectionReport report;
    report.selection = model_selection_bounds(family, delta, s2, c);
    report.hierarchical_bound = hierarchical_bound(family, delta, s2, c);
    double best = report.selection.models.front().bound;
    for (const auto& m : report.selection.models) best = std::min(best, m.bound);
    report.gap = best - report.hierarchical_bound;
    report.delta = delta;
    report.s2 = s2;
    report.c = c;
    report.params_dim = params_dim > 0 ? params_dim : family.max_dim();

    const auto& selected = *std::find_if(
        family.entries().begin(), family.entries().end(),
        [&](const ModelEntry& e) { return e.id == report.selection.selected_id; });
    const double log_l = std::log(static_cast<double>(family.size()));
    report.selected_kl = selected.evidence.kl;
    report.hierarchical_kl = log_l + selected.evidence.kl;
    const double lhs = selected.evidence.gibbs_emp_risk_total + report.hierarchical_kl;
    const double rhs = selected.evidence.neg_log_evidence + log_l;
    report.kl_identity_residual = std::abs(lhs - rhs);
    return report;
}

}  // namespace pbl
