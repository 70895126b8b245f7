#pragma once

// The three experiments (polynomial model selection on a sine task, and bound
// comparison on a linear Gaussian task) plus the coverage/MGF validation run.
// run_* functions are pure computations; write_* functions emit plot-ready
// CSV/JSON with `#`-prefixed metadata lines.

#include "pbl/blr.hpp"
#include "pbl/mc_oracle.hpp"
#include "pbl/selection.hpp"
#include "pbl/subgamma.hpp"
#include "pbl/tasks.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pbl {

inline constexpr const char* kToolVersion = "pbl 0.1.0";

/// Default seed of the polynomial-selection experiments.
inline constexpr std::uint64_t kDefaultSineSeed = 4608;

/// Ordered key/value pairs written as `# key: value` lines.
class Metadata {
public:
    Metadata& add(const std::string& key, const std::string& value);
    Metadata& add(const std::string& key, double value);
    Metadata& add(const std::string& key, std::int64_t value);
    Metadata& add(const std::string& key, std::uint64_t value);
    Metadata& add(const std::string& key, int value) { return add(key, static_cast<std::int64_t>(value)); }
    void write(std::ostream& out) const;
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest round-trip decimal form.
std::string format_double(double v);

// ---------------------------------------------------------------- sine task

struct PolynomialExperimentConfig {
    SineTaskSpec task{15, 0.25, 0.0, 6.283185307179586, kDefaultSineSeed};
    ModelConfig model{0.5, 1.0 / 0.005};
    std::vector<int> degrees{1, 2, 3, 4, 5, 6, 7};
    Eigen::Index grid_size = 200;
    Eigen::Index test_size = 1000;
    // Sub-gamma constants used for the selection report. The sine task has no
    // closed form for them; the selected model does not depend on them.
    double selection_s2 = 0.0;
    double selection_c = 0.0;
    double delta = 0.05;

    /// Rejects degree 0, empty or duplicated degree lists.
    void validate() const;
    Metadata metadata() const;
};

struct FigARow {
    int degree = 0;
    double x = 0.0;
    double mean_prediction = 0.0;
};

struct FigAResult {
    Dataset train;
    std::vector<FigARow> rows;  // degree-major
};

FigAResult run_fig_a(const PolynomialExperimentConfig& cfg);

struct FigBRow {
    int degree = 0;
    EvidenceReport evidence;
    double test_risk = 0.0;  // Gibbs NLL risk on the test sample
};

struct FigBResult {
    std::vector<FigBRow> rows;
    int argmin_degree = 0;  // degree with the smallest -ln Z
    double max_identity_error = 0.0;  // max relative |-ln Z - (gibbs + KL)|
    SelectionReport selection;
};

FigBResult run_fig_b(const PolynomialExperimentConfig& cfg);

/// Evidence-selected degree for seeds base, base+1, ..., base+count-1.
std::vector<std::pair<std::uint64_t, int>> fig_b_selection_distribution(
    const PolynomialExperimentConfig& cfg, std::uint64_t count);

/// Model family over the configured degrees, ids equal to degrees.
ModelFamily polynomial_family(const Dataset& train, const PolynomialExperimentConfig& cfg);

// -------------------------------------------------------------- linear task

struct BoundComparisonConfig {
    Eigen::Index d = 20;
    double w_star_norm = 0.5;
    double input_var = 1.0;
    double noise_var = 1.0 / 9.0;
    ModelConfig model{2.0, 1.0 / 100.0};
    double delta = 0.05;
    double crop_a = 1.0;
    double crop_b = 4.0;
    std::vector<Eigen::Index> n_grid{10, 100, 1000, 10'000, 100'000, 1'000'000};
    Eigen::Index mc_weights = 10'000;   // cropped empirical Gibbs risk
    Eigen::Index mc_generalization = 100'000;
    std::uint64_t seed = 0;

    void validate() const;
    LinearTaskSpec task() const;
    SubGammaParams subgamma() const;
    Metadata metadata() const;
};

struct FigCRow {
    Eigen::Index n = 0;
    double emp_gibbs_nll = 0.0;
    double gen_gibbs_nll = 0.0;
    double gen_std_err = 0.0;
    double kl = 0.0;
    double neg_log_evidence = 0.0;
    double emp_cropped = 0.0;
    double emp_cropped_std_err = 0.0;
    double bound_subgamma = 0.0;
    double bound_subgamma_evidence = 0.0;
    double bound_catoni_cropped = 0.0;
    double bound_alquier_sqrtn_cropped = 0.0;
    double bound_alquier_n_cropped = 0.0;
};

struct FigCResult {
    SubGammaParams subgamma;
    std::vector<FigCRow> rows;
};

/// Training sets are nested prefixes of one sample of size max(n_grid).
FigCResult run_fig_c(const BoundComparisonConfig& cfg);

// --------------------------------------------------------------- validation

struct ValidationConfig {
    ValidityStudyConfig study;
    LinearTaskSpec mgf_task;
    double mgf_prior_var = 0.05;
    std::vector<double> lambda_grid{0.25, 0.5, 1.0};
    MgfCheckOptions mgf;

    /// Coverage: n = 20, d = 3, T = 500 on the bound-comparison generating
    /// model. MGF: d = 2 with small variances and the squared loss.
    static ValidationConfig defaults();
    Metadata metadata() const;
};

struct ValidationResult {
    CoverageReport coverage;
    SubGammaParams mgf_params;
    MgfReport mgf;
    bool passed() const { return coverage.all_within_tolerance() && mgf.all_dominated(); }
};

ValidationResult run_validation(const ValidationConfig& cfg);

// ------------------------------------------------------------------ writers
// Each writer returns the paths it created. I/O errors throw
// std::runtime_error naming the path.

std::vector<std::filesystem::path> write_fig_a(const std::filesystem::path& dir,
                                               const PolynomialExperimentConfig& cfg,
                                               const FigAResult& result);
std::vector<std::filesystem::path> write_fig_b(const std::filesystem::path& dir,
                                               const PolynomialExperimentConfig& cfg,
                                               const FigBResult& result);
std::vector<std::filesystem::path> write_fig_b_seeds(
    const std::filesystem::path& dir, const PolynomialExperimentConfig& cfg,
    const std::vector<std::pair<std::uint64_t, int>>& selections);
std::vector<std::filesystem::path> write_fig_c(const std::filesystem::path& dir,
                                               const BoundComparisonConfig& cfg,
                                               const FigCResult& result);
std::vector<std::filesystem::path> write_validation(const std::filesystem::path& dir,
                                                    const ValidationConfig& cfg,
                                                    const ValidationResult& result);

}  // namespace pbl
