#include "pbl/experiments.hpp"

#include "pbl/bounds.hpp"
#include "pbl/losses.hpp"
#include "pbl/reports.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pbl {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Metadata& Metadata::add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
    return *this;
}

Metadata& Metadata::add(const std::string& key, double value) {
    return add(key, format_double(value));
}

Metadata& Metadata::add(const std::string& key, std::int64_t value) {
    return add(key, std::to_string(value));
}

Metadata& Metadata::add(const std::string& key, std::uint64_t value) {
    return add(key, std::to_string(value));
}

void Metadata::write(std::ostream& out) const {
    for (const auto& [k, v] : entries_) out << "# " << k << ": " << v << '\n';
}

namespace {

template <class T>
std::string join(const std::vector<T>& values) {
    std::ostringstream os;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ' ';
        if constexpr (std::is_floating_point_v<T>) {
            os << format_double(values[i]);
        } else {
            os << values[i];
        }
    }
    return os.str();
}

std::ofstream open_output(const fs::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Metadata with_tool(Metadata meta, const std::string& subcommand) {
    Metadata out;
    out.add("tool", std::string(kToolVersion)).add("command", subcommand);
    for (const auto& [k, v] : meta.entries()) out.add(k, v);
    return out;
}

}  // namespace

// ---------------------------------------------------------------- sine task

void PolynomialExperimentConfig::validate() const {
    task.validate();
    model.validate();
    if (degrees.empty()) throw std::invalid_argument("degrees: empty list");
    std::set<int> seen;
    for (int deg : degrees) {
        if (deg < 1) throw std::invalid_argument("degrees: every degree must be >= 1");
        if (!seen.insert(deg).second) throw std::invalid_argument("degrees: duplicate degree");
    }
    if (grid_size < 2) throw std::invalid_argument("grid size must be >= 2");
    if (test_size < 1) throw std::invalid_argument("test size must be >= 1");
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in (0, 1]");
    if (!(selection_s2 >= 0.0) || !(selection_c >= 0.0 && selection_c < 1.0)) {
        throw std::invalid_argument("selection constants: need s2 >= 0 and 0 <= c < 1");
    }
}

Metadata PolynomialExperimentConfig::metadata() const {
    Metadata m;
    m.add("seed", task.seed)
        .add("n", static_cast<std::int64_t>(task.n))
        .add("noise_var_eps", task.noise_var)
        .add("x_interval", format_double(task.lo) + " " + format_double(task.hi))
        .add("sigma2", model.noise_var)
        .add("sigma_pi2", model.prior_var)
        .add("degrees", join(degrees))
        .add("grid_size", static_cast<std::int64_t>(grid_size))
        .add("test_size", static_cast<std::int64_t>(test_size))
        .add("delta", delta)
        .add("selection_s2", selection_s2)
        .add("selection_c", selection_c);
    return m;
}

FigAResult run_fig_a(const PolynomialExperimentConfig& cfg) {
    cfg.validate();
    FigAResult result;
    result.train = gen_sine_task(cfg.task);
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(cfg.grid_size, cfg.task.lo, cfg.task.hi);
    Dataset grid_data{grid, Eigen::VectorXd::Zero(cfg.grid_size)};
    for (int degree : cfg.degrees) {
        const GaussianPosterior post = fit_posterior(polynomial_design(result.train, degree), cfg.model);
        const Eigen::VectorXd mean = predict_mean(post, polynomial_design(grid_data, degree).phi());
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
            result.rows.push_back({degree, grid[i], mean[i]});
        }
    }
    return result;
}

FigBResult run_fig_b(const PolynomialExperimentConfig& cfg) {
    cfg.validate();
    const Dataset train = gen_sine_task(cfg.task);
    SineTaskSpec test_spec = cfg.task;
    test_spec.n = cfg.test_size;
    const Dataset test = gen_sine_task(test_spec, stream::kTestData);

    FigBResult result;
    double best = std::numeric_limits<double>::infinity();
    for (int degree : cfg.degrees) {
        const DesignMatrix design = polynomial_design(train, degree);
        const GaussianPosterior post = fit_posterior(design, cfg.model);
        FigBRow row;
        row.degree = degree;
        row.evidence = evidence_decomposition(design, cfg.model);
        row.test_risk = gibbs_nll_risk_on(post, polynomial_design(test, degree), cfg.model);
        const double nle = row.evidence.neg_log_evidence;
        const double err = std::abs(nle - (row.evidence.gibbs_emp_risk_total + row.evidence.kl)) /
                           std::max(1.0, std::abs(nle));
        result.max_identity_error = std::max(result.max_identity_error, err);
        if (nle < best) {
            best = nle;
            result.argmin_degree = degree;
        }
        result.rows.push_back(row);
    }
    const ModelFamily family = polynomial_family(train, cfg);
    result.selection = selection_vs_averaging_report(family, cfg.delta, cfg.selection_s2, cfg.selection_c,
                                                     family.max_dim());
    return result;
}

std::vector<std::pair<std::uint64_t, int>> fig_b_selection_distribution(
    const PolynomialExperimentConfig& cfg, std::uint64_t count) {
    std::vector<std::pair<std::uint64_t, int>> out;
    PolynomialExperimentConfig run = cfg;
    for (std::uint64_t k = 0; k < count; ++k) {
        run.task.seed = cfg.task.seed + k;
        const Dataset train = gen_sine_task(run.task);
        const ModelFamily family = polynomial_family(train, run);
        const auto sel = model_selection_bounds(family, run.delta, run.selection_s2, run.selection_c);
        out.emplace_back(run.task.seed, sel.selected_id);
    }
    return out;
}

ModelFamily polynomial_family(const Dataset& train, const PolynomialExperimentConfig& cfg) {
    cfg.validate();
    std::vector<ModelEntry> entries;
    for (int degree : cfg.degrees) {
        entries.push_back({degree, degree, cfg.model,
                           evidence_decomposition(polynomial_design(train, degree), cfg.model)});
    }
    return ModelFamily(std::move(entries));
}

// -------------------------------------------------------------- linear task

void BoundComparisonConfig::validate() const {
    task().validate();
    model.validate();
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in (0, 1]");
    if (!(crop_a < crop_b)) throw std::invalid_argument("crop: need a < b");
    if (n_grid.empty()) throw std::invalid_argument("n grid: empty");
    for (auto n : n_grid) {
        if (n < 1) throw std::invalid_argument("n grid: every n must be >= 1");
    }
    if (mc_weights < 2 || mc_generalization < 2) throw std::invalid_argument("MC sizes must be >= 2");
}

LinearTaskSpec BoundComparisonConfig::task() const {
    return LinearTaskSpec{uniform_direction(d, w_star_norm), input_var, noise_var, seed};
}

SubGammaParams BoundComparisonConfig::subgamma() const {
    return nll_subgamma_params(model.noise_var,
                               LinearGaussianModel{input_var, model.prior_var, d,
                                                   w_star_norm * w_star_norm, noise_var});
}

Metadata BoundComparisonConfig::metadata() const {
    const SubGammaParams sg = subgamma();
    Metadata m;
    m.add("seed", seed)
        .add("d", static_cast<std::int64_t>(d))
        .add("w_star_norm", w_star_norm)
        .add("input_var", input_var)
        .add("noise_var_eps", noise_var)
        .add("sigma2", model.noise_var)
        .add("sigma_pi2", model.prior_var)
        .add("delta", delta)
        .add("crop", format_double(crop_a) + " " + format_double(crop_b))
        .add("n_grid", join(n_grid))
        .add("mc_weights", static_cast<std::int64_t>(mc_weights))
        .add("mc_generalization", static_cast<std::int64_t>(mc_generalization))
        .add("s2", sg.s2)
        .add("c", sg.c)
        .add("subgamma_lambda", sg.lambda_used);
    return m;
}

FigCResult run_fig_c(const BoundComparisonConfig& cfg) {
    cfg.validate();
    const LinearTaskSpec task = cfg.task();
    const Eigen::Index max_n = *std::max_element(cfg.n_grid.begin(), cfg.n_grid.end());
    const Dataset full = gen_linear_task(task, max_n);
    const LossSpec nll = LossSpec::nll(cfg.model.noise_var);
    const LossSpec cropped = LossSpec::cropped(nll, cfg.crop_a, cfg.crop_b);

    FigCResult result;
    result.subgamma = cfg.subgamma();
    const SubGammaParams& sg = result.subgamma;
    for (std::size_t k = 0; k < cfg.n_grid.size(); ++k) {
        const Eigen::Index n_rows = cfg.n_grid[k];
        const DesignMatrix design(full.inputs.topRows(n_rows), full.labels.head(n_rows));
        const GaussianPosterior post = fit_posterior(design, cfg.model);
        const double n = static_cast<double>(n_rows);
        const std::uint64_t point_seed = derive_seed(cfg.seed, 1000 + k);

        FigCRow row;
        row.n = n_rows;
        row.emp_gibbs_nll = gibbs_expected_empirical_nll(post, design, cfg.model) / n;
        row.kl = gaussian_kl(post, cfg.model);
        row.neg_log_evidence = neg_log_evidence(post, design, cfg.model);
        const McEstimate gen =
            gibbs_generalization_risk(post, task, nll, cfg.mc_generalization, 1, point_seed);
        row.gen_gibbs_nll = gen.estimate;
        row.gen_std_err = gen.std_err;
        const McEstimate emp_crop = empirical_gibbs_risk_mc(post, design, cropped, cfg.mc_weights, point_seed);
        row.emp_cropped = emp_crop.estimate;
        row.emp_cropped_std_err = emp_crop.std_err;

        row.bound_subgamma = subgamma_bound(row.emp_gibbs_nll, row.kl, n, cfg.delta, sg.s2, sg.c);
        row.bound_subgamma_evidence = subgamma_evidence_bound(row.neg_log_evidence, n, cfg.delta, sg.s2, sg.c);
        row.bound_catoni_cropped = catoni_bound(row.emp_cropped, row.kl, n, cfg.delta, cfg.crop_a, cfg.crop_b);
        const double sqrt_n = std::sqrt(n);
        row.bound_alquier_sqrtn_cropped =
            alquier_bound(row.emp_cropped, row.kl, n, cfg.delta, sqrt_n,
                          hoeffding_psi_bound(sqrt_n, n, cfg.crop_a, cfg.crop_b));
        row.bound_alquier_n_cropped = alquier_bound(row.emp_cropped, row.kl, n, cfg.delta, n,
                                                    hoeffding_psi_bound(n, n, cfg.crop_a, cfg.crop_b));
        result.rows.push_back(row);
    }
    return result;
}

// --------------------------------------------------------------- validation

ValidationConfig ValidationConfig::defaults() {
    ValidationConfig cfg;
    cfg.study.task = LinearTaskSpec{uniform_direction(3, 0.5), 1.0, 1.0 / 9.0, 0};
    cfg.study.model = ModelConfig{2.0, 1.0 / 100.0};
    cfg.study.n = 20;
    cfg.study.trials = 500;
    cfg.study.delta = 0.05;
    cfg.mgf_task = LinearTaskSpec{uniform_direction(2, 0.5), 1.0, 0.1, 0};
    cfg.mgf_prior_var = 0.05;
    return cfg;
}

Metadata ValidationConfig::metadata() const {
    std::vector<std::string> fams;
    for (auto f : study.families) fams.push_back(to_string(f));
    Metadata m;
    m.add("seed", study.master_seed)
        .add("study_n", static_cast<std::int64_t>(study.n))
        .add("study_d", static_cast<std::int64_t>(study.task.d()))
        .add("study_trials", static_cast<std::int64_t>(study.trials))
        .add("study_delta", study.delta)
        .add("study_families", join(fams))
        .add("study_sigma2", study.model.noise_var)
        .add("study_sigma_pi2", study.model.prior_var)
        .add("study_w_star_norm", study.task.w_star.norm())
        .add("study_noise_var_eps", study.task.noise_var)
        .add("crop", format_double(study.crop_a) + " " + format_double(study.crop_b))
        .add("mc_weights", static_cast<std::int64_t>(study.m_weights))
        .add("mc_test", static_cast<std::int64_t>(study.m_test))
        .add("mgf_d", static_cast<std::int64_t>(mgf_task.d()))
        .add("mgf_w_star_norm", mgf_task.w_star.norm())
        .add("mgf_input_var", mgf_task.input_var)
        .add("mgf_noise_var_eps", mgf_task.noise_var)
        .add("mgf_sigma_pi2", mgf_prior_var)
        .add("mgf_loss", "squared")
        .add("mgf_lambda_grid", join(lambda_grid))
        .add("mgf_samples", static_cast<std::int64_t>(mgf.samples))
        .add("mgf_bootstrap", static_cast<std::int64_t>(mgf.bootstrap_resamples))
        .add("mgf_seed", mgf.seed);
    return m;
}

ValidationResult run_validation(const ValidationConfig& cfg) {
    ValidationResult result;
    result.coverage = run_validity_study(cfg.study);
    result.mgf_params = squared_loss_subgamma_params(
        LinearGaussianModel{cfg.mgf_task.input_var, cfg.mgf_prior_var, cfg.mgf_task.d(),
                            cfg.mgf_task.w_star.squaredNorm(), cfg.mgf_task.noise_var});
    result.mgf = empirical_mgf_check(cfg.mgf_task, cfg.mgf_prior_var, LossSpec::squared(),
                                     result.mgf_params, cfg.lambda_grid, cfg.mgf);
    return result;
}

// ------------------------------------------------------------------ writers

std::vector<fs::path> write_fig_a(const fs::path& dir, const PolynomialExperimentConfig& cfg,
                                  const FigAResult& result) {
    const Metadata meta = with_tool(cfg.metadata(), "fig-a");
    const fs::path fig = dir / "fig_a.csv";
    {
        auto out = open_output(fig);
        meta.write(out);
        out << "degree,x,mean_prediction\n";
        for (const auto& r : result.rows) {
            out << r.degree << ',' << format_double(r.x) << ',' << format_double(r.mean_prediction) << '\n';
        }
        finish(out, fig);
    }
    const fs::path train = dir / "train.csv";
    {
        auto out = open_output(train);
        meta.write(out);
        write_dataset_csv(out, result.train);
        finish(out, train);
    }
    return {fig, train};
}

std::vector<fs::path> write_fig_b(const fs::path& dir, const PolynomialExperimentConfig& cfg,
                                  const FigBResult& result) {
    const Metadata meta = with_tool(cfg.metadata(), "fig-b");
    const fs::path fig = dir / "fig_b.csv";
    {
        auto out = open_output(fig);
        meta.write(out);
        out << "degree,neg_log_evidence,gibbs_emp_risk_total,kl,test_risk\n";
        for (const auto& r : result.rows) {
            out << r.degree << ',' << format_double(r.evidence.neg_log_evidence) << ','
                << format_double(r.evidence.gibbs_emp_risk_total) << ','
                << format_double(r.evidence.kl) << ',' << format_double(r.test_risk) << '\n';
        }
        finish(out, fig);
    }
    const fs::path json_path = dir / "evidence.json";
    {
        nlohmann::json j;
        for (const auto& [k, v] : meta.entries()) j["meta"][k] = v;
        j["argmin_degree"] = result.argmin_degree;
        j["max_identity_error"] = result.max_identity_error;
        for (const auto& r : result.rows) {
            auto e = to_json(r.evidence);
            e["degree"] = r.degree;
            e["test_risk"] = r.test_risk;
            j["models"].push_back(e);
        }
        auto out = open_output(json_path);
        out << j.dump(2) << '\n';
        finish(out, json_path);
    }
    const fs::path sel_path = dir / "selection.json";
    {
        nlohmann::json j = to_json(result.selection);
        for (const auto& [k, v] : meta.entries()) j["meta"][k] = v;
        auto out = open_output(sel_path);
        out << j.dump(2) << '\n';
        finish(out, sel_path);
    }
    return {fig, json_path, sel_path};
}

std::vector<fs::path> write_fig_b_seeds(const fs::path& dir, const PolynomialExperimentConfig& cfg,
                                        const std::vector<std::pair<std::uint64_t, int>>& selections) {
    Metadata meta = with_tool(cfg.metadata(), "fig-b --seeds");
    meta.add("seeds", static_cast<std::int64_t>(selections.size()));
    const fs::path path = dir / "fig_b_seeds.csv";
    auto out = open_output(path);
    meta.write(out);
    out << "seed,selected_degree\n";
    for (const auto& [seed, degree] : selections) out << seed << ',' << degree << '\n';
    finish(out, path);
    return {path};
}

std::vector<fs::path> write_fig_c(const fs::path& dir, const BoundComparisonConfig& cfg,
                                  const FigCResult& result) {
    const Metadata meta = with_tool(cfg.metadata(), "fig-c");
    const fs::path path = dir / "fig_c.csv";
    auto out = open_output(path);
    meta.write(out);
    out << "n,emp_gibbs_nll,gen_gibbs_nll,bound_subgamma,bound_catoni_cropped,"
           "bound_alquier_sqrtn_cropped,bound_alquier_n_cropped,gen_std_err,kl,"
           "neg_log_evidence,emp_cropped_nll,emp_cropped_std_err\n";
    for (const auto& r : result.rows) {
        out << r.n << ',' << format_double(r.emp_gibbs_nll) << ',' << format_double(r.gen_gibbs_nll)
            << ',' << format_double(r.bound_subgamma) << ',' << format_double(r.bound_catoni_cropped)
            << ',' << format_double(r.bound_alquier_sqrtn_cropped) << ','
            << format_double(r.bound_alquier_n_cropped) << ',' << format_double(r.gen_std_err) << ','
            << format_double(r.kl) << ',' << format_double(r.neg_log_evidence) << ','
            << format_double(r.emp_cropped) << ',' << format_double(r.emp_cropped_std_err) << '\n';
    }
    finish(out, path);
    return {path};
}

std::vector<fs::path> write_validation(const fs::path& dir, const ValidationConfig& cfg,
                                       const ValidationResult& result) {
    const Metadata meta = with_tool(cfg.metadata(), "validate");
    const fs::path coverage = dir / "coverage.json";
    {
        nlohmann::json j = to_json(result.coverage);
        for (const auto& [k, v] : meta.entries()) j["meta"][k] = v;
        auto out = open_output(coverage);
        out << j.dump(2) << '\n';
        finish(out, coverage);
    }
    const fs::path mgf = dir / "mgf.csv";
    {
        auto out = open_output(mgf);
        Metadata m = meta;
        m.add("mgf_s2", result.mgf_params.s2).add("mgf_c", result.mgf_params.c);
        m.write(out);
        write_mgf_csv(out, result.mgf);
        finish(out, mgf);
    }
    return {coverage, mgf};
}

}  // namespace pbl
