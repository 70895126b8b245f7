#include "pbl/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("pbl_test_" + name);
    fs::remove_all(dir);
    return dir;
}

TEST(FigA, RowCount) {
    pbl::PolynomialExperimentConfig cfg;
    cfg.degrees = {1, 3, 5};
    cfg.grid_size = 40;
    const auto r = pbl::run_fig_a(cfg);
    EXPECT_EQ(r.rows.size(), 3u * 40u);
    EXPECT_EQ(r.train.size(), 15);
    EXPECT_EQ(r.rows.front().x, 0.0);
    EXPECT_NEAR(r.rows.back().x, 2 * M_PI, 1e-15);
}

TEST(FigA, DegreeZeroRejected) {
    pbl::PolynomialExperimentConfig cfg;
    cfg.degrees = {0, 1};
    EXPECT_THROW(pbl::run_fig_a(cfg), std::invalid_argument);
    cfg.degrees = {2, 2};
    EXPECT_THROW(pbl::run_fig_a(cfg), std::invalid_argument);
}

TEST(FigA, NoiselessDenseInterpolation) {
    pbl::PolynomialExperimentConfig cfg;
    cfg.task.n = 500;
    cfg.task.noise_var = 0.0;
    cfg.model.noise_var = 1e-6;
    cfg.degrees = {7};
    const auto r = pbl::run_fig_a(cfg);
    double sup = 0.0;
    for (const auto& row : r.rows) sup = std::max(sup, std::abs(row.mean_prediction - std::sin(row.x)));
    EXPECT_LT(sup, 0.1);
}

TEST(FigB, DefaultSeed) {
    const pbl::PolynomialExperimentConfig cfg;
    const auto r = pbl::run_fig_b(cfg);
    ASSERT_EQ(r.rows.size(), 7u);
    EXPECT_EQ(r.argmin_degree, 3);
    EXPECT_LE(r.max_identity_error, 1e-8);
    EXPECT_EQ(r.selection.selection.selected_id, 3);
    EXPECT_EQ(r.selection.params_dim, 8);
    EXPECT_GE(r.selection.gap, 0.0);
    for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_GT(r.rows[i].evidence.kl, r.rows[i - 1].evidence.kl);
    for (const auto& row : r.rows) {
        EXPECT_NEAR(row.evidence.neg_log_evidence, row.evidence.gibbs_emp_risk_total + row.evidence.kl,
                    1e-8 * row.evidence.neg_log_evidence);
        EXPECT_GT(row.test_risk, 0.0);
    }
}

TEST(FigB, SelectionDistribution) {
    pbl::PolynomialExperimentConfig cfg;
    cfg.task.seed = 100;
    const auto sel = pbl::fig_b_selection_distribution(cfg, 5);
    ASSERT_EQ(sel.size(), 5u);
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(sel[k].first, 100 + k);
        auto one = cfg;
        one.task.seed = sel[k].first;
        EXPECT_EQ(sel[k].second, pbl::run_fig_b(one).argmin_degree);
    }
}

TEST(FigC, SmallGrid) {
    pbl::BoundComparisonConfig cfg;
    cfg.n_grid = {10, 100, 1000};
    cfg.mc_weights = 500;
    cfg.mc_generalization = 2000;
    const auto r = pbl::run_fig_c(cfg);
    EXPECT_NEAR(r.subgamma.c, 0.005, 1e-15);
    EXPECT_NEAR(r.subgamma.s2, 0.28027777777777778, 1e-12);
    ASSERT_EQ(r.rows.size(), 3u);
    for (const auto& row : r.rows) {
        EXPECT_LT(row.bound_subgamma, row.bound_catoni_cropped);
        EXPECT_LT(row.bound_subgamma, row.bound_alquier_sqrtn_cropped);
        EXPECT_GT(row.bound_subgamma, row.gen_gibbs_nll);
        EXPECT_NEAR(row.neg_log_evidence, row.n * row.emp_gibbs_nll + row.kl, 1e-8 * row.neg_log_evidence);
        EXPECT_NEAR(row.bound_subgamma, row.bound_subgamma_evidence, 1e-8);
        EXPECT_GE(row.emp_cropped, 1.0);
        EXPECT_LE(row.emp_cropped, 4.0);
    }
}

TEST(FigC, Validation) {
    pbl::BoundComparisonConfig cfg;
    cfg.n_grid = {};
    EXPECT_THROW(pbl::run_fig_c(cfg), std::invalid_argument);
    cfg = {};
    cfg.crop_a = 4.0;
    cfg.crop_b = 1.0;
    EXPECT_THROW(pbl::run_fig_c(cfg), std::invalid_argument);
}

TEST(Writers, MetadataAndReproducibility) {
    const fs::path dir = scratch_dir("writers");
    pbl::PolynomialExperimentConfig cfg;
    const auto files = pbl::write_fig_b(dir, cfg, pbl::run_fig_b(cfg));
    ASSERT_EQ(files.size(), 3u);
    const std::string sel = slurp(files[2]);
    for (const char* key : {"\"models\"", "\"selected_id\": 3", "\"hierarchical_bound\"", "\"gap\"", "\"neg_log_evidence\"",
                            "\"bound\"", "\"degree\""}) {
        EXPECT_NE(sel.find(key), std::string::npos) << key;
    }
    const std::string first = slurp(files[0]);
    EXPECT_EQ(first.rfind("# tool: pbl", 0), 0u);
    EXPECT_NE(first.find("# seed: " + std::to_string(cfg.task.seed)), std::string::npos);
    EXPECT_NE(first.find("\ndegree,neg_log_evidence,gibbs_emp_risk_total,kl,test_risk\n"), std::string::npos);
    pbl::write_fig_b(dir, cfg, pbl::run_fig_b(cfg));
    EXPECT_EQ(slurp(files[0]), first);

    const auto a_files = pbl::write_fig_a(dir, cfg, pbl::run_fig_a(cfg));
    ASSERT_EQ(a_files.size(), 2u);
    EXPECT_NE(slurp(a_files[0]).find("\ndegree,x,mean_prediction\n"), std::string::npos);
    EXPECT_NE(slurp(a_files[1]).find("\nx_0,y\n"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Writers, FigCColumns) {
    const fs::path dir = scratch_dir("figc");
    pbl::BoundComparisonConfig cfg;
    cfg.n_grid = {10, 20};
    cfg.mc_weights = 100;
    cfg.mc_generalization = 100;
    const auto files = pbl::write_fig_c(dir, cfg, pbl::run_fig_c(cfg));
    const std::string text = slurp(files[0]);
    EXPECT_NE(text.find("# s2: 0.2802777777777778"), std::string::npos);
    EXPECT_NE(text.find("# c: 0.005"), std::string::npos);
    EXPECT_NE(text.find("\nn,emp_gibbs_nll,gen_gibbs_nll,bound_subgamma,bound_catoni_cropped,"
                        "bound_alquier_sqrtn_cropped,bound_alquier_n_cropped"),
              std::string::npos);
    fs::remove_all(dir);
}

TEST(Writers, UnwritableDirectoryNamesPath) {
    const fs::path blocker = scratch_dir("blocker");
    { std::ofstream(blocker) << "x"; }
    pbl::PolynomialExperimentConfig cfg;
    try {
        pbl::write_fig_b(blocker / "sub", cfg, pbl::run_fig_b(cfg));
        FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find(blocker.string()), std::string::npos);
    }
    fs::remove(blocker);
}

TEST(Validation, SmokeRun) {
    auto cfg = pbl::ValidationConfig::defaults();
    cfg.study.trials = 5;
    cfg.mgf.samples = 20000;
    cfg.mgf.bootstrap_resamples = 20;
    const auto r = pbl::run_validation(cfg);
    EXPECT_EQ(r.coverage.families.size(), 3u);
    EXPECT_EQ(r.mgf.points.size(), 3u);
    const fs::path dir = scratch_dir("validate");
    const auto files = pbl::write_validation(dir, cfg, r);
    ASSERT_EQ(files.size(), 2u);
    EXPECT_NE(slurp(files[0]).find("\"master_seed\""), std::string::npos);
    EXPECT_NE(slurp(files[1]).find("\nlambda,psi_hat,envelope,band\n"), std::string::npos);
    fs::remove_all(dir);
}

TEST(FormatDouble, RoundTrip) {
    EXPECT_EQ(pbl::format_double(0.1), "0.1");
    EXPECT_EQ(pbl::format_double(2.0), "2");
    EXPECT_EQ(std::stod(pbl::format_double(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
