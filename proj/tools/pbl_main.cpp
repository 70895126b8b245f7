// pbl: command-line driver for the polynomial-selection, bound-comparison and
// validation experiments. Every file written starts with `#` metadata lines.

#include "pbl/experiments.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::string out = ".";
};

std::uint64_t resolve_seed(const CommonFlags& f, std::uint64_t fallback) {
    if (f.seed) return *f.seed;
    if (const char* env = std::getenv("PBL_SEED")) {
        try {
            std::size_t pos = 0;
            const auto v = std::stoull(env, &pos);
            if (pos == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw std::invalid_argument(std::string("PBL_SEED is not an unsigned integer: ") + env);
    }
    return fallback;
}

// Accepts "1..7", "1,2,3" or "1 2 3" (after CLI11 splitting).
std::vector<int> parse_degrees(const std::vector<std::string>& tokens) {
    std::vector<int> out;
    for (const auto& raw : tokens) {
        std::string tok = raw;
        for (auto& ch : tok) {
            if (ch == ',') ch = ' ';
        }
        std::istringstream is(tok);
        std::string part;
        while (is >> part) {
            const auto dots = part.find("..");
            if (dots != std::string::npos) {
                const int lo = std::stoi(part.substr(0, dots));
                const int hi = std::stoi(part.substr(dots + 2));
                if (hi < lo) throw std::invalid_argument("--degrees: empty range " + part);
                for (int k = lo; k <= hi; ++k) out.push_back(k);
            } else {
                out.push_back(std::stoi(part));
            }
        }
    }
    return out;
}

std::vector<Eigen::Index> parse_n_grid(const std::vector<std::string>& tokens) {
    std::vector<Eigen::Index> out;
    for (const auto& raw : tokens) {
        std::string tok = raw;
        for (auto& ch : tok) {
            if (ch == ',') ch = ' ';
        }
        std::istringstream is(tok);
        std::string part;
        while (is >> part) {
            // allow 1e6 style
            const double v = std::stod(part);
            if (!(v >= 1.0) || v != std::floor(v)) throw std::invalid_argument("--n-grid: bad value " + part);
            out.push_back(static_cast<Eigen::Index>(v));
        }
    }
    return out;
}

void report_files(const std::vector<std::filesystem::path>& files) {
    for (const auto& p : files) std::cout << "wrote " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian linear regression evidence and PAC-Bayesian bound experiments"};
    app.set_version_flag("--version", std::string(pbl::kToolVersion));
    app.require_subcommand(1);

    // ------------------------------------------------------------ fig-a / fig-b
    CommonFlags poly_flags;
    pbl::PolynomialExperimentConfig poly;
    std::vector<std::string> degree_tokens;
    std::uint64_t seeds = 0;

    auto add_poly_flags = [&](CLI::App* sub) {
        sub->add_option("--seed", poly_flags.seed, "master seed (falls back to PBL_SEED)");
        sub->add_option("--out", poly_flags.out, "output directory")->capture_default_str();
        sub->add_option("--sigma2", poly.model.noise_var, "likelihood variance")->capture_default_str();
        sub->add_option("--sigma-pi2", poly.model.prior_var, "prior variance")->capture_default_str();
        sub->add_option("--degrees", degree_tokens, "degrees, e.g. 1..7 or 1,2,3");
        sub->add_option("--n", poly.task.n, "training size")->capture_default_str();
        sub->add_option("--noise-var", poly.task.noise_var, "label noise variance")->capture_default_str();
        sub->add_option("--grid", poly.grid_size, "prediction grid size")->capture_default_str();
        sub->add_option("--mc-test", poly.test_size, "test sample size")->capture_default_str();
        sub->add_option("--delta", poly.delta, "confidence parameter")->capture_default_str();
    };
    auto* fig_a = app.add_subcommand("fig-a", "posterior mean predictions per polynomial degree");
    add_poly_flags(fig_a);
    auto* fig_b = app.add_subcommand("fig-b", "evidence decomposition per polynomial degree");
    add_poly_flags(fig_b);
    fig_b->add_option("--s2", poly.selection_s2, "sub-gamma s^2 for the selection report")->capture_default_str();
    fig_b->add_option("--c", poly.selection_c, "sub-gamma c for the selection report")->capture_default_str();
    fig_b->add_option("--seeds", seeds, "report the selected degree for K consecutive seeds instead");

    // ------------------------------------------------------------------- fig-c
    CommonFlags c_flags;
    pbl::BoundComparisonConfig bc;
    std::vector<std::string> n_tokens;
    std::vector<double> c_crop;
    auto* fig_c = app.add_subcommand("fig-c", "bound values against the training size");
    fig_c->add_option("--seed", c_flags.seed, "master seed (falls back to PBL_SEED)");
    fig_c->add_option("--out", c_flags.out, "output directory")->capture_default_str();
    fig_c->add_option("--delta", bc.delta, "confidence parameter")->capture_default_str();
    fig_c->add_option("--sigma2", bc.model.noise_var, "likelihood variance")->capture_default_str();
    fig_c->add_option("--sigma-pi2", bc.model.prior_var, "prior variance")->capture_default_str();
    fig_c->add_option("--n-grid", n_tokens, "training sizes, e.g. 10,100,1000");
    fig_c->add_option("--crop", c_crop, "crop interval a b")->expected(2);
    fig_c->add_option("--mc-weights", bc.mc_weights, "posterior draws for the cropped empirical risk")
        ->capture_default_str();
    fig_c->add_option("--mc-test", bc.mc_generalization, "posterior draws for the generalization risk")
        ->capture_default_str();
    fig_c->add_option("--d", bc.d, "input dimension")->capture_default_str();
    fig_c->add_option("--w-star-norm", bc.w_star_norm, "norm of the true weights")->capture_default_str();
    fig_c->add_option("--noise-var", bc.noise_var, "label noise variance")->capture_default_str();

    // ---------------------------------------------------------------- validate
    CommonFlags v_flags;
    pbl::ValidationConfig val = pbl::ValidationConfig::defaults();
    std::vector<double> v_crop;
    auto* validate = app.add_subcommand("validate", "bound coverage study and MGF domination check");
    validate->add_option("--seed", v_flags.seed, "master seed (falls back to PBL_SEED)");
    validate->add_option("--out", v_flags.out, "output directory")->capture_default_str();
    validate->add_option("--delta", val.study.delta, "confidence parameter")->capture_default_str();
    validate->add_option("--sigma2", val.study.model.noise_var, "likelihood variance")->capture_default_str();
    validate->add_option("--sigma-pi2", val.study.model.prior_var, "prior variance")->capture_default_str();
    validate->add_option("--trials", val.study.trials, "coverage trials")->capture_default_str();
    validate->add_option("--crop", v_crop, "crop interval a b")->expected(2);
    validate->add_option("--mc-weights", val.study.m_weights, "posterior draws per trial")->capture_default_str();
    validate->add_option("--mc-test", val.study.m_test, "test draws per posterior draw")->capture_default_str();
    validate->add_option("--mgf-samples", val.mgf.samples, "samples for the MGF estimate")->capture_default_str();
    validate->add_option("--threads", val.study.threads, "worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fig_a->parsed() || fig_b->parsed()) {
            poly.task.seed = resolve_seed(poly_flags, pbl::kDefaultSineSeed);
            if (!degree_tokens.empty()) poly.degrees = parse_degrees(degree_tokens);
            poly.validate();
            const std::filesystem::path out = poly_flags.out;
            if (fig_a->parsed()) {
                report_files(pbl::write_fig_a(out, poly, pbl::run_fig_a(poly)));
                return 0;
            }
            if (seeds > 0) {
                const auto sel = pbl::fig_b_selection_distribution(poly, seeds);
                report_files(pbl::write_fig_b_seeds(out, poly, sel));
                return 0;
            }
            const auto result = pbl::run_fig_b(poly);
            report_files(pbl::write_fig_b(out, poly, result));
            std::cout << "argmin degree: " << result.argmin_degree << '\n';
            if (!(result.max_identity_error <= 1e-8)) {
                std::cerr << "evidence identity violated: relative error " << result.max_identity_error << '\n';
                return 2;
            }
            return 0;
        }
        if (fig_c->parsed()) {
            bc.seed = resolve_seed(c_flags, 0);
            if (!n_tokens.empty()) bc.n_grid = parse_n_grid(n_tokens);
            if (!c_crop.empty()) {
                bc.crop_a = c_crop[0];
                bc.crop_b = c_crop[1];
            }
            const auto result = pbl::run_fig_c(bc);
            report_files(pbl::write_fig_c(c_flags.out, bc, result));
            std::cout << "s2 = " << result.subgamma.s2 << ", c = " << result.subgamma.c << '\n';
            for (const auto& r : result.rows) {
                if (!std::isfinite(r.bound_subgamma) || !(r.kl >= -1e-9)) {
                    std::cerr << "invalid bound row at n = " << r.n << '\n';
                    return 2;
                }
            }
            return 0;
        }
        if (validate->parsed()) {
            const std::uint64_t seed = resolve_seed(v_flags, 0);
            val.study.master_seed = seed;
            val.study.task.seed = seed;
            val.mgf_task.seed = seed;
            val.mgf.seed = seed;
            if (!v_crop.empty()) {
                val.study.crop_a = v_crop[0];
                val.study.crop_b = v_crop[1];
            }
            const auto result = pbl::run_validation(val);
            report_files(pbl::write_validation(v_flags.out, val, result));
            for (const auto& f : result.coverage.families) {
                std::cout << pbl::to_string(f.family) << ": " << f.violations << '/' << f.trials
                          << " violations\n";
            }
            std::cout << "MGF dominated: " << (result.mgf.all_dominated() ? "yes" : "no") << '\n';
            return result.passed() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
