#include "pbl/reports.hpp"

#include <ostream>
#include <vector>

namespace pbl {

using nlohmann::json;

json to_json(const EvidenceReport& r) {
    return json{{"neg_log_evidence", r.neg_log_evidence},
                {"gibbs_emp_risk_total", r.gibbs_emp_risk_total},
                {"kl", r.kl},
                {"n", r.n},
                {"d", r.d},
                {"sigma2", r.sigma2},
                {"sigma_pi2", r.sigma_pi2}};
}

json to_json(const BoundReport& r) {
    const BoundInputs& in = r.inputs;
    json j{{"family", to_string(r.family)},
           {"value", r.value},
           {"emp_gibbs_risk", in.emp_gibbs_risk},
           {"kl", in.kl},
           {"n", in.n},
           {"delta", in.delta},
           {"lambda", nullptr},
           {"a", nullptr},
           {"b", nullptr},
           {"s2", nullptr},
           {"c", nullptr},
           {"neg_log_evidence", nullptr}};
    if (in.lambda) j["lambda"] = *in.lambda;
    if (in.range) {
        j["a"] = in.range->first;
        j["b"] = in.range->second;
    }
    if (in.subgamma) {
        j["s2"] = in.subgamma->s2;
        j["c"] = in.subgamma->c;
    }
    if (in.neg_log_evidence) j["neg_log_evidence"] = *in.neg_log_evidence;
    return j;
}

json to_json(const SelectionReport& r) {
    json models = json::array();
    for (const auto& m : r.selection.models) {
        models.push_back({{"id", m.id},
                          {"degree", m.degree},
                          {"neg_log_evidence", m.neg_log_evidence},
                          {"bound", m.bound}});
    }
    return json{{"models", models},
                {"selected_id", r.selection.selected_id},
                {"hierarchical_bound", r.hierarchical_bound},
                {"gap", r.gap},
                {"delta", r.delta},
                {"s2", r.s2},
                {"c", r.c},
                {"params_dim", r.params_dim},
                {"hierarchical_kl", r.hierarchical_kl},
                {"selected_kl", r.selected_kl},
                {"kl_identity_residual", r.kl_identity_residual}};
}

json to_json(const LinearTaskSpec& t) {
    return json{{"d", t.d()},
                {"w_star", std::vector<double>(t.w_star.data(), t.w_star.data() + t.w_star.size())},
                {"w_star_norm", t.w_star.norm()},
                {"input_var", t.input_var},
                {"noise_var", t.noise_var},
                {"seed", t.seed}};
}

json to_json(const CoverageReport& r) {
    json out = json::array();
    for (const auto& f : r.families) {
        out.push_back({{"family", to_string(f.family)},
                       {"trials", f.trials},
                       {"violations", f.violations},
                       {"rate", f.rate},
                       {"delta", r.config.delta},
                       {"mean_bound", f.mean_bound},
                       {"mean_risk", f.mean_risk}});
    }
    const auto& c = r.config;
    json families = json::array();
    for (auto f : c.families) families.push_back(to_string(f));
    return json{{"families", out},
                {"delta", c.delta},
                {"tolerance_rate", r.tolerance_rate()},
                {"all_within_tolerance", r.all_within_tolerance()},
                {"config",
                 {{"task", to_json(c.task)},
                  {"sigma2", c.model.noise_var},
                  {"sigma_pi2", c.model.prior_var},
                  {"n", c.n},
                  {"trials", c.trials},
                  {"families", families},
                  {"crop", {c.crop_a, c.crop_b}},
                  {"mc_weights", c.m_weights},
                  {"mc_test", c.m_test},
                  {"master_seed", c.master_seed},
                  {"s2", r.subgamma.s2},
                  {"c", r.subgamma.c}}}};
}

json to_json(const MgfReport& r) {
    json points = json::array();
    for (const auto& p : r.points) {
        points.push_back({{"lambda", p.lambda},
                          {"psi_hat", p.psi_hat},
                          {"envelope", p.envelope},
                          {"band", p.band},
                          {"dominated", p.dominated}});
    }
    return json{{"points", points},
                {"samples", r.samples},
                {"bootstrap_resamples", r.bootstrap_resamples},
                {"band_multiplier", r.band_multiplier},
                {"all_dominated", r.all_dominated()}};
}

void write_mgf_csv(std::ostream& out, const MgfReport& r) {
    const auto old = out.precision(12);
    out << "lambda,psi_hat,envelope,band\n";
    for (const auto& p : r.points) {
        out << p.lambda << ',' << p.psi_hat << ',' << p.envelope << ',' << p.band << '\n';
    }
    out.precision(old);
}

}  // namespace pbl
