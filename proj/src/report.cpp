#include "cldp/report.hpp"

#include <cstdio>

#include "json.hpp"

namespace cldp {

const char* const kSweepHeaderBase = "x,x_over_M,regime,k,value,term_0,term_1,term_2,term_3,term_4,term_5,term_6,diagnostic";
const char* const kSweepHeaderMC = ",mc_p,mc_se,bias_bound";

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

RunMeta make_meta(const WalkConfig& config, const std::string& jump_spec, const MCConfig& mc,
                  double eps, double h) {
    RunMeta m;
    m.jump_spec = jump_spec;
    m.n = config.n;
    m.M = config.M;
    m.alpha = config.model.alpha();
    m.s_n = config.s_n;
    m.Pi_n = config.Pi_n;
    m.eps = eps;
    m.h = h;
    m.d = default_d(config);
    m.seed = mc.seed;
    m.y_factor = mc.y_factor;
    m.samples = mc.samples;
    m.k_cap = mc.k_cap;
    m.workers = mc.workers;
    m.soft_censoring_warning = config.soft_warning;
    return m;
}

std::string meta_csv_comment(const RunMeta& m) {
    std::string s;
    s += "# jump=" + m.jump_spec + " n=" + std::to_string(m.n) + " M=" + format_real(m.M) +
         " alpha=" + format_real(m.alpha) + "\n";
    s += "# s_n=" + format_real(m.s_n) + " Pi_n=" + format_real(m.Pi_n) + " eps=" + format_real(m.eps) +
         " h=" + format_real(m.h) + " d=" + format_real(m.d) + "\n";
    s += "# seed=" + std::to_string(m.seed) + " samples=" + std::to_string(m.samples) +
         " y_factor=" + format_real(m.y_factor) + " k_cap=" + std::to_string(m.k_cap) +
         " workers=" + std::to_string(m.workers) +
         " soft_censoring_warning=" + (m.soft_censoring_warning ? "true" : "false") + "\n";
    return s;
}

std::string sweep_csv_row(double x, double M, const Approximation& a, const Estimate* mc) {
    std::string row = format_real(x) + "," + format_real(x / M) + "," + a.regime.name() + "," +
                      std::to_string(a.k) + "," + format_real(a.value);
    constexpr int kTermCols = 7;
    for (int i = 0; i < kTermCols; ++i) {
        row += ",";
        if (i < static_cast<int>(a.terms.size())) row += format_real(a.terms[i].second);
    }
    row += ",";
    if (a.diagnostic) row += format_real(a.diagnostic->second);
    if (mc != nullptr) {
        row += "," + format_real(mc->p_hat) + "," + format_real(mc->std_err) + "," +
               format_real(mc->bias_bound);
    }
    return row;
}

namespace {

nlohmann::json meta_json(const RunMeta& m) {
    return {{"jump", m.jump_spec}, {"n", m.n},       {"M", m.M},
            {"alpha", m.alpha},    {"s_n", m.s_n},   {"Pi_n", m.Pi_n},
            {"eps", m.eps},        {"h", m.h},       {"d", m.d},
            {"seed", m.seed},      {"y_factor", m.y_factor}, {"samples", m.samples},
            {"k_cap", m.k_cap},    {"workers", m.workers},
            {"soft_censoring_warning", m.soft_censoring_warning}};
}

nlohmann::json approx_payload(const Approximation& a) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [label, value] : a.terms) terms.push_back({{"label", label}, {"value", value}});
    nlohmann::json j{{"regime", a.regime.name()}, {"k", a.k}, {"value", a.value}, {"terms", terms}};
    if (a.diagnostic) j["diagnostic"] = {{"label", a.diagnostic->first}, {"value", a.diagnostic->second}};
    return j;
}

}  // namespace

std::string approx_json(const RunMeta& m, const Approximation& a) {
    nlohmann::json j{{"metadata", meta_json(m)}, {"result", approx_payload(a)}};
    return j.dump(2);
}

std::string estimate_json(const RunMeta& m, double x, const Estimate& e) {
    nlohmann::json strata = nlohmann::json::array();
    for (const auto& s : e.strata) {
        strata.push_back({{"j", s.j},
                          {"weight", s.weight},
                          {"cond_prob_hat", s.cond_p},
                          {"cond_se", s.cond_se},
                          {"hits", s.hits},
                          {"censored_hit_fraction", s.censored_hit_fraction}});
    }
    nlohmann::json j{{"metadata", meta_json(m)},
                     {"result",
                      {{"x", x},
                       {"method", e.method == Estimate::Method::Plain ? "plain" : "stratified"},
                       {"p_hat", e.p_hat},
                       {"std_err", e.std_err},
                       {"bias_bound", e.bias_bound},
                       {"strata", strata}}}};
    return j.dump(2);
}

}  // namespace cldp
