// censored-ldp: regime-dependent tail approximations for censored heavy-tailed
// sums, and the stratified Monte Carlo that validates them.
//
// Subcommands: approx, sweep, wk, simulate, validate.
// Exit codes: 0 ok, 1 validation criterion failure, 2 usage/domain error,
// 3 quadrature convergence error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cldp/asymptotics.hpp"
#include "cldp/report.hpp"
#include "cldp/simulation.hpp"
#include "cldp/validate.hpp"

namespace {

using namespace cldp;

struct CommonFlags {
    std::string jump = "pareto:alpha=3.0";
    int64_t n = 10000;
    double M = 3000.0;
    double eps = -1.0;
    double h = -1.0;
    std::string format = "json";
    std::string out_path;
};

uint64_t default_seed_from_env() {
    if (const char* env = std::getenv("CENSORED_LDP_SEED"); env != nullptr && *env != '\0')
        return std::strtoull(env, nullptr, 10);
    return kDefaultSeed;
}

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--jump", f.jump, "jump model spec, e.g. pareto:alpha=3.0");
    cmd->add_option("--n", f.n, "number of summands")->check(CLI::PositiveNumber);
    cmd->add_option("--M", f.M, "censoring threshold M_n")->check(CLI::PositiveNumber);
    cmd->add_option("--eps", f.eps, "near-multiple band half-width (default 2h)");
    cmd->add_option("--h", f.h, "interior band margin (default min(1/4, 4 s_n/M))");
    cmd->add_option("--format", f.format, "output format: json|csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", f.out_path, "write output to file instead of stdout");
}

void add_mc(CLI::App* cmd, MCConfig& mc) {
    cmd->add_option("--samples", mc.samples, "MC samples per stratum");
    cmd->add_option("--seed", mc.seed, "RNG seed (env CENSORED_LDP_SEED overrides default)");
    cmd->add_option("--y-factor", mc.y_factor, "stratification threshold y = y_factor*M");
    cmd->add_option("--k-cap", mc.k_cap, "largest sampled stratum");
    cmd->add_option("--workers", mc.workers, "worker threads (results identical for any count)");
}

void emit(const CommonFlags& f, const std::string& text) {
    if (f.out_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream os(f.out_path);
        if (!os) throw DomainError("cannot open output file " + f.out_path);
        os << text << "\n";
    }
}

WalkConfig make_config(const CommonFlags& f) { return WalkConfig(f.n, f.M, parse_jump_spec(f.jump)); }

void resolve_bands(const WalkConfig& config, CommonFlags& f) {
    if (f.h < 0.0) f.h = default_h(config);
    if (f.eps < 0.0) f.eps = std::min(0.5, 2.0 * f.h);
}

int cmd_approx(const CommonFlags& flags_in, double x, const MCConfig& mc) {
    CommonFlags f = flags_in;
    const WalkConfig config = make_config(f);
    resolve_bands(config, f);
    const Approximation a = approx_auto(config, x, f.eps, f.h);
    const RunMeta meta = make_meta(config, f.jump, mc, f.eps, f.h);
    if (f.format == "json") {
        emit(f, approx_json(meta, a));
    } else {
        std::string text = meta_csv_comment(meta) + kSweepHeaderBase + "\n" + sweep_csv_row(x, f.M, a, nullptr);
        emit(f, text);
    }
    return 0;
}

int cmd_sweep(const CommonFlags& flags_in, double x_from, double x_to, int points,
              const std::string& with_mc, const MCConfig& mc) {
    CommonFlags f = flags_in;
    if (!(x_from < x_to) || points < 2) throw DomainError("sweep requires x-from < x-to and points >= 2");
    const WalkConfig config = make_config(f);
    resolve_bands(config, f);

    std::vector<double> xs(points);
    for (int i = 0; i < points; ++i) xs[i] = x_from + (x_to - x_from) * i / (points - 1);

    std::vector<Estimate> estimates;
    if (with_mc == "stratified") {
        estimates = estimate_stratified_sweep(config, xs, mc);
    } else if (with_mc == "plain") {
        estimates.reserve(xs.size());
        for (double x : xs) estimates.push_back(estimate_plain(config, x, mc));
    }

    const RunMeta meta = make_meta(config, f.jump, mc, f.eps, f.h);
    std::string text = meta_csv_comment(meta) + kSweepHeaderBase + (estimates.empty() ? "" : kSweepHeaderMC);
    for (size_t i = 0; i < xs.size(); ++i) {
        Approximation a;
        try {
            a = approx_auto(config, xs[i], f.eps, f.h);
        } catch (const RangeError&) {
            continue;  // outside the covered regimes (x beyond k_max band)
        }
        text += "\n" + sweep_csv_row(xs[i], f.M, a, estimates.empty() ? nullptr : &estimates[i]);
    }
    emit(f, text);
    return 0;
}

int cmd_wk(int k, double z, double alpha, bool closed, bool oracle, int64_t samples, uint64_t seed,
           const CommonFlags& f) {
    std::string text = "{\n  \"k\": " + std::to_string(k) + ",\n  \"z\": " + format_real(z) +
                       ",\n  \"alpha\": " + format_real(alpha);
    text += ",\n  \"quadrature\": " + format_real(W(k, z, alpha));
    if (closed) {
        if (k == 1) text += ",\n  \"closed\": " + format_real(W1_closed(z, alpha));
        else if (k == 2) text += ",\n  \"closed\": " + format_real(W2_closed(z, alpha));
        else throw DomainError("closed form available only for k in {1,2}");
    }
    if (oracle) {
        const auto o = oracle_W_simplex(k, z, alpha, samples, seed);
        text += ",\n  \"oracle\": {\"value\": " + format_real(o.value) + ", \"std_err\": " + format_real(o.std_err) +
                ", \"truncation_bias_bound\": " + format_real(o.truncation_bias_bound) + "}";
    }
    text += "\n}";
    emit(f, text);
    return 0;
}

int cmd_simulate(const CommonFlags& flags_in, double x, const std::string& method, const MCConfig& mc) {
    CommonFlags f = flags_in;
    const WalkConfig config = make_config(f);
    resolve_bands(config, f);
    const Estimate e = method == "plain" ? estimate_plain(config, x, mc) : estimate_stratified(config, x, mc);
    const RunMeta meta = make_meta(config, f.jump, mc, f.eps, f.h);
    emit(f, estimate_json(meta, x, e));
    return 0;
}

int cmd_validate(const ValidationOptions& opt) {
    const auto results = run_validation(opt);
    std::cout << format_results(results);
    const WalkConfig cfg(opt.n, opt.M, make_standardized_pareto(opt.alpha));
    if (cfg.soft_warning)
        std::cout << "WARNING: M/s_n = " << cfg.M / cfg.s_n
                  << " < 3 (soft-censoring diagnostic); asymptotic criteria were skipped\n";
    return validation_exit_code(results);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"censored heavy-tailed sums: large-deviation approximations and stratified MC"};
    app.require_subcommand(1);

    CommonFlags flags;
    MCConfig mc;
    mc.seed = default_seed_from_env();

    // approx
    double x = 0.0;
    auto* approx = app.add_subcommand("approx", "evaluate the regime formula at one x");
    add_common(approx, flags);
    approx->add_option("--x", x, "deviation level")->required();

    // sweep
    double x_from = 0.0, x_to = 0.0;
    int points = 0;
    std::string with_mc;
    auto* sweep = app.add_subcommand("sweep", "evaluate the formulas over an x grid (CSV)");
    add_common(sweep, flags);
    add_mc(sweep, mc);
    sweep->add_option("--x-from", x_from)->required();
    sweep->add_option("--x-to", x_to)->required();
    sweep->add_option("--points", points)->required();
    sweep->add_option("--with-mc", with_mc, "add MC columns: plain|stratified")
        ->check(CLI::IsMember({"plain", "stratified"}));

    // wk
    int wk_k = 1;
    double wk_z = 0.5, wk_alpha = 3.0;
    bool wk_closed = false, wk_oracle = false;
    int64_t wk_samples = 1000000;
    auto* wk = app.add_subcommand("wk", "evaluate W_k by quadrature / closed form / simplex MC");
    wk->add_option("--k", wk_k)->required();
    wk->add_option("--z", wk_z)->required();
    wk->add_option("--alpha", wk_alpha);
    wk->add_flag("--closed", wk_closed, "also print the closed form (k in {1,2})");
    wk->add_flag("--oracle", wk_oracle, "also print the simplex-MC estimate");
    wk->add_option("--samples", wk_samples);
    uint64_t wk_seed = mc.seed;
    wk->add_option("--seed", wk_seed);
    wk->add_option("--out", flags.out_path);

    // simulate
    std::string method = "stratified";
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of P(Y_n > x)");
    add_common(simulate, flags);
    add_mc(simulate, mc);
    simulate->add_option("--x", x, "deviation level")->required();
    simulate->add_option("--method", method)->check(CLI::IsMember({"plain", "stratified"}));

    // validate
    ValidationOptions vopt;
    vopt.seed = mc.seed;
    auto* validate = app.add_subcommand("validate", "run the acceptance battery, PASS/FAIL per criterion");
    validate->add_option("--n", vopt.n);
    validate->add_option("--M", vopt.M);
    validate->add_option("--alpha", vopt.alpha);
    validate->add_option("--samples", vopt.samples);
    validate->add_option("--seed", vopt.seed);
    validate->add_option("--workers", vopt.workers);
    validate->add_flag("--quick", vopt.quick, "W-function checks only");

    try {
        app.parse(argc, argv);
        if (approx->parsed()) return cmd_approx(flags, x, mc);
        if (sweep->parsed()) return cmd_sweep(flags, x_from, x_to, points, with_mc, mc);
        if (wk->parsed()) return cmd_wk(wk_k, wk_z, wk_alpha, wk_closed, wk_oracle, wk_samples, wk_seed, flags);
        if (simulate->parsed()) return cmd_simulate(flags, x, method, mc);
        if (validate->parsed()) return cmd_validate(vopt);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
