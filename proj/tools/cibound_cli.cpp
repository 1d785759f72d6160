// Command-line front end: risk curves, lower bounds / u**, Monte-Carlo
// verification, and the two batch tables over the standard parameter grid.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cibound/cibound.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string fmt8(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.8g", v);
    return buf;
}

std::string manifest_comment(const cibound::RunManifest& m) {
    return "# manifest " + m.to_json().dump() + "\n";
}

void write_outputs(const cibound::RunManifest& m, const std::string& csv_path,
                   const std::string& csv_body, const std::string& json_path,
                   json json_body) {
    json_body["manifest"] = m.to_json();
    if (!csv_path.empty())
        cibound::write_file_atomic(csv_path, manifest_comment(m) + csv_body);
    if (!json_path.empty())
        cibound::write_file_atomic(json_path, json_body.dump(2) + "\n");
}

std::optional<cibound::ResultCache> open_cache(const std::string& flag_dir) {
    if (!flag_dir.empty()) return cibound::ResultCache(flag_dir);
    if (const char* env = std::getenv("CIBOUND_CACHE_DIR"); env && *env)
        return cibound::ResultCache(env);
    return std::nullopt;
}

struct CommonFlags {
    double alpha = 0.05;
    double alpha_tilde = 0.05;
    double rho = 0.0;
    double c = 10.0;
    int panels = 40;
    int nodes_per_panel = 10;
    int threads = 0;

    void attach(CLI::App* cmd, bool with_rho = true) {
        cmd->add_option("--alpha", alpha, "nominal non-coverage (coverage 1-alpha)")
            ->check(CLI::Range(1e-6, 0.999999));
        cmd->add_option("--alpha-tilde", alpha_tilde, "preliminary-test size")
            ->check(CLI::Range(1e-6, 0.999999));
        if (with_rho)
            cmd->add_option("--rho", rho, "correlation corr(theta_hat, tau_hat)")
                ->check(CLI::Range(-0.999999, 0.999999));
        cmd->add_option("--c", c, "truncation constant")->check(CLI::Range(10.0, 100.0));
        cmd->add_option("--panels", panels, "quadrature panels on [0,c]")
            ->check(CLI::Range(1, 10000));
        cmd->add_option("--nodes-per-panel", nodes_per_panel, "Gauss-Legendre nodes per panel")
            ->check(CLI::Range(1, 64));
        cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
    }

    cibound::ProblemConfig config() const {
        return cibound::ProblemConfig(alpha, alpha_tilde, rho, c,
                                      {panels, nodes_per_panel});
    }

    json config_json() const { return config().to_json(); }
};

// ---------------------------------------------------------------- risk-curve

int run_risk_curve(const CommonFlags& common, const std::string& width_kind,
                   const std::string& width_file, double gamma_max, double gamma_step,
                   const std::string& out_prefix) {
    const cibound::ProblemConfig cfg = common.config();
    std::vector<double> grid;
    for (double g = 0.0; g <= gamma_max + 1e-12; g += gamma_step) grid.push_back(g);

    cibound::RiskCurve curve;
    json width_desc;
    if (width_kind == "sd-delta") {
        curve = cibound::risk_curve(cibound::sd_delta_profile(cfg), grid, cfg);
        width_desc = "sd-delta";
    } else if (width_kind == "constant") {
        curve = cibound::risk_curve(cibound::constant_width(cfg), grid, cfg);
        width_desc = "constant";
    } else if (width_kind == "file") {
        std::ifstream in(width_file);
        if (!in) {
            std::cerr << "error: cannot open width file " << width_file << "\n";
            return kExitFailure;
        }
        json j;
        try {
            in >> j;
            const cibound::WidthFunction s = cibound::WidthFunction::from_json(j);
            curve = cibound::risk_curve(s, grid, cfg);
        } catch (const std::exception& e) {
            std::cerr << "error: bad width file: " << e.what() << "\n";
            return kExitFailure;
        }
        width_desc = json{{"file", width_file}};
    }

    json config = common.config_json();
    config["command"] = "risk-curve";
    config["width"] = width_desc;
    config["gammaMax"] = gamma_max;
    config["gammaStep"] = gamma_step;
    cibound::RunManifest manifest = cibound::RunManifest::make("risk-curve", config, 0);

    json body = curve.to_json();
    if (width_kind == "sd-delta") {
        double max_sel = 0.0, min_cov = 1.0;
        for (std::size_t i = 0; i < curve.gamma.size(); ++i) {
            max_sel = std::max(max_sel, curve.sel[i]);
            min_cov = std::min(min_cov, curve.coverage[i]);
        }
        const json summary{{"maxSel", max_sel},
                           {"selAtGammaZero", curve.sel.front()},
                           {"minCoverage", min_cov}};
        body["summary"] = summary;
        std::cout << "summary " << summary.dump() << "\n";
    }

    const std::string csv_path = out_prefix + ".csv";
    const std::string json_path = out_prefix + ".json";
    manifest.outputs = {csv_path, json_path};
    try {
        write_outputs(manifest, csv_path, curve.to_csv(), json_path, body);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

// --------------------------------------------------------------------- bound

struct BoundFlags {
    double u = 0.1;
    int m1 = 4;
    int m2 = 4;
    std::uint64_t seed = 1;
    int starts = 16;
    long max_iterations = 2000;
    int restarts = 2;
    double margin = 0.005;
    double initial_u = 0.1;
    bool solve_uss = false;
};

cibound::OptimizerConfig make_opt(const BoundFlags& b, int threads) {
    cibound::OptimizerConfig opt;
    opt.multistarts = b.starts;
    opt.max_iterations = b.max_iterations;
    opt.restarts = b.restarts;
    opt.seed = b.seed;
    opt.threads = threads;
    opt.m1_range = {b.m1, b.m1};
    opt.m2_range = {b.m2, b.m2};
    return opt;
}

json bound_config_json(const CommonFlags& common, const BoundFlags& b) {
    json config = common.config_json();
    config["command"] = "bound";
    config["u"] = b.u;
    config["m1"] = b.m1;
    config["m2"] = b.m2;
    config["seed"] = b.seed;
    config["starts"] = b.starts;
    config["maxIterations"] = b.max_iterations;
    config["restarts"] = b.restarts;
    config["margin"] = b.margin;
    config["uStarStar"] = b.solve_uss;
    if (b.solve_uss) config["initialU"] = b.initial_u;
    return config;
}

/// Compute (or replay from cache) one optimized bound.
cibound::BoundResult compute_bound(const CommonFlags& common, const BoundFlags& b,
                                   const std::optional<cibound::ResultCache>& cache,
                                   const std::string& hash) {
    if (cache) {
        if (auto hit = cache->load(hash)) {
            std::cerr << "cache hit " << hash << "\n";
            cibound::BoundResult r;
            const json& j = *hit;
            r.prior = cibound::PriorPair::from_json(j.at("prior"));
            r.u = j.at("u").get<double>();
            r.g_tilde = j.at("gTilde").get<double>();
            r.nu2_sum = j.at("nu2Sum").get<double>();
            r.lb = j.at("lb").get<double>();
            r.u_star_star = j.at("uStarStar").is_null()
                                ? std::numeric_limits<double>::quiet_NaN()
                                : j.at("uStarStar").get<double>();
            r.gain_upper_bound = j.at("gainUpperBound").is_null()
                                     ? std::numeric_limits<double>::quiet_NaN()
                                     : j.at("gainUpperBound").get<double>();
            r.loss = j.at("loss").get<double>();
            r.ratio = j.at("ratio").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                              : j.at("ratio").get<double>();
            const json& d = j.at("diagnostics");
            r.diagnostics.alpha = d.at("alpha").get<double>();
            r.diagnostics.alpha_tilde = d.at("alphaTilde").get<double>();
            r.diagnostics.rho = d.at("rho").get<double>();
            r.diagnostics.m1 = d.at("m1").get<int>();
            r.diagnostics.m2 = d.at("m2").get<int>();
            r.diagnostics.quad.panels = d.at("quad").at("panels").get<int>();
            r.diagnostics.quad.nodes_per_panel = d.at("quad").at("nodesPerPanel").get<int>();
            r.diagnostics.margin = d.at("margin").get<double>();
            r.diagnostics.seed = d.at("seed").get<std::uint64_t>();
            r.diagnostics.starts = d.at("starts").get<int>();
            r.diagnostics.iterations = d.at("iterations").get<long>();
            r.diagnostics.best_start = d.at("bestStart").get<int>();
            return r;
        }
    }
    const cibound::ProblemConfig cfg = common.config();
    const cibound::OptimizerConfig opt = make_opt(b, common.threads);
    cibound::BoundResult r =
        b.solve_uss ? cibound::solve_u_star_star(cfg, opt, b.initial_u, b.margin)
                    : cibound::optimize_prior(b.u, b.m1, b.m2, cfg, opt);
    if (cache) cache->store(hash, r.to_json());
    return r;
}

std::string bound_csv(const cibound::BoundResult& r, bool uss_layout) {
    std::string out;
    if (uss_layout) {
        out = "alphaTilde,rho,m1,m2,uStarStar\n";
        out += fmt8(r.diagnostics.alpha_tilde) + "," + fmt8(std::fabs(r.diagnostics.rho)) +
               "," + std::to_string(r.diagnostics.m1) + "," + std::to_string(r.diagnostics.m2) +
               "," + fmt8(r.u_star_star) + "\n";
    } else {
        out = "alphaTilde,rho,u,gainUpperBound,loss,ratio\n";
        out += fmt8(r.diagnostics.alpha_tilde) + "," + fmt8(std::fabs(r.diagnostics.rho)) +
               "," + fmt8(r.u) + "," + fmt8(r.gain_upper_bound) + "," + fmt8(r.loss) + "," +
               fmt8(r.ratio) + "\n";
    }
    return out;
}

int run_bound(const CommonFlags& common, const BoundFlags& b, const std::string& cache_dir,
              const std::string& out_prefix) {
    const json config = bound_config_json(common, b);
    const std::string hash = cibound::hash_hex(config);
    const auto cache = open_cache(cache_dir);

    cibound::BoundResult r;
    try {
        r = compute_bound(common, b, cache, hash);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }

    cibound::RunManifest manifest = cibound::RunManifest::make("bound", config, b.seed);
    const std::string csv_path = out_prefix.empty() ? "" : out_prefix + ".csv";
    const std::string json_path = out_prefix.empty() ? "" : out_prefix + ".json";
    if (!out_prefix.empty()) manifest.outputs = {csv_path, json_path};

    std::cout << "lb " << fmt8(r.lb) << " at u " << fmt8(r.u) << "; uStarStar "
              << fmt8(r.u_star_star) << "; gainUB " << fmt8(r.gain_upper_bound) << "; loss "
              << fmt8(r.loss) << "\n";
    if (!out_prefix.empty()) {
        try {
            write_outputs(manifest, csv_path, bound_csv(r, b.solve_uss), json_path,
                          r.to_json());
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitFailure;
        }
    }
    return kExitOk;
}

// -------------------------------------------------------------------- verify

struct VerifyCase {
    std::string kind;   // "coverage" | "sel"
    std::string width;  // "sd-delta" | "constant" | "zero"
    double gamma = 0.0;
    double rho = 0.0;
    double alpha = 0.05;
    double alpha_tilde = 0.05;
};

std::vector<VerifyCase> default_cases() {
    std::vector<VerifyCase> cases;
    for (double rho : {0.5, 0.8}) {
        for (double gamma : {0.0, 1.0, 2.0}) {
            cases.push_back({"coverage", "sd-delta", gamma, rho, 0.05, 0.05});
            cases.push_back({"sel", "sd-delta", gamma, rho, 0.05, 0.05});
        }
    }
    cases.push_back({"coverage", "constant", 1.0, 0.0, 0.05, 0.05});
    cases.push_back({"sel", "zero", 0.0, 0.3, 0.05, 0.1});
    return cases;
}

int run_verify(std::uint64_t n, std::uint64_t seed, const std::string& cases_file,
               int threads, bool corrupt_bias) {
    std::vector<VerifyCase> cases;
    if (cases_file.empty()) {
        cases = default_cases();
    } else {
        std::ifstream in(cases_file);
        if (!in) {
            std::cerr << "error: cannot open cases file " << cases_file << "\n";
            return kExitUsage;
        }
        json j;
        try {
            in >> j;
            const json& arr = j.is_array() ? j : j.at("cases");
            for (const json& cj : arr) {
                VerifyCase c;
                c.kind = cj.at("kind").get<std::string>();
                c.width = cj.value("width", "sd-delta");
                c.gamma = cj.value("gamma", 0.0);
                c.rho = cj.value("rho", 0.0);
                c.alpha = cj.value("alpha", 0.05);
                c.alpha_tilde = cj.value("alphaTilde", 0.05);
                if (c.kind != "coverage" && c.kind != "sel")
                    throw std::runtime_error("unknown case kind " + c.kind);
                cases.push_back(c);
            }
        } catch (const std::exception& e) {
            std::cerr << "error: malformed cases file: " << e.what() << "\n";
            return kExitUsage;
        }
        if (cases.empty()) {
            std::cerr << "error: cases file lists no cases\n";
            return kExitUsage;
        }
    }

    int failures = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const VerifyCase& c = cases[i];
        const cibound::ProblemConfig cfg(c.alpha, c.alpha_tilde, c.rho);
        const cibound::CompositeRule rule = cfg.rule();
        auto width = [&](double x) -> double {
            if (c.width == "constant") return cfg.z_alpha();
            if (c.width == "zero") return std::fabs(x) >= cfg.c() ? cfg.z_alpha() : 0.0;
            return cfg.z_alpha() * cibound::r_delta(x, cfg.rho(), cfg.d());
        };

        double analytic = 0.0;
        cibound::McEstimate mc;
        const std::uint64_t case_seed = cibound::split_seed(seed, i);
        if (c.kind == "coverage") {
            analytic = cibound::coverage_probability(width, c.gamma, cfg, rule);
            if (corrupt_bias) {
                // test hook: simulate with the centre shift sign-flipped
                const double rho = cfg.rho();
                const double tau = std::sqrt(1.0 - rho * rho);
                cibound::detail::NormalPairRng rng(case_seed);
                std::uint64_t hits = 0;
                for (std::uint64_t k = 0; k < n; ++k) {
                    double z1, z2;
                    rng.next(z1, z2);
                    const double g = rho * z1 + tau * z2;
                    const double gh = c.gamma + z1;
                    const double bh = -cibound::bias(gh, cfg);
                    const double sh = width(gh);
                    if (bh - sh <= g && g <= bh + sh) ++hits;
                }
                mc.n = n;
                mc.mean = static_cast<double>(hits) / static_cast<double>(n);
                mc.std_error = std::sqrt(mc.mean * (1.0 - mc.mean) / static_cast<double>(n));
            } else {
                mc = cibound::mc_coverage(width, c.gamma, cfg, n, case_seed, threads);
            }
        } else {
            analytic = cibound::scaled_expected_length(width, c.gamma, cfg, rule);
            mc = cibound::mc_sel(width, cfg.z_alpha(), c.gamma, n, case_seed, threads);
        }
        const double gap = std::fabs(analytic - mc.mean);
        const double limit = 3.0 * mc.std_error + 1e-12;  // epsilon absorbs exact-zero cases
        const bool ok = gap <= limit;
        if (!ok) ++failures;
        std::printf("case %zu %s %s gamma=%g rho=%g: analytic=%.6f mc=%.6f se=%.2e %s\n", i,
                    c.kind.c_str(), c.width.c_str(), c.gamma, c.rho, analytic, mc.mean,
                    mc.std_error, ok ? "OK" : "FAIL");
    }
    if (failures > 0) {
        std::printf("verify: %d case(s) outside 3 standard errors\n", failures);
        return kExitFailure;
    }
    std::printf("verify: all %zu cases within 3 standard errors\n", cases.size());
    return kExitOk;
}

// ------------------------------------------------------------- table1/table2

struct GridCell {
    double alpha_tilde, rho;
    int m1, m2;
};

// (m1, m2) per cell of the standard grid alphaTilde x |rho|
const GridCell kGrid[] = {
    {0.05, 0.5, 4, 4}, {0.05, 0.6, 4, 4}, {0.05, 0.7, 5, 3}, {0.05, 0.8, 5, 3},
    {0.10, 0.5, 4, 2}, {0.10, 0.6, 7, 4}, {0.10, 0.7, 5, 2}, {0.10, 0.8, 5, 2},
};

// u values per cell for the gain/loss table, two per cell
const double kTable2U[][2] = {
    {0.079, 0.105}, {0.113, 0.151}, {0.171, 0.228}, {0.226, 0.301},
    {0.041, 0.055}, {0.066, 0.089}, {0.095, 0.127}, {0.117, 0.156},
};

int run_table(bool gain_table, const CommonFlags& base, BoundFlags bflags,
              const std::string& cache_dir, const std::string& out_prefix) {
    std::string csv = gain_table ? "alphaTilde,rho,u,gainUpperBound,loss,ratio\n"
                                 : "alphaTilde,rho,m1,m2,uStarStar\n";
    json rows = json::array();
    const auto cache = open_cache(cache_dir);
    for (std::size_t ci = 0; ci < std::size(kGrid); ++ci) {
        const GridCell& cell = kGrid[ci];
        CommonFlags common = base;
        common.alpha_tilde = cell.alpha_tilde;
        common.rho = cell.rho;
        BoundFlags b = bflags;
        b.m1 = cell.m1;
        b.m2 = cell.m2;
        const int nruns = gain_table ? 2 : 1;
        for (int k = 0; k < nruns; ++k) {
            b.solve_uss = !gain_table;
            if (gain_table) b.u = kTable2U[ci][k];
            const json config = bound_config_json(common, b);
            const std::string hash = cibound::hash_hex(config);
            cibound::BoundResult r;
            try {
                r = compute_bound(common, b, cache, hash);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitFailure;
            }
            if (gain_table) {
                csv += fmt8(cell.alpha_tilde) + "," + fmt8(cell.rho) + "," + fmt8(r.u) + "," +
                       fmt8(r.gain_upper_bound) + "," + fmt8(r.loss) + "," + fmt8(r.ratio) +
                       "\n";
            } else {
                csv += fmt8(cell.alpha_tilde) + "," + fmt8(cell.rho) + "," +
                       std::to_string(cell.m1) + "," + std::to_string(cell.m2) + "," +
                       fmt8(r.u_star_star) + "\n";
            }
            rows.push_back(r.to_json());
            std::cerr << "cell alphaTilde=" << cell.alpha_tilde << " rho=" << cell.rho
                      << (gain_table ? " u=" + fmt8(r.u) : std::string())
                      << " done: lb=" << fmt8(r.lb) << " uStarStar=" << fmt8(r.u_star_star)
                      << "\n";
        }
    }

    json config = base.config_json();
    config["command"] = gain_table ? "table2" : "table1";
    config["seed"] = bflags.seed;
    config["starts"] = bflags.starts;
    cibound::RunManifest manifest =
        cibound::RunManifest::make(gain_table ? "table2" : "table1", config, bflags.seed);
    const std::string csv_path = out_prefix + ".csv";
    const std::string json_path = out_prefix + ".json";
    manifest.outputs = {csv_path, json_path};
    std::cout << csv;
    try {
        write_outputs(manifest, csv_path, csv, json_path, json{{"rows", rows}});
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"confidence-interval performance bounds for bootstrap smoothed estimators"};
    app.set_version_flag("--version", std::string(cibound::kVersion));
    app.require_subcommand(1);

    // risk-curve
    auto* rc = app.add_subcommand("risk-curve", "coverage and SEL of CI(s) over a gamma grid");
    CommonFlags rc_common;
    std::string rc_width = "sd-delta", rc_width_file, rc_out = "risk-curve";
    double rc_gmax = 12.0, rc_gstep = 0.05;
    rc_common.attach(rc);
    rc->add_option("--width", rc_width, "width family")
        ->check(CLI::IsMember({"sd-delta", "constant", "file"}));
    rc->add_option("--width-file", rc_width_file, "width JSON (for --width file)");
    rc->add_option("--gamma-max", rc_gmax, "grid upper end")->check(CLI::Range(0.0, 100.0));
    rc->add_option("--gamma-step", rc_gstep, "grid step")->check(CLI::Range(1e-4, 10.0));
    rc->add_option("--out", rc_out, "output path prefix");

    // bound
    auto* bd = app.add_subcommand("bound", "optimized lower bound LB(u) and u**");
    CommonFlags bd_common;
    BoundFlags bd_flags;
    std::string bd_cache, bd_out;
    bd_common.attach(bd);
    bd->add_option("--u", bd_flags.u, "SEL constraint level in (C2)")
        ->check(CLI::Range(1e-9, 10.0));
    bd->add_option("--m1", bd_flags.m1, "coverage prior masses")->check(CLI::Range(1, 64));
    bd->add_option("--m2", bd_flags.m2, "SEL prior masses")->check(CLI::Range(1, 64));
    bd->add_option("--seed", bd_flags.seed, "optimizer seed");
    bd->add_option("--starts", bd_flags.starts, "multistart count")->check(CLI::Range(1, 4096));
    bd->add_option("--max-iterations", bd_flags.max_iterations, "Nelder-Mead iteration cap");
    bd->add_option("--restarts", bd_flags.restarts, "shrinking-simplex restarts");
    bd->add_option("--margin", bd_flags.margin, "threshold margin in u** (LB target 1+margin)");
    bd->add_option("--initial-u", bd_flags.initial_u, "working u for the first pass");
    bd->add_flag("--u-star-star", bd_flags.solve_uss, "solve for u** (two-pass)");
    bd->add_option("--cache-dir", bd_cache, "result cache directory");
    bd->add_option("--out", bd_out, "output path prefix");

    // verify
    auto* vf = app.add_subcommand("verify", "Monte-Carlo cross-check of the analytic risks");
    std::uint64_t vf_n = 1'000'000, vf_seed = 20240101;
    std::string vf_cases;
    int vf_threads = 0;
    bool vf_corrupt = false;
    vf->add_option("--n", vf_n, "draws per case")->check(CLI::Range(std::uint64_t{10000}, std::uint64_t{1000000000}));
    vf->add_option("--seed", vf_seed, "simulation seed");
    vf->add_option("--cases", vf_cases, "JSON case list");
    vf->add_option("--threads", vf_threads, "worker threads");
    vf->add_flag("--corrupt-bias", vf_corrupt, "test hook: sign-flip the centre shift")
        ->group("");  // hidden

    // table1 / table2
    auto* t1 = app.add_subcommand("table1", "u** over the standard grid");
    auto* t2 = app.add_subcommand("table2", "gain/loss over the standard grid");
    CommonFlags t1_common, t2_common;
    BoundFlags t1_flags, t2_flags;
    std::string t1_cache, t2_cache, t1_out = "table1", t2_out = "table2";
    for (auto [cmd, common, flags, cache_ptr, out_ptr] :
         {std::tuple{t1, &t1_common, &t1_flags, &t1_cache, &t1_out},
          std::tuple{t2, &t2_common, &t2_flags, &t2_cache, &t2_out}}) {
        common->attach(cmd, /*with_rho=*/false);
        cmd->add_option("--seed", flags->seed, "optimizer seed");
        cmd->add_option("--starts", flags->starts, "multistart count");
        cmd->add_option("--max-iterations", flags->max_iterations, "Nelder-Mead iteration cap");
        cmd->add_option("--restarts", flags->restarts, "shrinking-simplex restarts");
        cmd->add_option("--initial-u", flags->initial_u, "working u for the first pass");
        cmd->add_option("--cache-dir", *cache_ptr, "result cache directory");
        cmd->add_option("--out", *out_ptr, "output path prefix");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (rc->parsed()) {
            if (rc_width == "file" && rc_width_file.empty()) {
                std::cerr << "error: --width file requires --width-file\n";
                return kExitUsage;
            }
            return run_risk_curve(rc_common, rc_width, rc_width_file, rc_gmax, rc_gstep,
                                  rc_out);
        }
        if (bd->parsed()) return run_bound(bd_common, bd_flags, bd_cache, bd_out);
        if (vf->parsed())
            return run_verify(vf_n, vf_seed, vf_cases, vf_threads, vf_corrupt);
        if (t1->parsed()) return run_table(false, t1_common, t1_flags, t1_cache, t1_out);
        if (t2->parsed()) return run_table(true, t2_common, t2_flags, t2_cache, t2_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}
