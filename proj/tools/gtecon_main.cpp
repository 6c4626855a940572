#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gtecon/harness.hpp"
#include "gtecon/ingest.hpp"
#include "gtecon/optimize.hpp"
#include "gtecon/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadedRun {
    gtecon::ScenarioConfig scen;
    std::vector<gtecon::PrevalencePoint> prevalence;
    std::vector<gtecon::EmpiricalIncomeDistribution> incomes;
    json resolved;
    std::vector<std::pair<std::string, std::string>> input_digests;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gtecon::DataError("cannot write " + path.string());
    out << content;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return j;
}

gtecon::IncidenceFormat incidence_format_from(const json& cfg) {
    gtecon::IncidenceFormat format;
    if (cfg.contains("incidence_format")) {
        const json& f = cfg.at("incidence_format");
        format.location_col = f.value("location_col", format.location_col);
        format.date_col = f.value("date_col", format.date_col);
        format.incidence_col = f.value("incidence_col", format.incidence_col);
    }
    return format;
}

gtecon::IncomeFormat income_format_from(const json& cfg) {
    gtecon::IncomeFormat format;
    if (cfg.contains("income_format")) {
        const json& f = cfg.at("income_format");
        format.region_col = f.value("region_col", format.region_col);
        format.year_col = f.value("year_col", format.year_col);
        format.monthly_gross_col =
            f.value("monthly_gross_col", format.monthly_gross_col);
        format.weekly_hours_col =
            f.value("weekly_hours_col", format.weekly_hours_col);
        format.year_min = f.value("year_min", format.year_min);
        format.year_max = f.value("year_max", format.year_max);
    }
    return format;
}

LoadedRun load_run(const std::string& config_path, std::uint64_t seed_override,
                   bool has_seed_override, int threads) {
    json cfg = read_json_file(config_path);
    LoadedRun run;

    if (!cfg.contains("locations") || cfg.at("locations").empty()) {
        throw ConfigError("config needs a non-empty 'locations' list");
    }
    run.scen.locations = cfg.at("locations").get<std::vector<std::string>>();
    run.scen.algorithms =
        cfg.value("algorithms", std::vector<int>{2, 3, 4, 5});
    run.scen.n = cfg.value("n", std::int64_t{1000});
    run.scen.n_sim = cfg.value("n_sim", 25);
    run.scen.duration_days = cfg.value("duration_days", 14.0);
    run.scen.s_max = cfg.value("s_max", 256);
    run.scen.strict_nesting = cfg.value("strict_nesting", true);
    run.scen.common_random_numbers = cfg.value("common_random_numbers", false);
    run.scen.threads = threads;

    if (cfg.contains("cost")) {
        const json& c = cfg.at("cost");
        run.scen.cost.c_f = c.value("c_f", run.scen.cost.c_f);
        run.scen.cost.c_v = c.value("c_v", run.scen.cost.c_v);
        run.scen.cost.c_l = c.value("c_l", run.scen.cost.c_l);
        run.scen.cost.tau0 = c.value("tau0", run.scen.cost.tau0);
        run.scen.cost.h = c.value("h", run.scen.cost.h);
        run.scen.cost.stage_duration_days =
            c.value("stage_duration_days", run.scen.cost.stage_duration_days);
    }

    if (has_seed_override) {
        run.scen.seed = seed_override;
    } else if (cfg.contains("seed")) {
        run.scen.seed = cfg.at("seed").get<std::uint64_t>();
    } else {
        throw ConfigError("seed is mandatory (config 'seed' or --seed)");
    }

    if (!cfg.contains("incidence_csv")) {
        throw ConfigError("config needs 'incidence_csv'");
    }
    const std::string incidence_path = cfg.at("incidence_csv").get<std::string>();
    gtecon::IngestReport report;
    auto records = gtecon::load_incidence_csv(
        incidence_path, incidence_format_from(cfg), report);
    run.prevalence = gtecon::to_prevalence(records, run.scen.duration_days, &report);
    run.input_digests.emplace_back(incidence_path,
                                   gtecon::file_digest(incidence_path));

    const bool has_csv = cfg.contains("income_csv");
    const bool has_synth = cfg.contains("synthetic_income");
    if (has_csv == has_synth) {
        throw ConfigError(
            "config needs exactly one of 'income_csv' and 'synthetic_income'");
    }
    gtecon::DailyIncomeRule rule = gtecon::DailyIncomeRule::hours_based;
    if (cfg.value("income_rule", std::string("hours_based")) == "five_day_week") {
        rule = gtecon::DailyIncomeRule::five_day_week;
    }
    if (has_csv) {
        const std::string income_path = cfg.at("income_csv").get<std::string>();
        gtecon::IngestReport income_report;
        auto income_records = gtecon::load_income_csv(
            income_path, income_format_from(cfg), income_report);
        run.incomes = gtecon::to_income_distributions(income_records, rule);
        run.input_digests.emplace_back(income_path,
                                       gtecon::file_digest(income_path));
    } else {
        const json& s = cfg.at("synthetic_income");
        const double location_param = s.value("location", std::log(100.0));
        const double scale_param = s.value("scale", 0.5);
        const std::int64_t count = s.value("count", std::int64_t{20000});
        const std::uint64_t synth_seed = s.value("seed", std::uint64_t{1});
        for (const auto& loc : run.scen.locations) {
            run.incomes.push_back(gtecon::synthesize_incomes(
                loc, count, location_param, scale_param,
                gtecon::rng::combine(synth_seed, gtecon::rng::hash_str(loc))));
        }
    }

    run.resolved = json{
        {"locations", run.scen.locations},
        {"algorithms", run.scen.algorithms},
        {"n", run.scen.n},
        {"n_sim", run.scen.n_sim},
        {"duration_days", run.scen.duration_days},
        {"seed", run.scen.seed},
        {"s_max", run.scen.s_max},
        {"strict_nesting", run.scen.strict_nesting},
        {"common_random_numbers", run.scen.common_random_numbers},
        {"income_rule",
         rule == gtecon::DailyIncomeRule::hours_based ? "hours_based"
                                                      : "five_day_week"},
        {"cost",
         {{"c_f", run.scen.cost.c_f},
          {"c_v", run.scen.cost.c_v},
          {"c_l", run.scen.cost.c_l},
          {"tau0", run.scen.cost.tau0},
          {"h", run.scen.cost.h},
          {"stage_duration_days", run.scen.cost.stage_duration_days}}}};
    if (has_csv) {
        run.resolved["income_csv"] = cfg.at("income_csv");
    } else {
        run.resolved["synthetic_income"] = cfg.at("synthetic_income");
    }
    run.resolved["incidence_csv"] = incidence_path;
    return run;
}

json manifest_for(const std::string& command, const LoadedRun& run,
                  const std::vector<std::string>& outputs) {
    json inputs = json::array();
    for (const auto& [path, digest] : run.input_digests) {
        inputs.push_back({{"path", path}, {"digest", digest}});
    }
    return json{{"command", command},
                {"config", run.resolved},
                {"seed", run.scen.seed},
                {"inputs", inputs},
                {"outputs", outputs}};
}

std::string fmt_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

int cmd_ingest(const std::string& incidence_path, const std::string& income_path,
               const std::string& out_path) {
    gtecon::IngestReport report;
    if (!incidence_path.empty()) {
        gtecon::load_incidence_csv(incidence_path, gtecon::IncidenceFormat{},
                                   report);
    }
    if (!income_path.empty()) {
        gtecon::load_income_csv(income_path, gtecon::IncomeFormat{}, report);
    }
    const std::string body = report.to_json() + "\n";
    std::cout << body;
    if (!out_path.empty()) write_file(out_path, body);
    return 0;
}

int cmd_optimize(int k, double p, int s_max, bool strict, const std::string& format) {
    gtecon::OptimizationRequest req;
    req.stages = k;
    req.prevalence = p;
    req.s_max = s_max;
    req.n = std::max<std::int64_t>(1000, s_max);
    req.strict_nesting = strict;
    auto res = gtecon::optimize_pool_sizes(req);

    if (format == "json") {
        json sizes = json::array();
        for (int s : res.plan.pool_sizes) sizes.push_back(s);
        std::cout << json{{"k", k},
                          {"p", p},
                          {"pool_sizes", sizes},
                          {"per_capita_expected_tests", res.per_capita_tests},
                          {"individual_testing_dominates",
                           res.individual_testing_dominates}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << "k=" << k << " p=" << fmt_value(p) << " pool_sizes=";
        for (std::size_t i = 0; i < res.plan.pool_sizes.size(); ++i) {
            std::cout << (i ? "," : "") << res.plan.pool_sizes[i];
        }
        std::cout << " per_capita_expected_tests="
                  << fmt_value(res.per_capita_tests);
        if (res.individual_testing_dominates) {
            std::cout << " (individual testing dominates)";
        }
        std::cout << "\n";
    }
    return 0;
}

void write_results(const fs::path& out_dir, const std::string& stem,
                   const std::vector<gtecon::ScenarioResult>& results,
                   const std::string& format, std::vector<std::string>& outputs) {
    const auto choices = gtecon::optimal_choice(results);
    if (format == "csv" || format == "both") {
        write_file(out_dir / (stem + ".csv"), gtecon::results_to_csv(results));
        write_file(out_dir / (stem + "_optimal_choice.csv"),
                   gtecon::choices_to_csv(choices));
        outputs.push_back(stem + ".csv");
        outputs.push_back(stem + "_optimal_choice.csv");
    }
    if (format == "json" || format == "both") {
        write_file(out_dir / (stem + ".json"), gtecon::results_to_json(results));
        write_file(out_dir / (stem + "_optimal_choice.json"),
                   gtecon::choices_to_json(choices));
        outputs.push_back(stem + ".json");
        outputs.push_back(stem + "_optimal_choice.json");
    }
}

int cmd_run(const LoadedRun& run, const fs::path& out_dir, const std::string& format) {
    fs::create_directories(out_dir);
    auto results = gtecon::run_scenario(run.scen, run.prevalence, run.incomes);
    std::vector<std::string> outputs;
    write_results(out_dir, "results", results, format, outputs);
    write_file(out_dir / "manifest.json",
               manifest_for("run", run, outputs).dump(2) + "\n");
    std::cout << "wrote " << outputs.size() + 1 << " files to " << out_dir.string()
              << "\n";
    return 0;
}

int cmd_sweep(const LoadedRun& run, const fs::path& out_dir,
              const std::string& format, const std::string& param_name,
              const std::vector<double>& values) {
    fs::create_directories(out_dir);
    auto param = gtecon::parse_sweep_parameter(param_name);
    auto swept = gtecon::sweep(run.scen, param, values, run.prevalence, run.incomes);
    std::vector<std::string> outputs;
    for (const auto& sr : swept) {
        write_results(out_dir, "results_" + param_name + "_" + fmt_value(sr.value),
                      sr.results, format, outputs);
    }
    json manifest = manifest_for("sweep", run, outputs);
    manifest["sweep"] = {{"param", param_name}, {"values", [&] {
                             json vals = json::array();
                             for (const auto& sr : swept) vals.push_back(sr.value);
                             return vals;
                         }()}};
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << outputs.size() + 1 << " files to " << out_dir.string()
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group-testing economic evaluation toolkit"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Parse input CSVs and report");
    std::string ingest_incidence, ingest_income, ingest_out;
    ingest->add_option("--incidence", ingest_incidence, "incidence CSV path");
    ingest->add_option("--income", ingest_income, "income CSV path");
    ingest->add_option("--out", ingest_out, "write report JSON here");

    // optimize
    auto* optimize = app.add_subcommand("optimize", "Optimal pool sizes for (k, p)");
    int opt_k = 2;
    double opt_p = 0.0;
    int opt_smax = 256;
    bool opt_no_strict = false;
    std::string opt_format = "text";
    optimize->add_option("--k", opt_k, "number of stages")->required();
    optimize->add_option("--p", opt_p, "prevalence in (0,1)")->required();
    optimize->add_option("--smax", opt_smax, "upper bound for s1");
    optimize->add_flag("--no-strict-nesting", opt_no_strict,
                       "drop the divisibility constraint");
    optimize->add_option("--format", opt_format)
        ->check(CLI::IsMember({"text", "json"}));

    // run / sweep share config options
    std::string config_path, out_dir = "out", run_format = "csv";
    std::uint64_t seed_override = 0;
    bool has_seed = false;
    int threads = 1;
    std::string sweep_param;
    std::vector<double> sweep_values;

    auto add_run_options = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config JSON")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed_override, "seed override")
            ->each([&](const std::string&) { has_seed = true; });
        cmd->add_option("--format", run_format)
            ->check(CLI::IsMember({"csv", "json", "both"}));
        cmd->add_option("--threads", threads, "0 = all cores");
    };

    auto* runc = app.add_subcommand("run", "Evaluate configured scenarios");
    add_run_options(runc);
    auto* sweepc = app.add_subcommand("sweep", "One-at-a-time parameter sweep");
    add_run_options(sweepc);
    sweepc->add_option("--param", sweep_param, "one of c_v, n, h, tau0")->required();
    sweepc->add_option("--values", sweep_values, "values to sweep")
        ->required()
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (ingest->parsed()) {
            if (ingest_incidence.empty() && ingest_income.empty()) {
                std::cerr << "ingest needs --incidence and/or --income\n";
                return kExitUsage;
            }
            return cmd_ingest(ingest_incidence, ingest_income, ingest_out);
        }
        if (optimize->parsed()) {
            return cmd_optimize(opt_k, opt_p, opt_smax, !opt_no_strict, opt_format);
        }
        if (runc->parsed() || sweepc->parsed()) {
            LoadedRun run = load_run(config_path, seed_override, has_seed, threads);
            if (runc->parsed()) return cmd_run(run, out_dir, run_format);
            return cmd_sweep(run, out_dir, run_format, sweep_param, sweep_values);
        }
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const gtecon::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const gtecon::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const gtecon::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
