#pragma once

#include "firerisk/config.hpp"
#include "firerisk/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace firerisk {

// Exit codes: 0 success, 1 internal error, 2 user/config error.
inline int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"fire-risk analytics: occurrence GAMs and FireCat consequence models"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    app.add_option("-c,--config", config_path, "run configuration (JSON)")->required();
    app.add_option("-o,--out", out_override, "override the output directory");

    auto* synth = app.add_subcommand("synth", "generate the synthetic corpus");
    auto* ingest = app.add_subcommand("ingest", "load, validate and join incident tables");
    bool ingest_synth = false;
    ingest->add_flag("--synth", ingest_synth, "generate the synthetic corpus first");
    auto* targets = app.add_subcommand("targets", "derive consequence labels and thresholds");
    auto* rates = app.add_subcommand("rates", "compute county-month incidence rates");
    auto* fit_gam_cmd = app.add_subcommand("fit-gam", "fit national, seasonal and regional GAMs");
    auto* fit_firecat_cmd = app.add_subcommand("fit-firecat", "fit FireCat and the baseline");
    std::string target;
    fit_firecat_cmd->add_option("-t,--target", target, "spread | injury | loss")
        ->required()
        ->check(CLI::IsMember({"spread", "injury", "loss"}));
    auto* evaluate_cmd = app.add_subcommand("evaluate", "evaluate a persisted model");
    std::string model_path;
    evaluate_cmd->add_option("-m,--model", model_path, "model JSON file")->required();
    auto* explain_cmd = app.add_subcommand("explain", "SHAP attributions and rankings");
    explain_cmd->add_option("-m,--model", model_path, "model JSON file")->required();
    auto* pdp2_cmd = app.add_subcommand("pdp2", "two-factor partial dependence grid");
    pdp2_cmd->add_option("-m,--model", model_path, "model JSON file")->required();
    std::string fx, fy;
    pdp2_cmd->add_option("--fx", fx, "first (x-axis) feature")->required();
    pdp2_cmd->add_option("--fy", fy, "second (y-axis) feature")->required();

    std::vector<const char*> argv;
    argv.push_back("firerisk");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        RunConfig cfg = load_run_config(config_path);
        if (!out_override.empty()) cfg.output_dir = out_override;

        if (synth->parsed()) {
            run_synth(cfg);
        } else if (ingest->parsed()) {
            if (ingest_synth) run_synth(cfg);
            LoadReport report = run_ingest(cfg);
            std::cout << "ingested " << report.rows_kept << " of " << report.rows_in
                      << " rows\n";
        } else if (targets->parsed()) {
            run_targets(cfg);
        } else if (rates->parsed()) {
            RateTable table = run_rates(cfg);
            std::cout << "rates: " << table.rows.size() << " county-months ("
                      << table.excluded.size() << " excluded by the <3 rule)\n";
        } else if (fit_gam_cmd->parsed()) {
            run_fit_gam(cfg);
        } else if (fit_firecat_cmd->parsed()) {
            FitFirecatResult result = run_fit_firecat(cfg, target);
            std::cout << target << ": firecat accuracy "
                      << format_double(result.firecat_report.accuracy) << ", baseline "
                      << format_double(result.baseline_report.accuracy) << "\n";
        } else if (evaluate_cmd->parsed()) {
            EvalReport report = run_evaluate(cfg, model_path);
            std::cout << report.target << ": accuracy " << format_double(report.accuracy)
                      << ", rps " << format_double(report.rps) << "\n";
        } else if (explain_cmd->parsed()) {
            run_explain(cfg, model_path);
        } else if (pdp2_cmd->parsed()) {
            run_pdp2(cfg, model_path, fx, fy);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace firerisk
