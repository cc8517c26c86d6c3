#include <CLI11.hpp>

#include "halodet/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Hallucination span detection via specialized-model perplexity divergence"};
    app.require_subcommand(1);

    halodet::cli::DetectOptions detect;
    auto* detect_cmd = app.add_subcommand("detect", "Tag hallucinated spans in a dataset");
    detect_cmd->add_option("--config", detect.config_path, "run configuration (JSON)")
        ->required();
    detect_cmd->add_option("--dataset", detect.dataset_path, "input dataset (JSONL)")
        ->required();
    detect_cmd->add_option("--out", detect.out_path, "predictions output (JSONL)")->required();
    detect_cmd->add_flag("--synthetic", detect.synthetic,
                         "run every profile on the offline synthetic backend");
    detect_cmd->add_option("--seed", detect.seed, "synthetic backend seed");
    detect_cmd->add_option("--max-concurrency", detect.max_concurrency,
                           "parallel instances / model calls");
    detect_cmd->add_option("--lang", detect.lang, "language filter (codes or 'all')");

    halodet::cli::EvaluateOptions evaluate;
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "Score predictions against gold annotations");
    evaluate_cmd->add_option("--pred", evaluate.pred_path, "predictions file (JSONL)")
        ->required();
    evaluate_cmd->add_option("--gold", evaluate.gold_path, "gold dataset (JSONL)")->required();
    evaluate_cmd->add_option("--report", evaluate.report_path, "report output (CSV)")
        ->required();
    evaluate_cmd->add_option("--lang", evaluate.lang, "language filter (codes or 'all')");

    halodet::cli::TuneOptions tune;
    auto* tune_cmd =
        app.add_subcommand("tune", "Random-search (beta, sigma, tau) on a labeled dataset");
    tune_cmd->add_option("--config", tune.config_path, "run configuration (JSON)")->required();
    tune_cmd->add_option("--dataset", tune.dataset_path, "labeled dataset (JSONL)")
        ->required();
    tune_cmd->add_option("--out", tune.out_path, "best-params config fragment (JSON)")
        ->required();
    tune_cmd->add_option("--trials", tune.trials, "number of trials");
    tune_cmd->add_option("--seed", tune.seed, "sampler seed");
    tune_cmd->add_flag("--synthetic", tune.synthetic,
                       "run every profile on the offline synthetic backend");
    tune_cmd->add_option("--max-concurrency", tune.max_concurrency,
                         "parallel instances / trials");
    tune_cmd->add_option("--lang", tune.lang,
                         "language filter (default: English subset when multilingual)");

    CLI11_PARSE(app, argc, argv);

    if (detect_cmd->parsed()) return halodet::cli::cmd_detect(detect);
    if (evaluate_cmd->parsed()) return halodet::cli::cmd_evaluate(evaluate);
    return halodet::cli::cmd_tune(tune);
}
