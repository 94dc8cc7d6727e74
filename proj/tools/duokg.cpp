#include <CLI11.hpp>
#include <iostream>

#include "duokg/cli.hpp"
#include "duokg/log.hpp"

using namespace duokg;

namespace {

struct ConfigArgs {
    std::string path;
    std::vector<std::string> overrides;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", path, "key=value configuration file");
        app->add_option("--set", overrides, "override a configuration key (key=value), repeatable");
    }

    cli::Config resolve() const {
        cli::Config c = path.empty() ? cli::Config{} : cli::load_config(path);
        for (const auto& o : overrides) cli::apply_override(c, o);
        return c;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"duokg: cluster- and entity-level agents for multi-hop knowledge graph reasoning"};
    app.require_subcommand(1);
    app.fallthrough();
    bool verbose = false, quiet = false;
    app.add_flag("-v,--verbose", verbose, "debug logging");
    app.add_flag("-q,--quiet", quiet, "suppress informational logging");

    ConfigArgs prep_args, train_args, eval_args;
    cli::TrainOptions train_opt;
    cli::EvalOptions eval_opt;
    cli::AnalyzeOptions analyze_opt;
    cli::OracleOptions oracle_opt;
    cli::SynthOptions synth_opt;

    auto* prepare = app.add_subcommand("prepare", "pre-train TransE, cluster entities, write prepared.ckpt");
    prep_args.attach(prepare);

    auto* train = app.add_subcommand("train", "train both agents; writes model.ckpt and metrics.csv");
    train_args.attach(train);
    train->add_option("--workers", train_opt.workers, "worker threads (1 gives bitwise-reproducible runs)")
        ->check(CLI::PositiveNumber);
    train->add_flag("--trace", train_opt.trace, "write per-step trace.csv for the final epoch");

    auto* eval = app.add_subcommand("eval", "beam-search link prediction on the test split; writes results.csv");
    eval_args.attach(eval);
    eval->add_option("--checkpoint", eval_opt.checkpoint, "model checkpoint (default <output_dir>/model.ckpt)");
    eval->add_option("--workers", eval_opt.workers, "worker threads")->check(CLI::PositiveNumber);

    auto* analyze = app.add_subcommand("analyze", "ADF, differencing and Granger tests on the CSS/ESS curves");
    analyze->add_option("metrics", analyze_opt.metrics, "metrics.csv written by train")->required();
    analyze->add_option("--lag", analyze_opt.lag, "lag for ADF and Granger")->check(CLI::PositiveNumber);
    analyze->add_option("--report", analyze_opt.report_csv, "also write the results as CSV");

    auto* oracle = app.add_subcommand("oracle", "reward-shaping consistency check on random tabular MDPs");
    oracle->add_option("--trials", oracle_opt.trials, "number of random MDPs");
    oracle->add_option("--alpha", oracle_opt.alpha, "shaping weight");
    oracle->add_option("--seed", oracle_opt.seed, "seed");
    oracle->add_option("--max-states", oracle_opt.max_states, "largest state count")->check(CLI::Range(2, 12));
    oracle->add_option("--max-horizon", oracle_opt.max_horizon, "longest horizon")->check(CLI::Range(1, 8));

    auto* synth = app.add_subcommand("synth", "generate a layered graph with a planted compositional rule");
    synth->add_option("--out", synth_opt.out_dir, "output dataset directory")->required();
    synth->add_option("--hops", synth_opt.hops, "rule length")->check(CLI::PositiveNumber);
    synth->add_option("--entities", synth_opt.entities_per_layer, "entities per layer")->check(CLI::PositiveNumber);
    synth->add_option("--noise-relations", synth_opt.noise_relations, "distractor relations");
    synth->add_option("--noise-edges", synth_opt.noise_edges, "distractor edges per entity");
    synth->add_option("--train-fraction", synth_opt.train_fraction, "share of queries used for training");
    synth->add_option("--valid-fraction", synth_opt.valid_fraction, "share of queries used for validation");
    synth->add_option("--seed", synth_opt.seed, "seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    log::set_level(quiet ? log::Level::quiet : verbose ? log::Level::debug : log::Level::info);

    try {
        if (*prepare) return cli::cmd_prepare({prep_args.resolve()}, std::cout);
        if (*train) {
            train_opt.config = train_args.resolve();
            return cli::cmd_train(train_opt, std::cout);
        }
        if (*eval) {
            eval_opt.config = eval_args.resolve();
            return cli::cmd_eval(eval_opt, std::cout);
        }
        if (*analyze) return cli::cmd_analyze(analyze_opt, std::cout);
        if (*oracle) return cli::cmd_oracle(oracle_opt, std::cout);
        if (*synth) return cli::cmd_synth(synth_opt, std::cout);
    } catch (const std::exception& e) {
        return cli::report_failure(e);
    }
    return 2;
}
