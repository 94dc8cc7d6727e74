#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "duokg/train.hpp"

namespace duokg::cli {

/// Flat key=value run configuration. Defaults follow the usual benchmark setup.
struct Config {
    std::string dataset_dir;
    std::string output_dir = ".";
    std::size_t embedding_size = 50;
    std::size_t hidden_size = 50;
    std::size_t batch_size = 128;
    double learning_rate = 0.01;
    std::size_t cluster_number = 75;
    std::size_t beam_size = 100;
    double alpha = 0.15;
    double delta = 0.20;
    double epsilon = 0.1;
    std::size_t path_length = 3;
    std::size_t rollouts_train = 20;
    std::size_t rollouts_test = 100;
    std::size_t epochs = 10;
    std::uint64_t seed = 1;
    double entropy_beta = 0.0;
    bool baseline = true;
    bool guidance = true;
    std::size_t transe_epochs = 200;
    double transe_margin = 1.0;
    double transe_lr = 0.01;
    std::size_t kmeans_iters = 100;

    void validate() const;
    train::TrainConfig train_config(std::size_t workers) const;
};

/// Every accepted key, in echo order.
const std::vector<std::string>& config_keys();

/// Parses a config stream; `source` names it in error messages. Unknown keys,
/// malformed lines and out-of-range values throw ConfigError naming key and line.
Config parse_config(std::istream& in, const std::string& source = "config");
Config load_config(const std::filesystem::path& path);
/// Applies one "key=value" override on top of a parsed config.
void apply_override(Config& config, const std::string& assignment);
void write_config(std::ostream& out, const Config& config);

// Subcommands. Each returns a process exit code: 0 ok, 1 runtime failure,
// 2 usage or configuration error. Diagnostics go to stderr as one line.
struct PrepareOptions {
    Config config;
};
struct TrainOptions {
    Config config;
    std::size_t workers = 1;
    bool trace = false;
};
struct EvalOptions {
    Config config;
    std::string checkpoint;  // defaults to <output_dir>/model.ckpt
    std::size_t workers = 1;
};
struct AnalyzeOptions {
    std::string metrics;
    std::size_t lag = 2;
    std::string report_csv;  // optional
};
struct OracleOptions {
    std::size_t trials = 100;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::size_t max_states = 6;
    std::size_t max_horizon = 4;
};
struct SynthOptions {
    std::string out_dir;
    std::size_t hops = 3;
    std::size_t entities_per_layer = 75;
    std::size_t noise_relations = 6;
    std::size_t noise_edges = 2;
    double train_fraction = 0.8;
    double valid_fraction = 0.0;
    std::uint64_t seed = 1;
};

int cmd_prepare(const PrepareOptions& opt, std::ostream& out);
int cmd_train(const TrainOptions& opt, std::ostream& out);
int cmd_eval(const EvalOptions& opt, std::ostream& out);
int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out);
int cmd_oracle(const OracleOptions& opt, std::ostream& out);
int cmd_synth(const SynthOptions& opt, std::ostream& out);

/// Maps an exception escaping a command to its exit code and prints the diagnostic.
int report_failure(const std::exception& e);

}  // namespace duokg::cli
