#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>

#include "duokg/analysis.hpp"
#include "duokg/cli.hpp"
#include "duokg/infer.hpp"
#include "duokg/log.hpp"
#include "duokg/oracle.hpp"
#include "duokg/synthetic.hpp"

namespace duokg::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMinSeriesLength = 10;

kg::Dataset load_data(const Config& c) {
    if (c.dataset_dir.empty()) throw ConfigError("key 'dataset_dir' is required");
    if (!fs::is_directory(c.dataset_dir)) {
        throw ConfigError("key 'dataset_dir': directory '" + c.dataset_dir + "' does not exist");
    }
    return kg::load_dataset(c.dataset_dir);
}

kg::KnowledgeGraph make_graph(const kg::Dataset& d) {
    const auto edges = d.graph_edges();
    return kg::KnowledgeGraph::build(edges, d.entities, d.relations);
}

fs::path output_path(const Config& c, const char* name) {
    fs::create_directories(c.output_dir);
    return fs::path(c.output_dir) / name;
}

// Everything a policy needs, rebuilt from a checkpoint.
struct Workspace {
    kg::Dataset data;
    kg::KnowledgeGraph graph;
    embed::EmbeddingTable table;
    embed::ClusterModel clusters;
    std::vector<std::pair<std::string, nn::Tensor>> params;
};

Workspace open_workspace(const Config& c, const fs::path& ckpt_path) {
    Workspace w;
    w.data = load_data(c);
    w.graph = make_graph(w.data);
    if (!fs::exists(ckpt_path)) throw IoError("checkpoint " + ckpt_path.string() + " not found; run prepare first");
    embed::Checkpoint ck = embed::load_checkpoint(ckpt_path);
    if (!ck.table || !ck.clusters) throw IoError("checkpoint " + ckpt_path.string() + " lacks embedding or clusters");
    w.table = std::move(*ck.table);
    w.clusters = std::move(*ck.clusters);
    if (w.table.num_entities != w.graph.num_entities() || w.table.num_relations != w.graph.num_relations()) {
        throw IoError("checkpoint " + ckpt_path.string() + " does not match the dataset vocabulary");
    }
    if (w.table.dim != c.embedding_size) {
        throw ConfigError("key 'embedding_size': " + std::to_string(c.embedding_size) + " but checkpoint has " +
                          std::to_string(w.table.dim));
    }
    w.clusters.adjacency = embed::build_cluster_graph(w.graph, w.clusters.assignment, w.clusters.num_clusters);
    w.params = std::move(ck.params);
    return w;
}

kg::AnswerIndex known_answers(const kg::Dataset& d) {
    kg::AnswerIndex idx;
    idx.add(d.facts);
    idx.add(d.train);
    idx.add(d.valid);
    idx.add(d.test);
    return idx;
}

void print_summary(std::ostream& out, const infer::EvalSummary& s) {
    out << std::fixed << std::setprecision(4);
    auto row = [&](const char* name, const infer::RankMetrics& m) {
        out << name << "  MRR " << m.mrr << "  Hits@1 " << m.hits.at(1) << "  Hits@3 " << m.hits.at(3)
            << "  Hits@10 " << m.hits.at(10) << '\n';
    };
    out << "queries " << s.queries << '\n';
    row("raw     ", s.raw);
    row("filtered", s.filtered);
    out.unsetf(std::ios::floatfield);
}

std::vector<double> column(const std::vector<train::EpochMetrics>& rows, double train::EpochMetrics::*field) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.*field);
    return v;
}

// Differences until the 5% ADF test rejects a unit root, at most twice.
struct Stationary {
    std::vector<double> series;
    std::size_t order = 0;
    std::vector<analysis::AdfResult> tests;
};

Stationary make_stationary(std::vector<double> s, std::size_t lag) {
    Stationary out;
    for (;;) {
        const auto adf = analysis::adf_test(s, lag);
        out.tests.push_back(adf);
        if (adf.rejects_at(analysis::AdfLevel::five) || out.order == 2 || s.size() <= lag + 10) break;
        s = analysis::difference(s, 1);
        ++out.order;
    }
    out.series = std::move(s);
    return out;
}

}  // namespace

int report_failure(const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    return 1;
}

int cmd_prepare(const PrepareOptions& opt, std::ostream& out) {
    const Config& c = opt.config;
    c.validate();
    const kg::Dataset data = load_data(c);
    const kg::KnowledgeGraph graph = make_graph(data);
    out << "# configuration\n";
    write_config(out, c);

    const auto edges = data.graph_edges();
    const auto deg = kg::degree_stats(edges, graph.num_entities());
    out << "entities " << graph.num_entities() << "  relations " << graph.num_base_relations() << "  facts "
        << edges.size() << "  train " << data.train.size() << "  valid " << data.valid.size() << "  test "
        << data.test.size() << '\n';
    out << "out-degree mean " << std::setprecision(4) << deg.mean << "  median " << deg.median << '\n';

    embed::TransEConfig tc;
    tc.dim = c.embedding_size;
    tc.margin = c.transe_margin;
    tc.lr = c.transe_lr;
    tc.epochs = c.transe_epochs;
    tc.seed = c.seed;
    embed::EmbeddingTable table = embed::transe_train(edges, graph.num_entities(), graph.num_base_relations(), tc);
    embed::round_to_float(table.entities);
    embed::round_to_float(table.relations);

    embed::KMeansConfig kc;
    kc.clusters = c.cluster_number;
    kc.max_iters = c.kmeans_iters;
    kc.seed = c.seed;
    if (kc.clusters > graph.num_entities()) {
        throw ConfigError("key 'cluster_number': " + std::to_string(kc.clusters) + " exceeds entity count " +
                          std::to_string(graph.num_entities()));
    }
    embed::ClusterModel clusters = embed::make_cluster_model(graph, table, kc);
    std::size_t cluster_edges = 0;
    for (const auto& a : clusters.adjacency) cluster_edges += a.size();
    out << "clusters " << clusters.num_clusters << "  cluster edges " << cluster_edges << '\n';

    embed::Checkpoint ck;
    ck.seed = c.seed;
    ck.table = std::move(table);
    ck.clusters = std::move(clusters);
    const fs::path path = output_path(c, "prepared.ckpt");
    embed::save_checkpoint(path, ck);
    out << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_train(const TrainOptions& opt, std::ostream& out) {
    const Config& c = opt.config;
    c.validate();
    const train::TrainConfig tc = c.train_config(opt.workers);
    Workspace w = open_workspace(c, fs::path(c.output_dir) / "prepared.ckpt");

    nn::ParamStore store(splitmix64(c.seed ^ 0x706172616d73ULL));
    const agents::PolicyModel model = agents::PolicyModel::create(store, w.table, w.clusters);
    for (std::uint32_t i = 0; i < store.count(); ++i) embed::round_to_float(store.tensor(nn::ParamId{i}).values);
    const agents::Frozen frozen{&w.graph, &w.table, &w.clusters};

    train::Trainer trainer(store, model, frozen, tc);
    const auto queries = kg::group_queries(w.data.train);
    out << "training on " << queries.size() << " queries for " << tc.epochs << " epochs\n";

    train::ValidationHook validate;
    const kg::AnswerIndex known = known_answers(w.data);
    if (!w.data.valid.empty()) {
        validate = [&](const nn::ParamStore& s) {
            const agents::Policy pol{&model, &s, frozen};
            const auto res =
                infer::evaluate(pol, w.data.valid, known, infer::BeamConfig{tc.beam_size, tc.path_length}, tc.workers);
            return infer::summarize(res).filtered.hits.at(1);
        };
    }
    const auto metrics = trainer.run(queries, validate, [&](const train::EpochMetrics& m, auto) {
        out << "epoch " << m.epoch << "  J_giant " << std::setprecision(5) << m.j_giant << "  J_dwarf " << m.j_dwarf
            << "  lambda " << m.mean_lambda << "  CSS " << m.css << "  ESS " << m.ess;
        if (!std::isnan(m.hits1_valid)) out << "  valid Hits@1 " << m.hits1_valid;
        out << '\n';
    });

    {
        std::ofstream f(output_path(c, "metrics.csv"));
        if (!f) throw IoError("cannot write metrics.csv");
        train::write_metrics_csv(f, tc, metrics);
    }
    if (opt.trace) {
        std::ofstream f(output_path(c, "trace.csv"));
        if (!f) throw IoError("cannot write trace.csv");
        env::write_trace_csv(f, trainer.last_rollouts(), w.graph);
    }
    embed::Checkpoint ck;
    ck.seed = c.seed;
    ck.table = w.table;
    ck.clusters = w.clusters;
    ck.params = embed::snapshot_params(store);
    const fs::path path = output_path(c, "model.ckpt");
    embed::save_checkpoint(path, ck);
    out << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_eval(const EvalOptions& opt, std::ostream& out) {
    const Config& c = opt.config;
    c.validate();
    if (opt.workers == 0) throw ConfigError("--workers must be positive");
    const fs::path path = opt.checkpoint.empty() ? fs::path(c.output_dir) / "model.ckpt" : fs::path(opt.checkpoint);
    Workspace w = open_workspace(c, path);
    if (w.params.empty()) throw IoError("checkpoint " + path.string() + " has no policy parameters");

    nn::ParamStore store;
    for (auto& [name, t] : w.params) store.add_tensor(name, t);
    const agents::PolicyModel model = agents::PolicyModel::bind(
        store, agents::ModelShape{w.table.dim, w.table.num_relations, w.clusters.num_clusters});
    const agents::Policy pol{&model, &store, agents::Frozen{&w.graph, &w.table, &w.clusters}};

    if (w.data.test.empty()) throw IoError("dataset has no test triples");
    const auto results = infer::evaluate(pol, w.data.test, known_answers(w.data),
                                         infer::BeamConfig{c.beam_size, c.path_length}, opt.workers);
    const auto summary = infer::summarize(results);
    std::ofstream f(output_path(c, "results.csv"));
    if (!f) throw IoError("cannot write results.csv");
    infer::write_results_csv(f, results, summary, w.graph);
    print_summary(out, summary);
    return 0;
}

int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out) {
    std::ifstream in(opt.metrics);
    if (!in) throw IoError("cannot open metrics file " + opt.metrics);
    const auto rows = train::read_metrics_csv(in);
    if (rows.size() < kMinSeriesLength) {
        throw std::invalid_argument("analyze: " + std::to_string(rows.size()) + " epochs in " + opt.metrics +
                                    "; length ≥ " + std::to_string(kMinSeriesLength) + " required");
    }
    const auto css = column(rows, &train::EpochMetrics::css);
    const auto ess = column(rows, &train::EpochMetrics::ess);

    std::ofstream csv;
    if (!opt.report_csv.empty()) {
        csv.open(opt.report_csv);
        if (!csv) throw IoError("cannot write " + opt.report_csv);
        csv << "test,series,order,statistic,decision\n";
    }
    out << std::setprecision(6);
    out << "epochs " << rows.size() << ", lag " << opt.lag << '\n';
    for (const auto& [name, series] : {std::pair{"CSS", css}, std::pair{"ESS", ess}}) {
        const auto s = analysis::summarize(series);
        out << name << " mean " << s.mean << "  variance " << s.variance << "  mean/variance " << s.ratio << '\n';
        if (csv.is_open()) csv << "summary," << name << ",0," << s.ratio << ",\n";
    }

    const Stationary sc = make_stationary(css, opt.lag);
    const Stationary se = make_stationary(ess, opt.lag);
    for (const auto& [name, st] : {std::pair{"CSS", &sc}, std::pair{"ESS", &se}}) {
        for (std::size_t k = 0; k < st->tests.size(); ++k) {
            const auto& t = st->tests[k];
            out << "ADF " << name << " (difference order " << k << "): t = " << t.t_stat << ", rejected at "
                << analysis::to_string(t.rejected) << '\n';
            if (csv.is_open()) csv << "adf," << name << ',' << k << ',' << t.t_stat << ',' << analysis::to_string(t.rejected) << '\n';
        }
    }
    // Align both series at the larger differencing order.
    const std::size_t order = std::max(sc.order, se.order);
    const auto x_css = order == 0 ? css : analysis::difference(css, order);
    const auto x_ess = order == 0 ? ess : analysis::difference(ess, order);
    const auto g1 = analysis::granger_f(x_ess, x_css, opt.lag);
    const auto g2 = analysis::granger_f(x_css, x_ess, opt.lag);
    out << "Granger ESS -> CSS: F = " << g1.f << " (n_eff " << g1.n_eff << ", order " << order << ")\n";
    out << "Granger CSS -> ESS: F = " << g2.f << " (n_eff " << g2.n_eff << ", order " << order << ")\n";
    if (csv.is_open()) {
        csv << "granger,ESS->CSS," << order << ',' << g1.f << ",\n";
        csv << "granger,CSS->ESS," << order << ',' << g2.f << ",\n";
    }
    return 0;
}

int cmd_oracle(const OracleOptions& opt, std::ostream& out) {
    if (opt.trials == 0) throw ConfigError("--trials must be positive");
    if (!(opt.alpha >= 0.0)) throw ConfigError("--alpha must be >= 0");
    const auto rep = oracle::shaping_consistency_check(opt.seed, opt.alpha, opt.trials, opt.max_states, opt.max_horizon);
    oracle::write_report(out, rep);
    return 0;
}

int cmd_synth(const SynthOptions& opt, std::ostream& out) {
    if (opt.out_dir.empty()) throw ConfigError("--out is required");
    kg::PlantedRuleConfig pc;
    pc.hops = opt.hops;
    pc.entities_per_layer = opt.entities_per_layer;
    pc.noise_relations = opt.noise_relations;
    pc.noise_edges_per_entity = opt.noise_edges;
    pc.train_fraction = opt.train_fraction;
    pc.valid_fraction = opt.valid_fraction;
    pc.seed = opt.seed;
    const kg::Dataset d = kg::make_planted_rule(pc);
    kg::save_dataset(opt.out_dir, d);
    out << "wrote " << d.entities.size() << " entities, " << d.relations.size() << " relations, " << d.facts.size()
        << " facts, " << d.train.size() << '/' << d.valid.size() << '/' << d.test.size()
        << " train/valid/test queries to " << opt.out_dir << '\n';
    return 0;
}

}  // namespace duokg::cli
