#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "duokg/log.hpp"
#include "duokg/train.hpp"

namespace duokg::train {

namespace {

std::vector<nn::ParamId> trainable_params(const nn::ParamStore& store, bool guidance) {
    std::vector<nn::ParamId> out;
    for (std::uint32_t i = 0; i < store.count(); ++i) {
        const nn::ParamId id{i};
        if (!guidance && store.name(id).rfind("lambda.", 0) == 0) continue;
        out.push_back(id);
    }
    return out;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream s;
    s << std::setprecision(12) << v;
    return s.str();
}

}  // namespace

Trainer::Trainer(nn::ParamStore& store, const agents::PolicyModel& model, agents::Frozen frozen, TrainConfig config)
    : store_(store), model_(model), frozen_(frozen), config_(config),
      adam_(store, nn::AdamConfig{config.learning_rate, 0.9, 0.999, 1e-8}) {
    config_.validate();
    adam_.set_trainable(store, trainable_params(store, config_.guidance));
}

EpochMetrics Trainer::run_epoch(std::size_t epoch, std::span<const kg::QuerySample> queries) {
    if (queries.empty()) throw std::invalid_argument("train: no training queries");
    std::vector<std::size_t> order(queries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle = Rng::stream(config_.seed, {epoch, 0x73687566ULL});
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[shuffle.below(i + 1)]);

    EpochMetrics m;
    m.epoch = epoch;
    std::size_t seen = 0;
    last_rollouts_.clear();
    const agents::Policy pol = policy();
    for (std::size_t lo = 0; lo < order.size(); lo += config_.batch_size) {
        const std::size_t hi = std::min(order.size(), lo + config_.batch_size);
        std::vector<kg::QuerySample> batch;
        for (std::size_t i = lo; i < hi; ++i) batch.push_back(queries[order[i]]);
        auto rollouts = collect_rollouts(pol, batch, config_, epoch, lo, config_.rollouts_train);

        const ObjectiveTotals o = summarize_objectives(rollouts, config_);
        const double w = static_cast<double>(rollouts.size());
        m.j_giant += o.j_giant * w;
        m.j_dwarf += o.j_dwarf * w;
        m.j_lambda += o.j_lambda * w;
        m.mean_lambda += o.mean_lambda * w;
        for (const auto& r : rollouts) {
            m.css += r.phi_end;
            m.ess += env::entity_similarity(*frozen_.table, r.final_entity, r.answers);
        }
        seen += rollouts.size();

        const GradientResult g = policy_gradient(pol, rollouts, config_);
        adam_.step(store_, g.grads);
        last_rollouts_.insert(last_rollouts_.end(), std::make_move_iterator(rollouts.begin()),
                              std::make_move_iterator(rollouts.end()));
    }
    const double n = static_cast<double>(seen);
    m.j_giant /= n;
    m.j_dwarf /= n;
    m.j_lambda /= n;
    m.mean_lambda /= n;
    m.css /= n;
    m.ess /= n;
    m.hits1_valid = std::numeric_limits<double>::quiet_NaN();
    return m;
}

std::vector<EpochMetrics> Trainer::run(std::span<const kg::QuerySample> queries, const ValidationHook& validate,
                                       const EpochHook& on_epoch) {
    std::vector<EpochMetrics> rows;
    for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
        EpochMetrics m = run_epoch(epoch, queries);
        if (validate) m.hits1_valid = validate(store_);
        log::info("epoch " + std::to_string(epoch) + ": J_dwarf=" + fmt(m.j_dwarf) + " J_giant=" + fmt(m.j_giant) +
                  " mean_lambda=" + fmt(m.mean_lambda) + " CSS=" + fmt(m.css) + " ESS=" + fmt(m.ess));
        if (on_epoch) on_epoch(m, last_rollouts_);
        rows.push_back(m);
    }
    return rows;
}

void write_metrics_csv(std::ostream& out, const TrainConfig& config, std::span<const EpochMetrics> rows) {
    out << "# alpha=" << fmt(config.alpha) << '\n';
    out << "# delta=" << fmt(config.delta) << '\n';
    out << "# epsilon=" << fmt(config.epsilon) << '\n';
    out << "# guidance=" << (config.guidance ? "on" : "off") << '\n';
    out << "epoch,J_giant,J_dwarf,J_lambda,CSS,ESS,mean_lambda,hits1_valid\n";
    for (const auto& r : rows) {
        out << r.epoch << ',' << fmt(r.j_giant) << ',' << fmt(r.j_dwarf) << ',' << fmt(r.j_lambda) << ','
            << fmt(r.css) << ',' << fmt(r.ess) << ',' << fmt(r.mean_lambda) << ',' << fmt(r.hits1_valid) << '\n';
    }
}

std::vector<EpochMetrics> read_metrics_csv(std::istream& in) {
    std::vector<EpochMetrics> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line.rfind("epoch,", 0) != 0) throw ParseError("metrics: missing column header", line_no);
            header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 8) {
            throw ParseError("metrics line " + std::to_string(line_no) + ": expected 8 columns", line_no);
        }
        auto num = [&](const std::string& s) {
            if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
            try {
                std::size_t used = 0;
                const double v = std::stod(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                return v;
            } catch (const std::exception&) {
                throw ParseError("metrics line " + std::to_string(line_no) + ": bad number '" + s + "'", line_no);
            }
        };
        EpochMetrics m;
        m.epoch = static_cast<std::size_t>(num(cells[0]));
        m.j_giant = num(cells[1]);
        m.j_dwarf = num(cells[2]);
        m.j_lambda = num(cells[3]);
        m.css = num(cells[4]);
        m.ess = num(cells[5]);
        m.mean_lambda = num(cells[6]);
        m.hits1_valid = num(cells[7]);
        rows.push_back(m);
    }
    if (!header) throw ParseError("metrics: empty file", line_no);
    return rows;
}

}  // namespace duokg::train
