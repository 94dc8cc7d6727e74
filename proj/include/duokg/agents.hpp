#pragma once

#include <optional>
#include <vector>

#include "duokg/embed.hpp"
#include "duokg/kg.hpp"
#include "duokg/nn/lstm.hpp"
#include "duokg/nn/ops.hpp"

namespace duokg::agents {

using nn::ParamId;
using nn::Tape;
using nn::Var;

struct GiantParams {
    nn::LstmStack lstm;      // input 2d, hidden 2d
    ParamId mix;             // 2d x 4d, applied to [h_c; h_e]
    ParamId w1;              // 4d x 4d
    ParamId w2;              // 4d x 4d
    ParamId cluster_learned; // N x d, trainable half of the cluster embeddings
};

struct DwarfParams {
    nn::LstmStack lstm;  // input 2d, hidden 2d
    ParamId mix;         // 2d x 5d, applied to [h_e; atn; h_c]
    ParamId att_w;       // d x d
    ParamId att_a;       // 2d
    ParamId w1;          // 6d x 6d
    ParamId w2;          // 6d x 6d
    ParamId relations;   // |R| x d, fine-tuned from the pre-trained table
};

struct LambdaParams {
    ParamId w1;  // 2d x 4d
    ParamId b1;  // 2d
    ParamId w2;  // 1 x 2d
    ParamId b2;  // 1
};

struct ModelShape {
    std::size_t dim = 0;
    std::size_t num_relations = 0;
    std::size_t num_clusters = 0;
};

/// Every learnable weight of both agents and the lambda network.
struct PolicyModel {
    ModelShape shape;
    GiantParams giant;
    DwarfParams dwarf;
    LambdaParams lambda;

    /// Declares "giant.*", "dwarf.*" and "lambda.*" in the store. Relation rows
    /// and learned cluster halves start from the pre-trained values.
    static PolicyModel create(nn::ParamStore& store, const embed::EmbeddingTable& table,
                              const embed::ClusterModel& clusters);
    /// Looks parameters up by name; throws ShapeError on any shape mismatch.
    static PolicyModel bind(const nn::ParamStore& store, ModelShape shape);
};

/// Read-only inputs shared by every walk.
struct Frozen {
    const kg::KnowledgeGraph* graph = nullptr;
    const embed::EmbeddingTable* table = nullptr;
    const embed::ClusterModel* clusters = nullptr;
};

/// A model bound to its parameter values and the frozen graph inputs.
struct Policy {
    const PolicyModel* model = nullptr;
    const nn::ParamStore* params = nullptr;
    Frozen frozen;
};

struct StepResult {
    Var log_probs;        // one entry per candidate
    nn::LstmState state;  // new recurrent state; state.top() is the new hidden
};

/// Recurrent update of GIANT: layer-1 hidden is mix [h_c; h_e], input is the
/// previous cluster action embedding.
nn::LstmState giant_encode(Tape& t, const PolicyModel& m, const nn::LstmState& prev, Var prev_action, Var h_c_prev,
                           Var h_e_prev);
/// Log-distribution over candidate clusters; `candidates` is k x 2d.
Var giant_head(Tape& t, const PolicyModel& m, Var cluster_emb, Var h_c, Var candidates);
StepResult giant_step(Tape& t, const PolicyModel& m, const nn::LstmState& prev, Var prev_action, Var h_c_prev,
                      Var h_e_prev, Var cluster_emb, Var candidates);

/// Attention summary of the neighbourhood of `entity` over frozen entity vectors.
Var dwarf_attention(Tape& t, const PolicyModel& m, const Frozen& f, EntityId entity);

/// Recurrent update of DWARF: layer-1 hidden is mix [h_e; atn_prev; h_c].
nn::LstmState dwarf_encode(Tape& t, const PolicyModel& m, const nn::LstmState& prev, Var prev_action, Var h_e_prev,
                           Var atn_prev, Var h_c_prev);

struct DwarfInputs {
    Var entity;         // e_t, d
    Var last_relation;  // d
    Var query;          // r_q, d
    Var attention;      // atn_t, d
};

/// Log-distribution over candidate actions; `candidates` is k x 2d rows [r'; e'].
Var dwarf_head(Tape& t, const PolicyModel& m, const DwarfInputs& in, Var h_e, Var candidates);
StepResult dwarf_step(Tape& t, const PolicyModel& m, const nn::LstmState& prev, Var prev_action, Var h_e_prev,
                      Var atn_prev, Var h_c_prev, const DwarfInputs& in, Var candidates);

/// sigmoid(w2 relu(w1 x + b1) + b2) for features [e_t; r_q; h_e] (4d).
Var lambda_value(Tape& t, const PolicyModel& m, Var features);

/// Joint state of one synchronized GIANT/DWARF walk.
struct WalkState {
    EntityId entity;
    ClusterId cluster;
    RelationId last_relation;
    std::size_t step = 0;
    nn::LstmState dwarf_lstm;
    nn::LstmState giant_lstm;
    Var h_e, h_c, atn_prev, a_e_prev, a_c_prev;
};

/// Result of the recurrent update at a state.
struct Encoded {
    nn::LstmState dwarf_lstm;
    nn::LstmState giant_lstm;
    Var atn;
    Var h_e() const { return dwarf_lstm.top(); }
    Var h_c() const { return giant_lstm.top(); }
};

struct Decision {
    std::vector<ClusterId> clusters;
    std::vector<kg::Edge> actions;
    Var giant_log_probs;
    Var dwarf_log_probs;
};

/// Builds the per-step computation for one query on one tape.
class Walker {
public:
    Walker(Tape& t, const PolicyModel& m, const Frozen& f, RelationId query);

    WalkState start(EntityId source);
    Encoded encode(const WalkState& s);
    /// Action lists and both distributions. Edges listed in `masked` (relation,
    /// target pairs leaving `masked_source`) are removed from the entity actions.
    Decision decide(const WalkState& s, const Encoded& enc, std::optional<EntityId> masked_source = std::nullopt,
                    std::span<const kg::Edge> masked = {});
    Var giant_log_probs(const WalkState& s, const Encoded& enc, const std::vector<ClusterId>& clusters);
    WalkState advance(const WalkState& s, const Encoded& enc, ClusterId next_cluster, kg::Edge action);
    /// lambda at a state, with detached features.
    Var lambda(const WalkState& s, const Encoded& enc);

    Var entity_vector(EntityId e);
    Var relation_vector(RelationId r);
    Var cluster_embedding(ClusterId c);
    Var cluster_rows(std::span<const ClusterId> ids);
    Var action_rows(std::span<const kg::Edge> edges);

    Tape& tape() { return t_; }
    RelationId query() const { return query_; }

private:
    Tape& t_;
    const PolicyModel& m_;
    Frozen f_;
    RelationId query_;
    Var query_vec_;
};

}  // namespace duokg::agents
