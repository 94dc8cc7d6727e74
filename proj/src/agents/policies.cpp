#include "duokg/agents.hpp"

namespace duokg::agents {

namespace {

constexpr double kLeakySlope = 0.2;

void expect_rows(Tape& t, Var candidates, std::size_t cols, const char* who) {
    const auto s = t.shape(candidates);
    if (s.rows == 0) throw ShapeError(std::string(who) + ": no candidates");
    if (s.cols != cols) {
        throw ShapeError(std::string(who) + ": candidate rows " + s.str() + " need " + std::to_string(cols) +
                         " columns");
    }
}

}  // namespace

nn::LstmState giant_encode(Tape& t, const PolicyModel& m, const nn::LstmState& prev, Var prev_action, Var h_c_prev,
                           Var h_e_prev) {
    const Var mixed = nn::linear(t, t.param(m.giant.mix), nn::concat(t, {h_c_prev, nn::detach(t, h_e_prev)}));
    return nn::lstm_stack_step(t, m.giant.lstm, prev, prev_action, mixed);
}

Var giant_head(Tape& t, const PolicyModel& m, Var cluster_emb, Var h_c, Var candidates) {
    expect_rows(t, candidates, 2 * m.shape.dim, "giant_step");
    const Var hidden = nn::relu(t, nn::linear(t, t.param(m.giant.w1), nn::concat(t, {cluster_emb, h_c})));
    const Var score = nn::linear(t, t.param(m.giant.w2), hidden);
    const Var tiled = nn::hconcat(t, {candidates, candidates});
    return nn::log_softmax(t, nn::linear(t, tiled, score));
}

StepResult giant_step(Tape& t, const PolicyModel& m, const nn::LstmState& prev, Var prev_action, Var h_c_prev,
                      Var h_e_prev, Var cluster_emb, Var candidates) {
    StepResult r;
    r.state = giant_encode(t, m, prev, prev_action, h_c_prev, h_e_prev);
    r.log_probs = giant_head(t, m, cluster_emb, r.state.top(), candidates);
    return r;
}

Var dwarf_attention(Tape& t, const PolicyModel& m, const Frozen& f, EntityId entity) {
    const std::size_t d = m.shape.dim;
    const auto neighbors = f.graph->neighbors(entity);
    std::vector<double> rows;
    rows.reserve(neighbors.size() * d);
    for (EntityId n : neighbors) {
        const auto v = f.table->entity(n);
        rows.insert(rows.end(), v.begin(), v.end());
    }
    const Var e_n = t.constant(nn::Shape{neighbors.size(), d}, std::move(rows));
    const Var e_i = t.constant(f.table->entity(entity));
    const Var w = t.param(m.dwarf.att_w);
    const Var a = t.param(m.dwarf.att_a);
    const Var z = nn::matmul_nt(t, e_n, w);  // row j is W e_j
    const Var self = nn::dot(t, nn::slice(t, a, 0, d), nn::linear(t, w, e_i));
    const Var scores = nn::add_scalar(t, nn::linear(t, z, nn::slice(t, a, d, d)), self);
    const Var alpha = nn::softmax(t, nn::leaky_relu(t, scores, kLeakySlope));
    return nn::matvec_t(t, z, alpha);
}

nn::LstmState dwarf_encode(Tape& t, const PolicyModel& m, const nn::LstmState& prev, Var prev_action, Var h_e_prev,
                           Var atn_prev, Var h_c_prev) {
    const Var mixed =
        nn::linear(t, t.param(m.dwarf.mix), nn::concat(t, {h_e_prev, atn_prev, nn::detach(t, h_c_prev)}));
    return nn::lstm_stack_step(t, m.dwarf.lstm, prev, prev_action, mixed);
}

Var dwarf_head(Tape& t, const PolicyModel& m, const DwarfInputs& in, Var h_e, Var candidates) {
    expect_rows(t, candidates, 2 * m.shape.dim, "dwarf_step");
    const Var x = nn::concat(t, {in.entity, in.last_relation, in.query, in.attention, h_e});
    const Var hidden = nn::relu(t, nn::linear(t, t.param(m.dwarf.w1), x));
    const Var score = nn::linear(t, t.param(m.dwarf.w2), hidden);
    const Var tiled = nn::hconcat(t, {candidates, candidates, candidates});
    return nn::log_softmax(t, nn::linear(t, tiled, score));
}

StepResult dwarf_step(Tape& t, const PolicyModel& m, const nn::LstmState& prev, Var prev_action, Var h_e_prev,
                      Var atn_prev, Var h_c_prev, const DwarfInputs& in, Var candidates) {
    StepResult r;
    r.state = dwarf_encode(t, m, prev, prev_action, h_e_prev, atn_prev, h_c_prev);
    r.log_probs = dwarf_head(t, m, in, r.state.top(), candidates);
    return r;
}

Var lambda_value(Tape& t, const PolicyModel& m, Var features) {
    const Var h = nn::relu(t, nn::linear(t, t.param(m.lambda.w1), features, t.param(m.lambda.b1)));
    return nn::sigmoid(t, nn::linear(t, t.param(m.lambda.w2), h, t.param(m.lambda.b2)));
}

}  // namespace duokg::agents
