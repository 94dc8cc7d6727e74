#pragma once

#include <string>
#include <vector>

#include "duokg/nn/tape.hpp"

namespace duokg::nn {

/// Gate order inside the stacked weight rows: input, forget, candidate, output.
struct LstmLayerParams {
    ParamId w_ih;  // 4H x in
    ParamId w_hh;  // 4H x H
    ParamId bias;  // 4H
};

struct LstmStack {
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
    std::vector<LstmLayerParams> layers;

    /// Registers "<prefix>.l{k}.{w_ih,w_hh,b}" with uniform init and forget bias 1.
    static LstmStack create(ParamStore& store, const std::string& prefix, std::size_t input_size,
                            std::size_t hidden_size, std::size_t num_layers = 3);
    /// Looks the parameters up by name and checks their shapes.
    static LstmStack bind(const ParamStore& store, const std::string& prefix, std::size_t input_size,
                          std::size_t hidden_size, std::size_t num_layers = 3);
};

struct LstmLayerState {
    Var hidden;
    Var cell;
};

struct LstmState {
    std::vector<LstmLayerState> layers;
    Var top() const { return layers.back().hidden; }
};

LstmState zero_state(Tape& t, const LstmStack& stack);

/// One conventional LSTM cell update; returns (hidden, cell).
LstmLayerState lstm_cell(Tape& t, const LstmLayerParams& p, Var input, Var hidden, Var cell);

/// Advances every layer once. `layer1_hidden` replaces the first layer's previous
/// hidden (its cell is untouched); upper layers read the new hidden below them.
LstmState lstm_stack_step(Tape& t, const LstmStack& stack, const LstmState& state, Var input,
                          Var layer1_hidden);

}  // namespace duokg::nn
