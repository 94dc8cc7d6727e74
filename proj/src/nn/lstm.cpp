#include <cmath>

#include "duokg/nn/lstm.hpp"
#include "duokg/nn/ops.hpp"

namespace duokg::nn {

namespace {

double sig(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

std::string layer_name(const std::string& prefix, std::size_t k, const char* what) {
    return prefix + ".l" + std::to_string(k) + "." + what;
}

void check_shape(const ParamStore& store, ParamId id, Shape want) {
    if (store.shape(id) != want) {
        throw ShapeError(store.name(id) + ": expected " + want.str() + ", found " + store.shape(id).str());
    }
}

}  // namespace

LstmStack LstmStack::create(ParamStore& store, const std::string& prefix, std::size_t input_size,
                            std::size_t hidden_size, std::size_t num_layers) {
    LstmStack s;
    s.input_size = input_size;
    s.hidden_size = hidden_size;
    const std::size_t h = hidden_size;
    for (std::size_t k = 0; k < num_layers; ++k) {
        const std::size_t in = k == 0 ? input_size : h;
        LstmLayerParams p;
        p.w_ih = store.add_uniform(layer_name(prefix, k, "w_ih"), Shape{4 * h, in});
        p.w_hh = store.add_uniform(layer_name(prefix, k, "w_hh"), Shape{4 * h, h});
        Tensor b(Shape{4 * h, 1});
        for (std::size_t i = h; i < 2 * h; ++i) b.values[i] = 1.0;
        p.bias = store.add_tensor(layer_name(prefix, k, "b"), std::move(b));
        s.layers.push_back(p);
    }
    return s;
}

LstmStack LstmStack::bind(const ParamStore& store, const std::string& prefix, std::size_t input_size,
                          std::size_t hidden_size, std::size_t num_layers) {
    LstmStack s;
    s.input_size = input_size;
    s.hidden_size = hidden_size;
    const std::size_t h = hidden_size;
    for (std::size_t k = 0; k < num_layers; ++k) {
        const std::size_t in = k == 0 ? input_size : h;
        LstmLayerParams p{store.id(layer_name(prefix, k, "w_ih")), store.id(layer_name(prefix, k, "w_hh")),
                          store.id(layer_name(prefix, k, "b"))};
        check_shape(store, p.w_ih, Shape{4 * h, in});
        check_shape(store, p.w_hh, Shape{4 * h, h});
        check_shape(store, p.bias, Shape{4 * h, 1});
        s.layers.push_back(p);
    }
    return s;
}

LstmState zero_state(Tape& t, const LstmStack& stack) {
    LstmState s;
    for (std::size_t k = 0; k < stack.layers.size(); ++k) {
        s.layers.push_back({t.zeros(stack.hidden_size), t.zeros(stack.hidden_size)});
    }
    return s;
}

LstmLayerState lstm_cell(Tape& t, const LstmLayerParams& p, Var input, Var hidden, Var cell) {
    const Var w_ih = t.param(p.w_ih);
    const Var w_hh = t.param(p.w_hh);
    const Var bias = t.param(p.bias);
    const Shape ws = t.shape(w_ih);
    const std::size_t H = ws.rows / 4;
    const std::size_t in = ws.cols;
    if (t.shape(input) != Shape{in, 1} || t.shape(hidden) != Shape{H, 1} || t.shape(cell) != Shape{H, 1}) {
        throw ShapeError("lstm_cell: input " + t.shape(input).str() + ", hidden " + t.shape(hidden).str() +
                         ", cell " + t.shape(cell).str() + " against weights " + ws.str());
    }
    const auto Wi = t.value(w_ih);
    const auto Wh = t.value(w_hh);
    const auto B = t.value(bias);
    const auto X = t.value(input);
    const auto Hp = t.value(hidden);
    const auto Cp = t.value(cell);

    // gates holds activated i, f, g, o
    std::vector<double> gates(4 * H);
    for (std::size_t r = 0; r < 4 * H; ++r) {
        double z = B[r];
        const double* wi = Wi.data() + r * in;
        for (std::size_t j = 0; j < in; ++j) z += wi[j] * X[j];
        const double* wh = Wh.data() + r * H;
        for (std::size_t j = 0; j < H; ++j) z += wh[j] * Hp[j];
        gates[r] = (r >= 2 * H && r < 3 * H) ? std::tanh(z) : sig(z);
    }
    std::vector<double> out(2 * H);  // [h; c]
    for (std::size_t k = 0; k < H; ++k) {
        const double c = gates[H + k] * Cp[k] + gates[k] * gates[2 * H + k];
        out[H + k] = c;
        out[k] = gates[3 * H + k] * std::tanh(c);
    }
    const bool needs = t.requires_grad(w_ih) || t.requires_grad(w_hh) || t.requires_grad(bias) ||
                       t.requires_grad(input) || t.requires_grad(hidden) || t.requires_grad(cell);
    const Var joint = t.emit(
        "lstm_cell", Shape{2 * H, 1}, std::move(out), needs,
        [=, gates = std::move(gates)](Tape& t, Var o) {
            const auto g = t.grad(o);
            const auto Y = t.value(o);
            const auto X = t.value(input);
            const auto Hp = t.value(hidden);
            const auto Cp = t.value(cell);
            std::vector<double> dz(4 * H);
            std::vector<double> dc_prev(H);
            for (std::size_t k = 0; k < H; ++k) {
                const double i = gates[k], f = gates[H + k], gg = gates[2 * H + k], og = gates[3 * H + k];
                const double tc = std::tanh(Y[H + k]);
                const double dh = g[k];
                const double dc = g[H + k] + dh * og * (1.0 - tc * tc);
                dz[k] = dc * gg * i * (1.0 - i);
                dz[H + k] = dc * Cp[k] * f * (1.0 - f);
                dz[2 * H + k] = dc * i * (1.0 - gg * gg);
                dz[3 * H + k] = dh * tc * og * (1.0 - og);
                dc_prev[k] = dc * f;
            }
            if (t.requires_grad(bias)) {
                auto gb = t.grad(bias);
                for (std::size_t r = 0; r < 4 * H; ++r) gb[r] += dz[r];
            }
            if (t.requires_grad(w_ih)) {
                auto gw = t.grad(w_ih);
                for (std::size_t r = 0; r < 4 * H; ++r)
                    for (std::size_t j = 0; j < in; ++j) gw[r * in + j] += dz[r] * X[j];
            }
            if (t.requires_grad(w_hh)) {
                auto gw = t.grad(w_hh);
                for (std::size_t r = 0; r < 4 * H; ++r)
                    for (std::size_t j = 0; j < H; ++j) gw[r * H + j] += dz[r] * Hp[j];
            }
            if (t.requires_grad(input)) {
                auto gx = t.grad(input);
                const auto Wi = t.value(w_ih);
                for (std::size_t r = 0; r < 4 * H; ++r)
                    for (std::size_t j = 0; j < in; ++j) gx[j] += Wi[r * in + j] * dz[r];
            }
            if (t.requires_grad(hidden)) {
                auto gh = t.grad(hidden);
                const auto Wh = t.value(w_hh);
                for (std::size_t r = 0; r < 4 * H; ++r)
                    for (std::size_t j = 0; j < H; ++j) gh[j] += Wh[r * H + j] * dz[r];
            }
            if (t.requires_grad(cell)) {
                auto gc = t.grad(cell);
                for (std::size_t k = 0; k < H; ++k) gc[k] += dc_prev[k];
            }
        });
    return {slice(t, joint, 0, H), slice(t, joint, H, H)};
}

LstmState lstm_stack_step(Tape& t, const LstmStack& stack, const LstmState& state, Var input,
                          Var layer1_hidden) {
    if (state.layers.size() != stack.layers.size()) {
        throw ShapeError("lstm_stack_step: state has " + std::to_string(state.layers.size()) + " layers, stack has " +
                         std::to_string(stack.layers.size()));
    }
    if (t.shape(layer1_hidden) != Shape{stack.hidden_size, 1}) {
        throw ShapeError("lstm_stack_step: override " + t.shape(layer1_hidden).str() + " vs hidden " +
                         Shape{stack.hidden_size, 1}.str());
    }
    LstmState next;
    Var x = input;
    for (std::size_t k = 0; k < stack.layers.size(); ++k) {
        const Var h_prev = k == 0 ? layer1_hidden : state.layers[k].hidden;
        next.layers.push_back(lstm_cell(t, stack.layers[k], x, h_prev, state.layers[k].cell));
        x = next.layers.back().hidden;
    }
    return next;
}

}  // namespace duokg::nn
