#pragma once

#include <initializer_list>
#include <span>

#include "duokg/nn/tape.hpp"

namespace duokg::nn {

// Matrix products. Vectors are n x 1.
Var linear(Tape& t, Var w, Var x);          // W x
Var linear(Tape& t, Var w, Var x, Var b);   // W x + b
Var matmul_nt(Tape& t, Var a, Var b);       // A B^T : (k x m)(n x m)^T -> k x n
Var matvec_t(Tape& t, Var m, Var v);        // M^T v : (k x n)^T k -> n

// Elementwise.
Var add(Tape& t, Var a, Var b);
Var sub(Tape& t, Var a, Var b);
Var mul(Tape& t, Var a, Var b);
Var scale(Tape& t, Var a, double c);
Var add_scalar(Tape& t, Var a, Var s);      // a + s * 1, s is 1 x 1
Var relu(Tape& t, Var a);
Var leaky_relu(Tape& t, Var a, double slope);
Var sigmoid(Tape& t, Var a);
Var tanh(Tape& t, Var a);

// Structural.
Var concat(Tape& t, std::span<const Var> parts);     // stack column vectors
Var concat(Tape& t, std::initializer_list<Var> parts);
Var hconcat(Tape& t, std::span<const Var> parts);    // side by side, equal rows
Var hconcat(Tape& t, std::initializer_list<Var> parts);
Var slice(Tape& t, Var v, std::size_t offset, std::size_t length);
Var gather_rows(Tape& t, Var m, std::span<const std::uint32_t> rows);  // k x cols
Var row(Tape& t, Var m, std::size_t r);                               // cols x 1
/// Value copy that blocks gradient flow.
Var detach(Tape& t, Var a);

// Reductions and normalizers.
Var softmax(Tape& t, Var a);
Var log_softmax(Tape& t, Var a);
Var pick(Tape& t, Var v, std::size_t index);
Var dot(Tape& t, Var a, Var b);
Var sum(Tape& t, Var a);
Var cosine_similarity(Tape& t, Var a, Var b);
/// -(1-y) ln(1-p) - y ln(p) for a probability p in (0,1).
Var bernoulli_cross_entropy(Tape& t, Var p, double y);
/// -sum p log p from log-probabilities.
Var entropy_from_log_probs(Tape& t, Var log_probs);

// Plain-value helpers shared with non-differentiable code.
std::vector<double> softmax_values(std::span<const double> logits);
double cosine_values(std::span<const double> a, std::span<const double> b);

}  // namespace duokg::nn
