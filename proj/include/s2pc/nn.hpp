#pragma once

#include <array>
#include <string>
#include <vector>

#include "json.hpp"
#include "s2pc/linear.hpp"
#include "s2pc/session.hpp"

namespace s2pc {

using Shape = std::array<size_t, 3>;  // channels, height, width

size_t volume(const Shape& s);

enum class LayerKind { Conv2D, FC, BatchNorm, Relu, Maxpool, Avgpool, Argmax };

const char* kind_name(LayerKind k);

// Weights are signed fixed-point integers at the model scale s. A linear layer
// computes rdiv(W*x, 2^s) + bias. A batch norm computes rdiv(scale*x, 2^s) +
// shift, except directly after a linear layer, where it acts on the
// accumulator: rdiv(scale*(W*x + bias*2^s) + shift*2^2s, 2^2s).
struct Layer {
  LayerKind kind = LayerKind::Relu;
  size_t filters = 0, kh = 0, kw = 0, stride = 1, pad = 0;  // conv
  size_t out = 0;                                           // fc
  size_t window = 0;                                        // pools
  std::vector<i64> weights, bias;                           // conv, fc
  std::vector<i64> scale, shift;                            // batch norm
};

struct ModelGraph {
  unsigned bitwidth = 32;
  unsigned scale = 0;
  Shape input{1, 1, 1};
  std::vector<Layer> layers;
  Modulus ring() const { return Modulus::pow2(bitwidth); }
  // Output shape after each layer; throws ArgumentError on inconsistency.
  std::vector<Shape> shapes() const;
};

ModelGraph load_model(const nlohmann::json& doc);
ModelGraph load_model_file(const std::string& path);
nlohmann::json model_to_json(const ModelGraph& g);

// Reference forward pass over the ring, layer by layer.
std::vector<u64> cleartext_infer(const ModelGraph& g, const std::vector<u64>& input);

enum class StepOp { Linear, AddPublic, MulPublic, Truncate, Relu, Maxpool, Avgpool, Argmax };

const char* op_name(StepOp op);

struct Step {
  StepOp op = StepOp::Relu;
  Shape in{}, out{};
  bool fc = false;
  ConvShape conv;              // Linear, conv form
  std::vector<u64> values;     // Linear weights; per-element addend or multiplier
  unsigned shift = 0;          // Truncate
  bool known_nonnegative = false;
  size_t window = 0, stride = 0;  // pools
  std::string label;           // originating layer
};

// Flat sequence of protocol steps; the value vectors are known to party 0 only.
struct Program {
  unsigned bitwidth = 32;
  unsigned scale = 0;
  Shape input{}, output{};
  std::vector<Step> steps;
  Modulus ring() const { return Modulus::pow2(bitwidth); }
  Program without_values() const;
};

// Folds batch norms into the preceding linear layer where possible.
Program lower(const ModelGraph& g);

// Moves each truncation that reaches a ReLU through public additions only to
// after the ReLU, pre-scaling the additions, and marks it non-negative.
Program rewrite_truncation(const Program& p);

std::vector<u64> run_cleartext(const Program& p, const std::vector<u64>& input);

struct StepMeter {
  std::string label;
  StepOp op;
  Meter meter;
};

struct InferenceResult {
  std::vector<u64> output;  // party 1 only
  std::vector<StepMeter> steps;
  Meter total;
};

// Party 0 holds the program values, party 1 the input. Party 1 receives the
// reconstructed output; meters include input sharing and output delivery.
InferenceResult secure_infer(Session& s, const Program& p, const std::vector<u64>& input);

struct RandomModelOptions {
  std::vector<unsigned> bitwidths{16, 32, 37};
  unsigned max_scale = 12;
  size_t min_layers = 2, max_layers = 4;
};

// Small random CNN whose activations stay well inside the signed range.
ModelGraph random_model(Prg& g, const RandomModelOptions& opt = {});
std::vector<u64> random_input(Prg& g, const ModelGraph& m);

// Signed fixed-point integers to and from ring elements.
std::vector<u64> encode_tensor(const Modulus& ring, const std::vector<i64>& v);
std::vector<i64> decode_tensor(const Modulus& ring, const std::vector<u64>& v);

}  // namespace s2pc
