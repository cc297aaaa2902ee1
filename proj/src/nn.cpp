#include "s2pc/nn.hpp"

#include <cmath>
#include <fstream>

#include "s2pc/nonlinear.hpp"
#include "s2pc/truncdiv.hpp"

namespace s2pc {

using nlohmann::json;

size_t volume(const Shape& s) { return s[0] * s[1] * s[2]; }

const char* kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::Conv2D: return "conv2d";
    case LayerKind::FC: return "fc";
    case LayerKind::BatchNorm: return "batchnorm";
    case LayerKind::Relu: return "relu";
    case LayerKind::Maxpool: return "maxpool";
    case LayerKind::Avgpool: return "avgpool";
    case LayerKind::Argmax: return "argmax";
  }
  return "?";
}

const char* op_name(StepOp op) {
  switch (op) {
    case StepOp::Linear: return "linear";
    case StepOp::AddPublic: return "add";
    case StepOp::MulPublic: return "mul";
    case StepOp::Truncate: return "truncate";
    case StepOp::Relu: return "relu";
    case StepOp::Maxpool: return "maxpool";
    case StepOp::Avgpool: return "avgpool";
    case StepOp::Argmax: return "argmax";
  }
  return "?";
}

namespace {

bool is_linear(LayerKind k) { return k == LayerKind::Conv2D || k == LayerKind::FC; }

ConvShape conv_shape(const Layer& l, const Shape& in) {
  ConvShape c;
  c.channels = in[0], c.height = in[1], c.width = in[2];
  c.filters = l.filters, c.kh = l.kh, c.kw = l.kw, c.stride = l.stride, c.pad = l.pad;
  return c;
}

size_t pool_out(size_t n, size_t window, size_t stride) {
  if (window == 0 || stride == 0 || window > n) throw ArgumentError("pool window does not fit the input");
  return (n - window) / stride + 1;
}

// Element indices of each pooling window, laid out [channel][y][x][window element].
std::vector<size_t> pool_gather(const Shape& in, size_t window, size_t stride) {
  size_t oh = pool_out(in[1], window, stride), ow = pool_out(in[2], window, stride);
  std::vector<size_t> idx;
  idx.reserve(in[0] * oh * ow * window * window);
  for (size_t c = 0; c < in[0]; ++c)
    for (size_t y = 0; y < oh; ++y)
      for (size_t x = 0; x < ow; ++x)
        for (size_t i = 0; i < window; ++i)
          for (size_t j = 0; j < window; ++j) idx.push_back((c * in[1] + y * stride + i) * in[2] + x * stride + j);
  return idx;
}

std::vector<u64> gather(const std::vector<u64>& x, const std::vector<size_t>& idx) {
  std::vector<u64> out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out[i] = x[idx[i]];
  return out;
}

u64 pow2_in(const Modulus& ring, unsigned k) { return ring.reduce(static_cast<i128>(1) << k); }

// Per-channel values repeated over the spatial extent of `shape`.
std::vector<u64> per_channel(const Modulus& ring, const Shape& shape, const std::vector<i128>& v) {
  std::vector<u64> out(volume(shape));
  size_t plane = shape[1] * shape[2];
  for (size_t i = 0; i < out.size(); ++i) out[i] = ring.reduce(v[i / plane]);
  return out;
}

// Signed-gt chain shared by the cleartext max and argmax.
std::pair<u64, size_t> chain_max(const Modulus& ring, const u64* a, size_t d) {
  u64 best = a[0];
  size_t at = 0;
  for (size_t i = 1; i < d; ++i)
    if (ring.to_signed(ring.sub(best, a[i])) < 0) best = a[i], at = i;
  return {best, at};
}

u64 clear_div(const Modulus& ring, u64 a, u64 d) { return d == 1 ? a : rdiv(ring, a, d); }

std::vector<u64> clear_linear(const Modulus& ring, const Step& st, const std::vector<u64>& x) {
  if (st.fc) {
    size_t M = volume(st.out), N = volume(st.in);
    std::vector<u64> y(M, 0);
    for (size_t m = 0; m < M; ++m)
      for (size_t n = 0; n < N; ++n) y[m] = ring.add(y[m], ring.mul(st.values[m * N + n], x[n]));
    return y;
  }
  auto cols = im2col(st.conv, x);
  size_t M = st.conv.filters, N = st.conv.channels * st.conv.kh * st.conv.kw, K = st.conv.out_h() * st.conv.out_w();
  std::vector<u64> y(M * K, 0);
  for (size_t m = 0; m < M; ++m)
    for (size_t n = 0; n < N; ++n) {
      u64 w = st.values[m * N + n];
      for (size_t k = 0; k < K; ++k) y[m * K + k] = ring.add(y[m * K + k], ring.mul(w, cols[n * K + k]));
    }
  return y;
}

i64 get_int(const json& j, const char* key, i64 def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number_integer()) throw ArgumentError(std::string("field '") + key + "' must be an integer");
  return j[key].get<i64>();
}

size_t get_size(const json& j, const char* key, i64 def) {
  i64 v = get_int(j, key, def);
  if (v < 0) throw ArgumentError(std::string("field '") + key + "' must be non-negative");
  return static_cast<size_t>(v);
}

std::vector<i64> get_ints(const json& j, const char* key, bool required) {
  if (!j.contains(key)) {
    if (required) throw ArgumentError(std::string("missing field '") + key + "'");
    return {};
  }
  if (!j[key].is_array()) throw ArgumentError(std::string("field '") + key + "' must be an array");
  std::vector<i64> v;
  for (auto& e : j[key]) {
    if (!e.is_number_integer()) throw ArgumentError(std::string("field '") + key + "' must hold integers");
    v.push_back(e.get<i64>());
  }
  return v;
}

void check_range(unsigned bits, const std::vector<i64>& v, const char* what) {
  if (bits >= 64) return;
  i64 lim = i64{1} << (bits - 1);
  for (i64 x : v)
    if (x < -lim || x >= lim) throw RangeError(std::string(what) + " value outside the ring");
}

}  // namespace

std::vector<Shape> ModelGraph::shapes() const {
  if (bitwidth < 2 || bitwidth > 64) throw ArgumentError("bitwidth must be 2..64");
  if (scale >= bitwidth) throw ArgumentError("scale must be below the bitwidth");
  if (volume(input) == 0) throw ArgumentError("input shape has a zero extent");
  std::vector<Shape> out;
  Shape cur = input;
  for (size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    if (i > 0 && layers[i - 1].kind == LayerKind::Argmax) throw ArgumentError("argmax must be the last layer");
    switch (l.kind) {
      case LayerKind::Conv2D: {
        auto c = conv_shape(l, cur);
        if (l.filters == 0 || l.kh == 0 || l.kw == 0) throw ArgumentError("conv2d needs filters and a kernel");
        cur = {l.filters, c.out_h(), c.out_w()};
        if (l.weights.size() != l.filters * c.channels * l.kh * l.kw) throw ArgumentError("conv2d weight count mismatch");
        if (!l.bias.empty() && l.bias.size() != l.filters) throw ArgumentError("conv2d bias count mismatch");
        break;
      }
      case LayerKind::FC:
        if (l.out == 0) throw ArgumentError("fc needs out > 0");
        if (l.weights.size() != l.out * volume(cur)) throw ArgumentError("fc weight count mismatch");
        if (!l.bias.empty() && l.bias.size() != l.out) throw ArgumentError("fc bias count mismatch");
        cur = {l.out, 1, 1};
        break;
      case LayerKind::BatchNorm:
        if (l.scale.size() != cur[0] || l.shift.size() != cur[0])
          throw ArgumentError("batchnorm needs one scale and shift per channel");
        if (i > 0 && is_linear(layers[i - 1].kind) && 2 * scale >= bitwidth)
          throw ArgumentError("batchnorm after a linear layer needs 2*scale < bitwidth");
        break;
      case LayerKind::Relu: break;
      case LayerKind::Maxpool:
      case LayerKind::Avgpool: {
        size_t stride = l.stride ? l.stride : l.window;
        cur = {cur[0], pool_out(cur[1], l.window, stride), pool_out(cur[2], l.window, stride)};
        if (l.kind == LayerKind::Avgpool && static_cast<u128>(l.window) * l.window >= (u128{1} << bitwidth))
          throw ArgumentError("avgpool window too large for the ring");
        break;
      }
      case LayerKind::Argmax: cur = {1, 1, 1}; break;
    }
    check_range(bitwidth, l.weights, "weight");
    check_range(bitwidth, l.bias, "bias");
    check_range(bitwidth, l.scale, "scale");
    check_range(bitwidth, l.shift, "shift");
    out.push_back(cur);
  }
  return out;
}

ModelGraph load_model(const json& doc) {
  if (!doc.is_object()) throw ArgumentError("model must be a JSON object");
  ModelGraph g;
  g.bitwidth = static_cast<unsigned>(get_size(doc, "bitwidth", 32));
  g.scale = static_cast<unsigned>(get_size(doc, "scale", 0));
  auto in = get_ints(doc, "input_shape", true);
  if (in.size() == 1) in = {in[0], 1, 1};
  if (in.size() != 3) throw ArgumentError("input_shape must have 1 or 3 entries");
  for (size_t i = 0; i < 3; ++i) {
    if (in[i] <= 0) throw ArgumentError("input_shape entries must be positive");
    g.input[i] = static_cast<size_t>(in[i]);
  }
  if (!doc.contains("layers") || !doc["layers"].is_array()) throw ArgumentError("missing layers array");
  for (auto& j : doc["layers"]) {
    if (!j.contains("kind") || !j["kind"].is_string()) throw ArgumentError("layer without kind");
    std::string k = j["kind"];
    Layer l;
    if (k == "conv2d") {
      l.kind = LayerKind::Conv2D;
      l.filters = get_size(j, "filters", 0);
      if (j.contains("kernel") && j["kernel"].is_array()) {
        auto ks = get_ints(j, "kernel", true);
        if (ks.size() != 2 || ks[0] <= 0 || ks[1] <= 0) throw ArgumentError("kernel must be [kh, kw]");
        l.kh = static_cast<size_t>(ks[0]), l.kw = static_cast<size_t>(ks[1]);
      } else {
        l.kh = l.kw = get_size(j, "kernel", 0);
      }
      l.stride = get_size(j, "stride", 1);
      l.pad = get_size(j, "pad", 0);
      l.weights = get_ints(j, "weights", true);
      l.bias = get_ints(j, "bias", false);
    } else if (k == "fc") {
      l.kind = LayerKind::FC;
      l.out = get_size(j, "out", 0);
      l.weights = get_ints(j, "weights", true);
      l.bias = get_ints(j, "bias", false);
    } else if (k == "batchnorm") {
      l.kind = LayerKind::BatchNorm;
      l.scale = get_ints(j, "scale", true);
      l.shift = get_ints(j, "shift", true);
    } else if (k == "relu") {
      l.kind = LayerKind::Relu;
    } else if (k == "maxpool" || k == "avgpool") {
      l.kind = k == "maxpool" ? LayerKind::Maxpool : LayerKind::Avgpool;
      l.window = get_size(j, "window", 0);
      l.stride = get_size(j, "stride", static_cast<i64>(l.window));
    } else if (k == "argmax") {
      l.kind = LayerKind::Argmax;
    } else {
      throw ArgumentError("unknown layer kind '" + k + "'");
    }
    g.layers.push_back(std::move(l));
  }
  g.shapes();
  return g;
}

ModelGraph load_model_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ArgumentError("cannot open model file " + path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("malformed model: ") + e.what());
  }
  return load_model(doc);
}

json model_to_json(const ModelGraph& g) {
  json doc;
  doc["bitwidth"] = g.bitwidth;
  doc["scale"] = g.scale;
  doc["input_shape"] = {g.input[0], g.input[1], g.input[2]};
  doc["layers"] = json::array();
  for (auto& l : g.layers) {
    json j;
    j["kind"] = kind_name(l.kind);
    switch (l.kind) {
      case LayerKind::Conv2D:
        j["filters"] = l.filters;
        j["kernel"] = {l.kh, l.kw};
        j["stride"] = l.stride;
        j["pad"] = l.pad;
        j["weights"] = l.weights;
        if (!l.bias.empty()) j["bias"] = l.bias;
        break;
      case LayerKind::FC:
        j["out"] = l.out;
        j["weights"] = l.weights;
        if (!l.bias.empty()) j["bias"] = l.bias;
        break;
      case LayerKind::BatchNorm:
        j["scale"] = l.scale;
        j["shift"] = l.shift;
        break;
      case LayerKind::Maxpool:
      case LayerKind::Avgpool:
        j["window"] = l.window;
        j["stride"] = l.stride ? l.stride : l.window;
        break;
      default: break;
    }
    doc["layers"].push_back(j);
  }
  return doc;
}

std::vector<u64> cleartext_infer(const ModelGraph& g, const std::vector<u64>& input) {
  auto shapes = g.shapes();
  auto ring = g.ring();
  unsigned s = g.scale;
  if (input.size() != volume(g.input)) throw ArgumentError("input does not match the model input shape");
  for (u64 v : input)
    if (!ring.contains(v)) throw RangeError("input value outside the ring");
  std::vector<u64> x = input;
  Shape cur = g.input;
  for (size_t i = 0; i < g.layers.size(); ++i) {
    const Layer& l = g.layers[i];
    Shape out = shapes[i];
    size_t plane = out[1] * out[2];
    switch (l.kind) {
      case LayerKind::Conv2D:
      case LayerKind::FC: {
        Step st;
        st.fc = l.kind == LayerKind::FC;
        st.in = cur, st.out = out;
        if (!st.fc) st.conv = conv_shape(l, cur);
        st.values = encode_tensor(ring, l.weights);
        auto acc = clear_linear(ring, st, x);
        auto bias = [&](size_t c) { return l.bias.empty() ? 0 : l.bias[c]; };
        bool bn = i + 1 < g.layers.size() && g.layers[i + 1].kind == LayerKind::BatchNorm;
        if (bn) {
          const Layer& b = g.layers[i + 1];
          for (size_t e = 0; e < acc.size(); ++e) {
            size_t c = e / plane;
            u64 v = ring.add(acc[e], ring.reduce(static_cast<i128>(bias(c)) << s));
            v = ring.mul(ring.reduce(b.scale[c]), v);
            v = ring.add(v, ring.reduce(static_cast<i128>(b.shift[c]) << (2 * s)));
            acc[e] = clear_div(ring, v, u64{1} << (2 * s));
          }
          ++i;
        } else {
          for (size_t e = 0; e < acc.size(); ++e)
            acc[e] = ring.add(clear_div(ring, acc[e], u64{1} << s), ring.reduce(bias(e / plane)));
        }
        x = std::move(acc);
        break;
      }
      case LayerKind::BatchNorm:
        for (size_t e = 0; e < x.size(); ++e) {
          size_t c = e / plane;
          x[e] = ring.add(clear_div(ring, ring.mul(ring.reduce(l.scale[c]), x[e]), u64{1} << s), ring.reduce(l.shift[c]));
        }
        break;
      case LayerKind::Relu:
        for (auto& v : x)
          if (ring.to_signed(v) < 0) v = 0;
        break;
      case LayerKind::Maxpool:
      case LayerKind::Avgpool: {
        size_t w = l.window, stride = l.stride ? l.stride : l.window, d = w * w;
        auto win = gather(x, pool_gather(cur, w, stride));
        std::vector<u64> y(win.size() / d);
        for (size_t k = 0; k < y.size(); ++k) {
          if (l.kind == LayerKind::Maxpool) {
            y[k] = chain_max(ring, &win[k * d], d).first;
          } else {
            u64 sum = 0;
            for (size_t e = 0; e < d; ++e) sum = ring.add(sum, win[k * d + e]);
            y[k] = clear_div(ring, sum, d);
          }
        }
        x = std::move(y);
        break;
      }
      case LayerKind::Argmax:
        x = {ring.reduce(static_cast<i128>(chain_max(ring, x.data(), x.size()).second))};
        break;
    }
    cur = shapes[i];
  }
  return x;
}

Program Program::without_values() const {
  Program p = *this;
  for (auto& st : p.steps) st.values.clear();
  return p;
}

Program lower(const ModelGraph& g) {
  auto shapes = g.shapes();
  auto ring = g.ring();
  unsigned s = g.scale;
  Program p;
  p.bitwidth = g.bitwidth;
  p.scale = s;
  p.input = g.input;
  p.output = shapes.empty() ? g.input : shapes.back();
  Shape cur = g.input;
  auto push = [&](Step st) {
    if (st.op == StepOp::Truncate && st.shift == 0) return;
    p.steps.push_back(std::move(st));
  };
  for (size_t i = 0; i < g.layers.size(); ++i) {
    const Layer& l = g.layers[i];
    Shape out = shapes[i];
    std::string label = std::to_string(i) + ":" + kind_name(l.kind);
    Step base;
    base.in = cur, base.out = out, base.label = label;
    switch (l.kind) {
      case LayerKind::Conv2D:
      case LayerKind::FC: {
        size_t C = out[0];
        std::vector<i128> bias(C, 0);
        for (size_t c = 0; c < l.bias.size(); ++c) bias[c] = l.bias[c];
        Step lin = base;
        lin.op = StepOp::Linear;
        lin.fc = l.kind == LayerKind::FC;
        if (!lin.fc) lin.conv = conv_shape(l, cur);
        lin.values = encode_tensor(ring, l.weights);
        Step add = base, tr = base;
        add.op = StepOp::AddPublic;
        add.in = out;
        tr.op = StepOp::Truncate;
        tr.in = out;
        bool bn = i + 1 < g.layers.size() && g.layers[i + 1].kind == LayerKind::BatchNorm;
        if (bn) {
          // Fold: scale each output row of W and carry bias and shift at the
          // accumulator scale, then truncate by 2s once.
          const Layer& b = g.layers[i + 1];
          size_t per = l.weights.size() / C;
          for (size_t e = 0; e < lin.values.size(); ++e) lin.values[e] = ring.mul(ring.reduce(b.scale[e / per]), lin.values[e]);
          std::vector<i128> k(C);
          for (size_t c = 0; c < C; ++c) k[c] = (static_cast<i128>(b.scale[c]) * bias[c] << s) + (static_cast<i128>(b.shift[c]) << (2 * s));
          add.values = per_channel(ring, out, k);
          add.label = tr.label = lin.label = label + "+bn";
          tr.shift = 2 * s;
          push(lin);
          push(add);
          push(tr);
          ++i;
        } else {
          add.values = per_channel(ring, out, bias);
          tr.shift = s;
          push(lin);
          push(tr);
          push(add);
        }
        break;
      }
      case LayerKind::BatchNorm: {
        Step mul = base, tr = base, add = base;
        std::vector<i128> sc(l.scale.begin(), l.scale.end()), sh(l.shift.begin(), l.shift.end());
        mul.op = StepOp::MulPublic;
        mul.values = per_channel(ring, out, sc);
        tr.op = StepOp::Truncate;
        tr.shift = s;
        add.op = StepOp::AddPublic;
        add.values = per_channel(ring, out, sh);
        push(mul);
        push(tr);
        push(add);
        break;
      }
      case LayerKind::Relu:
        base.op = StepOp::Relu;
        push(base);
        break;
      case LayerKind::Maxpool:
      case LayerKind::Avgpool:
        base.op = l.kind == LayerKind::Maxpool ? StepOp::Maxpool : StepOp::Avgpool;
        base.window = l.window;
        base.stride = l.stride ? l.stride : l.window;
        push(base);
        break;
      case LayerKind::Argmax:
        base.op = StepOp::Argmax;
        push(base);
        break;
    }
    cur = shapes[i];
  }
  return p;
}

Program rewrite_truncation(const Program& p) {
  Program q = p;
  auto ring = p.ring();
  auto& st = q.steps;
  for (size_t i = 0; i < st.size(); ++i) {
    if (st[i].op != StepOp::Truncate || st[i].known_nonnegative) continue;
    size_t j = i + 1;
    while (j < st.size() && st[j].op == StepOp::AddPublic) ++j;
    if (j == st.size() || st[j].op != StepOp::Relu) continue;
    Step tr = st[i];
    tr.known_nonnegative = true;
    u64 k = pow2_in(ring, tr.shift);
    for (size_t a = i + 1; a < j; ++a)
      for (auto& v : st[a].values) v = ring.mul(v, k);
    st.erase(st.begin() + static_cast<long>(i));
    st.insert(st.begin() + static_cast<long>(j), tr);  // just after the ReLU
    i = j;
  }
  return q;
}

std::vector<u64> run_cleartext(const Program& p, const std::vector<u64>& input) {
  auto ring = p.ring();
  if (input.size() != volume(p.input)) throw ArgumentError("input does not match the model input shape");
  std::vector<u64> x = input;
  for (auto& st : p.steps) {
    switch (st.op) {
      case StepOp::Linear: x = clear_linear(ring, st, x); break;
      case StepOp::AddPublic:
        for (size_t e = 0; e < x.size(); ++e) x[e] = ring.add(x[e], st.values[e]);
        break;
      case StepOp::MulPublic:
        for (size_t e = 0; e < x.size(); ++e) x[e] = ring.mul(x[e], st.values[e]);
        break;
      case StepOp::Truncate:
        for (auto& v : x) v = rdiv(ring, v, u64{1} << st.shift);
        break;
      case StepOp::Relu:
        for (auto& v : x)
          if (ring.to_signed(v) < 0) v = 0;
        break;
      case StepOp::Maxpool:
      case StepOp::Avgpool: {
        size_t d = st.window * st.window;
        auto win = gather(x, pool_gather(st.in, st.window, st.stride));
        std::vector<u64> y(win.size() / d);
        for (size_t k = 0; k < y.size(); ++k) {
          if (st.op == StepOp::Maxpool) {
            y[k] = chain_max(ring, &win[k * d], d).first;
          } else {
            u64 sum = 0;
            for (size_t e = 0; e < d; ++e) sum = ring.add(sum, win[k * d + e]);
            y[k] = clear_div(ring, sum, d);
          }
        }
        x = std::move(y);
        break;
      }
      case StepOp::Argmax: x = {ring.reduce(static_cast<i128>(chain_max(ring, x.data(), x.size()).second))}; break;
    }
  }
  return x;
}

InferenceResult secure_infer(Session& s, const Program& prog, const std::vector<u64>& input) {
  auto ring = prog.ring();
  bool p0 = s.party() == 0;
  Channel& ch = s.ch();
  InferenceResult res;
  Meter start = ch.meter();
  auto record = [&](const std::string& label, StepOp op, const Meter& before) {
    res.steps.push_back({label, op, ch.meter() - before});
  };

  // Party 1 masks its input with a random share for party 0.
  size_t n = volume(prog.input);
  std::vector<u64> x(n);
  {
    Meter before = ch.meter();
    if (p0) {
      auto bytes = ch.recv(Tag::InputShare, n * 8);
      for (size_t i = 0; i < n; ++i)
        for (int b = 0; b < 8; ++b) x[i] |= static_cast<u64>(bytes[8 * i + b]) << (8 * b);
    } else {
      if (input.size() != n) throw ArgumentError("input does not match the model input shape");
      std::vector<u8> bytes(n * 8);
      for (size_t i = 0; i < n; ++i) {
        if (!ring.contains(input[i])) throw RangeError("input value outside the ring");
        u64 r = s.prg().uniform(ring);
        x[i] = ring.sub(input[i], r);
        for (int b = 0; b < 8; ++b) bytes[8 * i + b] = static_cast<u8>(r >> (8 * b));
      }
      ch.send(Tag::InputShare, bytes);
    }
    ch.charge(n * ring.bits());
    record("input", StepOp::AddPublic, before);
    res.steps.back().label = "input";
  }

  for (auto& st : prog.steps) {
    Meter before = ch.meter();
    switch (st.op) {
      case StepOp::Linear:
        if (st.fc) {
          size_t M = volume(st.out), N = volume(st.in);
          x = matmul_known_a(s, ring, M, N, 1, st.values, x);
        } else {
          x = conv2d(s, ring, st.conv, st.values, x);
        }
        break;
      case StepOp::AddPublic:
        if (p0)
          for (size_t e = 0; e < x.size(); ++e) x[e] = ring.add(x[e], st.values[e]);
        break;
      case StepOp::MulPublic: x = mul_known_elementwise(s, ring, st.values, x); break;
      case StepOp::Truncate: x = truncate(s, ring, x, st.shift, st.known_nonnegative); break;
      case StepOp::Relu: x = relu(s, ring, x); break;
      case StepOp::Maxpool:
      case StepOp::Avgpool: {
        size_t d = st.window * st.window;
        auto win = gather(x, pool_gather(st.in, st.window, st.stride));
        x = st.op == StepOp::Maxpool ? maxpool(s, ring, win, d) : avgpool(s, ring, win, d);
        break;
      }
      case StepOp::Argmax: x = argmax(s, ring, x, x.size()); break;
    }
    record(st.label, st.op, before);
  }

  // Party 0 hands its output shares to party 1.
  Meter before = ch.meter();
  if (p0) {
    std::vector<u8> bytes(x.size() * 8);
    for (size_t i = 0; i < x.size(); ++i)
      for (int b = 0; b < 8; ++b) bytes[8 * i + b] = static_cast<u8>(x[i] >> (8 * b));
    ch.send(Tag::OutputShare, bytes);
  } else {
    auto bytes = ch.recv(Tag::OutputShare, x.size() * 8);
    res.output.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
      u64 v = 0;
      for (int b = 0; b < 8; ++b) v |= static_cast<u64>(bytes[8 * i + b]) << (8 * b);
      res.output[i] = ring.add(x[i], v);
    }
  }
  ch.charge(x.size() * ring.bits());
  record("output", StepOp::AddPublic, before);
  res.total = ch.meter() - start;
  return res;
}

std::vector<u64> encode_tensor(const Modulus& ring, const std::vector<i64>& v) {
  std::vector<u64> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = ring.reduce(v[i]);
  return out;
}

std::vector<i64> decode_tensor(const Modulus& ring, const std::vector<u64>& v) {
  std::vector<i64> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<i64>(ring.to_signed(v[i]));
  return out;
}

namespace {

i64 uniform_int(Prg& g, i64 lo, i64 hi) { return lo + static_cast<i64>(g.below(static_cast<u64>(hi - lo + 1))); }

std::vector<i64> uniform_ints(Prg& g, size_t n, i64 bound) {
  std::vector<i64> v(n);
  for (auto& x : v) x = uniform_int(g, -bound, bound);
  return v;
}

// Worst-case magnitude of every intermediate, including the rewritten order.
bool fits(const ModelGraph& m) {
  double lim = std::ldexp(1.0, static_cast<int>(m.bitwidth) - 2);
  double one = std::ldexp(1.0, static_cast<int>(m.scale));
  double X = one;
  auto shapes = m.shapes();
  Shape cur = m.input;
  auto maxabs = [](const std::vector<i64>& v) {
    double r = 0;
    for (i64 x : v) r = std::max(r, std::fabs(static_cast<double>(x)));
    return r;
  };
  for (size_t i = 0; i < m.layers.size(); ++i) {
    const Layer& l = m.layers[i];
    switch (l.kind) {
      case LayerKind::Conv2D:
      case LayerKind::FC: {
        double fan = static_cast<double>(l.weights.size() / shapes[i][0]);
        double acc = fan * maxabs(l.weights) * X + maxabs(l.bias) * one;
        if (acc > lim) return false;
        if (i + 1 < m.layers.size() && m.layers[i + 1].kind == LayerKind::BatchNorm) {
          const Layer& b = m.layers[++i];
          double t = maxabs(b.scale) * acc + maxabs(b.shift) * one * one;
          if (t > lim) return false;
          X = t / (one * one) + 1;
        } else {
          X = acc / one + maxabs(l.bias) + 1;
        }
        break;
      }
      case LayerKind::BatchNorm: {
        double t = maxabs(l.scale) * X;
        if (t > lim) return false;
        X = t / one + maxabs(l.shift) + 1;
        break;
      }
      case LayerKind::Avgpool:
        if (static_cast<double>(l.window * l.window) * X > lim) return false;
        break;
      default:
        if (2 * X > lim) return false;
    }
    cur = shapes[i];
  }
  return 2 * X <= lim;
}

}  // namespace

ModelGraph random_model(Prg& g, const RandomModelOptions& opt) {
  if (opt.bitwidths.empty() || opt.min_layers < 1 || opt.max_layers < opt.min_layers)
    throw ArgumentError("invalid random model options");
  ModelGraph m;
  m.bitwidth = opt.bitwidths[g.below(opt.bitwidths.size())];
  unsigned max_s = std::min(opt.max_scale, m.bitwidth - 2);
  unsigned scale = static_cast<unsigned>(g.below(max_s + 1));
  size_t target = opt.min_layers + g.below(opt.max_layers - opt.min_layers + 1);
  for (int attempt = 0;; ++attempt) {
    if (attempt > 0 && attempt % 8 == 0 && scale > 0) --scale;
    m.scale = scale;
    m.layers.clear();
    m.input = {1 + g.below(3), 4 + g.below(5), 0};
    m.input[2] = m.input[1];
    Shape cur = m.input;
    i64 one = i64{1} << scale;
    bool linear_seen = false;
    while (m.layers.size() < target) {
      bool last = m.layers.size() + 1 == target;
      Layer l;
      u64 pick = g.below(10);
      bool spatial = cur[1] >= 2 && cur[2] >= 2;
      if (!linear_seen || pick < 3) {
        bool conv = spatial && g.below(3) != 0;
        size_t fan;
        if (conv) {
          l.kind = LayerKind::Conv2D;
          l.filters = 1 + g.below(3);
          l.kh = l.kw = std::min<size_t>(1 + g.below(3), cur[1]);
          l.stride = 1 + g.below(2);
          l.pad = g.below(2);
          fan = cur[0] * l.kh * l.kw;
          l.weights.resize(l.filters * fan);
        } else {
          l.kind = LayerKind::FC;
          l.out = 1 + g.below(6);
          fan = volume(cur);
          l.weights.resize(l.out * fan);
        }
        i64 wb = std::max<i64>(1, one / static_cast<i64>(fan));
        l.weights = uniform_ints(g, l.weights.size(), wb);
        l.bias = uniform_ints(g, conv ? l.filters : l.out, one);
        linear_seen = true;
      } else if (pick < 5) {
        l.kind = LayerKind::Relu;
      } else if (pick < 7 && spatial) {
        l.kind = g.below(2) ? LayerKind::Maxpool : LayerKind::Avgpool;
        l.window = 2;
        l.stride = 1 + g.below(2);
      } else if (pick < 8 && !(is_linear(m.layers.back().kind) && 2 * scale >= m.bitwidth)) {
        l.kind = LayerKind::BatchNorm;
        l.scale = uniform_ints(g, cur[0], one);
        l.shift = uniform_ints(g, cur[0], one);
      } else if (last && pick == 9 && volume(cur) > 1) {
        l.kind = LayerKind::Argmax;
      } else {
        l.kind = LayerKind::Relu;
      }
      m.layers.push_back(l);
      cur = m.shapes().back();
    }
    if (fits(m)) return m;
  }
}

std::vector<u64> random_input(Prg& g, const ModelGraph& m) {
  auto ring = m.ring();
  i64 one = i64{1} << m.scale;
  std::vector<u64> x(volume(m.input));
  for (auto& v : x) v = ring.reduce(uniform_int(g, -one, one));
  return x;
}

}  // namespace s2pc
