#include "s2pc/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "s2pc/compare.hpp"
#include "s2pc/linear.hpp"
#include "s2pc/nn.hpp"
#include "s2pc/nonlinear.hpp"
#include "s2pc/sharing.hpp"
#include "s2pc/truncdiv.hpp"

namespace s2pc {

using nlohmann::json;

const char* const kBenchCsvHeader = "protocol,ring,bits_param,m,analytic_bits,rounds,actual_bits,wall_ms";

namespace {

constexpr u64 kOddRing32 = 4294967291ULL;  // largest prime below 2^32

using Body = std::function<void(Session&, size_t)>;

BenchRow measure(const std::string& protocol, const Modulus& ring, const std::string& param, unsigned m, size_t batch,
                 const Body& body) {
  SessionParams p;
  p.mill_m = m;
  auto t0 = std::chrono::steady_clock::now();
  auto r = run_pair(p, [&](Session& s) { body(s, batch); }, [&](Session& s) { body(s, batch); });
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  BenchRow row;
  row.protocol = protocol;
  row.ring = ring.str();
  row.bits_param = param;
  row.m = m;
  row.analytic_bits = r.meter0.analytic_bits / batch;
  row.rounds = r.meter0.rounds;
  row.actual_bits = (r.meter0.bits_sent + r.meter1.bits_sent) / batch;
  row.wall_ms = ms;
  return row;
}

BenchRow reference(const std::string& protocol, const std::string& ring, const std::string& param, u64 bits) {
  BenchRow row;
  row.protocol = protocol;
  row.ring = ring;
  row.bits_param = param;
  row.analytic_bits = bits;
  row.rounds = 2;
  return row;
}

std::vector<u64> ones(size_t n) { return std::vector<u64>(n, 1); }

std::string fmt_ms(double v) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(3) << v;
  return o.str();
}

}  // namespace

std::vector<BenchRow> bench_rows(size_t batch) {
  if (batch == 0) throw ArgumentError("batch must be positive");
  const u64 lam = kLambda;
  auto z32 = Modulus::pow2(32);
  auto zn = Modulus::odd(kOddRing32);
  std::vector<BenchRow> rows;
  for (unsigned m = 1; m <= 8; ++m)
    rows.push_back(measure("mill", z32, "l=32", m, batch, [](Session& s, size_t n) { mill(s, 32, ones(n)); }));
  rows.push_back(reference("gc:mill", z32.str(), "l=32", 4 * lam * 32));
  rows.push_back(measure("drelu_int", z32, "l=32", 7, batch, [&](Session& s, size_t n) { drelu_int(s, z32, ones(n)); }));
  rows.push_back(measure("drelu_ring_simple", zn, "eta=32", 7, batch,
                         [&](Session& s, size_t n) { drelu_ring_simple(s, zn, ones(n)); }));
  rows.push_back(measure("drelu_ring", zn, "eta=32", 7, batch, [&](Session& s, size_t n) { drelu_ring(s, zn, ones(n)); }));
  rows.push_back(measure("relu", z32, "l=32", 7, batch, [&](Session& s, size_t n) { relu(s, z32, ones(n)); }));
  rows.push_back(reference("gc:relu", z32.str(), "l=32", 8 * lam * 32 - 4 * lam));
  rows.push_back(measure("relu", zn, "eta=32", 7, batch, [&](Session& s, size_t n) { relu(s, zn, ones(n)); }));
  rows.push_back(reference("gc:relu", zn.str(), "eta=32", 18 * lam * 32 - 6 * lam));
  rows.push_back(measure("truncate", z32, "l=32 s=12", 7, batch, [&](Session& s, size_t n) { truncate(s, z32, ones(n), 12); }));
  rows.push_back(measure("truncate_nonneg", z32, "l=32 s=12", 7, batch,
                         [&](Session& s, size_t n) { truncate(s, z32, ones(n), 12, true); }));
  rows.push_back(reference("gc:truncate", z32.str(), "l=32 s=12", 24064));
  rows.push_back(measure("avgpool", z32, "l=32 d=49", 8, batch,
                         [&](Session& s, size_t n) { avgpool(s, z32, ones(49 * n), 49); }));
  rows.push_back(reference("gc:avgpool", z32.str(), "l=32 d=49", 2 * lam * (32 * 32 + 5 * 32 - 3)));
  rows.push_back(measure("avgpool", zn, "eta=32 d=49", 7, batch,
                         [&](Session& s, size_t n) { avgpool(s, zn, ones(49 * n), 49); }));
  rows.push_back(reference("gc:avgpool", zn.str(), "eta=32 d=49", 2 * lam * (32 * 32 + 9 * 32 - 3)));
  // matmul cost grows with N*K, not with the number of rows, so it is measured once
  rows.push_back(measure("matmul", z32, "l=32 M=N=K=1", 4, 1, [&](Session& s, size_t) {
    std::vector<u64> a = s.party() == 0 ? ones(1) : std::vector<u64>{};
    matmul_known_a(s, z32, 1, 1, 1, a, ones(1));
  }));
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream o;
  o << kBenchCsvHeader << "\n";
  for (auto& r : rows) {
    o << r.protocol << "," << r.ring << "," << r.bits_param << "," << r.m << "," << r.analytic_bits << "," << r.rounds
      << ",";
    if (r.actual_bits) o << *r.actual_bits;
    o << ",";
    if (r.wall_ms) o << fmt_ms(*r.wall_ms);
    o << "\n";
  }
  return o.str();
}

namespace {

void print_table(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << std::left << std::setw(20) << "protocol" << std::setw(14) << "ring" << std::setw(16) << "param" << std::right
     << std::setw(3) << "m" << std::setw(12) << "analytic" << std::setw(8) << "rounds" << std::setw(12) << "actual"
     << std::setw(11) << "wall_ms"
     << "\n";
  for (auto& r : rows) {
    os << std::left << std::setw(20) << r.protocol << std::setw(14) << r.ring << std::setw(16) << r.bits_param
       << std::right << std::setw(3) << (r.m ? std::to_string(r.m) : "-") << std::setw(12) << r.analytic_bits
       << std::setw(8) << r.rounds << std::setw(12) << (r.actual_bits ? std::to_string(*r.actual_bits) : "-")
       << std::setw(11) << (r.wall_ms ? fmt_ms(*r.wall_ms) : "-") << "\n";
  }
}

i128 floor_div_ref(i128 a, i128 d) {
  i128 q = a / d;
  if (q * d > a) --q;
  return q;
}

u64 ring_div_ref(const Modulus& m, u64 a, u64 d) {
  return m.reduce(floor_div_ref(m.to_signed(a), d));
}

VerifyReport verify_division(u64 seed) {
  VerifyReport rep{"division"};
  Prg g(seed);
  std::vector<Modulus> rings;
  for (u64 n = 3; n <= 127; n += 2) rings.push_back(Modulus::odd(n));
  for (unsigned l = 2; l <= 7; ++l) rings.push_back(Modulus::pow2(l));
  for (auto& m : rings) {
    u64 n = m.max() + 1;
    for (u64 d = 1; d < n; ++d) {
      auto check = [&](u64 a0, u64 a1) {
        ++rep.checks;
        if (decompose_division(m, a0, a1, d).quotient != ring_div_ref(m, m.add(a0, a1), d)) ++rep.failures;
      };
      if (n <= 32) {
        for (u64 a0 = 0; a0 < n; ++a0)
          for (u64 a1 = 0; a1 < n; ++a1) check(a0, a1);
      } else {
        for (int i = 0; i < 1000; ++i) check(g.below(n), g.below(n));
      }
    }
  }
  return rep;
}

VerifyReport verify_protocols(u64 seed) {
  VerifyReport rep{"protocols"};
  Prg g(seed);
  auto tally = [&](const std::vector<u64>& got, const std::vector<u64>& want) {
    rep.checks += want.size();
    for (size_t i = 0; i < want.size(); ++i) rep.failures += got.size() <= i || got[i] != want[i];
  };
  // every value under a few random splits
  auto splits = [&](const Modulus& m, size_t reps, std::vector<u64>& a0, std::vector<u64>& a1, std::vector<u64>& a) {
    a0.clear(), a1.clear(), a.clear();
    for (u64 v = 0; v <= m.max(); ++v)
      for (size_t r = 0; r < reps; ++r) {
        u64 s0 = g.uniform(m);
        a.push_back(v), a0.push_back(s0), a1.push_back(m.sub(v, s0));
      }
  };
  auto run = [&](const Modulus& ring, const std::vector<u64>& a0, const std::vector<u64>& a1,
                 const std::function<std::vector<u64>(Session&, std::span<const u64>)>& f, unsigned m = 4) {
    std::vector<u64> r0, r1;
    SessionParams p;
    p.mill_m = m;
    run_pair(p, [&](Session& s) { r0 = f(s, a0); }, [&](Session& s) { r1 = f(s, a1); });
    return reconstruct_vec(ring, r0, r1);
  };
  auto bits = [](std::vector<u8> b) { return std::vector<u64>(b.begin(), b.end()); };

  for (unsigned l = 1; l <= 8; ++l)
    for (unsigned m = 1; m <= 8; ++m) {
      std::vector<u64> x, y, want;
      for (u64 a = 0; a < (u64{1} << l); ++a)
        for (u64 b = 0; b < (u64{1} << l); ++b) x.push_back(a), y.push_back(b), want.push_back(a < b);
      std::vector<u8> r0, r1;
      SessionParams p;
      run_pair(p, [&](Session& s) { r0 = mill(s, l, x, m); }, [&](Session& s) { r1 = mill(s, l, y, m); });
      tally(bits(reconstruct_bits(r0, r1)), want);
    }
  std::vector<u64> a0, a1, a;
  auto z8 = Modulus::pow2(8);
  splits(z8, 4, a0, a1, a);
  {
    std::vector<u64> want;
    for (u64 v : a) want.push_back(v < 128);
    auto f = [&](Session& s, std::span<const u64> x) {
      auto b = drelu_int(s, z8, x);
      return std::vector<u64>(b.begin(), b.end());
    };
    tally(run(Modulus::pow2(1), a0, a1, f), want);
    for (unsigned sh = 1; sh < 8; ++sh) {
      std::vector<u64> w;
      for (u64 v : a) w.push_back(ring_div_ref(z8, v, u64{1} << sh));
      tally(run(z8, a0, a1, [&](Session& s, std::span<const u64> x) { return truncate(s, z8, x, sh); }), w);
    }
    std::vector<u64> w;
    for (u64 v : a) w.push_back(v < 128 ? v : 0);
    tally(run(z8, a0, a1, [&](Session& s, std::span<const u64> x) { return relu(s, z8, x); }), w);
  }
  for (u64 n = 3; n <= 63; n += 2) {
    auto zn = Modulus::odd(n);
    splits(zn, 4, a0, a1, a);
    std::vector<u64> want;
    for (u64 v : a) want.push_back(2 * v < n);
    for (auto fn : {drelu_ring, drelu_ring_simple}) {
      auto f = [&](Session& s, std::span<const u64> x) {
        auto b = fn(s, zn, x);
        return std::vector<u64>(b.begin(), b.end());
      };
      tally(run(Modulus::pow2(1), a0, a1, f), want);
    }
    for (u64 d : {2, 3, 5, 7}) {
      if (d >= n) continue;
      std::vector<u64> w;
      for (u64 v : a) w.push_back(ring_div_ref(zn, v, d));
      tally(run(zn, a0, a1, [&](Session& s, std::span<const u64> x) { return div_ring(s, zn, x, d); }), w);
    }
  }
  // pools on 6-bit values kept within a quarter of the ring
  auto z6 = Modulus::pow2(6);
  for (size_t d : {2u, 3u, 4u}) {
    std::vector<u64> x, wmax, warg, wavg;
    for (int rep_i = 0; rep_i < 500; ++rep_i) {
      std::vector<i64> v(d);
      i128 sum = 0;
      for (auto& e : v) e = static_cast<i64>(g.below(16)) - 8, sum += e;
      size_t best = 0;
      for (size_t i = 1; i < d; ++i)
        if (v[i] > v[best]) best = i;
      for (auto e : v) x.push_back(z6.from_signed(e));
      wmax.push_back(z6.from_signed(v[best]));
      warg.push_back(best);
      wavg.push_back(z6.reduce(floor_div_ref(sum, d)));
    }
    auto [x0, x1] = share_vec(z6, x, g);
    tally(run(z6, x0, x1, [&](Session& s, std::span<const u64> v) { return maxpool(s, z6, v, d); }), wmax);
    tally(run(z6, x0, x1, [&](Session& s, std::span<const u64> v) { return argmax(s, z6, v, d); }), warg);
    tally(run(z6, x0, x1, [&](Session& s, std::span<const u64> v) { return avgpool(s, z6, v, d); }), wavg);
  }
  return rep;
}

VerifyReport verify_meter() {
  VerifyReport rep{"meter"};
  auto rows = bench_rows(1);
  auto find = [&](const std::string& proto, const std::string& ring, unsigned m) -> const BenchRow* {
    for (auto& r : rows)
      if (r.protocol == proto && r.ring == ring && r.m == m) return &r;
    return nullptr;
  };
  std::string z32 = Modulus::pow2(32).str(), zn = Modulus::odd(kOddRing32).str();
  struct Target {
    const char* proto;
    std::string ring;
    unsigned m;
    u64 bits;
    u64 rounds;  // 0: not checked
  };
  std::vector<Target> targets = {
      {"mill", z32, 7, 2930, 5},         {"mill", z32, 4, 3844, 5},       {"relu", z32, 7, 3298, 7},
      {"relu", zn, 7, 5288, 9},          {"truncate", z32, 7, 4310, 0},   {"avgpool", z32, 8, 5570, 0},
      {"drelu_ring", zn, 7, 4904, 7},    {"drelu_ring_simple", zn, 7, 9114, 0},
      {"avgpool", zn, 7, 7796, 0},       {"matmul", z32, 4, 4624, 2},
  };
  for (auto& t : targets) {
    ++rep.checks;
    auto* r = find(t.proto, t.ring, t.m);
    bool ok = r && r->analytic_bits == t.bits && (t.rounds == 0 || r->rounds == t.rounds);
    if (!ok) ++rep.failures;
    std::cout << "  " << std::left << std::setw(18) << t.proto << std::setw(14) << t.ring << " m=" << t.m << "  want "
              << t.bits << "  got " << (r ? std::to_string(r->analytic_bits) : "?") << (ok ? "  ok" : "  MISMATCH")
              << "\n";
  }
  return rep;
}

VerifyReport verify_e2e(size_t models, u64 seed) {
  VerifyReport rep{"e2e"};
  Prg g(seed);
  for (size_t i = 0; i < models; ++i) {
    auto m = random_model(g);
    auto x = random_input(g, m);
    auto want = cleartext_infer(m, x);
    auto prog = rewrite_truncation(lower(m));
    auto stripped = prog.without_values();
    SessionParams p;
    p.bitwidth = m.bitwidth;
    p.scale = m.scale;
    std::vector<u64> got[2];
    PairResult runs[2];
    for (int b = 0; b < 2; ++b) {
      InferenceResult r1;
      runs[b] = run_pair(
          p, [&](Session& s) { secure_infer(s, prog, {}); }, [&](Session& s) { r1 = secure_infer(s, stripped, x); },
          b ? Backend::Tcp : Backend::Memory);
      got[b] = r1.output;
    }
    rep.checks += 3;
    rep.failures += got[0] != want;
    rep.failures += got[1] != want;
    rep.failures += !(runs[0].meter0 == runs[1].meter0 && runs[0].meter1 == runs[1].meter1);
  }
  return rep;
}

}  // namespace

VerifyReport verify_scope(const std::string& scope, size_t e2e_models, u64 seed) {
  if (scope == "division") return verify_division(seed);
  if (scope == "protocols") return verify_protocols(seed);
  if (scope == "meter") return verify_meter();
  if (scope == "e2e") return verify_e2e(e2e_models, seed);
  throw ArgumentError("unknown verify scope '" + scope + "'");
}

namespace {

std::vector<u64> load_input(const std::string& path, const ModelGraph& m) {
  std::ifstream f(path);
  if (!f) throw ArgumentError("cannot open input file " + path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("malformed input: ") + e.what());
  }
  if (doc.is_object() && doc.contains("input")) doc = doc["input"];
  if (!doc.is_array()) throw ArgumentError("input must be a JSON array of integers");
  std::vector<i64> v;
  for (auto& e : doc) {
    if (!e.is_number_integer()) throw ArgumentError("input must be a JSON array of integers");
    v.push_back(e.get<i64>());
  }
  if (v.size() != volume(m.input)) throw ArgumentError("input length does not match the model input shape");
  if (m.bitwidth < 64) {
    i64 lim = i64{1} << (m.bitwidth - 1);
    for (i64 x : v)
      if (x < -lim || x >= lim) throw RangeError("input value outside the ring");
  }
  return encode_tensor(m.ring(), v);
}

void print_meter(std::ostream& os, int party, const InferenceResult& r) {
  os << "party " << party << " meter\n";
  os << std::left << std::setw(18) << "  step" << std::setw(10) << "op" << std::right << std::setw(12) << "analytic"
     << std::setw(8) << "rounds" << std::setw(12) << "sent" << "\n";
  for (auto& st : r.steps)
    os << "  " << std::left << std::setw(16) << st.label << std::setw(10)
       << (st.label == "input" ? "share" : st.label == "output" ? "reveal" : op_name(st.op)) << std::right << std::setw(12)
       << st.meter.analytic_bits << std::setw(8) << st.meter.rounds << std::setw(12) << st.meter.bits_sent << "\n";
  os << "  " << std::left << std::setw(26) << "total" << std::right << std::setw(12) << r.total.analytic_bits
     << std::setw(8) << r.total.rounds << std::setw(12) << r.total.bits_sent << "\n";
}

void print_output(std::ostream& os, const ModelGraph& m, const std::vector<u64>& out, bool as_json) {
  auto vals = decode_tensor(m.ring(), out);
  bool is_class = !m.layers.empty() && m.layers.back().kind == LayerKind::Argmax;
  if (as_json) {
    json j = {{"output", vals}};
    if (is_class) j["class"] = out[0];
    os << j.dump() << "\n";
    return;
  }
  if (is_class) os << "class " << out[0] << "\n";
  os << "output";
  for (auto v : vals) os << " " << v;
  os << "\n";
}

ModelGraph cifar_model(Prg& g) {
  // 3x32x32 -> conv 8@3x3/2 -> relu -> maxpool 2 -> conv 16@3x3/2 -> relu
  // -> avgpool 2 -> fc 10 -> argmax, at scale 8 in Z_2^32.
  ModelGraph m;
  m.bitwidth = 32;
  m.scale = 8;
  m.input = {3, 32, 32};
  i64 one = i64{1} << m.scale;
  auto conv = [&](size_t in_c, size_t filters) {
    Layer l;
    l.kind = LayerKind::Conv2D;
    l.filters = filters, l.kh = l.kw = 3, l.stride = 2, l.pad = 1;
    i64 b = std::max<i64>(1, 2 * one / static_cast<i64>(in_c * 9));
    for (size_t i = 0; i < filters * in_c * 9; ++i) l.weights.push_back(static_cast<i64>(g.below(2 * b + 1)) - b);
    for (size_t i = 0; i < filters; ++i) l.bias.push_back(static_cast<i64>(g.below(one / 2 + 1)) - one / 4);
    return l;
  };
  Layer relu, mp, ap, fc, am;
  relu.kind = LayerKind::Relu;
  mp.kind = LayerKind::Maxpool;
  mp.window = mp.stride = 2;
  ap.kind = LayerKind::Avgpool;
  ap.window = ap.stride = 2;
  fc.kind = LayerKind::FC;
  fc.out = 10;
  i64 b = std::max<i64>(1, 2 * one / 64);
  for (size_t i = 0; i < 10 * 64; ++i) fc.weights.push_back(static_cast<i64>(g.below(2 * b + 1)) - b);
  for (size_t i = 0; i < 10; ++i) fc.bias.push_back(static_cast<i64>(g.below(one + 1)) - one / 2);
  am.kind = LayerKind::Argmax;
  m.layers = {conv(3, 8), relu, mp, conv(8, 16), relu, ap, fc, am};
  return m;
}

ModelGraph conv_relu_model(Prg& g) {
  ModelGraph m;
  m.bitwidth = 32;
  m.scale = 12;
  m.input = {1, 8, 8};
  Layer c;
  c.kind = LayerKind::Conv2D;
  c.filters = 4, c.kh = c.kw = 3, c.pad = 1;
  i64 one = i64{1} << m.scale;
  for (size_t i = 0; i < 36; ++i) c.weights.push_back(static_cast<i64>(g.below(one / 4 + 1)) - one / 8);
  for (size_t i = 0; i < 4; ++i) c.bias.push_back(static_cast<i64>(g.below(one + 1)) - one / 2);
  Layer r;
  r.kind = LayerKind::Relu;
  m.layers = {c, r};
  return m;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw ArgumentError("cannot write " + path);
  f << j.dump() << "\n";
}

u64 env_seed(u64 fallback) {
  if (const char* e = std::getenv("SCI_SEED")) {
    try {
      return std::stoull(e);
    } catch (...) {
      throw ArgumentError("SCI_SEED must be an unsigned integer");
    }
  }
  return fallback;
}

std::pair<std::string, u32> split_host_port(const std::string& s) {
  auto pos = s.rfind(':');
  if (pos == std::string::npos) throw ArgumentError("--connect expects host:port");
  return {s.substr(0, pos), static_cast<u32>(std::stoul(s.substr(pos + 1)))};
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Two-party secure inference over additive shares"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "evaluate a model on an input as one or both parties");
  std::string model_path, input_path, connect, port_file, backend = "memory";
  int role = -1;
  u32 listen = 0;
  bool listen_set = false;
  unsigned mill_m = 4;
  u64 seed = 1;
  bool no_rewrite = false, as_json = false;
  run->add_option("--model", model_path, "model JSON")->required();
  run->add_option("--input", input_path, "input JSON (party 1, or in-process runs)");
  run->add_option("--role", role, "0 holds the model, 1 holds the input; omit for an in-process run")
      ->check(CLI::Range(0, 1));
  auto* lopt = run->add_option("--listen", listen, "port to listen on (role 0)");
  run->add_option("--connect", connect, "host:port of party 0 (role 1)");
  run->add_option("--port-file", port_file, "write the bound port here (role 0)");
  run->add_option("--backend", backend, "in-process transport: memory or tcp")->check(CLI::IsMember({"memory", "tcp"}));
  run->add_option("--m", mill_m, "comparison leaf size")->check(CLI::Range(1, 8));
  run->add_option("--seed", seed, "randomness seed (SCI_SEED overrides)");
  run->add_flag("--no-rewrite", no_rewrite, "keep truncations before ReLUs");
  run->add_flag("--json", as_json, "print the output as JSON");

  // bench
  auto* bench = app.add_subcommand("bench", "print protocol costs with garbled-circuit reference rows");
  std::string csv_path;
  size_t batch = 1;
  bool csv_stdout = false;
  bench->add_option("--csv", csv_path, "also write CSV here");
  bench->add_flag("--csv-stdout", csv_stdout, "print CSV instead of the table");
  bench->add_option("--batch", batch, "elements per measurement")->check(CLI::PositiveNumber);

  // verify
  auto* verify = app.add_subcommand("verify", "run oracle comparisons and report failures");
  std::vector<std::string> scopes;
  size_t models = 100;
  verify->add_option("--scope", scopes, "division, protocols, meter, e2e or all")->default_val("all");
  verify->add_option("--models", models, "random models for the e2e scope");
  verify->add_option("--seed", seed, "randomness seed (SCI_SEED overrides)");

  // gen
  auto* gen = app.add_subcommand("gen", "write a model fixture and a matching input");
  std::string kind = "random", out_path, input_out;
  gen->add_option("--kind", kind, "random, cifar or conv-relu")->check(CLI::IsMember({"random", "cifar", "conv-relu"}));
  gen->add_option("--out", out_path, "model output path")->required();
  gen->add_option("--input-out", input_out, "input output path");
  gen->add_option("--seed", seed, "randomness seed (SCI_SEED overrides)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  listen_set = lopt->count() > 0;

  try {
    seed = env_seed(seed);
    if (*run) {
      auto model = load_model_file(model_path);
      auto prog = lower(model);
      if (!no_rewrite) prog = rewrite_truncation(prog);
      SessionParams p;
      p.bitwidth = model.bitwidth;
      p.scale = model.scale;
      p.mill_m = mill_m;
      p.seed = seed;
      if (role < 0) {
        if (input_path.empty()) throw ArgumentError("--input is required");
        auto x = load_input(input_path, model);
        InferenceResult r0, r1;
        auto stripped = prog.without_values();
        run_pair(
            p, [&](Session& s) { r0 = secure_infer(s, prog, {}); },
            [&](Session& s) { r1 = secure_infer(s, stripped, x); },
            backend == "tcp" ? Backend::Tcp : Backend::Memory);
        print_output(std::cout, model, r1.output, as_json);
        if (!as_json) {
          print_meter(std::cout, 0, r0);
          print_meter(std::cout, 1, r1);
        }
        return 0;
      }
      std::unique_ptr<Transport> t;
      if (role == 0) {
        if (!listen_set) throw ArgumentError("role 0 needs --listen");
        TcpListener l(listen);
        if (!port_file.empty()) {
          std::ofstream pf(port_file);
          pf << l.port() << "\n";
        }
        std::cerr << "listening on port " << l.port() << std::endl;
        t = l.accept();
      } else {
        if (connect.empty()) throw ArgumentError("role 1 needs --connect host:port");
        if (input_path.empty()) throw ArgumentError("--input is required for role 1");
        auto [host, port] = split_host_port(connect);
        t = tcp_connect(host, port);
      }
      Channel ch(role, std::move(t));
      Session s = handshake(ch, p);
      ch.reset_meter();
      InferenceResult r;
      if (role == 0) {
        r = secure_infer(s, prog, {});
      } else {
        r = secure_infer(s, prog.without_values(), load_input(input_path, model));
        print_output(std::cout, model, r.output, as_json);
      }
      ch.close();
      if (!as_json) print_meter(std::cout, role, r);
      return 0;
    }
    if (*bench) {
      auto rows = bench_rows(batch);
      if (csv_stdout)
        std::cout << bench_csv(rows);
      else
        print_table(std::cout, rows);
      if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        if (!f) throw ArgumentError("cannot write " + csv_path);
        f << bench_csv(rows);
      }
      return 0;
    }
    if (*verify) {
      std::vector<std::string> list;
      for (auto& sc : scopes) {
        if (sc == "all")
          list.insert(list.end(), {"division", "protocols", "meter", "e2e"});
        else
          list.push_back(sc);
      }
      u64 failures = 0;
      for (auto& sc : list) {
        auto r = verify_scope(sc, models, seed);
        std::cout << "scope " << r.scope << ": " << r.checks << " checks, " << r.failures << " failures\n";
        failures += r.failures;
      }
      return failures ? 1 : 0;
    }
    if (*gen) {
      Prg g(seed);
      ModelGraph m = kind == "cifar" ? cifar_model(g) : kind == "conv-relu" ? conv_relu_model(g) : random_model(g);
      write_json(out_path, model_to_json(m));
      if (!input_out.empty()) write_json(input_out, decode_tensor(m.ring(), random_input(g, m)));
      return 0;
    }
  } catch (const SetupError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const TransportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace s2pc
