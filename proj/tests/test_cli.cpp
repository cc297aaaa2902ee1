#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <thread>

#include "doctest.h"
#include "s2pc/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Proc {
  int rc = -1;
  std::string out;
};

std::string bin() {
  const char* b = std::getenv("S2PC_BIN");
  REQUIRE_MESSAGE(b != nullptr, "S2PC_BIN not set");
  return b;
}

std::string models() {
  const char* m = std::getenv("S2PC_MODELS");
  REQUIRE_MESSAGE(m != nullptr, "S2PC_MODELS not set");
  return m;
}

Proc sh(const std::string& args) {
  std::string cmd = bin() + " " + args + " 2>&1";
  Proc p;
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) p.out.append(buf, n);
  int st = pclose(f);
  p.rc = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return p;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("s2pc_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Starts party 0 on an ephemeral port and returns once the port is known.
std::future<Proc> start_server(const std::string& args, const fs::path& port_file) {
  fs::remove(port_file);
  auto fut = std::async(std::launch::async, [=] {
    return sh("run --role 0 --listen 0 --port-file " + port_file.string() + " " + args);
  });
  for (int i = 0; i < 500 && slurp(port_file).empty(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  return fut;
}

}  // namespace

TEST_CASE("in-process run prints the plaintext result") {
  auto m = models();
  auto p = sh("run --model " + m + "/relu.json --input " + m + "/relu_input.json");
  CHECK(p.rc == 0);
  CHECK(first_line(p.out) == "output 0 0 7 0");
  CHECK(p.out.find("party 0 meter") != std::string::npos);
  CHECK(p.out.find("party 1 meter") != std::string::npos);

  auto mem = sh("run --json --model " + m + "/cifar_cnn.json --input " + m + "/cifar_input.json");
  auto tcp = sh("run --json --backend tcp --model " + m + "/cifar_cnn.json --input " + m + "/cifar_input.json");
  CHECK(mem.rc == 0);
  CHECK(mem.out == tcp.out);
  CHECK(mem.out.find("\"class\":") != std::string::npos);
}

TEST_CASE("rewrite changes cost but not the result") {
  auto m = models();
  auto a = sh("run --json --model " + m + "/conv_relu.json --input " + m + "/conv_relu_input.json");
  auto b = sh("run --json --no-rewrite --model " + m + "/conv_relu.json --input " + m + "/conv_relu_input.json");
  CHECK(a.rc == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("two processes over tcp") {
  auto m = models();
  auto pf = scratch("port");
  auto server = start_server("--model " + m + "/cifar_cnn.json", pf);
  auto port = std::stoul(slurp(pf));
  auto client = sh("run --role 1 --json --connect 127.0.0.1:" + std::to_string(port) + " --model " + m +
                   "/cifar_cnn.json --input " + m + "/cifar_input.json");
  auto s = server.get();
  CHECK(client.rc == 0);
  CHECK(s.rc == 0);
  auto local = sh("run --json --model " + m + "/cifar_cnn.json --input " + m + "/cifar_input.json");
  CHECK(first_line(client.out) == first_line(local.out));
}

TEST_CASE("parameter mismatch fails the handshake on both sides") {
  auto m = models();
  auto pf = scratch("port_mismatch");
  auto server = start_server("--m 4 --model " + m + "/relu.json", pf);
  auto port = std::stoul(slurp(pf));
  auto client = sh("run --role 1 --m 7 --connect 127.0.0.1:" + std::to_string(port) + " --model " + m +
                   "/relu.json --input " + m + "/relu_input.json");
  auto s = server.get();
  CHECK(client.rc != 0);
  CHECK(s.rc != 0);
  CHECK(client.out.find("m mismatch") != std::string::npos);
  CHECK(s.out.find("m mismatch") != std::string::npos);
}

TEST_CASE("bench csv") {
  auto csv = scratch("bench.csv");
  auto p = sh("bench --csv " + csv.string());
  CHECK(p.rc == 0);
  auto text = slurp(csv);
  CHECK(first_line(text) == s2pc::kBenchCsvHeader);
  CHECK(text.find("\nmill,Z_2^32,l=32,7,2930,") != std::string::npos);
  CHECK(text.find("\nmill,Z_2^32,l=32,4,3844,") != std::string::npos);
  CHECK(text.find("\ngc:mill,Z_2^32,l=32,0,16384,2,,\n") != std::string::npos);
  CHECK(sh("bench --batch 0").rc != 0);
}

TEST_CASE("verify scopes") {
  auto p = sh("verify --scope meter --scope division");
  CHECK(p.rc == 0);
  CHECK(p.out.find("scope meter: 10 checks, 0 failures") != std::string::npos);
  CHECK(sh("verify --scope e2e --models 5").rc == 0);
  CHECK(sh("verify --scope nonsense").rc != 0);
}

TEST_CASE("gen is deterministic and its output runs") {
  auto a = scratch("gen_a.json"), b = scratch("gen_b.json"), in = scratch("gen_in.json");
  CHECK(sh("gen --kind random --seed 11 --out " + a.string() + " --input-out " + in.string()).rc == 0);
  CHECK(sh("gen --kind random --seed 11 --out " + b.string()).rc == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(sh("run --model " + a.string() + " --input " + in.string()).rc == 0);
  CHECK(sh("gen --kind nonsense --out " + a.string()).rc != 0);
}

TEST_CASE("bad inputs are reported") {
  auto m = models();
  auto bad = scratch("bad_input.json");
  std::ofstream(bad) << "[1, 2]";
  auto p = sh("run --model " + m + "/relu.json --input " + bad.string());
  CHECK(p.rc == 2);
  CHECK(p.out.find("error:") != std::string::npos);
  std::ofstream(bad) << "[1, 2, 3, 4294967296]";
  CHECK(sh("run --model " + m + "/relu.json --input " + bad.string()).rc == 2);
  CHECK(sh("run --model /nonexistent.json --input " + bad.string()).rc == 2);
  CHECK(sh("run --role 1 --model " + m + "/relu.json --input " + bad.string()).rc == 2);
}
