#pragma once

#include <optional>
#include <string>
#include <vector>

#include "s2pc/ring.hpp"

namespace s2pc {

// One benchmark line. Garbled-circuit reference rows carry only the analytic
// figure from the closed-form cost and the round count.
struct BenchRow {
  std::string protocol;
  std::string ring;
  std::string bits_param;
  unsigned m = 0;
  u64 analytic_bits = 0;
  u64 rounds = 0;
  std::optional<u64> actual_bits;
  std::optional<double> wall_ms;
};

extern const char* const kBenchCsvHeader;

// Analytic and actual costs are per element of a batch of `batch` elements.
std::vector<BenchRow> bench_rows(size_t batch = 1);
std::string bench_csv(const std::vector<BenchRow>& rows);

struct VerifyReport {
  std::string scope;
  u64 checks = 0;
  u64 failures = 0;
};

// Scopes: division, protocols, meter, e2e.
VerifyReport verify_scope(const std::string& scope, size_t e2e_models = 100, u64 seed = 1);

int cli_main(int argc, char** argv);

}  // namespace s2pc
