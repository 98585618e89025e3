#pragma once

#include <string>
#include <vector>

#include "lazyconv/checker.hpp"

namespace lazyconv {

/// The benchmark definitions file (share/bench.defs), compiled in.
const char* bench_defs_text();
const GlobalDefs& bench_defs();

/// S (S ... O) with n successors.
TermPtr nat_term(unsigned n);

struct BenchCase {
  std::string suite;
  unsigned n = 0;
  std::string config;   // option configuration tag
  std::string variant;  // sub-row tag, "-" when the suite has one row per size
  TermPtr lhs, rhs;
  Options opts;
  Verdict expected = Verdict::Convertible;
};

const std::vector<std::string>& bench_suites();
bool is_bench_suite(const std::string& name);
std::vector<unsigned> bench_default_sizes(const std::string& suite);

/// Every configuration and variant of `suite` at size n. Throws
/// std::invalid_argument on an unknown suite.
std::vector<BenchCase> bench_cases(const std::string& suite, unsigned n);

}  // namespace lazyconv
