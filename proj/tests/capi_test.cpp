#include <gtest/gtest.h>

#include <cstdio>
#include <string>
#include <vector>

#include "lazyconv.h"

namespace {

struct Defs {
  lc_defs* d = nullptr;
  ~Defs() { lc_defs_free(d); }
};

}  // namespace

TEST(CApi, CheckAndStats) {
  Defs defs;
  ASSERT_EQ(lc_defs_bench(&defs.d), LC_OK);
  lc_options o;
  lc_options_default(&o);
  EXPECT_EQ(o.frozen, 1);
  EXPECT_EQ(o.eta, 0);
  lc_result* r = nullptr;
  ASSERT_EQ(lc_check(defs.d, "exp2 4", "plus 8 8", &o, 1000000, nullptr, nullptr, &r), LC_OK);
  EXPECT_EQ(lc_result_verdict(r), LC_CONVERTIBLE);
  uint64_t tr = 0;
  EXPECT_EQ(lc_result_stat(r, "transitions", &tr), LC_OK);
  EXPECT_GT(tr, 0u);
  EXPECT_EQ(lc_result_stat(r, "bogus", &tr), LC_ERR_ARG);
  EXPECT_NE(std::string(lc_last_error()).find("bogus"), std::string::npos);
  char* text = lc_result_stats_text(r);
  EXPECT_NE(std::string(text).find("transitions: " + std::to_string(tr)), std::string::npos);
  lc_string_free(text);
  lc_result_free(r);
}

TEST(CApi, ArgumentChannelsOfEarlyFailureAreUntouched) {
  Defs defs;
  ASSERT_EQ(lc_defs_bench(&defs.d), LC_OK);
  lc_result* r = nullptr;
  ASSERT_EQ(lc_check(defs.d, "x (exp2 20)", "y (exp2 20)", nullptr, 100000, nullptr, nullptr, &r), LC_OK);
  EXPECT_EQ(lc_result_verdict(r), LC_NOT_CONVERTIBLE);
  uint64_t total = 0;
  lc_result_stat(r, "eval_steps_total", &total);
  EXPECT_LT(total, 20u);
  EXPECT_NE(lc_result_lhs_channel(r), lc_result_rhs_channel(r));
  lc_result_free(r);
}

TEST(CApi, TraceCallback) {
  Defs defs;
  ASSERT_EQ(lc_defs_bench(&defs.d), LC_OK);
  std::vector<std::string> lines;
  auto sink = [](const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); };
  lc_result* r = nullptr;
  ASSERT_EQ(lc_check(defs.d, "exp2 3", "double (exp2 2)", nullptr, 100000, sink, &lines, &r), LC_OK);
  lc_result_free(r);
  ASSERT_FALSE(lines.empty());
  EXPECT_EQ(lines[0].rfind("step=", 0), 0u);
}

TEST(CApi, ErrorCodes) {
  lc_defs* d = nullptr;
  EXPECT_EQ(lc_defs_parse("data X := ;", &d), LC_ERR_PARSE);
  EXPECT_EQ(d, nullptr);
  EXPECT_STRNE(lc_last_error(), "");
  EXPECT_EQ(lc_defs_load("/definitely/not/here.defs", &d), LC_ERR_IO);
  EXPECT_EQ(lc_defs_parse(nullptr, &d), LC_ERR_ARG);
  ASSERT_EQ(lc_defs_parse("data Bool := True 0 | False 0;", &d), LC_OK);
  lc_result* r = nullptr;
  EXPECT_EQ(lc_check(d, "(", "x", nullptr, 10, nullptr, nullptr, &r), LC_ERR_PARSE);
  EXPECT_EQ(lc_check(d, "match \\x. x with True -> True | False -> False end", "True", nullptr, 1000, nullptr,
                     nullptr, &r),
            LC_ERR_MACHINE);
  EXPECT_EQ(lc_check(d, "x", "x", nullptr, 10, nullptr, nullptr, nullptr), LC_ERR_ARG);
  lc_defs_free(d);
}

TEST(CApi, LoadFromFile) {
  std::string path = ::testing::TempDir() + "capi_defs.txt";
  FILE* f = std::fopen(path.c_str(), "w");
  ASSERT_TRUE(f);
  std::fputs("data Nat := O 0 | S 1;\ndef two := S (S O);\n", f);
  std::fclose(f);
  Defs defs;
  ASSERT_EQ(lc_defs_load(path.c_str(), &defs.d), LC_OK);
  char* nf = nullptr;
  ASSERT_EQ(lc_normalize(defs.d, "(\\x. x) two", nullptr, 1000, &nf, nullptr), LC_OK);
  EXPECT_STREQ(nf, "S (S O)");
  lc_string_free(nf);
  ASSERT_EQ(lc_oracle_normalize(defs.d, "two", 1000, &nf), LC_OK);
  EXPECT_STREQ(nf, "S (S O)");
  lc_string_free(nf);
}

TEST(CApi, NormalizeOutOfFuel) {
  Defs defs;
  ASSERT_EQ(lc_defs_parse("", &defs.d), LC_OK);
  char* nf = reinterpret_cast<char*>(1);
  lc_result* r = nullptr;
  ASSERT_EQ(lc_normalize(defs.d, "(\\x. x x) (\\x. x x)", nullptr, 100, &nf, &r), LC_OK);
  EXPECT_EQ(nf, nullptr);
  EXPECT_EQ(lc_result_verdict(r), LC_UNKNOWN_FUEL);
  lc_result_free(r);
}

TEST(CApi, OracleCheck) {
  Defs defs;
  ASSERT_EQ(lc_defs_bench(&defs.d), LC_OK);
  int decided = 0, conv = 0;
  ASSERT_EQ(lc_oracle_check(defs.d, "exp2 3", "8", 100000, &decided, &conv), LC_OK);
  EXPECT_EQ(decided, 1);
  EXPECT_EQ(conv, 1);
}

TEST(CApi, BenchRows) {
  ASSERT_EQ(lc_bench_suite_count(), 8u);
  EXPECT_STREQ(lc_bench_suite_name(0), "exp2-eq");
  EXPECT_EQ(lc_bench_suite_name(8), nullptr);
  struct Seen {
    int rows = 0;
    bool all_match = true;
  } seen;
  auto cb = [](const lc_bench_row* row, void* user) {
    auto* s = static_cast<Seen*>(user);
    ++s->rows;
    s->all_match &= row->verdict == row->expected;
  };
  ASSERT_EQ(lc_bench_run("pair-order", 8, 1000000, cb, &seen), LC_OK);
  EXPECT_EQ(seen.rows, 2);
  EXPECT_TRUE(seen.all_match);
  EXPECT_EQ(lc_bench_run("nope", 8, 1000, cb, &seen), LC_ERR_ARG);
  EXPECT_STREQ(lc_verdict_text(LC_UNKNOWN_DEADLOCK), "unknown (deadlock)");
}
