// Acceptance run: one PASS/FAIL line per criterion. Every machine run here
// has the per-transition scheduler checks switched on; criterion 10 also
// requires that none of them reported a violation.
//
//   acceptance                      exit status = number of failed criteria
//   acceptance --expect-fail 6,9    exit 0 iff exactly those criteria fail
#include <chrono>
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lazyconv/bench.hpp"
#include "lazyconv/checker.hpp"
#include "lazyconv/corpus.hpp"
#include "lazyconv/oracle.hpp"

using namespace lazyconv;

namespace {

// Tolerances.
constexpr std::uint64_t kCorpusSeed = 42, kCorpusCount = 500, kCorpusMaxSize = 12;
constexpr std::uint64_t kCheckerFuel = 1000000, kOracleFuel = 100000;
constexpr double kMinDecidedShare = 0.95;
constexpr double kCorpusSeconds = 60.0;
constexpr std::uint64_t kKShortcutMax = 500;
constexpr double kZeroExp2Ratio = 1.25;
const std::vector<std::uint64_t> kZeroExp2Golden = {84, 84, 84};
constexpr double kExp2Exponent = 3.0;
constexpr double kPerfectShareMax = 1.5, kPerfectNoShareMin = 1.7;
constexpr double kPairOrderSpread = 2.0, kPairOrderDrift = 0.10;
constexpr double kPair2Ratio = 4.0;
constexpr double kEvenOddRatio = 2.2;
constexpr std::uint64_t kF4Fuel = 100000000;
constexpr std::size_t kNormalizeTerms = 200;

std::uint64_t g_violations = 0;
std::string g_first_violation;
std::uint64_t g_runs = 0;

void note(const Stats& s) {
  ++g_runs;
  if (s.invariant_violations && g_first_violation.empty()) g_first_violation = s.first_violation;
  g_violations += s.invariant_violations;
}

Options instrumented(Options o = {}) {
  o.check_invariants = true;
  return o;
}

CheckResult check(const GlobalDefs& d, const TermPtr& l, const TermPtr& r, Options o, std::uint64_t fuel) {
  CheckResult res = run_check(d, l, r, instrumented(std::move(o)), fuel);
  note(res.stats);
  return res;
}

CheckResult bench(const std::string& suite, unsigned n, const std::string& config = "",
                  const std::string& variant = "", std::uint64_t fuel = kF4Fuel) {
  for (const BenchCase& c : bench_cases(suite, n))
    if ((config.empty() || c.config == config) && (variant.empty() || c.variant == variant)) {
      CheckResult res = check(bench_defs(), c.lhs, c.rhs, c.opts, fuel);
      if (res.verdict != c.expected) res.verdict = Verdict::UnknownDeadlock;  // flagged as wrong below
      return res;
    }
  throw std::invalid_argument("no bench case " + suite + "/" + config + "/" + variant);
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Outcome {
  bool pass;
  std::string detail;
};

// 1 ---------------------------------------------------------------------------
Outcome oracle_agreement() {
  auto t0 = std::chrono::steady_clock::now();
  auto corpus = gen_corpus(kCorpusSeed, kCorpusCount, kCorpusMaxSize);
  std::size_t decided_checker = 0, both = 0, contradictions = 0;
  for (const auto& p : corpus) {
    CheckResult c = check(*p.defs, p.lhs, p.rhs, {}, kCheckerFuel);
    if (!decided(c.verdict)) continue;
    ++decided_checker;
    OracleResult o = oracle_convertible(*p.defs, p.lhs, p.rhs, kOracleFuel);
    if (!o.decided) continue;
    ++both;
    if ((c.verdict == Verdict::Convertible) != o.convertible) ++contradictions;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double share = double(decided_checker) / corpus.size();
  return {contradictions == 0 && share >= kMinDecidedShare && secs < kCorpusSeconds,
          fmt("%zu pairs, checker decided %zu (%.1f%%), both decided %zu, contradictions %zu, %.2f s",
              corpus.size(), decided_checker, 100 * share, both, contradictions, secs)};
}

// 2 ---------------------------------------------------------------------------
Outcome early_failure() {
  const GlobalDefs& d = bench_defs();
  Machine m(d, instrumented());
  m.init_conv(trivial_problem(parse_term("x (exp2 20)", d), parse_term("y (exp2 20)", d)));
  RunStatus st = m.run(kCheckerFuel);
  note(m.stats());
  if (st != RunStatus::Done) return {false, "run did not finish"};
  bool verdict_ok = !m.bool_of(m.root());
  std::uint64_t arg_steps = 0;
  std::size_t args = 0;
  for (ChannelId side : {m.lhs_channel(), m.rhs_channel()})
    if (const Neutral* n = m.value_of(side)->as<Neutral>())
      for (ChannelId a : n->args) arg_steps += m.stats().eval_steps(a), ++args;
  return {verdict_ok && args == 2 && arg_steps == 0,
          fmt("x (exp2 20) vs y (exp2 20): %s, eval steps on the %zu argument channels = %llu, transitions %llu",
              verdict_ok ? "not convertible" : "CONVERTIBLE", args, (unsigned long long)arg_steps,
              (unsigned long long)m.stats().transitions)};
}

// 3 ---------------------------------------------------------------------------
Outcome k_shortcut() {
  const GlobalDefs& d = bench_defs();
  auto run = [&](unsigned n) {
    return check(d, parse_term("k O (exp2 " + std::to_string(n) + ")", d),
                 parse_term("k O (exp2 " + std::to_string(n + 1) + ")", d), {}, kCheckerFuel);
  };
  CheckResult a = run(20), b = run(40);
  bool ok = a.verdict == Verdict::Convertible && b.verdict == Verdict::Convertible &&
            a.stats.transitions < kKShortcutMax && a.stats.transitions == b.stats.transitions;
  return {ok, fmt("k O (exp2 20|40) vs k O (exp2 21|41): %s, transitions %llu and %llu (limit %llu)",
                  verdict_text(a.verdict).c_str(), (unsigned long long)a.stats.transitions,
                  (unsigned long long)b.stats.transitions, (unsigned long long)kKShortcutMax)};
}

// 4 ---------------------------------------------------------------------------
Outcome zero_exp2() {
  std::vector<std::uint64_t> t;
  bool conv = true;
  for (unsigned n : {10u, 20u, 40u}) {
    CheckResult r = bench("zero-exp2", n);
    conv &= r.verdict == Verdict::Convertible;
    t.push_back(r.stats.transitions);
  }
  bool ok = conv && t[2] <= kZeroExp2Ratio * t[0] && t == kZeroExp2Golden;
  return {ok, fmt("n=10,20,40: transitions %llu %llu %llu (golden %llu %llu %llu), ratio 40/10 = %.2f",
                  (unsigned long long)t[0], (unsigned long long)t[1], (unsigned long long)t[2],
                  (unsigned long long)kZeroExp2Golden[0], (unsigned long long)kZeroExp2Golden[1],
                  (unsigned long long)kZeroExp2Golden[2], double(t[2]) / t[0])};
}

// 5 ---------------------------------------------------------------------------
Outcome exp2_eq() {
  const std::vector<unsigned> ns = {6, 10, 14};
  std::vector<double> t;
  bool conv = true;
  for (unsigned n : ns) {
    CheckResult r = bench("exp2-eq", n);
    conv &= r.verdict == Verdict::Convertible;
    t.push_back(double(r.stats.transitions));
  }
  // C fitted at the smallest size; later points must stay under C n^3.
  double c = t[0] / std::pow(ns[0], kExp2Exponent);
  bool bounded = true;
  for (std::size_t i = 1; i < ns.size(); ++i) bounded &= t[i] <= c * std::pow(ns[i], kExp2Exponent);
  // Least-squares slope of log t against log n, for information.
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) mx += std::log(ns[i]) / 3, my += std::log(t[i]) / 3;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sxy += (std::log(ns[i]) - mx) * (std::log(t[i]) - my);
    sxx += (std::log(ns[i]) - mx) * (std::log(ns[i]) - mx);
  }
  return {conv && bounded, fmt("n=6,10,14: transitions %.0f %.0f %.0f, fitted exponent %.2f (bound %.1f)", t[0],
                               t[1], t[2], sxy / sxx, kExp2Exponent)};
}

// 6 ---------------------------------------------------------------------------
Outcome perfect_sharing() {
  std::vector<double> on, off, bare;
  bool conv = true;
  for (unsigned n = 8; n <= 13; ++n) {
    CheckResult a = bench("perfect", n, "share"), b = bench("perfect", n, "no-share"),
                c = bench("perfect", n, "bare");
    conv &= a.verdict == Verdict::Convertible && b.verdict == Verdict::Convertible &&
            c.verdict == Verdict::Convertible;
    on.push_back(double(a.stats.transitions));
    off.push_back(double(b.stats.transitions));
    bare.push_back(double(c.stats.transitions));
  }
  double max_on = 0, min_off = 1e18, min_bare = 1e18;
  for (std::size_t i = 1; i < on.size(); ++i) {
    max_on = std::max(max_on, on[i] / on[i - 1]);
    if (8 + i >= 10) {
      min_off = std::min(min_off, off[i] / off[i - 1]);
      min_bare = std::min(min_bare, bare[i] / bare[i - 1]);
    }
  }
  bool ok = conv && max_on <= kPerfectShareMax && min_off >= kPerfectNoShareMin;
  return {ok, fmt("n=8..13: sharing on max ratio %.2f (<= %.1f); sharing off min ratio %.2f for n>=10 (>= %.1f); "
                  "[info] sharing off and frozen constants off: min ratio %.2f",
                  max_on, kPerfectShareMax, min_off, kPerfectNoShareMin, min_bare)};
}

// 7 ---------------------------------------------------------------------------
Outcome pair_order() {
  std::vector<double> last, first;
  bool verdicts = true;
  for (unsigned n : {12u, 16u}) {
    CheckResult a = bench("pair-order", n, "", "bool-last"), b = bench("pair-order", n, "", "bool-first");
    verdicts &= a.verdict == Verdict::NotConvertible && b.verdict == Verdict::NotConvertible;
    last.push_back(double(a.stats.transitions));
    first.push_back(double(b.stats.transitions));
  }
  bool spread = true, drift = true;
  for (std::size_t i = 0; i < 2; ++i)
    spread &= std::max(last[i], first[i]) <= kPairOrderSpread * std::min(last[i], first[i]);
  for (const auto& v : {last, first}) drift &= std::abs(v[1] - v[0]) <= kPairOrderDrift * v[0];
  return {verdicts && spread && drift,
          fmt("n=12,16: bool-last %.0f %.0f, bool-first %.0f %.0f transitions, both not convertible: %s", last[0],
              last[1], first[0], first[1], verdicts ? "yes" : "no")};
}

// 8 ---------------------------------------------------------------------------
Outcome pair_defs() {
  CheckResult a = bench("pair-defs", 8, "", "pair2"), b = bench("pair-defs", 12, "", "pair2");
  double ratio = double(b.stats.transitions) / a.stats.transitions;
  bool ok = a.verdict == Verdict::Convertible && b.verdict == Verdict::Convertible && ratio <= kPair2Ratio;
  return {ok, fmt("pair2 (exp2 n) vs MkPair (exp2 n) False: n=8 %llu, n=12 %llu transitions, ratio %.2f (<= %.1f)",
                  (unsigned long long)a.stats.transitions, (unsigned long long)b.stats.transitions, ratio,
                  kPair2Ratio)};
}

// 9 ---------------------------------------------------------------------------
Outcome even_odd() {
  CheckResult a = bench("even-odd", 50), b = bench("even-odd", 100);
  double ratio = double(b.stats.transitions) / a.stats.transitions;
  bool ok = a.verdict == Verdict::Convertible && b.verdict == Verdict::Convertible && ratio <= kEvenOddRatio;
  return {ok, fmt("odd (2n-1) vs even (2n): n=50 %llu, n=100 %llu transitions (%s), ratio %.2f (<= %.1f)",
                  (unsigned long long)a.stats.transitions, (unsigned long long)b.stats.transitions,
                  verdict_text(b.verdict).c_str(), ratio, kEvenOddRatio)};
}

// 10 --------------------------------------------------------------------------
enum class Side { True, False, Diverge };

std::optional<bool> run_connector(Connective op, Side a, Side b, bool* clean) {
  static const GlobalDefs none;
  static const TermPtr omega = parse_term("(\\x. x x) (\\x. x x)", none);
  Machine m(none, instrumented());
  auto side = [&](Side s) {
    return s == Side::Diverge ? m.alloc(EvalP{omega.get(), nullptr}) : m.alloc(LitP{s == Side::True});
  };
  ChannelId ca = side(a), cb = side(b);
  ChannelId root = m.alloc(ConnectP{op, ca, cb});
  m.make_root(root);
  RunStatus st = m.run(400);
  note(m.stats());
  std::optional<bool> out;
  if (st == RunStatus::Done) out = m.bool_of(root);
  // Decided: the losing side must be gone from the queue.
  *clean = m.scheduler().check_all().empty() && (!out || m.scheduler().queue_size() == 0);
  return out;
}

std::size_t connector_tables(std::size_t* cases) {
  constexpr Side T = Side::True, F = Side::False, D = Side::Diverge;
  using R = std::optional<bool>;
  struct Row {
    Connective op;
    Side a, b;
    R want;
    bool any = false;  // either boolean accepted
  };
  const R none;
  std::vector<Row> rows = {
      {Connective::And, T, T, true},      {Connective::And, T, F, false},     {Connective::And, F, T, false},
      {Connective::And, F, F, false},     {Connective::And, F, D, false},     {Connective::And, D, F, false},
      {Connective::And, T, D, none},      {Connective::And, D, T, none},      {Connective::And, D, D, none},
      {Connective::Or, T, T, true},       {Connective::Or, T, F, true},       {Connective::Or, F, T, true},
      {Connective::Or, F, F, false},      {Connective::Or, T, D, true},       {Connective::Or, D, T, true},
      {Connective::Or, F, D, none},       {Connective::Or, D, F, none},       {Connective::Or, D, D, none},
      {Connective::Biased, T, T, true},   {Connective::Biased, T, F, true},   {Connective::Biased, F, T, true},
      {Connective::Biased, F, F, false},  {Connective::Biased, T, D, true},   {Connective::Biased, D, T, true},
      {Connective::Biased, D, F, false},  {Connective::Biased, F, D, none},   {Connective::Biased, D, D, none},
      {Connective::Choice, T, T, true},   {Connective::Choice, F, F, false},  {Connective::Choice, T, D, true},
      {Connective::Choice, F, D, false},  {Connective::Choice, D, T, true},   {Connective::Choice, D, F, false},
      {Connective::Choice, D, D, none},   {Connective::Choice, T, F, none, true},
      {Connective::Choice, F, T, none, true}};
  std::size_t bad = 0;
  for (const Row& r : rows) {
    bool clean = false;
    R got = run_connector(r.op, r.a, r.b, &clean);
    bool ok = r.any ? got.has_value() : got == r.want;
    bad += !(ok && clean);
  }
  *cases = rows.size();
  return bad;
}

// need / finish / unneed against a direct set-based reading of the formulas.
std::size_t scheduler_algebra(std::size_t* cases) {
  std::size_t bad = 0;
  *cases = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(seed);
    const ChannelId n = 10;
    Scheduler s;
    for (ChannelId i = 0; i < n; ++i) s.add_channel();
    s.set_root(0);
    s.push_back(0);
    std::vector<std::set<ChannelId>> w(n);
    std::set<ChannelId> q{0}, fin;
    std::function<void(ChannelId, ChannelId)> unneed = [&](ChannelId a, ChannelId b) {
      if (!w[b].erase(a)) return;
      if (!w[b].empty() || b == 0 || fin.count(b)) return;
      q.erase(b);
      for (ChannelId g = 0; g < n; ++g)
        if (w[g].count(b)) unneed(b, g);
    };
    auto live = [&](ChannelId c) { return !s.is_finished(c) && (c == 0 || !s.waiters(c).empty()); };
    for (int op = 0; op < 100; ++op) {
      ChannelId a = rng() % n, b = rng() % n;
      switch (rng() % 3) {
        case 0:
          if (a == b || !live(a) || s.is_finished(b)) continue;
          s.need(a, b);
          if (w[b].empty()) q.insert(b);
          w[b].insert(a);
          break;
        case 1:
          if (!s.in_queue(a) || a == 0) continue;
          for (ChannelId d : std::vector<ChannelId>(s.waits_on(a))) s.unneed(a, d), unneed(a, d);
          s.finish(a);
          q.erase(a);
          for (ChannelId x : w[a]) q.insert(x);
          w[a].clear();
          fin.insert(a);
          break;
        default: {
          if (s.waits_on(a).empty()) continue;
          ChannelId d = s.waits_on(a)[rng() % s.waits_on(a).size()];
          s.unneed(a, d);
          unneed(a, d);
        }
      }
      ++*cases;
      auto qc = s.queue_contents();
      bool ok = std::set<ChannelId>(qc.begin(), qc.end()) == q && s.check_all().empty();
      for (ChannelId c = 0; c < n; ++c) {
        const auto& wc = s.waiters(c);
        ok &= std::set<ChannelId>(wc.begin(), wc.end()) == w[c];
      }
      bad += !ok;
    }
  }
  return bad;
}

Outcome connectors_and_scheduler() {
  std::size_t conn_cases = 0, sched_cases = 0;
  std::size_t conn_bad = connector_tables(&conn_cases);
  std::size_t sched_bad = scheduler_algebra(&sched_cases);
  return {conn_bad == 0 && sched_bad == 0,
          fmt("connector rows %zu/%zu, scheduler operations %zu/%zu agree with the formulas", conn_cases - conn_bad,
              conn_cases, sched_cases - sched_bad, sched_cases)};
}

// 11 --------------------------------------------------------------------------
Outcome normalizer_goldens() {
  std::size_t agree = 0, tried = 0;
  for (std::uint64_t seed = 42; tried < kNormalizeTerms; ++seed) {
    for (const auto& p : gen_corpus(seed, 100, kCorpusMaxSize)) {
      if (tried == kNormalizeTerms) break;
      NaiveResult ref = normalize_naive(*p.defs, p.lhs, kOracleFuel);
      if (ref.out_of_fuel()) continue;
      ++tried;
      NormalizeResult got = normalize(*p.defs, p.lhs, instrumented(), kCheckerFuel);
      note(got.stats);
      agree += got.term && alpha_equal(got.term, ref.term);
    }
  }
  // (\f. g f f) (\x. t): one body channel for the closure, and its step
  // count equals that of a single use.
  const GlobalDefs& d = bench_defs();
  auto body = [&](const char* src, std::size_t* bodies) {
    Machine m(d, instrumented());
    m.init_normalize(parse_term(src, d));
    m.run(kCheckerFuel);
    note(m.stats());
    std::set<ChannelId> chans;
    for (ChannelId c = 0; c < m.channel_count(); ++c)
      if (m.payload_kind(c) == PayloadKind::Value)
        if (auto cl = m.value_of(c)->as<Closure>(); cl && cl->lam->binder == "x") chans.insert(cl->body);
    std::uint64_t steps = 0;
    for (ChannelId b : chans) steps += m.stats().eval_steps(b);
    *bodies = chans.size();
    return steps;
  };
  std::size_t b1 = 0, b2 = 0;
  std::uint64_t once = body("(\\f. g f) (\\x. plus 3 x)", &b1);
  std::uint64_t twice = body("(\\f. g f f) (\\x. plus 3 x)", &b2);
  bool shared = b1 == 1 && b2 == 1 && once > 0 && once == twice;
  return {agree == tried && shared,
          fmt("%zu/%zu corpus terms match the reference normal form; shared closure: %zu body channel, %llu steps "
              "(single use %llu)",
              agree, tried, b2, (unsigned long long)twice, (unsigned long long)once)};
}

// 12 --------------------------------------------------------------------------
Outcome f4_chain() {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult r = bench("f4-chain", 30, "", "", kF4Fuel);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {r.verdict == Verdict::Convertible,
          fmt("30-deep f4 chain: %s in %llu transitions (fuel %llu), %.1f s", verdict_text(r.verdict).c_str(),
              (unsigned long long)r.stats.transitions, (unsigned long long)kF4Fuel, secs)};
}

std::set<int> parse_list(const char* s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expect_fail;
  bool strict_expectation = false;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--expect-fail") && i + 1 < argc) {
      expect_fail = parse_list(argv[++i]);
      strict_expectation = true;
    } else {
      std::fprintf(stderr, "usage: %s [--expect-fail N,M,...]\n", argv[0]);
      return 64;
    }
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // 10 runs last so that it can count violations from every other run.
  std::vector<Criterion> order = {
      {1, "oracle agreement", oracle_agreement},
      {2, "early failure without evaluation", early_failure},
      {3, "k shortcut", k_shortcut},
      {4, "zero/exp2 near-constant cost", zero_exp2},
      {5, "exp2 argument shortcut polynomial", exp2_eq},
      {6, "conv-process sharing", perfect_sharing},
      {7, "argument-order insensitivity", pair_order},
      {8, "pair1/pair2 refolding", pair_defs},
      {9, "even/odd linear growth", even_odd},
      {11, "normalizer goldens", normalizer_goldens},
      {12, "f4 chain terminates", f4_chain},
      {10, "connectors and scheduler", connectors_and_scheduler},
  };
  std::vector<std::pair<int, std::string>> lines;
  std::set<int> failed;
  for (const auto& c : order) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (c.id == 10) {
      o.pass = o.pass && g_violations == 0;
      o.detail += fmt("; invariant violations over %llu instrumented runs: %llu", (unsigned long long)g_runs,
                      (unsigned long long)g_violations);
      if (g_violations) o.detail += " (first: " + g_first_violation + ")";
    }
    if (!o.pass) failed.insert(c.id);
    lines.emplace_back(c.id, fmt("%s %2d %s: ", o.pass ? "PASS" : "FAIL", c.id, c.name) + o.detail);
    std::fprintf(stderr, "criterion %d done\n", c.id);
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%zu/12 criteria passed\n", 12 - failed.size());
  if (strict_expectation) {
    if (failed == expect_fail) return 0;
    std::printf("failing set differs from the expected one\n");
    return 1;
  }
  return static_cast<int>(failed.size());
}
