// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "ctp/engine.hpp"
#include "ctp/errors.hpp"
#include "ctp/oracle.hpp"
#include "test_nets.hpp"

using namespace ctp;

namespace {

enum { A, B, C, D, E, F, G, H };

struct Outcome {
  bool pass = true;
  std::string detail;
};

// No-fill bookkeeping shared by every suite that runs the engine.
struct FillLedger {
  std::size_t checks = 0;
  std::size_t violations = 0;
} ledger;

Potential run_engine(const SemiBayesNet& n, const Query& q, std::shared_ptr<PickStrategy> s = nullptr,
                     EngineStats* stats = nullptr) {
  EngineConfig config;
  config.strategy = std::move(s);
  Engine engine(config);
  try {
    auto p = engine.answer(n, q);
    ledger.checks += engine.stats().separator_checks;
    if (stats) *stats = engine.stats();
    return p;
  } catch (const InternalError& e) {
    if (std::string(e.what()).find("fill edge") != std::string::npos ||
        std::string(e.what()).find("not married") != std::string::npos)
      ++ledger.violations;
    throw;
  }
}

std::vector<std::string> described(const SemiBayesNet& n) {
  std::vector<std::string> out;
  for (const auto& item : n.items()) out.push_back(item->describe());
  return out;
}

template <class T>
std::vector<T> random_subset(std::mt19937_64& rng, std::vector<T> pool, std::size_t max) {
  std::shuffle(pool.begin(), pool.end(), rng);
  const auto k = std::uniform_int_distribution<std::size_t>(0, std::min(max, pool.size()))(rng);
  pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end());
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

// Random net with a complete separator, a decomposition at it and the two
// induced nets.
struct Split {
  SemiBayesNet n, n1, n2;
  Decomposition d;
};

Split random_split(std::mt19937_64& rng, const testing::RandomNetOptions& opt) {
  for (;;) {
    auto n = testing::random_net(rng, opt);
    const auto seps = testing::complete_separators(n);
    if (seps.empty()) continue;
    const auto& s = seps[std::uniform_int_distribution<std::size_t>(0, seps.size() - 1)(rng)];
    const auto outside = vset::minus(n.vertex_ids(), s);
    const auto anchor = outside[std::uniform_int_distribution<std::size_t>(0, outside.size() - 1)(rng)];
    const auto d = decompose_at(n.moral_graph(), s, anchor);
    auto [n1, n2] = induced_decomposition(n, d);
    return Split{std::move(n), std::move(n1), std::move(n2), d};
  }
}

testing::RandomNetOptions semi_bayesian_family() {
  testing::RandomNetOptions opt;
  opt.min_vars = 4;
  opt.max_vars = 10;
  opt.unspecified_root_probability = 0.25;
  opt.parameter_probability = 0.2;
  return opt;
}

// ---------------------------------------------------------------------------

Outcome ac1() {
  Outcome o;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) o.pass = false, o.detail += what + "; ";
  };
  const auto n = testing::load_net1();
  const auto m = n.moral_graph();
  std::set<Edge> added;
  for (const auto& e : m.edges())
    if (!std::count(n.dag().arcs().begin(), n.dag().arcs().end(), e) &&
        !std::count(n.dag().arcs().begin(), n.dag().arcs().end(), Edge{e.second, e.first}))
      added.insert(e);
  expect(added == std::set<Edge>{{A, G}, {C, H}}, "moral graph adds other edges");

  const auto seps = nmc_separators(m, {}, {});
  expect(std::set<VertexSet>(seps.begin(), seps.end()) == std::set<VertexSet>{{C, H}, {A, B}, {A, G}},
         "NMC separators differ");

  const auto [net2, net3] = induced_decomposition(n, decompose_at(m, {A, B}, C));
  expect(described(net2) == std::vector<std::string>{"P(a|c)", "P(c)", "P(d|c,h)", "P(h|b)"},
         "net2 items differ");
  expect(described(net3) == std::vector<std::string>{"P(b|a,g)", "P(e|a)", "P(f|e)", "P(g|f)"},
         "net3 items differ");

  const auto tree = build_component_tree(n, make_query(n, {}));
  const std::vector<std::vector<std::string>> items{
      {"P(a|c)", "P(h|b)"}, {"P(b|a,g)"}, {"P(e|a)", "P(f|e)", "P(g|f)"}, {"P(c)", "P(d|c,h)"}};
  bool nodes_ok = tree.nodes.size() == 4;
  for (std::size_t i = 0; nodes_ok && i < 4; ++i) nodes_ok = described(tree.nodes[i]) == items[i];
  expect(nodes_ok, "component items differ");
  // chain net8 - net9 - net10 - net11
  expect(tree.neighbors(3) == std::vector<std::size_t>{0} &&
             tree.neighbors(0) == std::vector<std::size_t>{1, 3} &&
             tree.neighbors(1) == std::vector<std::size_t>{0, 2} &&
             tree.neighbors(2) == std::vector<std::size_t>{1},
         "tree is not the chain");
  if (o.pass) o.detail = "moral edges, 3 separators, net2/net3 split and 4-node chain match";
  return o;
}

Outcome ac2() {
  const auto n = testing::load_net1();
  const auto q = make_query(n, {n.variable(D), n.variable(E)});
  std::ifstream in(testing::source_path("tests/golden/net1_trace.txt"));
  std::ostringstream golden;
  golden << in.rdbuf();
  EngineConfig config;
  config.strategy = make_scripted_strategy({"C2", "C1'", "C0'"});
  config.record_trace = true;
  Engine engine(config);
  const auto p = engine.answer(n, q);
  ledger.checks += engine.stats().separator_checks;
  const auto trace = format_trace(engine.trace());
  Outcome o;
  o.pass = !golden.str().empty() && trace == golden.str() &&
           approx_equal(p, brute_force_marginal(n, q), 1e-12);
  o.detail = o.pass ? "trace C2 -> C1' -> C0' -> C3' is byte-identical to the golden file"
                    : "trace differs:\n" + trace;
  return o;
}

Outcome ac3() {
  std::mt19937_64 rng(3);
  const auto opt = semi_bayesian_family();
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto sp = random_split(rng, opt);
    const auto s = sp.n.to_variables(sp.d.separator);
    const auto x = random_subset(rng, sp.n.to_variables(vset::minus(sp.d.part1, sp.d.separator)), 3);
    const auto z = random_subset(rng, s, s.size());
    const auto y = random_subset(rng, sp.n.to_variables(vset::minus(sp.d.part2, sp.d.separator)), 3);

    const auto lhs = brute_force_marginal(sp.n, make_query(sp.n, scope_union(scope_union(x, z), y)));
    const auto p1 = brute_force_marginal(sp.n1, make_query(sp.n1, scope_union(x, s)));
    const auto p2 = brute_force_marginal(sp.n2, make_query(sp.n2, scope_union(s, y)));
    const auto rhs = sum_out(multiply(p1, p2), scope_difference(s, z));
    worst = std::max(worst, max_relative_difference(lhs, rhs));
    if (!approx_equal(lhs, rhs, 1e-12))
      return {false, "trial " + std::to_string(trial) + ": sides differ by " + fmt("%.3g", worst)};
  }
  return {true, "200 decompositions, max relative difference " + fmt("%.3g", worst)};
}

Outcome ac4() {
  std::mt19937_64 rng(4);
  const auto opt = semi_bayesian_family();
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto sp = random_split(rng, opt);
    const auto q = testing::random_query(rng, sp.n);
    const auto iq = split_query(q, sp.d, sp.n1, sp.n2);
    const auto& sq = iq.split;
    // reduce one part into the other, in either direction
    const bool first_into_second = trial % 2 == 0;
    const auto& reduced = first_into_second ? sp.n1 : sp.n2;
    const auto& kept = first_into_second ? sp.n2 : sp.n1;
    const auto& reduced_query = first_into_second ? iq.first : iq.second;

    const auto f = extend_with_evidence_indicator(brute_force_marginal(reduced, reduced_query), sq.ys);
    const auto aux = make_auxiliary(1000, "aux");
    const auto grown = append_answer(kept, sp.d.separator, f, aux);
    auto targets = scope_union(first_into_second ? sq.x2 : sq.x1, sq.xs);
    auto evidence = first_into_second ? sq.y_minus_1 : sq.y_minus_2;
    evidence.emplace(aux, 0);
    const auto rhs = brute_force_marginal(grown, make_query(grown, targets, evidence));
    const auto lhs = brute_force_marginal(sp.n, q);
    worst = std::max(worst, max_relative_difference(lhs, rhs));
    if (!approx_equal(lhs, rhs, 1e-12))
      return {false, "trial " + std::to_string(trial) + ": differ by " + fmt("%.3g", worst)};
  }
  return {true, "200 single reductions, max relative difference " + fmt("%.3g", worst)};
}

Outcome ac5() {
  std::mt19937_64 rng(5);
  testing::RandomNetOptions opt;
  opt.min_vars = 4;
  opt.max_vars = 12;
  double worst = 0.0, worst_sum = 0.0;
  std::size_t serial = 0, laden = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = testing::random_net(rng, opt);
    const auto q = testing::random_query(rng, n, 3, 3);
    EngineStats stats;
    const auto p = run_engine(n, q, nullptr, &stats);
    serial += stats.serial_steps;
    laden += stats.laden_splits;
    const auto expected = brute_force_marginal(n, q);
    worst = std::max(worst, max_relative_difference(p, expected));
    if (!approx_equal(p, expected, 1e-9, 1e-15))
      return {false, "trial " + std::to_string(trial) + " query " + format_query(q)};
    Engine engine;
    const auto post = engine.posterior(n, q.targets, q.evidence);
    ledger.checks += engine.stats().separator_checks;
    worst_sum = std::max(worst_sum, std::abs(post.total() - 1.0));
    if (std::abs(post.total() - 1.0) > 1e-12)
      return {false, "posterior sums to " + fmt("%.17g", post.total())};
  }
  return {true, "200 nets, max relative difference " + fmt("%.3g", worst) + ", posterior sum error " +
                    fmt("%.3g", worst_sum) + ", " + std::to_string(serial) + " serial steps, " +
                    std::to_string(laden) + " laden splits"};
}

Outcome ac7() {
  std::mt19937_64 rng(7);
  testing::RandomNetOptions opt;
  opt.min_vars = 8;
  opt.max_vars = 12;
  opt.unspecified_root_probability = 0.2;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = testing::random_net(rng, opt);
    const auto q = testing::random_query(rng, n);
    std::vector<Potential> answers;
    for (std::uint64_t k = 0; k < 5; ++k)
      answers.push_back(run_engine(n, q, make_random_strategy(rng())));
    for (const auto& a : answers) {
      worst = std::max(worst, max_relative_difference(a, answers[0]));
      if (!approx_equal(a, answers[0], 1e-9))
        return {false, "net " + std::to_string(trial) + ": strategies disagree"};
    }
  }
  return {true, "20 nets x 5 random strategies, max relative spread " + fmt("%.3g", worst)};
}

Outcome ac8(double* engine_seconds) {
  std::mt19937_64 rng(8);
  testing::RandomNetOptions opt;
  opt.min_vars = 30;
  opt.max_vars = 30;
  opt.window = 3;
  opt.max_parents = 2;
  const auto n = testing::random_net(rng, opt);
  const auto q = testing::random_query(rng, n, 2, 3);
  const auto start = std::chrono::steady_clock::now();
  EngineStats stats;
  const auto p = run_engine(n, q, nullptr, &stats);
  *engine_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto expected = variable_elimination_marginal(n, q, min_degree_order(n, q));
  const bool ok = approx_equal(p, expected, 1e-9, 1e-15) && *engine_seconds < 10.0;
  return {ok, "30 variables, query " + format_query(q) + ", engine " + fmt("%.3f", *engine_seconds) +
                  " s, max relative difference " + fmt("%.3g", max_relative_difference(p, expected)) +
                  ", " + std::to_string(stats.serial_steps) + " serial steps"};
}

Outcome ac9() {
  const auto n = testing::load_net1();
  const auto [net2, net3] = induced_decomposition(n, decompose_at(n.moral_graph(), {A, B}, C));
  const auto a = n.variable(A), b = n.variable(B), d = n.variable(D), e = n.variable(E);
  const auto p2 = brute_force_marginal(net2, make_query(net2, {d, a, b}));
  const auto p3 = brute_force_marginal(net3, make_query(net3, {a, b, e}));
  const auto rhs = sum_out(multiply(p2, p3), {b});
  const auto lhs = brute_force_marginal(n, make_query(n, {d, a, e}));
  // P(d,a,e) enumerated independently, in scope order a, d, e
  const double frozen[8] = {0.12656250000000002, 0.04072931249999999, 0.0871875, 0.030520687500000004,
                            0.057391, 0.2231664, 0.085609, 0.34883359999999997};
  bool frozen_ok = true;
  for (std::size_t i = 0; i < 8; ++i)
    frozen_ok = frozen_ok && std::abs(rhs.values()[i] - frozen[i]) <= 1e-12 * frozen[i];
  const bool ok = approx_equal(lhs, rhs, 1e-12) && frozen_ok;
  return {ok, "sum over b of P_net2(d,a,b) P_net3(a,b,e) = P_net1(d,a,e), max relative difference " +
                  fmt("%.3g", max_relative_difference(lhs, rhs))};
}

struct Criterion {
  std::string id;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  double ac8_engine = 0.0;
  const std::vector<Criterion> criteria{
      {"AC1 structural reproduction of net1", 1.0, ac1},
      {"AC2 worked trace", 1.0, ac2},
      {"AC3 decomposition identity", 30.0, ac3},
      {"AC4 serial reduction identity", 30.0, ac4},
      {"AC5 end-to-end oracle equivalence", 60.0, ac5},
      {"AC7 strategy invariance", 60.0, ac7},
      {"AC8 medium-scale cross-check", 60.0, [&] { return ac8(&ac8_engine); }},
      {"AC9 net1 decomposition identity", 1.0, ac9},
  };
  bool all = true;
  auto report = [&](const std::string& id, bool pass, double secs, const std::string& detail) {
    std::printf("%s %s (%.3f s): %s\n", pass ? "PASS" : "FAIL", id.c_str(), secs, detail.c_str());
    all = all && pass;
  };
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_seconds) {
      o.pass = false;
      o.detail += " (over the " + fmt("%.0f", c.budget_seconds) + " s budget)";
    }
    report(c.id, o.pass, secs, o.detail);
    std::fflush(stdout);
  }
  report("AC6 no fill edges", ledger.checks > 0 && ledger.violations == 0, 0.0,
         std::to_string(ledger.checks) + " separator completeness checks, " +
             std::to_string(ledger.violations) + " violations");
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
