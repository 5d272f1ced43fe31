#include "ctp/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "ctp/engine.hpp"
#include "ctp/errors.hpp"
#include "ctp/netfile.hpp"
#include "ctp/oracle.hpp"

namespace ctp {
namespace {

constexpr double kCheckRel = 1e-9;
constexpr double kCheckAbs = 1e-15;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto b = part.find_first_not_of(" \t");
    const auto e = part.find_last_not_of(" \t");
    if (b == std::string::npos) throw InputError("empty name in list '" + text + "'");
    out.push_back(part.substr(b, e - b + 1));
  }
  return out;
}

Variable resolve(const SemiBayesNet& n, const std::string& name) {
  auto v = n.find(name);
  if (!v) throw InputError("unknown variable '" + name + "'");
  return *v;
}

std::vector<Variable> parse_targets(const SemiBayesNet& n, const std::string& text) {
  std::vector<Variable> out;
  for (const auto& name : split_list(text)) {
    auto v = resolve(n, name);
    if (std::find(out.begin(), out.end(), v) != out.end())
      throw InputError("target '" + name + "' listed twice");
    out.push_back(v);
  }
  return out;
}

Evidence parse_evidence(const SemiBayesNet& n, const std::string& text) {
  Evidence out;
  if (text.empty()) return out;
  for (const auto& pair : split_list(text)) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw InputError("evidence '" + pair + "' is not of the form name=state");
    const auto v = resolve(n, pair.substr(0, eq));
    const auto state = v.state_index(pair.substr(eq + 1));
    if (!state) throw InputError("'" + v.name() + "' has no state '" + pair.substr(eq + 1) + "'");
    if (!out.emplace(v, *state).second) throw InputError("'" + v.name() + "' observed twice");
  }
  return out;
}

std::string format_value(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// One line per assignment, first target slowest.
void print_table(std::ostream& out, const Potential& p, const std::vector<Variable>& order) {
  const auto values = p.values_in_layout(order);
  std::vector<std::size_t> counter(order.size(), 0);
  for (double x : values) {
    std::string line;
    for (std::size_t i = 0; i < order.size(); ++i)
      line += (i ? " " : "") + order[i].name() + "=" + order[i].states()[counter[i]];
    if (order.empty()) line = "()";
    out << line << '\t' << format_value(x) << '\n';
    for (std::size_t d = order.size(); d-- > 0;) {
      if (++counter[d] < order[d].cardinality()) break;
      counter[d] = 0;
    }
  }
}

std::string header(const std::vector<Variable>& targets, const Evidence& evidence, bool posterior) {
  std::string s = "# P(" + join_names(targets, ", ");
  if (!evidence.empty()) s += (posterior ? " | " : ", ") + format_evidence(evidence, ", ");
  return s + ")";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact inference in Bayesian nets by component tree propagation", "ctp"};
  std::string net_path, targets_text, evidence_text, strategy_name = "default";
  bool posterior = false, trace = false, check = false;
  std::uint64_t seed = 0;
  app.add_option("--net", net_path, "Net file")->required();
  app.add_option("--target", targets_text, "Comma-separated query variables")->required();
  app.add_option("--evidence", evidence_text, "Comma-separated name=state observations");
  app.add_flag("--posterior", posterior, "Normalize to P(targets | evidence)");
  app.add_flag("--trace", trace, "Print the component tree and reduction steps");
  app.add_flag("--check", check, "Cross-check the answer against an independent oracle");
  app.add_option("--strategy", strategy_name, "Leaf and laden-node choice")
      ->check(CLI::IsMember({"default", "first-leaf", "random"}));
  app.add_option("--seed", seed, "Seed for --strategy random");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
  }

  try {
    const auto net = load_net(net_path);
    const auto targets = parse_targets(net, targets_text);
    const auto evidence = parse_evidence(net, evidence_text);
    if (!net.unspecified_roots().empty())
      err << "warning: unspecified roots {" << join_names(net.unspecified_roots())
          << "}; the answer is a potential, not a probability\n";

    EngineConfig config;
    if (strategy_name == "first-leaf")
      config.strategy = make_first_leaf_strategy();
    else if (strategy_name == "random")
      config.strategy = make_random_strategy(seed);
    config.record_trace = trace;
    config.warn = [&err](const std::string& m) { err << "warning: " << m << '\n'; };
    Engine engine(config);

    const auto q = make_query(net, targets, evidence);
    const auto answer = posterior ? engine.posterior(net, targets, evidence) : engine.answer(net, q);

    out << header(targets, evidence, posterior) << '\n';
    print_table(out, answer, targets);
    if (trace) out << format_trace(engine.trace());

    if (check) {
      Potential expected;
      std::string oracle = "brute force";
      try {
        expected = brute_force_marginal(net, q);
      } catch (const StateSpaceTooLarge&) {
        oracle = "variable elimination";
        expected = variable_elimination_marginal(net, q, min_degree_order(net, q));
      }
      if (posterior) expected = normalize(expected);
      if (approx_equal(answer, expected, kCheckRel, kCheckAbs)) {
        out << "oracle check: PASS (" << oracle << ")\n";
      } else {
        out << "oracle check: FAIL (" << oracle << ", max relative difference "
            << format_value(max_relative_difference(answer, expected)) << ")\n";
        return kExitOracleMismatch;
      }
    }
    return kExitOk;
  } catch (const ZeroProbabilityEvidence& e) {
    err << "error: " << e.what() << '\n';
    return kExitZeroEvidence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace ctp
