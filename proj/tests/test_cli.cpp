#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "ctp/cli.hpp"
#include "ctp/errors.hpp"
#include "ctp/netfile.hpp"
#include "ctp/oracle.hpp"
#include "test_nets.hpp"

using namespace ctp;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ctp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string net1_path() { return testing::source_path("nets/net1.net"); }

std::string write_temp(const std::string& text) {
  static int counter = 0;
  const std::string path = "ctp_cli_test_" + std::to_string(counter++) + ".net";
  std::ofstream(path) << text;
  return path;
}

void check_parse_error(const std::string& text, std::size_t line, const std::string& fragment) {
  try {
    parse_net(text);
    FAIL("expected a parse error for: " << text);
  } catch (const ParseError& e) {
    CHECK(e.line() == line);
    CHECK(std::string(e.what()).find(fragment) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("parse the net1 fixture") {
  const auto n = testing::load_net1();
  CHECK(n.variables().size() == 8);
  CHECK(n.is_bayesian());
  CHECK(n.variable(3).name() == "d");
  CHECK(n.item_for(3)->describe() == "P(d|c,h)");
  const auto& pd = n.item_for(3)->table;
  CHECK(pd.at({{n.variable(2), 1}, {n.variable(7), 0}, {n.variable(3), 1}}) == 0.3);
}

TEST_CASE("parse errors cite the line") {
  check_parse_error("", 1, "empty net");
  check_parse_error("# only a comment\n", 1, "empty net");
  check_parse_error("variable a { a0, a1 }\ncpt a { 0.5, 0.6 }\n", 2, "sums to 1.1");
  check_parse_error("variable a { a0, a1 }\ncpt a | zz { 0.5, 0.5 }\n", 2, "unknown variable 'zz'");
  check_parse_error("variable a { a0, a1 }\n\ncpt a { 0.5, 0.25, 0.25 }\n", 3, "needs 2");
  check_parse_error("variable a { a0, a1 }\ncpt a { -0.5, 1.5 }\n", 2, "negative");
  check_parse_error("variable a { a0, a1 }\nvariable a { x, y }\n", 2, "declared twice");
  check_parse_error("variable a { a0, a1 }\ncpt a { 0.5, 0.5 }\ncpt a { 0.5, 0.5 }\n", 3, "second cpt");
  check_parse_error("variable a { a0, a1 }\nvariable b { b0, b1 }\ncpt a | b { 1, 0, 0, 1 }\n"
                    "cpt b | a { 1, 0, 0, 1 }\n",
                    3, "cycle");
  check_parse_error("variable a { a0, a0 }\n", 1, "");
  check_parse_error("varible a { a0 }\n", 1, "expected 'variable' or 'cpt'");
  check_parse_error("variable a { a0, a1 \n", 1, "unexpected end");
}

TEST_CASE("print and parse round trip") {
  std::mt19937_64 rng(6);
  testing::RandomNetOptions opt;
  opt.unspecified_root_probability = 0.3;
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = testing::random_net(rng, opt);
    const auto back = parse_net(print_net(n));
    CHECK(structurally_equal(back, n));
  }
  const auto n1 = testing::load_net1();
  CHECK(structurally_equal(parse_net(print_net(n1)), n1));
}

TEST_CASE("cli answers") {
  SUBCASE("posterior with oracle check") {
    const auto r = run({"--net", net1_path(), "--target", "d", "--evidence", "e=e0", "--posterior", "--check"});
    CHECK(r.code == kExitOk);
    CHECK(r.out ==
          "# P(d | e=e0)\n"
          "d=d0\t0.515637000701\n"
          "d=d1\t0.484362999299\n"
          "oracle check: PASS (brute force)\n");
  }
  SUBCASE("joint with trace") {
    const auto r = run({"--net", net1_path(), "--target", "d,e", "--trace"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("d=d1 e=e1\t0.3793542875\n") != std::string::npos);
    CHECK(r.out.find("STEP 4: pick=C3' query=d;v3=0;e append-to=-\n") != std::string::npos);
  }
  SUBCASE("table order follows the target list") {
    const auto r = run({"--net", net1_path(), "--target", "e,d"});
    CHECK(r.out.find("e=e0 d=d1\t0.1727965\n") != std::string::npos);
  }
  SUBCASE("check passes for every strategy") {
    for (std::string s : {"default", "first-leaf", "random"}) {
      const auto r = run({"--net", net1_path(), "--target", "d", "--check", "--strategy", s, "--seed", "9"});
      CHECK(r.code == kExitOk);
      CHECK(r.out.find("oracle check: PASS") != std::string::npos);
    }
  }
}

TEST_CASE("cli errors") {
  CHECK(run({"--net", "no/such/file.net", "--target", "d"}).code == kExitError);
  CHECK(run({"--net", net1_path(), "--target", "zz"}).code == kExitError);
  CHECK(run({"--net", net1_path(), "--target", "d", "--evidence", "e=nope"}).code == kExitError);
  CHECK(run({"--net", net1_path(), "--target", "d", "--evidence", "d=d0"}).code == kExitError);
  CHECK(run({"--net", net1_path()}).code == kExitError);
  CHECK(run({"--net", net1_path(), "--target", "d", "--strategy", "best"}).code == kExitError);
  CHECK(run({"--help"}).code == kExitOk);

  SUBCASE("zero-probability evidence") {
    const auto path = write_temp(
        "variable x { x0, x1 }\nvariable y { y0, y1 }\ncpt x { 1, 0 }\ncpt y | x { 1, 0, 0.5, 0.5 }\n");
    const auto r = run({"--net", path, "--target", "x", "--evidence", "y=y1", "--posterior"});
    CHECK(r.code == kExitZeroEvidence);
    CHECK(r.err.find("y=y1") != std::string::npos);
    std::remove(path.c_str());
  }
  SUBCASE("bad net file") {
    const auto path = write_temp("variable a { a0, a1 }\ncpt a { 0.5, 0.6 }\n");
    const auto r = run({"--net", path, "--target", "a"});
    CHECK(r.code == kExitError);
    CHECK(r.err.find("line 2") != std::string::npos);
    std::remove(path.c_str());
  }
  SUBCASE("unspecified roots warn") {
    const auto path = write_temp("variable r { r0, r1 }\nvariable s { s0, s1 }\ncpt s | r { 0.5, 0.5, 0.1, 0.9 }\n");
    const auto r = run({"--net", path, "--target", "s", "--check"});
    CHECK(r.code == kExitOk);
    CHECK(r.err.find("unspecified roots {r}") != std::string::npos);
    CHECK(r.out.find("s=s1\t1.4\n") != std::string::npos);
    CHECK(run({"--net", path, "--target", "s", "--posterior"}).code == kExitError);
    std::remove(path.c_str());
  }
}
