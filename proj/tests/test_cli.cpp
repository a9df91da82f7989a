#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "hurstlab/cli.hpp"

using hurstlab::cli::run_command;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_command(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

// Field `index` of the single data row of `estimate` output.
double field(const std::string& csv, std::size_t index) {
  std::istringstream is(csv);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  std::istringstream rs(row);
  std::string cell;
  for (std::size_t i = 0; i <= index; ++i) std::getline(rs, cell, ',');
  return std::stod(cell);
}

}  // namespace

TEST_CASE("simulate") {
  const auto a = run({"simulate", "--alpha", "1.5", "--length", "1024", "--seed", "7"});
  CHECK(a.code == 0);
  CHECK(count_lines(a.out) == 1024);
  CHECK(a.out == run({"simulate", "--alpha", "1.5", "--length", "1024", "--seed", "7"}).out);
  CHECK(a.out != run({"simulate", "--alpha", "1.5", "--length", "1024", "--seed", "8"}).out);
  CHECK(run({"simulate", "--alpha", "3", "--length", "10"}).code == 2);
  CHECK(run({"simulate", "--length", "10"}).code == 1);
}

TEST_CASE("seed falls back to the environment") {
  const auto explicit_seed = run({"simulate", "--alpha", "1.2", "--length", "64", "--seed", "31"});
  ::setenv("HURSTLAB_SEED", "31", 1);
  const auto from_env = run({"simulate", "--alpha", "1.2", "--length", "64"});
  ::setenv("HURSTLAB_SEED", "oops", 1);
  const auto bad_env = run({"simulate", "--alpha", "1.2", "--length", "64"});
  ::unsetenv("HURSTLAB_SEED");
  const auto no_env = run({"simulate", "--alpha", "1.2", "--length", "64"});
  CHECK(from_env.out == explicit_seed.out);
  CHECK(bad_env.code == 1);
  CHECK(no_env.out == run({"simulate", "--alpha", "1.2", "--length", "64", "--seed", "0"}).out);
}

TEST_CASE("simulate output feeds estimate") {
  const auto sim = run({"simulate", "--alpha", "2", "--length", "4096", "--seed", "3"});
  const auto est = run({"estimate", "--method", "ghe", "--q", "2", "--stdin"}, sim.out);
  REQUIRE(est.code == 0);
  CHECK(est.out.rfind("method,q,hurst,r_squared,intercept,n_points,n_obs\nghe,2,", 0) == 0);
  const double h = field(est.out, 2);
  CHECK(std::isfinite(h));
  CHECK(std::abs(h - 0.5) < 0.1);
  CHECK(field(est.out, 5) == 19);
  CHECK(field(est.out, 6) == 4096);

  const auto pts = run({"estimate", "--method", "dfa", "--stdin", "--points"}, sim.out);
  REQUIRE(pts.code == 0);
  CHECK(pts.out.rfind("log_scale,log_fluctuation\n", 0) == 0);
  CHECK(count_lines(pts.out) == 1 + 7);  // 16 .. 1024
}

TEST_CASE("estimate reads a CSV column") {
  std::string csv = "t,r\n";
  const auto sim = run({"simulate", "--alpha", "1.7", "--length", "512", "--seed", "1"});
  std::istringstream is(sim.out);
  std::string line;
  for (int i = 0; std::getline(is, line); ++i) csv += std::to_string(i) + "," + line + "\n";
  const auto by_col = run({"estimate", "--method", "rs", "--stdin", "--column", "r"}, csv);
  const auto plain = run({"estimate", "--method", "rs", "--stdin"}, sim.out);
  REQUIRE(by_col.code == 0);
  CHECK(by_col.out == plain.out);
  CHECK(run({"estimate", "--method", "rs", "--stdin", "--column", "x"}, csv).code == 2);
}

TEST_CASE("estimate errors") {
  std::string constant;
  for (int i = 0; i < 1024; ++i) constant += "0.5\n";
  const auto flat = run({"estimate", "--method", "rs", "--stdin"}, constant);
  CHECK(flat.code == 2);
  CHECK(flat.err.find("degenerate") != std::string::npos);

  CHECK(run({"estimate", "--method", "rs", "--stdin"}, "1\n2\nthree\n").code == 2);
  CHECK(run({"estimate", "--method", "rs", "--stdin"}, "").code == 2);
  CHECK(run({"estimate", "--method", "rs", "--stdin"}, "1\n2\n3\n").code == 2);
  CHECK(run({"estimate", "--method", "bogus", "--stdin"}, "1\n").code == 1);
  CHECK(run({"estimate", "--method", "rs", "--q", "2", "--stdin"}, "1\n").code == 1);
  CHECK(run({"estimate", "--method", "rs"}).code == 1);
  CHECK(run({"estimate", "--method", "rs", "--input", "/nonexistent/file"}).code == 2);
  CHECK(run({"estimate", "--method", "dfa", "--stdin", "--detrend-order", "2"}, constant).code == 2);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"simulate", "--alpha", "1.5", "--length", "10", "--bogus"}).code == 1);
  CHECK(run({"sessions", "--stdin", "--granularity", "week"}, "").code == 1);
}

TEST_CASE("help shows estimator defaults") {
  for (const std::string verb : {"estimate", "mc-grid", "sessions"}) {
    const auto h = run({verb, "--help"});
    INFO(verb);
    CHECK(h.code == 0);
    for (const std::string opt : {"--scale-base", "--min-scale", "--max-scale-fraction",
                                  "--dma-lambda-min", "--dma-lambda-max", "--ghe-tau-min",
                                  "--ghe-tau-max", "--detrend-order"}) {
      CHECK(h.out.find(opt) != std::string::npos);
    }
    for (const std::string def : {"[2]", "[16]", "[0.25]", "[20]", "[40]", "[1]", "[19]"}) {
      CHECK(h.out.find(def) != std::string::npos);
    }
  }
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("mc-grid output is reproducible") {
  const std::vector<std::string> base{"mc-grid",  "--alphas",  "1.5,2.0", "--log2-lengths",
                                      "9",        "--reps",    "8",       "--seed",
                                      "5",        "--methods", "rs,ghe:2"};
  auto one = base;
  one.insert(one.end(), {"--threads", "1"});
  auto four = base;
  four.insert(four.end(), {"--threads", "4", "--quiet"});
  const auto a = run(one);
  const auto b = run(four);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == run(one).out);
  CHECK(count_lines(a.out) == 1 + 4);
  CHECK(a.err.find("100%") != std::string::npos);
  CHECK(b.err.empty());

  CHECK(run({"mc-grid", "--alphas", "0.5", "--reps", "1", "--log2-lengths", "9"}).code == 2);
  CHECK(run({"mc-grid", "--methods", "nope"}).code == 1);
}

TEST_CASE("sessions verb") {
  std::string csv = "timestamp,price\n";
  double p = 100.0;
  const auto sim = run({"simulate", "--alpha", "2", "--length", "400", "--seed", "9"});
  std::istringstream is(sim.out);
  std::string line;
  for (int i = 0; std::getline(is, line); ++i) {
    const int day = 2 + i / 200;
    const int minute = i % 200;
    p *= std::exp(0.001 * std::stod(line));
    csv += "1983-01-0" + std::to_string(day) + "T" + (minute / 60 < 10 ? "0" : "") +
           std::to_string(minute / 60) + ":" + (minute % 60 < 10 ? "0" : "") +
           std::to_string(minute % 60) + ":00," + std::to_string(p) + "\n";
  }
  const auto r = run({"sessions", "--stdin", "--quiet"}, csv);
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out) == 3);
  CHECK(r.out.find("\n1983-01-02,199,ghe,2,") != std::string::npos);
  CHECK(r.out.find("\n1983-01-03,199,ghe,2,") != std::string::npos);

  const auto monthly = run({"sessions", "--stdin", "--granularity", "month"}, csv);
  CHECK(monthly.code == 2);  // 399 returns < 1024
  const auto low = run({"sessions", "--stdin", "--granularity", "month", "--min-obs", "300"}, csv);
  CHECK(low.code == 0);
  CHECK(count_lines(low.out) == 2);

  const auto disordered = run({"sessions", "--stdin"},
                              "timestamp,price\n1983-01-02T10:00,1\n1983-01-02T09:00,1\n");
  CHECK(disordered.code == 2);
  CHECK(disordered.err.find("line 3") != std::string::npos);
}
