#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "hurstlab/error.hpp"
#include "hurstlab/estimators.hpp"
#include "hurstlab/stable.hpp"
#include "oracles.hpp"

using namespace hurstlab;

namespace {

std::vector<double> alternating(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = i % 2 == 0 ? 1.0 : -1.0;
  return x;
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  return sample_stable({2.0, 0.0, 1.0, 0.0}, n, Seed{seed});
}

const std::vector<MethodSpec> kAllMethods{{Method::RS, 1.0},    {Method::DMA, 1.0},
                                          {Method::MFDFA, 1.0}, {Method::MFDFA, 2.0},
                                          {Method::MFDFA, 3.5}, {Method::GHE, 1.0},
                                          {Method::GHE, 2.0},   {Method::GHE, 0.5}};

}  // namespace

TEST_CASE("build_profile") {
  const std::vector<double> x{1.0, -1.0, 2.0};
  const auto p = build_profile(x, true);
  REQUIRE(p.size() == 3);
  CHECK(p[0] == doctest::Approx(1.0 / 3.0));
  CHECK(p[1] == doctest::Approx(-4.0 / 3.0));
  CHECK(p[2] == 0.0);
  CHECK(build_profile(std::vector<double>{5, 5, 5}, false) == std::vector<double>{5, 10, 15});
  const auto g = gaussian(1000, 3);
  CHECK(std::abs(build_profile(g, true).back()) < 1e-12);
}

TEST_CASE("make_scale_grid") {
  const EstimatorConfig cfg;
  CHECK(make_scale_grid(512, cfg) == std::vector<std::size_t>{16, 32, 64, 128});
  CHECK(make_scale_grid(65536, cfg) ==
        std::vector<std::size_t>{16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384});
  CHECK_THROWS_AS(make_scale_grid(32, cfg), InsufficientScalesError);
  CHECK_THROWS_AS(make_scale_grid(64, cfg), InsufficientScalesError);  // only 16
  CHECK(make_scale_grid(128, cfg) == std::vector<std::size_t>{16, 32});

  EstimatorConfig base3;
  base3.scale_base = 3;
  base3.min_scale = 9;
  base3.max_scale_fraction = 0.5;
  CHECK(make_scale_grid(200, base3) == std::vector<std::size_t>{9, 27, 81});

  EstimatorConfig bad;
  bad.max_scale_fraction = 0.0;
  CHECK_THROWS_AS(make_scale_grid(1024, bad), ParameterError);
}

TEST_CASE("loglog_fit") {
  SUBCASE("exact power law") {
    const std::vector<std::pair<double, double>> pts{{16, 4}, {64, 8}, {256, 16}};
    const auto fit = loglog_fit(pts);
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(fit.points.size() == 3);
  }
  SUBCASE("constant fluctuation") {
    const std::vector<std::pair<double, double>> pts{{1, 1}, {2, 1}, {4, 1}};
    const auto fit = loglog_fit(pts);
    CHECK(fit.slope == 0.0);
    CHECK(fit.r_squared == 1.0);
  }
  SUBCASE("perturbed points match the normal equations") {
    // Frozen from an independent numpy least-squares solve.
    const std::vector<std::pair<double, double>> pts{
        {16, 4.1}, {32, 5.9}, {64, 8.3}, {128, 11.2}, {256, 16.5}};
    const auto fit = loglog_fit(pts);
    CHECK(fit.slope == doctest::Approx(0.494225229195122).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(0.048868854657263).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(0.998692325569094).epsilon(1e-12));
  }
  SUBCASE("exact recovery of arbitrary exponents") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> expo(-2.0, 2.0);
    std::uniform_real_distribution<double> pref(0.01, 100.0);
    for (int trial = 0; trial < 50; ++trial) {
      const double h = expo(gen);
      const double c = pref(gen);
      std::vector<std::pair<double, double>> pts;
      for (double s = 3; s < 5000; s *= 1.7) pts.emplace_back(s, c * std::pow(s, h));
      const auto fit = loglog_fit(pts);
      CHECK(std::abs(fit.slope - h) < 1e-12);
      CHECK(std::abs(fit.r_squared - 1.0) < 1e-12);
    }
  }
  SUBCASE("errors") {
    const std::vector<std::pair<double, double>> neg{{1, 1}, {2, -1}};
    CHECK_THROWS_AS(loglog_fit(neg), DomainError);
    const std::vector<std::pair<double, double>> zero_scale{{0, 1}, {2, 1}};
    CHECK_THROWS_AS(loglog_fit(zero_scale), DomainError);
    const std::vector<std::pair<double, double>> same{{4, 1}, {4, 2}};
    CHECK_THROWS_AS(loglog_fit(same), DegenerateRegressionError);
    const std::vector<std::pair<double, double>> one{{4, 1}};
    CHECK_THROWS_AS(loglog_fit(one), InsufficientScalesError);
  }
}

TEST_CASE("R/S") {
  const EstimatorConfig cfg;
  SUBCASE("alternating increments give R/S = 1 at every scale") {
    const auto est = estimate_rs(alternating(1024), cfg);
    CHECK(est.method.method == Method::RS);
    CHECK(std::abs(est.hurst) < 1e-12);
    for (const auto& p : est.fit.points) CHECK(std::abs(p.log_fluctuation) < 1e-12);
  }
  SUBCASE("constant increments are degenerate") {
    CHECK_THROWS_AS(estimate_rs(std::vector<double>(1024, 0.1), cfg), DegenerateSeriesError);
    CHECK_THROWS_AS(estimate_rs(std::vector<double>(1024, 0.0), cfg), DegenerateSeriesError);
  }
  SUBCASE("zero-variance windows are skipped, not fatal") {
    auto x = gaussian(1024, 8);
    std::fill(x.begin(), x.begin() + 16, 3.0);
    CHECK_NOTHROW(estimate_rs(x, cfg));
  }
  SUBCASE("too short") {
    CHECK_THROWS_AS(estimate_rs(gaussian(32, 1), cfg), InsufficientScalesError);
  }
}

TEST_CASE("MF-DFA and DFA") {
  const EstimatorConfig cfg;
  const auto x = gaussian(2048, 21);
  SUBCASE("DFA is MF-DFA at q = 2, bit for bit") {
    const auto a = estimate_mfdfa(x, 2.0, cfg);
    const auto b = estimate_dfa(x, cfg);
    CHECK(a.hurst == b.hurst);
    CHECK(a.fit.intercept == b.fit.intercept);
    CHECK(a.method == b.method);
  }
  SUBCASE("constant increments are degenerate") {
    CHECK_THROWS_AS(estimate_mfdfa(std::vector<double>(512, 0.3), 2.0, cfg), DegenerateSeriesError);
    CHECK_THROWS_AS(estimate_mfdfa(std::vector<double>(512, 0.3), 1.0, cfg), DegenerateSeriesError);
  }
  SUBCASE("only linear detrending") {
    EstimatorConfig quad = cfg;
    quad.detrend_order = 2;
    CHECK_THROWS_AS(estimate_mfdfa(x, 2.0, quad), ParameterError);
  }
  SUBCASE("q must be positive") {
    CHECK_THROWS_AS(estimate_mfdfa(x, 0.0, cfg), ParameterError);
    CHECK_THROWS_AS(estimate_mfdfa(x, -1.0, cfg), ParameterError);
  }
}

TEST_CASE("DMA") {
  const EstimatorConfig cfg;
  SUBCASE("alternating increments") {
    // Frozen from a direct numpy evaluation of the moving-average deviations.
    const auto est = estimate_dma(alternating(4096), cfg);
    CHECK(std::abs(est.hurst) < 0.05);
    CHECK(est.hurst == doctest::Approx(0.014667814972202).epsilon(1e-9));
  }
  SUBCASE("constant increments: a linear ramp lags its moving average by (l-1)/2") {
    const double c = 0.7;
    const auto est = estimate_dma(std::vector<double>(1000, c), cfg);
    REQUIRE(est.fit.points.size() == 21);
    for (std::size_t i = 0; i < est.fit.points.size(); ++i) {
      const double lambda = 20.0 + static_cast<double>(i);
      const double expected = c * c * (lambda - 1) * (lambda - 1) / 4.0;
      CHECK(std::exp(est.fit.points[i].log_fluctuation) == doctest::Approx(expected).epsilon(1e-10));
    }
    CHECK(est.hurst == doctest::Approx(1.036747623687631).epsilon(1e-10));
    EstimatorConfig wide = cfg;
    wide.dma_lambda_min = 200;
    wide.dma_lambda_max = 800;
    const auto wider = estimate_dma(std::vector<double>(4000, c), wide);
    CHECK(std::abs(wider.hurst - 1.0) < std::abs(est.hurst - 1.0));
    CHECK(std::abs(wider.hurst - 1.0) < 0.005);
  }
  SUBCASE("zero increments are degenerate") {
    CHECK_THROWS_AS(estimate_dma(std::vector<double>(1000, 0.0), cfg), DegenerateSeriesError);
  }
  SUBCASE("series must exceed the largest window") {
    CHECK_THROWS_AS(estimate_dma(gaussian(40, 2), cfg), InsufficientScalesError);
    CHECK_NOTHROW(estimate_dma(gaussian(41, 2), cfg));
  }
  SUBCASE("incremental update stays exact over long series") {
    // Heavy-tailed input with huge jumps stresses the running sums.
    const auto heavy = sample_stable({1.1, 0.0, 1.0, 0.0}, 5000, Seed{17});
    CHECK(std::abs(estimate_dma(heavy, cfg).hurst - oracle::dma(heavy)) < 1e-9);
  }
}

TEST_CASE("GHE K_q") {
  const std::vector<double> levels{0.0, 1.0, 3.0};
  CHECK(ghe_kq(levels, 1.0, 1) == 1.5);
  CHECK(ghe_kq(levels, 2.0, 1) == 2.5);
  CHECK(ghe_kq(levels, 2.0, 2) == 9.0);
  CHECK_THROWS_AS(ghe_kq(levels, 2.0, 3), DomainError);
  CHECK_THROWS_AS(ghe_kq(levels, 2.0, 0), DomainError);
  std::vector<double> ramp(10);
  for (std::size_t t = 0; t < ramp.size(); ++t) ramp[t] = 2.0 * static_cast<double>(t);
  CHECK(ghe_kq(ramp, 2.0, 3) == 36.0);

  SUBCASE("monotone in q when every difference is at least one") {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> step(1.0, 3.0);
    std::bernoulli_distribution sign(0.5);
    std::vector<double> x(500);
    double acc = 0;
    for (double& v : x) v = (acc += sign(gen) ? step(gen) : -step(gen));
    // Lag-1 differences all have magnitude >= 1.
    double prev = 0;
    for (const double q : {0.5, 1.0, 1.5, 2.0, 3.0, 4.0}) {
      const double k = ghe_kq(x, q, 1);
      CHECK(k >= prev);
      prev = k;
    }
  }
}

TEST_CASE("GHE estimate") {
  const EstimatorConfig cfg;
  for (const double q : {1.0, 2.0}) {
    const auto est = estimate_ghe(std::vector<double>(200, 1.0), q, cfg);
    CHECK(est.hurst == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(estimate_ghe(std::vector<double>(200, 0.0), 2.0, cfg), DegenerateSeriesError);
  CHECK_THROWS_AS(estimate_ghe(gaussian(19, 1), 2.0, cfg), InsufficientScalesError);
  CHECK_THROWS_AS(estimate_ghe(gaussian(100, 1), 0.0, cfg), ParameterError);
}

TEST_CASE("input validation") {
  const EstimatorConfig cfg;
  auto x = gaussian(512, 5);
  x[100] = std::nan("");
  for (const auto& m : kAllMethods) CHECK_THROWS_AS(estimate(x, m, cfg), DomainError);
  CHECK_THROWS_AS(estimate_rs(std::vector<double>{1.0}, cfg), DomainError);
}

TEST_CASE("every estimator matches its brute-force oracle on random series") {
  const EstimatorConfig cfg;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double alpha = 1.1 + 0.045 * static_cast<double>(seed);  // 1.1 .. 1.955
    const auto x = sample_stable({alpha, 0.0, 1.0, 0.0}, 256, Seed{1000 + seed});
    INFO("seed " << seed);
    CHECK(std::abs(estimate_rs(x, cfg).hurst - oracle::rs(x)) < 1e-9);
    CHECK(std::abs(estimate_dma(x, cfg).hurst - oracle::dma(x)) < 1e-9);
    for (const double q : {1.0, 2.0, 3.0}) {
      CHECK(std::abs(estimate_mfdfa(x, q, cfg).hurst - oracle::mfdfa(x, q)) < 1e-9);
      CHECK(std::abs(estimate_ghe(x, q, cfg).hurst - oracle::ghe(x, q)) < 1e-9);
    }
  }
}

TEST_CASE("positive scale invariance") {
  const EstimatorConfig cfg;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = sample_stable({1.5, 0.0, 1.0, 0.0}, 1024, Seed{seed});
    for (const double c : {1e-6, 0.37, 3.0, 1234.5}) {
      std::vector<double> y(x);
      for (double& v : y) v *= c;
      for (const auto& m : kAllMethods) {
        INFO(format_method(m) << " c=" << c);
        CHECK(std::abs(estimate(x, m, cfg).hurst - estimate(y, m, cfg).hurst) < 1e-9);
      }
    }
  }
}

TEST_CASE("only the leading floor(T/v) windows are used") {
  const EstimatorConfig cfg;
  const auto clean = gaussian(1000, 9);  // 1000 = 62*16 + 8, 31*32 + 8, ...
  auto dirty = clean;
  // The scale grid for 1000 is {16, 32, 64, 128}; every scale divides 992.
  for (std::size_t i = 992; i < 1000; ++i) dirty[i] = 1e9 * static_cast<double>(i);
  // Same grid on a 992-long prefix.
  const std::vector<double> prefix(clean.begin(), clean.begin() + 992);
  CHECK(estimate_rs(dirty, cfg).hurst == estimate_rs(clean, cfg).hurst);
  CHECK(estimate_mfdfa(dirty, 1.0, cfg).hurst == estimate_mfdfa(clean, 1.0, cfg).hurst);
  CHECK(estimate_mfdfa(dirty, 2.0, cfg).hurst == estimate_mfdfa(prefix, 2.0, cfg).hurst);
}

TEST_CASE("method names") {
  CHECK(parse_method("rs") == MethodSpec{Method::RS, 1.0});
  CHECK(parse_method("dma") == MethodSpec{Method::DMA, 1.0});
  CHECK(parse_method("dfa") == MethodSpec{Method::MFDFA, 2.0});
  CHECK(parse_method("mfdfa:1") == MethodSpec{Method::MFDFA, 1.0});
  CHECK(parse_method("ghe:2") == MethodSpec{Method::GHE, 2.0});
  CHECK(parse_method("ghe:0.5") == MethodSpec{Method::GHE, 0.5});
  CHECK(parse_method("ghe") == MethodSpec{Method::GHE, 2.0});
  CHECK_THROWS_AS(parse_method("hurst"), ParameterError);
  CHECK_THROWS_AS(parse_method("ghe:"), ParameterError);
  CHECK_THROWS_AS(parse_method("ghe:-1"), ParameterError);
  CHECK_THROWS_AS(parse_method("rs:2"), ParameterError);
  for (const auto& m : kAllMethods) CHECK(parse_method(format_method(m)) == m);
}
