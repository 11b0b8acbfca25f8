#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "frachh/fbm.hpp"
#include "frachh/io.hpp"
#include "frachh/rng.hpp"
#include "oracles.hpp"

using namespace frachh;

TEST_CASE("fbm covariance closed-form values") {
  CHECK(fbm_covariance(2.0, 2.0, Hurst(0.6)) == doctest::Approx(std::pow(2.0, 1.2)).epsilon(1e-14));
  CHECK(fbm_covariance(1.0, 2.0, Hurst(0.5)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fbm_covariance(1.0, 2.0, Hurst(0.75)) ==
        doctest::Approx(0.5 * std::pow(2.0, 1.5)).epsilon(1e-14));
  CHECK_THROWS_AS(fbm_covariance(-1.0, 2.0, Hurst(0.6)), std::domain_error);
}

TEST_CASE("fbm covariance symmetry and increment identities hold exactly") {
  GaussianStream rng(3);
  for (int i = 0; i < 200; ++i) {
    const double s = rng.uniform(0.0, 4.0);
    const double t = rng.uniform(0.0, 4.0);
    const double hv = rng.uniform(0.05, 0.95);
    const Hurst h(hv);
    CHECK(fbm_covariance(s, t, h) == doctest::Approx(fbm_covariance(t, s, h)).epsilon(1e-13));
    // stationary increments: E[(B(t)-B(s))^2] = |t-s|^(2H)
    const double incr =
        fbm_covariance(t, t, h) - 2.0 * fbm_covariance(s, t, h) + fbm_covariance(s, s, h);
    CHECK(incr == doctest::Approx(std::pow(std::fabs(t - s), 2.0 * hv)).epsilon(1e-9));
    // variance-level self-similarity: E[B(ct)^2] = c^(2H) E[B(t)^2]
    const double c = rng.uniform(0.1, 3.0);
    CHECK(fbm_covariance(c * t, c * t, h) ==
          doctest::Approx(std::pow(c, 2.0 * hv) * fbm_covariance(t, t, h)).epsilon(1e-11));
  }
}

TEST_CASE("c_H normalization constant") {
  CHECK(c_h(Hurst(0.5)) == doctest::Approx(1.0).epsilon(1e-12));
  // independent gamma oracle (Lanczos)
  auto ch_oracle = [](double H) {
    return std::sqrt(2.0 * H * oracles::lanczos_gamma(1.5 - H) /
                     (oracles::lanczos_gamma(H + 0.5) * oracles::lanczos_gamma(2.0 - 2.0 * H)));
  };
  CHECK(c_h(Hurst(0.75)) == doctest::Approx(ch_oracle(0.75)).epsilon(1e-10));
  CHECK(c_h(Hurst(0.75)) == doctest::Approx(1.0697).epsilon(1e-4));
  for (double H : {0.05, 0.2, 0.45, 0.55, 0.8, 0.95}) CHECK(c_h(Hurst(H)) > 0.0);
  CHECK_THROWS_AS(Hurst(1.0), std::invalid_argument);
  CHECK_THROWS_AS(Hurst(0.0), std::invalid_argument);
}

TEST_CASE("volterra kernel: closed cases and quadrature oracle") {
  CHECK(volterra_kernel(2.0, 1.0, Hurst(0.5)) == 1.0);
  // s -> t-: the kernel vanishes like (t-s)^(H-1/2)
  const double near1 = volterra_kernel(2.0, 2.0 - 1e-9, Hurst(0.75));
  const double near2 = volterra_kernel(2.0, 2.0 - 1e-12, Hurst(0.75));
  CHECK(near1 < 0.02);
  CHECK(near2 < near1);
  CHECK(near2 < 0.004);
  // independent oracle: substitute w = (r-s)^(H-1/2); the integrand becomes
  // r(w)^(H-1/2)/(H-1/2), smooth, handled by adaptive Simpson
  auto kernel_oracle = [](double t, double s, double H) {
    const double e = H - 0.5;
    const double upper = std::pow(t - s, e);
    const double integral = oracles::adaptive_simpson(
        [&](double w) { return std::pow(s + std::pow(w, 1.0 / e), H - 0.5) / e; }, 0.0, upper,
        1e-13);
    const double ch = std::sqrt(2.0 * H * oracles::lanczos_gamma(1.5 - H) /
                                (oracles::lanczos_gamma(H + 0.5) *
                                 oracles::lanczos_gamma(2.0 - 2.0 * H)));
    return ch * e * std::pow(s, 0.5 - H) * integral;
  };
  // normalization sanity: int_0^t K(t,s)^2 ds must equal t^(2H) = Var B(t)
  {
    const double H = 0.75;
    const double var = oracles::adaptive_simpson(
        [&](double s) { return std::pow(volterra_kernel(1.0, s, Hurst(H), 64), 2.0); }, 1e-9,
        1.0 - 1e-9, 1e-7);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-3));
  }
  for (double H : {0.6, 0.75, 0.9}) {
    const double val = volterra_kernel(2.0, 1.0, Hurst(H), 512);
    const double ref = kernel_oracle(2.0, 1.0, H);
    CHECK(val == doctest::Approx(ref).epsilon(1e-8));
  }
  CHECK(volterra_kernel(1.0, 0.3, Hurst(0.7), 512) ==
        doctest::Approx(kernel_oracle(1.0, 0.3, 0.7)).epsilon(1e-8));
  CHECK_THROWS_AS(volterra_kernel(1.0, 1.0, Hurst(0.75)), std::domain_error);
  CHECK_THROWS_AS(volterra_kernel(1.0, 2.0, Hurst(0.75)), std::domain_error);
  CHECK_THROWS_AS(volterra_kernel(1.0, 0.0, Hurst(0.75)), std::domain_error);
  CHECK_THROWS_AS(volterra_kernel(2.0, 1.0, Hurst(0.4)), std::invalid_argument);
}

TEST_CASE("cholesky sampler: determinism") {
  const TimeGrid grid(1.0, 32);
  const FbmPath a = sample_fbm_cholesky(grid, Hurst(0.7), 99);
  const FbmPath b = sample_fbm_cholesky(grid, Hurst(0.7), 99);
  REQUIRE(a.values.size() == 33);
  CHECK(a.values[0] == 0.0);
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
  const FbmPath c = sample_fbm_cholesky(grid, Hurst(0.7), 100);
  CHECK(a.values.back() != c.values.back());
}

TEST_CASE("covariance matrices factor for every H (positive definiteness)") {
  GaussianStream rng(17);
  for (double H : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const int m = 4 + static_cast<int>(rng.uniform(0.0, 28.0));
    const TimeGrid grid(rng.uniform(0.25, 4.0), m);
    CHECK_NOTHROW(FbmCholeskySampler(grid, Hurst(H)));
  }
}

TEST_CASE("mc: increment variance of the exact sampler matches dt (H = 1/2)") {
  const int m = 128;
  const int paths = 10000;
  const TimeGrid grid(1.0, m);
  const FbmCholeskySampler sampler(grid, Hurst(0.5));
  oracles::RunningMoments inc2;
  for (int p = 0; p < paths; ++p) {
    const FbmPath path = sampler.sample(derive_stream(1001, p));
    for (int i = 1; i <= m; ++i) {
      const double d = path.values[i] - path.values[i - 1];
      inc2.add(d * d);
    }
  }
  const double dt = grid.dt();
  // Var[N(0,dt)^2] = 2 dt^2; increments are independent at H = 1/2
  const double se = std::sqrt(2.0) * dt / std::sqrt(static_cast<double>(inc2.n));
  CHECK(std::fabs(inc2.mean() - dt) < 3.0 * se);
}

TEST_CASE("mc: B(1)^2 has unit mean for H = 0.7") {
  const TimeGrid grid(1.0, 128);
  const FbmCholeskySampler sampler(grid, Hurst(0.7));
  oracles::RunningMoments b1sq;
  for (int p = 0; p < 10000; ++p) {
    const FbmPath path = sampler.sample(derive_stream(2002, p));
    b1sq.add(path.values.back() * path.values.back());
  }
  CHECK(std::fabs(b1sq.mean() - 1.0) < 3.0 * b1sq.se_mean());
}

TEST_CASE("mc: stationary increments and variance self-similarity at H = 0.7") {
  const TimeGrid grid(1.0, 64);
  const Hurst h(0.7);
  const FbmCholeskySampler sampler(grid, h);
  // E[(B(t)-B(s))^2] = |t-s|^(2H) at (s,t) = (0.25, 0.75); E[B(ct)^2]/E[B(t)^2] = c^(2H)
  oracles::RunningMoments incr2, b_half2, b_one2;
  for (int p = 0; p < 6000; ++p) {
    const FbmPath path = sampler.sample(derive_stream(909, p));
    const double d = path.values[48] - path.values[16];
    incr2.add(d * d);
    b_half2.add(path.values[32] * path.values[32]);
    b_one2.add(path.values[64] * path.values[64]);
  }
  const double expected = std::pow(0.5, 1.4);
  CHECK(std::fabs(incr2.mean() - expected) < 3.0 * incr2.se_mean());
  CHECK(std::fabs(b_half2.mean() - std::pow(0.5, 1.4) * 1.0) < 3.0 * b_half2.se_mean());
  CHECK(std::fabs(b_one2.mean() - 1.0) < 3.0 * b_one2.se_mean());
}

TEST_CASE("volterra sampler reproduces the Wiener walk bit-for-bit at H = 1/2") {
  const TimeGrid grid(2.0, 64);
  const FbmPath kernel_path = sample_fbm_volterra(grid, Hurst(0.5), 4242);
  const FbmPath walk = sample_wiener(grid, 4242);
  for (std::size_t i = 0; i < walk.values.size(); ++i)
    CHECK(kernel_path.values[i] == walk.values[i]);  // bitwise
  CHECK_THROWS_AS(sample_fbm_volterra(grid, Hurst(0.45), 1), std::invalid_argument);
}

TEST_CASE("mc: volterra sampler covariance matches the fBm law within MC + bias") {
  const int m = 64;
  const int paths = 4000;
  const TimeGrid grid(1.0, m);
  const Hurst h(0.75);
  const FbmVolterraSampler sampler(grid, h);
  const std::vector<int> nodes = {8, 16, 32, 48, 64};
  const std::size_t nn = nodes.size();
  std::vector<double> acc(nn * nn, 0.0);
  for (int p = 0; p < paths; ++p) {
    const FbmPath path = sampler.sample(derive_stream(31337, p));
    for (std::size_t a = 0; a < nn; ++a)
      for (std::size_t b = a; b < nn; ++b)
        acc[a * nn + b] += path.values[nodes[a]] * path.values[nodes[b]];
  }
  for (std::size_t a = 0; a < nn; ++a) {
    for (std::size_t b = a; b < nn; ++b) {
      const double s = grid.node(nodes[a]);
      const double t = grid.node(nodes[b]);
      const double emp = acc[a * nn + b] / paths;
      const double exact = fbm_covariance(s, t, h);
      const double se = std::sqrt(
          (exact * exact + fbm_covariance(s, s, h) * fbm_covariance(t, t, h)) / paths);
      const double bias =
          std::fabs(sampler.discrete_covariance(nodes[a], nodes[b]) - exact);
      CHECK(std::fabs(emp - exact) <= 5.0 * se + bias);
    }
  }
}

TEST_CASE("volterra discretization bias decreases under time refinement") {
  const Hurst h(0.75);
  double prev = 1e100;
  for (int m : {64, 128, 256}) {
    const TimeGrid grid(1.0, m);
    const FbmVolterraSampler sampler(grid, h, 48);
    // bias at (s,t) = (0.5, 1.0)
    const double bias =
        std::fabs(sampler.discrete_covariance(m / 2, m) - fbm_covariance(0.5, 1.0, h));
    CHECK(bias < prev);
    prev = bias;
  }
}

TEST_CASE("fbm inner product: indicator identities are exact") {
  const Hurst h(0.75);
  // <1_[0,t], 1_[0,t]> = t^(2H): one-cell partition
  for (double t : {0.5, 1.0, 2.0}) {
    const std::vector<double> f{1.0};
    CHECK(fbm_inner_product(f, f, t, h) == doctest::Approx(std::pow(t, 1.5)).epsilon(1e-13));
  }
  // <1_[0,1], 1_[1,2]> = E[B(1)(B(2)-B(1))] = (2^(2H) - 2)/2
  const std::vector<double> f{1.0, 0.0}, g{0.0, 1.0};
  CHECK(fbm_inner_product(f, g, 2.0, h) ==
        doctest::Approx(0.5 * (std::pow(2.0, 1.5) - 2.0)).epsilon(1e-13));
  CHECK(fbm_inner_product(f, g, 2.0, h) == doctest::Approx(0.41421356).epsilon(1e-6));
  // bilinearity: f = g = c 1_[0,1] scales by c^2
  const std::vector<double> fc{3.5};
  const std::vector<double> one{1.0};
  CHECK(fbm_inner_product(fc, fc, 1.0, h) ==
        doctest::Approx(3.5 * 3.5 * fbm_inner_product(one, one, 1.0, h)).epsilon(1e-13));
  CHECK_THROWS_AS(fbm_inner_product(f, g, 2.0, Hurst(0.5)), std::invalid_argument);
}

TEST_CASE("fbm inner product of indicators reproduces the covariance") {
  const Hurst h(0.8);
  const double T = 2.0;
  const int m = 64;
  GaussianStream rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int i = 1 + static_cast<int>(rng.uniform(0.0, m - 1.0));
    const int j = 1 + static_cast<int>(rng.uniform(0.0, m - 1.0));
    std::vector<double> f(m, 0.0), g(m, 0.0);
    for (int k = 0; k < i; ++k) f[k] = 1.0;
    for (int k = 0; k < j; ++k) g[k] = 1.0;
    const double s = T * i / m;
    const double t = T * j / m;
    CHECK(fbm_inner_product(f, g, T, h) ==
          doctest::Approx(fbm_covariance(s, t, h)).epsilon(1e-6));
  }
}

TEST_CASE("volterra and cholesky samplers agree in law (terminal variance)") {
  const TimeGrid grid(1.0, 32);
  const Hurst h(0.75);
  const FbmVolterraSampler volt(grid, h);
  const FbmCholeskySampler chol(grid, h);
  oracles::RunningMoments v_volt, v_chol;
  for (int p = 0; p < 4000; ++p) {
    v_volt.add(std::pow(volt.sample(derive_stream(7, p)).values.back(), 2.0));
    v_chol.add(std::pow(chol.sample(derive_stream(8, p)).values.back(), 2.0));
  }
  const double bias = std::fabs(volt.discrete_covariance(32, 32) - 1.0);
  CHECK(std::fabs(v_volt.mean() - v_chol.mean()) <=
        5.0 * std::sqrt(v_volt.se_mean() * v_volt.se_mean() +
                        v_chol.se_mean() * v_chol.se_mean()) +
            bias);
}

TEST_CASE("path csv export format") {
  const TimeGrid grid(1.0, 4);
  const FbmPath path = sample_fbm_cholesky(grid, Hurst(0.6), 5);
  const auto tmp = std::filesystem::temp_directory_path() / "frachh_path_test.csv";
  write_fbm_path_csv(tmp, path);
  std::ifstream in(tmp);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,value");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 5);
  std::filesystem::remove(tmp);
}
