#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dualot/core.hpp"
#include "dualot/cost_kernel.hpp"
#include "dualot/image_io.hpp"
#include "support.hpp"

using namespace dualot;

TEST_CASE("lse of zeros is log n") {
  const std::vector<double> v(4, 0.0);
  CHECK(lse(v) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(std::abs(lse(v) - 1.3862944) < 1e-7);
}

TEST_CASE("lse ignores -inf entries and returns -inf when all are") {
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(lse(std::vector<double>{ninf, 0.0}) == 0.0);
  CHECK(lse(std::vector<double>{ninf, ninf}) == ninf);
  CHECK_THROWS_AS(lse(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("lse shift identity") {
  testing::Rng rng(11);
  std::normal_distribution<double> g(0.0, 30.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + trial % 17);
    for (double& x : v) x = g(rng);
    const double shift = g(rng);
    auto w = v;
    for (double& x : w) x += shift;
    CHECK(std::abs(lse(w) - (lse(v) + shift)) <= 1e-12 * std::max(1.0, std::abs(lse(w))));
  }
  std::vector<double> v{0.3, -1.2, 2.5};
  auto w = v;
  for (double& x : w) x += 5.0;
  CHECK(std::abs(lse(w) - lse(v) - 5.0) < 1e-12);
}

TEST_CASE("lse does not overflow") {
  CHECK(lse(std::vector<double>{1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(lse(std::vector<double>{-1000.0, -1000.0}) == doctest::Approx(-1000.0 + std::log(2.0)));
}

TEST_CASE("kl divergence values") {
  const std::vector<double> p{0.2, 0.3, 0.5};
  CHECK(kl_divergence(p, p) == 0.0);
  CHECK(kl_divergence(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const double expect = 0.75 * std::log(1.5) + 0.25 * std::log(0.5);
  const double got = kl_divergence(std::vector<double>{0.75, 0.25}, std::vector<double>{0.5, 0.5});
  CHECK(got == doctest::Approx(expect).epsilon(1e-15));
  CHECK(std::abs(got - 0.130812) < 1e-6);
}

TEST_CASE("kl divergence rejects unsupported mass") {
  CHECK_THROWS_AS(kl_divergence(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0}), std::domain_error);
}

TEST_CASE("kl divergence is positive off the diagonal") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = testing::random_histogram(6, rng);
    const auto b = testing::random_histogram(6, rng);
    CHECK(kl_divergence(a.weights(), b.weights()) > 0.0);
  }
}

TEST_CASE("entropy values") {
  for (std::size_t n : {1u, 2u, 7u, 64u}) {
    const auto u = Histogram::uniform(n);
    CHECK(entropy(u.weights()) == doctest::Approx(std::log(static_cast<double>(n))).epsilon(1e-14));
  }
  CHECK(entropy(std::vector<double>{0.0, 1.0, 0.0}) == 0.0);
}

TEST_CASE("entropy decomposes over rows") {
  testing::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 9;
    const auto r = testing::random_histogram(n, rng);
    std::vector<double> joint(n * n);
    double rows = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = testing::random_histogram(n, rng, 0.0);
      rows += r[i] * entropy(p.weights());
      for (std::size_t j = 0; j < n; ++j) joint[i * n + j] = r[i] * p[j];
    }
    CHECK(std::abs(entropy(joint) - entropy(r.weights()) - rows) < 1e-12);
  }
}

TEST_CASE("histogram validation") {
  CHECK_NOTHROW(Histogram(std::vector<double>{0.25, 0.75}));
  CHECK_THROWS_AS(Histogram(std::vector<double>{0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Histogram(std::vector<double>{-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(Histogram(std::vector<double>{NAN, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Histogram::normalized({0.0, 0.0}), std::invalid_argument);
  CHECK(Histogram(std::vector<double>{0.0, 1.0}).full_support() == false);
  CHECK(Histogram(std::vector<double>{0.5, 0.5}).full_support());
  const auto h = Histogram::normalized({1.0, 3.0});
  CHECK(h[0] == 0.25);
  CHECK(h.min() == 0.25);
}

TEST_CASE("image ingestion") {
  const auto flat = ingest_image_histogram(std::vector<double>{1, 1, 1, 1}, 0.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(flat[i] == 0.25);

  const auto spike = ingest_image_histogram(std::vector<double>{1, 0, 0, 0}, 1e-6);
  const double z = 1.0 + 4e-6;
  CHECK(spike[0] == doctest::Approx((1.0 + 1e-6) / z).epsilon(1e-15));
  for (std::size_t i = 1; i < 4; ++i) CHECK(spike[i] == doctest::Approx(1e-6 / z).epsilon(1e-15));
  CHECK(spike.full_support());

  const auto holes = ingest_image_histogram(std::vector<double>{2, 0, 1, 1}, 0.0);
  CHECK(holes[1] == 0.0);
  CHECK_FALSE(holes.full_support());

  CHECK_THROWS_AS(ingest_image_histogram(std::vector<double>{0, 0, 0}, 0.0), std::invalid_argument);
}

TEST_CASE("ingested histograms sum to one and keep row-major order") {
  testing::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto px = testing::random_positive(64, rng, 0.0, 255.0);
    const auto h = ingest_image_histogram(px);
    CHECK(std::abs(testing::sum(h.vector()) - 1.0) <= 1e-12);
    for (std::size_t i = 1; i < px.size(); ++i) CHECK(((px[i] > px[i - 1]) == (h[i] > h[i - 1])));
  }
}

TEST_CASE("grid kernel values") {
  const auto k = CostKernel::grid(2, 2, 1);
  for (std::size_t i = 0; i < 4; ++i) CHECK(k(i, i) == 0.0);
  CHECK(k(0, 3) == 1.0);
  CHECK(k.raw_sup() == 2.0);
  CHECK(k.sup() == 1.0);

  const auto line = CostKernel::grid(1, 3, 2);
  CHECK(line(0, 1) == doctest::Approx(0.25 * line(0, 2)).epsilon(1e-15));
  CHECK(line(0, 2) == 1.0);
}

TEST_CASE("grid indexing is row-major") {
  const auto k = CostKernel::grid(4, 3, 1);
  // point 5 is (1, 1); point 11 is (2, 3); |dr| + |dc| = 1 + 2
  CHECK(k(5, 11) * k.raw_sup() == doctest::Approx(3.0));
  CHECK(k.raw_sup() == doctest::Approx(2.0 + 3.0));
}

TEST_CASE("kernels are symmetric and bounded") {
  testing::Rng rng(2);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  std::vector<std::array<double, 3>> feats(20);
  for (auto& f : feats) f = {u(rng), u(rng), u(rng)};
  for (const auto& k : {CostKernel::grid(5, 4, 1), CostKernel::grid(5, 4, 2), CostKernel::grid(3, 7, 3),
                        CostKernel::color(feats, 2), CostKernel::color(feats, 1)}) {
    CHECK(k.symmetric());
    double top = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      for (std::size_t j = 0; j < k.size(); ++j) {
        CHECK(k(i, j) == k(j, i));
        CHECK(k(i, j) >= 0.0);
        CHECK(k(i, j) <= 1.0);
        top = std::max(top, k(i, j));
      }
    }
    CHECK(top == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("explicit kernel normalizes and respects the dense cap") {
  const auto k = CostKernel::explicit_matrix({0, 4, 2, 0}, 2);
  CHECK(k.raw_sup() == 4.0);
  CHECK(k(0, 1) == 1.0);
  CHECK(k(1, 0) == 0.5);
  CHECK_FALSE(k.symmetric());
  CHECK_THROWS_AS(CostKernel::explicit_matrix(std::vector<double>(9, 1.0), 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(CostKernel::explicit_matrix({0, -1, 1, 0}, 2), std::invalid_argument);
  const auto zero = CostKernel::explicit_matrix(std::vector<double>(4, 0.0), 2);
  CHECK(zero.sup() == 0.0);
  CHECK(zero(0, 1) == 0.0);
}

TEST_CASE("kernel rows and columns agree with entries") {
  const auto k = CostKernel::grid(4, 4, 2);
  std::vector<double> row(16), col(16);
  k.row(6, row);
  k.column(6, col);
  for (std::size_t j = 0; j < 16; ++j) {
    CHECK(row[j] == k(6, j));
    CHECK(col[j] == k(j, 6));
  }
  const auto d = k.dense();
  CHECK(d(3, 9) == k(3, 9));
}

TEST_CASE("pgm round trip and downsampling") {
  const auto dir = std::filesystem::temp_directory_path() / "dualot_test_core";
  std::filesystem::create_directories(dir);
  Image img{4, 2, 255, {0, 255, 10, 20, 255, 0, 30, 40}};
  for (bool ascii : {true, false}) {
    const auto path = dir / (ascii ? "a.pgm" : "b.pgm");
    write_pgm(path, img, ascii);
    const auto back = read_pgm(path);
    CHECK(back.width == 4);
    CHECK(back.height == 2);
    CHECK(back.pixels == img.pixels);
  }
  const auto half = downsample(img, 2);
  CHECK(half.width == 2);
  CHECK(half.height == 1);
  CHECK(half.pixels[0] == 127.5);
  CHECK(half.pixels[1] == 25.0);
  CHECK_THROWS(downsample(img, 3));
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv histograms accept an optional header") {
  const auto dir = std::filesystem::temp_directory_path() / "dualot_test_csv";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "h.csv") << "mass\n0.25\n0.75\n";
    std::ofstream(dir / "n.csv") << "0.5\n0.5\n";
  }
  CHECK(read_values_csv(dir / "h.csv") == std::vector<double>{0.25, 0.75});
  CHECK(read_values_csv(dir / "n.csv") == std::vector<double>{0.5, 0.5});
  const std::vector<double> v{0.1, 1.0 / 3.0};
  write_values_csv(dir / "w.csv", v, "mass");
  CHECK(read_values_csv(dir / "w.csv") == v);
  std::filesystem::remove_all(dir);
}
