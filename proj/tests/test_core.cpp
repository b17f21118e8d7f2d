#include <doctest.h>

#include <cmath>
#include <random>

#include "core/image.hpp"
#include "core/ops.hpp"

using namespace tide;
using namespace tide::core;

namespace {

Map2D make_map(int w, int h, std::initializer_list<double> values) {
  Map2D m(w, h);
  size_t i = 0;
  for (double v : values) m.v[i++] = v;
  return m;
}

}  // namespace

TEST_CASE("normalize_map: affine normalization") {
  auto out = normalize_map(make_map(2, 2, {0, 2, 4, 2}));
  CHECK(out.map.at(0, 0) == doctest::Approx(0.0));
  CHECK(out.map.at(1, 0) == doctest::Approx(0.5));
  CHECK(out.map.at(0, 1) == doctest::Approx(1.0));
  CHECK(out.map.at(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("normalize_map: constant map becomes all zeros") {
  auto out = normalize_map(make_map(2, 2, {3, 3, 3, 3}));
  for (double v : out.map.v) CHECK(v == 0.0);
}

TEST_CASE("normalize_map: random maps hit [0,1] and preserve order") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    Map2D m(8, 8);
    for (double& v : m.v) v = dist(rng);
    auto out = normalize_map(m);
    double mn = 2.0, mx = -1.0;
    for (double v : out.map.v) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    CHECK(mn == doctest::Approx(0.0));
    CHECK(mx == doctest::Approx(1.0));
    // Direct-formula oracle, order preservation included.
    auto [lo_it, hi_it] = std::minmax_element(m.v.begin(), m.v.end());
    for (size_t i = 0; i < m.v.size(); ++i) {
      CHECK(out.map.v[i] ==
            doctest::Approx((m.v[i] - *lo_it) / (*hi_it - *lo_it)));
      for (size_t j = 0; j < m.v.size(); ++j) {
        if (m.v[i] < m.v[j]) CHECK(out.map.v[i] <= out.map.v[j]);
      }
    }
  }
}

TEST_CASE("normalize_map: rejects non-finite input") {
  auto m = make_map(1, 2, {0.0, std::nan("")});
  CHECK_THROWS_AS(normalize_map(m), Error);
  try {
    normalize_map(m);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidInput);
  }
}

TEST_CASE("normalize_map: idempotent on normalized non-constant maps") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Map2D m(5, 5);
    for (double& v : m.v) v = dist(rng);
    auto once = normalize_map(m);
    auto twice = normalize_map(once.map);
    for (size_t i = 0; i < once.map.v.size(); ++i) {
      CHECK(twice.map.v[i] == doctest::Approx(once.map.v[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("binarize: threshold comparison") {
  SaliencyMap s;
  s.map = make_map(2, 1, {0.2, 0.9});
  auto mask = binarize(s, 0.5);
  CHECK(mask.at(0, 0) == 0);
  CHECK(mask.at(1, 0) == 1);
}

TEST_CASE("binarize: all-zero map gives all-zero mask") {
  SaliencyMap s;
  s.map = Map2D(3, 3, 0.0);
  auto mask = binarize(s, 0.5);
  CHECK(mask.count() == 0);
}

TEST_CASE("binarize: matches elementwise oracle and is monotone in t") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  SaliencyMap s;
  s.map = Map2D(6, 6);
  for (double& v : s.map.v) v = dist(rng);

  auto m1 = binarize(s, 0.5);
  for (size_t i = 0; i < s.map.v.size(); ++i) {
    CHECK(m1.v[i] == (s.map.v[i] >= 0.5 ? 1 : 0));
  }
  // Raising the threshold never turns a 0 into a 1.
  for (double t : {0.55, 0.7, 0.9}) {
    auto m2 = binarize(s, t);
    for (size_t i = 0; i < s.map.v.size(); ++i) {
      CHECK(m2.v[i] <= m1.v[i]);
    }
  }
}

TEST_CASE("binarize: threshold bounds") {
  SaliencyMap s;
  s.map = Map2D(2, 2, 0.5);
  CHECK_THROWS_AS(binarize(s, 0.0), Error);
  CHECK_THROWS_AS(binarize(s, 1.0), Error);
  CHECK_THROWS_AS(binarize(s, -0.3), Error);
  try {
    binarize(s, 1.5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidConfig);
  }
}

TEST_CASE("cosine_distance: fixed values") {
  const std::vector<double> a{1, 2, 3};
  CHECK(cosine_distance(a, a) == doctest::Approx(0.0));
  const std::vector<double> e1{1, 0}, e2{0, 1}, d{1, 1};
  CHECK(cosine_distance(e1, e2) == doctest::Approx(1.0));
  CHECK(cosine_distance(e1, d) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)));
}

TEST_CASE("cosine_distance: zero norm raises ZeroNormError") {
  const std::vector<double> z{0, 0}, a{1, 2};
  CHECK_THROWS_AS(cosine_distance(z, a), Error);
  try {
    cosine_distance(a, z);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kZeroNorm);
  }
}

TEST_CASE("cosine_distance: symmetric and scale invariant") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(8), b(8);
    for (double& v : a) v = dist(rng);
    for (double& v : b) v = dist(rng);
    const double d1 = cosine_distance(a, b);
    CHECK(d1 >= 0.0);
    CHECK(d1 <= 2.0);
    CHECK(cosine_distance(b, a) == doctest::Approx(d1));
    const double lambda = scale(rng);
    std::vector<double> a2 = a;
    for (double& v : a2) v *= lambda;
    CHECK(cosine_distance(a2, b) == doctest::Approx(d1).epsilon(1e-9));
  }
}

TEST_CASE("euclidean_distance: fixed values and oracle") {
  const std::vector<double> a{1, 2, 3};
  CHECK(euclidean_distance(a, a) == doctest::Approx(0.0));
  const std::vector<double> o{0, 0}, p{3, 4};
  CHECK(euclidean_distance(o, p) == doctest::Approx(5.0));

  std::mt19937_64 rng(29);
  std::normal_distribution<double> dist(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(6), y(6);
    for (double& v : x) v = dist(rng);
    for (double& v : y) v = dist(rng);
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    CHECK(euclidean_distance(x, y) == doctest::Approx(std::sqrt(s)));
  }
}

TEST_CASE("euclidean_distance: triangle inequality on sampled triples") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> dist(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(5), b(5), c(5);
    for (double& v : a) v = dist(rng);
    for (double& v : b) v = dist(rng);
    for (double& v : c) v = dist(rng);
    CHECK(euclidean_distance(a, c) <=
          euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-12);
  }
}

TEST_CASE("euclidean_distance: length mismatch") {
  const std::vector<double> a{1, 2, 3}, b{1, 2};
  CHECK_THROWS_AS(euclidean_distance(a, b), Error);
}

TEST_CASE("ppm/pgm round trip is exact for 8-bit data") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> byte(0, 255);
  Image img(9, 7);
  for (double& v : img.v) v = byte(rng) / 255.0;
  auto dir = std::filesystem::temp_directory_path() / "tide_core_test";
  std::filesystem::create_directories(dir);
  write_ppm(img, dir / "t.ppm");
  auto back = read_ppm(dir / "t.ppm");
  REQUIRE(back.v.size() == img.v.size());
  for (size_t i = 0; i < img.v.size(); ++i) CHECK(back.v[i] == img.v[i]);

  ConceptMask mask(7, 7, 3);
  for (auto& b : mask.v) b = byte(rng) % 2;
  write_mask_pgm(mask, dir / "t.pgm");
  auto mask_back = read_mask_pgm(dir / "t.pgm");
  for (size_t i = 0; i < mask.v.size(); ++i) CHECK(mask_back.v[i] == mask.v[i]);
  std::filesystem::remove_all(dir);
}
