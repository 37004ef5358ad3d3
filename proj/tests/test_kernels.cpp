#include "doctest.h"

#include <cstring>
#include <random>
#include <vector>

#include "fusekit/kernels.hpp"

namespace k = fusekit::kernels;

namespace {

std::vector<double> random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::vector<double> v(n * m);
  for (auto& x : v) x = static_cast<double>(rng() >> 11) * 0x1p-53;
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  std::mt19937_64 rng(5);
  for (std::size_t m : {1u, 2u, 3u, 4u, 7u}) {
    const std::size_t n = 5003;
    const auto matrix = random_matrix(rng, n, m);
    std::vector<double> w(m);
    for (auto& x : w) x = 0.5 + static_cast<double>(rng() % 1000) / 1000.0;

    std::vector<double> par(n), ser(n);
    k::weighted_rows(matrix, m, w, par);
    k::serial::weighted_rows(matrix, m, w, ser);
    CHECK(bitwise_equal(par, ser));

    k::mean_rows(matrix, m, par);
    k::serial::mean_rows(matrix, m, ser);
    CHECK(bitwise_equal(par, ser));

    std::vector<std::uint8_t> vp(n), vs(n);
    k::majority_rows(matrix, m, 0.5, vp);
    k::serial::majority_rows(matrix, m, 0.5, vs);
    CHECK(vp == vs);

    k::threshold_column(matrix, m, m - 1, 0.3, vp);
    k::serial::threshold_column(matrix, m, m - 1, 0.3, vs);
    CHECK(vp == vs);

    std::vector<std::uint8_t> truth(n);
    for (auto& t : truth) t = static_cast<std::uint8_t>(rng() & 1);
    CHECK(k::count_confusion(truth, vp) == k::serial::count_confusion(truth, vs));
  }
}

TEST_CASE("threshold_all") {
  const std::vector<double> s = {0.0, 0.49, 0.5, 0.51, 1.0};
  std::vector<std::uint8_t> out(s.size());
  k::threshold_all(s, 0.5, out);
  CHECK(out == std::vector<std::uint8_t>{0, 0, 1, 1, 1});
  std::vector<std::uint8_t> ref(s.size());
  k::serial::threshold_all(s, 0.5, ref);
  CHECK(out == ref);
}

TEST_CASE("count_confusion totals") {
  const std::vector<std::uint8_t> truth = {0, 0, 1, 1, 1};
  const std::vector<std::uint8_t> pred = {0, 1, 1, 0, 1};
  const auto c = k::count_confusion(truth, pred);
  CHECK(c[0][0] == 1);
  CHECK(c[0][1] == 1);
  CHECK(c[1][0] == 1);
  CHECK(c[1][1] == 2);
}
