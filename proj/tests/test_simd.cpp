#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "kdsim/simd/kernels.hpp"

using namespace kdsim::simd;

namespace {

std::vector<cplx> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& z : v) z = {U(rng), U(rng)};
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Every compiled-in vector table against the scalar reference.
std::vector<const KernelTable*> vector_tables() {
  std::vector<const KernelTable*> t;
  if (supported(Isa::avx2)) t.push_back(&table(Isa::avx2));
  return t;
}

const std::size_t kSizes[] = {0, 1, 3, 4, 7, 64, 1021};

}  // namespace

TEST_CASE("scalar reference is always available") {
  CHECK(supported(Isa::scalar));
  CHECK(&table(Isa::scalar) == &scalar_table());
  CHECK(to_string(active().isa) == std::string_view(active().name));
}

TEST_CASE("scalar sincos matches libm") {
  std::vector<double> x{0.0, 1e-8, 0.5, -3.0, 100.0, 1e5, -7.5e6};
  std::vector<double> s(x.size()), c(x.size());
  scalar_table().sincos(x.data(), s.data(), c.data(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(s[i] == std::sin(x[i]));
    CHECK(c[i] == std::cos(x[i]));
  }
}

TEST_CASE("vector kernels agree with the scalar reference") {
  const auto& ref = scalar_table();
  for (const KernelTable* vt : vector_tables()) {
    CAPTURE(vt->name);
    for (std::size_t n : kSizes) {
      CAPTURE(n);
      const auto u = random_vec(n, 1), v = random_vec(n, 2);

      SUBCASE("sincos over a wide argument range") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> U(-1e6, 1e6);
        std::vector<double> x(n), s1(n), c1(n), s2(n), c2(n);
        for (auto& t : x) t = U(rng);
        ref.sincos(x.data(), s1.data(), c1.data(), n);
        vt->sincos(x.data(), s2.data(), c2.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
          CHECK(std::abs(s1[i] - s2[i]) < 4e-15);
          CHECK(std::abs(c1[i] - c2[i]) < 4e-15);
        }
      }
      SUBCASE("complex multiply") {
        auto a = u, b = u;
        ref.complex_multiply(a.data(), v.data(), n);
        vt->complex_multiply(b.data(), v.data(), n);
        CHECK(max_diff(a, b) < 1e-15);
      }
      SUBCASE("spherical accumulate") {
        std::vector<cplx> a(n, {0.1, 0.2}), b(n, {0.1, 0.2});
        ref.spherical_accumulate(a.data(), n, -8e-6, 2e-9, 3e-7, {0.7, -0.1}, 2.56e11, 0.011);
        vt->spherical_accumulate(b.data(), n, -8e-6, 2e-9, 3e-7, {0.7, -0.1}, 2.56e11, 0.011);
        CHECK(max_diff(a, b) < 1e-12);
      }
      SUBCASE("standing wave phase") {
        auto a = u, b = u;
        ref.standing_wave_phase(a.data(), n, -32e-6, 1.95e-9, 1.18e7, 3e-8, 30.4);
        vt->standing_wave_phase(b.data(), n, -32e-6, 1.95e-9, 1.18e7, 3e-8, 30.4);
        // Arguments reach ~750 rad; reduction rounding is amplified by the depth.
        CHECK(max_diff(a, b) < 1e-11);
      }
      SUBCASE("intensity accumulation") {
        std::vector<double> a(n, 0.5), b(n, 0.5);
        ref.accumulate_intensity(a.data(), u.data(), n, 0.3);
        vt->accumulate_intensity(b.data(), u.data(), n, 0.3);
        for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
      }
      SUBCASE("rank-1 update on a row range") {
        std::vector<cplx> a(n * n), b(n * n);
        const std::size_t r0 = n / 3, r1 = n - n / 4;
        ref.rank1_update(a.data(), u.data(), n, r0, r1, 0.25);
        vt->rank1_update(b.data(), u.data(), n, r0, r1, 0.25);
        CHECK(max_diff(a, b) < 1e-15);
        for (std::size_t i = 0; i < r0 * n; ++i) CHECK(b[i] == cplx{});
      }
      SUBCASE("norm") {
        const double a = ref.norm2(u.data(), n), b = vt->norm2(u.data(), n);
        CHECK(a == doctest::Approx(b).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("reference kernels against direct formulas") {
  const auto& k = scalar_table();
  std::vector<cplx> rho(9);
  const std::vector<cplx> u{{1, 0}, {0, 1}, {2, -1}};
  k.rank1_update(rho.data(), u.data(), 3, 0, 3, 2.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(rho[i * 3 + j] - 2.0 * u[i] * std::conj(u[j])) < 1e-15);

  std::vector<cplx> w{{1, 0}};
  k.standing_wave_phase(w.data(), 1, 0.25, 0.0, 2.0, 0.0, 1.3);
  CHECK(std::abs(w[0] - std::exp(cplx(0, -1.3 * std::pow(std::cos(0.5), 2)))) < 1e-15);

  std::vector<cplx> s{{0, 0}};
  k.spherical_accumulate(s.data(), 1, 1e-6, 0.0, 0.0, {1, 0}, 1e10, 0.1);
  CHECK(std::abs(s[0] - std::exp(cplx(0, 1e10 * 1e-12 / (std::hypot(1e-6, 0.1) + 0.1)))) < 1e-12);
}
