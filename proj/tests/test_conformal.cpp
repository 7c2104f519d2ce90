#include <doctest.h>

#include <cmath>
#include <random>

#include "liouville/conformal.hpp"
#include "liouville/errors.hpp"
#include "liouville/profiles.hpp"

using namespace liouville;

TEST_SUITE("conformal") {

TEST_CASE("psi_map examples") {
  auto d = psi_map({0.0, 1.0});
  CHECK(std::abs(d.x) < 1e-15);
  CHECK(std::abs(d.y) < 1e-15);
  d = psi_map({0.8, 0.6});
  CHECK(d.x == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(d.y) < 1e-15);
  d = psi_map({1e8, 1e8});
  CHECK(std::abs(d.x) < 1e-7);
  CHECK(d.y == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("phi_map examples") {
  auto p = phi_map({0.0, 0.0});
  CHECK(std::abs(p.xi) < 1e-15);
  CHECK(p.mu == doctest::Approx(1.0));
  p = phi_map({0.5, 0.0});
  CHECK(p.xi == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(p.mu == doctest::Approx(0.6).epsilon(1e-15));
  CHECK_THROWS_AS(phi_map({0.0, 1.0}), DomainError);
}

TEST_CASE("round trip on random interior points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int tested = 0;
  while (tested < 1000) {
    const DiskPoint q{u(rng), u(rng)};
    if (q.x * q.x + q.y * q.y >= 0.98) continue;
    const auto r = psi_map(phi_map(q));
    CHECK(std::abs(r.x - q.x) < 1e-12);
    CHECK(std::abs(r.y - q.y) < 1e-12);
    ++tested;
  }
}

TEST_CASE("boundary goes to the unit circle") {
  for (double xi = -1e3; xi <= 1e3; xi += 7.3) {
    const auto d = psi_map({xi, 0.0});
    CHECK(std::abs(std::hypot(d.x, d.y) - 1.0) < 1e-14);
  }
}

TEST_CASE("pullbacks") {
  const auto k = pullback_profile(disk_harmonic("g1"));
  for (double x : {-3.0, -1.0, 0.0, 0.4, 2.5}) {
    CHECK(k(x) == doctest::Approx(8 * x * x / std::pow(1 + x * x, 2)).epsilon(1e-13));
    const double d1 = 16 * x * (1 - x * x) / std::pow(1 + x * x, 3);
    CHECK(std::abs(k.deriv1(x) - d1) < 1e-13);
  }
  const auto c = pullback_profile(disk_harmonic("const", {{"c", 2.5}}));
  for (double x : {-10.0, 0.0, 3.0}) {
    CHECK(c(x) == doctest::Approx(2.5));
    CHECK(std::abs(c.deriv1(x)) < 1e-15);
  }
  const auto kna = pullback_profile(disk_harmonic("kNa-ext", {{"N", 3}, {"a", 0.5}}));
  CHECK(validate_hypotheses(kna).decay_sign == Verdict::Pass);
}

TEST_CASE("disk harmonic critical points") {
  const auto g2 = disk_harmonic("g2");
  for (double x : {-0.5, 0.5}) {
    const auto g = g2.gradient({x, 0.0});
    CHECK(std::abs(g[0]) < 1e-14);
    CHECK(std::abs(g[1]) < 1e-14);
  }
  const auto g1 = disk_harmonic("g1");
  const auto g = g1.gradient({0.0, 0.0});
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  const auto h = g1.hessian({0.0, 0.0});
  CHECK(h[0][0] == doctest::Approx(2.0));
  CHECK(h[1][1] == doctest::Approx(-2.0));
  CHECK(h[0][1] == 0.0);

  // zeros at the cube roots of i/2 = -i^3 a
  const auto kna = disk_harmonic("kNa-ext", {{"N", 3}, {"a", 0.5}});
  const auto pts = kna.critical_points();
  REQUIRE(pts.size() == 3);
  for (const auto& p : pts) {
    const std::complex<double> z(p.x, p.y);
    const auto z3 = z * z * z;
    CHECK(std::abs(z3 - std::complex<double>(0.0, 0.5)) < 1e-12);
    const auto gr = kna.gradient(p);
    CHECK(std::hypot(gr[0], gr[1]) < 1e-12);
  }
  CHECK_THROWS_AS(disk_harmonic("g9"), ValidationError);
}

TEST_CASE("disk harmonics have zero discrete Laplacian") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  const double h = 1e-3;
  for (const char* name : {"g1", "g2", "g3"}) {
    const auto f = disk_harmonic(name);
    for (int k = 0; k < 100; ++k) {
      const DiskPoint p{u(rng), u(rng)};
      const double lap = f.value({p.x + h, p.y}) + f.value({p.x - h, p.y}) +
                         f.value({p.x, p.y + h}) + f.value({p.x, p.y - h}) - 4 * f.value(p);
      CHECK(std::abs(lap) < 1e-8);  // i.e. < 1e-8 h^-2 after scaling by h^2
      const auto H = f.hessian(p);
      CHECK(std::abs(H[0][0] + H[1][1]) < 1e-12);
    }
  }
}

}
