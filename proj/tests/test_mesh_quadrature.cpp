#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "wbcol/mesh.hpp"

using namespace wbcol;

TEST_CASE("uniform mesh geometry") {
  Mesh m = make_uniform_mesh(0.0, 3.0, 3);
  CHECK(m.dx == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.cell_center(0) == doctest::Approx(0.5));
  CHECK(m.cell_center(1) == doctest::Approx(1.5));
  CHECK(m.cell_center(2) == doctest::Approx(2.5));

  Mesh fine = make_uniform_mesh(-1.0, 1.0, 200);
  CHECK(fine.dx == doctest::Approx(0.01).epsilon(1e-15));

  Mesh unit = make_uniform_mesh(0.0, 1.0, 100);
  CHECK(unit.interface(100) == 1.0);  // exact endpoint
  CHECK(unit.interface(0) == 0.0);

  for (int i = 0; i < 100; ++i)
    CHECK(unit.interface(i + 1) - unit.interface(i) ==
          doctest::Approx(unit.dx).epsilon(1e-12));

  CHECK_THROWS_AS(make_uniform_mesh(1.0, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(make_uniform_mesh(2.0, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(make_uniform_mesh(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("gauss-legendre rules") {
  auto r1 = gauss_legendre_rule(1);
  CHECK(r1.node[0] == 0.5);
  CHECK(r1.weight[0] == 1.0);

  auto r2 = gauss_legendre_rule(2);
  CHECK(r2.node[0] == doctest::Approx(0.2113248654).epsilon(1e-9));
  CHECK(r2.node[1] == doctest::Approx(0.7886751346).epsilon(1e-9));
  CHECK(r2.node[0] < r2.node[1]);

  for (auto& r : {r1, r2}) {
    double wsum = 0.0;
    for (int m = 0; m < r.stages; ++m) wsum += r.weight[m];
    CHECK(std::fabs(wsum - 1.0) <= 1e-15);
  }

  // 2-stage rule integrates monomials up to degree 3 on [0,1] exactly
  for (int p = 0; p <= 3; ++p) {
    double q = 0.0;
    for (int m = 0; m < 2; ++m) q += r2.weight[m] * std::pow(r2.node[m], p);
    CHECK(std::fabs(q - 1.0 / (p + 1)) <= 1e-14);
  }

  CHECK_THROWS_AS(gauss_legendre_rule(3), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre_rule(0), std::invalid_argument);
}

TEST_CASE("quadrature averages") {
  auto r2 = gauss_legendre_rule(2);

  StateVec c{4.25};
  StateVec vals_const[2] = {c, c};
  CHECK(quadrature_average(std::span<const StateVec>(vals_const, 2), r2)[0] ==
        doctest::Approx(4.25).epsilon(1e-15));

  StateVec vals01[2] = {StateVec{0.0}, StateVec{1.0}};
  CHECK(quadrature_average(std::span<const StateVec>(vals01, 2), r2)[0] ==
        doctest::Approx(0.5).epsilon(1e-15));

  // e^x over [0, 0.1] against the closed-form average
  Mesh m = make_uniform_mesh(0.0, 0.1, 1);
  StateVec ve[2];
  for (int k = 0; k < 2; ++k) ve[k] = StateVec{std::exp(r2.physical_node(m, 0, k))};
  const double gauss = quadrature_average(std::span<const StateVec>(ve, 2), r2)[0];
  const double exact = (std::exp(0.1) - 1.0) / 0.1;
  CHECK(std::fabs(gauss - exact) <= 5e-8);  // dx^4/4320 * e^x ~ 2.4e-8

  StateVec one[1] = {StateVec{1.0}};
  CHECK_THROWS_AS(quadrature_average(std::span<const StateVec>(one, 1), r2),
                  std::invalid_argument);
}
