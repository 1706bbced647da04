#include <cmath>

#include "doctest.h"
#include "platelab/geometry.hpp"

using namespace platelab;

TEST_SUITE("geometry") {
  TEST_CASE("interval layout") {
    GridDomain d = build_interval(1.0, 8);
    CHECK(d.dim == 1);
    CHECK(d.h == doctest::Approx(0.125));
    CHECK(d.lattice_size() == 9);
    CHECK(d.interior_count() == 7);
    CHECK(d.kind[0] == NodeKind::boundary);
    CHECK(d.kind[8] == NodeKind::boundary);
    CHECK(d.cell_weight() == doctest::Approx(0.125));
    CHECK(d.interior_point(0)[0] == doctest::Approx(0.125));
    CHECK_THROWS_AS(build_interval(0.0, 8), DomainError);
    CHECK_THROWS_AS(build_interval(1.0, 4), DomainError);
  }

  TEST_CASE("square layout") {
    GridDomain d = build_rectangle(1.0, 1.0, 8, 8);
    CHECK(d.interior_count() == 49);
    CHECK(d.cell_weight() == doctest::Approx(1.0 / 64.0));
    int boundary = 0;
    for (auto k : d.kind) boundary += k == NodeKind::boundary;
    CHECK(boundary == 32);
    CHECK(d.kind[0] == NodeKind::boundary);  // corner
  }

  TEST_CASE("rectangle spacing mismatch is rejected") {
    CHECK_THROWS_AS(build_rectangle(1.0, 1.0, 8, 9), DomainError);
    GridDomain d = build_rectangle(2.0, 1.0, 16, 8);  // equal spacing, fine
    CHECK(d.h == doctest::Approx(0.125));
    CHECK(d.interior_count() == 15 * 7);
  }

  TEST_CASE("disk interior census") {
    GridDomain d = build_disk(1.0, 16);
    CHECK(d.interior_count() == 177);
    CHECK_THROWS_AS(build_disk(1.0, 12), DomainError);
    CHECK_THROWS_AS(build_disk(-1.0, 16), DomainError);
    for (std::size_t i = 0; i < d.interior_count(); ++i) {
      Point p = d.interior_point(i);
      CHECK(std::hypot(p[0], p[1]) < 1.0);
    }
  }

  TEST_CASE("translated copies shift coordinates only") {
    GridDomain d = build_rectangle(1.0, 1.0, 8, 8);
    GridDomain t = d.translated({3.0, -7.0});
    CHECK(t.interior_count() == d.interior_count());
    Point a = d.interior_point(5), b = t.interior_point(5);
    CHECK(b[0] == doctest::Approx(a[0] + 3.0));
    CHECK(b[1] == doctest::Approx(a[1] - 7.0));
  }

  TEST_CASE("tensor field values") {
    TensorField id = identity_field();
    auto v = id.value({0.3, 0.4});
    CHECK(v[0] == 1.0);
    CHECK(v[1] == 0.0);
    CHECK(v[3] == 1.0);

    TensorField diag = diagonal_field([](const Point&) { return 2.0; },
                                      [](const Point&) { return 1.0; });
    auto w = diag.value({0.1, 0.2});
    CHECK(w[0] == 2.0);
    CHECK(w[3] == 1.0);

    double th = 0.78539816339744831;  // pi/4
    TensorField rot = rotated_field([th](const Point&) { return th; },
                                    [](const Point&) { return 2.0; },
                                    [](const Point&) { return 1.0; });
    auto r = rot.value({0.0, 0.0});
    CHECK(r[0] == doctest::Approx(1.5));
    CHECK(r[1] == doctest::Approx(0.5));
    CHECK(r[3] == doctest::Approx(1.5));
  }

  TEST_CASE("divergence row of a varying tensor") {
    TensorField f = diagonal_field([](const Point& p) { return 1.0 + 0.5 * p[0]; },
                                   [](const Point&) { return 1.0; }, 2, 1e-4);
    Point tr = trace_nabla_T(f, {0.3, 0.6});
    CHECK(tr[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(tr[1] == doctest::Approx(0.0).epsilon(1e-6));
  }

  TEST_CASE("geometric constants on the unit square") {
    GridDomain d = build_rectangle(1.0, 1.0, 8, 8);
    TensorField id = identity_field();
    GeometricConstants c = geometric_constants(d, id);
    CHECK(c.n == 2);
    CHECK(c.m == 2);
    CHECK(c.S0 == 0.0);
    CHECK(c.H0 == 0.0);
    CHECK(c.T_star == doctest::Approx(1.0));
    CHECK(c.T0 == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(c.I0 == doctest::Approx(std::sqrt(2.0)));  // far corner of the lattice

    ConstantOverrides ov;
    ov.H0 = 0.25;
    ov.m = 3;
    GeometricConstants c2 = geometric_constants(d, id, ov);
    CHECK(c2.H0 == 0.25);
    CHECK(c2.m == 3);

    ConstantOverrides bad;
    bad.S0 = -1.0;
    CHECK_THROWS_AS(geometric_constants(d, id, bad), DomainError);
    ConstantOverrides badm;
    badm.m = 1;
    CHECK_THROWS_AS(geometric_constants(d, id, badm), DomainError);
  }
}
