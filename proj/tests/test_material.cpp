#include <cmath>

#include "coolopt/material.hpp"
#include "doctest.h"

using namespace coolopt;

TEST_CASE("RAMP alpha endpoints and midpoint") {
  RampParameters p;
  p.alpha_f = 0.0;
  p.alpha_s = 1e7;
  p.q_f = 10.0;
  CHECK(alpha_of(1.0, p).v == doctest::Approx(p.alpha_f).epsilon(1e-14));
  CHECK(alpha_of(0.0, p).v == doctest::Approx(p.alpha_s).epsilon(1e-14));
  CHECK(alpha_of(0.5, p).v == doctest::Approx(1e7 * 0.5 / 6.0).epsilon(1e-12));
}

TEST_CASE("RAMP conductivity with Table-1 endpoints") {
  RampParameters p;
  p.q_k = 1.0;
  const double k_f = 0.598, k_s = 149.0;
  CHECK(kt_of(1.0, p, k_f, k_s).v == doctest::Approx(0.598).epsilon(1e-14));
  CHECK(kt_of(0.0, p, k_f, k_s).v == doctest::Approx(149.0).epsilon(1e-14));
  CHECK(kt_of(0.5, p, k_f, k_s).v ==
        doctest::Approx(0.598 + 148.402 * (0.5 / 1.5)).epsilon(1e-12));
}

TEST_CASE("RAMP interfacial coefficient and layer thickness") {
  RampParameters p;
  p.h_f = 2000.0;
  p.h_s = 10000.0;
  p.q_h = 1.0;
  p.Ht_f = 4e-4;
  p.Ht_s = 6e-4;
  p.q_H = 1.0;
  CHECK(h_of(1.0, p).v == doctest::Approx(2000.0));
  CHECK(h_of(0.0, p).v == doctest::Approx(10000.0));
  CHECK(h_of(0.5, p).v == doctest::Approx(2000.0 + 8000.0 / 3.0).epsilon(1e-12));
  CHECK(Ht_of(1.0, p).v == doctest::Approx(4e-4));
  CHECK(Ht_of(0.0, p).v == doctest::Approx(6e-4));
}

TEST_CASE("analytic RAMP derivatives match finite differences") {
  RampParameters p;
  p.alpha_f = 0.0;
  p.alpha_s = 1e8;
  p.q_f = 10.0;
  p.h_f = 1.2e4;
  p.h_s = 1.5e6;
  p.Ht_f = 1e-4;
  p.Ht_s = 2e-4;
  const double step = 1e-6;
  for (int i = 0; i <= 50; ++i) {
    const double g = step + (1.0 - 2.0 * step) * i / 50.0;
    auto check = [&](auto fn) {
      const auto mid = fn(g);
      const double fd = (fn(g + step).v - fn(g - step).v) / (2.0 * step);
      CHECK(mid.dv == doctest::Approx(fd).epsilon(1e-8));
    };
    check([&](double x) { return alpha_of(x, p); });
    check([&](double x) { return kt_of(x, p, 0.598, 149.0); });
    check([&](double x) { return h_of(x, p); });
    check([&](double x) { return Ht_of(x, p); });
  }
}

TEST_CASE("interpolants are monotone and bounded by endpoints") {
  RampParameters p;
  p.alpha_f = 1.0;
  p.alpha_s = 1e6;
  p.q_f = 8.0;
  double prev = alpha_of(0.0, p).v;
  for (int i = 1; i <= 100; ++i) {
    const double g = i / 100.0;
    const double v = alpha_of(g, p).v;
    CHECK(v <= prev);  // decreasing toward the fluid value
    CHECK(v <= p.alpha_s);
    CHECK(v >= p.alpha_f);
    prev = v;
  }
}
