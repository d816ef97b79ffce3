#include <doctest.h>

#include <cmath>
#include <random>

#include "arcflow/errors.hpp"
#include "arcflow/rescaling.hpp"
#include "arcflow/runner.hpp"
#include "oracles.hpp"

using namespace arcflow;
using oracle::pi;

namespace {

std::vector<BlowupHistorySample> history(double T, double t0, double t1, std::size_t n,
                                         double (*kappa)(double gap)) {
  std::vector<BlowupHistorySample> h;
  // Geometric in T − t so every decade is populated.
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n - 1);
    const double gap = (T - t0) * std::pow((T - t1) / (T - t0), u);
    h.push_back({T - gap, kappa(gap)});
  }
  return h;
}

FlowState circle_state(double r, double t, std::size_t n = 256) {
  FlowState s;
  s.curve = oracle::circle(r, n);
  s.t = t;
  s.attached = false;
  return s;
}

}  // namespace

TEST_CASE("classify_singularity examples") {
  SUBCASE("shrinking circle is type I with product 1/2") {
    const auto h = history(0.5, 0.0, 0.4999, 200, [](double g) { return 1.0 / std::sqrt(2.0 * g); });
    const auto rep = classify_singularity(h, 0.5);
    CHECK(rep.type == SingularityType::typeI);
    CHECK(rep.sup_product == doctest::Approx(0.5));
    const auto fitted = classify_singularity(h);
    CHECK(fitted.type == SingularityType::typeI);
    CHECK(fitted.T_est == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(fitted.inverse_slope == doctest::Approx(-2.0));
  }
  SUBCASE("κ ~ 1/(T − t) is type II") {
    const auto h = history(1.0, 0.0, 0.9999, 200, [](double g) { return 1.0 / g; });
    CHECK(classify_singularity(h, 1.0).type == SingularityType::typeII);
  }
  SUBCASE("constant curvature is not a singularity") {
    std::vector<BlowupHistorySample> h;
    for (int i = 0; i < 50; ++i) h.push_back({0.01 * i, 3.0});
    CHECK(classify_singularity(h).type == SingularityType::no_singularity);
    CHECK(classify_singularity(h, 0.6).type == SingularityType::no_singularity);
  }
  SUBCASE("too few samples in the last decade") {
    const auto h = history(0.5, 0.0, 0.4999, 8, [](double g) { return 1.0 / std::sqrt(2.0 * g); });
    CHECK(classify_singularity(h, 0.5).type == SingularityType::inconclusive);
  }
  SUBCASE("bad histories") {
    CHECK_THROWS_AS(classify_singularity({}), InvalidInput);
    CHECK_THROWS_AS(classify_singularity({{0.2, 1.0}, {0.1, 2.0}}), InvalidInput);
  }
  CHECK(to_string(SingularityType::typeII) == "typeII");
}

TEST_CASE("parabolic_rescale examples") {
  const auto s = circle_state(0.8, 0.18);
  SUBCASE("identity frame") {
    const auto f = parabolic_rescale(s, {}, 0.5, 1.0);
    CHECK(f.tau == doctest::Approx(0.18 - 0.5));
    CHECK(hausdorff_distance(f.curve, s.curve) == doctest::Approx(0.0));
  }
  SUBCASE("shrinking circle to the unit circle") {
    // R(0.18) = sqrt(1 − 0.36) = 0.8.
    const auto f = parabolic_rescale(s, {}, 0.5, 1.0 / 0.8);
    for (const auto& p : f.curve.nodes()) CHECK(norm(p) == doctest::Approx(1.0));
    CHECK(f.tau == doctest::Approx(-0.5));
  }
  SUBCASE("curvature scales by 1/Q") {
    const DiscreteCurve arc(oracle::arc_nodes({0.3, 0.1}, 0.7, 0.0, 2.0, 80), false);
    FlowState st;
    st.curve = arc;
    const auto f = parabolic_rescale(st, {0.5, -0.2}, 1.0, 3.0);
    const auto k0 = curvature(arc), k1 = curvature(f.curve);
    for (std::size_t i : {1u, 20u, 40u, 78u}) CHECK(k1.values[i] == doctest::Approx(k0.values[i] / 3.0));
  }
  CHECK_THROWS_AS(parabolic_rescale(s, {}, 0.5, 0.0), DomainError);
}

TEST_CASE("self_shrinker_residual examples") {
  SUBCASE("unit circle at τ = −1/2") {
    const RescaledFrame f{oracle::circle(1.0, 256), -0.5, 1.0, {}};
    const auto r = self_shrinker_residual(f);
    CHECK(r.l2 < 1e-9);
  }
  SUBCASE("line through the origin") {
    std::vector<Vec2> p;
    for (int i = -10; i <= 10; ++i) p.push_back({0.1 * i, 0.05 * i});
    const auto r = self_shrinker_residual({DiscreteCurve(p, false), -1.0, 1.0, {}});
    CHECK(r.l2 < 1e-12);
  }
  SUBCASE("line missing the origin") {
    std::vector<Vec2> p;
    for (int i = -10; i <= 10; ++i) p.push_back({0.1 * i, 1.0});
    CHECK(self_shrinker_residual({DiscreteCurve(p, false), -1.0, 1.0, {}}).l2 > 0.1);
  }
  SUBCASE("rotation invariance") {
    const RescaledFrame f{oracle::circle(1.3, 128), -0.7, 1.0, {}};
    const RescaledFrame g{f.curve.transformed(1.1, {}), -0.7, 1.0, {}};
    CHECK(std::abs(self_shrinker_residual(f).l2 - self_shrinker_residual(g).l2) < 1e-10);
  }
  CHECK_THROWS_AS(self_shrinker_residual({oracle::circle(1.0, 16), 0.0, 1.0, {}}), DomainError);
}

TEST_CASE("grim_reaper examples") {
  const auto g = grim_reaper(0.3, -1.2, 1.2, 401);
  const auto k = curvature(g);
  CHECK(*tip_position(g) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(k.values[200] == doctest::Approx(1.0).epsilon(1e-4));
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < g.size(); ++i) worst = std::max(worst, std::abs(k.values[i] - std::cos(g[i].y)));
  CHECK(worst < 1e-3);
  const auto g3 = grim_reaper(0.0, pi / 3.0 - 0.2, pi / 3.0 + 0.2, 201);
  std::size_t near = 0;
  for (std::size_t i = 0; i < g3.size(); ++i) {
    if (std::abs(g3[i].y - pi / 3.0) < std::abs(g3[near].y - pi / 3.0)) near = i;
  }
  CHECK(std::abs(g3[near].y - pi / 3.0) < g3.max_segment_length());
  CHECK(curvature(g3).values[near] == doctest::Approx(std::cos(g3[near].y)).epsilon(1e-5));
  CHECK(curvature(g3).values[near] == doctest::Approx(0.5).epsilon(5e-3));
  const auto g2 = grim_reaper(1.1, -1.2, 1.2, 401);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g2[i].x - g[i].x == doctest::Approx(0.8));
    CHECK(g2[i].y == doctest::Approx(g[i].y));
  }
  CHECK_THROWS_AS(grim_reaper(0.0, -1.55, 1.0, 50), DomainError);
  CHECK_THROWS_AS(grim_reaper(0.0, -1.0, 1.53, 50), DomainError);
}

TEST_CASE("grim reaper translates at unit speed under csf") {
  const auto sigma = SupportCurve::circle(1.0);
  const double lim = 0.5 * pi - 0.05;
  FlowState st;
  st.curve = grim_reaper(0.0, -lim, lim, 200);
  st.attached = false;
  FlowConfig cfg;
  cfg.resample_every = 0;
  while (st.t < 0.5) st = step(st, sigma, cfg, FlowMode::csf).state;
  CHECK(*tip_position(st.curve) / st.t == doctest::Approx(1.0).epsilon(1e-2));
  // Evolved nodes lie on the exact translate (the truncated ends lag behind it).
  const auto exact = grim_reaper(st.t, -lim, lim, 4000);
  double worst = 0.0;
  for (const auto& p : st.curve.nodes()) worst = std::max(worst, distance_to_polyline(p, exact));
  CHECK(worst <= 1e-2);
}

TEST_CASE("fit_circular_arc examples") {
  SUBCASE("exact arc") {
    const DiscreteCurve arc(oracle::arc_nodes({1.0, -2.0}, 2.0, 0.3, 2.5, 100), false);
    const auto f = fit_circular_arc(arc);
    CHECK_FALSE(f.line);
    CHECK(f.radius == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(f.rms <= 1e-9);
    CHECK(f.start_contact == doctest::Approx(pi / 2.0).epsilon(1e-3));
  }
  SUBCASE("noisy arc") {
    auto p = oracle::arc_nodes({}, 1.0, 0.0, pi, 2000);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e-3, 1e-3);
    for (auto& v : p) {
      const Vec2 n = normalized(v);
      v += u(rng) * std::sqrt(3.0) * n;
    }
    const auto f = fit_circular_arc(DiscreteCurve(p, false));
    CHECK(f.rms == doctest::Approx(1e-3).epsilon(0.1));
    CHECK(f.radius == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("straight segment") {
    std::vector<Vec2> p;
    for (int i = 0; i < 20; ++i) p.push_back({0.1 * i, 0.3 * i});
    const auto f = fit_circular_arc(DiscreteCurve(p, false));
    CHECK(f.line);
    CHECK(std::isinf(f.radius));
  }
}

TEST_CASE("Hamilton frames from the shrinking-circle run") {
  const auto sigma = SupportCurve::circle(1.0);
  FlowState st = circle_state(1.0, 0.0, 128);
  FlowConfig cfg;
  cfg.t_end = 1.0;
  cfg.max_kappa_abort = 200.0;
  cfg.sample_every = 200;
  const auto res = run(st, sigma, cfg, FlowMode::csf);
  REQUIRE(res.termination == Termination::blowup_detected);
  const auto seqs = hamilton_rescale(res.snapshots, 0.5, {4, 16, 64});
  REQUIRE(seqs.size() == 3);
  for (const auto& s : seqs) {
    const auto& center = s.frames[s.center_frame];
    CHECK(center.tau == doctest::Approx(0.0));
    CHECK(std::abs(curvature(center.curve).values[s.sample.p]) == doctest::Approx(1.0).epsilon(1e-6));
    for (const auto& f : s.frames) {
      if (f.tau <= 0.0) CHECK(curvature(f.curve).max_abs() <= 1.05);
    }
  }
  CHECK_THROWS_AS(hamilton_rescale({}, 0.5, {4}), InvalidInput);
  const auto single = hamilton_rescale({res.snapshots.back()}, 0.5, {4});
  REQUIRE(single.size() == 1);
  CHECK(single[0].frames.size() == 1);
  CHECK(curvature(single[0].frames[0].curve).max_abs() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("parabolic frame of the circle run at τ = −1/2 is the unit circle") {
  const auto sigma = SupportCurve::circle(1.0);
  FlowState st = circle_state(1.0, 0.0, 200);
  FlowConfig cfg;
  cfg.resample_every = 0;
  while (st.t < 0.375) st = step(st, sigma, cfg, FlowMode::csf).state;
  const double Q = 1.0 / std::sqrt(2.0 * (0.5 - st.t));
  const auto f = parabolic_rescale(st, {}, 0.5, Q);
  CHECK(f.tau == doctest::Approx(-0.5));
  CHECK(fit_circular_arc(f.curve).radius == doctest::Approx(1.0).epsilon(0.02));
  CHECK(self_shrinker_residual(f).l2 <= 5e-2);
}
