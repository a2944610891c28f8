#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "duet/errors.hpp"
#include "duet/observe.hpp"
#include "duet/oracle.hpp"
#include "duet/sde.hpp"
#include "duet/stats.hpp"

using namespace duet;
using observe::Path;

namespace {

observe::ScalingParams params_for(double R) {
  observe::ScalingParams p;
  p.R = R;
  return p;
}

}  // namespace

TEST_CASE("scaling params: defaults valid, violations named") {
  observe::ScalingParams p;
  p.validate();
  p.alpha_c = 0.5;
  CHECK_THROWS_WITH_AS(p.validate(),
                       "alpha_c must satisfy alpha_t/2 < alpha_c < 1/3",
                       ConfigError);
  p = observe::ScalingParams{};
  p.beta = 1.0;
  CHECK_THROWS_WITH_AS(p.validate(), "beta must satisfy beta > 1", ConfigError);
  p = observe::ScalingParams{};
  p.alpha = 0.65;  // violates alpha < alpha_t
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("scaled_process: identity at T = 1 and constant paths") {
  const auto& zero = model::potential_by_name("zero");
  rng::NoiseStream ns(3, 0);
  const auto tr = sde::simulate({1.5, 0.0, 0.0, 0.0}, zero, 2.0, 0.01, &ns);
  const auto x1 = observe::scaled_process(tr, 1.0);
  CHECK(x1.values == tr.r1);
  CHECK(x1.times == tr.times);

  // constant path: X = c / sqrt(T)
  Path c{{0.0, 1.0, 2.0}, {3.0, 3.0, 3.0}};
  const auto xc = observe::scaled_process(c, 4.0);
  for (const double v : xc.values) CHECK(v == doctest::Approx(1.5).epsilon(1e-15));

  // composing with T = 1 is the identity
  const auto once = observe::scaled_process(tr, 4.0);
  const auto twice = observe::scaled_process(once, 1.0);
  CHECK(once.values == twice.values);
  CHECK(once.times == twice.times);

  CHECK_THROWS_AS(observe::scaled_process(tr, 4.0, 10.0), HorizonTooShort);
}

TEST_CASE("scaled_process: Var X_1 = 1 for the decoupled system from 0") {
  const auto& zero = model::potential_by_name("zero");
  const double T = 4.0;
  const std::size_t n = 10000;
  std::vector<double> x(n);
  verify::parallel_for_paths(n, 0, [&](std::size_t i) {
    rng::NoiseStream ns(606, i);
    const auto tr = sde::simulate({0.0, 0.0, 0.0, 0.0}, zero, T, 0.01, &ns, 400);
    const auto xp = observe::scaled_process(tr, T);
    x[i] = xp.values.back();
  });
  const auto v = verify::variance_se(x);
  CHECK(std::fabs(v.mean - 1.0) <= 4.0 * v.se);
}

TEST_CASE("rotation schedule: constant speed is exact") {
  const auto& zero = model::potential_by_name("zero");
  const double R = 16.0;
  const auto p = params_for(R);
  const double tR = p.t_horizon();
  const auto tr = sde::simulate({R, 0.0, 0.0, 0.0}, zero, tR + 0.5,
                                1.0 / (10.0 * (R + 2.0 * p.c()) * 1.2), nullptr, 1,
                                {sde::Scheme::kSplit, false, false});
  const auto sched = observe::rotation_schedule(tr, p);
  CHECK(!sched.tau_c.has_value());
  CHECK(sched.n_tilde ==
        static_cast<std::size_t>(std::ceil(tR * R)));
  for (std::size_t k = 0; k < sched.sigma.size(); ++k) {
    CHECK(sched.sigma[k] ==
          doctest::Approx(static_cast<double>(k) / R).epsilon(1e-12));
  }
}

TEST_CASE("rotation schedule: coupled runs stay near k/R") {
  const auto& pot = model::potential_by_name("cos");
  const double R = 32.0;
  const auto p = params_for(R);
  const double tR = p.t_horizon();
  const double cR = p.c();
  const double dt = 1.0 / (10.0 * (R + 2.0 * cR) * 1.5);
  const double bound_inc_lo = 1.0 / (R + cR), bound_inc_hi = 1.0 / (R - cR);
  for (std::size_t run = 0; run < 100; ++run) {
    rng::NoiseStream ns(1234, run);
    const auto tr = sde::simulate({R, 1.0, ns.uniform_init(), ns.uniform_init()},
                                  pot, tR + 0.5, dt, &ns);
    const auto sched = observe::rotation_schedule(tr, p);
    CHECK(sched.n_tilde <= tR * (R + 2.0 * cR));
    const double dev_bound = 2.0 * tR * cR / R;
    for (std::size_t k = 0; k < sched.sigma.size(); ++k) {
      CHECK(std::fabs(sched.sigma[k] - static_cast<double>(k) / R) <= dev_bound);
      if (k + 1 < sched.sigma.size() &&
          (!sched.tau_c || sched.sigma[k + 1] < *sched.tau_c)) {
        const double inc = sched.sigma[k + 1] - sched.sigma[k];
        CHECK(inc >= bound_inc_lo - 1e-9);
        CHECK(inc <= bound_inc_hi + 1e-9);
      }
    }
  }
}

TEST_CASE("rotation schedule: grid too coarse is rejected") {
  const auto& zero = model::potential_by_name("zero");
  const double R = 16.0;
  const auto tr = sde::simulate({R, 0.0, 0.0, 0.0}, zero, 10.0, 0.05, nullptr, 1,
                                {sde::Scheme::kSplit, false, false});
  CHECK_THROWS_AS(observe::rotation_schedule(tr, params_for(R)), GridTooCoarse);
}

TEST_CASE("hitting_time: ramps, misses, interpolation") {
  Path ramp{{0, 1, 2, 3, 4, 5, 6}, {0, 1, 2, 3, 4, 5, 6}};
  auto t = observe::hitting_time(ramp, 3.0, observe::HitMode::kSigned);
  REQUIRE(t.has_value());
  CHECK(*t == 3.0);

  // interpolation inside a step
  Path coarse{{0.0, 1.0}, {0.0, 2.0}};
  t = observe::hitting_time(coarse, 0.5, observe::HitMode::kSigned);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(0.25).epsilon(1e-15));

  // level below the infimum of |path|
  Path high{{0, 1, 2}, {2.0, 3.0, 4.0}};
  CHECK(!observe::hitting_time(high, 1.0, observe::HitMode::kAbsolute).has_value());

  // start exactly at the level
  Path at{{0, 1}, {-2.0, 0.0}};
  t = observe::hitting_time(at, 2.0, observe::HitMode::kAbsolute);
  REQUIRE(t.has_value());
  CHECK(*t == 0.0);
}

TEST_CASE("hitting_time: mean two-sided exit of BM from [-1,1] is 1") {
  const std::size_t n = 1000;
  const double dt = 2e-3;
  const std::size_t cap = static_cast<std::size_t>(20.0 / dt);
  std::vector<double> taus(n);
  verify::parallel_for_paths(n, 0, [&](std::size_t i) {
    rng::GaussianStream g(8081, i, 0);
    Path p;
    p.times.reserve(cap + 1);
    p.values.reserve(cap + 1);
    double w = 0.0;
    p.times.push_back(0.0);
    p.values.push_back(0.0);
    for (std::size_t k = 1; k <= cap; ++k) {
      w += std::sqrt(dt) * g.next_gaussian();
      p.times.push_back(static_cast<double>(k) * dt);
      p.values.push_back(w);
      if (std::fabs(w) >= 1.0) break;
    }
    const auto t = observe::hitting_time(p, 1.0, observe::HitMode::kAbsolute);
    taus[i] = t ? *t : 20.0;
  });
  const auto m = verify::mean_se(taus);
  CHECK(std::fabs(m.mean - 1.0) <= 4.0 * m.se + 2.0 * dt);
}

TEST_CASE("hitting_time is monotone in the level on monotone paths") {
  rng::GaussianStream g(17, 0, 0);
  for (int rep = 0; rep < 50; ++rep) {
    Path p;
    double v = 0.0;
    for (int i = 0; i < 200; ++i) {
      p.times.push_back(static_cast<double>(i));
      p.values.push_back(v);
      v += std::fabs(g.next_gaussian());
    }
    double prev_t = 0.0;
    for (double level = 0.5; level < v; level += v / 7.0) {
      const auto t = observe::hitting_time(p, level, observe::HitMode::kSigned);
      if (!t) break;
      CHECK(*t >= prev_t);
      prev_t = *t;
    }
  }
}

TEST_CASE("excursions: hand-constructed ladder") {
  const double eps = 0.1;
  // |X|: 2eps -> eps -> 2eps -> eps, piecewise linear
  Path x{{0.0, 1.0, 2.0, 3.0}, {0.2, 0.1, 0.2, 0.1}};
  const auto rec = observe::excursions(x, eps, Path{}, 0.0, 1.0);
  CHECK(rec.eta.size() == 2);
  CHECK(rec.sigma_up.size() == 1);
  CHECK(rec.eta[0] <= rec.sigma_up[0]);
  CHECK(rec.sigma_up[0] <= rec.eta[1]);
  CHECK(rec.censored_excursions == 0);

  // never reaches eps
  Path flat{{0.0, 1.0, 2.0}, {0.5, 0.6, 0.55}};
  const auto rec2 = observe::excursions(flat, eps, Path{}, 0.0, 1.0);
  CHECK(rec2.eta.empty());
  CHECK(rec2.sigma_up.empty());

  // trailing incomplete excursion is censored
  Path trail{{0.0, 1.0, 2.0, 3.0}, {0.2, 0.1, 0.2, 0.3}};
  const auto rec3 = observe::excursions(trail, eps, Path{}, 0.0, 1.0);
  CHECK(rec3.eta.size() == 1);
  CHECK(rec3.sigma_up.empty());
  CHECK(rec3.censored_excursions == 1);
}

TEST_CASE("excursions: zeta stops the ladder at the r2 cap") {
  const double eps = 0.1;
  Path x{{0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 0.25, 0.05, 0.25, 0.05}};
  Path r2{{0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 0.0, 3.0, 0.0, 0.0}};
  const auto rec = observe::excursions(x, eps, r2, 3.0, 1.0);
  REQUIRE(rec.zeta.has_value());
  CHECK(*rec.zeta == 2.0);  // grid detection at the first point >= cap
  // only events strictly before zeta survive
  for (const double t : rec.eta) CHECK(t <= 2.0);
  for (const double t : rec.sigma_up) CHECK(t <= 2.0);
}

TEST_CASE("excursions: complete-excursion counts grow like 1/eps") {
  // reflected-BM reference paths from the exact sampler
  const std::size_t n = 1500;
  const double dt = 1e-4;
  const auto steps = static_cast<std::size_t>(1.0 / dt);
  std::vector<double> grid(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) grid[k] = static_cast<double>(k) * dt;

  std::vector<double> c02(n), c01(n), c005(n);
  std::vector<unsigned char> interlaced(n, 1);
  verify::parallel_for_paths(n, 0, [&](std::size_t i) {
    rng::GaussianStream g(31337, i, 0);
    const auto w = oracle::sample_reflected_bm(grid, g);
    Path p{grid, w};
    const auto r02 = observe::excursions(p, 0.2, Path{}, 0.0, 1.0);
    const auto r01 = observe::excursions(p, 0.1, Path{}, 0.0, 1.0);
    const auto r005 = observe::excursions(p, 0.05, Path{}, 0.0, 1.0);
    c02[i] = static_cast<double>(r02.complete_excursions());
    c01[i] = static_cast<double>(r01.complete_excursions());
    c005[i] = static_cast<double>(r005.complete_excursions());
    // interlacing invariant: starting from |X_0| = 0 the ladder alternates
    // sigma_1 <= eta_1 <= sigma_2 <= eta_2 <= ...
    for (const auto* rec : {&r02, &r01, &r005}) {
      for (std::size_t k = 0; k < rec->sigma_up.size(); ++k) {
        if (k < rec->eta.size() && !(rec->sigma_up[k] <= rec->eta[k])) {
          interlaced[i] = 0;
        }
        if (k + 1 < rec->sigma_up.size() && k < rec->eta.size() &&
            !(rec->eta[k] <= rec->sigma_up[k + 1])) {
          interlaced[i] = 0;
        }
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i) CHECK(interlaced[i] == 1);
  const double m02 = verify::mean_se(c02).mean;
  const double m01 = verify::mean_se(c01).mean;
  const double m005 = verify::mean_se(c005).mean;
  // halving eps roughly doubles the count. In the asymptotic pair the ratio
  // sits inside 2 +/- 30%; the coarsest pair runs high (oracle measurement:
  // 2.56 at eps = 0.2) because eps = 0.2 is not yet in the 1/eps regime of
  // the t = 1 window.
  CHECK(m01 / m02 >= 1.8);
  CHECK(m01 / m02 <= 3.2);
  CHECK(m005 / m01 >= 1.4);
  CHECK(m005 / m01 <= 2.6);
}

TEST_CASE("running_sup basics") {
  Path mono{{0, 1, 2, 3}, {0.5, 1.0, 1.5, 2.0}};
  CHECK(observe::running_sup(mono, 3.0) == 2.0);
  CHECK(observe::running_sup(mono, 1.5) == 1.0);
  Path c{{0, 1, 2}, {-0.7, -0.7, -0.7}};
  CHECK(observe::running_sup(c, 2.0) == 0.7);
}

TEST_CASE("running_sup of the OU analogue obeys the explicit tail bound") {
  // P(sup_{[0,100]} |r| > 4) for the OU process from 0, against the bound
  // with (t, T, D) = (1, 100, 5) in the |r2(0)| = 1 convention
  const std::size_t n = 10000;
  std::vector<double> exceed(n);
  verify::parallel_for_paths(n, 0, [&](std::size_t i) {
    rng::NoiseStream ns(60601, i);
    const auto p = sde::simulate_analogue(0.0, 0.0, 100.0, 0.01, &ns);
    const Path path{p.times, p.r};
    exceed[i] = observe::running_sup(path, 100.0) > 4.0 ? 1.0 : 0.0;
  });
  const auto m = verify::mean_se(exceed);
  CHECK(m.mean + 4.0 * m.se <= oracle::doob_bound(1.0, 100.0, 5.0));
}
