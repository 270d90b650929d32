#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oemsync/analysis.hpp"
#include "oemsync/errors.hpp"

using namespace oemsync;

namespace {

constexpr double kPi = std::numbers::pi;

bool in_phase_range(const std::optional<double>& v) { return !v || (std::isfinite(*v) && *v > -kPi && *v <= kPi); }

ObservableSeries series_from_sx(const std::vector<double>& t, const std::vector<double>& sx) {
  ObservableSeries s;
  for (std::size_t k = 0; k < t.size(); ++k) {
    Sample x;
    x.sx = sx[k];
    s.push(t[k], x);
  }
  return s;
}

}  // namespace

TEST_CASE("quadratures") {
  auto qp = quadratures(std::vector<Complex>{0.0, 1.0, Complex(0, 0.5)});
  CHECK(qp.q == std::vector<double>{0.0, 2.0, 0.0});
  CHECK(qp.p == std::vector<double>{0.0, 0.0, 1.0});
}

TEST_CASE("wrap_phase lands in (-pi, pi]") {
  CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng);
    const double w = wrap_phase(a);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    CHECK(std::abs(std::remainder(a - w, 2 * kPi)) < 1e-9);
  }
}

TEST_CASE("qubit phases") {
  auto ph = qubit_phases({{0.0}, {0.0}, {1.0}});
  CHECK(*ph.phi[0] == 0.0);
  CHECK_FALSE(ph.theta[0].has_value());  // sin(phi) = 0

  ph = qubit_phases({{0.0}, {1.0}, {0.0}});
  CHECK(*ph.phi[0] == doctest::Approx(kPi / 2));
  CHECK_FALSE(ph.theta[0].has_value());  // sigma_x = 0

  ph = qubit_phases({{0.5}, {0.5}, {0.0}});
  CHECK(*ph.theta[0] == doctest::Approx(kPi / 4));

  ph = qubit_phases({{0.3}, {0.0}, {0.0}});
  CHECK_FALSE(ph.phi[0].has_value());
  CHECK_FALSE(ph.theta[0].has_value());

  // antipodal vectors are distinguished
  ph = qubit_phases({{0.0, 0.0}, {0.5, -0.5}, {-0.5, 0.5}});
  CHECK(*ph.phi[0] == doctest::Approx(3 * kPi / 4));
  CHECK(*ph.phi[1] == doctest::Approx(-kPi / 4));

  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  BlochSeries b;
  for (int i = 0; i < 500; ++i) {
    double x = n(rng), y = n(rng), z = n(rng);
    const double r = std::sqrt(x * x + y * y + z * z);
    b.x.push_back(x / r);
    b.y.push_back(y / r);
    b.z.push_back(z / r);
  }
  ph = qubit_phases(b);
  for (std::size_t k = 0; k < b.x.size(); ++k) {
    REQUIRE(ph.phi[k].has_value());
    CHECK(std::tan(*ph.phi[k]) == doctest::Approx(b.y[k] / b.z[k]).epsilon(1e-9));
    REQUIRE(ph.theta[k].has_value());
    CHECK(std::tan(*ph.theta[k]) == doctest::Approx(b.y[k] / (b.x[k] * std::sin(*ph.phi[k]))).epsilon(1e-9));
    CHECK(in_phase_range(ph.phi[k]));
    CHECK(in_phase_range(ph.theta[k]));
  }
}

TEST_CASE("rotated qubit phases") {
  auto ph = rotated_qubit_phases({{1.0}, {0.0}, {0.0}});
  CHECK(*ph.phi[0] == 0.0);
  ph = rotated_qubit_phases({{0.0}, {1.0}, {0.0}});
  CHECK(*ph.phi[0] == doctest::Approx(kPi / 2));

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  BlochSeries b;
  for (int i = 0; i < 300; ++i) {
    b.x.push_back(u(rng));
    b.y.push_back(u(rng));
    b.z.push_back(u(rng));
  }
  ph = rotated_qubit_phases(b);
  for (std::size_t k = 0; k < b.x.size(); ++k) {
    CHECK(std::tan(*ph.phi[k]) == doctest::Approx(b.y[k] / b.x[k]).epsilon(1e-9));
    CHECK(in_phase_range(ph.theta[k]));
  }
}

TEST_CASE("rotation into the qubit eigenbasis") {
  // at the sweet point sigma'_x = sigma_z, sigma'_z = -sigma_x
  const auto r = to_rotated_bloch({{0.2}, {0.3}, {0.4}}, 0.0);
  CHECK(r.x[0] == 0.4);
  CHECK(r.y[0] == 0.3);
  CHECK(r.z[0] == -0.2);
  // length is preserved for any mixing angle
  const auto s = to_rotated_bloch({{0.2}, {0.3}, {0.4}}, 0.77);
  CHECK(s.x[0] * s.x[0] + s.y[0] * s.y[0] + s.z[0] * s.z[0] == doctest::Approx(0.29));
}

TEST_CASE("mechanical phase") {
  const auto psi = mech_phase({{1.0, 0.0, 0.0, -2.0}, {0.0, 1.0, 0.0, 0.0}});
  CHECK(*psi[0] == 0.0);
  CHECK(*psi[1] == doctest::Approx(kPi / 2));
  CHECK_FALSE(psi[2].has_value());
  CHECK(*psi[3] == doctest::Approx(kPi));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3), scale(0.01, 100);
  for (int i = 0; i < 200; ++i) {
    const double q = u(rng), p = u(rng), c = scale(rng);
    CHECK(*mech_phase({{q}, {p}})[0] == doctest::Approx(*mech_phase({{c * q}, {c * p}})[0]));
  }
}

TEST_CASE("drive phase") {
  const auto d = drive_phase({2 * kPi, kPi, 0.0, -0.5, 1000.0}, 1.0);
  CHECK(d[0] == doctest::Approx(0.0));
  CHECK(d[1] == doctest::Approx(kPi));
  CHECK(d[2] == 0.0);
  CHECK(d[3] == doctest::Approx(2 * kPi - 0.5));
  for (double v : d) CHECK((v >= 0.0 && v < 2 * kPi));
  for (double v : drive_phase({0.0, 3.0, 1e6}, 0.0)) CHECK(v == 0.0);
}

TEST_CASE("golden strobe sampling") {
  const auto t = golden_strobe_times(0.0, 10.0, 1.0);
  REQUIRE(t.size() >= 2);
  CHECK(t[0] == 0.0);
  CHECK(t[1] == doctest::Approx(3.88322).epsilon(1e-6));
  CHECK_THROWS_AS(golden_strobe_times(0.0, 1.0, 0.0), InvariantError);

  // first 100 target phases pairwise distinct by more than 1e-3
  const auto many = golden_strobe_times(0.0, 99.5 * 2 * kPi * kGoldenFraction, 1.0);
  REQUIRE(many.size() == 100);
  auto ph = drive_phase(many, 1.0);
  for (std::size_t i = 0; i < ph.size(); ++i)
    for (std::size_t j = i + 1; j < ph.size(); ++j) {
      const double gap = std::abs(ph[i] - ph[j]);
      CHECK(std::min(gap, 2 * kPi - gap) > 1e-3);
    }
}

TEST_CASE("golden strobe never repeats a drive phase in the first 10^4 samples") {
  const double dt = 0.1;
  const double t_end = 1.0e4 * 2 * kPi * kGoldenFraction;
  std::vector<double> times;
  for (std::size_t k = 0; k * dt <= t_end; ++k) times.push_back(static_cast<double>(k) * dt);
  const auto idx = stroboscopic_indices(times, 1.0, SampleRule::golden_strobe);
  REQUIRE(idx.size() >= 10000);
  std::vector<double> ph;
  for (std::size_t j = 0; j < 10000; ++j) ph.push_back(drive_phase({times[idx[j]]}, 1.0)[0]);
  std::sort(ph.begin(), ph.end());
  for (std::size_t j = 1; j < ph.size(); ++j) CHECK(ph[j] - ph[j - 1] > 1e-6);
  CHECK(ph.front() + 2 * kPi - ph.back() > 1e-6);
  for (std::size_t j = 1; j < idx.size(); ++j) CHECK(idx[j] > idx[j - 1]);
}

TEST_CASE("stroboscopic sampling of a record") {
  TrajectoryRecord rec;
  for (int k = 0; k <= 100; ++k) rec.obs.push(0.1 * k, Sample{});
  rec.jumps_per_sample.assign(101, 0);
  rec.jumps_per_sample[5] = 1;
  rec.jumps_per_sample[40] = 2;
  rec.branch.assign(101, Branch::blue);

  const auto same = stroboscopic_sample(rec, 1.0, SampleRule::uniform);
  CHECK(same.obs.times == rec.obs.times);
  CHECK(same.jumps_per_sample == rec.jumps_per_sample);
  CHECK(same.branch == rec.branch);

  const auto g = stroboscopic_sample(rec, 1.0, SampleRule::golden_strobe);
  REQUIRE(g.obs.size() == 3);  // t = 0, 3.88, 7.77
  CHECK(g.obs.times[1] == doctest::Approx(3.9));
  CHECK(g.obs.times[2] == doctest::Approx(7.8));
  CHECK(g.jumps_per_sample == std::vector<int>{0, 1, 2});
  CHECK(g.branch.size() == 3);
}

TEST_CASE("branch classifier examples") {
  std::vector<double> t(500);
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = 0.1 * static_cast<double>(k);

  auto lab = classify_branches(t, std::vector<double>(t.size(), 0.5), {0.1, 1.0});
  REQUIRE(lab.dwell_intervals.size() == 1);
  CHECK(lab.dwell_intervals[0].label == Branch::blue);
  CHECK(lab.dwell_intervals[0].start == 0.0);
  CHECK(lab.dwell_intervals[0].end == t.back());

  lab = classify_branches(t, std::vector<double>(t.size(), 0.0), {0.1, 1.0});
  CHECK(lab.dwell_intervals.empty());
  for (Branch b : lab.labels) CHECK(b == Branch::transit);

  // square wave, period 200 samples
  const double dt = 0.1;
  std::vector<double> sq(1000);
  for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = (k / 100) % 2 == 0 ? 0.5 : -0.5;
  std::vector<double> ts(sq.size());
  for (std::size_t k = 0; k < ts.size(); ++k) ts[k] = dt * static_cast<double>(k);
  lab = classify_branches(ts, sq, {0.1, 10 * dt});
  REQUIRE(lab.dwell_intervals.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& iv = lab.dwell_intervals[i];
    CHECK(iv.label == (i % 2 == 0 ? Branch::blue : Branch::red));
    CHECK(iv.first == 100 * i);
    CHECK(iv.last == 100 * i + 99);
    CHECK(iv.start == ts[100 * i]);
  }
}

TEST_CASE("branch classifier hysteresis and short runs") {
  std::vector<double> t(60), sx(60, 0.0);
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<double>(k);
  for (std::size_t k = 0; k < 30; ++k) sx[k] = k == 0 ? 0.5 : 0.05;  // enters blue once, then lingers
  for (std::size_t k = 30; k < 33; ++k) sx[k] = -0.5;                // brief red excursion
  for (std::size_t k = 33; k < 60; ++k) sx[k] = 0.05;
  const auto lab = classify_branches(t, sx, {0.1, 10.0});
  CHECK(lab.labels[0] == Branch::blue);
  CHECK(lab.labels[29] == Branch::blue);
  CHECK(lab.labels[30] == Branch::red);
  CHECK(lab.labels[59] == Branch::red);  // stays red inside the dead band
  REQUIRE(lab.dwell_intervals.size() == 2);
  CHECK(lab.dwell_intervals[0].duration() == 29.0);

  const auto strict = classify_branches(t, sx, {0.1, 30.0});
  REQUIRE(strict.dwell_intervals.empty());
  for (Branch b : strict.labels) CHECK(b == Branch::transit);
}

TEST_CASE("branch classifier properties on random series") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> t(800), sx(800);
    double x = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      t[k] = 0.5 * static_cast<double>(k);
      x = 0.97 * x + 0.1 * n(rng);
      sx[k] = x + 0.4 * std::sin(0.01 * t[k] * (1 + trial % 5));
    }
    const BranchOptions opts{0.1, 20.0};
    const auto lab = classify_branches(t, sx, opts);

    // idempotent
    const auto again = relabel_short_runs(t, lab.labels, opts.min_dwell);
    CHECK(again.labels == lab.labels);
    CHECK(again.dwell_intervals.size() == lab.dwell_intervals.size());

    // intervals disjoint, ordered, cover exactly the non-transit samples, respect min_dwell
    std::vector<int> covered(t.size(), 0);
    for (std::size_t i = 0; i < lab.dwell_intervals.size(); ++i) {
      const auto& iv = lab.dwell_intervals[i];
      CHECK(iv.duration() >= opts.min_dwell);
      if (i > 0) CHECK(iv.first > lab.dwell_intervals[i - 1].last);
      for (std::size_t k = iv.first; k <= iv.last; ++k) {
        ++covered[k];
        CHECK(lab.labels[k] == iv.label);
      }
    }
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(covered[k] == (lab.labels[k] != Branch::transit ? 1 : 0));
  }
}

TEST_CASE("sync order") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  PhaseSeries a(200);
  for (auto& v : a) v = u(rng);
  CHECK(sync_order(a, a) == doctest::Approx(1.0));

  PhaseSeries shifted(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) shifted[k] = wrap_phase(*a[k] + kPi / 3);
  CHECK(sync_order(shifted, a) == doctest::Approx(1.0));

  const std::size_t N = 64;
  PhaseSeries grid(N), zero(N, 0.0);
  for (std::size_t k = 0; k < N; ++k) grid[k] = 2 * kPi * static_cast<double>(k) / N;
  CHECK(sync_order(grid, zero) < 1e-12);

  // invariant under a common constant
  PhaseSeries b(a.size());
  for (auto& v : b) v = u(rng);
  const double s0 = sync_order(a, b);
  for (double c : {0.3, -2.0, 5.0}) {
    PhaseSeries ac(a.size()), bc(b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      ac[k] = wrap_phase(*a[k] + c);
      bc[k] = wrap_phase(*b[k] + c);
    }
    CHECK(sync_order(ac, bc) == doctest::Approx(s0).epsilon(1e-12));
  }

  // undefined samples are skipped pairwise
  PhaseSeries holes = {0.1, std::nullopt, 0.1, 0.1};
  PhaseSeries other = {0.1, 2.0, std::nullopt, 0.1};
  CHECK(sync_order(holes, other) == doctest::Approx(1.0));
  CHECK_THROWS_AS(sync_order(PhaseSeries{0.1, std::nullopt}, PhaseSeries{0.1, 0.2}), InvariantError);
  CHECK_THROWS_AS(sync_order(PhaseSeries{0.1}, PhaseSeries{0.1, 0.2}), DimensionError);
}

TEST_CASE("limit cycle statistics") {
  std::vector<double> q(100), p(100);
  for (int k = 0; k < 100; ++k) {
    q[k] = 2 * std::cos(2 * kPi * k / 100.0) + 1.0;
    p[k] = 2 * std::sin(2 * kPi * k / 100.0) - 3.0;
  }
  auto s = limit_cycle_stats(q, p);
  CHECK(s.mean_radius == doctest::Approx(2.0));
  CHECK(s.radial_spread < 1e-12);
  CHECK(s.centroid_q == doctest::Approx(1.0));
  CHECK(s.centroid_p == doctest::Approx(-3.0));

  s = limit_cycle_stats(std::vector<double>(20, 0.0), std::vector<double>(20, 0.0));
  CHECK(s.mean_radius == 0.0);

  std::mt19937_64 rng(2718);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<double> nq(400), np(400);
  for (int k = 0; k < 400; ++k) {
    const double r = 2.0 + noise(rng), a = 2 * kPi * k / 400.0;
    nq[k] = r * std::cos(a);
    np[k] = r * std::sin(a);
  }
  s = limit_cycle_stats(nq, np);
  CHECK(s.radial_spread >= 0.05);
  CHECK(s.radial_spread <= 0.2);

  // rotation about the centroid leaves the statistics unchanged
  for (double ang : {0.4, 1.9, -2.5}) {
    std::vector<double> rq(400), rp(400);
    for (int k = 0; k < 400; ++k) {
      const double dq = nq[k] - s.centroid_q, dp = np[k] - s.centroid_p;
      rq[k] = s.centroid_q + std::cos(ang) * dq - std::sin(ang) * dp;
      rp[k] = s.centroid_p + std::sin(ang) * dq + std::cos(ang) * dp;
    }
    const auto r = limit_cycle_stats(rq, rp);
    CHECK(r.mean_radius == doctest::Approx(s.mean_radius).epsilon(1e-12));
    CHECK(r.radial_spread == doctest::Approx(s.radial_spread).epsilon(1e-9));
  }

  CHECK_THROWS_AS(limit_cycle_stats(std::vector<double>(9, 0.0), std::vector<double>(9, 0.0)), InvariantError);
}

TEST_CASE("per-branch limit cycles") {
  std::vector<double> t(200), q(200), p(200), sx(200);
  for (int k = 0; k < 200; ++k) {
    t[k] = k;
    const double r = k < 100 ? 1.0 : 3.0;
    q[k] = r * std::cos(0.3 * k);
    p[k] = r * std::sin(0.3 * k);
    sx[k] = k < 100 ? 0.5 : -0.5;
  }
  const auto lab = classify_branches(t, sx, {0.1, 10.0});
  const auto s = limit_cycle_stats(q, p, lab);
  REQUIRE(s.blue.has_value());
  REQUIRE(s.red.has_value());
  CHECK(s.blue->mean_radius == doctest::Approx(1.0).epsilon(0.02));
  CHECK(s.red->mean_radius == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("phase record has no NaN and consistent lengths") {
  std::vector<double> t = {0.0, 1.0, 2.0};
  auto obs = series_from_sx(t, {0.0, 0.0, 0.0});  // everything zero: all phases undefined
  const auto r = phase_record(obs, 1.0);
  CHECK(r.phi.size() == 3);
  CHECK(r.theta.size() == 3);
  CHECK(r.psi.size() == 3);
  CHECK(r.drive_phase.size() == 3);
  for (const auto& v : r.phi) CHECK_FALSE(v.has_value());
  for (const auto& v : r.psi) CHECK_FALSE(v.has_value());
}
