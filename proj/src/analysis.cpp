#include "oemsync/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oemsync/errors.hpp"

namespace oemsync {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPhaseEps = 1e-12;
}  // namespace

Quadratures quadratures(const std::vector<Complex>& b) {
  Quadratures out;
  out.q.reserve(b.size());
  out.p.reserve(b.size());
  for (const auto& v : b) {
    out.q.push_back(2.0 * v.real());
    out.p.push_back(2.0 * v.imag());
  }
  return out;
}

Quadratures quadratures(const ObservableSeries& obs) { return {obs.q, obs.p}; }

double wrap_phase(double angle) {
  double a = std::remainder(angle, kTwoPi);  // [-pi, pi]
  if (a <= -std::numbers::pi) a += kTwoPi;
  return a;
}

namespace {

// phi = atan2(num, den); theta = atan2(num, other * sin(phi))
QubitPhases phases_from(const std::vector<double>& num, const std::vector<double>& den,
                        const std::vector<double>& other) {
  QubitPhases out;
  out.phi.resize(num.size());
  out.theta.resize(num.size());
  for (std::size_t k = 0; k < num.size(); ++k) {
    if (std::hypot(num[k], den[k]) < kPhaseEps) continue;
    const double phi = wrap_phase(std::atan2(num[k], den[k]));
    out.phi[k] = phi;
    const double s = std::sin(phi);
    if (std::abs(s) < kPhaseEps || std::abs(other[k]) < 1e-9) continue;
    out.theta[k] = wrap_phase(std::atan2(num[k], other[k] * s));
  }
  return out;
}

}  // namespace

QubitPhases qubit_phases(const BlochSeries& b) { return phases_from(b.y, b.z, b.x); }

QubitPhases rotated_qubit_phases(const BlochSeries& b) { return phases_from(b.y, b.x, b.z); }

BlochSeries to_rotated_bloch(const BlochSeries& lab, double mixing) {
  const double c = std::cos(mixing);
  const double s = std::sin(mixing);
  BlochSeries out;
  out.y = lab.y;
  out.x.resize(lab.x.size());
  out.z.resize(lab.x.size());
  for (std::size_t k = 0; k < lab.x.size(); ++k) {
    out.x[k] = c * lab.z[k] - s * lab.x[k];
    out.z[k] = -c * lab.x[k] - s * lab.z[k];
  }
  return out;
}

BlochSeries bloch_of(const ObservableSeries& obs) { return {obs.sx, obs.sy, obs.sz}; }

PhaseSeries mech_phase(const Quadratures& qp) {
  PhaseSeries out(qp.q.size());
  for (std::size_t k = 0; k < qp.q.size(); ++k) {
    if (std::hypot(qp.q[k], qp.p[k]) < kPhaseEps) continue;
    out[k] = wrap_phase(std::atan2(qp.p[k], qp.q[k]));
  }
  return out;
}

std::vector<double> drive_phase(const std::vector<double>& times, double omega) {
  std::vector<double> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    double a = std::fmod(omega * times[k], kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    out[k] = a;
  }
  return out;
}

PhaseRecord phase_record(const ObservableSeries& obs, double omega) {
  PhaseRecord r;
  r.times = obs.times;
  auto qp = qubit_phases(bloch_of(obs));
  r.phi = std::move(qp.phi);
  r.theta = std::move(qp.theta);
  r.psi = mech_phase(quadratures(obs));
  r.drive_phase = drive_phase(obs.times, omega);
  return r;
}

// ---------------------------------------------------------------------------
// Stroboscopic sampling

std::vector<double> golden_strobe_times(double t_start, double t_end, double omega) {
  if (omega == 0.0 || !std::isfinite(omega)) throw InvariantError("golden-strobe sampling needs a nonzero Omega");
  const double spacing = kTwoPi / std::abs(omega) * kGoldenFraction;
  std::vector<double> out;
  for (auto n = static_cast<long long>(std::ceil(t_start / spacing - 1e-12));; ++n) {
    const double t = static_cast<double>(n) * spacing;
    if (t > t_end + 1e-12) break;
    out.push_back(t);
  }
  return out;
}

std::vector<std::size_t> stroboscopic_indices(const std::vector<double>& times, double omega, SampleRule rule) {
  std::vector<std::size_t> idx;
  if (rule == SampleRule::uniform || times.empty()) {
    idx.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) idx[k] = k;
    return idx;
  }
  for (double target : golden_strobe_times(times.front(), times.back(), omega)) {
    const auto it = std::lower_bound(times.begin(), times.end(), target);
    std::size_t k = static_cast<std::size_t>(it - times.begin());
    if (k == times.size() || (k > 0 && target - times[k - 1] <= times[k] - target)) --k;
    if (idx.empty() || idx.back() != k) idx.push_back(k);
  }
  return idx;
}

ObservableSeries select(const ObservableSeries& obs, const std::vector<std::size_t>& idx) {
  ObservableSeries out;
  out.reserve(idx.size());
  out.extra.resize(obs.extra.size());
  for (std::size_t k : idx) {
    out.push(obs.times[k], obs.at(k));
    for (std::size_t e = 0; e < obs.extra.size(); ++e) out.extra[e].push_back(obs.extra[e][k]);
  }
  return out;
}

TrajectoryRecord stroboscopic_sample(const TrajectoryRecord& rec, double omega, SampleRule rule) {
  const auto idx = stroboscopic_indices(rec.obs.times, omega, rule);
  TrajectoryRecord out;
  out.seed = rec.seed;
  out.obs = select(rec.obs, idx);
  out.jumps = rec.jumps;
  // jump counts accumulate over the skipped samples
  std::size_t prev = 0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    int count = 0;
    const std::size_t from = j == 0 ? idx[0] : prev + 1;
    for (std::size_t k = from; k <= idx[j] && k < rec.jumps_per_sample.size(); ++k) count += rec.jumps_per_sample[k];
    out.jumps_per_sample.push_back(count);
    prev = idx[j];
  }
  if (!rec.branch.empty())
    for (std::size_t k : idx) out.branch.push_back(rec.branch[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Branches

BranchLabeling relabel_short_runs(const std::vector<double>& times, std::vector<Branch> labels, double min_dwell) {
  if (times.size() != labels.size()) throw DimensionError("labels and times differ in length");
  BranchLabeling out;
  std::size_t start = 0;
  while (start < labels.size()) {
    std::size_t end = start;
    while (end + 1 < labels.size() && labels[end + 1] == labels[start]) ++end;
    const Branch b = labels[start];
    if (b != Branch::transit) {
      if (times[end] - times[start] < min_dwell) {
        std::fill(labels.begin() + static_cast<std::ptrdiff_t>(start),
                  labels.begin() + static_cast<std::ptrdiff_t>(end) + 1, Branch::transit);
      } else {
        out.dwell_intervals.push_back({times[start], times[end], b, start, end});
      }
    }
    start = end + 1;
  }
  out.labels = std::move(labels);
  return out;
}

BranchLabeling classify_branches(const std::vector<double>& times, const std::vector<double>& sigma_x,
                                 const BranchOptions& opts) {
  if (times.size() != sigma_x.size()) throw DimensionError("sigma_x and times differ in length");
  std::vector<Branch> labels(sigma_x.size(), Branch::transit);
  Branch current = Branch::transit;
  for (std::size_t k = 0; k < sigma_x.size(); ++k) {
    if (sigma_x[k] > opts.threshold) {
      current = Branch::blue;
    } else if (sigma_x[k] < -opts.threshold) {
      current = Branch::red;
    }
    labels[k] = current;
  }
  return relabel_short_runs(times, std::move(labels), opts.min_dwell);
}

// ---------------------------------------------------------------------------
// Synchronization and limit cycles

double sync_order(const PhaseSeries& a, const PhaseSeries& b) {
  if (a.size() != b.size()) throw DimensionError("sync_order: phase series differ in length");
  double c = 0.0;
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!a[k] || !b[k]) continue;
    const double d = *a[k] - *b[k];
    c += std::cos(d);
    s += std::sin(d);
    ++n;
  }
  if (n < 2) throw InvariantError("sync_order needs at least 2 valid phase pairs");
  return std::min(1.0, std::hypot(c, s) / static_cast<double>(n));
}

double sync_order(const PhaseSeries& a, const std::vector<double>& b) {
  return sync_order(a, PhaseSeries(b.begin(), b.end()));
}

CycleStats limit_cycle_stats(const std::vector<double>& q, const std::vector<double>& p) {
  if (q.size() != p.size()) throw DimensionError("limit_cycle_stats: q and p differ in length");
  if (q.size() < 10) throw InvariantError("limit_cycle_stats needs at least 10 samples");
  const double n = static_cast<double>(q.size());
  CycleStats s;
  s.samples = q.size();
  for (std::size_t k = 0; k < q.size(); ++k) {
    s.centroid_q += q[k];
    s.centroid_p += p[k];
  }
  s.centroid_q /= n;
  s.centroid_p /= n;
  std::vector<double> r(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    r[k] = std::hypot(q[k] - s.centroid_q, p[k] - s.centroid_p);
    s.mean_radius += r[k];
  }
  s.mean_radius /= n;
  for (double v : r) s.radial_spread += (v - s.mean_radius) * (v - s.mean_radius);
  s.radial_spread = std::sqrt(s.radial_spread / n);
  return s;
}

LimitCycleSummary limit_cycle_stats(const std::vector<double>& q, const std::vector<double>& p,
                                    const BranchLabeling& labeling) {
  if (labeling.labels.size() != q.size()) throw DimensionError("labeling length differs from samples");
  LimitCycleSummary out;
  out.all = limit_cycle_stats(q, p);
  for (Branch b : {Branch::blue, Branch::red}) {
    std::vector<double> qb, pb;
    for (std::size_t k = 0; k < q.size(); ++k)
      if (labeling.labels[k] == b) {
        qb.push_back(q[k]);
        pb.push_back(p[k]);
      }
    if (qb.size() < 10) continue;
    (b == Branch::blue ? out.blue : out.red) = limit_cycle_stats(qb, pb);
  }
  return out;
}

PhaseSeries slice(const PhaseSeries& s, std::size_t first, std::size_t last) {
  return PhaseSeries(s.begin() + static_cast<std::ptrdiff_t>(first), s.begin() + static_cast<std::ptrdiff_t>(last) + 1);
}

std::vector<double> slice(const std::vector<double>& s, std::size_t first, std::size_t last) {
  return std::vector<double>(s.begin() + static_cast<std::ptrdiff_t>(first),
                             s.begin() + static_cast<std::ptrdiff_t>(last) + 1);
}

}  // namespace oemsync
