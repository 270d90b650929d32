#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oemsync/linalg.hpp"
#include "oemsync/model.hpp"

namespace oemsync {

/// Expectation values recorded at one output time.
struct Sample {
  double sx = 0.0, sy = 0.0, sz = 0.0;
  double q = 0.0, p = 0.0;           // q = <b + b^dag>, p = i<b^dag - b>
  double re_a = 0.0, im_a = 0.0;
  double n_cav = 0.0, n_mech = 0.0;
  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Struct-of-arrays time series of the standard observables.
struct ObservableSeries {
  std::vector<double> times;
  std::vector<double> sx, sy, sz;
  std::vector<double> q, p;
  std::vector<double> re_a, im_a;
  std::vector<double> n_cav, n_mech;
  /// Expectations of caller-supplied operators, extra[k][sample].
  std::vector<std::vector<Complex>> extra;

  std::size_t size() const { return times.size(); }
  void reserve(std::size_t n);
  void push(double t, const Sample& s);
  Sample at(std::size_t k) const;
};

Sample measure(const ObservableSet& obs, const Vector& psi);
Sample measure(const ObservableSet& obs, const DenseMatrix& rho);

struct Jump {
  double time;
  Channel channel;
};

enum class Branch { transit, blue, red };
std::string to_string(Branch b);

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  ObservableSeries obs;
  std::vector<Jump> jumps;
  /// Jumps in (t_{k-1}, t_k] for each output sample k.
  std::vector<int> jumps_per_sample;
  /// Per-sample branch labels; empty until classified.
  std::vector<Branch> branch;
};

struct EnsembleRecord {
  std::size_t n_traj = 0;
  std::vector<std::uint64_t> seeds;
  ObservableSeries mean;
  ObservableSeries std_error;  // standard error of the mean; zero for n_traj = 1
  std::vector<int> jumps_per_sample;  // summed over trajectories
  std::vector<TrajectoryRecord> records;  // filled only when requested
};

}  // namespace oemsync
