#pragma once

// Adaptive Dormand-Prince 5(4) integrator for complex Eigen states (vectors
// for wave functions, matrices for density operators), with the standard
// fourth-order continuous extension used to locate events inside a step.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "oemsync/errors.hpp"

namespace oemsync {

struct IntegratorOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
};

template <class State>
class DormandPrince {
 public:
  using Rhs = std::function<void(double, const State&, State&)>;

  DormandPrince(Rhs rhs, IntegratorOptions opts) : rhs_(std::move(rhs)), opts_(opts) {
    if (!(opts_.rel_tol > 0.0) || !(opts_.abs_tol > 0.0)) throw InvariantError("integrator tolerances must be > 0");
    if (!(opts_.max_step > 0.0)) throw InvariantError("max_step must be > 0");
  }

  /// Sets the current point and discards the first-same-as-last stage.
  void restart(double t, const State& y) {
    t_ = t;
    y_ = y;
    fsal_valid_ = false;
  }

  double time() const { return t_; }
  const State& state() const { return y_; }
  double previous_time() const { return t_prev_; }
  const State& previous_state() const { return y_prev_; }
  long accepted_steps() const { return accepted_; }
  long rejected_steps() const { return rejected_; }

  /// One accepted adaptive step that does not pass t_limit. Returns the step size.
  double step(double t_limit) {
    ensure_k1();
    if (h_ <= 0.0) h_ = initial_step();
    bool rejected_before = false;
    for (;;) {
      double h = std::min(h_, opts_.max_step);
      bool lands = false;
      if (t_ + h >= t_limit - 1e-12 * std::max(1.0, std::abs(t_limit))) {
        h = t_limit - t_;
        lands = true;
      }
      if (!(h > 1e-14 * std::max(1.0, std::abs(t_)))) throw SolverError("step size underflow", t_);

      stages(t_, y_, h);
      const double err = error_norm(h);
      if (std::isfinite(err) && err <= 1.0) {
        y_prev_ = y_;
        t_prev_ = t_;
        h_prev_ = h;
        y_.swap(ynew_);
        k1_.swap(k7_);  // FSAL
        t_ = lands ? t_limit : t_ + h;
        ++accepted_;
        dense_ready_ = false;
        double fac = err == 0.0 ? kFacMax : std::clamp(0.9 * std::pow(err, -0.2), kFacMin, kFacMax);
        if (rejected_before) fac = std::min(fac, 1.0);
        // a step clipped to t_limit says little about the natural step size
        if (!lands || h >= h_) h_ = h * fac;
        return h;
      }
      ++rejected_;
      rejected_before = true;
      const double fac = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), kFacMin, 1.0) : kFacMin;
      h_ = h * fac;
    }
  }

  /// Advance with adaptive steps until exactly t_target.
  void advance_to(double t_target) {
    while (t_ < t_target) step(t_target);
  }

  /// Continuous extension on [previous_time(), time()].
  State dense(double t) {
    build_dense();
    const double theta = (t - t_prev_) / h_prev_;
    const double theta1 = 1.0 - theta;
    return State(r1_ + theta * (r2_ + theta1 * (r3_ + theta * (r4_ + theta1 * r5_))));
  }

  /// One unchecked step of size (t - previous_time()) from the previous point;
  /// used to land exactly on an event located by dense output. The result
  /// becomes the current point with the FSAL stage discarded.
  void reintegrate_to(double t) {
    const double h = t - t_prev_;
    if (h <= 0.0) {
      restart(t_prev_, y_prev_);
      return;
    }
    State y0 = y_prev_;
    rhs_(t_prev_, y0, k1_);
    stages(t_prev_, y0, h);
    t_ = t;
    y_.swap(ynew_);
    fsal_valid_ = false;
    dense_ready_ = false;
  }

 private:
  static constexpr double kFacMin = 0.2;
  static constexpr double kFacMax = 5.0;

  void ensure_k1() {
    if (!fsal_valid_) {
      if (k1_.size() != y_.size()) k1_ = y_;
      rhs_(t_, y_, k1_);
      fsal_valid_ = true;
    }
  }

  double scaled_norm(const State& v, const State& ref) const {
    return std::sqrt((v.array().abs() / (opts_.abs_tol + opts_.rel_tol * ref.array().abs())).square().mean());
  }

  double initial_step() {
    const double d0 = scaled_norm(y_, y_);
    const double d1 = scaled_norm(k1_, y_);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, opts_.max_step);
    State y1 = y_ + h0 * k1_;
    State f1 = y_;
    rhs_(t_ + h0, y1, f1);
    const double d2 = scaled_norm(State(f1 - k1_), y_) / h0;
    const double m = std::max(d1, d2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    return std::min({100.0 * h0, h1, opts_.max_step});
  }

  void stages(double t, const State& y, double h) {
    if (k2_.size() != y.size()) {
      k2_ = k3_ = k4_ = k5_ = k6_ = k7_ = ytmp_ = ynew_ = y;
    }
    ytmp_ = y + h * (a21 * k1_);
    rhs_(t + c2 * h, ytmp_, k2_);
    ytmp_ = y + h * (a31 * k1_ + a32 * k2_);
    rhs_(t + c3 * h, ytmp_, k3_);
    ytmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    rhs_(t + c4 * h, ytmp_, k4_);
    ytmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(t + c5 * h, ytmp_, k5_);
    ytmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(t + h, ytmp_, k6_);
    ynew_ = y + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    rhs_(t + h, ynew_, k7_);
  }

  double error_norm(double h) {
    ytmp_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    const auto sc = opts_.abs_tol + opts_.rel_tol * y_.array().abs().max(ynew_.array().abs());
    return std::sqrt((ytmp_.array().abs() / sc).square().mean());
  }

  // After the FSAL swap k1_ holds the accepted step's last stage and k7_ its first.
  void build_dense() {
    if (dense_ready_) return;
    const double h = h_prev_;
    r1_ = y_prev_;
    r2_ = y_ - y_prev_;
    r3_ = h * k7_ - r2_;
    r4_ = r2_ - h * k1_ - r3_;
    r5_ = h * (d1 * k7_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k1_);
    dense_ready_ = true;
  }

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  Rhs rhs_;
  IntegratorOptions opts_;
  double t_ = 0.0;
  double t_prev_ = 0.0;
  double h_ = 0.0;
  double h_prev_ = 0.0;
  bool fsal_valid_ = false;
  bool dense_ready_ = false;
  long accepted_ = 0;
  long rejected_ = 0;
  State y_, y_prev_, ynew_, ytmp_;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_;
  State r1_, r2_, r3_, r4_, r5_;
};

}  // namespace oemsync
