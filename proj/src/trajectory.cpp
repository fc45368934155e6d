#include "uavmec/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace uavmec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// delta N0 / h0 * (2^(bits/(delta bw)) - 1): the factor multiplying
// (|u - anchor|^2 + H^2) in a transmit energy.
double transmit_weight(double bits, double bw_hz, const ScenarioConfig& cfg, const TimeGrid& grid) {
  if (bits == 0.0) return 0.0;
  if (!(bw_hz > 0.0)) throw InfeasibleAllocation("positive offload bits on a zero-bandwidth link");
  return grid.delta * cfg.noise_w / cfg.ref_gain * std::expm1(bits / (grid.delta * bw_hz) * std::numbers::ln2);
}

using Mat2 = Eigen::Matrix2d;
using Vec2d = Eigen::Vector2d;

Vec2d to_eigen(const Vec2& v) { return {v.x, v.y}; }

}  // namespace

double trajectory_objective(const Trajectory& u, const TaskAllocation& l, const BandwidthAllocation& b,
                            const ScenarioConfig& cfg) {
  const TimeGrid grid = cfg.grid();
  double e = 0.0;
  for (int n = 1; n <= cfg.slots; ++n) {
    const Vec2& p = u.points[n];
    e += fly_energy(u.speed(n, grid.tau), cfg, grid);
    const double h_ap = channel_gain_ap(p, cfg);
    for (int k = 0; k < cfg.ue_count(); ++k) {
      e += ue_offload_energy(l.ue_offload(k, n), b.ue_link(k, n), channel_gain_ue(k, p, cfg), cfg, grid);
      e += uav_offload_energy(l.uav_offload(k, n), b.uav_link(k, n), h_ap, cfg, grid);
    }
  }
  return e;
}

Trajectory initial_trajectory(const ScenarioConfig& cfg, double speed_floor) {
  Trajectory u = Trajectory::straight_line(cfg);
  const double tau = cfg.grid().tau;
  if (norm(cfg.uav_end - cfg.uav_start) / cfg.horizon_s >= 2.0 * speed_floor) return u;

  const int N = cfg.slots;
  const double loiter = std::pow(cfg.theta2 / (3.0 * cfg.theta1), 0.25);
  const double chord_speed = std::min(0.5 * cfg.vmax_mps, std::max(4.0 * speed_floor, loiter));
  const double radius = chord_speed * tau / (2.0 * std::sin(std::numbers::pi / N));
  for (int n = 1; n < N; ++n) {
    const double a = 2.0 * std::numbers::pi * n / N;
    u.points[n] += Vec2{radius * (std::cos(a) - 1.0), radius * std::sin(a)};
  }
  return u;
}

ApproxProblem::ApproxProblem(const Trajectory& expansion, const TaskAllocation& l, const BandwidthAllocation& b,
                             const ScenarioConfig& cfg, double speed_floor)
    : slots_(cfg.slots),
      tau_(cfg.grid().tau),
      theta1_(cfg.theta1),
      theta2_(cfg.theta2),
      step_max_(cfg.vmax_mps * cfg.grid().tau),
      floor_(speed_floor),
      altitude_sq_(cfg.altitude_m * cfg.altitude_m),
      start_(cfg.uav_start),
      end_(cfg.uav_end),
      expansion_(expansion),
      cut_dir_(slots_ + 1),
      weight_(slots_ + 1, 0.0),
      weighted_anchor_(slots_ + 1),
      anchor_const_(slots_ + 1, 0.0) {
  const TimeGrid grid = cfg.grid();
  for (int n = 1; n <= slots_; ++n) {
    cut_dir_[n] = expansion.points[n] - expansion.points[n - 1];
    const auto add = [&](double w, const Vec2& anchor) {
      weight_[n] += w;
      weighted_anchor_[n] += w * anchor;
      anchor_const_[n] += w * (squared_norm(anchor) + altitude_sq_);
    };
    for (int k = 0; k < cfg.ue_count(); ++k) {
      add(transmit_weight(l.ue_offload(k, n), b.ue_link(k, n), cfg, grid), cfg.ues[k].position);
      add(transmit_weight(l.uav_offload(k, n), b.uav_link(k, n), cfg, grid), cfg.ap_position);
    }
  }
}

Vec2 ApproxProblem::waypoint(const Eigen::VectorXd& x, int n) const {
  if (n == 0) return start_;
  if (n == slots_) return end_;
  return {x[u_index(n)], x[u_index(n) + 1]};
}

Eigen::VectorXd ApproxProblem::pack(const Trajectory& u, const std::vector<double>& vtilde) const {
  Eigen::VectorXd x(dimension());
  for (int n = 1; n < slots_; ++n) {
    x[u_index(n)] = u.points[n].x;
    x[u_index(n) + 1] = u.points[n].y;
  }
  for (int n = 1; n <= slots_; ++n) x[v_index(n)] = vtilde[n];
  return x;
}

Trajectory ApproxProblem::trajectory(const Eigen::VectorXd& x) const {
  Trajectory u;
  u.points.resize(slots_ + 1);
  for (int n = 0; n <= slots_; ++n) u.points[n] = waypoint(x, n);
  return u;
}

std::vector<double> ApproxProblem::slack_speeds(const Eigen::VectorXd& x) const {
  std::vector<double> v(slots_ + 1, 0.0);
  for (int n = 1; n <= slots_; ++n) v[n] = slack(x, n);
  return v;
}

double ApproxProblem::speed_cut(int n, const Vec2& displacement, double vtilde) const {
  const Vec2& d = cut_dir_[n];
  return vtilde * vtilde * tau_ * tau_ - 2.0 * dot(d, displacement) + squared_norm(d);
}

double ApproxProblem::objective(const Eigen::VectorXd& x) const {
  double f = 0.0;
  const double fly_coef = theta1_ / (tau_ * tau_);
  for (int n = 1; n <= slots_; ++n) {
    const Vec2 p = waypoint(x, n);
    const double step = norm(p - waypoint(x, n - 1));
    f += fly_coef * step * step * step + tau_ * theta2_ / slack(x, n);
    f += weight_[n] * squared_norm(p) - 2.0 * dot(weighted_anchor_[n], p) + anchor_const_[n];
  }
  return f;
}

Eigen::VectorXd ApproxProblem::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dimension());
  const double fly_coef = 3.0 * theta1_ / (tau_ * tau_);
  for (int n = 1; n <= slots_; ++n) {
    const Vec2 p = waypoint(x, n);
    const Vec2 delta = p - waypoint(x, n - 1);
    const Vec2d gd = fly_coef * norm(delta) * to_eigen(delta);
    if (n < slots_) {
      g.segment<2>(u_index(n)) += gd + 2.0 * (weight_[n] * to_eigen(p) - to_eigen(weighted_anchor_[n]));
    }
    if (n > 1) g.segment<2>(u_index(n - 1)) -= gd;
    const double v = slack(x, n);
    g[v_index(n)] -= tau_ * theta2_ / (v * v);
  }
  return g;
}

Eigen::MatrixXd ApproxProblem::hessian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dimension(), dimension());
  const double fly_coef = 3.0 * theta1_ / (tau_ * tau_);
  for (int n = 1; n <= slots_; ++n) {
    const Vec2 delta = waypoint(x, n) - waypoint(x, n - 1);
    const double len = norm(delta);
    Mat2 hd = Mat2::Zero();
    if (len > 0.0) {
      const Vec2d dv = to_eigen(delta);
      hd = fly_coef * (len * Mat2::Identity() + dv * dv.transpose() / len);
    }
    if (n < slots_) {
      h.block<2, 2>(u_index(n), u_index(n)) += hd + 2.0 * weight_[n] * Mat2::Identity();
    }
    if (n > 1) h.block<2, 2>(u_index(n - 1), u_index(n - 1)) += hd;
    if (n > 1 && n < slots_) {
      h.block<2, 2>(u_index(n), u_index(n - 1)) -= hd;
      h.block<2, 2>(u_index(n - 1), u_index(n)) -= hd;
    }
    const double v = slack(x, n);
    h(v_index(n), v_index(n)) += 2.0 * tau_ * theta2_ / (v * v * v);
  }
  return h;
}

Eigen::VectorXd ApproxProblem::constraints(const Eigen::VectorXd& x) const {
  Eigen::VectorXd c(constraint_count());
  for (int n = 1; n <= slots_; ++n) {
    const Vec2 delta = waypoint(x, n) - waypoint(x, n - 1);
    c[3 * (n - 1)] = squared_norm(delta) - step_max_ * step_max_;
    c[3 * (n - 1) + 1] = speed_cut(n, delta, slack(x, n));
    c[3 * (n - 1) + 2] = floor_ - slack(x, n);
  }
  return c;
}

bool ApproxProblem::strictly_feasible(const Eigen::VectorXd& x) const {
  if (!x.allFinite()) return false;
  return (constraints(x).array() < 0.0).all();
}

bool ApproxProblem::interior_start(Eigen::VectorXd& x) const {
  const Vec2 chord = end_ - start_;
  if (norm(chord) >= step_max_ * slots_ * (1.0 - 1e-12)) return false;
  std::vector<double> vt(slots_ + 1, 0.0);
  for (double s : {0.0, 1e-6, 1e-4, 1e-2, 0.1, 0.5}) {
    Trajectory u = expansion_;
    for (int n = 1; n < slots_; ++n) {
      const Vec2 straight = start_ + (static_cast<double>(n) / slots_) * chord;
      u.points[n] = (1.0 - s) * expansion_.points[n] + s * straight;
    }
    bool ok = true;
    for (int n = 1; n <= slots_ && ok; ++n) {
      const Vec2 delta = u.points[n] - u.points[n - 1];
      const double room = 2.0 * dot(cut_dir_[n], delta) - squared_norm(cut_dir_[n]);
      const double top = room > 0.0 ? std::sqrt(room) / tau_ : 0.0;
      ok = top > floor_;
      vt[n] = floor_ + 0.9 * (top - floor_);
    }
    if (!ok) continue;
    x = pack(u, vt);
    if (strictly_feasible(x)) return true;
  }
  return false;
}

double ApproxProblem::barrier(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd c = constraints(x);
  if (!(c.array() < 0.0).all() || !c.allFinite()) return kInf;
  return -(-c.array()).log().sum();
}

Eigen::VectorXd ApproxProblem::barrier_gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dimension());
  const double tt = tau_ * tau_;
  for (int n = 1; n <= slots_; ++n) {
    const Vec2 delta = waypoint(x, n) - waypoint(x, n - 1);
    const double v = slack(x, n);
    const Vec2d dv = to_eigen(delta);
    const Vec2d d = to_eigen(cut_dir_[n]);
    const double s1 = step_max_ * step_max_ - dv.squaredNorm();
    const double s2 = 2.0 * d.dot(dv) - d.squaredNorm() - tt * v * v;
    const double s3 = v - floor_;
    const Vec2d gd = 2.0 * dv / s1 - 2.0 * d / s2;
    if (n < slots_) g.segment<2>(u_index(n)) += gd;
    if (n > 1) g.segment<2>(u_index(n - 1)) -= gd;
    g[v_index(n)] += 2.0 * tt * v / s2 - 1.0 / s3;
  }
  return g;
}

Eigen::MatrixXd ApproxProblem::barrier_hessian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dimension(), dimension());
  const double tt = tau_ * tau_;
  for (int n = 1; n <= slots_; ++n) {
    const Vec2 delta = waypoint(x, n) - waypoint(x, n - 1);
    const double v = slack(x, n);
    const Vec2d dv = to_eigen(delta);
    const Vec2d d = to_eigen(cut_dir_[n]);
    const double s1 = step_max_ * step_max_ - dv.squaredNorm();
    const double s2 = 2.0 * d.dot(dv) - d.squaredNorm() - tt * v * v;
    const double s3 = v - floor_;
    // gradient of s2 w.r.t. (delta, v) is (2d, -2 tt v)
    const Vec2d ds2 = 2.0 * d;
    const double vs2 = -2.0 * tt * v;
    const Mat2 hd = 2.0 / s1 * Mat2::Identity() + 4.0 / (s1 * s1) * dv * dv.transpose() +
                    ds2 * ds2.transpose() / (s2 * s2);
    const Vec2d hdv = ds2 * vs2 / (s2 * s2);
    const double hvv = vs2 * vs2 / (s2 * s2) + 2.0 * tt / s2 + 1.0 / (s3 * s3);
    const int iv = v_index(n);
    if (n < slots_) {
      const int i = u_index(n);
      h.block<2, 2>(i, i) += hd;
      h.block<2, 1>(i, iv) += hdv;
      h.block<1, 2>(iv, i) += hdv.transpose();
    }
    if (n > 1) {
      const int j = u_index(n - 1);
      h.block<2, 2>(j, j) += hd;
      h.block<2, 1>(j, iv) -= hdv;
      h.block<1, 2>(iv, j) -= hdv.transpose();
    }
    if (n > 1 && n < slots_) {
      h.block<2, 2>(u_index(n), u_index(n - 1)) -= hd;
      h.block<2, 2>(u_index(n - 1), u_index(n)) -= hd;
    }
    h(iv, iv) += hvv;
  }
  return h;
}

InnerResult solve_inner(const ApproxProblem& problem, const Eigen::VectorXd& start, double tol,
                        int max_newton_steps) {
  if (!problem.strictly_feasible(start)) {
    throw std::invalid_argument("solve_inner: start point is not strictly feasible");
  }
  InnerResult res;
  Eigen::VectorXd x = start;
  const double f_start = problem.objective(start);
  const double m = problem.constraint_count();
  double t = m / std::max(std::abs(f_start), 1e-300);
  constexpr double kGrowth = 20.0;

  const auto phi = [&](const Eigen::VectorXd& y) {
    const double bar = problem.barrier(y);
    return std::isfinite(bar) ? t * problem.objective(y) + bar : kInf;
  };

  for (;;) {
    // Newton centering at the current t.
    for (int it = 0; it < 200; ++it) {
      if (res.newton_steps >= max_newton_steps) {
        throw TrajectorySolveError("trajectory inner solver: Newton step cap exceeded", problem.trajectory(x));
      }
      const Eigen::VectorXd g = t * problem.gradient(x) + problem.barrier_gradient(x);
      Eigen::MatrixXd h = t * problem.hessian(x) + problem.barrier_hessian(x);
      Eigen::LLT<Eigen::MatrixXd> llt(h);
      double shift = 1e-12 * h.diagonal().cwiseAbs().maxCoeff();
      while (llt.info() != Eigen::Success) {
        h.diagonal().array() += shift;
        shift *= 10.0;
        llt.compute(h);
      }
      const Eigen::VectorXd dx = -llt.solve(g);
      const double decrement_sq = -g.dot(dx);
      ++res.newton_steps;
      if (decrement_sq * 0.5 <= 1e-10) break;

      const double phi0 = phi(x);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 80; ++ls, alpha *= 0.5) {
        const Eigen::VectorXd trial = x + alpha * dx;
        if (!problem.strictly_feasible(trial)) continue;
        const double phi1 = phi(trial);
        if (phi1 <= phi0 - 0.25 * alpha * decrement_sq) {
          x = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;  // no further progress at double precision
    }
    res.gap = m / t;
    if (res.gap <= tol * std::max(std::abs(problem.objective(x)), 1e-300)) break;
    t *= kGrowth;
  }

  const Eigen::VectorXd grad_phi = problem.gradient(x) + problem.barrier_gradient(x) / t;
  res.stationarity = grad_phi.lpNorm<Eigen::Infinity>() /
                     std::max(1.0, problem.gradient(x).lpNorm<Eigen::Infinity>());
  res.x = problem.objective(x) <= f_start ? x : start;
  return res;
}

Eigen::MatrixXd trajectory_hessian(const Trajectory& u, const TaskAllocation& l, const BandwidthAllocation& b,
                                   const ScenarioConfig& cfg) {
  const TimeGrid grid = cfg.grid();
  const int N = cfg.slots;
  const double tau = grid.tau;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * (N - 1), 2 * (N - 1));
  for (int n = 1; n <= N; ++n) {
    // Propulsion as a function of the slot displacement d: g(r), r = |d|.
    const Vec2d d = to_eigen(u.points[n] - u.points[n - 1]);
    const double r = std::max(d.norm(), 1e-9);
    const Vec2d e = d.norm() > 0.0 ? Vec2d(d / r) : Vec2d(1.0, 0.0);
    const double g1 = 3.0 * cfg.theta1 * r * r / (tau * tau) - cfg.theta2 * tau * tau / (r * r);
    const double g2 = 6.0 * cfg.theta1 * r / (tau * tau) + 2.0 * cfg.theta2 * tau * tau / (r * r * r);
    const Mat2 P = e * e.transpose();
    const Mat2 block = g2 * P + g1 / r * (Mat2::Identity() - P);
    if (n < N) H.block<2, 2>(2 * (n - 1), 2 * (n - 1)) += block;
    if (n > 1) H.block<2, 2>(2 * (n - 2), 2 * (n - 2)) += block;
    if (n > 1 && n < N) {
      H.block<2, 2>(2 * (n - 1), 2 * (n - 2)) -= block;
      H.block<2, 2>(2 * (n - 2), 2 * (n - 1)) -= block;
    }
    // Transmit energy is weight * (H^2 + |u - ground|^2) per link.
    if (n < N) {
      double w = 0.0;
      for (int k = 0; k < cfg.ue_count(); ++k) {
        w += transmit_weight(l.ue_offload(k, n), b.ue_link(k, n), cfg, grid);
        w += transmit_weight(l.uav_offload(k, n), b.uav_link(k, n), cfg, grid);
      }
      H.block<2, 2>(2 * (n - 1), 2 * (n - 1)) += 2.0 * w * Mat2::Identity();
    }
  }
  return H;
}

std::optional<Trajectory> escape_saddle(const Trajectory& u, double current, const TaskAllocation& l,
                                        const BandwidthAllocation& b, const ScenarioConfig& cfg) {
  const int N = cfg.slots;
  if (N < 2) return std::nullopt;
  const Eigen::MatrixXd H = trajectory_hessian(u, l, b, cfg);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
  if (eig.info() != Eigen::Success) return std::nullopt;
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if (!(eig.eigenvalues()[0] < -1e-9 * scale)) return std::nullopt;
  const Eigen::VectorXd dir = eig.eigenvectors().col(0);

  const double tau = cfg.grid().tau;
  const double reach = cfg.vmax_mps * tau;
  const auto moved = [&](double a) {
    Trajectory v = u;
    for (int n = 1; n < N; ++n) v.points[n] += Vec2{a * dir[2 * (n - 1)], a * dir[2 * (n - 1) + 1]};
    return v;
  };
  const auto speed_ok = [&](const Trajectory& v) {
    for (int n = 1; n <= N; ++n) {
      if (norm(v.points[n] - v.points[n - 1]) > reach) return false;
    }
    return true;
  };
  for (double a = reach; a > 1e-6 * reach; a *= 0.5) {
    std::optional<Trajectory> best;
    double best_value = current - 1e-12 * std::abs(current);
    for (double sign : {1.0, -1.0}) {
      Trajectory v = moved(sign * a);
      if (!speed_ok(v)) continue;
      const double value = trajectory_objective(v, l, b, cfg);
      if (value < best_value) {
        best_value = value;
        best = std::move(v);
      }
    }
    if (best) return best;
  }
  return std::nullopt;
}

ScaResult sca_solve(const TaskAllocation& l, const BandwidthAllocation& b, const Trajectory& u_init,
                    const ScenarioConfig& cfg, const ScaOptions& opts) {
  ScaResult out;
  ScaState& st = out.state;
  st.iterate = u_init;
  st.slack_speed = u_init.speeds(cfg.grid().tau);
  double current = trajectory_objective(u_init, l, b, cfg);
  st.objective_trace.push_back(current);

  int run_iterations = 0;
  double before_escape = std::numeric_limits<double>::infinity();
  while (true) {
    bool stalled = false;
    while (run_iterations < opts.max_iterations) {
      ++run_iterations;
      ++st.iteration;
      const ApproxProblem problem(st.iterate, l, b, cfg, opts.speed_floor);
      Eigen::VectorXd x0;
      if (!problem.interior_start(x0)) {
        stalled = true;  // no room to move: fixed endpoints at full speed
        break;
      }
      InnerResult inner;
      try {
        inner = solve_inner(problem, x0, opts.inner_tol, opts.max_newton_steps);
      } catch (const TrajectorySolveError& e) {
        throw TrajectorySolveError(std::string(e.what()) + " at SCA iteration " + std::to_string(st.iteration),
                                   st.iterate);
      }
      out.newton_steps += inner.newton_steps;
      const Trajectory candidate = problem.trajectory(inner.x);
      const double value = trajectory_objective(candidate, l, b, cfg);
      if (!(value <= current)) {
        stalled = true;
        break;
      }
      const double change = current - value;
      st.iterate = candidate;
      st.slack_speed = problem.slack_speeds(inner.x);
      current = value;
      st.objective_trace.push_back(current);
      if (change <= opts.eps1 * std::abs(current)) {
        stalled = true;
        break;
      }
    }
    if (!stalled) break;  // iteration cap
    // An escape round that gained no more than eps1 ends the search.
    std::optional<Trajectory> next;
    if (out.escapes < opts.max_escapes && before_escape - current > opts.eps1 * std::abs(current)) {
      next = escape_saddle(st.iterate, current, l, b, cfg);
    }
    if (!next) {
      out.converged = true;
      break;
    }
    ++out.escapes;
    before_escape = current;
    run_iterations = 0;
    st.iterate = std::move(*next);
    st.slack_speed = st.iterate.speeds(cfg.grid().tau);
    current = trajectory_objective(st.iterate, l, b, cfg);
    st.objective_trace.push_back(current);
  }
  out.trajectory = st.iterate;
  return out;
}

}  // namespace uavmec
