#include "uavmec/task_allocation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

namespace uavmec {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInitialBetaGuess = 1e-20;  // J/bit

// Root of a nonincreasing/nondecreasing function bracketed by [lo, hi].
template <class F>
double bracketed_root(F f, double lo, double hi, double f_lo, double f_hi) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  std::uintmax_t max_iter = 300;
  const auto tol = [](double a, double b) {
    return std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
  };
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter);
  return 0.5 * (r.first + r.second);
}

// Closed-form per-slot responses of one UE to the prices of its task
// Lagrangian. Each response is continuous and nondecreasing in its price.
class UeResponse {
 public:
  UeResponse(int k, const BandwidthAllocation& b, const Trajectory& u, const ScenarioConfig& cfg,
             bool allow_local)
      : slots_(cfg.slots), allow_local_(allow_local) {
    const TimeGrid grid = cfg.grid();
    const UeSpec& ue = cfg.ues[k];
    tau_ = grid.tau;
    delta_ = grid.delta;
    cycles_ = ue.cycles_per_bit;
    local_coef_ = 3.0 * cycles_ * ue.kappa;
    uav_coef_ = 3.0 * cycles_ * cfg.kappa_uav;
    ue_bw_.assign(slots_ + 1, 0.0);
    ue_rho_.assign(slots_ + 1, 0.0);
    uav_bw_.assign(slots_ + 1, 0.0);
    uav_rho_.assign(slots_ + 1, 0.0);
    for (int n = 1; n <= slots_; ++n) {
      const Vec2& p = u.points[n];
      ue_bw_[n] = b.ue_link(k, n);
      uav_bw_[n] = b.uav_link(k, n);
      ue_rho_[n] = ue_bw_[n] * channel_gain_ue(k, p, cfg) / (cfg.noise_w * kLn2);
      uav_rho_[n] = uav_bw_[n] * channel_gain_ap(p, cfg) / (cfg.noise_w * kLn2);
    }
  }

  int slots() const { return slots_; }

  double local(double beta) const {
    if (!allow_local_ || !(beta > 0.0)) return 0.0;
    return tau_ / cycles_ * std::sqrt(beta / local_coef_);
  }

  double offload(int n, double price) const {
    if (n >= slots_ || !(price > 0.0) || !(ue_bw_[n] > 0.0)) return 0.0;
    const double x = ue_rho_[n] * price;
    return x > 1.0 ? delta_ * ue_bw_[n] * std::log2(x) : 0.0;
  }

  double uav(int n, double price) const {
    if (n < 2 || !(price > 0.0)) return 0.0;
    return delta_ / cycles_ * std::sqrt(price / uav_coef_);
  }

  double relay(int n, double price) const {
    if (n < 2 || !(price > 0.0) || !(uav_bw_[n] > 0.0)) return 0.0;
    const double x = uav_rho_[n] * price;
    return x > 1.0 ? delta_ * uav_bw_[n] * std::log2(x) : 0.0;
  }

  double forward(int n, double price) const { return uav(n, price) + relay(n, price); }

 private:
  int slots_;
  bool allow_local_;
  double tau_ = 0.0;
  double delta_ = 0.0;
  double cycles_ = 0.0;
  double local_coef_ = 0.0;
  double uav_coef_ = 0.0;
  std::vector<double> ue_bw_, ue_rho_, uav_bw_, uav_rho_;
};

// Buffer prices pi[i] = eta - sum_{j>=i} lambda_j for i = 2..N. Bits offloaded
// in slot i-1 earn beta - pi[i]; bits forwarded in slot i cost pi[i].
// Nonnegative lambda is equivalent to pi nondecreasing.
class BufferPricer {
 public:
  explicit BufferPricer(const UeResponse& r) : r_(r) {}

  // Net bits (received - forwarded) of slots [first, last] at a common price.
  double excess(int first, int last, double beta, double pi) const {
    double s = 0.0;
    for (int i = first; i <= last; ++i) s += r_.offload(i - 1, beta - pi) - r_.forward(i, pi);
    return s;
  }

  double clearing_price(int first, int last, double beta) const {
    const auto f = [&](double pi) { return excess(first, last, beta, pi); };
    const double f_lo = f(0.0);
    if (f_lo <= 0.0) return 0.0;
    return bracketed_root(f, 0.0, beta, f_lo, f(beta));
  }

  // Pool-adjacent-violators over slots 2..N; returns pi indexed by slot.
  std::vector<double> prices(double beta) const {
    const int N = r_.slots();
    std::vector<double> pi(N + 1, 0.0);
    if (!(beta > 0.0)) return pi;
    struct Block {
      int first;
      int last;
      double price;
    };
    std::vector<Block> stack;
    stack.reserve(N);
    for (int i = 2; i <= N; ++i) {
      stack.push_back({i, i, clearing_price(i, i, beta)});
      while (stack.size() >= 2 && stack[stack.size() - 2].price > stack.back().price) {
        const Block right = stack.back();
        stack.pop_back();
        Block& left = stack.back();
        left.last = right.last;
        left.price = clearing_price(left.first, left.last, beta);
      }
    }
    for (const Block& blk : stack) {
      for (int i = blk.first; i <= blk.last; ++i) pi[i] = blk.price;
    }
    return pi;
  }

  double completed_bits(double beta, const std::vector<double>& pi) const {
    const int N = r_.slots();
    double s = N * r_.local(beta);
    for (int i = 2; i <= N; ++i) s += r_.offload(i - 1, beta - pi[i]);
    return s;
  }

 private:
  const UeResponse& r_;
};

// Grows hi geometrically until total(hi) >= target.
template <class Total>
double expand_bracket(Total total, double hi, double target, const char* what) {
  for (int it = 0; it < 2100; ++it) {
    if (total(hi) >= target) return hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) break;
  }
  throw std::runtime_error(std::string("task allocation: cannot bracket ") + what +
                           " (task size unreachable with the given links)");
}

void write_ue_duals(int k, const std::vector<double>& pi, double beta, TaskDuals& d) {
  const int N = static_cast<int>(pi.size()) - 1;
  d.beta[k] = beta;
  d.eta[k] = pi[N];
  d.lambda(k, 1) = 0.0;
  for (int n = 2; n <= N - 1; ++n) d.lambda(k, n) = std::max(0.0, pi[n + 1] - pi[n]);
  d.lambda(k, N) = 0.0;
}

void solve_ue_blocks(int k, const UeResponse& r, double target_bits, TaskDuals& duals) {
  if (!(target_bits > 0.0)) {
    write_ue_duals(k, std::vector<double>(r.slots() + 1, 0.0), 0.0, duals);
    return;
  }
  const BufferPricer pricer(r);
  const auto residual = [&](double beta) { return pricer.completed_bits(beta, pricer.prices(beta)) - target_bits; };

  double hi = kInitialBetaGuess;
  // Local computing alone reaches the target at this price, so it bounds beta.
  if (r.local(1.0) > 0.0) {
    const double per_slot = target_bits / r.slots();
    hi = std::max(hi, per_slot * per_slot / (r.local(1.0) * r.local(1.0)));
  }
  hi = expand_bracket([&](double b) { return residual(b) + target_bits; }, hi, target_bits, "beta");
  const double beta = bracketed_root(residual, 0.0, hi, -target_bits, residual(hi));
  write_ue_duals(k, pricer.prices(beta), beta, duals);
}

// --- subgradient variant -------------------------------------------------

struct SuffixSums {
  std::vector<double> tilde;  // sum_{i>=n}^{N-1} lambda_i
  std::vector<double> hat;    // sum_{i>n}^{N-1} lambda_i
};

SuffixSums suffix_sums(const SlotGrid& lambda, int k) {
  const int N = lambda.slots();
  SuffixSums s{std::vector<double>(N + 2, 0.0), std::vector<double>(N + 1, 0.0)};
  for (int n = N - 1; n >= 1; --n) s.tilde[n] = s.tilde[n + 1] + lambda(k, n);
  for (int n = 1; n <= N; ++n) s.hat[n] = s.tilde[n + 1];
  return s;
}

// eta and beta for fixed lambda: beta outer root on the task total, eta inner
// root on the relay balance.
std::pair<double, double> nested_equality_duals(const UeResponse& r, const SuffixSums& sums, double target_bits) {
  const int N = r.slots();
  double max_hat = 0.0;
  for (int n = 1; n <= N; ++n) max_hat = std::max(max_hat, sums.hat[n]);

  const auto eta_for = [&](double beta) {
    const auto balance = [&](double eta) {
      double s = 0.0;
      for (int n = 2; n <= N; ++n) s += r.forward(n, eta - sums.tilde[n]);
      for (int n = 1; n <= N - 1; ++n) s -= r.offload(n, sums.hat[n] + beta - eta);
      return s;
    };
    const double hi = beta + max_hat;
    const double f_lo = balance(0.0);
    if (f_lo >= 0.0 || !(hi > 0.0)) return 0.0;
    return bracketed_root(balance, 0.0, hi, f_lo, balance(hi));
  };
  const auto total = [&](double beta) {
    const double eta = eta_for(beta);
    double s = N * r.local(beta);
    for (int n = 1; n <= N - 1; ++n) s += r.offload(n, sums.hat[n] + beta - eta);
    return s;
  };
  if (!(target_bits > 0.0)) return {0.0, 0.0};
  double hi = kInitialBetaGuess;
  if (r.local(1.0) > 0.0) {
    const double per_slot = target_bits / N;
    hi = std::max(hi, per_slot * per_slot / (r.local(1.0) * r.local(1.0)));
  }
  hi = expand_bracket(total, hi, target_bits, "beta");
  const auto residual = [&](double b) { return total(b) - target_bits; };
  const double beta = bracketed_root(residual, 0.0, hi, -target_bits, residual(hi));
  return {eta_for(beta), beta};
}

struct UeAllocation {
  std::vector<double> local, offload, forward_uav, forward_relay;
};

UeAllocation ue_primal(const UeResponse& r, const SuffixSums& sums, double eta, double beta) {
  const int N = r.slots();
  UeAllocation a{std::vector<double>(N + 1, 0.0), std::vector<double>(N + 1, 0.0),
                 std::vector<double>(N + 1, 0.0), std::vector<double>(N + 1, 0.0)};
  const double loc = r.local(beta);
  for (int n = 1; n <= N; ++n) {
    a.local[n] = loc;
    if (n <= N - 1) a.offload[n] = r.offload(n, sums.hat[n] + beta - eta);
    if (n >= 2) {
      a.forward_uav[n] = r.uav(n, eta - sums.tilde[n]);
      a.forward_relay[n] = r.relay(n, eta - sums.tilde[n]);
    }
  }
  return a;
}

// Causality residuals g_n = forwarded(2..n) - received(1..n-1), n = 2..N-1.
std::vector<double> causality_residuals(const UeAllocation& a) {
  const int N = static_cast<int>(a.local.size()) - 1;
  std::vector<double> g(N + 1, 0.0);
  double received = 0.0;
  double forwarded = 0.0;
  for (int n = 2; n <= N - 1; ++n) {
    received += a.offload[n - 1];
    forwarded += a.forward_uav[n] + a.forward_relay[n];
    g[n] = forwarded - received;
  }
  return g;
}

void solve_ue_subgradient(int k, const UeResponse& r, double target_bits, const TaskSolveOptions& opts,
                          TaskDuals& duals, int& iterations, bool& converged) {
  const int N = r.slots();
  for (int n = 1; n <= N; ++n) duals.lambda(k, n) = 0.0;
  converged = true;
  if (!(target_bits > 0.0)) {
    duals.eta[k] = duals.beta[k] = 0.0;
    return;
  }
  converged = false;
  double step_scale = 0.0;
  double prev_dual = std::numeric_limits<double>::quiet_NaN();
  SlotGrid best_lambda = duals.lambda;
  double best_violation = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= opts.max_iterations; ++t) {
    iterations = std::max(iterations, t);
    const SuffixSums sums = suffix_sums(duals.lambda, k);
    const auto [eta, beta] = nested_equality_duals(r, sums, target_bits);
    duals.eta[k] = eta;
    duals.beta[k] = beta;
    const UeAllocation a = ue_primal(r, sums, eta, beta);
    const std::vector<double> g = causality_residuals(a);

    double violation = 0.0;
    double max_abs_g = 0.0;
    double dual = 0.0;
    for (int n = 2; n <= N - 1; ++n) {
      violation = std::max(violation, g[n]);
      max_abs_g = std::max(max_abs_g, std::abs(g[n]));
      dual += duals.lambda(k, n) * g[n];
    }
    if (violation < best_violation) {
      best_violation = violation;
      best_lambda = duals.lambda;
    }
    const bool feasible = violation <= opts.tol * target_bits;
    const bool settled = std::isfinite(prev_dual) && std::abs(dual - prev_dual) <= opts.eps1 * std::max(std::abs(dual), 1e-300);
    if (max_abs_g == 0.0 || (feasible && settled)) {
      converged = true;
      return;
    }
    prev_dual = dual;
    if (step_scale == 0.0) step_scale = 0.1 * beta / max_abs_g;
    const double step = step_scale / std::sqrt(static_cast<double>(t));
    for (int n = 2; n <= N - 1; ++n) duals.lambda(k, n) = std::max(0.0, duals.lambda(k, n) + step * g[n]);
  }
  duals.lambda = best_lambda;
  const SuffixSums sums = suffix_sums(duals.lambda, k);
  std::tie(duals.eta[k], duals.beta[k]) = nested_equality_duals(r, sums, target_bits);
}

void fill_report(const TaskAllocation& l, const TaskDuals& duals, const BandwidthAllocation& b,
                 const Trajectory& u, const ScenarioConfig& cfg, bool allow_local, TaskSolveReport& rep) {
  const int K = cfg.ue_count();
  const int N = cfg.slots;
  rep.task_equality_residual.assign(K, 0.0);
  rep.relay_equality_residual.assign(K, 0.0);
  rep.max_causality_violation = 0.0;
  for (int k = 0; k < K; ++k) {
    double received = 0.0;
    double forwarded = 0.0;
    for (int n = 2; n <= N; ++n) {
      received += l.ue_offload(k, n - 1);
      forwarded += l.uav_compute(k, n) + l.uav_offload(k, n);
      rep.max_causality_violation = std::max(rep.max_causality_violation, forwarded - received);
    }
    rep.relay_equality_residual[k] = forwarded - received;
    rep.task_equality_residual[k] = l.local.sum_ue(k) + received - cfg.ues[k].input_bits;
  }
  const TaskKkt kkt = evaluate_task_kkt(l, duals, b, u, cfg, allow_local);
  rep.objective = task_objective(l, b, u, cfg);
  rep.dual_value = kkt.dual_value;
  rep.duality_gap_estimate = kkt.duality_gap;
  rep.complementary_slackness = kkt.complementary_slackness;
  rep.stationarity = kkt.stationarity;
}

}  // namespace

TaskAllocation primal_from_duals(const TaskDuals& duals, const BandwidthAllocation& b, const Trajectory& u,
                                 const ScenarioConfig& cfg, bool allow_local) {
  const int K = cfg.ue_count();
  const int N = cfg.slots;
  TaskAllocation l(K, N);
  for (int k = 0; k < K; ++k) {
    const UeResponse r(k, b, u, cfg, allow_local);
    const SuffixSums sums = suffix_sums(duals.lambda, k);
    const UeAllocation a = ue_primal(r, sums, duals.eta[k], duals.beta[k]);
    for (int n = 1; n <= N; ++n) {
      l.local(k, n) = a.local[n];
      l.ue_offload(k, n) = a.offload[n];
      l.uav_compute(k, n) = a.forward_uav[n];
      l.uav_offload(k, n) = a.forward_relay[n];
    }
  }
  return l;
}

TaskSolution solve_task_allocation(const BandwidthAllocation& b, const Trajectory& u, const ScenarioConfig& cfg,
                                   const TaskSolveOptions& opts) {
  const int K = cfg.ue_count();
  const int N = cfg.slots;
  TaskSolution sol;
  sol.duals = TaskDuals(K, N);
  bool all_converged = true;
  int iterations = 1;
  for (int k = 0; k < K; ++k) {
    const UeResponse r(k, b, u, cfg, opts.allow_local);
    const double target = cfg.ues[k].input_bits;
    if (opts.method == DualSearch::kMonotoneBlocks) {
      solve_ue_blocks(k, r, target, sol.duals);
    } else {
      bool converged = false;
      solve_ue_subgradient(k, r, target, opts, sol.duals, iterations, converged);
      all_converged = all_converged && converged;
    }
  }
  sol.allocation = primal_from_duals(sol.duals, b, u, cfg, opts.allow_local);
  sol.report.outer_iterations = iterations;
  fill_report(sol.allocation, sol.duals, b, u, cfg, opts.allow_local, sol.report);

  double worst = 0.0;
  for (int k = 0; k < K; ++k) {
    const double scale = std::max(cfg.ues[k].input_bits, 1.0);
    worst = std::max({worst, std::abs(sol.report.task_equality_residual[k]) / scale,
                      std::abs(sol.report.relay_equality_residual[k]) / scale});
  }
  double min_bits = std::numeric_limits<double>::infinity();
  for (const UeSpec& ue : cfg.ues) min_bits = std::min(min_bits, std::max(ue.input_bits, 1.0));
  worst = std::max(worst, sol.report.max_causality_violation / min_bits);
  sol.report.converged = all_converged && worst <= std::max(opts.tol, 1e-12);
  if (!sol.report.converged) {
    throw TaskSolveError("task allocation did not converge (relative residual " + std::to_string(worst) + ")",
                         sol);
  }
  return sol;
}

double task_objective(const TaskAllocation& l, const BandwidthAllocation& b, const Trajectory& u,
                      const ScenarioConfig& cfg) {
  const TimeGrid grid = cfg.grid();
  double e = 0.0;
  for (int n = 1; n <= cfg.slots; ++n) {
    const Vec2& p = u.points[n];
    const double h_ap = channel_gain_ap(p, cfg);
    for (int k = 0; k < cfg.ue_count(); ++k) {
      const UeSpec& ue = cfg.ues[k];
      e += local_energy(l.local(k, n), ue, grid) +
           ue_offload_energy(l.ue_offload(k, n), b.ue_link(k, n), channel_gain_ue(k, p, cfg), cfg, grid) +
           uav_compute_energy(l.uav_compute(k, n), ue, cfg, grid) +
           uav_offload_energy(l.uav_offload(k, n), b.uav_link(k, n), h_ap, cfg, grid);
    }
  }
  return e;
}

TaskKkt evaluate_task_kkt(const TaskAllocation& l, const TaskDuals& duals, const BandwidthAllocation& b,
                          const Trajectory& u, const ScenarioConfig& cfg, bool allow_local) {
  const int K = cfg.ue_count();
  const int N = cfg.slots;
  const TimeGrid grid = cfg.grid();
  TaskKkt out;
  const double energy = task_objective(l, b, u, cfg);
  double penalty = 0.0;

  // Residual of a stationarity condition for a variable x >= 0 with marginal
  // cost `marginal` and price `price`.
  const auto station = [](double x, double marginal, double price) {
    return x > 0.0 ? std::abs(marginal - price) : std::max(0.0, price - marginal);
  };

  for (int k = 0; k < K; ++k) {
    const UeSpec& ue = cfg.ues[k];
    const double bits = ue.input_bits;
    const SuffixSums sums = suffix_sums(duals.lambda, k);
    const double eta = duals.eta[k];
    const double beta = duals.beta[k];
    const double scale = std::max({std::abs(beta), std::abs(eta), 1e-300});
    const double bit_scale = std::max(bits, 1.0);

    double received = 0.0;
    double forwarded = 0.0;
    double total_local = 0.0;
    double worst_station = 0.0;
    double worst_cs = 0.0;
    double worst_primal = 0.0;
    for (int n = 1; n <= N; ++n) {
      const Vec2& p = u.points[n];
      const double loc = l.local(k, n);
      total_local += loc;
      if (allow_local) {
        worst_station = std::max(worst_station, station(loc, local_energy_per_bit(loc, ue, grid), beta));
      }
      if (n <= N - 1 && b.ue_link(k, n) > 0.0) {
        const double x = l.ue_offload(k, n);
        const double m = link_energy_per_bit(x, b.ue_link(k, n), channel_gain_ue(k, p, cfg), cfg, grid);
        worst_station = std::max(worst_station, station(x, m, sums.hat[n] + beta - eta));
      }
      if (n >= 2) {
        const double price = eta - sums.tilde[n];
        const double y = l.uav_compute(k, n);
        worst_station = std::max(worst_station, station(y, uav_compute_energy_per_bit(y, ue, cfg, grid), price));
        if (b.uav_link(k, n) > 0.0) {
          const double z = l.uav_offload(k, n);
          const double m = link_energy_per_bit(z, b.uav_link(k, n), channel_gain_ap(p, cfg), cfg, grid);
          worst_station = std::max(worst_station, station(z, m, price));
        }
        received += l.ue_offload(k, n - 1);
        forwarded += l.uav_compute(k, n) + l.uav_offload(k, n);
        if (n <= N - 1) {
          const double g = forwarded - received;
          worst_primal = std::max(worst_primal, g / bit_scale);
          worst_cs = std::max(worst_cs, duals.lambda(k, n) * std::abs(g) / (scale * bit_scale));
          penalty += duals.lambda(k, n) * g;
        }
      }
    }
    const double relay_gap = received - forwarded;  // received over slots 1..N-1
    const double task_gap = bits - total_local - received;
    penalty += eta * relay_gap + beta * task_gap;
    worst_primal = std::max({worst_primal, std::abs(relay_gap) / bit_scale, std::abs(task_gap) / bit_scale});
    if (bits > 0.0) {
      out.stationarity = std::max(out.stationarity, worst_station / scale);
      out.complementary_slackness = std::max(out.complementary_slackness, worst_cs);
    }
    out.primal_residual = std::max(out.primal_residual, worst_primal);
  }
  out.dual_value = energy + penalty;
  out.duality_gap = energy - out.dual_value;
  return out;
}

}  // namespace uavmec
