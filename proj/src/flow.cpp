#include "symflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "symflow/algebra.hpp"

namespace symflow {

namespace {

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

bool finite_point(const Point& p) {
  return std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); });
}

// Flow plus the variational equation J' = DF(z) J, state laid out as
// z (n) followed by J row-major (n*n).
class VariationalFlow {
 public:
  explicit VariationalFlow(const VectorField& f) : n_(f.dimension()), f_(f.components()) {
    ExprMatrix j = jacobian(f);
    jac_.reserve(j.entries().size());
    for (const auto& e : j.entries()) jac_.emplace_back(e);
  }

  bool rhs(const std::vector<double>& s, std::vector<double>& out) const {
    const auto n = static_cast<std::size_t>(n_);
    std::span<const double> z(s.data(), n);
    out.assign(s.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) out[i] = f_[i](z);
    std::vector<double> a(n * n);
    for (std::size_t k = 0; k < n * n; ++k) a[k] = jac_[k](z);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) sum += a[r * n + k] * s[n + k * n + c];
        out[n + r * n + c] = sum;
      }
    }
    return std::all_of(out.begin(), out.end(), [](double v) { return std::isfinite(v); });
  }

  /// det(d phi(t, z) / dz), or nullopt on escape.
  std::optional<double> jacobian_det(const Point& z0, double t, std::size_t steps, const DomainBox& escape) const {
    const auto n = static_cast<std::size_t>(n_);
    std::vector<double> s(n + n * n, 0.0);
    std::copy(z0.begin(), z0.end(), s.begin());
    for (std::size_t i = 0; i < n; ++i) s[n + i * n + i] = 1.0;
    const double h = t / static_cast<double>(steps);
    std::vector<double> k1, k2, k3, k4, tmp(s.size());
    for (std::size_t step = 0; step < steps; ++step) {
      if (!rhs(s, k1)) return std::nullopt;
      for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + h / 2 * k1[i];
      if (!rhs(tmp, k2)) return std::nullopt;
      for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + h / 2 * k2[i];
      if (!rhs(tmp, k3)) return std::nullopt;
      for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + h * k3[i];
      if (!rhs(tmp, k4)) return std::nullopt;
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      if (!escape.contains(std::span<const double>(s.data(), n))) return std::nullopt;
    }
    return numeric_determinant(std::span<const double>(s.data() + n, n * n), n_);
  }

 private:
  int n_;
  CompiledMap f_;
  std::vector<CompiledExpr> jac_;
};

}  // namespace

std::size_t step_count(double t, double h) {
  if (!(h > 0)) throw std::invalid_argument("integrator step must be positive");
  return static_cast<std::size_t>(std::ceil(std::abs(t) / h - 1e-9));
}

std::optional<Point> flow_map(const CompiledMap& f, const Point& z0, double t, std::size_t steps,
                              const DomainBox& escape) {
  Point z = z0;
  if (steps == 0 || t == 0.0) return z;
  const double h = t / static_cast<double>(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    if (!rk4_step(f, z, h) || !escape.contains(z)) return std::nullopt;
  }
  return z;
}

Trajectory integrate(const VectorField& f, const Point& z0, const IntegratorConfig& cfg) {
  if (!(cfg.step > 0) || !(cfg.horizon > 0)) throw std::invalid_argument("integrator needs step > 0 and horizon > 0");
  if (static_cast<int>(z0.size()) != f.dimension()) throw DimensionError("initial point has the wrong dimension");
  const DomainBox escape = f.domain().scaled(cfg.escape_inflation);
  const CompiledMap rhs(f.components());
  const std::size_t steps = step_count(cfg.horizon, cfg.step);
  const double h = cfg.horizon / static_cast<double>(steps);

  Trajectory tr;
  auto run = [&](double sign, std::vector<double>& times, std::vector<Point>& states) {
    Point z = z0;
    for (std::size_t i = 1; i <= steps; ++i) {
      if (!rk4_step(rhs, z, sign * h)) {
        tr.truncated = true;
        tr.truncation_cause = "field not finite near t = " + std::to_string(sign * h * static_cast<double>(i));
        return;
      }
      if (!escape.contains(z)) {
        tr.truncated = true;
        tr.truncation_cause = "left the escape box at t = " + std::to_string(sign * h * static_cast<double>(i));
        return;
      }
      times.push_back(sign * h * static_cast<double>(i));
      states.push_back(z);
    }
  };
  std::vector<double> back_t, fwd_t;
  std::vector<Point> back_z, fwd_z;
  run(-1.0, back_t, back_z);
  run(1.0, fwd_t, fwd_z);
  tr.times.assign(back_t.rbegin(), back_t.rend());
  tr.states.assign(back_z.rbegin(), back_z.rend());
  tr.times.push_back(0.0);
  tr.states.push_back(z0);
  tr.times.insert(tr.times.end(), fwd_t.begin(), fwd_t.end());
  tr.states.insert(tr.states.end(), fwd_z.begin(), fwd_z.end());
  return tr;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr, int dimension) {
  os << "t";
  for (int i = 1; i <= dimension; ++i) os << ',' << variable_name(i, dimension);
  os << '\n';
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    put(tr.times[k]);
    for (double v : tr.states[k]) {
      os << ',';
      put(v);
    }
    os << '\n';
  }
}

Verdict check_flow_relation(const VectorField& f, const SmoothMap& sigma, CheckKind kind,
                            const FlowCheckOptions& options) {
  if (sigma.dimension() != f.dimension()) throw DimensionError("map and field dimensions differ");
  const DomainBox region = options.region.value_or(f.domain());
  const DomainBox escape = f.domain().scaled(options.integrator.escape_inflation);
  const CompiledMap rhs(f.components());
  const CompiledMap map(sigma.components());
  const double horizon = options.integrator.horizon;
  const double sign = kind == CheckKind::reversibility ? -1.0 : 1.0;

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> time(-horizon, horizon);
  Verdict v;
  v.certainty = Certainty::probabilistic;
  double worst_t = 0.0;
  for (std::size_t s = 0; s < options.samples; ++s) {
    Point z = region.sample(rng);
    const double t = time(rng);
    ++v.samples;
    const std::size_t steps = std::max<std::size_t>(1, step_count(t, options.integrator.step));
    Point sz = map(std::span<const double>(z));
    std::optional<Point> a = flow_map(rhs, z, t, steps, escape);
    std::optional<Point> b = finite_point(sz) ? flow_map(rhs, sz, sign * t, steps, escape) : std::nullopt;
    if (!a || !b) {
      ++v.skipped;
      continue;
    }
    Point lhs = map(std::span<const double>(*a));
    if (!finite_point(lhs)) {
      ++v.skipped;
      continue;
    }
    double r = distance(lhs, *b);
    if (r > v.residual_max) worst_t = t;
    v.residual_max = std::max(v.residual_max, r);
    if (r >= options.tolerance) v.add_witness(std::move(z), r);
  }
  if (2 * v.skipped > v.samples) {
    v.status = Status::inconclusive;
    v.note(std::to_string(v.skipped) + " of " + std::to_string(v.samples) + " samples escaped or hit a singularity");
    return v;
  }
  v.status = v.residual_max < options.tolerance ? Status::holds : Status::fails;
  if (v.skipped > 0) v.note(std::to_string(v.skipped) + " sample(s) skipped on escape");
  if (v.fails()) v.note("largest residual at t = " + std::to_string(worst_t));
  return v;
}

LiouvilleResult check_liouville(const VectorField& f, const DomainBox& region, double t_max, std::size_t mc_points,
                                std::uint64_t seed) {
  if (!(t_max > 0)) throw std::invalid_argument("check_liouville needs t_max > 0");
  if (mc_points < 1) throw std::invalid_argument("check_liouville needs at least one point");
  if (region.dimension() != f.dimension()) throw DimensionError("region and field dimensions differ");
  const VariationalFlow flow(f);
  const CompiledExpr div(divergence(f));
  const std::size_t steps = std::max<std::size_t>(4, step_count(t_max, 2.5e-3));

  LiouvilleResult out;
  DomainBox current = region;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::mt19937_64 rng(seed);
    double rate_sum = 0.0;
    bool escaped = false;
    for (std::size_t i = 0; i < mc_points && !escaped; ++i) {
      Point p = current.sample(rng);
      auto plus = flow.jacobian_det(p, t_max, steps, f.domain());
      auto minus = flow.jacobian_det(p, -t_max, steps, f.domain());
      if (!plus || !minus) {
        escaped = true;
        break;
      }
      rate_sum += (*plus - *minus) / (2 * t_max);
    }
    if (escaped) {
      if (attempt == 0) {
        current = current.scaled(0.5);
        out.verdict.note("flow escaped the domain; region shrunk by half");
        continue;
      }
      out.verdict.status = Status::inconclusive;
      out.verdict.certainty = Certainty::probabilistic;
      out.verdict.note("flow escaped the domain after shrinking");
      out.region = current;
      return out;
    }

    std::mt19937_64 rng2(seed + 1);
    double div_sum = 0.0;
    double abs_sum = 0.0;
    std::size_t valid = 0;
    for (std::size_t i = 0; i < mc_points; ++i) {
      Point p = current.sample(rng2);
      double d = div(std::span<const double>(p));
      if (!std::isfinite(d)) continue;
      div_sum += d;
      abs_sum += std::abs(d);
      ++valid;
    }
    const double vol = current.volume();
    out.volume_rate = vol * rate_sum / static_cast<double>(mc_points);
    out.divergence_integral = valid ? vol * div_sum / static_cast<double>(valid) : 0.0;
    out.abs_divergence_integral = valid ? vol * abs_sum / static_cast<double>(valid) : 0.0;
    out.region = current;

    Verdict& v = out.verdict;
    v.certainty = Certainty::probabilistic;
    v.samples = 2 * mc_points;
    v.skipped = mc_points - valid;
    const double gap = std::abs(out.volume_rate - out.divergence_integral);
    const double tol = 0.05 * std::max(std::abs(out.divergence_integral), out.abs_divergence_integral) + 1e-8 * vol;
    v.residual_max = gap;
    v.status = gap <= tol ? Status::holds : Status::fails;
    if (v.fails()) v.add_witness(current.center(), gap);
    v.note("volume rate " + std::to_string(out.volume_rate) + ", divergence integral " +
           std::to_string(out.divergence_integral));
    return out;
  }
  return out;
}

}  // namespace symflow
