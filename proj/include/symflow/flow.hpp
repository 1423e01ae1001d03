#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "symflow/evaluate.hpp"
#include "symflow/field.hpp"
#include "symflow/verdict.hpp"

namespace symflow {

struct IntegratorConfig {
  double step = 1e-3;
  double horizon = 1.0;
  /// The trajectory is truncated when it leaves the domain box scaled by
  /// this factor about its center.
  double escape_inflation = 2.0;
};

struct Trajectory {
  std::vector<double> times;  // strictly increasing
  std::vector<Point> states;
  bool truncated = false;
  std::string truncation_cause;
};

/// One classic RK4 step of z' = F(z) in place. Returns false when F is not
/// finite at a stage.
template <class Real>
bool rk4_step(const CompiledMap& f, std::vector<Real>& z, Real h) {
  const std::size_t n = z.size();
  std::vector<Real> k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto stage = [&](const std::vector<Real>& at, std::vector<Real>& k) {
    f(std::span<const Real>(at), std::span<Real>(k));
    for (Real v : k) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  };
  if (!stage(z, k1)) return false;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + h / 2 * k1[i];
  if (!stage(tmp, k2)) return false;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + h / 2 * k2[i];
  if (!stage(tmp, k3)) return false;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + h * k3[i];
  if (!stage(tmp, k4)) return false;
  for (std::size_t i = 0; i < n; ++i) z[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return true;
}

/// Flow map z -> phi(t, z) by `steps` equal RK4 steps. nullopt on escape
/// from `escape` or a non-finite stage.
std::optional<Point> flow_map(const CompiledMap& f, const Point& z0, double t, std::size_t steps,
                              const DomainBox& escape);

/// Step count used for a time span |t| at nominal step h.
std::size_t step_count(double t, double h);

/// RK4 trajectory over [-T, T], integrated both ways from z0.
Trajectory integrate(const VectorField& f, const Point& z0, const IntegratorConfig& cfg = {});

/// CSV with header t,z1..zn (or t,x,y[,z]).
void write_trajectory_csv(std::ostream& os, const Trajectory& tr, int dimension);

struct FlowCheckOptions {
  std::size_t samples = 50;
  /// Sample region for z; defaults to the field's domain.
  std::optional<DomainBox> region;
  IntegratorConfig integrator{1e-3, 1.0, 2.0};
  double tolerance = 1e-5;
  std::uint64_t seed = 0;
};

/// Compares sigma(phi(t, z)) with phi(+-t, sigma(z)) at sampled (t, z),
/// t uniform in [-T, T]; both flows use the same step count.
Verdict check_flow_relation(const VectorField& f, const SmoothMap& sigma, CheckKind kind,
                            const FlowCheckOptions& options = {});

struct LiouvilleResult {
  Verdict verdict;
  /// d/dt mu(phi(t, A)) at t = 0 from the variational equation.
  double volume_rate = 0.0;
  /// Monte-Carlo integral of div F over A.
  double divergence_integral = 0.0;
  double abs_divergence_integral = 0.0;
  DomainBox region;
};

/// Compares the volume rate of the flowed region with the integral of the
/// divergence. The region is shrunk once if samples escape.
LiouvilleResult check_liouville(const VectorField& f, const DomainBox& region, double t_max,
                                std::size_t mc_points = 100000, std::uint64_t seed = 0);

}  // namespace symflow
