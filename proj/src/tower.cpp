#include "symflow/tower.hpp"

#include <cmath>
#include <string>

#include "symflow/evaluate.hpp"
#include "symflow/flow.hpp"

namespace symflow {

DivergenceTower build_tower(const VectorField& f, int max_order, const TowerOptions& options) {
  if (max_order < 0) throw std::invalid_argument("tower order must be nonnegative");
  DivergenceTower t{f, {}};
  t.orders.reserve(static_cast<std::size_t>(max_order) + 1);
  Expr d = divergence(f);
  for (int j = 0;; ++j) {
    std::size_t nodes = node_count(d);
    if (nodes > options.node_budget) {
      throw TowerBudgetError("tower entry of order " + std::to_string(j) + " has " + std::to_string(nodes) +
                             " nodes, over the budget of " + std::to_string(options.node_budget));
    }
    t.orders.push_back(d);
    if (j == max_order) break;
    d = lie_derivative(d, f);
  }
  return t;
}

Selection::Selection(std::vector<int> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("selection needs at least one entry");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i] < 0) throw std::invalid_argument("selection entries must be nonnegative");
    if (i > 0 && entries_[i] <= entries_[i - 1]) {
      throw std::invalid_argument("selection entries must be strictly increasing");
    }
  }
}

Selection Selection::leading(int n) {
  std::vector<int> e;
  for (int j = 0; j < n; ++j) e.push_back(j);
  return Selection(std::move(e));
}

SignMatrix sign_matrix(const Selection& pi) {
  SignMatrix s;
  for (int p : pi.entries()) s.diagonal.push_back(p % 2 == 0 ? -1 : 1);
  return s;
}

SignMatrix identity_signs(int n) { return SignMatrix{std::vector<int>(static_cast<std::size_t>(n), 1)}; }

DeltaMap delta_map(const DivergenceTower& tower, const Selection& pi) {
  if (pi.size() != tower.field.dimension()) {
    throw DimensionError("selection has " + std::to_string(pi.size()) + " entries for a field of dimension " +
                         std::to_string(tower.field.dimension()));
  }
  if (pi.max() > tower.max_order()) {
    throw std::out_of_range("selection asks for order " + std::to_string(pi.max()) + " but the tower stops at " +
                            std::to_string(tower.max_order()));
  }
  std::vector<Expr> c;
  for (int p : pi.entries()) c.push_back(tower[p]);
  return DeltaMap{pi, SmoothMap(std::move(c), tower.field.domain())};
}

std::vector<long double> finite_difference_weights(const std::vector<long double>& nodes, int derivative) {
  const int n = static_cast<int>(nodes.size());
  const int m = derivative;
  // c[k][i] for derivative k and node i, built incrementally over nodes.
  std::vector<std::vector<long double>> c(static_cast<std::size_t>(m) + 1,
                                          std::vector<long double>(static_cast<std::size_t>(n), 0.0L));
  c[0][0] = 1.0L;
  long double c1 = 1.0L;
  long double c4 = nodes[0];
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    long double c2 = 1.0L;
    const long double c5 = c4;
    c4 = nodes[static_cast<std::size_t>(i)];
    for (int j = 0; j < i; ++j) {
      const long double c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        }
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c[static_cast<std::size_t>(m)];
}

double tower_fd_oracle(const VectorField& f, const Point& z, int order, double h) {
  if (order < 0 || order > 4) throw std::invalid_argument("oracle supports orders 0..4");
  if (!(h > 0)) throw std::invalid_argument("oracle step must be positive");
  if (static_cast<int>(z.size()) != f.dimension()) throw DimensionError("point has the wrong dimension");
  const CompiledExpr div(divergence(f));
  std::vector<long double> zl(z.begin(), z.end());
  if (order == 0) return static_cast<double>(div(zl));
  const long double hl = h;
  if (std::pow(hl, order) < 1e-300L) throw std::invalid_argument("oracle step underflows the stencil");

  const CompiledMap rhs(f.components());
  constexpr int kSubsteps = 4;
  std::vector<long double> samples(static_cast<std::size_t>(2 * order + 1));
  samples[static_cast<std::size_t>(order)] = div(zl);
  for (int dir : {-1, 1}) {
    std::vector<long double> s = zl;
    for (int k = 1; k <= order; ++k) {
      for (int sub = 0; sub < kSubsteps; ++sub) {
        if (!rk4_step(rhs, s, dir * hl / kSubsteps)) throw FlowEscapeError("oracle trajectory hit a singularity");
      }
      Point p(s.begin(), s.end());
      if (!f.domain().contains(p)) throw FlowEscapeError("oracle trajectory left the domain");
      samples[static_cast<std::size_t>(order + dir * k)] = div(s);
    }
  }
  std::vector<long double> nodes;
  for (int k = -order; k <= order; ++k) nodes.push_back(k * hl);
  std::vector<long double> w = finite_difference_weights(nodes, order);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * samples[i];
  if (!std::isfinite(sum)) throw FlowEscapeError("oracle produced a non-finite value");
  return static_cast<double>(sum);
}

}  // namespace symflow
