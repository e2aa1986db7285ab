#pragma once

#include <random>
#include <vector>

#include "dykstra/convex.hpp"
#include "dykstra/graph.hpp"

namespace dykstra::testing {

inline Graph random_connected_graph(int n, std::mt19937_64& rng,
                                    double extra_edge_prob = 0.3) {
  // Random tree first, then sprinkle extra edges.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  EdgeList edges;
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    edges.emplace_back(order[i], order[pick(rng)]);
  }
  std::bernoulli_distribution keep(extra_edge_prob);
  Graph tree(n, edges);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      Edge e(u, v);
      if (!tree.has_edge(e) && keep(rng)) edges.push_back(e);
    }
  return Graph(n, std::move(edges));
}

inline Vec random_vec(int d, std::mt19937_64& rng, double spread = 2.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  Vec v(d);
  for (double& t : v) t = u(rng);
  return v;
}

inline BlockVector random_block_vector(int n, int d, std::mt19937_64& rng,
                                       double spread = 2.0) {
  BlockVector x(n, d);
  for (Vec& b : x.blocks) b = random_vec(d, rng, spread);
  return x;
}

inline BlockVector random_diag_orth(int n, int d, std::mt19937_64& rng) {
  BlockVector v = random_block_vector(n, d, rng);
  Vec mean = scale(v.block_sum(), 1.0 / n);
  for (Vec& b : v.blocks) axpy(b, -1.0, mean);
  return v;
}

// Mixed catalog instance whose domains all contain the origin, so a
// feasible consensus point always exists. At most one point indicator.
inline std::vector<ConvexFunction> random_funcs(int n, int d,
                                                std::mt19937_64& rng,
                                                bool allow_point = true) {
  std::vector<ConvexFunction> funcs;
  std::uniform_int_distribution<int> kind(0, allow_point ? 4 : 3);
  std::uniform_real_distribution<double> pos(0.5, 2.0);
  bool used_point = false;
  for (int i = 0; i < n; ++i) {
    switch (kind(rng)) {
      case 0:
        funcs.push_back(ConvexFunction::zero(d));
        break;
      case 1:
        funcs.push_back(ConvexFunction::quadratic(pos(rng), random_vec(d, rng)));
        break;
      case 2: {
        Vec lo(d), hi(d);
        for (int j = 0; j < d; ++j) {
          lo[j] = -pos(rng);
          hi[j] = pos(rng);
        }
        funcs.push_back(ConvexFunction::indicator_box(std::move(lo), std::move(hi)));
        break;
      }
      case 3:
        funcs.push_back(ConvexFunction::l1(pos(rng), d));
        break;
      default:
        if (used_point) {
          funcs.push_back(ConvexFunction::quadratic(pos(rng), random_vec(d, rng)));
        } else {
          used_point = true;
          funcs.push_back(ConvexFunction::indicator_point(zeros(d)));
        }
        break;
    }
  }
  return funcs;
}

}  // namespace dykstra::testing
