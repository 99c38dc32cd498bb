#include "cpde/topology.hpp"

#include <queue>
#include <stdexcept>

namespace cpde {

namespace {

void build_incidence(topology& t) {
  t.incident.assign(t.n_sites, {});
  for (int e = 0; e < t.n_edges(); ++e) {
    auto [u, v] = t.edges[e];
    t.incident[u].push_back({e, v});
    t.incident[v].push_back({e, u});
  }
}

}  // namespace

topology topology::path(int n) {
  if (n < 2) throw std::invalid_argument("topology: path needs n >= 2");
  topology t;
  t.shape = shape_kind::path;
  t.n_sites = n;
  t.edges.reserve(n - 1);
  for (int i = 0; i + 1 < n; ++i) t.edges.push_back({i, i + 1});
  build_incidence(t);
  return t;
}

topology topology::cycle(int n) {
  if (n < 3) throw std::invalid_argument("topology: cycle needs n >= 3");
  topology t;
  t.shape = shape_kind::cycle;
  t.n_sites = n;
  t.edges.reserve(n);
  for (int i = 0; i + 1 < n; ++i) t.edges.push_back({i, i + 1});
  t.edges.push_back({n - 1, 0});
  build_incidence(t);
  return t;
}

topology topology::torus2d(int side) {
  if (side < 3) throw std::invalid_argument("topology: torus2d needs side >= 3");
  topology t;
  t.shape = shape_kind::torus2d;
  t.n_sites = side * side;
  t.side = side;
  t.edges.reserve(2 * side * side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      int u = y * side + x;
      t.edges.push_back({u, y * side + (x + 1) % side});
      t.edges.push_back({u, ((y + 1) % side) * side + x});
    }
  }
  build_incidence(t);
  return t;
}

topology topology::make(const std::string& shape_name, int n) {
  if (shape_name == "path") return path(n);
  if (shape_name == "cycle") return cycle(n);
  if (shape_name == "torus2d") return torus2d(n);
  throw std::invalid_argument("topology: unknown shape '" + shape_name + "'");
}

std::string topology::shape_name() const {
  switch (shape) {
    case shape_kind::path: return "path";
    case shape_kind::cycle: return "cycle";
    case shape_kind::torus2d: return "torus2d";
  }
  return "?";
}

std::vector<int> topology::distances_from(int source) const {
  std::vector<int> dist(n_sites, -1);
  std::queue<int> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (auto [e, w] : incident[u]) {
      (void)e;
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

std::vector<int> topology::ball_edges(int center, int radius) const {
  auto dist = distances_from(center);
  std::vector<int> out;
  for (int e = 0; e < n_edges(); ++e) {
    auto [u, v] = edges[e];
    if (dist[u] >= 0 && dist[u] <= radius && dist[v] >= 0 && dist[v] <= radius)
      out.push_back(e);
  }
  return out;
}

int topology::ball_size(int center, int radius) const {
  auto dist = distances_from(center);
  int c = 0;
  for (int d : dist)
    if (d >= 0 && d <= radius) ++c;
  return c;
}

}  // namespace cpde
