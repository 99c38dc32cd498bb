#pragma once

#include <array>
#include <string>
#include <vector>

namespace cpde {

/* Finite graph the process lives on. Vertices are 0..n_sites-1; edges are
   indexed 0..n_edges()-1 with a fixed endpoint order. Edge and vertex
   indices key the event streams, so construction order is part of the
   reproducibility contract. */
struct topology {
  enum class shape_kind { path, cycle, torus2d };

  shape_kind shape = shape_kind::path;
  int n_sites = 0;
  int side = 0;  /* torus2d only */
  std::vector<std::array<int, 2>> edges;
  /* vertex -> list of (edge index, neighbor vertex) */
  std::vector<std::vector<std::pair<int, int>>> incident;

  int n_edges() const { return static_cast<int>(edges.size()); }

  /* path: vertices 0..n-1, edges {i, i+1} in order. */
  static topology path(int n);
  /* cycle: same plus the wrap edge {n-1, 0} last. */
  static topology cycle(int n);
  /* torus: side*side vertices, row-major; per vertex the +x edge then the
     +y edge (periodic). */
  static topology torus2d(int side);

  static topology make(const std::string& shape_name, int n);

  std::string shape_name() const;

  /* Graph distances from a source vertex (BFS). */
  std::vector<int> distances_from(int source) const;
  /* Edges whose endpoints both lie within the given radius of center. */
  std::vector<int> ball_edges(int center, int radius) const;
  /* Vertex count of the radius-ball around center. */
  int ball_size(int center, int radius) const;
};

}  // namespace cpde
