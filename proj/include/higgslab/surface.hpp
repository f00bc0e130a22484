#pragma once

#include <iosfwd>
#include <vector>

#include "higgslab/types.hpp"

namespace higgslab {

// Edge `edge_b` is carried onto edge `edge_a` by x -> x + translation.
struct EdgePairing {
  int edge_a = 0;
  int edge_b = 0;
  Complex translation;
};

struct ConePoint {
  int vertex_class = 0;
  double angle = 0.0;  // total angle, radians
};

// A flat surface glued from one polygon by translations.  Edge e runs from
// polygon_vertices[e] to polygon_vertices[e + 1] (counter-clockwise).
struct TranslationSurface {
  std::vector<Complex> polygon_vertices;
  std::vector<EdgePairing> edge_pairings;
  std::vector<ConePoint> cone_points;
  int genus = 0;

  // Identification class of each polygon corner.
  std::vector<int> corner_class;

  int num_edges() const { return static_cast<int>(polygon_vertices.size()); }
  Complex edge_start(int e) const { return polygon_vertices[e]; }
  Complex edge_end(int e) const { return polygon_vertices[(e + 1) % num_edges()]; }
  double edge_length(int e) const { return std::abs(edge_end(e) - edge_start(e)); }
  double shortest_edge() const;

  // Partner edge of e and the translation taking e's partner onto e.
  int partner(int e) const;
  Complex translation_onto(int e) const;

  double area() const;
  // Sum over cone points of (2π - θ).
  double gauss_bonnet_defect() const;
};

// Regular octagon, opposite sides glued; one cone point of angle 6π.
TranslationSurface build_octagon_surface(double circumradius);

// Fills corner_class, cone_points and genus from polygon + pairings and checks
// the pairing invariants.  Throws PreconditionError on a malformed surface.
void finalize_surface(TranslationSurface& surface);

// Structured text form:
//   [surface]
//   vertices = [[x0, y0], [x1, y1], ...]
//   pairings = [[0, 4], [1, 5], ...]
void write_surface_config(std::ostream& out, const TranslationSurface& surface);
TranslationSurface read_surface_config(std::istream& in);

}  // namespace higgslab
