// Neper .tess ingestion (2D subset: **vertex / **edge / **face) and a small
// deterministic clipped-Voronoi generator that emits the same format, used
// when no external tessellation tool is available.
#pragma once

#include <string>
#include <vector>

#include "cmc/cell_complex.hpp"
#include "cmc/geometry.hpp"

namespace cmc {

struct PolygonMesh {
    CellComplex complex;               // D = 2, straight polygons
    std::vector<ChartPoint> nodes;     // vertex coordinates (z ignored)
};

/// Parses the 2D subset of a Neper .tess file. Sections other than
/// **vertex, **edge, **face are skipped with a warning on stderr.
PolygonMesh import_tess(const std::string& path);

PolygonMesh parse_tess_text(const std::string& text);

/// Deterministic clipped Voronoi tessellation of [0,w] x [0,h] from `n`
/// seeded random sites; returns Neper-compatible .tess text.
std::string generate_voronoi_tess(int n, double w, double h, unsigned seed);

}  // namespace cmc
