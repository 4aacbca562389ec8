// Figure emission: SVG heat maps with flow arrows for 2D meshes and legacy
// VTK text for 3D meshes. Rendering is a pure function of its inputs; the
// output bytes are deterministic.
#pragma once

#include <string>

#include "cmc/geometry.hpp"

namespace cmc {

struct RenderSpec {
    int canvas = 720;          // px for the larger bounding-box side
    double arrow_length = -1;  // <0: auto (40% of median edge length)
    bool draw_mesh = true;
    bool fixed_range = false;
    double vmin = 0.0, vmax = 1.0;  // used when fixed_range
};

/// Rainbow colour: t in [0,1] mapped from red (low) to magenta (high).
std::string rainbow_color(double t);

/// Heat map of the nodal potential (flat per-cell fill by the mean of the
/// cell's node values) plus one arrow per 1-cell crossing it from the
/// positive-relative-orientation side to the negative one; arrows are
/// colored by |q| and skipped where q = 0.
std::string render_svg(const EmbeddedMesh& em, const Vector& u, const Vector& q,
                       const RenderSpec& spec = {});

/// Legacy VTK unstructured grid: hexahedral 3-cells plus quad faces; point
/// data "u", cell data "q" (zero on the hexahedra).
std::string render_vtk(const EmbeddedMesh& em, const Vector& u, const Vector& q);

}  // namespace cmc
