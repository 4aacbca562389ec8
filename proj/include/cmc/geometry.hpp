// Everything extrinsic: chart descriptions, parametric cells, mesh
// generators (cube, rectangle, polar disk, spherical hemisphere), measure
// computation in chart coordinates, and de Rham discretization of
// differential forms by Gauss-Legendre quadrature.
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "cmc/cell_complex.hpp"
#include "cmc/forman.hpp"
#include "cmc/operators.hpp"

namespace cmc {

using ChartPoint = std::array<double, 3>;

enum class ChartKind { Cartesian, Polar, Spherical };

/// Chart coordinates: Cartesian (x,y[,z]); Polar (r, phi); Spherical
/// (theta, phi) with the induced metric (d theta)^2 + sin^2(theta) (d phi)^2.
/// The angular axis of the curved charts is 2*pi-periodic.
struct Chart {
    ChartKind kind = ChartKind::Cartesian;
    int space_dim = 2;

    std::optional<double> period(int axis) const;
    /// Chart point -> Cartesian coordinates (for visualization only).
    ChartPoint to_cartesian(const ChartPoint& p) const;
};

/// Axis-aligned chart box [lo, hi] (degenerate axes allowed). Used for all
/// cells of structured chart meshes and for grid cells in Cartesian charts.
struct BoxCell {
    ChartPoint lo{0, 0, 0};
    ChartPoint hi{0, 0, 0};
};

/// Straight (or chart-axis-aligned) segment, ordered tail -> head to match
/// the stored edge orientation.
struct SegmentCell {
    ChartPoint a{0, 0, 0};
    ChartPoint b{0, 0, 0};
};

/// Straight polygon in Cartesian chart coordinates, counterclockwise.
struct PolygonCell {
    std::vector<ChartPoint> pts;
};

using ParametricCell = std::variant<BoxCell, SegmentCell, PolygonCell>;

/// A differential form given by component functions in chart coordinates.
/// Degree 1 components are indexed by chart axis; degree 2 components by the
/// ordered axis pair (i < j) of d c_i ^ d c_j.
struct FormField {
    int degree = 0;
    std::string units;
    std::function<double(const ChartPoint&)> scalar;                 // degree 0 or D=3 top
    std::function<double(const ChartPoint&, int)> one;               // degree 1
    std::function<double(const ChartPoint&, int, int)> two;          // degree 2
};

/// A quasi-cubical mesh together with its chart-parametric description.
/// Incidence signs and parametric data are kept mutually consistent:
/// segments run tail to head, p-cells (p >= 2) carry an orientation sign
/// relative to the canonical parametrization (increasing-axes order for
/// boxes, counterclockwise for polygons).
struct EmbeddedMesh {
    QuasiCubicalMesh mesh;
    Chart chart;
    std::vector<std::vector<ParametricCell>> cells;      // per dim
    std::vector<std::vector<std::int8_t>> orientation;   // per dim, +-1
    std::vector<ChartPoint> node_chart;                  // chart coords per node
    std::vector<ChartPoint> node_xyz;                    // Cartesian coords per node

    int dim() const { return mesh.dim(); }
};

/// Regular grid on [0,w]x[0,h]x[0,d], Forman-subdivided (the half-spacing
/// grid), oriented by coordinate order with outward boundary faces.
EmbeddedMesh gen_cube_mesh(int nx, int ny, int nz, double w = 1.0, double h = 1.0, double d = 1.0);

/// 2D counterpart of gen_cube_mesh on [0,w]x[0,h].
EmbeddedMesh gen_rect_mesh(double w, double h, int nx, int ny);

/// 1D chain of n segments on [0, length], Forman-subdivided.
EmbeddedMesh gen_line_mesh(int n, double length = 1.0);

/// Regular polar mesh of the unit disk: nr concentric rings by nphi equal
/// sectors; the innermost cells are three-sided pie slices sharing the
/// center node. Forman embedding by chart midpoints.
EmbeddedMesh gen_polar_disk_mesh(int nr, int nphi, double radius = 1.0);

/// Regular spherical mesh of the northern hemisphere (theta in [0, pi/2]):
/// ntheta latitude bands by nphi sectors, pole cells three-sided.
EmbeddedMesh gen_hemisphere_mesh(int ntheta, int nphi);

/// Forman subdivision of an arbitrary straight-polygon parent mesh
/// (Cartesian chart): nodes at vertices, edge midpoints, and arithmetic
/// centroids; faces oriented counterclockwise, boundary edges outward.
EmbeddedMesh embed_polygon_mesh(const CellComplex& parent,
                                const std::vector<ChartPoint>& parent_nodes);

/// Closed-form cell measures in the chart metric (nodes get 1).
MetricData compute_measures(const EmbeddedMesh& em);

/// De Rham map: integrates the form over every cell of matching dimension in
/// the cell's stored orientation. Gauss-Legendre with `points` nodes per axis.
Cochain derham(const EmbeddedMesh& em, const FormField& omega, int points = 5);

double measure_of_cell(const Chart& chart, int cell_dim, const ParametricCell& cell);

}  // namespace cmc
