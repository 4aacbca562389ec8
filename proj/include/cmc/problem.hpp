// Transport-problem data on a quasi-cubical Riemannian mesh, plus the
// manufactured-problem catalog (unit cube, polar disk, spherical hemisphere,
// rectangle with an irregular tessellation) with closed-form exact fields.
#pragma once

#include <optional>
#include <string>

#include "cmc/cell_complex.hpp"
#include "cmc/forman.hpp"
#include "cmc/geometry.hpp"
#include "cmc/operators.hpp"

namespace cmc {

struct TransientParams {
    double t0 = 0.0;
    double dt = 0.0;
    int steps = 0;
    double theta = 0.5;  // Crank-Nicolson by default
    Vector u0;           // initial potential per node
};

struct TransportProblem {
    Vector kappa_tilde;  // dual conductivity per 1-cell
    Vector kappa;        // conductivity per (D-1)-cell
    Vector pi_tilde;     // dual capacity per node (default 1)
    Vector pi;           // capacity per D-cell (default 1)
    Cochain f;           // internal production rate, degree D
    std::optional<Cochain> v;  // volumetric flow rate, degree D-1

    SubMesh gamma_d;  // Dirichlet boundary part (closed sub-mesh)
    SubMesh gamma_n;  // Neumann boundary part
    Vector g_d;       // prescribed potential per gamma_d node (local index)
    Vector g_n;       // prescribed flow rate per gamma_n (D-1)-cell (local index)

    std::optional<TransientParams> transient;

    /// Fills unit capacities / conductivities for any empty vectors and
    /// checks positivity and the boundary partition.
    void finalize(const QuasiCubicalMesh& K);
};

/// One catalog entry: mesh + measures + discretized problem + exact
/// reference cochains (de Rham images of the closed-form solution).
struct CatalogProblem {
    std::string name;
    EmbeddedMesh em;
    MetricData metric;
    TransportProblem problem;
    Cochain exact_u;  // R_0(u)
    Cochain exact_q;  // R_{D-1}(q)
};

struct CatalogParams {
    int n = 2;        // cube grid resolution
    int nr = 3;       // disk rings
    int nphi = 4;     // disk sectors
    int ntheta = 6;   // hemisphere bands
    int nphi_sph = 6; // hemisphere sectors
    int voronoi_cells = 10;
    unsigned voronoi_seed = 2024;
    std::string tess_path;  // optional: use an existing .tess instead
};

/// Known names: cube-quadratic, disk-quadratic, hemisphere-linear,
/// rectangle-linear. Throws on anything else.
CatalogProblem catalog(const std::string& name, const CatalogParams& params = {});

/// Partitions the boundary (D-1)-cells of an embedded mesh by a predicate on
/// their chart midpoints; returns closed Dirichlet/Neumann sub-meshes.
std::pair<SubMesh, SubMesh> partition_boundary(
    const EmbeddedMesh& em, const std::function<bool(const ChartPoint&)>& is_dirichlet);

/// Chart midpoint of a parametric cell.
ChartPoint chart_midpoint(const ParametricCell& cell);

}  // namespace cmc
