"""Combinatorial mesh calculus on quasi-cubical cell complexes."""

from ._cmc import (
    CatalogParams,
    CatalogProblem,
    EmbeddedMesh,
    MetricData,
    catalog,
    compute_measures,
    cup,
    gen_cube_mesh,
    gen_hemisphere_mesh,
    gen_polar_disk_mesh,
    gen_rect_mesh,
    generate_voronoi_tess,
    hodge_star_matrix,
    inner_product_weights,
    render_svg,
    solve,
    validate_mesh,
)

__all__ = [
    "CatalogParams",
    "CatalogProblem",
    "EmbeddedMesh",
    "MetricData",
    "catalog",
    "compute_measures",
    "cup",
    "gen_cube_mesh",
    "gen_hemisphere_mesh",
    "gen_polar_disk_mesh",
    "gen_rect_mesh",
    "generate_voronoi_tess",
    "hodge_star_matrix",
    "inner_product_weights",
    "render_svg",
    "solve",
    "validate_mesh",
]
