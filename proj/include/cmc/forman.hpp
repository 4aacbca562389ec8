// Forman subdivision of a simple-polytope mesh: the quasi-cubical complex
// whose p-cells are the intervals [a,b] of the parent face poset with
// dim b - dim a = p, plus the topological-orthogonality index and the
// relative orthogonal orientations eps_perp (D <= 3).
#pragma once

#include <array>
#include <map>
#include <vector>

#include "cmc/cell_complex.hpp"

namespace cmc {

struct IntervalCell {
    CellId lower;
    CellId upper;
    int dim() const { return upper.dim - lower.dim; }
};

struct OrthogonalPair {
    Index left = 0;    // dim p subface
    Index right = 0;   // dim q subface
    Index pivot = 0;   // the single shared node
    std::int8_t sign = 1;  // eps_perp(enclosing, left, right)
};

class QuasiCubicalMesh {
public:
    QuasiCubicalMesh() = default;
    QuasiCubicalMesh(CellComplex complex, std::vector<std::vector<IntervalCell>> intervals);

    const CellComplex& complex() const { return complex_; }
    CellComplex& complex_mutable() { return complex_; }
    int dim() const { return complex_.dim(); }
    Index count(int p) const { return complex_.count(p); }

    const std::vector<std::vector<IntervalCell>>& interval_map() const { return intervals_; }
    const IntervalCell& interval(int p, Index i) const { return intervals_.at(p).at(i); }

    /// Sorted node list of a cell (cached).
    const std::vector<Index>& nodes_of(int p, Index i) const;
    /// Sorted q-subfaces of a p-cell (cached).
    const std::vector<Index>& subfaces_of(int p, Index i, int q) const;

    /// All ordered pairs (b,c), dim b = p, dim c = q, both subfaces of `a`,
    /// sharing exactly one node, with eps_perp attached. Cached per (a,p,q).
    const std::vector<OrthogonalPair>& orthogonal_pairs(CellId a, int p, int q) const;

    /// eps_perp(a,b,c) from the stored relative orientations (D <= 3).
    int relative_orthogonal_orientation(CellId a, CellId b, CellId c) const;

    /// Rebuild the derived caches after any sign mutation on the complex.
    void invalidate_caches();

    /// Structural check that every cell's face lattice matches a cube's
    /// (2^p nodes and 2p hyperfaces for every p-cell).
    ValidationReport check_quasi_cubical() const;

private:
    void build_closures() const;

    CellComplex complex_;
    std::vector<std::vector<IntervalCell>> intervals_;
    // closures_[p][i][q] = sorted q-subfaces of p-cell i
    mutable std::vector<std::vector<std::vector<std::vector<Index>>>> closures_;
    mutable std::map<std::tuple<int, Index, int, int>, std::vector<OrthogonalPair>> pair_cache_;
};

/// Enumerates the intervals of the parent poset into a quasi-cubical complex
/// with unsigned incidence (all signs +1) and the interval map. Cells of K
/// are ordered by (lower dim, lower index, upper index). The parent must be
/// a validated complex of simple polytopes.
QuasiCubicalMesh forman_subdivide(const CellComplex& parent);

/// Intrinsic orientation assignment: edges follow the nodes-positive
/// convention (+1 at [b,b], -1 at [a,a] for the edge [a,b]); for p >= 2 each
/// cell's hyperface signs are fixed by constraint propagation over the
/// diamond relations; finally orient_top_cells enforces global compatibility.
void assign_forman_orientations(QuasiCubicalMesh& K);

/// Checks that every node of every p-cell of the parent lies on exactly p of
/// its edges (simple polytope test).
ValidationReport check_simple_polytopes(const CellComplex& parent);

}  // namespace cmc
