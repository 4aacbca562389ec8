// Intrinsic cell-complex data model: a graded poset with signed hyperface
// incidence. Cells carry no geometry; everything here is derived from the
// incidence relation and the relative orientations (signs).
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace cmc {

using Index = std::int32_t;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

struct CellId {
    int dim = 0;
    Index index = 0;

    friend bool operator==(const CellId&, const CellId&) = default;
    friend auto operator<=>(const CellId&, const CellId&) = default;
};

/// One signed incidence entry: hyperface index within dimension p-1 and the
/// relative orientation eps(cell, face) in {-1,+1}.
struct FaceRef {
    Index face = 0;
    std::int8_t sign = 1;
};

/// A p-chain: one real coefficient per p-cell.
struct Chain {
    int dim = 0;
    Vector coeffs;

    Chain() = default;
    Chain(int d, Vector c) : dim(d), coeffs(std::move(c)) {}
};

/// A p-cochain: one real value per p-cell. `units` is a free-form
/// documentation tag and never participates in arithmetic.
struct Cochain {
    int dim = 0;
    Vector values;
    std::string units;

    Cochain() = default;
    Cochain(int d, Vector v, std::string u = {})
        : dim(d), values(std::move(v)), units(std::move(u)) {}
};

struct ValidationIssue {
    std::string kind;
    CellId cell;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string summary() const;
};

class CellComplex {
public:
    CellComplex() = default;
    explicit CellComplex(int dim);

    int dim() const { return dim_; }
    Index count(int p) const;
    Index total_cells() const;

    /// Appends a p-cell (p>=1) given its signed hyperfaces; returns its index.
    Index add_cell(int p, std::vector<FaceRef> faces);
    void set_node_count(Index n);

    const std::vector<FaceRef>& hyperfaces(int p, Index i) const;
    std::vector<FaceRef>& hyperfaces_mutable(int p, Index i);

    /// Sign of `face` in `cell` (0 if not a hyperface).
    int sign(CellId cell, Index face) const;

    /// Cofaces of a p-cell: indices of (p+1)-cells having it as a hyperface,
    /// with the corresponding sign. Computed on demand, not cached.
    std::vector<FaceRef> cofaces(int p, Index i) const;

    /// All q-dimensional subfaces of a p-cell (q <= p), sorted, deduplicated.
    std::vector<Index> subfaces(int p, Index i, int q) const;

    /// Boundary matrix: counts(p-1) x counts(p) with entries eps(cell, face).
    SparseMatrix boundary_matrix(int p) const;
    /// Coboundary matrix C^p -> C^{p+1}: transpose of boundary_matrix(p+1).
    SparseMatrix coboundary_matrix(int p) const;

    /// Flips the orientation of one cell: negates its hyperface signs and its
    /// sign inside every coface. Preserves the chain-complex property.
    void flip_cell(int p, Index i);

    // Named sub-mesh labels (cell subsets closed under the subface relation).
    std::map<std::string, std::vector<std::vector<Index>>> labels;

private:
    int dim_ = 0;
    Index node_count_ = 0;
    // incidence_[p][i] for p in [1, dim]; index 0 unused.
    std::vector<std::vector<std::vector<FaceRef>>> incidence_;
};

/// A sub-mesh with its own re-indexed complex plus maps to/from the parent.
struct SubMesh {
    std::string name;
    CellComplex complex;
    std::vector<std::vector<Index>> to_parent;  // per dim, local -> parent
    std::vector<std::map<Index, Index>> from_parent;

    bool contains(int p, Index parent_cell) const;
    Index local_index(int p, Index parent_cell) const;
};

/// Builds the sub-mesh generated by `seed_cells` (closed under subfaces).
/// Incidence signs are inherited from the parent.
SubMesh build_submesh(const CellComplex& complex, const std::string& name,
                      const std::vector<std::vector<Index>>& seed_cells);

Chain boundary(const CellComplex& complex, const Chain& chain);
Cochain coboundary(const CellComplex& complex, const Cochain& cochain);

/// Restriction of a cochain to a sub-mesh, re-indexed to local cells.
Cochain trace(const CellComplex& complex, const SubMesh& sub, const Cochain& cochain);

/// Indices of (D-1)-cells with exactly one D-coface.
std::vector<Index> boundary_cells(const CellComplex& complex);

/// True iff every interior (D-1)-cell sees opposite signs from its two
/// D-cofaces. Offending cells are appended to `offenders` when given.
bool check_compatible_orientation(const CellComplex& complex,
                                  std::vector<Index>* offenders = nullptr);

/// The all-ones D-chain of a compatibly oriented complex. Throws otherwise.
Chain fundamental_class(const CellComplex& complex);

/// sigma[K]: sum of the top-cochain over the fundamental class.
double integrate(const CellComplex& complex, const Cochain& cochain);

/// Flood-fill sign fixing over the dual adjacency of D-cells so that the
/// compatibility check passes. The first cell of each connected component
/// keeps its input orientation. Throws on non-orientable input.
void orient_top_cells(CellComplex& complex);

/// Structural validation: incidence grading, chain-complex property,
/// coface counts of (D-1)-cells, diamond property, sub-mesh label closure.
ValidationReport validate(const CellComplex& complex);

/// Enforces the nodes-positive convention (every edge carries one +1 and
/// one -1 endpoint sign) by flipping node orientations where imported data
/// violates it. Throws when no consistent assignment exists.
void normalize_node_orientations(CellComplex& complex);

}  // namespace cmc
