// Metric-aware operators on a quasi-cubical Riemannian mesh: cup product,
// diagonal inner products, discrete Hodge stars, adjoint coboundary, and
// zero-trace restriction. Everything is intrinsic: only the incidence signs,
// the orthogonality index, and the cell measures enter.
#pragma once

#include <vector>

#include "cmc/cell_complex.hpp"
#include "cmc/forman.hpp"

namespace cmc {

/// Positive measure per cell; nodes carry 1 identically.
struct MetricData {
    std::vector<Vector> mu;  // mu[p] has one entry per p-cell

    void check_positive() const;
};

struct InnerProduct {
    int degree = 0;
    Vector weights;  // diagonal entries <c,c>_p, strictly positive
};

/// Index set of p-cells not lying on the boundary sub-complex.
struct ZeroTraceSpace {
    int degree = 0;
    std::vector<Index> interior;           // sorted interior p-cell ids
    std::vector<std::uint8_t> on_boundary;  // mask over all p-cells
};

/// (sigma ~ tau)(a) = 2^{-(p+q)} sum over orthogonal pairs of
/// eps_perp(a,b,c) sigma(b) tau(c).
Cochain cup(const QuasiCubicalMesh& K, const Cochain& sigma, const Cochain& tau);

/// Diagonal inner product at degree p:
/// <c,c>_p = (1 / 2^D mu(c)) sum over pairs (a,b), a in K_D, b in K_{D-p},
/// b orthogonal to c within a, of mu(b).
InnerProduct inner_product(const QuasiCubicalMesh& K, const MetricData& mu, int p);

/// Discrete Hodge star as a sparse matrix C^p -> C^{D-p}:
/// (star_p sigma)(c) = (1 / 2^D <c,c>_{D-p}) sum_{(a,b): b perp_a c, b in K_p}
/// eps_perp(a,b,c) sigma(b). Satisfies <star sigma, rho>_{D-p} = (sigma~rho)[K].
SparseMatrix hodge_star_matrix(const QuasiCubicalMesh& K, const MetricData& mu, int p);

Cochain hodge_star(const QuasiCubicalMesh& K, const MetricData& mu, int p, const Cochain& sigma);

/// Per-degree boundary structure of the mesh (closure of the boundary
/// (D-1)-cells), used for zero-trace spaces and the adjoint coboundary.
std::vector<ZeroTraceSpace> zero_trace_spaces(const QuasiCubicalMesh& K);

/// Idempotent projection zeroing the boundary entries.
Cochain zero_trace_project(const ZeroTraceSpace& space, const Cochain& cochain);

/// Adjoint coboundary as a sparse matrix C^p_0 -> C^{p-1}_0 (full-size with
/// zero rows on boundary (p-1)-cells and zero columns on boundary p-cells):
/// (delta* sigma)(b) = (1/<b,b>_{p-1}) sum_{a covering b} eps(a,b) <a,a>_p sigma(a).
SparseMatrix adjoint_coboundary_matrix(const QuasiCubicalMesh& K, const MetricData& mu, int p);

/// Applies the adjoint coboundary; throws if sigma has nonzero boundary trace.
Cochain adjoint_coboundary(const QuasiCubicalMesh& K, const MetricData& mu, int p,
                           const Cochain& sigma);

/// Cached operator bundle for one (mesh, measures) pair: inner-product
/// weights for all degrees plus the Hodge stars the solvers use.
class Operators {
public:
    Operators(const QuasiCubicalMesh& K, const MetricData& mu);

    const QuasiCubicalMesh& mesh() const { return K_; }
    const MetricData& metric() const { return mu_; }
    const InnerProduct& inner(int p) const { return inner_.at(p); }
    const SparseMatrix& hodge(int p) const;
    const std::vector<ZeroTraceSpace>& zero_trace() const { return zt_; }

    /// Coordinate text dump (row col value) of one operator matrix.
    static std::string dump_coordinate_text(const SparseMatrix& M);

private:
    const QuasiCubicalMesh& K_;
    const MetricData& mu_;
    std::vector<InnerProduct> inner_;
    std::vector<SparseMatrix> hodge_;
    std::vector<ZeroTraceSpace> zt_;
};

}  // namespace cmc
