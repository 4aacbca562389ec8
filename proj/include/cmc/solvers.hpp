// Assembly and solution of the primal and mixed weak formulations for
// scalar transport on a quasi-cubical Riemannian mesh, steady and transient,
// plus post-processing of the non-primary field and relative errors.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmc/operators.hpp"
#include "cmc/problem.hpp"

namespace cmc {

enum class MixedMethod { Eliminate, Saddle };

struct TransientStep {
    double t = 0.0;
    Vector u;
    Vector q;
    Vector amount_increment;  // per D-cell
};

struct SolveDiagnostics {
    std::string solver;
    int iterations = 0;       // nonzero when the CG fallback ran
    double residual = 0.0;    // ||A x - b|| / ||b|| of the reduced system
};

struct SolveResult {
    Vector u;                    // potential per node (prescribed entries copied)
    Vector q;                    // flow rate per (D-1)-cell (Neumann entries copied)
    Vector q_raw;                // primal only: -star_1 kt d u + advection, no copy
    std::optional<Vector> u_tilde;  // mixed only: dual potential per D-cell
    SolveDiagnostics diagnostics;
    std::vector<TransientStep> series;  // transient only
};

struct ErrorReport {
    double u_rel = 0.0;
    double q_rel = 0.0;
};

struct PrimalSystem {
    SparseMatrix stiffness;      // A_D as a matrix (full size)
    SparseMatrix advection;      // A_A as a matrix (zero when v absent)
    Vector load;                 // F - G
    std::vector<Index> dirichlet_nodes;  // parent node ids, sorted
    Vector dirichlet_values;
};

struct MixedSystem {
    Vector a_diag;               // <r, kappa^{-1} r>_{D-1}
    SparseMatrix b;              // diag(W_D) * delta_{D-1}
    SparseMatrix b_adv;          // advective coupling (zero when v absent)
    Vector c_diag;               // <pi w, w>_D
    Vector g;                    // Dirichlet boundary functional per (D-1)-cell
    Vector f;                    // W_D * f
    std::vector<Index> neumann_cells;  // parent (D-1)-cell ids, sorted
    Vector neumann_values;
};

PrimalSystem assemble_primal(const Operators& ops, const TransportProblem& prob);
MixedSystem assemble_mixed(const Operators& ops, const TransportProblem& prob);

SolveResult solve_primal_steady(const Operators& ops, const TransportProblem& prob);
SolveResult solve_mixed_steady(const Operators& ops, const TransportProblem& prob,
                               MixedMethod method = MixedMethod::Eliminate);

SolveResult solve_primal_transient(const Operators& ops, const TransportProblem& prob);
/// Optional explicit initial state (q0, u_tilde0) overrides the
/// formulation's u0-based initializer (used for fixed-point checks).
SolveResult solve_mixed_transient(const Operators& ops, const TransportProblem& prob,
                                  const Vector* q0 = nullptr, const Vector* u_tilde0 = nullptr);

ErrorReport relative_errors(const Vector& u, const Vector& q, const Cochain& exact_u,
                            const Cochain& exact_q);

}  // namespace cmc
