#include "cmc/solvers.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <set>
#include <stdexcept>

namespace cmc {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

std::vector<Index> node_list(const SubMesh& sub) {
    return sub.to_parent.empty() ? std::vector<Index>{} : sub.to_parent[0];
}

std::vector<Index> top_cells(const SubMesh& sub, int d) {
    return sub.to_parent.size() > static_cast<std::size_t>(d) ? sub.to_parent[d]
                                                              : std::vector<Index>{};
}

// Solves an SPD sparse system with LDLT, falling back to CG (tol 1e-12).
Vector solve_spd(const SparseMatrix& A, const Vector& b, SolveDiagnostics& diag) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(A);
    if (ldlt.info() == Eigen::Success) {
        Vector x = ldlt.solve(b);
        if (ldlt.info() == Eigen::Success) {
            diag.solver = "ldlt";
            const double bn = b.norm();
            diag.residual = bn > 0 ? (A * x - b).norm() / bn : 0.0;
            return x;
        }
    }
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-12);
    cg.compute(A);
    Vector x = cg.solve(b);
    if (cg.info() != Eigen::Success)
        throw std::runtime_error("solve_spd: factorization and CG both failed");
    diag.solver = "cg";
    diag.iterations = static_cast<int>(cg.iterations());
    diag.residual = cg.error();
    return x;
}

// (w ~ f)[K] assembled over all basis nodes: F_n = sum_{a >= n} 2^{-D} f(a).
Vector cup_load_nodes(const QuasiCubicalMesh& K, const Vector& f) {
    const int D = K.dim();
    Vector F = Vector::Zero(K.count(0));
    const double s = 1.0 / static_cast<double>(1 << D);
    for (Index a = 0; a < K.count(D); ++a)
        for (Index n : K.nodes_of(D, a)) F[n] += s * f[a];
    return F;
}

// (tr w ~ g)[Gamma] over basis nodes: G_n = sum over Gamma (D-1)-cells
// containing n of 2^{-(D-1)} g(cell).
Vector cup_load_boundary(const QuasiCubicalMesh& K, const SubMesh& gamma, const Vector& g) {
    const int D = K.dim();
    Vector G = Vector::Zero(K.count(0));
    const double s = 1.0 / static_cast<double>(1 << (D - 1));
    const auto cells = top_cells(gamma, D - 1);
    for (Index local = 0; local < static_cast<Index>(cells.size()); ++local)
        for (Index n : K.nodes_of(D - 1, cells[local])) G[n] += s * g[local];
    return G;
}

// (pi~ u ~ v) evaluated as a (D-1)-cochain given nodal u.
Vector capacity_cup_v(const QuasiCubicalMesh& K, const Vector& pi_tilde, const Vector& u,
                      const Vector& v) {
    const int D = K.dim();
    Vector out = Vector::Zero(K.count(D - 1));
    const double s = 1.0 / static_cast<double>(1 << (D - 1));
    for (Index c = 0; c < K.count(D - 1); ++c) {
        double acc = 0;
        for (Index n : K.nodes_of(D - 1, c)) acc += pi_tilde[n] * u[n];
        out[c] = v[c] * s * acc;
    }
    return out;
}

struct Reduced {
    std::vector<Index> free;             // free indices, ascending
    std::vector<Index> pos;              // full index -> position in free (-1 fixed)
};

Reduced make_reduced(Index n, const std::vector<Index>& fixed) {
    Reduced r;
    std::vector<char> is_fixed(static_cast<std::size_t>(n), 0);
    for (Index i : fixed) is_fixed[i] = 1;
    r.pos.assign(static_cast<std::size_t>(n), -1);
    for (Index i = 0; i < n; ++i)
        if (!is_fixed[i]) {
            r.pos[i] = static_cast<Index>(r.free.size());
            r.free.push_back(i);
        }
    return r;
}

SparseMatrix restrict_rows_cols(const SparseMatrix& A, const Reduced& r) {
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A, k); it; ++it)
            if (r.pos[it.row()] >= 0 && r.pos[it.col()] >= 0)
                trips.emplace_back(r.pos[it.row()], r.pos[it.col()], it.value());
    SparseMatrix out(static_cast<Index>(r.free.size()), static_cast<Index>(r.free.size()));
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

SparseMatrix restrict_cols(const SparseMatrix& A, const Reduced& r) {
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A, k); it; ++it)
            if (r.pos[it.col()] >= 0) trips.emplace_back(it.row(), r.pos[it.col()], it.value());
    SparseMatrix out(A.rows(), static_cast<Index>(r.free.size()));
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

}  // namespace

PrimalSystem assemble_primal(const Operators& ops, const TransportProblem& prob) {
    const auto& K = ops.mesh();
    const int D = K.dim();
    PrimalSystem sys;

    const SparseMatrix D0 = K.complex().coboundary_matrix(0);
    const Vector w1k = ops.inner(1).weights.cwiseProduct(prob.kappa_tilde);
    sys.stiffness = D0.transpose() * w1k.asDiagonal() * D0;

    if (prob.v) {
        // A_A(w,u) = (d0 w ~ (pi~ u ~ v))[K]
        std::vector<Eigen::Triplet<double>> trips;
        const double sD = 1.0 / static_cast<double>(1 << D);
        const double sd1 = 1.0 / static_cast<double>(1 << (D - 1));
        for (Index a = 0; a < K.count(D); ++a)
            for (const auto& pr : K.orthogonal_pairs({D, a}, 1, D - 1)) {
                const double vc = prob.v->values[pr.right];
                if (vc == 0.0) continue;
                for (const auto& nb : K.complex().hyperfaces(1, pr.left))
                    for (Index m : K.nodes_of(D - 1, pr.right))
                        trips.emplace_back(nb.face, m,
                                           sD * pr.sign * nb.sign * vc * sd1 * prob.pi_tilde[m]);
            }
        sys.advection = SparseMatrix(K.count(0), K.count(0));
        sys.advection.setFromTriplets(trips.begin(), trips.end());
    } else {
        sys.advection = SparseMatrix(K.count(0), K.count(0));
    }

    sys.load = cup_load_nodes(K, prob.f.values) - cup_load_boundary(K, prob.gamma_n, prob.g_n);

    sys.dirichlet_nodes = node_list(prob.gamma_d);
    sys.dirichlet_values = prob.g_d;
    return sys;
}

SolveResult solve_primal_steady(const Operators& ops, const TransportProblem& prob) {
    const auto& K = ops.mesh();
    const int D = K.dim();
    PrimalSystem sys = assemble_primal(ops, prob);

    SolveResult res;
    res.u = Vector::Zero(K.count(0));
    for (Index i = 0; i < static_cast<Index>(sys.dirichlet_nodes.size()); ++i)
        res.u[sys.dirichlet_nodes[i]] = sys.dirichlet_values[i];

    const Reduced red = make_reduced(K.count(0), sys.dirichlet_nodes);
    require(!red.free.empty(), "solve_primal_steady: no free nodes");
    SparseMatrix A = sys.stiffness - sys.advection;
    Vector rhs_full = sys.load - A * res.u;
    Vector rhs(static_cast<Index>(red.free.size()));
    for (Index k = 0; k < static_cast<Index>(red.free.size()); ++k) rhs[k] = rhs_full[red.free[k]];
    SparseMatrix Aff = restrict_rows_cols(A, red);

    Vector x;
    if (prob.v && prob.v->values.cwiseAbs().maxCoeff() > 0) {
        Eigen::SparseLU<SparseMatrix> lu(Aff);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("solve_primal_steady: LU factorization failed");
        x = lu.solve(rhs);
        res.diagnostics.solver = "lu";
    } else {
        x = solve_spd(Aff, rhs, res.diagnostics);
    }
    for (Index k = 0; k < static_cast<Index>(red.free.size()); ++k) res.u[red.free[k]] = x[k];

    // post-processing: q = -star_1 kt d0 u + pi~ u ~ v, then the Neumann copy
    const SparseMatrix D0 = K.complex().coboundary_matrix(0);
    res.q_raw = -(ops.hodge(1) * prob.kappa_tilde.cwiseProduct(D0 * res.u));
    if (prob.v) res.q_raw += capacity_cup_v(K, prob.pi_tilde, res.u, prob.v->values);
    res.q = res.q_raw;
    const auto gn_cells = top_cells(prob.gamma_n, D - 1);
    for (Index i = 0; i < static_cast<Index>(gn_cells.size()); ++i)
        res.q[gn_cells[i]] = prob.g_n[i];
    return res;
}

MixedSystem assemble_mixed(const Operators& ops, const TransportProblem& prob) {
    const auto& K = ops.mesh();
    const int D = K.dim();
    MixedSystem sys;

    sys.a_diag = ops.inner(D - 1).weights.cwiseQuotient(prob.kappa);
    const SparseMatrix Dd1 = K.complex().coboundary_matrix(D - 1);
    sys.b = ops.inner(D).weights.asDiagonal() * Dd1;
    sys.c_diag = ops.inner(D).weights.cwiseProduct(prob.pi);
    sys.f = ops.inner(D).weights.cwiseProduct(prob.f.values);

    // G(r) = (tr_{Gamma_D} r ~ g_D)[Gamma_D] = r(c) * mean of g_D over c's nodes
    sys.g = Vector::Zero(K.count(D - 1));
    {
        const auto cells = top_cells(prob.gamma_d, D - 1);
        const double s = 1.0 / static_cast<double>(1 << (D - 1));
        for (Index local = 0; local < static_cast<Index>(cells.size()); ++local) {
            double acc = 0;
            for (Index n : K.nodes_of(D - 1, cells[local]))
                acc += prob.g_d[prob.gamma_d.local_index(0, n)];
            sys.g[cells[local]] = s * acc;
        }
    }

    if (prob.v) {
        // B_A(w~, r) = <r, kappa^{-1} (star_D pi w~ ~ v)>_{D-1}
        // rows w~ (D-cells), cols r ((D-1)-cells)
        const SparseMatrix HDpiT =
            SparseMatrix((ops.hodge(D) * prob.pi.asDiagonal()).transpose());  // N_D x N_0 cols=node
        std::vector<Eigen::Triplet<double>> trips;
        const double sd1 = 1.0 / static_cast<double>(1 << (D - 1));
        const Vector wr = ops.inner(D - 1).weights.cwiseQuotient(prob.kappa);
        for (Index c = 0; c < K.count(D - 1); ++c) {
            const double vc = prob.v->values[c];
            if (vc == 0.0) continue;
            for (Index n : K.nodes_of(D - 1, c))
                for (SparseMatrix::InnerIterator it(HDpiT, n); it; ++it)
                    trips.emplace_back(it.row(), c, wr[c] * vc * sd1 * it.value());
        }
        sys.b_adv = SparseMatrix(K.count(D), K.count(D - 1));
        sys.b_adv.setFromTriplets(trips.begin(), trips.end());
    } else {
        sys.b_adv = SparseMatrix(K.count(D), K.count(D - 1));
    }

    sys.neumann_cells = top_cells(prob.gamma_n, D - 1);
    sys.neumann_values = prob.g_n;
    return sys;
}

namespace {

struct MixedWork {
    MixedSystem sys;
    Reduced red;       // over (D-1)-cells, Neumann fixed
    Vector q_fixed;    // full-size with Neumann values
    SparseMatrix Bf;   // B restricted to free columns
    Vector Af;         // free part of a_diag
    Vector fhat;       // f - B_N g_N
    Vector gf;         // free part of g
};

MixedWork mixed_setup(const Operators& ops, const TransportProblem& prob) {
    const auto& K = ops.mesh();
    const int D = K.dim();
    MixedWork w;
    w.sys = assemble_mixed(ops, prob);
    w.red = make_reduced(K.count(D - 1), w.sys.neumann_cells);
    w.q_fixed = Vector::Zero(K.count(D - 1));
    for (Index i = 0; i < static_cast<Index>(w.sys.neumann_cells.size()); ++i)
        w.q_fixed[w.sys.neumann_cells[i]] = w.sys.neumann_values[i];
    w.Bf = restrict_cols(w.sys.b, w.red);
    w.Af = Vector(static_cast<Index>(w.red.free.size()));
    w.gf = Vector(static_cast<Index>(w.red.free.size()));
    for (Index k = 0; k < static_cast<Index>(w.red.free.size()); ++k) {
        w.Af[k] = w.sys.a_diag[w.red.free[k]];
        w.gf[k] = w.sys.g[w.red.free[k]];
    }
    w.fhat = w.sys.f - w.sys.b * w.q_fixed;
    return w;
}

void mixed_postprocess(const Operators& ops, const TransportProblem& prob, const Vector& ut,
                       const Vector& qfull, SolveResult& res) {
    const auto& K = ops.mesh();
    res.u_tilde = ut;
    res.q = qfull;
    res.q_raw = qfull;
    res.u = ops.hodge(K.dim()) * ut;
    const auto gd_nodes = node_list(prob.gamma_d);
    for (Index i = 0; i < static_cast<Index>(gd_nodes.size()); ++i)
        res.u[gd_nodes[i]] = prob.g_d[i];
}

}  // namespace

SolveResult solve_mixed_steady(const Operators& ops, const TransportProblem& prob,
                               MixedMethod method) {
    const auto& K = ops.mesh();
    const int D = K.dim();
    require(!prob.v || prob.v->values.cwiseAbs().maxCoeff() == 0,
            "solve_mixed_steady: advective mixed solves are limited to v = 0");
    MixedWork w = mixed_setup(ops, prob);
    const Index nf = static_cast<Index>(w.red.free.size());
    const Index nu = K.count(D);

    SolveResult res;
    if (method == MixedMethod::Eliminate) {
        const Vector Ainv = w.Af.cwiseInverse();
        SparseMatrix M = w.Bf * Ainv.asDiagonal() * SparseMatrix(w.Bf.transpose());
        const Vector rhs = w.fhat + w.Bf * Ainv.cwiseProduct(w.gf);
        const Vector ut = solve_spd(M, rhs, res.diagnostics);
        Vector qf = Ainv.cwiseProduct(w.Bf.transpose() * ut - w.gf);
        Vector qfull = w.q_fixed;
        for (Index k = 0; k < nf; ++k) qfull[w.red.free[k]] = qf[k];
        mixed_postprocess(ops, prob, ut, qfull, res);
    } else {
        // saddle system [[diag(A), -Bf^T], [-Bf, 0]]
        std::vector<Eigen::Triplet<double>> trips;
        for (Index k = 0; k < nf; ++k) trips.emplace_back(k, k, w.Af[k]);
        for (int k = 0; k < w.Bf.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(w.Bf, k); it; ++it) {
                trips.emplace_back(it.col(), nf + it.row(), -it.value());
                trips.emplace_back(nf + it.row(), it.col(), -it.value());
            }
        SparseMatrix S(nf + nu, nf + nu);
        S.setFromTriplets(trips.begin(), trips.end());
        Vector rhs(nf + nu);
        rhs.head(nf) = -w.gf;
        rhs.tail(nu) = -w.fhat;
        Eigen::SparseLU<SparseMatrix> lu(S);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("solve_mixed_steady: saddle factorization failed");
        const Vector x = lu.solve(rhs);
        res.diagnostics.solver = "saddle-lu";
        Vector qfull = w.q_fixed;
        for (Index k = 0; k < nf; ++k) qfull[w.red.free[k]] = x[k];
        mixed_postprocess(ops, prob, x.tail(nu), qfull, res);
    }
    return res;
}

SolveResult solve_primal_transient(const Operators& ops, const TransportProblem& prob) {
    const auto& K = ops.mesh();
    const int D = K.dim();
    require(prob.transient.has_value(), "solve_primal_transient: missing transient parameters");
    const auto& tp = *prob.transient;
    require(tp.dt > 0, "solve_primal_transient: dt must be positive");
    require(tp.u0.size() == K.count(0), "solve_primal_transient: u0 length");

    PrimalSystem sys = assemble_primal(ops, prob);
    const Vector mass = ops.inner(0).weights.cwiseProduct(prob.pi_tilde);
    const SparseMatrix A = sys.stiffness - sys.advection;
    const Reduced red = make_reduced(K.count(0), sys.dirichlet_nodes);
    const Index nf = static_cast<Index>(red.free.size());

    SparseMatrix Aff = restrict_rows_cols(A, red);
    SparseMatrix Mff(nf, nf);
    {
        std::vector<Eigen::Triplet<double>> trips;
        for (Index k = 0; k < nf; ++k) trips.emplace_back(k, k, mass[red.free[k]] / tp.dt);
        Mff.setFromTriplets(trips.begin(), trips.end());
    }
    SparseMatrix lhs = Mff + SparseMatrix(tp.theta * Aff);
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(lhs);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("solve_primal_transient: factorization failed");

    SolveResult res;
    res.diagnostics.solver = "ldlt";
    Vector u = tp.u0;
    for (Index i = 0; i < static_cast<Index>(sys.dirichlet_nodes.size()); ++i)
        u[sys.dirichlet_nodes[i]] = sys.dirichlet_values[i];

    const SparseMatrix D0 = K.complex().coboundary_matrix(0);
    auto postprocess_q = [&](const Vector& un, Vector& q_raw, Vector& q) {
        q_raw = -(ops.hodge(1) * prob.kappa_tilde.cwiseProduct(D0 * un));
        if (prob.v) q_raw += capacity_cup_v(K, prob.pi_tilde, un, prob.v->values);
        q = q_raw;
        const auto gn_cells = top_cells(prob.gamma_n, D - 1);
        for (Index i = 0; i < static_cast<Index>(gn_cells.size()); ++i)
            q[gn_cells[i]] = prob.g_n[i];
    };

    const SparseMatrix H0 = ops.hodge(0);
    for (int step = 0; step < tp.steps; ++step) {
        // (M/dt + theta A) u1 = (M/dt - (1-theta) A) u0 + load, on free nodes
        Vector rhs_full = sys.load - A * u * (1.0 - tp.theta);
        Vector rhs(nf);
        for (Index k = 0; k < nf; ++k)
            rhs[k] = rhs_full[red.free[k]] + mass[red.free[k]] / tp.dt * u[red.free[k]];
        // Dirichlet columns at the new time level (time-independent data)
        Vector ubc = Vector::Zero(K.count(0));
        for (Index i = 0; i < static_cast<Index>(sys.dirichlet_nodes.size()); ++i)
            ubc[sys.dirichlet_nodes[i]] = sys.dirichlet_values[i];
        Vector bc_term = A * ubc * tp.theta;
        for (Index k = 0; k < nf; ++k) rhs[k] -= bc_term[red.free[k]];

        Vector x = ldlt.solve(rhs);
        Vector u_new = ubc;
        for (Index k = 0; k < nf; ++k) u_new[red.free[k]] = x[k];

        TransientStep ts;
        ts.t = tp.t0 + (step + 1) * tp.dt;
        ts.u = u_new;
        postprocess_q(u_new, res.q_raw, ts.q);
        ts.amount_increment = H0 * prob.pi_tilde.cwiseProduct(u_new - u);
        res.series.push_back(std::move(ts));
        u = u_new;
    }
    res.u = u;
    postprocess_q(u, res.q_raw, res.q);
    return res;
}

SolveResult solve_mixed_transient(const Operators& ops, const TransportProblem& prob,
                                  const Vector* q0_in, const Vector* ut0_in) {
    const auto& K = ops.mesh();
    const int D = K.dim();
    require(prob.transient.has_value(), "solve_mixed_transient: missing transient parameters");
    const auto& tp = *prob.transient;
    require(tp.dt > 0, "solve_mixed_transient: dt must be positive");
    require(!prob.v || prob.v->values.cwiseAbs().maxCoeff() == 0,
            "solve_mixed_transient: advective mixed solves are limited to v = 0");

    MixedWork w = mixed_setup(ops, prob);
    const Index nf = static_cast<Index>(w.red.free.size());
    const Vector Ainv = w.Af.cwiseInverse();

    // initial state
    Vector ut;
    Vector q;
    if (ut0_in) {
        ut = *ut0_in;
    } else {
        require(tp.u0.size() == K.count(0), "solve_mixed_transient: u0 length");
        ut = ops.hodge(0) * tp.u0;  // star_0 u0
    }
    if (q0_in) {
        q = *q0_in;
    } else {
        // flow_rate(u0) = kappa delta*_D (star_0 u0)  (v = 0 here)
        require(tp.u0.size() == K.count(0), "solve_mixed_transient: u0 length");
        Cochain s{D, ops.hodge(0) * tp.u0, ""};
        q = prob.kappa.cwiseProduct(adjoint_coboundary(K, ops.metric(), D, s).values);
    }

    // Schur operator: C/dt + theta * Bf A^{-1} Bf^T
    SparseMatrix M = w.Bf * Ainv.asDiagonal() * SparseMatrix(w.Bf.transpose());
    SparseMatrix lhs = M * tp.theta;
    {
        std::vector<Eigen::Triplet<double>> trips;
        for (Index c = 0; c < K.count(D); ++c) trips.emplace_back(c, c, w.sys.c_diag[c] / tp.dt);
        SparseMatrix Cdt(K.count(D), K.count(D));
        Cdt.setFromTriplets(trips.begin(), trips.end());
        lhs = SparseMatrix(lhs + Cdt);
    }
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(lhs);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("solve_mixed_transient: factorization failed");

    SolveResult res;
    res.diagnostics.solver = "ldlt";
    for (int step = 0; step < tp.steps; ++step) {
        // second equation with q^theta; q^{k+1}_f = A^{-1}(Bf^T ut^{k+1} - gf)
        Vector qf_old(nf);
        for (Index k = 0; k < nf; ++k) qf_old[k] = q[w.red.free[k]];
        Vector rhs = w.sys.c_diag.cwiseProduct(ut) / tp.dt + w.fhat -
                     (1.0 - tp.theta) * (w.Bf * qf_old) +
                     tp.theta * (w.Bf * Ainv.cwiseProduct(w.gf));
        Vector ut_new = ldlt.solve(rhs);
        Vector qf_new = Ainv.cwiseProduct(w.Bf.transpose() * ut_new - w.gf);
        Vector q_new = w.q_fixed;
        for (Index k = 0; k < nf; ++k) q_new[w.red.free[k]] = qf_new[k];

        TransientStep ts;
        ts.t = tp.t0 + (step + 1) * tp.dt;
        ts.amount_increment = prob.pi.cwiseProduct(ut_new - ut);
        ts.q = q_new;
        SolveResult tmp;
        mixed_postprocess(ops, prob, ut_new, q_new, tmp);
        ts.u = tmp.u;
        res.series.push_back(std::move(ts));
        ut = ut_new;
        q = q_new;
    }
    mixed_postprocess(ops, prob, ut, q, res);
    return res;
}

ErrorReport relative_errors(const Vector& u, const Vector& q, const Cochain& exact_u,
                            const Cochain& exact_q) {
    require(exact_u.values.norm() > 0 && exact_q.values.norm() > 0,
            "relative_errors: zero-norm exact field");
    ErrorReport r;
    r.u_rel = (u - exact_u.values).norm() / exact_u.values.norm();
    r.q_rel = (q - exact_q.values).norm() / exact_q.values.norm();
    return r;
}

}  // namespace cmc
