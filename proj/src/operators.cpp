#include "cmc/operators.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cmc {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void MetricData::check_positive() const {
    for (std::size_t p = 0; p < mu.size(); ++p)
        for (Eigen::Index i = 0; i < mu[p].size(); ++i)
            if (!(mu[p][i] > 0.0))
                throw std::invalid_argument("MetricData: non-positive measure at dim " +
                                            std::to_string(p) + ", cell " + std::to_string(i));
}

Cochain cup(const QuasiCubicalMesh& K, const Cochain& sigma, const Cochain& tau) {
    const int p = sigma.dim, q = tau.dim;
    require(p + q <= K.dim(), "cup: degree overflow");
    require(sigma.values.size() == K.count(p) && tau.values.size() == K.count(q),
            "cup: operand length mismatch");
    Cochain out;
    out.dim = p + q;
    out.values = Vector::Zero(K.count(p + q));
    const double scale = 1.0 / static_cast<double>(1 << (p + q));
    for (Index a = 0; a < K.count(p + q); ++a) {
        double acc = 0;
        for (const auto& pr : K.orthogonal_pairs({p + q, a}, p, q))
            acc += pr.sign * sigma.values[pr.left] * tau.values[pr.right];
        out.values[a] = scale * acc;
    }
    return out;
}

InnerProduct inner_product(const QuasiCubicalMesh& K, const MetricData& mu, int p) {
    const int D = K.dim();
    require(p >= 0 && p <= D, "inner_product: bad degree");
    require(static_cast<int>(mu.mu.size()) == D + 1, "inner_product: missing measures");
    InnerProduct ip;
    ip.degree = p;
    ip.weights = Vector::Zero(K.count(p));
    for (Index a = 0; a < K.count(D); ++a)
        for (const auto& pr : K.orthogonal_pairs({D, a}, D - p, p))
            ip.weights[pr.right] += mu.mu[D - p][pr.left];
    const double scale = 1.0 / static_cast<double>(1 << D);
    for (Index c = 0; c < K.count(p); ++c) {
        ip.weights[c] *= scale / mu.mu[p][c];
        if (!(ip.weights[c] > 0.0))
            throw std::runtime_error("inner_product: non-positive weight at degree " +
                                     std::to_string(p) + ", cell " + std::to_string(c));
    }
    return ip;
}

SparseMatrix hodge_star_matrix(const QuasiCubicalMesh& K, const MetricData& mu, int p) {
    const int D = K.dim();
    require(p >= 0 && p <= D, "hodge_star: bad degree");
    const InnerProduct wd = inner_product(K, mu, D - p);
    std::vector<Eigen::Triplet<double>> trips;
    for (Index a = 0; a < K.count(D); ++a)
        for (const auto& pr : K.orthogonal_pairs({D, a}, p, D - p))
            trips.emplace_back(pr.right, pr.left, static_cast<double>(pr.sign));
    SparseMatrix H(K.count(D - p), K.count(p));
    H.setFromTriplets(trips.begin(), trips.end());
    const double scale = 1.0 / static_cast<double>(1 << D);
    for (int k = 0; k < H.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(H, k); it; ++it)
            it.valueRef() *= scale / wd.weights[it.row()];
    return H;
}

Cochain hodge_star(const QuasiCubicalMesh& K, const MetricData& mu, int p, const Cochain& sigma) {
    require(sigma.dim == p, "hodge_star: degree mismatch");
    require(sigma.values.size() == K.count(p), "hodge_star: wrong length");
    Cochain out;
    out.dim = K.dim() - p;
    out.values = hodge_star_matrix(K, mu, p) * sigma.values;
    return out;
}

std::vector<ZeroTraceSpace> zero_trace_spaces(const QuasiCubicalMesh& K) {
    const int D = K.dim();
    const auto bcells = boundary_cells(K.complex());
    std::vector<std::set<Index>> closure(static_cast<std::size_t>(D) + 1);
    for (Index c : bcells) {
        closure[D - 1].insert(c);
        for (int q = 0; q < D - 1; ++q)
            for (Index s : K.complex().subfaces(D - 1, c, q)) closure[q].insert(s);
    }
    std::vector<ZeroTraceSpace> out(static_cast<std::size_t>(D) + 1);
    for (int p = 0; p <= D; ++p) {
        out[p].degree = p;
        out[p].on_boundary.assign(static_cast<std::size_t>(K.count(p)), 0);
        for (Index c : closure[p]) out[p].on_boundary[c] = 1;
        for (Index c = 0; c < K.count(p); ++c)
            if (!out[p].on_boundary[c]) out[p].interior.push_back(c);
    }
    return out;
}

Cochain zero_trace_project(const ZeroTraceSpace& space, const Cochain& cochain) {
    require(cochain.dim == space.degree, "zero_trace_project: degree mismatch");
    Cochain out = cochain;
    for (Index c = 0; c < out.values.size(); ++c)
        if (space.on_boundary[c]) out.values[c] = 0.0;
    return out;
}

SparseMatrix adjoint_coboundary_matrix(const QuasiCubicalMesh& K, const MetricData& mu, int p) {
    const int D = K.dim();
    require(p >= 1 && p <= D, "adjoint_coboundary: degree must be in [1, D]");
    const InnerProduct wp = inner_product(K, mu, p);
    const InnerProduct wpm1 = inner_product(K, mu, p - 1);
    const auto zt = zero_trace_spaces(K);

    std::vector<Eigen::Triplet<double>> trips;
    for (Index a = 0; a < K.count(p); ++a) {
        if (zt[p].on_boundary[a]) continue;
        for (const auto& fr : K.complex().hyperfaces(p, a)) {
            if (zt[p - 1].on_boundary[fr.face]) continue;
            trips.emplace_back(fr.face, a, fr.sign * wp.weights[a] / wpm1.weights[fr.face]);
        }
    }
    SparseMatrix M(K.count(p - 1), K.count(p));
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

Cochain adjoint_coboundary(const QuasiCubicalMesh& K, const MetricData& mu, int p,
                           const Cochain& sigma) {
    require(sigma.dim == p, "adjoint_coboundary: degree mismatch");
    const auto zt = zero_trace_spaces(K);
    for (Index c = 0; c < sigma.values.size(); ++c)
        if (zt[p].on_boundary[c] && sigma.values[c] != 0.0)
            throw std::invalid_argument("adjoint_coboundary: input has nonzero boundary trace");
    Cochain out;
    out.dim = p - 1;
    out.values = adjoint_coboundary_matrix(K, mu, p) * sigma.values;
    return out;
}

Operators::Operators(const QuasiCubicalMesh& K, const MetricData& mu) : K_(K), mu_(mu) {
    mu_.check_positive();
    const int D = K.dim();
    inner_.reserve(static_cast<std::size_t>(D) + 1);
    for (int p = 0; p <= D; ++p) inner_.push_back(inner_product(K, mu, p));
    hodge_.reserve(static_cast<std::size_t>(D) + 1);
    for (int p = 0; p <= D; ++p) hodge_.push_back(hodge_star_matrix(K, mu, p));
    zt_ = zero_trace_spaces(K);
}

const SparseMatrix& Operators::hodge(int p) const { return hodge_.at(p); }

std::string Operators::dump_coordinate_text(const SparseMatrix& M) {
    std::ostringstream os;
    os.precision(17);
    for (int k = 0; k < M.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(M, k); it; ++it)
            os << it.row() << " " << it.col() << " " << it.value() << "\n";
    return os.str();
}

}  // namespace cmc
