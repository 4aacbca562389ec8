#include "cmc/forman.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

namespace cmc {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

QuasiCubicalMesh::QuasiCubicalMesh(CellComplex complex,
                                   std::vector<std::vector<IntervalCell>> intervals)
    : complex_(std::move(complex)), intervals_(std::move(intervals)) {}

void QuasiCubicalMesh::build_closures() const {
    if (!closures_.empty()) return;
    const int D = complex_.dim();
    closures_.resize(static_cast<std::size_t>(D) + 1);
    for (int p = 0; p <= D; ++p) {
        closures_[p].resize(static_cast<std::size_t>(complex_.count(p)));
        for (Index i = 0; i < complex_.count(p); ++i) {
            auto& per_q = closures_[p][i];
            per_q.resize(static_cast<std::size_t>(p) + 1);
            per_q[p] = {i};
            for (int q = p - 1; q >= 0; --q) {
                std::set<Index> acc;
                for (Index c : per_q[q + 1])
                    for (const auto& fr : complex_.hyperfaces(q + 1, c)) acc.insert(fr.face);
                per_q[q].assign(acc.begin(), acc.end());
            }
        }
    }
}

const std::vector<Index>& QuasiCubicalMesh::nodes_of(int p, Index i) const {
    return subfaces_of(p, i, 0);
}

const std::vector<Index>& QuasiCubicalMesh::subfaces_of(int p, Index i, int q) const {
    build_closures();
    return closures_.at(p).at(i).at(q);
}

const std::vector<OrthogonalPair>& QuasiCubicalMesh::orthogonal_pairs(CellId a, int p, int q) const {
    require(p >= 0 && q >= 0 && p + q == a.dim, "orthogonal_pairs: p+q must equal dim a");
    require(a.dim <= dim(), "orthogonal_pairs: cell dimension exceeds mesh dimension");
    const auto key = std::make_tuple(a.dim, a.index, p, q);
    auto it = pair_cache_.find(key);
    if (it != pair_cache_.end()) return it->second;

    std::vector<OrthogonalPair> pairs;
    const auto& bs = subfaces_of(a.dim, a.index, p);
    const auto& cs = subfaces_of(a.dim, a.index, q);
    std::vector<Index> shared;
    for (Index b : bs) {
        const auto& nb = nodes_of(p, b);
        for (Index c : cs) {
            const auto& nc = nodes_of(q, c);
            shared.clear();
            std::set_intersection(nb.begin(), nb.end(), nc.begin(), nc.end(),
                                  std::back_inserter(shared));
            if (shared.size() == 1) {
                OrthogonalPair op;
                op.left = b;
                op.right = c;
                op.pivot = shared[0];
                op.sign = static_cast<std::int8_t>(
                    relative_orthogonal_orientation(a, {p, b}, {q, c}));
                pairs.push_back(op);
            }
        }
    }
    return pair_cache_.emplace(key, std::move(pairs)).first->second;
}

int QuasiCubicalMesh::relative_orthogonal_orientation(CellId a, CellId b, CellId c) const {
    const int p = b.dim, q = c.dim;
    require(p + q == a.dim, "eps_perp: dimensions do not add up");
    if (p == 0 || q == 0) return 1;

    const auto& nb = nodes_of(p, b.index);
    const auto& nc = nodes_of(q, c.index);
    std::vector<Index> shared;
    std::set_intersection(nb.begin(), nb.end(), nc.begin(), nc.end(), std::back_inserter(shared));
    require(shared.size() == 1, "eps_perp: cells do not share exactly one node");
    const Index pivot = shared[0];

    if (p == 1) return complex_.sign(a, c.index) * complex_.sign(b, pivot);
    if (p == 2 && q == 1) return complex_.sign(a, b.index) * complex_.sign(c, pivot);
    throw std::invalid_argument("eps_perp: splits with p >= 2 and q >= 2 need D > 3 (unsupported)");
}

void QuasiCubicalMesh::invalidate_caches() {
    closures_.clear();
    pair_cache_.clear();
}

ValidationReport QuasiCubicalMesh::check_quasi_cubical() const {
    ValidationReport rep;
    for (int p = 1; p <= dim(); ++p)
        for (Index i = 0; i < count(p); ++i) {
            const auto nn = static_cast<long>(nodes_of(p, i).size());
            const auto nf = static_cast<long>(complex_.hyperfaces(p, i).size());
            if (nn != (1L << p))
                rep.issues.push_back({"cube-lattice", {p, i},
                                      std::to_string(nn) + " nodes, expected " +
                                          std::to_string(1L << p)});
            if (nf != 2L * p)
                rep.issues.push_back({"cube-lattice", {p, i},
                                      std::to_string(nf) + " hyperfaces, expected " +
                                          std::to_string(2L * p)});
        }
    return rep;
}

ValidationReport check_simple_polytopes(const CellComplex& parent) {
    ValidationReport rep;
    for (int p = 2; p <= parent.dim(); ++p)
        for (Index i = 0; i < parent.count(p); ++i) {
            const auto edges = parent.subfaces(p, i, 1);
            std::map<Index, int> edges_at_node;
            for (Index e : edges)
                for (const auto& fr : parent.hyperfaces(1, e)) edges_at_node[fr.face]++;
            for (const auto& [n, k] : edges_at_node)
                if (k != p)
                    rep.issues.push_back({"non-simple", {p, i},
                                          "node " + std::to_string(n) + " lies on " +
                                              std::to_string(k) + " edges, expected " +
                                              std::to_string(p)});
        }
    return rep;
}

QuasiCubicalMesh forman_subdivide(const CellComplex& parent) {
    const int D = parent.dim();
    {
        auto rep = check_simple_polytopes(parent);
        if (!rep.ok())
            throw std::invalid_argument("forman_subdivide: parent has non-simple cells: " +
                                        rep.summary());
    }

    // subface closure of every parent cell, as sorted (dim, index) pairs
    std::vector<std::vector<std::vector<std::vector<Index>>>> clos(static_cast<std::size_t>(D) + 1);
    for (int p = 0; p <= D; ++p) {
        clos[p].resize(static_cast<std::size_t>(parent.count(p)));
        for (Index i = 0; i < parent.count(p); ++i) {
            clos[p][i].resize(static_cast<std::size_t>(p) + 1);
            for (int q = 0; q <= p; ++q) clos[p][i][q] = parent.subfaces(p, i, q);
        }
    }
    auto contains = [&](int pb, Index ib, int pa, Index ia) {
        if (pa > pb) return false;
        const auto& v = clos[pb][ib][pa];
        return std::binary_search(v.begin(), v.end(), ia);
    };

    // enumerate intervals ordered by (lower dim, lower index, upper index)
    std::vector<std::vector<IntervalCell>> intervals(static_cast<std::size_t>(D) + 1);
    std::map<std::array<Index, 4>, Index> id_of;
    for (int len = 0; len <= D; ++len) {
        for (int pa = 0; pa + len <= D; ++pa) {
            const int pb = pa + len;
            for (Index ia = 0; ia < parent.count(pa); ++ia) {
                // uppers containing (pa, ia): scan all pb-cells
                for (Index ib = 0; ib < parent.count(pb); ++ib) {
                    if (!contains(pb, ib, pa, ia)) continue;
                    id_of[{static_cast<Index>(pa), ia, static_cast<Index>(pb), ib}] =
                        static_cast<Index>(intervals[len].size());
                    intervals[len].push_back({{pa, ia}, {pb, ib}});
                }
            }
        }
    }

    CellComplex K(D);
    K.set_node_count(static_cast<Index>(intervals[0].size()));
    for (int len = 1; len <= D; ++len) {
        for (const auto& iv : intervals[len]) {
            const int pa = iv.lower.dim, pb = iv.upper.dim;
            const Index ia = iv.lower.index, ib = iv.upper.index;
            std::vector<FaceRef> faces;
            // lower end moves up: [a', b] with a' covering a inside b
            for (Index j : clos[pb][ib][pa + 1])
                if (parent.sign({pa + 1, j}, ia) != 0)
                    faces.push_back({id_of.at({static_cast<Index>(pa + 1), j,
                                               static_cast<Index>(pb), ib}),
                                     1});
            // upper end moves down: [a, b'] with b' a hyperface of b containing a
            for (const auto& fr : parent.hyperfaces(pb, ib))
                if (contains(pb - 1, fr.face, pa, ia))
                    faces.push_back({id_of.at({static_cast<Index>(pa), ia,
                                               static_cast<Index>(pb - 1), fr.face}),
                                     1});
            std::sort(faces.begin(), faces.end(),
                      [](const FaceRef& x, const FaceRef& y) { return x.face < y.face; });
            K.add_cell(len, std::move(faces));
        }
    }

    QuasiCubicalMesh mesh(std::move(K), std::move(intervals));
    {
        auto rep = mesh.check_quasi_cubical();
        if (!rep.ok())
            throw std::runtime_error("forman_subdivide: quasi-cubical check failed: " +
                                     rep.summary());
    }
    return mesh;
}

void assign_forman_orientations(QuasiCubicalMesh& K) {
    auto& complex = K.complex_mutable();
    const int D = complex.dim();

    // edges: +1 at [b,b], -1 at [a,a] for the interval [a,b]
    for (Index e = 0; e < complex.count(1); ++e) {
        const auto& iv = K.interval(1, e);
        auto& faces = complex.hyperfaces_mutable(1, e);
        require(faces.size() == 2, "assign_forman_orientations: edge without two nodes");
        for (auto& fr : faces) {
            const auto& niv = K.interval(0, fr.face);
            const bool is_upper = (niv.lower == iv.upper);
            fr.sign = static_cast<std::int8_t>(is_upper ? 1 : -1);
        }
    }

    // p >= 2: per-cell propagation over the diamond constraints.
    // For a (p-2)-subface c with the two between-cells b, b':
    //   x_b eps(b,c) + x_b' eps(b',c) = 0  =>  x_b' = -x_b eps(b,c) eps(b',c)
    for (int p = 2; p <= D; ++p) {
        for (Index i = 0; i < complex.count(p); ++i) {
            auto& faces = complex.hyperfaces_mutable(p, i);
            const int nf = static_cast<int>(faces.size());
            std::map<Index, int> face_pos;
            for (int k = 0; k < nf; ++k) face_pos[faces[k].face] = k;

            // diamond edges: pairs of hyperfaces sharing a (p-2)-subface
            std::map<Index, std::vector<int>> between;
            for (int k = 0; k < nf; ++k)
                for (const auto& fc : complex.hyperfaces(p - 1, faces[k].face))
                    between[fc.face].push_back(k);

            std::vector<int> x(static_cast<std::size_t>(nf), 0);
            for (int seed = 0; seed < nf; ++seed) {
                if (x[seed] != 0) continue;
                x[seed] = 1;
                std::queue<int> q;
                q.push(seed);
                while (!q.empty()) {
                    const int k = q.front();
                    q.pop();
                    for (const auto& [c, pairk] : between) {
                        if (pairk.size() != 2) continue;
                        int other = -1;
                        if (pairk[0] == k)
                            other = pairk[1];
                        else if (pairk[1] == k)
                            other = pairk[0];
                        else
                            continue;
                        const int eb = complex.sign({p - 1, faces[k].face}, c);
                        const int eb2 = complex.sign({p - 1, faces[other].face}, c);
                        const int want = -x[k] * eb * eb2;
                        if (x[other] == 0) {
                            x[other] = want;
                            q.push(other);
                        } else if (x[other] != want) {
                            throw std::runtime_error(
                                "assign_forman_orientations: diamond constraints contradictory");
                        }
                    }
                }
            }
            for (int k = 0; k < nf; ++k) faces[k].sign = static_cast<std::int8_t>(x[k]);
        }
    }

    orient_top_cells(complex);
    K.invalidate_caches();
}

}  // namespace cmc
