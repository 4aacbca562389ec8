// JSON serialization of the external file formats: cmc-mesh v1,
// cmc-problem v1, and cmc-result v1. All indices are 0-based.
#pragma once

#include <optional>
#include <string>

#include "cmc/cell_complex.hpp"
#include "cmc/forman.hpp"
#include "cmc/geometry.hpp"
#include "cmc/problem.hpp"
#include "cmc/solvers.hpp"

namespace cmc {

struct MeshFile {
    CellComplex complex;
    std::optional<std::vector<ChartPoint>> coordinates;        // per node
    std::optional<std::vector<Vector>> measures;               // per dim
    std::optional<std::vector<std::vector<IntervalCell>>> interval_map;
};

std::string write_mesh_json(const CellComplex& complex,
                            const std::vector<ChartPoint>* coordinates = nullptr,
                            const std::vector<Vector>* measures = nullptr,
                            const std::vector<std::vector<IntervalCell>>* interval_map = nullptr);
MeshFile read_mesh_json(const std::string& text);

std::string write_problem_json(const QuasiCubicalMesh& K, const TransportProblem& prob,
                               const std::string& mesh_ref,
                               const Cochain* exact_u = nullptr,
                               const Cochain* exact_q = nullptr);

struct ProblemFile {
    std::string mesh_ref;
    TransportProblem problem;        // gamma sub-meshes rebuilt against the mesh
    std::optional<Cochain> exact_u;
    std::optional<Cochain> exact_q;
};
ProblemFile read_problem_json(const std::string& text, const QuasiCubicalMesh& K);

std::string write_result_json(const SolveResult& result,
                              const std::optional<ErrorReport>& errors);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace cmc
