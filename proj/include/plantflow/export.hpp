#pragma once

#include "plantflow/linalg.hpp"
#include "plantflow/mesh.hpp"

#include <string>
#include <utility>
#include <vector>

namespace plantflow {

/// "%.17g"
std::string format_double(double v);

/// Tensor as CSV: "# key: value" header lines, a column header "i,j,value"
/// and one row per entry in row-major order. A vector is written as a d×1
/// tensor. Throws IOError when the path cannot be written.
void write_tensor_csv(const std::string& path, const MatrixX& tensor,
                      const std::vector<std::pair<std::string, std::string>>& header = {});
/// Reads a file written by write_tensor_csv. Throws IOError or ParseError.
MatrixX read_tensor_csv(const std::string& path);

/// Plain table with a column header row; `#` comment lines first.
void write_table_csv(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows, const std::vector<std::string>& comments = {});

struct VtkField {
    std::string name;
    /// Scalars (one per point/cell) or 2-vectors (written with z = 0).
    std::vector<double> scalars;
    std::vector<Vec2> vectors;
};

/// Legacy ASCII VTK 3.0 unstructured grid of triangles with the subdomain
/// tag as a cell scalar.
void write_vtk(const std::string& path, const SimplicialMesh& mesh, const std::vector<VtkField>& point_data,
               const std::vector<VtkField>& cell_data, const std::string& title = "plantflow");

}  // namespace plantflow
