#include "plantflow/export.hpp"

#include "plantflow/errors.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

namespace plantflow {

namespace {

std::ofstream open_for_writing(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IOError("cannot write " + path);
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IOError("write failed for " + path);
}

void write_field(std::ostream& out, const VtkField& f, std::size_t count, const std::string& where) {
    if (!f.vectors.empty()) {
        if (f.vectors.size() != count) throw StateError("VTK " + where + " field " + f.name + " has the wrong size");
        out << "VECTORS " << f.name << " double\n";
        for (const Vec2& v : f.vectors) out << format_double(v.x()) << ' ' << format_double(v.y()) << " 0\n";
        return;
    }
    if (f.scalars.size() != count) throw StateError("VTK " + where + " field " + f.name + " has the wrong size");
    out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : f.scalars) out << format_double(v) << '\n';
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_tensor_csv(const std::string& path, const MatrixX& tensor,
                      const std::vector<std::pair<std::string, std::string>>& header) {
    std::ofstream out = open_for_writing(path);
    for (const auto& [k, v] : header) out << "# " << k << ": " << v << "\r\n";
    out << "i,j,value\r\n";
    for (Eigen::Index i = 0; i < tensor.rows(); ++i)
        for (Eigen::Index j = 0; j < tensor.cols(); ++j) out << i << ',' << j << ',' << format_double(tensor(i, j)) << "\r\n";
    finish(out, path);
}

MatrixX read_tensor_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot read " + path);
    std::vector<std::tuple<int, int, double>> entries;
    std::string line;
    bool header = false;
    int rows = 0, cols = 0, lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "i,j,value") throw ParseError(path + ":" + std::to_string(lineno) + ": expected header i,j,value");
            header = true;
            continue;
        }
        int i = 0, j = 0;
        double v = 0.0;
        char c1 = 0, c2 = 0;
        std::istringstream s(line);
        if (!(s >> i >> c1 >> j >> c2 >> v) || c1 != ',' || c2 != ',' || i < 0 || j < 0)
            throw ParseError(path + ":" + std::to_string(lineno) + ": malformed row '" + line + "'");
        entries.emplace_back(i, j, v);
        rows = std::max(rows, i + 1);
        cols = std::max(cols, j + 1);
    }
    if (!header || entries.empty()) throw ParseError(path + ": no tensor entries");
    if (static_cast<int>(entries.size()) != rows * cols) throw ParseError(path + ": incomplete tensor");
    MatrixX t = MatrixX::Constant(rows, cols, std::numeric_limits<double>::quiet_NaN());
    for (const auto& [i, j, v] : entries) t(i, j) = v;
    if (t.hasNaN()) throw ParseError(path + ": duplicate or missing entries");
    return t;
}

void write_table_csv(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows, const std::vector<std::string>& comments) {
    std::ofstream out = open_for_writing(path);
    for (const auto& c : comments) out << "# " << c << "\r\n";
    for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << columns[k];
    out << "\r\n";
    for (const auto& row : rows) {
        if (row.size() != columns.size()) throw StateError("table row width does not match the columns of " + path);
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
        out << "\r\n";
    }
    finish(out, path);
}

void write_vtk(const std::string& path, const SimplicialMesh& mesh, const std::vector<VtkField>& point_data,
               const std::vector<VtkField>& cell_data, const std::string& title) {
    std::ofstream out = open_for_writing(path);
    const std::size_t nv = mesh.num_vertices(), nc = mesh.num_cells();
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (const Vec2& p : mesh.vertices) out << format_double(p.x()) << ' ' << format_double(p.y()) << " 0\n";
    out << "CELLS " << nc << ' ' << 4 * nc << '\n';
    for (const auto& c : mesh.cells) out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
    out << "CELL_TYPES " << nc << '\n';
    for (std::size_t c = 0; c < nc; ++c) out << "5\n";
    out << "CELL_DATA " << nc << "\nSCALARS subdomain int 1\nLOOKUP_TABLE default\n";
    for (Subdomain s : mesh.cell_tags) out << static_cast<int>(s) << '\n';
    for (const auto& f : cell_data) write_field(out, f, nc, "cell");
    if (!point_data.empty()) {
        out << "POINT_DATA " << nv << '\n';
        for (const auto& f : point_data) write_field(out, f, nv, "point");
    }
    finish(out, path);
}

}  // namespace plantflow
