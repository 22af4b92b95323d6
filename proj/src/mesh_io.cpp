#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mhom/errors.hpp"
#include "mhom/mesh.hpp"

namespace mhom {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::size_t read_count(std::istream &in, const char *tag) {
  std::string word;
  std::size_t n = 0;
  if (!(in >> word >> n) || word != tag) throw std::runtime_error(std::string("read_mesh: expected section ") + tag);
  return n;
}

}  // namespace

void write_mesh(std::ostream &out, const MembraneMesh &mesh) {
  out << "membrane-mesh v1\n";
  out << "V " << mesh.vertices.size() << '\n';
  for (const auto &v : mesh.vertices) out << fmt_double(v.x) << ' ' << fmt_double(v.y) << '\n';
  out << "T " << mesh.triangles.size() << '\n';
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto &tri = mesh.triangles[t];
    const CellIndex k = t < mesh.triangle_cells.size() ? mesh.triangle_cells[t] : CellIndex{};
    out << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << (mesh.regions[t] == Region::Plus ? '+' : '-') << ' '
        << k.x << ' ' << k.y << '\n';
  }
  out << "IE " << mesh.interface_pairs.size() << '\n';
  for (const auto &p : mesh.interface_pairs) out << p[0] << ' ' << p[1] << '\n';
  out << "B " << mesh.boundary_nodes.size() << '\n';
  for (int b : mesh.boundary_nodes) out << b << '\n';
}

MembraneMesh read_mesh(std::istream &in) {
  std::string magic, version;
  if (!(in >> magic >> version) || magic != "membrane-mesh" || version != "v1")
    throw std::runtime_error("read_mesh: not a membrane-mesh v1 file");
  MembraneMesh m;
  const std::size_t nv = read_count(in, "V");
  m.vertices.resize(nv);
  for (auto &v : m.vertices)
    if (!(in >> v.x >> v.y)) throw std::runtime_error("read_mesh: truncated vertex list");
  m.reference = m.vertices;

  const std::size_t nt = read_count(in, "T");
  for (std::size_t t = 0; t < nt; ++t) {
    std::array<int, 3> tri{};
    char tag = 0;
    CellIndex k;
    if (!(in >> tri[0] >> tri[1] >> tri[2] >> tag >> k.x >> k.y)) throw std::runtime_error("read_mesh: truncated triangle list");
    for (int id : tri)
      if (id < 0 || static_cast<std::size_t>(id) >= nv) throw std::runtime_error("read_mesh: vertex index out of range");
    if (tag != '+' && tag != '-') throw std::runtime_error("read_mesh: region tag must be + or -");
    m.triangles.push_back(tri);
    m.regions.push_back(tag == '+' ? Region::Plus : Region::Minus);
    m.triangle_cells.push_back(k);
  }

  const std::size_t ne = read_count(in, "IE");
  m.interface_pairs.resize(ne);
  for (auto &p : m.interface_pairs)
    if (!(in >> p[0] >> p[1])) throw std::runtime_error("read_mesh: truncated interface list");

  const std::size_t nb = read_count(in, "B");
  m.boundary_nodes.resize(nb);
  for (auto &b : m.boundary_nodes)
    if (!(in >> b)) throw std::runtime_error("read_mesh: truncated boundary list");

  // Segments: pairs (i, j) whose plus copies span a PLUS edge and whose minus
  // copies span a MINUS edge. Orientation follows the MINUS triangle.
  std::map<int, int> pair_of_minus;
  for (std::size_t i = 0; i < m.interface_pairs.size(); ++i) pair_of_minus[m.interface_pairs[i][1]] = static_cast<int>(i);
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    if (m.regions[t] != Region::Minus) continue;
    const auto &tri = m.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const auto a = pair_of_minus.find(tri[e]);
      const auto b = pair_of_minus.find(tri[(e + 1) % 3]);
      if (a == pair_of_minus.end() || b == pair_of_minus.end()) continue;
      // CCW triangle: the interior (MINUS) lies left of tri[e] -> tri[e+1].
      m.interface_segments.push_back({a->second, b->second});
    }
  }

  for (const auto &tri : m.triangles)
    for (int e = 0; e < 3; ++e)
      m.h = std::max(m.h, norm(m.vertices[tri[e]] - m.vertices[tri[(e + 1) % 3]]));
  return m;
}

void write_mesh_file(const std::string &path, const MembraneMesh &mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_mesh_file: cannot open " + path);
  write_mesh(out, mesh);
  if (!out) throw std::runtime_error("write_mesh_file: write failed for " + path);
}

MembraneMesh read_mesh_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_mesh_file: cannot open " + path);
  return read_mesh(in);
}

}  // namespace mhom
