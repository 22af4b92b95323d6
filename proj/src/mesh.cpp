#include "mhom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "mhom/errors.hpp"

namespace mhom {

double MembraneMesh::triangle_area(std::size_t t) const {
  const auto &tri = triangles[t];
  return 0.5 * cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
}

double MembraneMesh::region_area(Region r) const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t)
    if (regions[t] == r) sum += triangle_area(t);
  return sum;
}

double MembraneMesh::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) sum += triangle_area(t);
  return sum;
}

std::vector<Region> MembraneMesh::node_regions() const {
  std::vector<Region> out(vertices.size(), Region::Plus);
  for (std::size_t t = 0; t < triangles.size(); ++t)
    if (regions[t] == Region::Minus)
      for (int v : triangles[t]) out[v] = Region::Minus;
  return out;
}

std::string to_string(MembraneRule rule) {
  switch (rule) {
    case MembraneRule::Distance: return "distance";
    case MembraneRule::All: return "all";
    case MembraneRule::None: return "none";
  }
  return "unknown";
}

int interface_node_count(double radius, double h) {
  const int raw = static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / h - 1e-12));
  return std::max(8, (raw + 7) / 8 * 8);
}

namespace {

// Rotation by b quarter turns, exact in floating point.
Vec2 quarter_turn(Vec2 v, int b) {
  switch (((b % 4) + 4) % 4) {
    case 1: return {-v.y, v.x};
    case 2: return {-v.x, -v.y};
    case 3: return {v.y, -v.x};
    default: return v;
  }
}

// Block-0 frame (angles 0..90 degrees) relative to the cell centre.
Vec2 arc_point(double r, double s) {
  const double a = 0.5 * std::numbers::pi * s;
  return {r * std::cos(a), r * std::sin(a)};
}

// L-shaped path of the square of half-width w through its corner.
Vec2 square_path(double w, double s) {
  return s <= 0.5 ? Vec2{w, 2.0 * w * s} : Vec2{w * (2.0 - 2.0 * s), w};
}

double min_angle_deg(Vec2 a, Vec2 b, Vec2 c) {
  const auto angle = [](Vec2 p, Vec2 q, Vec2 r) {
    const Vec2 u = q - p, v = r - p;
    return std::atan2(std::fabs(cross(u, v)), dot(u, v));
  };
  const double m = std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
  return m * 180.0 / std::numbers::pi;
}

class CellBuilder {
 public:
  CellBuilder(const InterfaceSpec &spec, int n_iface) : spec_(spec), n_(n_iface) {}

  int add(Vec2 p) {
    mesh_.vertices.push_back(p);
    return static_cast<int>(mesh_.vertices.size()) - 1;
  }

  void tri(int a, int b, int c, Region r) {
    const auto &v = mesh_.vertices;
    if (cross(v[b] - v[a], v[c] - v[a]) < 0.0) std::swap(b, c);
    mesh_.triangles.push_back({a, b, c});
    mesh_.regions.push_back(r);
    mesh_.triangle_cells.push_back({0, 0});
  }

  // Row point at angular position u in [0,4) between two block-0 curves.
  template <class Inner, class Outer>
  Vec2 blend(double u, double t, Inner inner, Outer outer) const {
    const int b = static_cast<int>(std::floor(u));
    const double s = u - b;
    const Vec2 local = (1.0 - t) * inner(s) + t * outer(s);
    return spec_.center + quarter_turn(local, b);
  }

  // Quad strip between two rows of equal length C. Diagonals are chosen on the
  // first half of block 0 and mirrored, which keeps the mesh D4-symmetric.
  void strip(const std::vector<int> &lo, const std::vector<int> &hi, Region r) {
    const int C = static_cast<int>(lo.size());
    const int per_block = C / 4;
    const int half = per_block / 2;
    std::vector<bool> diag_ac(per_block);
    const auto &v = mesh_.vertices;
    for (int ii = 0; ii < half; ++ii) {
      const int a = lo[ii], b = lo[ii + 1], c = hi[ii + 1], d = hi[ii];
      const double q_ac = std::min(min_angle_deg(v[a], v[b], v[c]), min_angle_deg(v[a], v[c], v[d]));
      const double q_bd = std::min(min_angle_deg(v[a], v[b], v[d]), min_angle_deg(v[b], v[c], v[d]));
      diag_ac[ii] = q_ac >= q_bd - 1e-9;
      diag_ac[per_block - 1 - ii] = !diag_ac[ii];
    }
    for (int i = 0; i < C; ++i) {
      const int j = (i + 1) % C;
      const int a = lo[i], b = lo[j], c = hi[j], d = hi[i];
      if (diag_ac[i % per_block]) {
        tri(a, b, c, r);
        tri(a, c, d, r);
      } else {
        tri(a, b, d, r);
        tri(b, c, d, r);
      }
    }
  }

  // 1:2 transition between a row of C nodes and a row of 2C nodes.
  void transition(const std::vector<int> &lo, const std::vector<int> &hi, Region r) {
    const int C = static_cast<int>(lo.size());
    for (int i = 0; i < C; ++i) {
      const int a = lo[i], b = lo[(i + 1) % C];
      const int A = hi[2 * i], M = hi[2 * i + 1], B = hi[(2 * i + 2) % (2 * C)];
      tri(a, b, M, r);
      tri(a, M, A, r);
      tri(b, B, M, r);
    }
  }

  MembraneMesh &mesh() { return mesh_; }

 private:
  InterfaceSpec spec_;
  int n_;
  MembraneMesh mesh_;
};

}  // namespace

CellMesh build_cell_mesh(const InterfaceSpec &spec, double h) {
  spec.validate();
  if (!(h > 0.0) || h > 0.25) throw MeshQualityFailure("build_cell_mesh: target edge length must lie in (0, 0.25]");
  if (spec.center != Vec2{0.5, 0.5}) throw std::invalid_argument("build_cell_mesh: interface must be centred in the cell");

  const double r = spec.radius;
  // Small circles: the cell boundary, not the circle, limits the node count.
  const bool graded = 1.0 / (std::numbers::pi * r) > 2.0;
  int N = interface_node_count(r, h);
  if (graded) N = std::max(N, 8 * static_cast<int>(std::ceil(2.0 / h / 8.0 - 1e-12)));
  const int q = N / 4;
  const double hc = 2.0 * std::numbers::pi * r / N;

  // Core square of half-width r/2, inner ring out to the circle, then an
  // outer ring to the cell boundary that doubles its tangential resolution
  // half way out.
  const double core = 0.5 * r;
  const int rings_in = std::max(1, static_cast<int>(std::lround((r - core) / (0.75 * hc))));
  const double mean_gap = 0.5 * (0.5 + 0.5 * std::numbers::sqrt2) - r;
  // Blend parameters of the outer rings. Uniform spacing while the circle and
  // the square have comparable node spacing; otherwise the radial step tracks
  // the local tangential spacing so the elements stay shape regular.
  std::vector<double> ts;
  int transition_after = 0;
  if (!graded) {
    const int rings_out = std::max(2, static_cast<int>(std::lround(mean_gap / hc)));
    transition_after = std::max(0, rings_out / 2 - 1);
    for (int ring = 1; ring <= rings_out; ++ring) ts.push_back(static_cast<double>(ring) / rings_out);
  } else {
    const auto march = [&](double t0, double t1, int count) {
      std::vector<double> out;
      for (double t = t0; t < t1;) {
        const double spacing = ((1.0 - t) * 2.0 * std::numbers::pi * r + t * 4.0) / count;
        t += spacing / mean_gap;
        out.push_back(t);
      }
      const double scale = (t1 - t0) / (out.back() - t0);
      for (double &t : out) t = t0 + (t - t0) * scale;
      return out;
    };
    ts = march(0.0, 0.5, N);
    transition_after = static_cast<int>(ts.size());
    for (double t : march(0.5, 1.0, 2 * N)) ts.push_back(t);
  }
  const int rings_out = static_cast<int>(ts.size());

  CellBuilder B(spec, N);

  // Core grid (q+1) x (q+1), union-jack triangulation.
  std::vector<int> grid((q + 1) * (q + 1));
  const auto gid = [&](int I, int J) -> int & { return grid[J * (q + 1) + I]; };
  for (int J = 0; J <= q; ++J)
    for (int I = 0; I <= q; ++I)
      gid(I, J) = B.add(spec.center + Vec2{-core + 2.0 * core * I / q, -core + 2.0 * core * J / q});
  for (int J = 0; J < q; ++J) {
    for (int I = 0; I < q; ++I) {
      const int a = gid(I, J), b = gid(I + 1, J), c = gid(I + 1, J + 1), d = gid(I, J + 1);
      if ((I < q / 2) == (J < q / 2)) {
        B.tri(a, b, c, Region::Minus);
        B.tri(a, c, d, Region::Minus);
      } else {
        B.tri(a, b, d, Region::Minus);
        B.tri(b, c, d, Region::Minus);
      }
    }
  }

  // Core boundary in ring order, starting at (core, 0) and turning CCW.
  std::vector<int> row(N);
  for (int i = 0; i < N; ++i) {
    const int b = i / q, s = i % q;
    // Block-0 grid indices, then rotated b quarter turns in index space.
    int I = s <= q / 2 ? q : q / 2 + (q - s);
    int J = s <= q / 2 ? q / 2 + s : q;
    for (int k = 0; k < b; ++k) {
      const int In = q - J, Jn = I;
      I = In;
      J = Jn;
    }
    row[i] = gid(I, J);
  }

  const auto inner_curve = [&](double s) { return square_path(core, s); };
  const auto circle_curve = [&](double s) { return arc_point(r, s); };
  const auto outer_curve = [&](double s) { return square_path(0.5, s); };

  for (int ring = 1; ring <= rings_in; ++ring) {
    const double t = static_cast<double>(ring) / rings_in;
    std::vector<int> next(N);
    for (int i = 0; i < N; ++i) next[i] = B.add(B.blend(4.0 * i / N, t, inner_curve, circle_curve));
    B.strip(row, next, Region::Minus);
    row = std::move(next);
  }
  const std::vector<int> minus_copies = row;

  std::vector<int> plus_copies(N);
  for (int i = 0; i < N; ++i) plus_copies[i] = B.add(B.mesh().vertices[minus_copies[i]]);

  row = plus_copies;
  const int M = N / 2;  // segments per cell side
  for (int ring = 1; ring <= rings_out; ++ring) {
    const double t = ts[ring - 1];
    const int count = ring > transition_after ? 2 * N : N;
    std::vector<int> next(count);
    for (int i = 0; i < count; ++i) {
      Vec2 p = B.blend(4.0 * i / count, t, circle_curve, outer_curve);
      if (ring == rings_out) {
        // Snap to the shared side table so opposite sides match bit for bit.
        const auto snap = [M](double c) { return static_cast<double>(std::lround(c * M)) / M; };
        if (std::fabs(p.x) < 1e-9 || std::fabs(p.x - 1.0) < 1e-9) {
          p.x = std::round(p.x);
          p.y = snap(p.y);
        } else {
          p.y = std::round(p.y);
          p.x = snap(p.x);
        }
      }
      next[i] = B.add(p);
    }
    if (count == static_cast<int>(row.size()))
      B.strip(row, next, Region::Plus);
    else
      B.transition(row, next, Region::Plus);
    row = std::move(next);
  }

  CellMesh out;
  out.spec = spec;
  out.interface_nodes = N;
  out.side_segments = M;
  MembraneMesh &mesh = B.mesh();
  mesh.h = h;
  mesh.scale = 1.0;
  mesh.reference = mesh.vertices;
  for (int i = 0; i < N; ++i) mesh.interface_pairs.push_back({plus_copies[i], minus_copies[i]});
  for (int i = 0; i < N; ++i) mesh.interface_segments.push_back({i, (i + 1) % N});
  mesh.boundary_nodes = row;
  std::sort(mesh.boundary_nodes.begin(), mesh.boundary_nodes.end());

  const auto &v = mesh.vertices;
  for (int id : row) {
    const Vec2 p = v[id];
    if (p.y == 0.0) out.sides[0].push_back(id);
    if (p.x == 1.0) out.sides[1].push_back(id);
    if (p.y == 1.0) out.sides[2].push_back(id);
    if (p.x == 0.0) out.sides[3].push_back(id);
  }
  std::sort(out.sides[0].begin(), out.sides[0].end(), [&](int a, int b) { return v[a].x < v[b].x; });
  std::sort(out.sides[1].begin(), out.sides[1].end(), [&](int a, int b) { return v[a].y < v[b].y; });
  std::sort(out.sides[2].begin(), out.sides[2].end(), [&](int a, int b) { return v[a].x < v[b].x; });
  std::sort(out.sides[3].begin(), out.sides[3].end(), [&](int a, int b) { return v[a].y < v[b].y; });
  for (const auto &side : out.sides)
    if (static_cast<int>(side.size()) != M + 1) throw MeshQualityFailure("build_cell_mesh: inconsistent cell sides");

  out.mesh = std::move(mesh);
  const MeshReport report = mesh_report(out.mesh);
  if (!report.ok()) {
    std::string msg = "build_cell_mesh: quality check failed (min angle " + std::to_string(report.min_angle_deg) + ")";
    for (const auto &issue : report.issues) msg += "; " + issue;
    throw MeshQualityFailure(msg);
  }
  return out;
}

namespace {

enum class NodeClass : std::uint8_t { Interior, Corner, Bottom, Right, Top, Left };

struct LocalNode {
  NodeClass cls = NodeClass::Interior;
  int index = 0;  // corner id (0..3, CCW from (0,0)) or position along the side
};

std::vector<LocalNode> classify(const CellMesh &cell) {
  const auto &mesh = cell.mesh;
  std::vector<LocalNode> out(mesh.num_nodes());
  const int M = cell.side_segments;
  const std::array<NodeClass, 4> cls{NodeClass::Bottom, NodeClass::Right, NodeClass::Top, NodeClass::Left};
  for (int s = 0; s < 4; ++s)
    for (int m = 1; m < M; ++m) out[cell.sides[s][m]] = {cls[s], m};
  out[cell.sides[0][0]] = {NodeClass::Corner, 0};
  out[cell.sides[0][M]] = {NodeClass::Corner, 1};
  out[cell.sides[2][M]] = {NodeClass::Corner, 2};
  out[cell.sides[2][0]] = {NodeClass::Corner, 3};
  return out;
}

}  // namespace

MembraneMesh tile_cells(const CellMesh &cell, const DeformationMap &map, CellIndex lo, int nx, int ny,
                        double scale, const std::function<bool(CellIndex)> &has_membrane) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("tile_cells: empty cell box");
  if (!map.preserves_cells()) throw std::invalid_argument("tile_cells: map must fix cell boundaries");
  const MembraneMesh &ref = cell.mesh;
  const int M = cell.side_segments;
  const std::vector<LocalNode> local = classify(cell);

  // Minus copy -> plus copy, used to merge membranes away.
  std::vector<int> merged(ref.num_nodes());
  for (std::size_t i = 0; i < merged.size(); ++i) merged[i] = static_cast<int>(i);
  for (const auto &pair : ref.interface_pairs) merged[pair[1]] = pair[0];

  std::vector<int> lattice((nx + 1) * (ny + 1), -1);
  std::vector<int> hedges(static_cast<std::size_t>(nx) * (ny + 1) * (M - 1), -1);
  std::vector<int> vedges(static_cast<std::size_t>(nx + 1) * ny * (M - 1), -1);

  MembraneMesh out;
  out.h = ref.h;
  out.scale = scale;
  std::vector<int> ids(ref.num_nodes());

  for (int cj = 0; cj < ny; ++cj) {
    for (int ci = 0; ci < nx; ++ci) {
      const CellIndex k{lo.x + ci, lo.y + cj};
      const bool membrane = has_membrane(k);
      std::fill(ids.begin(), ids.end(), -1);

      for (std::size_t ln = 0; ln < ref.num_nodes(); ++ln) {
        if (!membrane && merged[ln] != static_cast<int>(ln)) continue;
        const Vec2 y = ref.vertices[ln];
        const Vec2 phys = scale * map.apply_in_cell(k, y);
        const Vec2 refpos{k.x + y.x, k.y + y.y};

        int *slot = nullptr;
        const LocalNode &c = local[ln];
        switch (c.cls) {
          case NodeClass::Interior: break;
          case NodeClass::Corner: {
            const int dx = (c.index == 1 || c.index == 2) ? 1 : 0;
            const int dy = (c.index >= 2) ? 1 : 0;
            slot = &lattice[(cj + dy) * (nx + 1) + (ci + dx)];
            break;
          }
          case NodeClass::Bottom:
          case NodeClass::Top: {
            const int row = cj + (c.cls == NodeClass::Top ? 1 : 0);
            slot = &hedges[(static_cast<std::size_t>(row) * nx + ci) * (M - 1) + (c.index - 1)];
            break;
          }
          case NodeClass::Left:
          case NodeClass::Right: {
            const int col = ci + (c.cls == NodeClass::Right ? 1 : 0);
            slot = &vedges[(static_cast<std::size_t>(cj) * (nx + 1) + col) * (M - 1) + (c.index - 1)];
            break;
          }
        }

        if (slot && *slot >= 0) {
          const Vec2 d = out.vertices[*slot] - phys;
          if (std::fabs(d.x) > 1e-12 || std::fabs(d.y) > 1e-12)
            throw StitchFailure("tile_cells: shared boundary node of cell (" + std::to_string(k.x) + "," +
                                std::to_string(k.y) + ") disagrees with its neighbour");
          ids[ln] = *slot;
          continue;
        }
        const int id = static_cast<int>(out.vertices.size());
        out.vertices.push_back(phys);
        out.reference.push_back(refpos);
        ids[ln] = id;
        if (slot) *slot = id;
      }
      if (!membrane)
        for (std::size_t ln = 0; ln < ref.num_nodes(); ++ln) ids[ln] = ids[merged[ln]];

      for (std::size_t t = 0; t < ref.num_triangles(); ++t) {
        const auto &tri = ref.triangles[t];
        out.triangles.push_back({ids[tri[0]], ids[tri[1]], ids[tri[2]]});
        out.regions.push_back(membrane ? ref.regions[t] : Region::Plus);
        out.triangle_cells.push_back(k);
      }
      if (membrane) {
        const int base = static_cast<int>(out.interface_pairs.size());
        for (const auto &pair : ref.interface_pairs) out.interface_pairs.push_back({ids[pair[0]], ids[pair[1]]});
        for (const auto &seg : ref.interface_segments) out.interface_segments.push_back({base + seg[0], base + seg[1]});
      }
    }
  }

  // Outer boundary of the cell box.
  for (int i = 0; i <= nx; ++i) {
    out.boundary_nodes.push_back(lattice[i]);
    out.boundary_nodes.push_back(lattice[ny * (nx + 1) + i]);
  }
  for (int j = 0; j <= ny; ++j) {
    out.boundary_nodes.push_back(lattice[j * (nx + 1)]);
    out.boundary_nodes.push_back(lattice[j * (nx + 1) + nx]);
  }
  for (int i = 0; i < nx; ++i)
    for (int m = 0; m < M - 1; ++m) {
      out.boundary_nodes.push_back(hedges[static_cast<std::size_t>(i) * (M - 1) + m]);
      out.boundary_nodes.push_back(hedges[(static_cast<std::size_t>(ny) * nx + i) * (M - 1) + m]);
    }
  for (int j = 0; j < ny; ++j)
    for (int m = 0; m < M - 1; ++m) {
      out.boundary_nodes.push_back(vedges[(static_cast<std::size_t>(j) * (nx + 1)) * (M - 1) + m]);
      out.boundary_nodes.push_back(vedges[(static_cast<std::size_t>(j) * (nx + 1) + nx) * (M - 1) + m]);
    }
  std::sort(out.boundary_nodes.begin(), out.boundary_nodes.end());
  out.boundary_nodes.erase(std::unique(out.boundary_nodes.begin(), out.boundary_nodes.end()), out.boundary_nodes.end());
  return out;
}

bool cell_keeps_membrane(CellIndex k, int cells_per_side, double margin) {
  const double n = cells_per_side;
  const double dist = std::min({static_cast<double>(k.x), static_cast<double>(k.y), n - (k.x + 1.0), n - (k.y + 1.0)});
  return dist >= margin;
}

MembraneMesh tile_domain_mesh(const CellMesh &cell, const DeformationMap &map, double eps, MembraneRule rule) {
  if (!(eps > 0.0)) throw std::invalid_argument("tile_domain_mesh: eps must be positive");
  const long n = std::lround(1.0 / eps);
  if (n < 1 || std::fabs(n * eps - 1.0) > 1e-9) throw std::invalid_argument("tile_domain_mesh: 1/eps must be an integer");
  const int cells = static_cast<int>(n);
  const double margin = cell.spec.margin();
  const auto predicate = [&](CellIndex k) {
    switch (rule) {
      case MembraneRule::All: return true;
      case MembraneRule::None: return false;
      default: return cell_keeps_membrane(k, cells, margin);
    }
  };
  return tile_cells(cell, map, {0, 0}, cells, cells, 1.0 / cells, predicate);
}

MembraneMesh build_truncated_mesh(const CellMesh &cell, const DeformationMap &map, int n, CellIndex offset,
                                  bool membranes) {
  if (n < 1) throw std::invalid_argument("build_truncated_mesh: n must be at least 1");
  return tile_cells(cell, map, {offset.x - n, offset.y - n}, 2 * n, 2 * n, 1.0,
                    [membranes](CellIndex) { return membranes; });
}

MembraneMesh build_square_mesh(int n) {
  if (n < 1) throw std::invalid_argument("build_square_mesh: n must be positive");
  MembraneMesh m;
  m.h = 1.0 / n;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) m.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  m.reference = m.vertices;
  const auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (square_main_diagonal(n, i, j)) {
        m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      } else {
        m.triangles.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
        m.triangles.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
      }
      m.regions.push_back(Region::Plus);
      m.regions.push_back(Region::Plus);
      m.triangle_cells.push_back({0, 0});
      m.triangle_cells.push_back({0, 0});
    }
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      if (i == 0 || j == 0 || i == n || j == n) m.boundary_nodes.push_back(id(i, j));
  return m;
}

MeshReport mesh_report(const MembraneMesh &mesh) {
  if (mesh.triangles.empty() || mesh.vertices.empty()) throw MeshQualityFailure("mesh_report: empty mesh");
  MeshReport rep;
  const auto &v = mesh.vertices;

  rep.min_angle_deg = 180.0;
  rep.oriented = true;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto &tri = mesh.triangles[t];
    const Vec2 a = v[tri[0]], b = v[tri[1]], c = v[tri[2]];
    const double area2 = cross(b - a, c - a);
    if (!(area2 > 0.0)) rep.oriented = false;
    rep.min_angle_deg = std::min(rep.min_angle_deg, min_angle_deg(a, b, c));
    const double la = norm(b - c), lb = norm(c - a), lc = norm(a - b);
    const double inradius = std::fabs(area2) / (la + lb + lc);
    const double longest = std::max({la, lb, lc});
    rep.max_aspect = std::max(rep.max_aspect, longest / (2.0 * std::sqrt(3.0) * inradius));
  }
  if (!rep.oriented) rep.issues.push_back("non-positive triangle orientation");

  for (const auto &pair : mesh.interface_pairs)
    rep.pairing_residual = std::max(rep.pairing_residual, norm(v[pair[0]] - v[pair[1]]));
  if (rep.pairing_residual > 1e-12) rep.issues.push_back("paired interface nodes do not coincide");

  // Edge census.
  struct EdgeUse {
    std::uint64_t key;
    int tri;
  };
  const auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  };
  std::vector<EdgeUse> uses;
  uses.reserve(3 * mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto &tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) uses.push_back({key(tri[e], tri[(e + 1) % 3]), static_cast<int>(t)});
  }
  std::sort(uses.begin(), uses.end(), [](const EdgeUse &a, const EdgeUse &b) {
    return a.key != b.key ? a.key < b.key : a.tri < b.tri;
  });

  std::unordered_map<std::uint64_t, int> interface_edges;  // key -> +1 plus side, -1 minus side
  for (const auto &seg : mesh.interface_segments) {
    const auto &pa = mesh.interface_pairs[seg[0]];
    const auto &pb = mesh.interface_pairs[seg[1]];
    interface_edges[key(pa[0], pb[0])] = 1;
    interface_edges[key(pa[1], pb[1])] = -1;
  }
  std::vector<bool> on_boundary(mesh.num_nodes(), false);
  for (int b : mesh.boundary_nodes) on_boundary[b] = true;

  rep.conforming = true;
  std::size_t matched_interface = 0;
  for (std::size_t i = 0; i < uses.size();) {
    std::size_t j = i;
    while (j < uses.size() && uses[j].key == uses[i].key) ++j;
    const std::size_t count = j - i;
    const int a = static_cast<int>(uses[i].key >> 32);
    const int b = static_cast<int>(uses[i].key & 0xffffffffu);
    if (count > 2) {
      rep.conforming = false;
      rep.issues.push_back("edge shared by more than two triangles");
    } else if (count == 2) {
      if (mesh.regions[uses[i].tri] != mesh.regions[uses[i + 1].tri]) {
        rep.conforming = false;
        rep.issues.push_back("PLUS and MINUS triangles share an edge without a membrane");
      }
    } else {
      const auto it = interface_edges.find(uses[i].key);
      if (it != interface_edges.end()) {
        const Region expected = it->second > 0 ? Region::Plus : Region::Minus;
        if (mesh.regions[uses[i].tri] != expected) {
          rep.conforming = false;
          rep.issues.push_back("interface edge carried by the wrong region");
        }
        ++matched_interface;
      } else if (!(on_boundary[a] && on_boundary[b])) {
        rep.conforming = false;
        rep.issues.push_back("dangling edge away from the boundary");
      }
    }
    i = j;
  }
  if (matched_interface != 2 * mesh.interface_segments.size()) {
    rep.conforming = false;
    rep.issues.push_back("interface segment without both side edges");
  }

  // MINUS region must lie on the left of every oriented segment.
  rep.normals_consistent = true;
  std::unordered_map<std::uint64_t, int> minus_tri_of_edge;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.regions[t] != Region::Minus) continue;
    const auto &tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) minus_tri_of_edge[key(tri[e], tri[(e + 1) % 3])] = static_cast<int>(t);
  }
  for (const auto &seg : mesh.interface_segments) {
    const int a = mesh.interface_pairs[seg[0]][1], b = mesh.interface_pairs[seg[1]][1];
    const auto it = minus_tri_of_edge.find(key(a, b));
    if (it == minus_tri_of_edge.end()) {
      rep.normals_consistent = false;
      continue;
    }
    const auto &tri = mesh.triangles[it->second];
    int other = tri[0];
    for (int x : tri)
      if (x != a && x != b) other = x;
    if (!(cross(v[b] - v[a], v[other] - v[a]) > 0.0)) rep.normals_consistent = false;
  }
  if (!rep.normals_consistent) rep.issues.push_back("interface orientation inconsistent with MINUS side");

  std::sort(rep.issues.begin(), rep.issues.end());
  rep.issues.erase(std::unique(rep.issues.begin(), rep.issues.end()), rep.issues.end());
  return rep;
}

}  // namespace mhom
