#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "zamr/errors.hpp"
#include "zamr/harness.hpp"

namespace zamr {

namespace {

constexpr int kVtkQuad = 9;
constexpr int kVtkHexahedron = 12;

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return os;
}

void check_written(std::ostream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

// Corner offsets in VTK quad / hexahedron order.
constexpr std::array<std::array<int, 3>, 8> kCorners{{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
}};

}  // namespace

std::vector<CellRecord> cell_records(const Forest& f, const FieldArray& u, const Fluids& fp, const PartitionMap& pm) {
  if (u.size() != f.size()) throw ContractError("field size does not match the forest");
  std::vector<CellRecord> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Thermo<double> t = thermo(u[i], fp);
    const Velocity<double> v = velocity(u[i]);
    out[i] = {u[i][kRho], u[i][kRhoY] / u[i][kRho], t.alpha, t.pressure, {v[0], v[1], v[2]}, f.leaf(i).level,
              pm.owner(i)};
  }
  return out;
}

void write_vtk(std::ostream& os, const Forest& f, const FieldArray& u, const Fluids& fp, const PartitionMap& pm) {
  const std::vector<CellRecord> rec = cell_records(f, u, fp, pm);
  const int dim = f.dim();
  const std::size_t nc = dim == 2 ? 4 : 8;
  const std::size_t n = f.size();
  os.precision(17);
  os << "# vtk DataFile Version 3.0\nzamr forest\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << n * nc << " double\n";
  for (std::size_t i = 0; i < n; ++i) {
    const CellGeometry g = cell_geometry(f, i);
    for (std::size_t c = 0; c < nc; ++c) {
      for (int k = 0; k < 3; ++k) {
        const double x = k < dim ? g.center[k] + (kCorners[c][k] - 0.5) * g.dx : 0.0;
        os << x << (k < 2 ? ' ' : '\n');
      }
    }
  }
  os << "CELLS " << n << ' ' << n * (nc + 1) << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    os << nc;
    for (std::size_t c = 0; c < nc; ++c) os << ' ' << i * nc + c;
    os << '\n';
  }
  os << "CELL_TYPES " << n << '\n';
  for (std::size_t i = 0; i < n; ++i) os << (dim == 2 ? kVtkQuad : kVtkHexahedron) << '\n';

  os << "CELL_DATA " << n << '\n';
  auto scalar = [&](const char* name, const char* type, auto get) {
    os << "SCALARS " << name << ' ' << type << " 1\nLOOKUP_TABLE default\n";
    for (const CellRecord& r : rec) os << get(r) << '\n';
  };
  scalar("rho", "double", [](const CellRecord& r) { return r.rho; });
  scalar("Y", "double", [](const CellRecord& r) { return r.y; });
  scalar("alpha", "double", [](const CellRecord& r) { return r.alpha; });
  scalar("p", "double", [](const CellRecord& r) { return r.p; });
  os << "VECTORS u double\n";
  for (const CellRecord& r : rec) os << r.u[0] << ' ' << r.u[1] << ' ' << r.u[2] << '\n';
  scalar("level", "int", [](const CellRecord& r) { return r.level; });
  scalar("rank", "int", [](const CellRecord& r) { return r.rank; });
}

void write_vtk(const std::filesystem::path& path, const Forest& f, const FieldArray& u, const Fluids& fp,
               const PartitionMap& pm) {
  std::ofstream os = open_out(path);
  write_vtk(os, f, u, fp, pm);
  check_written(os, path);
}

const std::vector<double>* VtkData::scalar(const std::string& name) const {
  for (const auto& [n, v] : scalars) {
    if (n == name) return &v;
  }
  return nullptr;
}

VtkData read_vtk(std::istream& is) {
  auto fail = [](const std::string& what) -> void { throw std::runtime_error("malformed VTK file: " + what); };
  std::string line;
  if (!std::getline(is, line) || line.rfind("# vtk DataFile", 0) != 0) fail("missing header");
  std::getline(is, line);  // title
  std::string word;
  if (!(is >> word) || word != "ASCII") fail("only ASCII files are supported");
  if (!(is >> word >> line) || word != "DATASET" || line != "UNSTRUCTURED_GRID") fail("expected an unstructured grid");

  VtkData d;
  std::size_t cells_in_data = 0;
  while (is >> word) {
    if (word == "POINTS") {
      std::size_t n = 0;
      is >> n >> word;
      d.points.resize(n);
      for (Point& p : d.points) is >> p[0] >> p[1] >> p[2];
    } else if (word == "CELLS") {
      std::size_t n = 0, total = 0;
      is >> n >> total;
      d.cells.resize(n);
      for (auto& c : d.cells) {
        std::size_t k = 0;
        is >> k;
        c.resize(k);
        for (std::size_t& v : c) is >> v;
      }
    } else if (word == "CELL_TYPES") {
      std::size_t n = 0;
      is >> n;
      d.cell_types.resize(n);
      for (int& t : d.cell_types) is >> t;
    } else if (word == "CELL_DATA") {
      is >> cells_in_data;
    } else if (word == "SCALARS") {
      std::string name, type;
      int comps = 1;
      is >> name >> type >> comps;
      is >> word >> line;  // LOOKUP_TABLE default
      if (comps != 1 || word != "LOOKUP_TABLE") fail("unsupported SCALARS block " + name);
      std::vector<double> v(cells_in_data);
      for (double& x : v) is >> x;
      d.scalars.emplace_back(name, std::move(v));
    } else if (word == "VECTORS") {
      std::string name, type;
      is >> name >> type;
      std::vector<Point> v(cells_in_data);
      for (Point& p : v) is >> p[0] >> p[1] >> p[2];
      d.vectors.emplace_back(name, std::move(v));
    } else {
      fail("unknown section " + word);
    }
    if (!is) fail("truncated section " + word);
  }
  for (const auto& c : d.cells) {
    for (std::size_t v : c) {
      if (v >= d.points.size()) fail("cell references a missing point");
    }
  }
  if (d.cell_types.size() != d.cells.size()) fail("cell type count differs from cell count");
  return d;
}

VtkData read_vtk(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_vtk(is);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_csv_cut(std::ostream& os, const Forest& f, const FieldArray& u, const Fluids& fp, const CutLine& line) {
  const int dim = f.dim();
  Point dir{};
  double len2 = 0.0;
  for (int k = 0; k < dim; ++k) {
    dir[k] = line.to[k] - line.from[k];
    len2 += dir[k] * dir[k];
  }
  if (!(len2 > 0.0)) throw ConfigError("cut line has zero length");
  const double len = std::sqrt(len2);

  struct Hit {
    double t0, t1;
    std::size_t leaf;
  };
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const CellGeometry g = cell_geometry(f, i);
    double t0 = 0.0, t1 = 1.0;
    for (int k = 0; k < dim && t0 <= t1; ++k) {
      const double lo = g.center[k] - g.dx / 2, hi = g.center[k] + g.dx / 2;
      if (dir[k] == 0.0) {
        if (line.from[k] < lo || line.from[k] >= hi) t1 = -1.0;
        continue;
      }
      double a = (lo - line.from[k]) / dir[k];
      double b = (hi - line.from[k]) / dir[k];
      if (a > b) std::swap(a, b);
      t0 = std::max(t0, a);
      t1 = std::min(t1, b);
    }
    // cells touched only at an edge or corner carry no length along the cut
    if (t1 - t0 > 1e-12) hits.push_back({t0, t1, i});
  }
  std::sort(hits.begin(), hits.end(),
            [](const Hit& a, const Hit& b) { return a.t0 != b.t0 ? a.t0 < b.t0 : a.leaf < b.leaf; });

  os.precision(17);
  os << "s,x,y,z,rho,Y,alpha,p,ux,uy,uz,level\n";
  for (const Hit& h : hits) {
    const double t = (h.t0 + h.t1) / 2;
    const StateD& w = u[h.leaf];
    const Thermo<double> th = thermo(w, fp);
    const Velocity<double> v = velocity(w);
    os << t * len;
    for (int k = 0; k < 3; ++k) os << ',' << (k < dim ? line.from[k] + t * dir[k] : 0.0);
    os << ',' << w[kRho] << ',' << w[kRhoY] / w[kRho] << ',' << th.alpha << ',' << th.pressure << ',' << v[0] << ','
       << v[1] << ',' << v[2] << ',' << f.leaf(h.leaf).level << '\n';
  }
}

void write_csv_cut(const std::filesystem::path& path, const Forest& f, const FieldArray& u, const Fluids& fp,
                   const CutLine& line) {
  std::ofstream os = open_out(path);
  write_csv_cut(os, f, u, fp, line);
  check_written(os, path);
}

}  // namespace zamr
