#include "surfrec/grid_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace surfrec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormatName = "surfrec-grid";
constexpr int kFormatVersion = 1;

const std::vector<std::pair<std::string, std::vector<std::string>>>& known_layouts() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> layouts{
      {std::string(FieldTraits<double>::tag), FieldTraits<double>::components()},
      {std::string(FieldTraits<Vec3d>::tag), FieldTraits<Vec3d>::components()},
      {std::string(FieldTraits<SymMat2d>::tag), FieldTraits<SymMat2d>::components()},
      {std::string(FieldTraits<SkewMat3d>::tag), FieldTraits<SkewMat3d>::components()},
      {std::string(FieldTraits<Mat3d>::tag), FieldTraits<Mat3d>::components()},
      {std::string(FieldTraits<Christoffel>::tag), FieldTraits<Christoffel>::components()},
  };
  return layouts;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& path, int line) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && *begin == ' ') ++begin;
  double v = 0.0;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    std::ostringstream os;
    os << path << ":" << line << ": cannot parse number '" << s << "'";
    throw FormatError(os.str());
  }
  return v;
}

std::string header_path(const std::string& stem) {
  fs::path p(stem);
  if (p.extension() == ".json") return p.string();
  return p.string() + ".json";
}

void check_raw(const RawGrid& raw) {
  raw.spec.validate();
  if (raw.components.empty() || raw.data.size() != raw.spec.size() * raw.components.size())
    throw FormatError("grid payload size does not match grid dimensions and component count");
}

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return r;
  }
  return v;
}

}  // namespace

void write_csv_raw(const std::string& path, const RawGrid& raw) {
  check_raw(raw);
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open '" + path + "' for writing");
  os << "i,j,x,y";
  for (const auto& c : raw.components) os << ',' << c;
  os << '\n';
  const std::size_t nc = raw.components.size();
  char buf[128];
  for (int j = 0; j < raw.spec.ny; ++j) {
    for (int i = 0; i < raw.spec.nx; ++i) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g", i, j, raw.spec.x(i), raw.spec.y(j));
      os << buf;
      const std::size_t k = (static_cast<std::size_t>(j) * raw.spec.nx + i) * nc;
      for (std::size_t c = 0; c < nc; ++c) {
        std::snprintf(buf, sizeof buf, ",%.17g", raw.data[k + c]);
        os << buf;
      }
      os << '\n';
    }
  }
  if (!os) throw ValidationError("failed writing '" + path + "'");
}

RawGrid read_csv_raw(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open grid file '" + path + "'");
  std::string line;
  if (!std::getline(is, line)) throw FormatError(path + ": empty file");
  const std::vector<std::string> head = split(line, ',');
  if (head.size() < 5 || head[0] != "i" || head[1] != "j" || head[2] != "x" || head[3] != "y")
    throw FormatError(path + ": header must start with i,j,x,y");
  RawGrid raw;
  raw.components.assign(head.begin() + 4, head.end());
  for (const auto& [tag, comps] : known_layouts())
    if (comps == raw.components) raw.type = tag;
  if (raw.type.empty()) throw FormatError(path + ": unrecognised component columns");

  struct Row {
    int i, j;
    double x, y;
    std::vector<double> v;
  };
  std::vector<Row> rows;
  int lineno = 1;
  int nx = 0, ny = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != head.size()) {
      std::ostringstream os;
      os << path << ":" << lineno << ": expected " << head.size() << " columns, found " << cells.size();
      throw FormatError(os.str());
    }
    Row r;
    const double di = parse_double(cells[0], path, lineno);
    const double dj = parse_double(cells[1], path, lineno);
    r.i = static_cast<int>(di);
    r.j = static_cast<int>(dj);
    if (r.i != di || r.j != dj || r.i < 0 || r.j < 0) throw FormatError(path + ": bad node index");
    r.x = parse_double(cells[2], path, lineno);
    r.y = parse_double(cells[3], path, lineno);
    for (std::size_t c = 4; c < cells.size(); ++c) r.v.push_back(parse_double(cells[c], path, lineno));
    nx = std::max(nx, r.i + 1);
    ny = std::max(ny, r.j + 1);
    rows.push_back(std::move(r));
  }
  if (rows.size() != static_cast<std::size_t>(nx) * ny) throw FormatError(path + ": node set is not a full grid");
  const std::size_t nc = raw.components.size();
  raw.data.assign(rows.size() * nc, std::nan(""));
  std::vector<double> xs(nx, std::nan("")), ys(ny, std::nan(""));
  std::vector<char> seen(rows.size(), 0);
  for (const Row& r : rows) {
    const std::size_t k = static_cast<std::size_t>(r.j) * nx + r.i;
    if (seen[k]) throw FormatError(path + ": duplicate node");
    seen[k] = 1;
    std::copy(r.v.begin(), r.v.end(), raw.data.begin() + k * nc);
    xs[r.i] = r.x;
    ys[r.j] = r.y;
  }
  if (nx < 3 || ny < 3) throw FormatError(path + ": grid needs at least 3 nodes per direction");
  const double h = (xs[nx - 1] - xs[0]) / (nx - 1);
  raw.spec = {xs[0], ys[0], h, nx, ny};
  const double tol = 1e-9 * std::max({1.0, std::abs(xs[0]), std::abs(ys[0])});
  for (const Row& r : rows) {
    if (std::abs(r.x - raw.spec.x(r.i)) > tol || std::abs(r.y - raw.spec.y(r.j)) > tol)
      throw FormatError(path + ": node coordinates are not on a uniform grid with equal spacing");
  }
  check_raw(raw);
  return raw;
}

void write_binary_raw(const std::string& stem, const RawGrid& raw) {
  check_raw(raw);
  const fs::path head = header_path(stem);
  fs::path bin = head;
  bin.replace_extension(".bin");
  json j;
  j["format"] = kFormatName;
  j["version"] = kFormatVersion;
  j["type"] = raw.type;
  j["grid"] = {{"x0", raw.spec.x0}, {"y0", raw.spec.y0}, {"h", raw.spec.h}, {"nx", raw.spec.nx}, {"ny", raw.spec.ny}};
  j["components"] = raw.components;
  j["order"] = "node-major; i fastest, then j; components of a node contiguous";
  j["payload"] = {{"file", bin.filename().string()}, {"encoding", "float64-le"}, {"count", raw.data.size()}};
  {
    std::ofstream os(head);
    if (!os) throw ValidationError("cannot open '" + head.string() + "' for writing");
    os << j.dump(2) << '\n';
  }
  std::ofstream os(bin, std::ios::binary);
  if (!os) throw ValidationError("cannot open '" + bin.string() + "' for writing");
  for (double v : raw.data) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    u = to_le(u);
    os.write(reinterpret_cast<const char*>(&u), sizeof u);
  }
  if (!os) throw ValidationError("failed writing '" + bin.string() + "'");
}

RawGrid read_binary_raw(const std::string& stem) {
  const fs::path head = header_path(stem);
  std::ifstream is(head);
  if (!is) throw FormatError("cannot open grid header '" + head.string() + "'");
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw FormatError(head.string() + ": malformed JSON (" + e.what() + ")");
  }
  RawGrid raw;
  fs::path bin;
  try {
    if (j.at("format").get<std::string>() != kFormatName) throw FormatError(head.string() + ": not a surfrec grid");
    if (j.at("version").get<int>() != kFormatVersion) throw FormatError(head.string() + ": unsupported version");
    raw.type = j.at("type").get<std::string>();
    const json& g = j.at("grid");
    raw.spec = {g.at("x0").get<double>(), g.at("y0").get<double>(), g.at("h").get<double>(), g.at("nx").get<int>(),
                g.at("ny").get<int>()};
    raw.components = j.at("components").get<std::vector<std::string>>();
    const json& p = j.at("payload");
    if (p.at("encoding").get<std::string>() != "float64-le") throw FormatError(head.string() + ": unknown encoding");
    bin = head.parent_path() / p.at("file").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError(head.string() + ": missing or mistyped header field (" + e.what() + ")");
  }
  try {
    raw.spec.validate();
  } catch (const ValidationError& e) {
    throw FormatError(head.string() + ": " + e.what());
  }
  const std::size_t count = raw.spec.size() * raw.components.size();
  std::ifstream bs(bin, std::ios::binary | std::ios::ate);
  if (!bs) throw FormatError("cannot open payload '" + bin.string() + "'");
  if (static_cast<std::size_t>(bs.tellg()) != count * sizeof(double))
    throw FormatError(bin.string() + ": payload size does not match the header");
  bs.seekg(0);
  raw.data.resize(count);
  for (double& v : raw.data) {
    std::uint64_t u;
    bs.read(reinterpret_cast<char*>(&u), sizeof u);
    u = to_le(u);
    std::memcpy(&v, &u, sizeof v);
  }
  if (!bs) throw FormatError(bin.string() + ": short read");
  return raw;
}

void write_grid_raw(const std::string& path, const RawGrid& raw) {
  if (fs::path(path).extension() == ".csv")
    write_csv_raw(path, raw);
  else
    write_binary_raw(path, raw);
}

RawGrid read_grid_raw(const std::string& path) {
  if (fs::path(path).extension() == ".csv") return read_csv_raw(path);
  return read_binary_raw(path);
}

}  // namespace surfrec
