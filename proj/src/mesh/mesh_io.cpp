// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/mesh/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <optional>

#include "flatlift/core/error.hpp"

namespace flatlift::mesh {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorKind::MalformedMesh, what); }

// ---------------------------------------------------------------- PLY

enum class PlyType : std::uint8_t { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<PlyType> ply_type(std::string_view name) {
  if (name == "char" || name == "int8") return PlyType::Int8;
  if (name == "uchar" || name == "uint8") return PlyType::UInt8;
  if (name == "short" || name == "int16") return PlyType::Int16;
  if (name == "ushort" || name == "uint16") return PlyType::UInt16;
  if (name == "int" || name == "int32") return PlyType::Int32;
  if (name == "uint" || name == "uint32") return PlyType::UInt32;
  if (name == "float" || name == "float32") return PlyType::Float32;
  if (name == "double" || name == "float64") return PlyType::Float64;
  return std::nullopt;
}

std::size_t type_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 0;
}

bool is_float(PlyType t) { return t == PlyType::Float32 || t == PlyType::Float64; }

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_number(std::string_view tok) {
  double v = 0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) malformed("bad number '" + std::string(tok) + "'");
  return v;
}

// Pulls scalar values either from whitespace-separated text or from a
// little-endian binary blob.
class PlyReader {
 public:
  PlyReader(std::span<const std::uint8_t> body, bool ascii) : body_(body), ascii_(ascii) {}

  double read(PlyType t) {
    if (ascii_) return read_ascii(t);
    const std::size_t n = type_size(t);
    if (pos_ + n > body_.size()) malformed("binary PLY body is truncated");
    const std::uint8_t* p = body_.data() + pos_;
    pos_ += n;
    switch (t) {
      case PlyType::Int8: return static_cast<std::int8_t>(p[0]);
      case PlyType::UInt8: return p[0];
      case PlyType::Int16: return load<std::int16_t>(p);
      case PlyType::UInt16: return load<std::uint16_t>(p);
      case PlyType::Int32: return load<std::int32_t>(p);
      case PlyType::UInt32: return load<std::uint32_t>(p);
      case PlyType::Float32: return load<float>(p);
      case PlyType::Float64: return load<double>(p);
    }
    return 0;
  }

 private:
  template <typename T>
  static T load(const std::uint8_t* p) {
    T v;
    std::memcpy(&v, p, sizeof v);  // hosts are little-endian
    return v;
  }

  double read_ascii(PlyType t) {
    while (pos_ < body_.size() && std::isspace(body_[pos_])) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < body_.size() && !std::isspace(body_[pos_])) ++pos_;
    if (pos_ == start) malformed("ascii PLY body ends early");
    const double v =
        parse_number({reinterpret_cast<const char*>(body_.data()) + start, pos_ - start});
    if (t == PlyType::Float32) return static_cast<float>(v);
    if (!is_float(t) && v != std::floor(v)) malformed("non-integer value for an integer property");
    return v;
  }

  std::span<const std::uint8_t> body_;
  bool ascii_;
  std::size_t pos_ = 0;
};

std::uint32_t to_index(double v, std::size_t vertex_count) {
  if (!(v >= 0) || v != std::floor(v) || v >= static_cast<double>(vertex_count)) {
    malformed("face index " + std::to_string(static_cast<long long>(v)) + " out of range for " +
              std::to_string(vertex_count) + " vertices");
  }
  return static_cast<std::uint32_t>(v);
}

void add_polygon(TriMesh& mesh, const std::vector<std::uint32_t>& poly) {
  if (poly.size() < 3) malformed("face with fewer than 3 vertices");
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) mesh.triangles.push_back({poly[0], poly[k], poly[k + 1]});
}

std::uint8_t to_channel(double v, PlyType t) {
  if (is_float(t)) v *= 255.0;
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

TriMesh load_ply(std::span<const std::uint8_t> bytes) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  const std::size_t header_end = text.find("end_header");
  if (header_end == std::string_view::npos) malformed("PLY header has no end_header");
  std::size_t body_start = text.find('\n', header_end);
  if (body_start == std::string_view::npos) malformed("PLY header is truncated");
  ++body_start;

  bool ascii = false, have_format = false;
  std::vector<PlyElement> elements;
  std::size_t line_start = 0;
  while (line_start < header_end) {
    std::size_t nl = text.find('\n', line_start);
    const auto tokens = split_ws(text.substr(line_start, nl - line_start));
    line_start = nl + 1;
    if (tokens.empty() || tokens[0] == "ply" || tokens[0] == "comment" || tokens[0] == "obj_info") continue;
    if (tokens[0] == "format") {
      if (tokens.size() < 2) malformed("bad PLY format line");
      if (tokens[1] == "ascii") ascii = true;
      else if (tokens[1] == "binary_little_endian") ascii = false;
      else throw Error(ErrorKind::MalformedMesh, "unsupported PLY format " + std::string(tokens[1]));
      have_format = true;
    } else if (tokens[0] == "element") {
      if (tokens.size() != 3) malformed("bad PLY element line");
      const double count = parse_number(tokens[2]);
      if (count < 0 || count != std::floor(count)) malformed("bad PLY element count");
      elements.push_back({std::string(tokens[1]), static_cast<std::size_t>(count), {}});
    } else if (tokens[0] == "property") {
      if (elements.empty()) malformed("PLY property before any element");
      PlyProperty p;
      if (tokens.size() == 5 && tokens[1] == "list") {
        const auto ct = ply_type(tokens[2]), it = ply_type(tokens[3]);
        if (!ct || !it || is_float(*ct)) malformed("bad PLY list property types");
        p.is_list = true;
        p.count_type = *ct;
        p.type = *it;
        p.name = tokens[4];
      } else if (tokens.size() == 3) {
        const auto t = ply_type(tokens[1]);
        if (!t) malformed("unknown PLY property type " + std::string(tokens[1]));
        p.type = *t;
        p.name = tokens[2];
      } else {
        malformed("bad PLY property line");
      }
      elements.back().properties.push_back(p);
    } else {
      malformed("unexpected PLY header line '" + std::string(tokens[0]) + "'");
    }
  }
  if (!have_format) malformed("PLY header has no format line");

  TriMesh mesh;
  std::size_t vertex_count = 0;
  bool vertices_seen = false;
  PlyReader reader(bytes.subspan(body_start), ascii);
  for (const auto& el : elements) {
    const bool is_vertex = el.name == "vertex", is_face = el.name == "face";
    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1, iface = -1;
    for (int k = 0; k < static_cast<int>(el.properties.size()); ++k) {
      const auto& name = el.properties[k].name;
      if (name == "x") ix = k;
      else if (name == "y") iy = k;
      else if (name == "z") iz = k;
      else if (name == "red") ir = k;
      else if (name == "green") ig = k;
      else if (name == "blue") ib = k;
      else if (name == "vertex_indices" || name == "vertex_index") iface = k;
    }
    if (is_vertex) {
      if (ix < 0 || iy < 0 || iz < 0) malformed("PLY vertex element lacks x, y or z");
      vertex_count = el.count;
      vertices_seen = true;
      mesh.vertices.reserve(std::min(el.count, bytes.size()));
      if (ir >= 0 && ig >= 0 && ib >= 0) mesh.vertex_colors.emplace().reserve(std::min(el.count, bytes.size()));
    }
    if (is_face) {
      if (iface < 0 || !el.properties[iface].is_list) malformed("PLY face element lacks vertex_indices");
      if (!vertices_seen) malformed("PLY face element precedes vertex element");
    }
    std::vector<double> scalars(el.properties.size());
    std::vector<std::uint32_t> poly;
    for (std::size_t row = 0; row < el.count; ++row) {
      for (std::size_t k = 0; k < el.properties.size(); ++k) {
        const auto& p = el.properties[k];
        if (!p.is_list) {
          scalars[k] = reader.read(p.type);
          continue;
        }
        const double n = reader.read(p.count_type);
        if (n < 0) malformed("negative PLY list length");
        const bool keep = is_face && static_cast<int>(k) == iface;
        if (keep) poly.clear();
        for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
          const double v = reader.read(p.type);
          if (keep) poly.push_back(to_index(v, vertex_count));
        }
      }
      if (is_vertex) {
        mesh.vertices.push_back({scalars[ix], scalars[iy], scalars[iz]});
        if (mesh.vertex_colors) {
          mesh.vertex_colors->push_back({to_channel(scalars[ir], el.properties[ir].type),
                                         to_channel(scalars[ig], el.properties[ig].type),
                                         to_channel(scalars[ib], el.properties[ib].type)});
        }
      } else if (is_face) {
        add_polygon(mesh, poly);
      }
    }
  }
  if (!vertices_seen) malformed("PLY has no vertex element");
  validate(mesh);
  return mesh;
}

// ---------------------------------------------------------------- OBJ

TriMesh load_obj(std::span<const std::uint8_t> bytes) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  TriMesh mesh;
  std::vector<long long> raw_faces;  // resolved after all vertices are known
  std::vector<std::size_t> face_sizes;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto tokens = split_ws(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens[0] == "v") {
      if (tokens.size() < 4) malformed("OBJ line " + std::to_string(line_no) + ": vertex needs 3 coordinates");
      mesh.vertices.push_back({parse_number(tokens[1]), parse_number(tokens[2]), parse_number(tokens[3])});
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) malformed("OBJ line " + std::to_string(line_no) + ": face needs 3 vertices");
      for (std::size_t k = 1; k < tokens.size(); ++k) {
        const auto tok = tokens[k].substr(0, tokens[k].find('/'));
        long long idx = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), idx);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
          malformed("OBJ line " + std::to_string(line_no) + ": bad face index '" + std::string(tokens[k]) + "'");
        }
        if (idx == 0) malformed("OBJ line " + std::to_string(line_no) + ": face index 0 (OBJ is 1-based)");
        // relative indices count back from the vertices defined so far
        if (idx < 0) idx += static_cast<long long>(mesh.vertices.size());
        else idx -= 1;
        raw_faces.push_back(idx);
      }
      face_sizes.push_back(tokens.size() - 1);
    }
  }
  std::size_t at = 0;
  std::vector<std::uint32_t> poly;
  for (std::size_t n : face_sizes) {
    poly.clear();
    for (std::size_t k = 0; k < n; ++k) poly.push_back(to_index(static_cast<double>(raw_faces[at++]), mesh.vertices.size()));
    add_polygon(mesh, poly);
  }
  validate(mesh);
  return mesh;
}

// ---------------------------------------------------------------- writers

void append(std::vector<std::uint8_t>& out, std::string_view s) { out.insert(out.end(), s.begin(), s.end()); }

template <typename T>
void append_le(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

std::string fmt_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(static_cast<float>(v)));
  return buf;
}

std::vector<std::uint8_t> save_ply(const TriMesh& mesh, bool ascii) {
  const bool colors = mesh.vertex_colors.has_value();
  std::string header = "ply\nformat ";
  header += ascii ? "ascii 1.0\n" : "binary_little_endian 1.0\n";
  header += "comment flatlift\n";
  header += "element vertex " + std::to_string(mesh.vertices.size()) + "\n";
  header += "property float x\nproperty float y\nproperty float z\n";
  if (colors) header += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  header += "element face " + std::to_string(mesh.triangles.size()) + "\n";
  header += "property list uchar int vertex_indices\nend_header\n";

  std::vector<std::uint8_t> out;
  append(out, header);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    if (ascii) {
      std::string line = fmt_float(v.x) + " " + fmt_float(v.y) + " " + fmt_float(v.z);
      if (colors) {
        const Rgb8 c = (*mesh.vertex_colors)[i];
        line += " " + std::to_string(c[0]) + " " + std::to_string(c[1]) + " " + std::to_string(c[2]);
      }
      append(out, line + "\n");
    } else {
      append_le(out, static_cast<float>(v.x));
      append_le(out, static_cast<float>(v.y));
      append_le(out, static_cast<float>(v.z));
      if (colors) {
        const Rgb8 c = (*mesh.vertex_colors)[i];
        out.insert(out.end(), c.begin(), c.end());
      }
    }
  }
  for (const Triangle& t : mesh.triangles) {
    if (ascii) {
      append(out, "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n");
    } else {
      out.push_back(3);
      for (std::uint32_t idx : t) append_le(out, static_cast<std::int32_t>(idx));
    }
  }
  return out;
}

std::vector<std::uint8_t> save_obj(const TriMesh& mesh) {
  std::vector<std::uint8_t> out;
  append(out, "# flatlift\n");
  for (const Vec3& v : mesh.vertices) append(out, "v " + fmt_float(v.x) + " " + fmt_float(v.y) + " " + fmt_float(v.z) + "\n");
  for (const Triangle& t : mesh.triangles) {
    append(out, "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " + std::to_string(t[2] + 1) + "\n");
  }
  return out;
}

}  // namespace

std::string_view to_string(MeshFormat format) {
  switch (format) {
    case MeshFormat::PlyBinary: return "ply-binary";
    case MeshFormat::PlyAscii: return "ply-ascii";
    case MeshFormat::Obj: return "obj";
  }
  return "?";
}

TriMesh load_mesh(std::span<const std::uint8_t> bytes) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), std::min<std::size_t>(bytes.size(), 4));
  if (text.size() >= 3 && text.substr(0, 3) == "ply") return load_ply(bytes);
  return load_obj(bytes);
}

std::vector<std::uint8_t> save_mesh(const TriMesh& mesh, MeshFormat format, std::vector<std::string>* warnings) {
  validate(mesh);
  switch (format) {
    case MeshFormat::PlyBinary: return save_ply(mesh, false);
    case MeshFormat::PlyAscii: return save_ply(mesh, true);
    case MeshFormat::Obj:
      if (mesh.vertex_colors && warnings) warnings->push_back("OBJ output drops vertex colours");
      return save_obj(mesh);
  }
  return {};
}

}  // namespace flatlift::mesh
