// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/backends/builtin.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>

#include "flatlift/core/base64.hpp"
#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"
#include "flatlift/kernels/kernels.hpp"
#include "flatlift/mesh/mesh_io.hpp"

namespace flatlift::backends {

using nlohmann::json;

RasterImage shading_overlay(const RasterImage& img, const ConditionMap& cond, const condition::ForegroundMask& fg,
                            double sigma) {
  const int w = img.width(), h = img.height();
  if (cond.map.width() != w || cond.map.height() != h || fg.mask.width() != w || fg.mask.height() != h) {
    throw Error(ErrorKind::DimensionMismatch, "overlay image, condition and mask sizes differ");
  }
  if (!(sigma > 0)) throw Error(ErrorKind::InvalidArgument, "shading sigma must be > 0");

  kernels::Plane<double> factor(w, h, 1.0);
  if (cond.kind == ConditionKind::CannyEdge) {
    kernels::Plane<std::uint8_t> seeds(w, h);
    bool any = false;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (cond.map.at(x, y) != 0) {
          seeds.at(x, y) = 1;
          any = true;
        }
    kernels::Plane<double> field(w, h, 0.0);
    if (any) {
      const auto d2 = kernels::omp::squared_distance(seeds, false);
      for (std::size_t i = 0; i < field.data.size(); ++i) field.data[i] = std::max(0.0, 255.0 - std::sqrt(d2.data[i]));
    }
    const auto taps = kernels::gaussian_taps(sigma);
    const auto blurred = kernels::omp::blur(field, taps);
    for (std::size_t i = 0; i < factor.data.size(); ++i) factor.data[i] = 0.5 + 0.5 * blurred.data[i] / 255.0;
  } else {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) factor.at(x, y) = 0.5 + 0.5 * cond.map.at(x, y) / 255.0;
  }

  RasterImage out = to_rgb(img);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!fg.contains(x, y)) continue;
      const double k = factor.at(x, y);
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp<long>(std::lround(out.at(x, y, c) * k), 0, 255));
      }
    }
  }
  return out;
}

int builtin_vqa_choice(std::span<const RasterImage> images, const BuiltinOptions& options) {
  if (images.empty()) throw Error(ErrorKind::InvalidArgument, "vqa needs at least one image");
  if (images.size() == 1) return 1;
  std::vector<double> totals;
  totals.reserve(images.size());
  for (const auto& img : images) {
    const auto fg = condition::foreground_mask(img, options.mask);
    totals.push_back(fg.coverage > 0 ? select::realism_score(img, fg, options.realism).total : 0.0);
  }
  return select::argmax_index(totals);
}

namespace {

json parse_request(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("request is not JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::InvalidArgument, "request is not a JSON object");
  return doc;
}

const json& field(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) throw Error(ErrorKind::InvalidArgument, std::string("request lacks \"") + name + "\"");
  return *it;
}

std::string string_field(const json& doc, const char* name) {
  const json& v = field(doc, name);
  if (!v.is_string()) throw Error(ErrorKind::InvalidArgument, std::string("\"") + name + "\" must be a string");
  return v.get<std::string>();
}

std::uint64_t seed_field(const json& doc) {
  const json& v = field(doc, "seed");
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw Error(ErrorKind::InvalidArgument, "\"seed\" must be an unsigned integer");
  }
  return v.get<std::uint64_t>();
}

RasterImage decode_png_b64(const std::string& b64, const char* name) {
  try {
    return decode_image(base64_decode(b64));
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("\"") + name + "\": " + e.what());
  }
}

RasterImage image_field(const json& doc, const char* name) { return decode_png_b64(string_field(doc, name), name); }

TriMesh mesh_field(const json& doc, const char* name) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = base64_decode(string_field(doc, name));
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("\"") + name + "\": " + e.what());
  }
  return mesh::load_mesh(bytes);
}

std::string mesh_response(const TriMesh& mesh) {
  return json{{"mesh_ply_b64", base64_encode(mesh::save_mesh(mesh, mesh::MeshFormat::PlyBinary))}}.dump();
}

}  // namespace

std::string builtin_respond(std::string_view path, const std::string& body, const BuiltinOptions& options) {
  const json req = parse_request(body);
  if (path == "/v1/caption") {
    image_field(req, "image_png_b64");
    return json{{"caption", std::string(kFallbackCaption)}}.dump();
  }
  if (path == "/v1/generate") {
    const RasterImage img = image_field(req, "image_png_b64");
    ConditionMap cond;
    cond.map = image_field(req, "condition_png_b64");
    const auto kind = condition_kind_from_wire(string_field(req, "condition_kind"));
    if (!kind) throw Error(ErrorKind::InvalidArgument, "\"condition_kind\" must be canny or depth");
    cond.kind = *kind;
    string_field(req, "prompt");
    seed_field(req);
    if (cond.map.channels() != Channels::Gray8) throw Error(ErrorKind::InvalidArgument, "condition must be gray");
    if (cond.map.width() != img.width() || cond.map.height() != img.height()) {
      throw Error(ErrorKind::DimensionMismatch, "image and condition sizes differ");
    }
    const auto fg = condition::foreground_mask(img, options.mask);
    const RasterImage out = shading_overlay(img, cond, fg, options.shading_sigma);
    return json{{"image_png_b64", base64_encode(encode_image(out))}}.dump();
  }
  if (path == "/v1/vqa") {
    string_field(req, "question");
    const json& list = field(req, "images_png_b64");
    if (!list.is_array() || list.empty() || list.size() > static_cast<std::size_t>(kMaxVqaImages)) {
      throw Error(ErrorKind::InvalidArgument, "\"images_png_b64\" must hold 1 to 16 images");
    }
    std::vector<RasterImage> images;
    for (const json& item : list) {
      if (!item.is_string()) throw Error(ErrorKind::InvalidArgument, "\"images_png_b64\" entries must be strings");
      images.push_back(decode_png_b64(item.get<std::string>(), "images_png_b64"));
    }
    return json{{"answer", std::to_string(builtin_vqa_choice(images, options))}}.dump();
  }
  if (path == "/v1/shape") {
    const RasterImage img = image_field(req, "image_png_b64");
    seed_field(req);  // the inflation is seed independent
    return mesh_response(mesh::inflate_silhouette(condition::foreground_mask(img, options.mask), options.inflate));
  }
  if (path == "/v1/texture") {
    const TriMesh m = mesh_field(req, "mesh_ply_b64");
    const RasterImage img = image_field(req, "image_png_b64");
    const auto fg = condition::foreground_mask(img, options.mask);
    return mesh_response(mesh::bake_frontal(m, to_rgb(img), fg, options.bake));
  }
  throw Error(ErrorKind::InvalidArgument, "unknown endpoint " + std::string(path));
}

void register_wire_routes(httplib::Server& server, WireHandler handler) {
  for (BackendRole role : kAllRoles) {
    const std::string path = endpoint_path(role);
    server.Post(path, [path, handler](const httplib::Request& req, httplib::Response& res) {
      int status = 200;
      std::string body;
      try {
        body = handler(path, req.body);
      } catch (const Error& e) {
        switch (e.kind()) {
          case ErrorKind::InvalidArgument:
          case ErrorKind::MalformedImage:
          case ErrorKind::UnsupportedFormat:
          case ErrorKind::MalformedMesh:
          case ErrorKind::DimensionMismatch: status = 400; break;
          case ErrorKind::BackendUnavailable: status = 404; break;
          case ErrorKind::EmptyForeground:
          case ErrorKind::DegenerateMesh: status = 422; break;
          default: status = 500; break;
        }
        body = json{{"error", e.what()}}.dump();
      } catch (const std::exception& e) {
        status = 500;
        body = json{{"error", e.what()}}.dump();
      }
      res.status = status;
      res.set_content(body, "application/json");
    });
  }
}

}  // namespace flatlift::backends
