// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/backends/wire.hpp"

#include <chrono>
#include <json.hpp>
#include <thread>

#include "flatlift/core/base64.hpp"
#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"
#include "flatlift/mesh/mesh_io.hpp"

namespace flatlift::backends {

using nlohmann::json;

std::string_view to_string(BackendRole role) {
  switch (role) {
    case BackendRole::Caption: return "caption";
    case BackendRole::Generate: return "generate";
    case BackendRole::Vqa: return "vqa";
    case BackendRole::Shape: return "shape";
    case BackendRole::Texture: return "texture";
  }
  return "unknown";
}

std::optional<BackendRole> backend_role_from_string(std::string_view name) {
  for (BackendRole r : kAllRoles)
    if (to_string(r) == name) return r;
  return std::nullopt;
}

std::string endpoint_path(BackendRole role) { return "/v1/" + std::string(to_string(role)); }

namespace {

std::string png_b64(const RasterImage& img) { return base64_encode(encode_image(img)); }

std::string ply_b64(const TriMesh& mesh) { return base64_encode(mesh::save_mesh(mesh, mesh::MeshFormat::PlyBinary)); }

json parse_response(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedResponse, std::string("response is not JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::MalformedResponse, "response is not a JSON object");
  return doc;
}

std::string string_field(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end() || !it->is_string()) {
    throw Error(ErrorKind::MalformedResponse, std::string("response lacks string field \"") + name + "\"");
  }
  return it->get<std::string>();
}

std::vector<std::uint8_t> b64_field(const json& doc, const char* name) {
  try {
    return base64_decode(string_field(doc, name));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MalformedResponse) throw;
    throw Error(ErrorKind::MalformedResponse, std::string("field \"") + name + "\": " + e.what());
  }
}

RasterImage image_field(const json& doc, const char* name) {
  const auto bytes = b64_field(doc, name);
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw Error(ErrorKind::MalformedResponse, std::string("field \"") + name + "\": " + e.what());
  }
}

TriMesh mesh_field(const json& doc, const char* name) {
  return mesh::load_mesh(b64_field(doc, name));  // MalformedMesh propagates
}

}  // namespace

std::string caption_request(const RasterImage& img) { return json{{"image_png_b64", png_b64(img)}}.dump(); }

std::string generate_request(const RasterImage& img, const ConditionMap& cond, const Caption& cap,
                             std::uint64_t seed) {
  return json{{"image_png_b64", png_b64(img)},
              {"condition_png_b64", png_b64(cond.map)},
              {"condition_kind", std::string(wire_name(cond.kind))},
              {"prompt", cap.text},
              {"seed", seed}}
      .dump();
}

std::string vqa_request(const std::string& question, std::span<const RasterImage> images) {
  json list = json::array();
  for (const auto& img : images) list.push_back(png_b64(img));
  return json{{"question", question}, {"images_png_b64", std::move(list)}}.dump();
}

std::string shape_request(const RasterImage& img, std::uint64_t seed) {
  return json{{"image_png_b64", png_b64(img)}, {"seed", seed}}.dump();
}

std::string texture_request(const TriMesh& mesh, const RasterImage& img) {
  return json{{"mesh_ply_b64", ply_b64(mesh)}, {"image_png_b64", png_b64(img)}}.dump();
}

WireBackend::WireBackend(std::shared_ptr<Transport> transport, RetryPolicy retry, std::shared_ptr<CallLog> log)
    : transport_(std::move(transport)), retry_(std::move(retry)), log_(std::move(log)) {
  if (!transport_) throw Error(ErrorKind::InvalidArgument, "wire backend needs a transport");
  if (retry_.max_retries < 0) throw Error(ErrorKind::InvalidConfig, "max_retries must be >= 0");
  if (!log_) log_ = std::make_shared<CallLog>();
}

std::string WireBackend::call(BackendRole role, const std::string& body) {
  BackendCallRecord rec;
  rec.role = role;
  rec.request_hash = content_hash(body);
  rec.backend_id = transport_->id();
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](bool ok, std::string error) {
    rec.ok = ok;
    rec.error = std::move(error);
    rec.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    log_->append(rec);
  };

  const std::string path = endpoint_path(role);
  for (int attempt = 1;; ++attempt) {
    rec.attempts = attempt;
    try {
      std::string response = transport_->post(path, body);
      rec.response_hash = content_hash(response);
      finish(true, "");
      return response;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BackendUnavailable || attempt > retry_.max_retries) {
        finish(false, e.what());
        throw;
      }
      const auto delay = retry_.backoff(attempt);
      if (retry_.sleep) {
        retry_.sleep(delay);
      } else {
        std::this_thread::sleep_for(delay);
      }
    }
  }
}

Caption WireBackend::caption(const RasterImage& img) {
  const json doc = parse_response(call(BackendRole::Caption, caption_request(img)));
  auto cap = Caption::make(string_field(doc, "caption"), CaptionSource::Backend);
  if (!cap) throw Error(ErrorKind::MalformedResponse, "empty caption");
  return *cap;
}

CandidateImage WireBackend::generate(const RasterImage& img, const ConditionMap& cond, const Caption& cap,
                                     std::uint64_t seed, int condition_index) {
  if (img.width() != cond.map.width() || img.height() != cond.map.height()) {
    throw Error(ErrorKind::DimensionMismatch, "image and condition sizes differ");
  }
  const json doc = parse_response(call(BackendRole::Generate, generate_request(img, cond, cap, seed)));
  RasterImage out = image_field(doc, "image_png_b64");
  if (out.width() != img.width() || out.height() != img.height()) {
    throw Error(ErrorKind::MalformedResponse, "generated image has the wrong size");
  }
  CandidateImage c;
  c.image = out.channels() == Channels::Rgb8 ? std::move(out) : to_rgb(out);
  c.condition_kind = cond.kind;
  c.condition_index = condition_index;
  c.backend_id = id();
  c.seed = seed;
  return c;
}

std::string WireBackend::vqa(const std::string& question, std::span<const RasterImage> images) {
  if (images.empty() || images.size() > static_cast<std::size_t>(kMaxVqaImages)) {
    throw Error(ErrorKind::InvalidArgument, "vqa takes 1 to 16 images");
  }
  const json doc = parse_response(call(BackendRole::Vqa, vqa_request(question, images)));
  std::string answer = string_field(doc, "answer");
  if (answer.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorKind::MalformedResponse, "empty vqa answer");
  }
  return answer;
}

TriMesh WireBackend::shape(const RasterImage& img, std::uint64_t seed) {
  const json doc = parse_response(call(BackendRole::Shape, shape_request(img, seed)));
  TriMesh mesh = mesh_field(doc, "mesh_ply_b64");
  mesh.vertex_colors.reset();
  return mesh;
}

TriMesh WireBackend::texture(const TriMesh& mesh, const RasterImage& img) {
  validate(mesh);
  const json doc = parse_response(call(BackendRole::Texture, texture_request(mesh, img)));
  TriMesh out = mesh_field(doc, "mesh_ply_b64");
  if (!out.vertex_colors) throw Error(ErrorKind::MalformedMesh, "textured mesh has no vertex colours");
  return out;
}

}  // namespace flatlift::backends
