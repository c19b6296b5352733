// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

// Writes one replay fixture per wire endpoint into a directory. Responses
// for generate, shape and texture come from the builtin implementations;
// caption and vqa answers are canned strings.
//
//   flatlift-record-fixtures <out-dir>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>

#include "flatlift/backends/builtin.hpp"
#include "flatlift/backends/wire.hpp"
#include "flatlift/condition/canny.hpp"
#include "flatlift/condition/depth.hpp"
#include "flatlift/core/base64.hpp"
#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"
#include "flatlift/mesh/mesh_io.hpp"

using namespace flatlift;
using nlohmann::json;

namespace {

RasterImage sprite(int size) {
  RasterImage img(size, size, Channels::Rgb8);
  const double c = (size - 1) / 2.0, r = size * 0.35;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double d = std::hypot(x - c, y - c);
      img.set_rgb(x, y, d <= r ? Rgb8{220, 40, 40} : Rgb8{255, 255, 255});
    }
  return img;
}

std::string payload_digest(const json& response) {
  for (const char* name : {"image_png_b64", "mesh_ply_b64"})
    if (response.contains(name)) return content_hash(base64_decode(response[name].get<std::string>())).hex();
  for (const char* name : {"caption", "answer"})
    if (response.contains(name)) return content_hash(response[name].get<std::string>()).hex();
  return {};
}

void write_fixture(const std::filesystem::path& dir, const std::string& name, backends::BackendRole role,
                   const std::string& request, const std::string& response) {
  const json resp = json::parse(response);
  const json doc = {{"endpoint", backends::endpoint_path(role)},
                    {"request", json::parse(request)},
                    {"response", resp},
                    {"request_sha256", content_hash(request).hex()},
                    {"payload_sha256", payload_digest(resp)}};
  const std::string text = doc.dump(1) + "\n";
  write_file_atomic(dir / (name + ".json"),
                    std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <out-dir>\n", argv[0]);
    return 1;
  }
  const std::filesystem::path dir = argv[1];
  try {
    std::filesystem::create_directories(dir);
    using backends::BackendRole;
    const RasterImage img = sprite(32);
    const auto fg = condition::foreground_mask(img);
    const ConditionMap canny = condition::canny_edges(img);
    const Caption cap{"a red ball on a white background", CaptionSource::Backend};

    write_fixture(dir, "caption", BackendRole::Caption, backends::caption_request(img),
                  json{{"caption", cap.text}}.dump());

    const std::string gen = backends::generate_request(img, canny, cap, 7);
    write_fixture(dir, "generate", BackendRole::Generate, gen, backends::builtin_respond("/v1/generate", gen));

    std::vector<RasterImage> candidates;
    for (int i = 0; i < 4; ++i) {
      const ConditionMap cond = i < 2 ? condition::canny_edges(img, {.gaussian_sigma = 1.4 * (1 + 0.5 * i)})
                                      : condition::builtin_depth(fg, i - 2);
      candidates.push_back(backends::shading_overlay(img, cond, fg));
    }
    write_fixture(dir, "vqa", BackendRole::Vqa,
                  backends::vqa_request(select::build_vqa_question(4), candidates),
                  json{{"answer", "Image 3 looks most three-dimensional."}}.dump());

    const std::string shape = backends::shape_request(img, 7);
    const std::string shape_resp = backends::builtin_respond("/v1/shape", shape);
    write_fixture(dir, "shape", BackendRole::Shape, shape, shape_resp);

    const TriMesh mesh = mesh::load_mesh(base64_decode(json::parse(shape_resp)["mesh_ply_b64"].get<std::string>()));
    const std::string tex = backends::texture_request(mesh, img);
    write_fixture(dir, "texture", BackendRole::Texture, tex, backends::builtin_respond("/v1/texture", tex));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
