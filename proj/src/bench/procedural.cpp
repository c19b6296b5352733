// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include "flatlift/bench/bench.hpp"
#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"

namespace flatlift::bench {

namespace {

using Inside = std::function<bool(double, double)>;  // unit coordinates, y down

constexpr Rgb8 kPalette[] = {{220, 40, 40}, {40, 120, 220}, {40, 170, 80},  {240, 180, 30}, {150, 60, 190},
                             {240, 110, 20}, {20, 160, 170}, {200, 50, 130}, {90, 90, 200},  {120, 80, 40}};
constexpr Rgb8 kOutline = {30, 30, 30};
constexpr Rgb8 kWhite = {255, 255, 255};

Inside ellipse(double cx, double cy, double rx, double ry) {
  return [=](double x, double y) {
    const double dx = (x - cx) / rx, dy = (y - cy) / ry;
    return dx * dx + dy * dy <= 1.0;
  };
}

Inside superellipse(double cx, double cy, double r, double p) {
  return [=](double x, double y) {
    return std::pow(std::abs(x - cx) / r, p) + std::pow(std::abs(y - cy) / r, p) <= 1.0;
  };
}

Inside star(double cx, double cy, double r, int points, double inner) {
  return [=](double x, double y) {
    const double dx = x - cx, dy = y - cy;
    const double d = std::hypot(dx, dy);
    const double sector = 2 * std::numbers::pi / points;
    double a = std::fmod(std::atan2(dy, dx) + 2 * std::numbers::pi, sector) / sector;  // [0, 1)
    a = std::abs(a - 0.5) * 2;  // 1 at the tips, 0 between them
    return d <= r * (inner + (1 - inner) * a);
  };
}

Inside heart(double cx, double cy, double r) {
  return [=](double x, double y) {
    const double u = (x - cx) / r * 1.2, v = -(y - cy) / r * 1.2 + 0.2;
    const double t = u * u + v * v - 1;
    return t * t * t - u * u * v * v * v <= 0;
  };
}

Inside polygon(std::vector<std::pair<double, double>> pts) {
  return [pts = std::move(pts)](double x, double y) {
    bool in = false;
    for (std::size_t i = 0, j = pts.size() - 1; i < pts.size(); j = i++) {
      const auto [xi, yi] = pts[i];
      const auto [xj, yj] = pts[j];
      if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
    }
    return in;
  };
}

struct Layer {
  Inside inside;
  Rgb8 color;
};

RasterImage render(int size, const std::vector<Layer>& layers, bool transparent) {
  RasterImage img(size, size, transparent ? Channels::Rgba8 : Channels::Rgb8);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double u = (x + 0.5) / size, v = (y + 0.5) / size;
      std::optional<Rgb8> c;
      for (const auto& l : layers)
        if (l.inside(u, v)) c = l.color;
      img.set_rgb(x, y, c.value_or(kWhite));
      if (transparent) img.at(x, y, 3) = c ? 255 : 0;
    }
  }
  return img;
}

// The outline is the shape minus an inset copy of it.
Inside inset(const Inside& shape, double w) {
  return [=](double x, double y) {
    return shape(x, y) && shape(x + w, y) && shape(x - w, y) && shape(x, y + w) && shape(x, y - w);
  };
}

RasterImage make_sprite(std::mt19937_64& rng, int kind, int size) {
  std::uniform_real_distribution<double> U(0, 1);
  auto pick = [&] { return kPalette[rng() % std::size(kPalette)]; };
  const double cx = 0.5 + (U(rng) - 0.5) * 0.08, cy = 0.5 + (U(rng) - 0.5) * 0.08;
  const double r = 0.28 + 0.1 * U(rng);
  const Rgb8 main = pick();
  Rgb8 accent = pick();
  while (accent == main) accent = pick();

  std::vector<Layer> layers;
  bool transparent = false;
  switch (kind) {
    case 0: {  // icon
      Inside shape;
      switch (rng() % 4) {
        case 0: shape = superellipse(cx, cy, r, 2 + 3 * U(rng)); break;
        case 1: shape = star(cx, cy, r * 1.15, 5 + static_cast<int>(rng() % 3), 0.6 + 0.15 * U(rng)); break;
        case 2: shape = heart(cx, cy, r); break;
        default: shape = ellipse(cx, cy, r, r * (0.6 + 0.4 * U(rng))); break;
      }
      layers.push_back({shape, main});
      if (U(rng) < 0.5) layers.push_back({ellipse(cx, cy, r * 0.3, r * 0.3), accent});
      transparent = U(rng) < 0.25;
      break;
    }
    case 1: {  // outlined cartoon
      const Inside body = ellipse(cx, cy, r * (0.85 + 0.3 * U(rng)), r);
      layers.push_back({body, kOutline});
      layers.push_back({inset(body, 0.025), main});
      const double ex = r * 0.35, ey = cy - r * 0.25;
      layers.push_back({ellipse(cx - ex, ey, r * 0.12, r * 0.12), kWhite});
      layers.push_back({ellipse(cx + ex, ey, r * 0.12, r * 0.12), kWhite});
      layers.push_back({ellipse(cx - ex, ey, r * 0.05, r * 0.05), kOutline});
      layers.push_back({ellipse(cx + ex, ey, r * 0.05, r * 0.05), kOutline});
      break;
    }
    default: {  // flat fill: a star-shaped polygon, sometimes two-tone
      const int n = 5 + static_cast<int>(rng() % 4);
      std::vector<std::pair<double, double>> pts;
      for (int i = 0; i < n; ++i) {
        const double a = 2 * std::numbers::pi * (i + 0.3 * U(rng)) / n;
        const double rr = r * (0.85 + 0.3 * U(rng));
        pts.emplace_back(cx + rr * std::cos(a), cy + rr * std::sin(a));
      }
      const Inside poly = polygon(pts);
      layers.push_back({poly, main});
      if (U(rng) < 0.5) {
        layers.push_back({[=](double x, double y) { return poly(x, y) && y > cy; }, accent});
      }
      break;
    }
  }
  return render(size, layers, transparent);
}

}  // namespace

std::filesystem::path write_procedural_dataset(const std::filesystem::path& dir, int count, std::uint64_t seed,
                                               int size) {
  if (count < 1 || size < 16) throw Error(ErrorKind::InvalidArgument, "dataset needs count >= 1 and size >= 16");
  static const char* kStyles[] = {"icon", "outlined cartoon", "flat fill"};
  nlohmann::json entries = nlohmann::json::array();
  for (int i = 0; i < count; ++i) {
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(i));
    const int kind = i % 3;
    char id[32];
    std::snprintf(id, sizeof id, "sprite-%03d", i);
    const std::string rel = std::string("sprites/") + id + ".png";
    write_file_atomic(dir / rel, encode_image(make_sprite(rng, kind, size)));
    entries.push_back({{"id", id}, {"path", rel}, {"style", kStyles[kind]}, {"license", "CC0-1.0"}});
  }
  const nlohmann::json manifest = {
      {"schema", kDatasetSchema}, {"name", "procedural-flat-" + std::to_string(count)}, {"entries", entries}};
  const std::string text = manifest.dump(2) + "\n";
  const auto path = dir / "manifest.json";
  write_file_atomic(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  return path;
}

}  // namespace flatlift::bench
