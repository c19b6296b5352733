// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/select/select.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "flatlift/condition/flatness.hpp"
#include "flatlift/core/error.hpp"

namespace flatlift::select {

std::string build_vqa_question(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "candidate count must be >= 1");
  return std::string(kRealismQuestion) + " Answer with a single number from 1 to " + std::to_string(n) + ".";
}

int parse_vqa_answer(std::string_view text, int n) {
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  std::size_t i = 0;
  while (i < text.size()) {
    if (!digit(text[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size() && digit(text[i])) ++i;
    const bool negative = start > 0 && text[start - 1] == '-';
    const bool fraction = i + 1 < text.size() && text[i] == '.' && digit(text[i + 1]);
    if (fraction) {  // skip the fractional digits too
      ++i;
      while (i < text.size() && digit(text[i])) ++i;
    }
    if (negative || fraction) continue;
    std::string_view token = text.substr(start, i - start);
    while (token.size() > 1 && token.front() == '0') token.remove_prefix(1);
    if (token.size() > 9) continue;
    const int value = std::stoi(std::string(token));
    if (value >= 1 && value <= n) return value;
  }
  throw Error(ErrorKind::Unparseable, "no integer in [1, " + std::to_string(n) + "] in answer");
}

namespace {

// The 3x3 Sobel stencil at (x, y), borders replicated, touches only
// foreground. Silhouette pixels would otherwise score the canvas contrast.
bool stencil_inside(const condition::ForegroundMask& mask, int x, int y) {
  const int w = mask.mask.width(), h = mask.mask.height();
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      if (!mask.contains(std::clamp(x + dx, 0, w - 1), std::clamp(y + dy, 0, h - 1))) return false;
  return true;
}

}  // namespace

RealismScore realism_score(const RasterImage& img, const condition::ForegroundMask& mask,
                           const RealismWeights& weights) {
  if (img.width() != mask.mask.width() || img.height() != mask.mask.height()) {
    throw Error(ErrorKind::DimensionMismatch, "realism image and mask sizes differ");
  }
  if (mask.coverage <= 0) throw Error(ErrorKind::EmptyForeground, "realism score needs a foreground");

  RealismScore s;
  s.shading_term = condition::cluster_shading(img, mask);

  const auto grad = condition::luma_gradient(img);
  std::array<long, kGradientBins> hist{};
  long total = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!stencil_inside(mask, x, y)) continue;
      const int bin = std::min(kGradientBins - 1, static_cast<int>(grad.at(x, y) / kGradientBinWidth));
      ++hist[bin];
      ++total;
    }
  }
  for (long count : hist) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / static_cast<double>(total);
    s.gradient_entropy -= p * std::log2(p);
  }
  s.gradient_entropy = std::max(0.0, s.gradient_entropy);  // -0.0 for a single bin
  s.total = weights.shading * s.shading_term + weights.entropy * s.gradient_entropy;
  return s;
}

int argmax_index(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::NoCandidates, "argmax over an empty list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return static_cast<int>(best) + 1;
}

namespace {

ProxyImage make_proxy(std::span<const CandidateImage> candidates, int index, SelectionMethod method,
                      std::string rationale) {
  ProxyImage p;
  p.image = candidates[static_cast<std::size_t>(index - 1)].image;
  p.chosen_index = index;
  p.method = method;
  p.rationale = std::move(rationale);
  return p;
}

}  // namespace

ProxyImage select_proxy(std::span<const CandidateImage> candidates, backends::VqaBackend* vqa,
                        const condition::ForegroundMask& mask, std::optional<int> override_index,
                        const RealismWeights& weights) {
  if (candidates.empty()) throw Error(ErrorKind::NoCandidates, "selection needs at least one candidate");
  const int n = static_cast<int>(candidates.size());
  if (override_index) {
    if (*override_index < 1 || *override_index > n) {
      throw Error(ErrorKind::InvalidArgument,
                  "override index " + std::to_string(*override_index) + " outside [1, " + std::to_string(n) + "]");
    }
    return make_proxy(candidates, *override_index, SelectionMethod::UserOverride, "user override");
  }

  std::string why;
  if (vqa != nullptr && n <= backends::kMaxVqaImages) {
    std::vector<RasterImage> images;
    images.reserve(candidates.size());
    for (const auto& c : candidates) images.push_back(c.image);
    std::string answer;
    try {
      answer = vqa->vqa(build_vqa_question(n), images);
      const int index = parse_vqa_answer(answer, n);
      return make_proxy(candidates, index, SelectionMethod::Vqa, "vqa answer: " + answer);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BackendUnavailable && e.kind() != ErrorKind::Unparseable &&
          e.kind() != ErrorKind::MalformedResponse) {
        throw;
      }
      why = e.kind() == ErrorKind::Unparseable ? "unparseable vqa answer: " + answer : std::string(e.what());
    }
  } else {
    why = vqa == nullptr ? "no vqa backend" : "too many candidates for one vqa call";
  }

  std::vector<double> totals;
  std::string list;
  for (const auto& c : candidates) {
    double t = 0;
    if (c.image.width() == mask.mask.width() && c.image.height() == mask.mask.height() && mask.coverage > 0) {
      t = realism_score(c.image, mask, weights).total;
    }
    totals.push_back(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.6f", list.empty() ? "" : ", ", t);
    list += buf;
  }
  return make_proxy(candidates, argmax_index(totals), SelectionMethod::HeuristicFallback,
                    why + "; realism scores [" + list + "]");
}

}  // namespace flatlift::select
