// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <regex>

#include "doctest.h"
#include "flatlift/core/error.hpp"
#include "flatlift/select/select.hpp"
#include "support/synth.hpp"

using namespace flatlift;
using namespace flatlift::select;
using condition::ForegroundMask;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::StageFailed;
}

// Independent scan: regex over signed and fractional numbers, keep the first
// plain non-negative integer in range.
std::optional<int> first_integer_oracle(const std::string& text, int n) {
  static const std::regex number(R"((-?)(\d+)(\.\d+)?)");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), number); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[1].length() > 0 || m[3].length() > 0) continue;
    std::string digits = m[2].str();
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    if (digits.size() > 9) continue;
    const int v = std::stoi(digits);
    if (v >= 1 && v <= n) return v;
  }
  return std::nullopt;
}

class ScriptedVqa final : public backends::VqaBackend {
 public:
  explicit ScriptedVqa(std::function<std::string()> answer) : answer_(std::move(answer)) {}
  std::string id() const override { return "scripted"; }
  std::string vqa(const std::string& question, std::span<const RasterImage> images) override {
    last_question = question;
    last_count = images.size();
    ++calls;
    return answer_();
  }
  std::string last_question;
  std::size_t last_count = 0;
  int calls = 0;

 private:
  std::function<std::string()> answer_;
};

std::vector<CandidateImage> candidates_of(const std::vector<RasterImage>& images) {
  std::vector<CandidateImage> out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    CandidateImage c;
    c.image = images[i];
    c.condition_index = static_cast<int>(i);
    out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("vqa question carries the realism question and the range suffix") {
  CHECK(build_vqa_question(4) ==
        "Which image do you think is the most realistic and shows the most 3D feeling? "
        "Answer with a single number from 1 to 4.");
  CHECK(build_vqa_question(1).ends_with(" Answer with a single number from 1 to 1."));
  for (int n = 1; n <= 16; ++n) CHECK(build_vqa_question(n).starts_with(kRealismQuestion));
  CHECK(kind_of([] { build_vqa_question(0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("parse_vqa_answer: examples") {
  CHECK(parse_vqa_answer("Image 3 looks most realistic", 4) == 3);
  CHECK(parse_vqa_answer("2", 4) == 2);
  CHECK(kind_of([] { parse_vqa_answer("none of them", 4); }) == ErrorKind::Unparseable);
  CHECK(parse_vqa_answer("Out of 7 images, 5 wins", 6) == 5);
  CHECK(parse_vqa_answer("image 0, no, image 04", 4) == 4);
  CHECK(kind_of([] { parse_vqa_answer("-2 or 2.5", 4); }) == ErrorKind::Unparseable);
  CHECK(parse_vqa_answer("99999999999999999999 then 1", 4) == 1);
}

TEST_CASE("parse_vqa_answer: fuzzed answers stay in range and match the oracle") {
  std::mt19937_64 rng(3);
  const std::string alphabet = "0123456789 -.,abcXYZ\n#";
  std::uniform_int_distribution<int> len(0, 40), pick(0, static_cast<int>(alphabet.size()) - 1), nn(1, 16);
  int parsed = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    std::string text;
    const int l = len(rng);
    for (int i = 0; i < l; ++i) text += alphabet[pick(rng)];
    const int n = nn(rng);
    const auto expected = first_integer_oracle(text, n);
    try {
      const int got = parse_vqa_answer(text, n);
      CHECK(got >= 1);
      CHECK(got <= n);
      REQUIRE(expected.has_value());
      CHECK(got == *expected);
      ++parsed;
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Unparseable);
      CHECK_FALSE(expected.has_value());
    }
  }
  CHECK(parsed > 300);
}

TEST_CASE("realism score: constant foreground scores zero") {
  const auto img = testing::disk_image(48, 18, {90, 160, 30}, {255, 255, 255});
  const auto mask = ForegroundMask::from_image(testing::disk_mask_image(48, 18));
  const RealismScore s = realism_score(img, mask);
  CHECK(s.shading_term == 0.0);
  CHECK(s.gradient_entropy == 0.0);
  CHECK(s.total == 0.0);
}

TEST_CASE("realism score: shaded sphere beats a flat disk of the same silhouette") {
  const auto mask = ForegroundMask::from_image(testing::disk_mask_image(64, 24));
  const auto flat = testing::disk_image(64, 24, {200, 200, 200}, {0, 0, 0});
  const auto sphere = testing::lambert_sphere(64, 24);
  const RealismScore a = realism_score(flat, mask), b = realism_score(sphere, mask);
  CHECK(b.total > a.total);
  CHECK(b.shading_term > a.shading_term);
  CHECK(b.total == doctest::Approx(b.shading_term + 4.0 * b.gradient_entropy));
}

TEST_CASE("realism score: invariant under horizontal mirroring") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto img = testing::random_blocks(rng, 40, 30);
    RasterImage m(40, 30, Channels::Gray8);
    std::bernoulli_distribution on(0.6);
    for (auto& v : m.mutable_data()) v = on(rng) ? 255 : 0;
    m.at(0, 0) = 255;
    const auto mask = ForegroundMask::from_image(m);
    const auto mirrored = ForegroundMask::from_image(testing::mirror_x(m));
    const RealismScore a = realism_score(img, mask), b = realism_score(testing::mirror_x(img), mirrored);
    CHECK(a.gradient_entropy == doctest::Approx(b.gradient_entropy).epsilon(1e-12));
    CHECK(a.shading_term == doctest::Approx(b.shading_term).epsilon(1e-12));
  }
}

TEST_CASE("realism score: empty foreground is an error") {
  const auto img = testing::constant_image(8, 8, {1, 2, 3});
  const auto empty = ForegroundMask::from_image(RasterImage(8, 8, Channels::Gray8));
  CHECK(kind_of([&] { realism_score(img, empty); }) == ErrorKind::EmptyForeground);
}

TEST_CASE("argmax_index: ties go to the lowest index") {
  const std::vector<double> scores = {0.1, 0.9, 0.9, 0.2};
  CHECK(argmax_index(scores) == 2);
  CHECK(argmax_index(std::vector<double>{5}) == 1);
  CHECK(kind_of([] { argmax_index({}); }) == ErrorKind::NoCandidates);
}

TEST_CASE("argmax_index: invariant under positive scaling") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> count(1, 12), level(0, 6);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> v(count(rng));
    for (double& x : v) x = level(rng) * 0.37;  // few levels, so ties are common
    const double k = scale(rng);
    std::vector<double> scaled = v;
    for (double& x : scaled) x *= k;
    CHECK(argmax_index(v) == argmax_index(scaled));
  }
}

TEST_CASE("select_proxy: vqa answer picks the candidate") {
  std::vector<RasterImage> imgs;
  for (int i = 0; i < 4; ++i) imgs.push_back(testing::constant_image(16, 16, {std::uint8_t(i * 40), 0, 0}));
  const auto cands = candidates_of(imgs);
  const auto mask = ForegroundMask::from_image(testing::disk_mask_image(16, 6));
  ScriptedVqa vqa([] { return std::string("Image 3"); });
  const ProxyImage p = select_proxy(cands, &vqa, mask);
  CHECK(p.chosen_index == 3);
  CHECK(p.method == SelectionMethod::Vqa);
  CHECK(p.image == cands[2].image);
  CHECK(p.rationale.find("Image 3") != std::string::npos);
  CHECK(vqa.calls == 1);
  CHECK(vqa.last_count == 4);
  CHECK(vqa.last_question == build_vqa_question(4));
}

TEST_CASE("select_proxy: falls back to the realism heuristic") {
  const auto mask = ForegroundMask::from_image(testing::disk_mask_image(64, 24));
  const auto flat = testing::disk_image(64, 24, {200, 200, 200}, {0, 0, 0});
  const auto sphere = testing::lambert_sphere(64, 24);
  const auto cands = candidates_of({flat, sphere, flat});

  ScriptedVqa down([]() -> std::string { throw Error(ErrorKind::BackendUnavailable, "down"); });
  ProxyImage p = select_proxy(cands, &down, mask);
  CHECK(p.chosen_index == 2);
  CHECK(p.method == SelectionMethod::HeuristicFallback);
  CHECK(p.image == sphere);

  ScriptedVqa vague([] { return std::string("they all look nice"); });
  p = select_proxy(cands, &vague, mask);
  CHECK(p.chosen_index == 2);
  CHECK(p.method == SelectionMethod::HeuristicFallback);
  CHECK(p.rationale.find("they all look nice") != std::string::npos);

  p = select_proxy(cands, nullptr, mask);
  CHECK(p.chosen_index == 2);

  // identical candidates tie; lowest index wins
  p = select_proxy(candidates_of({flat, flat}), nullptr, mask);
  CHECK(p.chosen_index == 1);
}

TEST_CASE("select_proxy: override wins and is validated") {
  std::vector<RasterImage> imgs;
  for (int i = 0; i < 4; ++i) imgs.push_back(testing::constant_image(8, 8, {0, std::uint8_t(i * 50), 0}));
  const auto cands = candidates_of(imgs);
  const auto mask = ForegroundMask::from_image(testing::disk_mask_image(8, 3));
  ScriptedVqa vqa([] { return std::string("1"); });
  const ProxyImage p = select_proxy(cands, &vqa, mask, 4);
  CHECK(p.chosen_index == 4);
  CHECK(p.method == SelectionMethod::UserOverride);
  CHECK(p.image == cands[3].image);
  CHECK(vqa.calls == 0);
  CHECK(kind_of([&] { select_proxy(cands, &vqa, mask, 5); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { select_proxy(cands, &vqa, mask, 0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { select_proxy({}, &vqa, mask); }) == ErrorKind::NoCandidates);
}

TEST_CASE("select_proxy: output always equals the named candidate") {
  std::mt19937_64 rng(4);
  const auto mask = ForegroundMask::from_image(testing::disk_mask_image(20, 8));
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> count(1, 6);
    std::vector<RasterImage> imgs;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) imgs.push_back(testing::random_image(rng, 20, 20, Channels::Rgb8));
    const auto cands = candidates_of(imgs);
    ScriptedVqa vqa([&] { return "maybe " + std::to_string(trial % 9); });
    const ProxyImage p = select_proxy(cands, &vqa, mask);
    REQUIRE(p.chosen_index >= 1);
    REQUIRE(p.chosen_index <= n);
    CHECK(p.image == cands[p.chosen_index - 1].image);
  }
}
