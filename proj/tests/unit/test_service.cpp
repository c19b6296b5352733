// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <thread>

#include "doctest.h"
#include "flatlift/core/png.hpp"
#include "flatlift/mesh/mesh_io.hpp"
#include "flatlift/pipeline/pipeline.hpp"
#include "flatlift/service/service.hpp"
#include "support/synth.hpp"

using namespace flatlift;
using namespace flatlift::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// One service on an ephemeral port for the lifetime of the fixture.
struct Server {
  fs::path runs;
  service::JobService jobs;
  httplib::Server http;
  int port = 0;
  std::thread thread;

  explicit Server(const std::string& name) : runs(temp_dir(name)), jobs(options(runs)) {
    jobs.mount(http);
    port = http.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { http.listen_after_bind(); });
    http.wait_until_ready();
  }
  ~Server() {
    jobs.wait_idle();
    http.stop();
    thread.join();
  }

  static service::ServiceOptions options(const fs::path& runs) {
    service::ServiceOptions o;
    o.runs_dir = runs;
    return o;
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30, 0);
    return c;
  }
};

std::string sprite_png(Rgb8 fg = {220, 40, 40}) {
  const auto bytes = encode_image(disk_image(96, 30, fg, {255, 255, 255}));
  return {bytes.begin(), bytes.end()};
}

httplib::Result submit(httplib::Client& c, const std::string& png, const std::string& config = "",
                       const std::string& interactive = "") {
  httplib::MultipartFormDataItems items = {{"image", png, "sprite.png", "image/png"}};
  if (!config.empty()) items.push_back({"config", config, "", "application/json"});
  if (!interactive.empty()) items.push_back({"interactive", interactive, "", ""});
  return c.Post("/api/jobs", items);
}

json get_json(httplib::Client& c, const std::string& path) {
  auto r = c.Get(path);
  REQUIRE(r);
  REQUIRE_MESSAGE(r->status == 200, path, " -> ", r->status, " ", r->body);
  return json::parse(r->body);
}

const std::vector<std::string> kOrder = {"Queued",     "ConditionsReady", "CandidatesReady", "AwaitingSelection",
                                         "ShapeReady", "Done",            "Failed"};

int rank(const std::string& s) {
  return static_cast<int>(std::find(kOrder.begin(), kOrder.end(), s) - kOrder.begin());
}

// Polls until `done` holds, checking every observed status moves forward.
json poll(httplib::Client& c, const std::string& id, const std::function<bool(const json&)>& done) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(30);
  int last = -1;
  while (true) {
    const json st = get_json(c, "/api/jobs/" + id);
    const int r = rank(st["status"]);
    REQUIRE(r < static_cast<int>(kOrder.size()));
    CHECK_MESSAGE(r >= last, "status went back to ", st["status"]);
    last = r;
    if (done(st)) return st;
    REQUIRE_MESSAGE(std::chrono::steady_clock::now() < deadline, "timed out in ", st["status"]);
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

bool is_done(const json& st) { return st["status"] == "Done" || st["status"] == "Failed"; }

}  // namespace

TEST_CASE("health") {
  Server s("svc_health");
  auto c = s.client();
  const json h = get_json(c, "/api/health");
  CHECK(h == json{{"ok", true}});
}

TEST_CASE("non-interactive job runs to Done and serves a valid mesh") {
  Server s("svc_batch");
  auto c = s.client();
  auto r = submit(c, sprite_png());
  REQUIRE(r);
  REQUIRE_MESSAGE(r->status == 201, r->body);
  const std::string id = json::parse(r->body)["job_id"];
  CHECK(id.size() == 64);

  const json st = poll(c, id, is_done);
  REQUIRE(st["status"] == "Done");
  CHECK(st["awaiting_selection"] == false);
  CHECK(st["manifest"]["stages"].size() == 8);
  CHECK(st["manifest"]["selection"]["method"] == "Vqa");

  auto mesh_res = c.Get("/api/jobs/" + id + "/artifact/final.ply");
  REQUIRE(mesh_res);
  REQUIRE(mesh_res->status == 200);
  const std::vector<std::uint8_t> bytes(mesh_res->body.begin(), mesh_res->body.end());
  const TriMesh m = mesh::load_mesh(bytes);
  CHECK_NOTHROW(validate(m));
  CHECK(m.vertex_colors.has_value());
  CHECK(bytes == read_file(s.runs / id / "final.ply"));

  auto png = c.Get("/api/jobs/" + id + "/artifact/candidates/cand_1.png");
  REQUIRE(png);
  CHECK(png->status == 200);
  CHECK(png->get_header_value("Content-Type") == "image/png");

  // The same input and config name the same job.
  r = submit(c, sprite_png());
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(json::parse(r->body)["job_id"] == id);

  // select is only valid while awaiting selection.
  auto sel = c.Post("/api/jobs/" + id + "/select", R"({"index": 2})", "application/json");
  REQUIRE(sel);
  CHECK(sel->status == 409);
}

TEST_CASE("interactive job pauses, validates and applies the selection") {
  Server s("svc_interactive");
  auto c = s.client();
  auto r = submit(c, sprite_png({40, 120, 220}), "", "true");
  REQUIRE(r);
  REQUIRE(r->status == 201);
  const std::string id = json::parse(r->body)["job_id"];

  const json paused = poll(c, id, [](const json& st) { return st["awaiting_selection"] == true || is_done(st); });
  REQUIRE(paused["status"] == "AwaitingSelection");
  CHECK(paused["candidate_count"] == 4);
  CHECK(paused["manifest"]["status"] == "paused");
  CHECK(paused["manifest"]["stages"].size() == 5);
  CHECK(paused["manifest"]["selection"].is_null());

  const std::string sel_path = "/api/jobs/" + id + "/select";
  for (const char* body : {R"({"index": 99})", R"({"index": 0})", R"({"index": "2"})", R"({})", "[1]", "nope"}) {
    auto bad = c.Post(sel_path, body, "application/json");
    REQUIRE(bad);
    CHECK_MESSAGE(bad->status == 400, body);
  }

  auto ok = c.Post(sel_path, R"({"index": 2})", "application/json");
  REQUIRE(ok);
  CHECK(ok->status == 202);
  auto twice = c.Post(sel_path, R"({"index": 3})", "application/json");
  REQUIRE(twice);
  CHECK(twice->status == 409);

  const json done = poll(c, id, is_done);
  REQUIRE(done["status"] == "Done");
  CHECK(done["manifest"]["selection"]["method"] == "UserOverride");
  CHECK(done["manifest"]["selection"]["chosen_index"] == 2);
  CHECK(done["manifest"]["override_index"] == 2);

  auto proxy = c.Get("/api/jobs/" + id + "/artifact/proxy.png");
  auto cand = c.Get("/api/jobs/" + id + "/artifact/candidates/cand_2.png");
  REQUIRE(proxy);
  REQUIRE(cand);
  CHECK(proxy->body == cand->body);

  auto late = c.Post(sel_path, R"({"index": 1})", "application/json");
  REQUIRE(late);
  CHECK(late->status == 409);
}

TEST_CASE("accepting the suggestion matches the non-interactive result") {
  Server s("svc_accept");
  auto c = s.client();
  const std::string cfg = R"({"seed": 11})";
  auto batch = submit(c, sprite_png({240, 180, 30}), cfg);
  auto inter = submit(c, sprite_png({240, 180, 30}), cfg, "true");
  REQUIRE(batch);
  REQUIRE(inter);
  const std::string b = json::parse(batch->body)["job_id"], i = json::parse(inter->body)["job_id"];
  CHECK(b != i);

  poll(c, i, [](const json& st) { return st["awaiting_selection"] == true || is_done(st); });
  auto ok = c.Post("/api/jobs/" + i + "/select", R"({"accept_suggestion": true})", "application/json");
  REQUIRE(ok);
  CHECK(ok->status == 202);
  const json di = poll(c, i, is_done);
  const json db = poll(c, b, is_done);
  REQUIRE(di["status"] == "Done");
  REQUIRE(db["status"] == "Done");
  CHECK(di["manifest"]["selection"] == db["manifest"]["selection"]);
  CHECK(c.Get("/api/jobs/" + i + "/artifact/final.ply")->body == c.Get("/api/jobs/" + b + "/artifact/final.ply")->body);
}

TEST_CASE("interactive jobs with the same input get separate run directories") {
  Server s("svc_nonce");
  auto c = s.client();
  auto a = submit(c, sprite_png(), "", "true");
  auto b = submit(c, sprite_png(), R"({"interactive": true})");
  REQUIRE(a);
  REQUIRE(b);
  const std::string ia = json::parse(a->body)["job_id"], ib = json::parse(b->body)["job_id"];
  CHECK(ia != ib);
  s.jobs.wait_idle();
  CHECK(fs::exists(s.runs / ia / "manifest.json"));
  CHECK(fs::exists(s.runs / ib / "manifest.json"));
}

TEST_CASE("bad submissions are rejected with 400") {
  Server s("svc_bad");
  auto c = s.client();
  auto r = c.Post("/api/jobs", "{}", "application/json");
  REQUIRE(r);
  CHECK(r->status == 400);

  r = c.Post("/api/jobs", httplib::MultipartFormDataItems{{"config", "{}", "", ""}});
  REQUIRE(r);
  CHECK(r->status == 400);

  r = submit(c, "not a png");
  REQUIRE(r);
  CHECK(r->status == 400);
  CHECK(json::parse(r->body)["error"].get<std::string>().find("MalformedImage") != std::string::npos);

  for (const char* cfg : {"{", "[]", R"({"n_canny": 0, "n_depth": 0})", R"({"bogus": 1})",
                          R"({"cache_dir": "/tmp/x"})", R"({"endpoints": {}})", R"({"interactive": "yes"})"}) {
    r = submit(c, sprite_png(), cfg);
    REQUIRE(r);
    CHECK_MESSAGE(r->status == 400, cfg);
  }
  r = submit(c, sprite_png(), R"({"n_canny": 0, "n_depth": 0})");
  CHECK(json::parse(r->body)["error"].get<std::string>().find("at least one condition required") !=
        std::string::npos);

  r = submit(c, sprite_png(), "", "maybe");
  REQUIRE(r);
  CHECK(r->status == 400);
}

TEST_CASE("unknown jobs and artifacts are 404") {
  Server s("svc_404");
  auto c = s.client();
  const std::string ghost(64, 'a');
  for (const std::string& path : std::vector<std::string>{"/api/jobs/" + ghost, "/api/jobs/" + ghost + "/artifact/final.ply", "/api/jobs/xyz",
                                 "/api/nothing"}) {
    auto r = c.Get(path);
    REQUIRE(r);
    CHECK_MESSAGE(r->status == 404, path);
  }
  auto sel = c.Post("/api/jobs/" + ghost + "/select", R"({"index": 1})", "application/json");
  REQUIRE(sel);
  CHECK(sel->status == 404);

  auto r = submit(c, sprite_png());
  const std::string id = json::parse(r->body)["job_id"];
  poll(c, id, is_done);
  std::ofstream(s.runs / id / "secret.txt") << "x";
  for (const std::string& name : std::vector<std::string>{"secret.txt", "../manifest.json", "candidates/cand_9.png", "conditions"}) {
    auto a = c.Get("/api/jobs/" + id + "/artifact/" + name);
    REQUIRE(a);
    CHECK_MESSAGE(a->status == 404, name);
  }
  auto m = c.Get("/api/jobs/" + id + "/artifact/manifest.json");
  REQUIRE(m);
  CHECK(m->status == 200);
  CHECK(json::parse(m->body)["status"] == "complete");
}

TEST_CASE("a failing job reports Failed with the stage") {
  Server s("svc_fail");
  auto c = s.client();
  const auto blank = encode_image(constant_image(64, 64, {255, 255, 255}));
  auto r = submit(c, std::string(blank.begin(), blank.end()));
  REQUIRE(r);
  REQUIRE(r->status == 201);
  const json st = poll(c, json::parse(r->body)["job_id"], is_done);
  CHECK(st["status"] == "Failed");
  CHECK(st["manifest"]["failed_stage"] == "mask");
  CHECK(st["error"].get<std::string>().find("mask") != std::string::npos);
}

void add_stage(pipeline::RunManifest& m, const char* name) {
  pipeline::StageRecord r;
  r.name = name;
  m.stages.push_back(r);
}

TEST_CASE("status from manifest follows stage progress") {
  pipeline::RunManifest m;
  CHECK(service::status_from_manifest(m) == service::JobStatus::Queued);
  for (const char* name : {"mask", "flatness", "conditions"}) add_stage(m, name);
  CHECK(service::status_from_manifest(m) == service::JobStatus::ConditionsReady);
  for (const char* name : {"caption", "candidates"}) add_stage(m, name);
  CHECK(service::status_from_manifest(m) == service::JobStatus::CandidatesReady);
  m.status = pipeline::RunStatus::Paused;
  CHECK(service::status_from_manifest(m) == service::JobStatus::AwaitingSelection);
  m.status = pipeline::RunStatus::Running;
  for (const char* name : {"select", "shape"}) add_stage(m, name);
  CHECK(service::status_from_manifest(m) == service::JobStatus::ShapeReady);
  m.status = pipeline::RunStatus::Complete;
  CHECK(service::status_from_manifest(m) == service::JobStatus::Done);
  m.status = pipeline::RunStatus::Failed;
  CHECK(service::status_from_manifest(m) == service::JobStatus::Failed);
}
