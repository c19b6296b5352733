# Copyright 2026 The Flatlift Authors
# SPDX-License-Identifier: Apache-2.0
"""Validates documents written by the flatlift binary against schemas/.

usage: check_schemas.py <flatlift binary> <schemas dir> <scratch dir>
"""

import copy
import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema


def load(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def validator(schemas, name):
    schema = load(schemas / name)
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def expect_invalid(v, doc, label):
    if v.is_valid(doc):
        raise SystemExit(f"FAIL: {label} should not validate")


def main():
    binary, schemas, scratch = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    shutil.rmtree(scratch, ignore_errors=True)
    scratch.mkdir(parents=True)
    run = lambda *args: subprocess.run([binary, *args], check=True, capture_output=True, text=True).stdout

    dataset_v = validator(schemas, "dataset_manifest.schema.json")
    report_v = validator(schemas, "bench_report.schema.json")
    run_v = validator(schemas, "run_manifest.schema.json")

    run("make-dataset", str(scratch / "ds"), "--count", "5", "--size", "96")
    dataset = load(scratch / "ds" / "manifest.json")
    dataset_v.validate(dataset)
    bad = copy.deepcopy(dataset)
    bad["entries"][0]["extra"] = 1
    expect_invalid(dataset_v, bad, "entry with unknown key")
    bad = copy.deepcopy(dataset)
    bad["entries"][1]["id"] = "has space"
    expect_invalid(dataset_v, bad, "entry with unsafe id")
    expect_invalid(dataset_v, {**dataset, "schema": 2}, "schema 2")

    report = json.loads(run("bench", str(scratch / "ds" / "manifest.json"), "--limit", "3", "--format", "json",
                            "--work-dir", str(scratch / "work")))
    report_v.validate(report)
    assert report["aggregates"]["n"] == 3, report["aggregates"]
    bad = copy.deepcopy(report)
    bad["rows"][0]["selection_method"] = "Guess"
    expect_invalid(report_v, bad, "unknown selection method")
    bad = copy.deepcopy(report)
    del bad["aggregates"]["pipeline_thin_rate"]
    expect_invalid(report_v, bad, "missing aggregate")

    for entry in report["rows"]:
        manifest = load(scratch / "work" / entry["id"] / "manifest.json")
        run_v.validate(manifest)
        assert len(manifest["stages"]) == 8
    bad = copy.deepcopy(manifest)
    bad["stages"][0]["name"] = "paint"
    expect_invalid(run_v, bad, "unknown stage name")
    bad = copy.deepcopy(manifest)
    bad["run_id"] = "XYZ"
    expect_invalid(run_v, bad, "short run id")

    run("conditions", str(scratch / "ds" / "sprites" / "sprite-000.png"), "--out", str(scratch / "paused"))
    paused = load(scratch / "paused" / "manifest.json")
    run_v.validate(paused)
    assert paused["status"] == "paused" and paused["selection"] is None

    print("schemas: dataset manifest, bench report and run manifests validate")


if __name__ == "__main__":
    main()
