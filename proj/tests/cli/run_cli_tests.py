#!/usr/bin/env python3
"""End-to-end contract tests for the lsurf command-line tool.

Usage: run_cli_tests.py /path/to/lsurf
"""

import csv
import json
import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

CLI = Path(sys.argv[1]).resolve()
FAILURES = []


def run(*args, cwd=None):
    return subprocess.run([str(CLI), *args], capture_output=True, text=True,
                          cwd=cwd)


def check(label, cond, detail=""):
    status = "ok" if cond else "FAIL"
    print(f"[{status}] {label}" + (f"  ({detail})" if detail and not cond else ""))
    if not cond:
        FAILURES.append(label)


def error_code(proc):
    try:
        return json.loads(proc.stdout)["error"]["code"]
    except (json.JSONDecodeError, KeyError):
        return f"<no error object: {proc.stdout[:120]!r}>"


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def main():
    top = Path(tempfile.mkdtemp(prefix="lsurf_cli_"))
    try:
        scenarios(top)
    finally:
        shutil.rmtree(top, ignore_errors=True)
    print()
    if FAILURES:
        print(f"{len(FAILURES)} scenario check(s) failed:")
        for f in FAILURES:
            print(f"  - {f}")
        return 1
    print("all cli contract checks passed")
    return 0


def scenarios(top):
    # construct on the reference chart: K column must follow s^(-3/2)
    out = top / "construct_example"
    p = run("construct", "--builtin", "example", "--grid", "20x20",
            "--s", "1:9", "--t", "0:6.28", "--out", str(out))
    check("construct example exit 0", p.returncode == 0, p.stdout)
    rows = read_rows(out / "invariants.csv")
    check("construct example grid size", len(rows) == 400)
    worst = max(abs(float(r["K"]) - float(r["p0"]) ** -1.5) for r in rows)
    check("construct example K = s^(-3/2)", worst <= 1e-7, f"worst={worst}")
    summary = json.loads((out / "summary.json").read_text())
    check("construct example summary residuals",
          all(v <= 1e-6 for v in summary["residuals"].values()))

    # default flat profile is identically zero: quasi-minimality must fail
    p = run("construct", "--builtin", "flat_theta", "--out",
            str(top / "flat_default"))
    check("construct flat_theta F=0 exit 2", p.returncode == 2)
    check("construct flat_theta F=0 error code",
          error_code(p) == "QuasiMinimalityViolated", error_code(p))

    # integrated family over the full period reports its constraint drift
    out = top / "construct_nonflat"
    p = run("construct", "--builtin", "nonflat", "--grid", "8x8",
            "--out", str(out))
    check("construct nonflat exit 0", p.returncode == 0, p.stdout)
    summary = json.loads((out / "summary.json").read_text())
    check("construct nonflat drift <= 1e-6", summary["max_drift"] <= 1e-6,
          str(summary.get("max_drift")))
    check("construct nonflat writes trace cache",
          (out / "states.csv").exists())

    # classification verdicts
    out = top / "classify_example"
    p = run("classify", "--builtin", "example", "--out", str(out))
    check("classify example exit 0", p.returncode == 0, p.stdout)
    report = json.loads((out / "report.json").read_text())
    check("classify example verdict",
          report["verdict"] == "pw1_second_kind" and report["proper"] is True,
          f"{report['verdict']}, proper={report['proper']}")
    phi_rows = read_rows(out / "phi.csv")
    worst = max(abs(float(r["phi"]) + 4 * float(r["p0"]) ** -1.5) /
                max(1.0, abs(float(r["phi"]))) for r in phi_rows)
    check("classify example phi = -4 s^(-3/2)", worst <= 1e-6, f"worst={worst}")

    out = top / "classify_product"
    p = run("classify", "--builtin", "flat_product", "--grid", "6x6",
            "--out", str(out))
    report = json.loads((out / "report.json").read_text())
    check("classify flat_product harmonic",
          p.returncode == 0 and report["verdict"] == "harmonic")

    spacelike = top / "spacelike.json"
    spacelike.write_text(json.dumps({
        "components": ["u", "v", "0", "0"],
        "coords": "uv",
        "domain": {"u": [0, 1], "v": [0, 1]},
    }))
    p = run("classify", "--chart-file", str(spacelike), "--out",
            str(top / "classify_spacelike"))
    check("classify spacelike exit 2", p.returncode == 2)
    check("classify spacelike error code",
          error_code(p) == "NotNullCoordinates", error_code(p))

    # verification suites
    out = top / "verify_example"
    p = run("verify", "--builtin", "example", "--suite", "all", "--out",
            str(out))
    verify = json.loads((out / "verify.json").read_text())
    check("verify example all pass",
          p.returncode == 0 and verify["all_pass"] is True,
          json.dumps(verify.get("suites", []))[:200])

    out = top / "verify_coeffs"
    p = run("verify", "--builtin", "nonflat", "--t", "0:1", "--grid", "6x6",
            "--suite", "coefficients", "--out", str(out))
    verify = json.loads((out / "verify.json").read_text())
    check("verify nonflat coefficients",
          p.returncode == 0 and verify["suites"][0]["pass"] is True and
          verify["suites"][0]["max_residual"] <= 1e-6)

    p = run("verify", "--builtin", "example", "--suite", "goursat", "--out",
            str(top / "verify_bad_suite"))
    check("verify inapplicable suite exit 2", p.returncode == 2)

    # a corrupted cached grid must fail verification, not crash it
    out = top / "verify_corrupt"
    p = run("construct", "--builtin", "flat_theta", "--param", "F=w",
            "--grid", "6x6", "--out", str(out))
    check("construct flat_theta F=w exit 0", p.returncode == 0, p.stdout)
    cache = out / "theta.csv"
    lines = cache.read_text().splitlines()
    cells = lines[30].split(",")
    cells[4] = repr(float(cells[4]) + 1e-4)
    lines[30] = ",".join(cells)
    cache.write_text("\n".join(lines) + "\n")
    p = run("verify", "--chart-file", str(out / "chart.json"), "--suite",
            "all", "--out", str(top / "verify_corrupt_out"))
    verify = json.loads((top / "verify_corrupt_out" / "verify.json").read_text())
    row = verify["suites"][0]
    check("corrupted cache exit 1", p.returncode == 1)
    check("corrupted cache fails with nonzero residual",
          verify["all_pass"] is False and row["pass"] is False and
          row["max_residual"] > 0, json.dumps(row))

    # sweeps
    out = top / "sweep_lambda3"
    p = run("sweep", "--builtin", "nonflat", "--t", "0:1", "--grid", "6x6",
            "--param", "lambda3", "--range", "0.5,1,2", "--out", str(out))
    rows = read_rows(out / "sweep.csv")
    check("sweep lambda3 exit 0", p.returncode == 0, p.stdout)
    check("sweep lambda3 all second kind",
          len(rows) == 3 and
          all(r["verdict"] == "pw1_second_kind" for r in rows),
          json.dumps([r["verdict"] for r in rows]))

    out = top / "sweep_c1"
    p = run("sweep", "--builtin", "flat_theta", "--param", "F=w",
            "--grid", "6x6", "--param", "c1", "--range", "-1,0,1",
            "--out", str(out))
    rows = read_rows(out / "sweep.csv")
    check("sweep c1 exit 0", p.returncode == 0, p.stdout)
    q = 1 / math.sqrt(2)
    worst = 0.0
    for r in rows:
        c1 = float(r["value"])
        expect = [-q * c1, q * c1, 0.0, -1.0, q * c1, -q * c1]
        got = [float(r[f"c{i}"]) for i in range(6)]
        worst = max(worst, max(abs(g - e) for g, e in zip(got, expect)))
    check("sweep c1 C tracks linearly", worst <= 1e-6, f"worst={worst}")

    p = run("sweep", "--builtin", "nonflat", "--param", "lambda3", "--range",
            "", "--out", str(top / "sweep_empty"))
    check("sweep empty range exit 2", p.returncode == 2)

    # reruns with the same config are byte-identical
    a, b = top / "det_a", top / "det_b"
    for d in (a, b):
        run("construct", "--builtin", "example", "--grid", "8x8", "--out",
            str(d))
        run("classify", "--builtin", "flat_exponential", "--grid", "6x6",
            "--out", str(d / "cls"))
    same = True
    for rel in ("chart.json", "invariants.csv", "summary.json",
                "cls/report.json", "cls/phi.csv"):
        if (a / rel).read_bytes() != (b / rel).read_bytes():
            same = False
    check("reruns byte-identical", same)


if __name__ == "__main__":
    sys.exit(main())
