"""End-to-end checks of the command-line tool; invoked by ctest with the
binary path as the only argument."""

import json
import math
import pathlib
import subprocess
import sys
import tempfile

CLI = sys.argv[1]
failures = []


def run(*args, expect=0):
    proc = subprocess.run([CLI, *args], capture_output=True, text=True)
    if proc.returncode != expect:
        failures.append(f"{' '.join(args)}: exit {proc.returncode} != {expect}\n{proc.stderr}")
    return proc


def check(cond, msg):
    if not cond:
        failures.append(msg)


with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)

    # predict: the OU anomaly in closed form
    (tmp / "ou.json").write_text(json.dumps({"model": "ou", "step": 0.01}))
    run("predict", "--config", str(tmp / "ou.json"), "--out", str(tmp / "pred"))
    pred = json.loads((tmp / "pred" / "prediction.json").read_text())
    check(pred["gamma_strato"][0][1] == -0.5, "ou gamma mismatch")
    check(pred["provenance"] == "closed-form", "ou provenance mismatch")

    # pvar on the 3-point zigzag
    (tmp / "zig.csv").write_text("t,x1\n0,0\n0.5,1\n1,0\n")
    run("pvar", "--path", str(tmp / "zig.csv"), "--p", "2", "--method", "brute", "--out",
        str(tmp / "pv"))
    pv = json.loads((tmp / "pv" / "pvar.json").read_text())
    check(abs(pv["value"] - math.sqrt(2)) < 1e-14, "zigzag p-variation mismatch")

    # malformed config: exit 1 and the offending field in the error JSON
    (tmp / "bad.json").write_text(json.dumps({"model": "ou", "step": -1}))
    proc = run("predict", "--config", str(tmp / "bad.json"), "--out", str(tmp / "x"), expect=1)
    check("step" in proc.stderr, "error JSON does not name the offending field")

    # estimate: run twice, reports must be bit-identical (manifest round trip)
    cfg = {"model": "conductance", "d": 2, "law": {"type": "uniform", "a": 1.0, "b": 2.0},
           "statistic": "gap", "scale_n": 20, "M": 200, "seed": 9}
    (tmp / "est.json").write_text(json.dumps(cfg))
    run("estimate", "--config", str(tmp / "est.json"), "--out", str(tmp / "e1"), "--workers", "1")
    run("estimate", "--config", str(tmp / "est.json"), "--out", str(tmp / "e2"), "--workers", "2")
    r1 = (tmp / "e1" / "report.json").read_text()
    r2 = (tmp / "e2" / "report.json").read_text()
    check(json.loads(r1)["mean"] == json.loads(r2)["mean"],
          "estimate is not reproducible across worker counts")
    manifest = json.loads((tmp / "e1" / "manifest.json").read_text())
    check(manifest["config"] == cfg, "manifest does not echo the config")
    gap = json.loads(r1)["mean"]
    check(abs(gap[0][0] - 1.5) < 0.2, "gap estimate far from E[eta]")

    # simulate -> lift -> pvar chain on a conductance path
    (tmp / "sim.json").write_text(json.dumps(
        {"model": "conductance", "d": 2, "law": {"type": "constant", "value": 1.0},
         "scale_n": 25, "horizon": 1.0, "seed": 4}))
    run("simulate", "--config", str(tmp / "sim.json"), "--out", str(tmp / "sim"))
    run("lift", "--path", str(tmp / "sim" / "path_macro.csv"), "--kind", "strato", "--out",
        str(tmp / "lift"))
    header = (tmp / "lift" / "lift.csv").read_text().splitlines()[0]
    check(header == "t,dx1,dx2,a11,a12,a21,a22", "jump lift csv header mismatch")
    run("pvar", "--path", str(tmp / "sim" / "path_macro.csv"), "--p", "2.5", "--out", str(tmp / "pv2"))
    run("pvar", "--path", str(tmp / "sim" / "path_macro.csv"), "--p", "2.5", "--method", "dyadic",
        "--dyadic-level", "2", "--out", str(tmp / "pv3"))
    v_full = json.loads((tmp / "pv2" / "pvar.json").read_text())["value"]
    v_skel = json.loads((tmp / "pv3" / "pvar.json").read_text())["value"]
    check(v_skel <= v_full + 1e-12, "dyadic skeleton should not exceed the full p-variation")

    # sweep (tightness kind) at toy scale
    (tmp / "probe.json").write_text(json.dumps(
        {"model": "conductance", "d": 2, "law": {"type": "uniform", "a": 1.0, "b": 2.0},
         "sweep_kind": "tightness", "p": 2.5, "n_values": [5, 10, 20], "M": 40, "seed": 12}))
    run("sweep", "--config", str(tmp / "probe.json"), "--out", str(tmp / "probe"))
    probe = json.loads((tmp / "probe" / "probe.json").read_text())
    check(len(probe["rows"]) == 3, "probe rows missing")

    # sweep (estimate kind) and plotdata merge
    (tmp / "sweep.json").write_text(json.dumps(
        {"model": "conductance", "d": 1, "law": {"type": "constant", "value": 1.0},
         "statistic": "covariance", "target": [[2.0]], "n_values": [5, 10, 20], "M": 100,
         "seed": 21}))
    run("sweep", "--config", str(tmp / "sweep.json"), "--out", str(tmp / "sweep"))
    run("plotdata", "--reports", str(tmp / "sweep" / "sweep.json"),
        str(tmp / "e1" / "report.json"), "--out", str(tmp / "plot"))
    lines = (tmp / "plot" / "plotdata.csv").read_text().splitlines()
    check(lines[0] == "statistic,n,i,j,mean,stderr,M,seed", "plotdata header mismatch")
    check(len(lines) == 1 + 3 + 4, "plotdata row count mismatch")  # header + 3 sweep + 4 gap entries
    stats = [ln.split(",")[0] for ln in lines[1:]]
    check(stats == sorted(stats), "plotdata not sorted by statistic")

    # plotdata with no inputs: header-only csv, exit 0
    run("plotdata", "--out", str(tmp / "empty"))
    check((tmp / "empty" / "plotdata.csv").read_text().splitlines() ==
          ["statistic,n,i,j,mean,stderr,M,seed"], "empty plotdata should be header-only")

    # a sampled-path lift keeps the value columns
    (tmp / "lin.csv").write_text("t,x1\n0,0\n0.5,1\n1,0\n")
    run("lift", "--path", str(tmp / "lin.csv"), "--kind", "strato", "--out", str(tmp / "lift2"))
    header = (tmp / "lift2" / "lift.csv").read_text().splitlines()[0]
    check(header == "t,x1,a11", "sampled lift csv header mismatch")

    # numerical failures exit with code 2 (non-elliptic coefficients)
    (tmp / "sing.json").write_text(json.dumps(
        {"model": "periodic", "coeffs": {"preset": "d1_cosine", "a0": 1.0, "a1": 1.6}, "K": 16}))
    proc = run("predict", "--config", str(tmp / "sing.json"), "--out", str(tmp / "sing"), expect=2)
    check("numerical" in proc.stderr, "numerical failures should be tagged in the error JSON")

    # conductance predict requires the empirical covariance
    (tmp / "cp.json").write_text(json.dumps(
        {"model": "conductance", "d": 2, "law": {"type": "uniform", "a": 1.0, "b": 2.0}}))
    proc = run("predict", "--config", str(tmp / "cp.json"), "--out", str(tmp / "cp"), expect=1)
    check("covariance" in proc.stderr, "missing-covariance error should name the field")
    (tmp / "cp2.json").write_text(json.dumps(
        {"model": "conductance", "d": 2, "law": {"type": "uniform", "a": 1.0, "b": 2.0},
         "covariance": [[2.88, 0.0], [0.0, 2.88]]}))
    run("predict", "--config", str(tmp / "cp2.json"), "--out", str(tmp / "cp2"))
    pred = json.loads((tmp / "cp2" / "prediction.json").read_text())
    check(abs(pred["ito_correction"][0][0] - (1.44 - 1.5)) < 1e-12, "conductance ito correction")

    # rde comparison at toy scale (needs >= 1000 samples per side)
    (tmp / "rde.json").write_text(json.dumps(
        {"model": "conductance", "d": 2, "law": {"type": "two_point", "a": 1.0, "b": 4.0, "q": 0.5},
         "scale_n": 20, "M": 1000, "seed": 31, "sigma_c": [0.5, 0.5], "y0": [1.0, 1.0],
         "limit_step": 0.01}))
    run("rde", "--config", str(tmp / "rde.json"), "--out", str(tmp / "rde"))
    rde = json.loads((tmp / "rde" / "rde.json").read_text())
    check("corrected" in rde and "uncorrected" in rde, "rde report incomplete")
    check((tmp / "rde" / "samples_driver.csv").exists(), "rde sample csv missing")

    # every shipped config validates and runs (replica counts cut down here;
    # the full-scale runs are the acceptance suite)
    configs = pathlib.Path(__file__).resolve().parent.parent / "configs"
    for cfg_file in sorted(configs.glob("*.json")):
        cfg = json.loads(cfg_file.read_text())
        out = tmp / ("cfg_" + cfg_file.stem)
        if cfg_file.stem == "d1_corrector":
            run("predict", "--config", str(cfg_file), "--out", str(out))
            pred = json.loads((out / "prediction.json").read_text())
            check(abs(pred["covariance"][0][0] - 2 * math.sqrt(0.75)) < 1e-8,
                  "d1 corrector config prediction mismatch")
        elif cfg.get("sweep_kind") == "tightness":
            run("sweep", "--config", str(cfg_file), "--out", str(out), "--M", "10")
        elif "sigma_c" in cfg:
            run("rde", "--config", str(cfg_file), "--out", str(out), "--M", "1000")
        else:
            run("estimate", "--config", str(cfg_file), "--out", str(out), "--M", "100")
            check((out / "report.json").exists(), f"{cfg_file.name}: report missing")

if failures:
    print("\n".join(failures))
    sys.exit(1)
print("cli checks passed")
