import io
import json
import subprocess
import sys

import pytest

from noise_lab.cli import (EXIT_DEGENERATE, EXIT_OK, EXIT_USAGE, ExperimentConfig,
                           parse_report, report_body, run)

CASES = [
    ["spectrum", "--family", "tribes", "--blocks", "2", "--block-size", "3", "--p", "0.4"],
    ["influence", "--family", "majority", "--n", "5", "--p", "0.5"],
    ["cov", "--family", "tribes", "--blocks", "3", "--block-size", "3", "--eps", "0.2",
     "--samples", "2000"],
    ["sns", "--family", "recmaj", "--fanout", "3", "--depth", "2", "--eps", "0.3",
     "--samples", "1000"],
    ["sweep", "--family", "majority", "--n", "7", "--samples", "600", "--points", "4"],
    ["family", "--family", "h-map", "--x0", "0.6", "--steps", "5"],
    ["graph-prop", "--property", "min-degree", "--n", "300", "--k", "1", "--eps", "0.1",
     "--samples", "100"],
    ["poisson-check", "--clique", "4", "--n", "30", "--samples", "200"],
    ["balanced", "--two-triangles", "3"],
    ["giant-robustness", "--n", "2000", "--lambda", "5", "--eps", "0.05", "--samples", "6"],
]


def _run(argv):
    out = io.StringIO()
    code = run(argv, stdout=out)
    return code, out.getvalue()


@pytest.mark.parametrize("argv", CASES, ids=[c[0] for c in CASES])
def test_roundtrip_and_byte_identical(argv):
    code, text = _run(argv)
    assert code in (EXIT_OK, EXIT_DEGENERATE)
    cfg, result = parse_report(text)
    assert cfg.subcommand == argv[0]
    assert ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg
    assert result
    code2, text2 = _run(argv)
    assert code2 == code
    assert report_body(text2) == report_body(text)


def test_config_options_reflect_arguments():
    _, text = _run(CASES[0])
    cfg, rows = parse_report(text)
    assert cfg.options["blocks"] == 2 and cfg.options["p"] == 0.4
    assert len(rows) == 2 ** 6 + 1


def test_spectrum_parseval_row():
    _, text = _run(CASES[0])
    _, rows = parse_report(text)
    data, last = rows[:-1], rows[-1]
    total = sum(float(r["coefficient"]) ** 2 for r in data)
    assert "parseval" in json.dumps(last).lower()
    nums = [float(v) for v in last.values() if v not in ("", None) and _isfloat(v)]
    assert any(abs(v - total) < 1e-12 for v in nums)


def _isfloat(v):
    try:
        float(v)
        return True
    except (TypeError, ValueError):
        return False


def test_usage_errors():
    assert _run(["nonsense"])[0] == EXIT_USAGE
    assert _run(["cov", "--family", "tribes"])[0] == EXIT_USAGE  # missing --eps
    assert _run(["cov", "--family", "majority", "--n", "5", "--eps", "3"])[0] == EXIT_USAGE
    assert _run(["giant-robustness", "--lambda", "0.5", "--samples", "2"])[0] == EXIT_USAGE


def test_degenerate_exit():
    code, _ = _run(["cov", "--family", "and", "--n", "12", "--p", "0.01", "--eps", "0.1",
                    "--samples", "200"])
    assert code == EXIT_DEGENERATE


def test_output_file(tmp_path):
    target = tmp_path / "bal.json"
    code, text = _run(["balanced", "--clique", "5", "-o", str(target)])
    assert code == EXIT_OK and text == ""
    cfg, res = parse_report(target.read_text())
    assert res["strictly_balanced"] is True
    bad = tmp_path / "missing" / "x.json"
    assert _run(["balanced", "--clique", "5", "-o", str(bad)])[0] == EXIT_USAGE


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "noise_lab.cli", "balanced", "--disjoint-edges",
                        "2"], capture_output=True, text=True)
    assert r.returncode == 0
    _, res = parse_report(r.stdout)
    assert res["balanced"] and not res["strictly_balanced"]
