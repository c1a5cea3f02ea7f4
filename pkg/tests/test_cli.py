import csv
import io
import json
import subprocess
import sys

import pytest

from replitool.cli import main, parse_grid
from replitool.display import format_bf, format_p


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_rates_table(capsys):
    code, out, _ = run(capsys, "rates", "--data", "rpcb.csv")
    assert code == 0
    assert "NonSignificance           11/15" in out


def test_analyze_annotations(capsys):
    code, out, _ = run(capsys, "analyze", "--data", "rpcb.csv", "--margin", "0.74", "--prior-sd", "2",
                       "--alpha", "0.05", "--gamma", "3", "--format", "json")
    assert code == 0
    payload = {r["pair_id"]: r for r in json.loads(out)["payload"]}
    goetz = payload["RPCB/goetz2011/1/1"]
    assert format_p(goetz["p_tost_original"]) == "0.06"
    assert format_bf(goetz["bf01_replication"]) == "4.1"


def test_sweep_entry(capsys):
    code, out, _ = run(capsys, "sweep", "--axis", "margin", "--data", "rpcb.csv", "--grid", "0.01:4.5:200",
                       "--alphas", "0.1,0.05,0.01", "--format", "json")
    assert code == 0
    rows = json.loads(out)["payload"]
    assert len(rows) == 600
    near = min((r for r in rows if r["threshold"] == 0.05), key=lambda r: abs(r["value"] - 0.74))
    assert near["count"] == 4


def test_json_and_csv_agree(capsys):
    _, js, _ = run(capsys, "analyze", "--data", "rpcb", "--format", "json")
    _, cs, _ = run(capsys, "analyze", "--data", "rpcb", "--format", "csv")
    payload = json.loads(js)["payload"]
    table = list(csv.DictReader(io.StringIO(cs)))
    assert len(payload) == len(table)
    for a, b in zip(payload, table):
        for key, value in a.items():
            if isinstance(value, float):
                assert float(b[key]) == value


def test_deterministic_output(capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"o{i}.json"
        assert main(["calibrate", "--sims", "20000", "--seed", "5", "--format", "json", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    env = json.loads(outs[0])
    assert {"tool", "version", "schema_version", "command", "config", "payload"} <= set(env)
    assert env["config"]["seed"] == 5 and env["config"]["n_sims"] == 20000


def test_envelope_records_checksum(capsys):
    from replitool.dataio import FIXTURE_CHECKSUMS

    _, out, _ = run(capsys, "rates", "--data", "rpp_eprp", "--format", "json")
    env = json.loads(out)
    assert env["data"]["sha256"] == FIXTURE_CHECKSUMS["rpp_eprp.csv"]
    assert env["config"]["margin"] == 0.2


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "rates", "--data", "rpcb", "--margin", "-1")[0] == 1
    assert run(capsys, "rates", "--data", str(tmp_path / "missing.csv"))[0] == 1
    code, _, err = run(capsys, "rates", "--data", "rpcb", "--bogus")
    assert code == 2 and "usage" in err
    assert run(capsys, "frobnicate")[0] == 2
    raw = tmp_path / "raw.csv"
    raw.write_text("project,paper_id,experiment_id,effect_id,role,internal_rep,estimate,se,n,scale,reported_p,"
                   "is_null_result\nA,b,1,1,original,1,0.1,0.2,,Raw,,\nA,b,1,1,replication,1,0.1,0.2,,Raw,,\n")
    code, _, err = run(capsys, "rates", "--data", str(raw))
    assert code == 1 and "--margin" in err
    assert run(capsys, "rates", "--data", str(raw), "--margin", "0.3")[0] == 0


def test_validate_and_convert(capsys):
    code, out, _ = run(capsys, "validate", "--data", "rpcb")
    assert code == 0 and "15 pairs" in out and "20 replication rows" in out
    code, out, _ = run(capsys, "convert", "--kind", "logor-to-smd", "0.262364", "--format", "json")
    assert json.loads(out)["payload"][0]["output"] == pytest.approx(0.14465, abs=1e-4)
    assert run(capsys, "convert")[0] == 1


def test_full_precision(capsys):
    _, out, _ = run(capsys, "rates", "--data", "rpcb", "--full-precision")
    assert "0.7333333333333333" in out


def test_parse_grid():
    g = parse_grid("0.01:4.5:200")
    assert len(g) == 200 and g[0] == pytest.approx(0.01) and g[-1] == pytest.approx(4.5)
    assert parse_grid("0:1:3:lin").tolist() == [0.0, 0.5, 1.0]
    assert parse_grid("1,2,3").tolist() == [1.0, 2.0, 3.0]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "replitool", "rates", "--data", "rpcb"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "11/15" in proc.stdout


@pytest.mark.parametrize("p, text", [(0.0632, "0.06"), (0.75, "0.75"), (0.0052, "0.0052"),
                                     (0.00021, "0.00021"), (3e-7, "<0.0001")])
def test_format_p(p, text):
    assert format_p(p) == text


@pytest.mark.parametrize("bf, text", [(4.9999, "5"), (4.1, "4.1"), (1 / 1.1, "1/1.1"), (1 / 1.8, "1/1.8"),
                                      (223.4, "223"), (1 / 16.2, "1/16"), (0.996, "1"), (2e6, "2.0e+06")])
def test_format_bf(bf, text):
    assert format_bf(bf) == text
