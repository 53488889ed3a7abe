import json

import pytest

from macexp.cli import run


def run_json(capsys, *argv):
    code = run(list(argv) + ["--format", "json"])
    out = capsys.readouterr()
    assert code == 0, out.err
    return json.loads(out.out)


def columns(doc):
    return {c: [r[i] for r in doc["rows"]] for i, c in enumerate(doc["columns"])}


class TestCommands:
    def test_su(self, capsys):
        doc = run_json(capsys, "su", "--noise", "0.98,0.02", "--rates", "0,0.1")
        assert len(doc["rows"]) == 2

    def test_su_bits(self, capsys):
        nats = columns(run_json(capsys, "su", "--noise", "0.9,0.1", "--rates", "0"))
        bits = columns(run_json(capsys, "su", "--noise", "0.9,0.1", "--rates", "0", "--bits"))
        key = [c for c in nats if c != "rate"][0]
        assert bits[key][0] == pytest.approx(nats[key][0] / 0.6931471805599453, rel=1e-9)

    def test_gaussian(self, capsys):
        doc = run_json(capsys, "gaussian", "--snr", "10db", "--grid", "5")
        assert len(doc["rows"]) == 5
        doc = run_json(capsys, "gaussian", "--a1", "30db", "--a2", "27db", "--r1", "0.1", "--r2", "0.1")
        assert doc["rows"]

    def test_mac_transform_search(self, capsys):
        assert run_json(capsys, "mac", "--example", "0.1,0.3")["rows"]
        doc = run_json(capsys, "transform", "--example", "0.1,0.3")
        assert "0.22" in json.dumps(doc)
        doc = run_json(capsys, "search", "--example", "0.1,0.3", "--m", "2")
        assert doc["rows"]

    def test_simulate(self, capsys):
        a = run_json(capsys, "simulate", "split", "--seed", "1", "--n", "6", "--k", "3", "--k1", "1",
                     "--noise", "0.9,0.1", "--trials", "2000", "--exact")
        b = run_json(capsys, "simulate", "split", "--seed", "1", "--n", "6", "--k", "3", "--k1", "1",
                     "--noise", "0.9,0.1", "--trials", "2000", "--exact")
        assert a == b
        assert run_json(capsys, "simulate", "pam", "--seed", "2", "--l0", "9", "--l1", "3",
                        "--sigma", "0.3", "--trials", "1000")["rows"]

    def test_csv_default(self, capsys):
        assert run(["figure", "region", "--resolution", "3"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("# figure: region")

    def test_figure_writes_png(self, tmp_path, capsys):
        out = tmp_path / "sub" / "fig1.csv"
        assert run(["figure", "fig1", "--resolution", "5", "--out", str(out)]) == 0
        assert out.read_text().startswith("# figure: fig1")
        assert (tmp_path / "sub" / "fig1.png").read_bytes()[:4] == b"\x89PNG"
        out2 = tmp_path / "fig1.json"
        assert run(["figure", "fig1", "--resolution", "5", "--out", str(out2),
                    "--format", "json", "--no-plot"]) == 0
        assert not (tmp_path / "fig1.png").exists()


class TestExitCodes:
    def test_usage_errors(self, capsys):
        assert run(["simulate", "pam", "--l0", "9", "--l1", "3", "--sigma", "1"]) == 2
        assert run(["figure", "fig9"]) == 2
        assert run(["figure", "fig1", "--resolution", "1"]) == 2
        assert run(["--help"]) == 0

    def test_domain_errors(self, capsys):
        assert run(["su", "--noise", "0.5,0.6"]) == 1
        assert run(["search", "--example", "0.1,0.3", "--m", "4"]) == 1
        assert run(["simulate", "pam", "--seed", "1", "--l0", "8", "--l1", "2", "--sigma", "1"]) == 1
        assert "error" in capsys.readouterr().err
