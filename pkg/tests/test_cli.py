import json

import pytest

from eulerext import formats
from eulerext.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_ee_fixture(capsys, fixtures_dir):
    code, out, _ = run(capsys, "solve-ee", str(fixtures_dir / "two_cycles.ee"))
    assert code == 0
    assert out.splitlines()[0] == "# weight 2"


def test_oracle_agrees(capsys, fixtures_dir):
    code, out, _ = run(capsys, "oracle-ee", "--json", str(fixtures_dir / "two_cycles.ee"))
    doc = json.loads(out)
    assert code == 0
    assert doc["answer"] == "yes" and doc["weight"] == 2
    assert doc["schema"] == 1
    assert doc["stats"]["c"] == 2


def test_sat_to_cbm_pipeline(capsys, fixtures_dir, tmp_path, monkeypatch):
    code, out, _ = run(capsys, "reduce", "sat-to-cbm", str(fixtures_dir / "phi.cnf"))
    assert code == 0
    import io

    for algo in ("general", "degree2"):
        monkeypatch.setattr("sys.stdin", io.StringIO(out))
        code, res, _ = run(capsys, "solve-cbm", "--algorithm", algo, "-")
        assert code == 0
        assert res.startswith("# weight")


def test_figure_is_no(capsys, fixtures_dir):
    code, out, _ = run(capsys, "solve-cbm", str(fixtures_dir / "figure.cbm"))
    assert code == 1
    assert out == "# no\n"


def test_verify(capsys, fixtures_dir, tmp_path):
    inst = str(fixtures_dir / "two_cycles.ee")
    cert = tmp_path / "cert.ext"
    code, _, _ = run(capsys, "solve-ee", "--out", str(cert), inst)
    assert code == 0
    code, out, _ = run(capsys, "verify", "ee", inst, str(cert))
    assert code == 0 and out == "valid weight 2\n"
    tampered = tmp_path / "bad.ext"
    tampered.write_text("0 2\n")
    code, out, _ = run(capsys, "verify", "ee", inst, str(tampered))
    assert code == 1 and out == "invalid\n"


def test_verify_ssc(capsys, fixtures_dir, tmp_path):
    inst = str(fixtures_dir / "sample.ssc")
    code, out, _ = run(capsys, "solve-ssc", inst)
    assert code == 0
    cert = tmp_path / "choice"
    cert.write_text(out)
    assert run(capsys, "verify", "ssc", inst, str(cert))[0] == 0


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.ee"
    bad.write_text("EE 1\nvertices two\n")
    code, _, err = run(capsys, "solve-ee", str(bad))
    assert code == 2
    assert "line 2" in err


def test_wrong_kind(capsys, fixtures_dir):
    code, _, err = run(capsys, "solve-ee", str(fixtures_dir / "figure.cbm"))
    assert code == 2
    assert "expected" in err


def test_unknown_command(capsys):
    assert run(capsys, "frobnicate")[0] == 2


@pytest.mark.parametrize(
    "kind, fixture",
    [
        ("hc-to-ee", "triangle.hc"),
        ("rp-to-ee", "sample.rp"),
        ("ee-to-rp", "two_cycles.ee"),
        ("cbm-to-eea", "figure.cbm"),
        ("eea-to-ee", "chain.eea"),
        ("ssc-to-2dee", "sample.ssc"),
        ("2dee-to-ee", "sample.2dee"),
    ],
)
def test_reduce_outputs_parse(capsys, fixtures_dir, kind, fixture):
    code, out, _ = run(capsys, "reduce", kind, str(fixtures_dir / fixture))
    assert code == 0
    formats.parse_any(out)


def test_eeca_to_cbm_needs_normalized_base(capsys, fixtures_dir):
    code, out, _ = run(capsys, "reduce", "eeca-to-cbm", str(fixtures_dir / "chain.eea"))
    assert code == 0
    assert formats.sniff(out) == "CBM"


def test_preprocess_and_kernel(capsys, fixtures_dir):
    code, out, _ = run(capsys, "preprocess", str(fixtures_dir / "two_cycles.ee"))
    assert code == 0 and formats.sniff(out) == "EE"
    code, out, _ = run(capsys, "kernelize-eeca", str(fixtures_dir / "chain.eea"))
    assert code == 0
    kern = formats.parse_eea(out)
    assert all(len(h) == 1 for h in kern.advice)


def test_gen_and_compose(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "ssc-batch", "--seed", "4", "--m", "3", "--c", "2", "--k", "2")
    assert code == 0
    batch = tmp_path / "batch.ssc"
    batch.write_text(out)
    code, out, _ = run(capsys, "compose-ssc", str(batch))
    assert code == 0
    comp = formats.parse_ssc(out)
    assert comp.k == 2 + 2


@pytest.mark.parametrize("kind", ["ee", "cbm", "ssc"])
def test_gen_is_seeded(capsys, kind):
    a = run(capsys, "gen", kind, "--seed", "7")[1]
    b = run(capsys, "gen", kind, "--seed", "7")[1]
    assert a == b
    formats.parse_any(a)


def test_bench_json(capsys):
    code, out, _ = run(capsys, "bench", "--json", "--count", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["backends_agree"]
    assert all(row["agree"] for row in doc["kernels"])
    assert len(doc["solver"]) == 3
