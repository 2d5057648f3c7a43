import csv
import json
from fractions import Fraction as F
from pathlib import Path

import pytest

from aifv.cli import main, read_distribution_file
from aifv.model import deserialize_code


def _write_dist(path: Path, lines: str) -> str:
    path.write_text(lines)
    return str(path)


@pytest.fixture
def uniform4_file(tmp_path):
    return _write_dist(tmp_path / "u4.dist", "# uniform over four symbols\n"
                       "a 1/4\nb 1/4\nc 1/4\nd 1/4\n")


def test_read_distribution_file(tmp_path):
    path = _write_dist(tmp_path / "d.dist", "a 0.45  # comment\nb 0.3\nc 0.2\nd 0.05\n")
    dist = read_distribution_file(path)
    assert dist.probs == (F(9, 20), F(3, 10), F(1, 5), F(1, 20))


def test_build_reports_optimum(tmp_path, uniform4_file, capsys):
    out = tmp_path / "out"
    rc = main(["build", uniform4_file, "--family", "ternary", "--out", str(out)])
    assert rc == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["L_AIFV"] == "4/3"
    assert (out / "trace.csv").read_text().startswith("m,C,L0,L1,q0,q1,L_AIFV")
    code = deserialize_code((out / "code.json").read_text())
    assert code.family.kind == "ternary"
    assert "L_AIFV = 4/3" in capsys.readouterr().out


def test_build_no_iterate_close_to_optimum(tmp_path, uniform4_file):
    out_full = tmp_path / "full"
    out_once = tmp_path / "once"
    assert main(["build", uniform4_file, "--family", "ternary",
                 "--out", str(out_full)]) == 0
    assert main(["build", uniform4_file, "--family", "ternary", "--no-iterate",
                 "--out", str(out_once)]) == 0
    full = F(json.loads((out_full / "summary.json").read_text())["L_AIFV"])
    once = F(json.loads((out_once / "summary.json").read_text())["L_AIFV"])
    assert once <= full * F(1005, 1000)


def test_build_rejects_singleton(tmp_path, capsys):
    path = _write_dist(tmp_path / "one.dist", "a 1\n")
    assert main(["build", path, "--family", "binary", "--out", str(tmp_path / "o")]) == 3
    assert "error" in capsys.readouterr().err


def test_encode_decode_round_trip(tmp_path, uniform4_file):
    out = tmp_path / "out"
    assert main(["build", uniform4_file, "--family", "ternary", "--out", str(out)]) == 0
    message = tmp_path / "msg.txt"
    message.write_text("abcdabcdddccba" * 20)
    packed = tmp_path / "msg.aifv"
    restored = tmp_path / "restored.txt"
    assert main(["encode", str(out / "code.json"), str(message), str(packed)]) == 0
    assert main(["decode", str(packed), str(restored),
                 "--code", str(out / "code.json")]) == 0
    assert restored.read_text() == message.read_text()


def test_encode_decode_eof_mode(tmp_path, uniform4_file):
    out = tmp_path / "out"
    assert main(["build", uniform4_file, "--family", "ternary", "--eof",
                 "--out", str(out)]) == 0
    message = tmp_path / "msg.txt"
    message.write_text("abba" * 10)
    packed = tmp_path / "msg.aifv"
    restored = tmp_path / "restored.txt"
    assert main(["encode", str(out / "code.json"), str(message), str(packed),
                 "--framing", "eof"]) == 0
    assert main(["decode", str(packed), str(restored)]) == 0
    assert restored.read_text() == message.read_text()


def test_encode_unknown_symbol(tmp_path, uniform4_file, capsys):
    out = tmp_path / "out"
    assert main(["build", uniform4_file, "--family", "ternary", "--out", str(out)]) == 0
    message = tmp_path / "msg.txt"
    message.write_text("abcz")
    assert main(["encode", str(out / "code.json"), str(message),
                 str(tmp_path / "x.aifv")]) == 3


def test_decode_truncated_container(tmp_path, uniform4_file):
    out = tmp_path / "out"
    assert main(["build", uniform4_file, "--family", "ternary", "--out", str(out)]) == 0
    message = tmp_path / "msg.txt"
    message.write_text("abcd" * 50)
    packed = tmp_path / "msg.aifv"
    assert main(["encode", str(out / "code.json"), str(message), str(packed)]) == 0
    packed.write_bytes(packed.read_bytes()[:-20])
    assert main(["decode", str(packed), str(tmp_path / "y.txt")]) == 3


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["bogus-command"])
    assert err.value.code == 2


def test_time_limit_exit_code(tmp_path, monkeypatch, capsys):
    path = _write_dist(tmp_path / "p8.dist",
                       "\n".join(f"s{i} 1/8" for i in range(8)) + "\n")
    monkeypatch.setenv("AIFV_TIME_LIMIT", "0")
    assert main(["build", path, "--family", "binary",
                 "--out", str(tmp_path / "o")]) == 4
    assert "time" in capsys.readouterr().err.lower()


def test_bench_csv_and_plot(tmp_path):
    out_csv = tmp_path / "bench.csv"
    out_png = tmp_path / "bench.png"
    rc = main(["bench", "--family", "ternary", "--dist", "P0",
               "--n-range", "4:5", "--out", str(out_csv), "--plot", str(out_png)])
    assert rc == 0
    rows = list(csv.DictReader(out_csv.open()))
    assert [r["n"] for r in rows] == ["4", "5"]
    first = rows[0]
    assert F(first["L_H"]) == F(3, 2)
    assert F(first["L_AIFV"]) == F(4, 3)
    assert F(first["L_H_X2"]) == F(43, 32)
    assert F(rows[1]["L_AIFV"]) == F(23, 15)
    for row in rows:
        h = float(row["H"])
        assert h <= float(F(row["L_AIFV"])) <= float(F(row["L_H"])) + 1e-12
        assert float(F(row["L_AIFV"])) < h + 1
    assert out_png.exists() and out_png.stat().st_size > 1000


def test_bench_binary_uniform_matches_huffman(tmp_path):
    out_csv = tmp_path / "bench.csv"
    rc = main(["bench", "--family", "binary", "--dist", "P0",
               "--n-range", "4:6", "--out", str(out_csv)])
    assert rc == 0
    for row in csv.DictReader(out_csv.open()):
        assert F(row["L_AIFV"]) == F(row["L_H"])


def test_oracle_command_agrees(tmp_path, uniform4_file, capsys):
    rc = main(["oracle", uniform4_file, "--family", "ternary", "--depth", "3"])
    assert rc == 0
    assert "AGREE" in capsys.readouterr().out


def test_oracle_cap_exit(tmp_path, capsys):
    path = _write_dist(tmp_path / "six.dist",
                       "\n".join(f"s{i} 1/6" for i in range(6)) + "\n")
    assert main(["oracle", path, "--family", "binary"]) == 3
    assert "cap" in capsys.readouterr().err.lower()
