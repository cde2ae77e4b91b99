import io
import subprocess
import sys

import numpy as np
import pytest

import reference as ref
from biocontrol_hopf.cli import read_q_file, run
from biocontrol_hopf.config import ConfigError

Q_ARGS = ["--k1", "0.00331", "--k2", "0.001"]


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def parse_csv(text):
    lines = text.strip().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def test_equilibria_csv():
    code, out, _ = call("equilibria", *Q_ARGS, "--csv", "-")
    header, rows = parse_csv(out)
    assert code == 0 and header == ["name", "P", "M", "L", "G"]
    assert [r[0] for r in rows] == ["A1", "A2", "A3", "A4"]


def test_classify_text():
    code, out, _ = call("classify", "--k1", "0.001", "--k2", "0.001")
    assert code == 0
    assert "A1: saddle 2-2" in out and "A2: saddle 3-1" in out


def test_hopf_with_printed_eigenvector(tmp_path):
    qfile = tmp_path / "q.txt"
    qfile.write_text("\n".join(f"{v.real:.12g} {v.imag:.12g}" for v in ref.Q_VECTOR) + "\n")
    code, out, _ = call("hopf", *Q_ARGS, "--q-from-file", str(qfile), "--csv", "-")
    header, rows = parse_csv(out)
    values = dict(zip(header, map(float, rows[0])))
    assert code == 0
    assert values["re_g21"] == pytest.approx(0.057297, abs=1e-4)
    assert values["im_g21"] == pytest.approx(-0.027485, abs=1e-4)
    assert values["omega0"] == pytest.approx(2.8467, abs=1e-4)


def test_hopf_without_snapping_is_off_curve():
    code, _, err = call("hopf", *Q_ARGS, "--snap", "none")
    assert code == 2 and err.startswith("error: not-on-sigma: ")


def test_hopf_needs_parameters():
    code, _, err = call("hopf", "--k1", "0.00331")
    assert code == 1 and err.startswith("error: invalid-input: ")


def test_usage_errors():
    assert call("bogus")[0] == 1
    assert call()[0] == 1
    code, _, err = call("equilibria", "--k1", "x")
    assert code == 1 and err.startswith("error: usage: ")


def test_config_error_reports_line(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("k1 = 0.002\nalpha1 = -1\n")
    code, _, err = call("equilibria", "--config", str(cfg))
    assert code == 1 and err.startswith("error: parse: line 2: ")


def test_missing_config_file(tmp_path):
    code, _, err = call("equilibria", "--config", str(tmp_path / "none.cfg"), *Q_ARGS)
    assert code == 1 and err.startswith("error: io: ")


def test_sigma_includes_table_rows(tmp_path):
    svg = tmp_path / "sigma.svg"
    csv = tmp_path / "sigma.csv"
    code, out, _ = call("sigma", "--n", "20", "--svg", str(svg), "--csv", str(csv))
    assert code == 0 and "points on the Hopf curve" in out
    header, rows = parse_csv(csv.read_text())
    k1 = [float(r[0]) for r in rows]
    for row in ref.SIGMA_TABLE:
        assert min(abs(np.array(k1) - row[0])) < 1e-12
    assert {r[3] for r in rows} == {"+"}
    assert svg.read_text().startswith("<?xml") and "<svg" in svg.read_text()


def test_sigma_beyond_tangency_is_empty():
    code, out, _ = call("sigma", "--c2", "700", "--n", "10", "--csv", "-")
    assert code == 0 and out.strip() == "k1,k2,omega0,l1_sign,delta_residual"


def test_sigma_is_deterministic():
    first = call("sigma", "--n", "15", "--csv", "-")
    second = call("sigma", "--n", "15", "--csv", "-")
    assert first == second


def test_tangency_command():
    code, out, _ = call("tangency", "--csv", "-")
    header, rows = parse_csv(out)
    values = dict(zip(header, map(float, rows[0])))
    assert values["c2_star"] == pytest.approx(650.41463, abs=1e-2)


def test_simulate_at_equilibrium():
    code, out, _ = call("simulate", "--k1", "0.005", "--k2", "0.001", "--t-end", "10",
                        "--every", "1", "--csv", "-")
    header, rows = parse_csv(out)
    assert code == 0 and len(rows) == 11 and float(rows[-1][0]) == 10.0


def test_simulate_blow_up_exit_code():
    code, _, err = call("simulate", *Q_ARGS, "--x0", "1000,1000,100,500", "--t-end", "5")
    assert code == 2 and err.startswith("error: integration-failure: ")


def test_simulate_bad_state():
    code, _, err = call("simulate", *Q_ARGS, "--x0", "1,2")
    assert code == 1 and err.startswith("error: invalid-input: ")


def test_orbit_command():
    code, out, _ = call("orbit", "--k1", "0.00332", "--k2", "0.001")
    assert code == 0 and "verdict: unstable-saddle-cycle" in out


def test_orbit_in_unstable_region():
    code, _, err = call("orbit", "--k1", "0.0033", "--k2", "0.001")
    assert code == 2 and err.startswith("error: domain: ")


def test_read_q_file_formats(tmp_path):
    path = tmp_path / "q.txt"
    path.write_text("1+2j\n3 - 4 i\n5 6\n# comment\n-7.5e-1-1e2i\n")
    assert np.allclose(read_q_file(path), [1 + 2j, 3 - 4j, 5 + 6j, -0.75 - 100j])
    path.write_text("1\n2\n3\n")
    with pytest.raises(ConfigError):
        read_q_file(path)


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "biocontrol_hopf", "equilibria", *Q_ARGS],
                          capture_output=True, text=True, check=False)
    assert done.returncode == 0 and "R1 = 3.8169" in done.stdout
