import json
import math
import os
import subprocess
import sys

import pytest
from scipy import constants

from dipolar_entanglement import cli

SUBCOMMANDS = ("point", "from-physical", "sweep", "boundary", "figure", "fit", "nspin")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    return json.loads(out)


def write_geom(tmp_path, sites, name="g.xyz"):
    p = tmp_path / name
    p.write_text("# x y z\n" + "\n".join(" ".join(repr(float(c)) for c in s) for s in sites) + "\n")
    return str(p)


TRIANGLE = [(1.0, 0.0, 0.0), (-0.5, math.sqrt(3) / 2, 0.0), (-0.5, -math.sqrt(3) / 2, 0.0)]


class TestParsing:
    @pytest.mark.parametrize(
        "text, value",
        [("pi/2", math.pi / 2), ("pi", math.pi), ("3pi/4", 3 * math.pi / 4),
         ("2*pi/3", 2 * math.pi / 3), ("-pi/4", -math.pi / 4), ("0.25", 0.25)],
    )
    def test_angle(self, text, value):
        assert cli.parse_angle(text) == value

    def test_axis_forms(self):
        assert cli.float_axis("3") == (3.0,)
        assert cli.float_axis("1,2,5") == (1.0, 2.0, 5.0)
        ax = cli.float_axis("0:10:101")
        assert len(ax) == 101 and ax[0] == 0.0 and ax[-1] == 10.0 and ax[1] == pytest.approx(0.1)
        assert cli.angle_axis("0:pi:3")[-1] == math.pi

    @pytest.mark.parametrize("text", ["1:2", "a,b", "0:1:0"])
    def test_bad_axis(self, text):
        with pytest.raises(Exception):
            cli.float_axis(text)


class TestPoint:
    def test_infinite_temperature(self, capsys):
        r = run_json(capsys, "point", "--beta", "0", "--d", "1")
        assert r["concurrence_numeric"] == 0.0
        assert r["concurrence_analytic"] == 0.0

    def test_above_boundary(self, capsys):
        r = run_json(capsys, "point", "--beta", "3", "--d", "1")
        assert r["concurrence_numeric"] > 0
        assert r["concurrence_analytic"] == pytest.approx(r["concurrence_numeric"], abs=1e-10)
        assert 2.21 <= r["boundary_beta_at_d"] <= 2.31

    def test_parallel_orientation_separable(self, capsys):
        r = run_json(capsys, "point", "--beta", "5", "--d", "3", "--theta", "0")
        assert r["concurrence_numeric"] <= 1e-12
        assert r["concurrence_analytic"] is None

    def test_bad_flag_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["point", "--beta", "x", "--d", "1"])
        assert exc.value.code == 2

    def test_domain_error_exit_3(self, capsys):
        code, _, err = run(capsys, "point", "--beta", "-1", "--d", "1")
        assert code == 3 and "error" in err


class TestFromPhysical:
    def test_zeeman_and_beta(self, capsys):
        r = run_json(capsys, "from-physical", "--gamma", "4.0025", "--field", "3",
                     "--temperature", "0.33", "--dipolar-freq", "3")
        assert r["zeeman_freq_khz"] == pytest.approx(12.0075, abs=1e-12)
        expect = constants.h * 12.0075e3 / (constants.k * 0.33e-6)
        assert r["beta"] == pytest.approx(expect, rel=1e-12)
        assert r["beta"] == pytest.approx(1.75, abs=0.01)
        assert 0.1 <= r["critical_temperature_uk"] <= 1.0

    def test_doubling_temperature_halves(self, capsys):
        base = ["from-physical", "--gamma", "4.0025", "--field", "3", "--distance", "0.3"]
        a = run_json(capsys, *base, "--temperature", "0.4")
        b = run_json(capsys, *base, "--temperature", "0.8")
        assert b["beta"] == pytest.approx(a["beta"] / 2, rel=1e-15)
        assert b["d"] == pytest.approx(a["d"] / 2, rel=1e-15)

    def test_distance_convention(self):
        # 0.3 nm fluorine pair: a few kHz
        assert 2.0 < cli.dipolar_frequency_khz(4.0025, 0.3) < 6.0

    def test_nonpositive_exit_3(self, capsys):
        code, _, _ = run(capsys, "from-physical", "--gamma", "0", "--field", "3",
                         "--temperature", "1", "--dipolar-freq", "3")
        assert code == 3

    def test_distance_and_frequency_exclusive(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["from-physical", "--gamma", "4", "--field", "3", "--temperature", "1",
                      "--distance", "1", "--dipolar-freq", "3"])
        assert exc.value.code == 2


class TestTables:
    def test_figure_2_row(self, capsys, tmp_path):
        out = tmp_path / "fig2.csv"
        code, stdout, _ = run(capsys, "figure", "2", "--out", str(out))
        assert code == 0 and "rows=40" in stdout
        lines = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
        assert lines[0] == "d,beta_c,residual,error"
        row = [ln.split(",") for ln in lines[1:] if float(ln.split(",")[0]) == 1.0][0]
        assert 2.21 <= float(row[1]) <= 2.31

    def test_fit(self, capsys, tmp_path):
        out = tmp_path / "fit.csv"
        code, stdout, _ = run(capsys, "fit", "--d", "3", "--beta-max", "3.32", "--out", str(out))
        vals = dict(kv.split("=") for kv in stdout.split())
        assert code == 0
        assert float(vals["a"]) == pytest.approx(-0.71, abs=0.05)
        assert float(vals["b"]) == pytest.approx(0.26, abs=0.03)
        header = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")][0]
        assert header == "a,b,residual_rms,beta_min,beta_max,n_points"

    def test_sweep_both_validation(self, capsys):
        code, out, err = run(capsys, "sweep", "--beta", "0:10:101", "--d", "3",
                             "--theta", "pi/2", "--method", "both")
        assert code == 0 and "rows=101" in err
        meta = {ln[2:].split(":", 1)[0]: json.loads(ln.split(":", 1)[1]) for ln in out.splitlines() if ln.startswith("#")}
        assert meta["max_concurrence_abs_diff"] <= meta["validation_tolerance"] or meta["validation_flag"] == 1
        assert meta["validation_flag"] == 0

    def test_sweep_min_max_steps_json(self, capsys):
        code, out, _ = run(capsys, "sweep", "--beta-min", "1", "--beta-max", "3", "--beta-steps", "3",
                           "--d", "2", "--format", "json")
        doc = json.loads(out)
        assert code == 0 and [r["beta"] for r in doc["rows"]] == [1.0, 2.0, 3.0]
        assert doc["meta"]["concurrence_variant"] == "corrected"

    def test_sweep_conflicting_axes(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["sweep", "--beta", "1", "--beta-min", "0", "--d", "1"])
        assert exc.value.code == 2

    def test_boundary_json(self, capsys):
        doc = json.loads(run(capsys, "boundary", "--d", "0.5,1,2", "--format", "json")[1])
        assert [r["d"] for r in doc["rows"]] == [0.5, 1.0, 2.0]

    def test_unwritable_exit_4(self, capsys, tmp_path):
        code, _, err = run(capsys, "figure", "2", "--out", str(tmp_path / "missing" / "f.csv"))
        assert code == 4 and "error" in err

    def test_unknown_figure_exit_3(self, capsys):
        assert run(capsys, "figure", "9")[0] == 3

    def test_csv_bytes_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            assert run(capsys, "sweep", "--beta", "0:5:11", "--d", "1,3", "--out", str(p))[0] == 0
        assert a.read_bytes() == b.read_bytes()
        assert b"\r" not in a.read_bytes()


class TestNSpin:
    def test_two_spins_match_point(self, capsys, tmp_path):
        g = write_geom(tmp_path, [(0, 0, 0), (1, 0, 0)])
        r = run_json(capsys, "nspin", "--geometry", g, "--beta", "5", "--d-ref", "3")
        p = run_json(capsys, "point", "--beta", "5", "--d", "3")
        for key in ("concurrence_numeric", "concurrence_analytic", "magnetization", "boundary_beta_at_d"):
            assert r[key] == p[key]

    def test_triangle_pairs_equal(self, capsys, tmp_path):
        g = write_geom(tmp_path, TRIANGLE)
        c = [run_json(capsys, "nspin", "--geometry", g, "--beta", "5", "--d-ref", "3", "--pair", *pair)
             ["concurrence_numeric"] for pair in (("1", "2"), ("1", "3"), ("2", "3"))]
        assert max(c) - min(c) <= 1e-10

    def test_zero_coupling(self, capsys, tmp_path):
        g = write_geom(tmp_path, TRIANGLE)
        for pair in (("1", "2"), ("2", "3")):
            r = run_json(capsys, "nspin", "--geometry", g, "--beta", "5", "--d-ref", "0", "--pair", *pair)
            assert r["concurrence_numeric"] == 0.0

    def test_bad_pair_exit_3(self, capsys, tmp_path):
        g = write_geom(tmp_path, TRIANGLE)
        assert run(capsys, "nspin", "--geometry", g, "--beta", "1", "--d-ref", "1", "--pair", "1", "4")[0] == 3

    def test_coincident_sites_exit_3(self, capsys, tmp_path):
        g = write_geom(tmp_path, [(0, 0, 0), (0, 0, 0)])
        assert run(capsys, "nspin", "--geometry", g, "--beta", "1", "--d-ref", "1")[0] == 3

    def test_too_many_spins_exit_5(self, capsys, tmp_path):
        g = write_geom(tmp_path, [(i, 0, 0) for i in range(15)])
        assert run(capsys, "nspin", "--geometry", g, "--beta", "1", "--d-ref", "1")[0] == 5


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_help(sub, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main([sub, "--help"])
    assert exc.value.code == 0
    assert "usage" in capsys.readouterr().out


def test_module_entry_point():
    env = dict(os.environ, PYTHONPATH=os.pathsep.join(sys.path))
    res = subprocess.run([sys.executable, "-m", "dipolar_entanglement", "point", "--beta", "3", "--d", "1"],
                         capture_output=True, text=True, env=env, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["concurrence_numeric"] > 0
