import json
import os
import subprocess
import sys

import pytest

from conftest import FIXTURES
from klytor import io as kio
from klytor.cli import run
from klytor.examples import example_tangent_pn
from klytor.fan import projective_space_fan
from klytor.plfunc import PLFunction
from klytor.tropical import LinearConfiguration, TropPoint

TP2 = os.path.join(FIXTURES, "tp2.json")


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    return code, capsys.readouterr().out


def call_json(capsys, *argv):
    code, out = call(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def tp2_files(tmp_path, tp2):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(kio.dumps(kio.config_to_json(LinearConfiguration(tp2.fan.rays))))
    point = tmp_path / "point.json"
    point.write_text(kio.dumps(kio.point_to_json(TropPoint.of_bundle(tp2, LinearConfiguration(tp2.fan.rays)))))
    fan = tmp_path / "fan.json"
    fan.write_text(kio.dumps(kio.fan_to_json(tp2.fan)))
    return {"cfg": cfg, "point": point, "fan": fan, "dir": tmp_path}


class TestFormats:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_fixtures_match_the_builder(self, n):
        data = kio.load_json(os.path.join(FIXTURES, f"tp{n}.json"))
        assert data == json.loads(kio.dumps(kio.bundle_to_json(example_tangent_pn(n))))
        b = kio.bundle_from_json(data)
        assert b.filtrations == example_tangent_pn(n).filtrations

    def test_filtration_entries_are_cumulative(self):
        f = kio.filtration_from_json(2, [{"level": 0, "basis": [["1", "0"]]}, {"level": 1, "basis": [["0", "1"]]}])
        assert f.at(0).is_full() and f.at(1).dim == 1 and f.at(2).is_zero()

    def test_rationals(self):
        assert kio.parse_rat("-3/4") == kio.parse_rat(" -6/8 ")
        for bad in ("1/0", "x", True, None, [1]):
            with pytest.raises(kio.FormatError):
                kio.parse_rat(bad)

    def test_pl_round_trip(self, fan_p2):
        phi = PLFunction.from_ray_values(fan_p2, [1, -2, 3])
        assert kio.pl_from_json(json.loads(kio.dumps(kio.pl_to_json(phi)))) == phi
        bad = kio.pl_to_json(phi)
        bad["values_on_rays"][0] = "7"
        with pytest.raises(kio.FormatError):
            kio.pl_from_json(bad)

    def test_config_and_point(self, tp2):
        cfg = LinearConfiguration(tp2.fan.rays)
        assert kio.config_from_json({"matrix": [[1, 0, -1], [0, 1, -1]]}).vectors == cfg.vectors
        pt = TropPoint.of_bundle(tp2, cfg)
        again = kio.point_from_json(json.loads(kio.dumps(kio.point_to_json(pt))))
        assert all(f == g for f, g in zip(again, pt))

    def test_csv(self):
        text = kio.diagram_to_csv([[1, 0], [-2, 3]])
        assert text == "1,0\n-2,3\n"
        assert kio.diagram_from_csv(text + "\n") == [[1, 0], [-2, 3]]
        for bad in ("1,x\n", "1,2\n3\n"):
            with pytest.raises(kio.FormatError):
                kio.diagram_from_csv(bad)

    def test_missing_pieces(self, tp2):
        d = kio.bundle_to_json(tp2)
        del d["filtrations"]["1"]
        with pytest.raises(kio.FormatError):
            kio.bundle_from_json(d)
        with pytest.raises(kio.FormatError):
            kio.fan_from_json({"rays": [[1, 0]]})


class TestCommands:
    def test_example(self, capsys):
        code, out = call(capsys, "example", "--tangent-pn", 2)
        assert code == 0
        with open(TP2) as fh:
            assert out == fh.read()

    def test_validate(self, capsys):
        code, out = call_json(capsys, "validate", "--bundle", TP2)
        assert code == 0 and out["valid"] and out["rank"] == 2 and len(out["cones"]) == 3

    def test_phi_eval_and_pl_val(self, capsys):
        code, out = call_json(capsys, "phi-eval", "--bundle", TP2, "--point", "1,1")
        assert code == 0 and out["valuation"]["values"] == [1]
        code, out = call_json(capsys, "pl-val", "--bundle", TP2, "--vector", "1,0")
        rays = [tuple(r) for r in out["fan"]["rays"]]
        assert code == 0 and len(rays) == 4
        assert out["values_on_rays"][rays.index((1, 0))] == "1"

    def test_split_and_curves(self, capsys):
        assert call_json(capsys, "split", "--bundle", TP2)[1] == {"split": False, "frame": None}
        code, out = call_json(capsys, "curve-split", "--bundle", TP2)
        assert code == 0 and [w["degrees"] for w in out["walls"]] == [[1, 2]] * 3
        code, out = call_json(capsys, "curve-split", "--bundle", TP2, "--wall", "0")
        assert len(out["walls"]) == 1
        assert call(capsys, "curve-split", "--bundle", TP2, "--wall", "0,1")[0] == 1

    def test_positivity(self, capsys):
        code, out = call_json(capsys, "positivity", "--bundle", TP2)
        assert code == 0 and out["nef"] and out["ample"] and out["globally_generated"]
        code, out = call_json(capsys, "positivity", "--bundle", os.path.join(FIXTURES, "nef_not_gg.json"))
        assert out["nef"] and not out["globally_generated"]

    def test_h0_and_parliament(self, capsys):
        code, out = call_json(capsys, "h0", "--bundle", TP2)
        assert code == 0 and out["total"] == 8
        code, out = call_json(capsys, "parliament", "--bundle", TP2)
        assert code == 0 and out["total"] == 8 and len(out["ground"]) == 3 and len(out["arrangement"]) == 5

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "h0.json"
        code, out = call(capsys, "h0", "--bundle", TP2, "--out", target)
        assert code == 0 and out == "" and json.loads(target.read_text())["total"] == 8

    def test_tropical_commands(self, capsys, tp2_files):
        code, out = call_json(capsys, "trop", "check", "--point", tp2_files["point"], "--config", tp2_files["cfg"])
        assert code == 0 and out == {"member": True}
        code, out = call_json(capsys, "trop", "reconstruct", "--point", tp2_files["point"],
                              "--config", tp2_files["cfg"], "--fan", tp2_files["fan"])
        with open(TP2) as fh:
            assert code == 0 and out == json.load(fh)
        code, out = call(capsys, "diagram", "--spanning", tp2_files["cfg"], "--bundle", TP2)
        assert code == 0 and out == "1,0,0\n0,1,0\n0,0,1\n"
        code, out2 = call(capsys, "trop", "diagram", "--spanning", tp2_files["cfg"],
                          "--point", tp2_files["point"], "--fan", tp2_files["fan"])
        assert out2 == out
        matrix = tp2_files["dir"] / "d.csv"
        matrix.write_text(out)
        code, out = call_json(capsys, "trop", "from-diagram", "--ideal", tp2_files["cfg"],
                              "--fan", tp2_files["fan"], "--matrix", matrix)
        with open(TP2) as fh:
            assert code == 0 and out == json.load(fh)

    def test_tropical_refutation(self, capsys, tp2_files, fan_p2):
        bad = tp2_files["dir"] / "bad.json"
        pt = TropPoint([PLFunction.linear(u, fan_p2) for u in [(1, 0), (0, 1), (5, 5)]])
        bad.write_text(kio.dumps(kio.point_to_json(pt)))
        code, out = call_json(capsys, "trop", "check", "--point", bad, "--config", tp2_files["cfg"])
        assert code == 0 and not out["member"]
        values = out["witness"]["values"]
        assert sorted(values).count(min(values)) == 1
        code, out = call_json(capsys, "trop", "reconstruct", "--point", bad, "--config", tp2_files["cfg"])
        assert code == 2 and out["error"] == "NotATropicalPoint" and out["witness"] is not None


class TestErrors:
    def test_broken_bundle_names_the_cone(self, capsys):
        code, out = call_json(capsys, "validate", "--bundle", os.path.join(FIXTURES, "broken.json"))
        assert code == 2
        assert out["error"] == "IncompatibleFiltrations" and out["cone"] == 0 and out["rays"] == [0, 1, 2, 3]

    def test_io_and_format_errors(self, capsys, tmp_path):
        code, out = call_json(capsys, "validate", "--bundle", tmp_path / "missing.json")
        assert code == 1 and "error" in out
        junk = tmp_path / "junk.json"
        junk.write_text("{not json")
        assert call_json(capsys, "h0", "--bundle", junk)[0] == 1
        assert call_json(capsys, "phi-eval", "--bundle", TP2, "--point", "1,a")[0] == 1
        assert call(capsys, "no-such-command")[0] == 1

    def test_domain_errors(self, capsys, tmp_path):
        cone = tmp_path / "cone.json"
        from klytor.examples import line_bundle
        from klytor.fan import Fan
        cone.write_text(kio.dumps(kio.bundle_to_json(line_bundle(Fan([(1, 0), (0, 1)], [(0, 1)]), [0, 0]))))
        code, out = call_json(capsys, "positivity", "--bundle", cone)
        assert code == 2 and out["error"] == "PositivityError"

    def test_thread_setting(self, capsys, monkeypatch):
        _, single = call(capsys, "h0", "--bundle", TP2)
        monkeypatch.setenv("KLYTOR_THREADS", "3")
        _, multi = call(capsys, "h0", "--bundle", TP2)
        assert single == multi
        monkeypatch.setenv("KLYTOR_THREADS", "zero")
        assert call(capsys, "h0", "--bundle", TP2)[0] == 1


def test_console_script_is_byte_identical(tmp_path):
    outs = []
    for _ in range(2):
        proc = subprocess.run([sys.executable, "-m", "klytor.cli", "--seed", "3", "parliament", "--bundle", TP2],
                              capture_output=True, check=True)
        outs.append(proc.stdout)
    assert outs[0] == outs[1] and json.loads(outs[0])["seed"] == 3
