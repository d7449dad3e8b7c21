import io

import numpy as np
import pytest

from geofirm.algorithms import Trace
from geofirm.cli import main, run_experiment, verify_suite
from geofirm.config import load_experiment
from geofirm.errors import ConfigError
from geofirm.presets import PRESETS, preset_text
from geofirm.spaces import Euclidean, PoincareDisk

RANDOM_START = """\
seed = 11
space.kind = poincare_disk
algorithm = cyclic_projections
sets.0.kind = ball
sets.0.center = -0.3, 0.0
sets.0.radius = 0.5
sets.1.kind = ball
sets.1.center = 0.3, 0.0
sets.1.radius = 0.5
x0 = random
"""


def run_text(text):
    out, err = io.StringIO(), io.StringIO()
    code, trace, record = run_experiment(text, out, err)
    return code, out.getvalue(), err.getvalue(), trace, record


class TestPresets:
    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_parse(self, name):
        load_experiment(preset_text(name))

    def test_hyperbolic(self):
        code, csv, _, trace, _ = run_text(preset_text("cp-hyperbolic-2balls"))
        assert code == 0 and trace.residuals[-1] < 1e-8
        back = Trace.read_csv(io.StringIO(csv), PoincareDisk())
        assert back.residuals == trace.residuals

    def test_quadratics(self):
        code, _, _, trace, record = run_text(preset_text("prox-split-euclidean-quadratics"))
        a, b = np.array([1.0, 0.0]), np.array([0.0, 3.0])
        assert code == 0 and record.certified
        np.testing.assert_allclose(trace.final, (a + 2 * b) / 3, atol=1e-8)

    def test_projected_gradient(self):
        code, _, _, trace, _ = run_text(preset_text("pg-euclidean-halfplane"))
        assert code == 0
        np.testing.assert_allclose(trace.final, [2.0, 0.0], atol=1e-8)

    def test_rotation_control(self):
        code, _, err, _, record = run_text(preset_text("rotation-control"))
        assert code == 4 and not record.certified
        assert "certified=False" in err

    @pytest.mark.parametrize("name", ["cp-spherical-2balls", "prox-split-tree", "cp-euclidean-halfplanes"])
    def test_others_finish(self, name):
        assert run_text(preset_text(name))[0] == 0

    def test_list(self, capsys):
        assert main(["presets", "list"]) == 0
        names = [line.split("\t")[0] for line in capsys.readouterr().out.splitlines()]
        assert names == list(PRESETS)

    def test_show_unknown(self, capsys):
        assert main(["presets", "show", "nope"]) == 2


class TestConfigErrors:
    def test_malformed_line(self):
        code, _, err, _, _ = run_text("seed = 1\nspace.kind euclidean\n")
        assert code == 2 and "line 2" in err

    def test_unknown_key(self):
        code, _, err, _, _ = run_text(RANDOM_START + "colour = blue\n")
        assert code == 2 and "line 11" in err and "colour" in err

    def test_duplicate(self):
        with pytest.raises(ConfigError, match="line 2"):
            load_experiment("seed = 1\nseed = 2\n")

    def test_missing_seed(self, monkeypatch):
        monkeypatch.delenv("GEOFIRM_SEED", raising=False)
        code, _, err, _, _ = run_text(RANDOM_START.replace("seed = 11\n", ""))
        assert code == 2 and "seed" in err

    def test_bad_space(self):
        code, _, _, _, _ = run_text("seed = 1\nspace.kind = klein\nalgorithm = iterate\n")
        assert code == 2

    def test_point_outside_space(self):
        code, _, err, _, _ = run_text(RANDOM_START.replace("x0 = random", "x0 = 0.9, 0.9"))
        assert code == 2

    def test_missing_file(self, tmp_path):
        assert main(["run", str(tmp_path / "absent.cfg")]) == 2

    def test_unknown_preset(self):
        assert main(["run", "--preset", "nope"]) == 2


class TestDeterminism:
    def test_byte_identical(self, tmp_path):
        paths = []
        for i in range(2):
            out = tmp_path / f"t{i}.csv"
            assert main(["run", "--preset", "cp-hyperbolic-2balls", "--output", str(out)]) == 0
            paths.append(out.read_bytes())
        assert paths[0] == paths[1]

    def test_random_start_follows_seed(self, monkeypatch):
        monkeypatch.delenv("GEOFIRM_SEED", raising=False)
        a = run_text(RANDOM_START)[1]
        assert a == run_text(RANDOM_START)[1]
        assert a != run_text(RANDOM_START.replace("seed = 11", "seed = 12"))[1]

    def test_env_overrides_seed(self, monkeypatch):
        monkeypatch.setenv("GEOFIRM_SEED", "12")
        a = run_text(RANDOM_START)[1]
        monkeypatch.delenv("GEOFIRM_SEED")
        assert a == run_text(RANDOM_START.replace("seed = 11", "seed = 12"))[1]

    def test_certificate_file(self, tmp_path):
        out = tmp_path / "hp.csv"
        assert main(["run", "--preset", "cp-euclidean-halfplanes", "--output", str(out)]) == 0
        cert = (tmp_path / "hp.csv.cert").read_text().splitlines()
        assert cert[0] == "certified,True"


class TestVerify:
    def test_zero_samples(self):
        assert verify_suite(n_samples=0) == []

    def test_small_suite_passes(self):
        rows = verify_suite(n_samples=50, seed=3)
        assert rows and all(r["passed"] for r in rows)
        invariants = {(r["space"], r["invariant"]) for r in rows}
        assert len(invariants) == len(rows)

    def test_seed_changes_keep_verdicts(self):
        spaces = [Euclidean(2), PoincareDisk()]
        a = verify_suite(spaces, 40, seed=1)
        b = verify_suite(spaces, 40, seed=2)
        assert [r["passed"] for r in a] == [r["passed"] for r in b]
        assert verify_suite(spaces, 40, seed=1) == a

    def test_command(self, capsys):
        assert main(["verify", "--samples", "20", "--seed", "5"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "space,invariant,n_samples,worst_slack,passed"


class TestCertifyCommand:
    def test_halfplanes(self, tmp_path, capsys):
        out = tmp_path / "hp.csv"
        main(["run", "--preset", "cp-euclidean-halfplanes", "--output", str(out)])
        capsys.readouterr()
        assert main(["certify", str(out), "alpha=0.6666666666666666", "space.kind=euclidean",
                     "space.dim=2"]) == 0
        assert capsys.readouterr().out.startswith("certified,True")

    def test_rotation(self, tmp_path):
        out = tmp_path / "rot.csv"
        main(["run", "--preset", "rotation-control", "--output", str(out)])
        assert main(["certify", str(out), "alpha=0.5"]) == 4

    def test_bad_params(self, tmp_path):
        out = tmp_path / "hp.csv"
        main(["run", "--preset", "cp-euclidean-halfplanes", "--output", str(out)])
        assert main(["certify", str(out)]) == 2
        assert main(["certify", str(out), "alpha=0.5", "speed=3"]) == 2
        assert main(["certify", str(out), "alpha"]) == 2
        assert main(["certify", str(tmp_path / "none.csv"), "alpha=0.5"]) == 2
