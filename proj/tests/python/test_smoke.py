import math
import os
from pathlib import Path

import numpy as np
import pytest

import anosov_lab as al

CONFIGS = Path(os.environ.get("ANOSOV_CONFIG_DIR", Path(__file__).resolve().parents[2] / "configs"))
SPHERE = [(1, 2, 0, 1), (1, 0, 2, 1)]


def test_tau_d_is_multiplicative():
    a, b = (1.0, 2.0, 0.0, 1.0), (1.0, 0.0, 2.0, 1.0)
    ab = (5.0, 2.0, 2.0, 1.0)
    for d in range(2, 6):
        assert np.allclose(al.tau_d(a, d) @ al.tau_d(b, d), al.tau_d(ab, d))


def test_singular_gaps_match_displacement():
    for word, displacement, gaps in al.singular_gaps(SPHERE, 3, 5):
        assert all(abs(g - displacement) < 1e-8 for g in gaps), word


def test_veronese_tuples():
    assert al.is_positive_tuple([al.veronese(x, 3) for x in (0.0, 1.0, math.inf)])[0]
    assert not al.is_positive_tuple([al.veronese(x, 3) for x in (0.0, 2.0, 1.0, math.inf)])[0]


def test_run_certify(tmp_path):
    code, report = al.run("certify", CONFIGS / "tau3_punctured_sphere.json", tmp_path)
    assert code == 0
    assert report["verdict"] == "pass"
    assert (tmp_path / "report.json").exists()


def test_errors():
    assert al.fnv1a_hex("foobar") == "85944171f73967e8"
    with pytest.raises(al.AnosovError):
        al.run("certify", CONFIGS / "missing.json")
