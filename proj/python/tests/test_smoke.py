import math

import numpy as np
import pytest

import smm

GOLDEN = (math.sqrt(5) - 1) / 2


def test_pinned_symbols():
    assert smm.gamma0_hat([0.25], 5.0) == pytest.approx(-1 / math.sqrt(21), abs=1e-14)
    assert smm.gamma0_hat_plus([0.25], 5.0) == pytest.approx(-(5 - math.sqrt(21)) / 2, abs=1e-14)


def test_model_params():
    p = smm.ModelParams(1.0, [GOLDEN], 0.1)
    assert p.d == 1 and p.c_d == 4.0
    assert p.potential([0]) == pytest.approx(math.tan(math.pi * 0.1))
    with pytest.raises(ValueError):
        smm.ModelParams(0.0, [GOLDEN], 0.1)


def test_finite_volume_agrees_with_prediction():
    p = smm.ModelParams(1.0, [GOLDEN], 0.0)
    op = smm.build_finite(p, 30)
    H = op.dense()
    assert H.shape == (op.dim, op.dim)
    assert np.allclose(H, H.T)
    eig = smm.eig_window(op, 4.3, 7.5)
    pred = smm.predict_eigenvalues(1.0, GOLDEN, 0.0, -30, 30, 4.3, 7.5)
    assert eig and pred
    for e in eig:
        assert min(abs(e["E"] - x["E"]) for x in pred) < 1e-2
        assert abs(np.linalg.norm(e["psi"]) - 1) < 1e-12


def test_free_box_in_band():
    p = smm.ModelParams(1.0, [GOLDEN], 0.0)
    ev = smm.build_finite(p, 8, coupling=0.0).eigenvalues()
    assert ev.min() > -4 and ev.max() < 4


def test_resolvent_and_reduction():
    p = smm.ModelParams(1.0, [GOLDEN], 0.0)
    assert smm.resolvent_check(p, 16, 5 - 1j, 6)["max_rel_error"] < 1e-5
    hits = smm.reduced_equation_solve(p, 5.5, 6.2, 20)
    assert len(hits) == 1 and abs(hits[0]["E"] - 5.847930107916) < 1e-9


def test_continued_fractions():
    cf = smm.cf_expand("golden", 10)
    assert cf["q"][:6] == [1, 1, 2, 3, 5, 8]
    assert smm.determinant_identity_holds("silver", 20)
    assert smm.beta_estimate("beta:1.0", 8) == pytest.approx(1.0, rel=0.1)


def test_errors_map_to_python():
    with pytest.raises(smm.Error, match="PhaseSingularity"):
        smm.build_finite(smm.ModelParams(1.0, [GOLDEN], 0.5), 3)


def test_ergodic_and_cli(tmp_path):
    assert smm.lemma_le()["pass"]
    code, out, err = smm.run_cli(["cf", "--alpha", "golden", "--depth", "12", "--out", str(tmp_path)])
    assert code == 0 and out.strip()
    code, _, err = smm.run_cli(["green", "--z-re", "3"])
    assert code == 2 and "BranchPoint" in err
