import json
import math

import numpy as np
import pytest

import logtr


def test_compose_matches_einsum_trace():
    cores = logtr.random_cores([4, 5, 3], [2, 3, 2], seed=1)
    x = logtr.compose(cores)
    expect = np.einsum("aib,bjc,cka->ijk", *cores)
    assert x.shape == (4, 5, 3)
    np.testing.assert_allclose(x, expect, rtol=1e-12, atol=1e-12)


def test_tr_svd_recovers_exact_ring():
    x = logtr.compose(logtr.random_cores([7, 6, 5], [2, 3, 2], seed=2))
    cores = logtr.tr_svd(x, [2, 3, 2])
    assert np.linalg.norm(logtr.compose(cores) - x) / np.linalg.norm(x) < 1e-8


def test_degradation_shapes_and_operators():
    model = logtr.Degradation([16, 16, 8], factor=4, bands=4)
    x = logtr.compose(logtr.phantom_cores([16, 16, 8], [2, 3, 2], seed=3))
    y, z = model.degrade(x)
    assert y.shape == (4, 4, 8)
    assert z.shape == (16, 16, 4)
    np.testing.assert_allclose(model.width_op.sum(axis=1), 1.0)
    np.testing.assert_allclose(z, np.einsum("ijk,bk->ijb", x, model.spectral_op), atol=1e-12)


def test_log_threshold_global_minimizer():
    assert logtr.log_threshold(0.0, 1.0, 0.01) == 0.0
    assert logtr.log_threshold(2.0, 0.5, 0.01) == 0.0
    s, t, eps = 3.0, 0.5, 0.01
    x = logtr.log_threshold(s, t, eps)
    grid = np.linspace(0.0, s, 200001)
    f = t * np.log(grid + eps) + 0.5 * (grid - s) ** 2
    assert abs(x - grid[np.argmin(f)]) < 1e-4


def test_metrics_identity_and_noise():
    rng = np.random.default_rng(0)
    ref = rng.uniform(0, 255, size=(20, 20, 3))
    same = logtr.metrics(ref, ref)
    assert math.isinf(same["psnr"]) and same["sam"] == 0.0
    noisy = ref + rng.normal(0, 5, size=ref.shape)
    m = logtr.metrics(ref, noisy)
    mse = np.mean((ref - noisy) ** 2, axis=(0, 1))
    assert m["psnr"] == pytest.approx(np.mean(10 * np.log10(255.0**2 / mse)))
    assert 0.0 < m["ssim"] < 1.0


def test_tnsr_round_trip(tmp_path):
    x = np.arange(24, dtype=float).reshape(2, 3, 4) / 7.0
    logtr.write_tnsr(tmp_path / "x.tnsr", x)
    back = logtr.read_tnsr(tmp_path / "x.tnsr")
    assert back.tobytes() == x.tobytes()
    (tmp_path / "bad.tnsr").write_bytes(b"NOPE")
    with pytest.raises(logtr.TnsrError):
        logtr.read_tnsr(tmp_path / "bad.tnsr")


def test_solve_improves_on_noiseless_phantom():
    dims = [32, 32, 16]
    x = logtr.compose(logtr.phantom_cores(dims, [2, 4, 2], seed=7))
    model = logtr.Degradation(dims, factor=4, bands=4, blur="delta")
    y, z = model.degrade(x)
    cfg = logtr.SolverConfig()
    cfg.ranks = [2, 4, 2]
    out = logtr.solve(y, z, model, cfg)
    assert out["fused"].shape == tuple(dims)
    assert np.linalg.norm(out["fused"] - x) / np.linalg.norm(x) < 1e-2
    objectives = [out["initial_objective"]] + [h["objective"] for h in out["history"]]
    assert all(b <= a * (1 + 1e-6) for a, b in zip(objectives, objectives[1:]))


def test_solve_rejects_bad_shapes():
    model = logtr.Degradation([16, 16, 8])
    with pytest.raises(logtr.ShapeError):
        logtr.solve(np.zeros((4, 4, 7)), np.zeros((16, 16, 4)), model)


def test_run_config_reports_metrics():
    cfg = {"phantom_dims": [16, 16, 8], "phantom_ranks": [2, 3, 2], "ranks": [2, 3, 2], "k_max": 5, "seed": 3}
    out = logtr.run_config(json.dumps(cfg))
    assert out["metrics"]["psnr"] > 0
    assert out["baseline"] is not None
    with pytest.raises(logtr.ConfigError):
        logtr.run_config(json.dumps({"phantom_dims": [8, 8, 4], "no_such_key": 1}))
