import numpy as np
import pytest

import qldpc


def repetition(n):
    h = np.zeros((n - 1, n), dtype=np.uint8)
    for i in range(n - 1):
        h[i, i] = h[i, i + 1] = 1
    return h


def test_surface_code_parameters():
    code = qldpc.hgp(repetition(3), repetition(3))
    assert (code.n, code.k) == (13, 1)
    assert code.validate() == []
    assert not ((code.hx.astype(int) @ code.hz.T.astype(int)) % 2).any()
    weight, witness = qldpc.min_weight_logical(code.hx, code.lx, trials=200, seed=1)
    assert weight == 3 and len(witness) == 3


def test_bpc_and_classical_generation():
    code = qldpc.bpc_code(4)
    assert (code.n, code.k) == (72, 8)
    h = qldpc.generate_regular(12, seed=0, pool_size=10)
    assert h.shape == (9, 12)
    assert set(h.sum(axis=0)) == {3} and set(h.sum(axis=1)) == {4}


def test_memory_pipeline():
    code = qldpc.hgp(repetition(3), repetition(3))
    search = qldpc.minimize_depth(code, attempts=10, seed=1)
    assert search.verify(code)
    assert sum(search.histogram.values()) == 10
    schedule = qldpc.Schedule.from_text(search.schedule.text())
    assert schedule.depth == search.schedule.depth
    circuit = qldpc.memory_circuit(code, schedule, rounds=3, p=3e-3)
    dem_z, dem_x = qldpc.build_dem(circuit)
    assert dem_z.num_rounds == 4
    assert dem_z.h.shape == (4 * 6, dem_z.num_mechanisms)
    det, obs = circuit.sample(300, seed=5)
    assert det.shape == (300, circuit.num_detectors) and obs.shape == (300, 1)
    again, _ = circuit.sample(300, seed=5)
    assert (det == again).all()
    flips = qldpc.sliding_window_decode(dem_z, det, W=3, F=2)
    assert flips.shape == obs.shape
    assert (flips != obs).any(axis=1).mean() < 0.2
    weight, witness, notes = qldpc.circuit_distance(dem_z, circuit, trials=200, seed=2)
    assert weight <= 3 and len(notes) == len(witness)


def test_noiseless_circuit_has_no_detections():
    code = qldpc.hgp(repetition(3), repetition(3))
    search = qldpc.minimize_depth(code, attempts=5)
    circuit = qldpc.memory_circuit(code, search.schedule, rounds=2, p=0.0)
    det, obs = circuit.sample(64, seed=1)
    assert not det.any() and not obs.any()


def test_statistics_and_run():
    assert qldpc.lfr(0.0, 16) == 0.0
    assert qldpc.lfr(qldpc.lfr_inverse(1e-3, 16), 16) == pytest.approx(1e-3, abs=1e-12)
    lo, hi = qldpc.wilson_interval(0, 100)
    assert lo == 0.0 and hi > 0
    rows = qldpc.run_memory({"code.family": "rep", "run.rounds": 2, "run.shots": 200, "noise.p": "0.002",
                             "decoder.window": 3, "decoder.offset": 3, "schedule.attempts": 5})
    assert len(rows) == 1
    row = rows[0]
    assert row["shots"] == 200 and 0 <= row["lfr"] <= 1
    assert row["ci"][0] <= row["lfr"] <= row["ci"][1]
    with pytest.raises(ValueError):
        qldpc.run_memory({"run.bogus": 1})


def test_decoder_and_errors():
    h = repetition(5)
    e = np.array([0, 0, 1, 0, 0], dtype=np.uint8)
    s = (h.astype(int) @ e) % 2
    guess = qldpc.bp_osd_decode(h, [0.05] * 5, s.astype(np.uint8))
    assert ((h.astype(int) @ guess) % 2 == s).all()
    with pytest.raises(ValueError):
        qldpc.window_count(10, 3, 5)
