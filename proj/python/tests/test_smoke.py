import numpy as np
import pytest
from scipy.linalg import expm

import ctqw


def ring(n, c=1.0):
    h = np.zeros((n, n), complex)
    for i in range(n):
        h[i, (i + 1) % n] = h[(i + 1) % n, i] = c
    return h


def test_joint_space_round_trip():
    s = ctqw.JointSpace([5], m=2)
    assert s.dim == 25
    assert s.joint_index([2, 3]) == 13
    assert list(s.joint_positions(13)) == [2, 3]
    with pytest.raises(ctqw.IndexError):
        s.joint_index([5, 0])


def test_topology_marks_missing_neighbours():
    t = ctqw.topology(ctqw.JointSpace([4], boundary="open"))
    assert t.shape == (4, 3)
    assert t[3, 1] == -1


def test_hamiltonian_matches_hand_built_ring():
    h = ctqw.Hamiltonian(ctqw.JointSpace([6]), ctqw.CouplingModel(tunneling=0.7))
    assert np.allclose(h.dense(), ring(6, 0.7), atol=1e-15)
    assert h.gershgorin_bound() == pytest.approx(1.4)


def test_steppers_against_matrix_exponential():
    space = ctqw.JointSpace([7], m=2)
    h = ctqw.Hamiltonian(space, noise=ctqw.NoiseSpec([-0.2, 0.2], 0.0), seed=3)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    psi /= np.linalg.norm(psi)
    dt = 0.1 / h.gershgorin_bound()
    exact = expm(-1j * h.dense() * dt) @ psi
    assert np.max(np.abs(h.step_eigen(psi, dt) - exact)) <= 1e-12
    assert np.max(np.abs(h.step_taylor(psi, dt, 16) - exact)) <= 1e-13
    assert np.max(np.abs(h.step_rk4(psi, dt) - h.step_taylor(psi, dt, 4))) <= 1e-13


def test_noise_advance_reports_rewrites():
    h = ctqw.Hamiltonian(ctqw.JointSpace([9]), noise=ctqw.NoiseSpec([-0.5, 0.5], 5.0), seed=1)
    res = h.advance_noise(0.0, 1.0)
    assert res["switches"] > 0
    assert res["changed"] == (res["entries_rewritten"] > 0)


def test_density_helpers():
    states = np.eye(4, dtype=complex)
    rho = ctqw.density_matrix(states)
    assert np.allclose(rho, np.eye(4) / 4)
    assert ctqw.purity(states) == pytest.approx(0.25)
    assert ctqw.trace_distance(states[:1], states[1:2]) == pytest.approx(1.0)


def test_run_and_simulate(tmp_path):
    cfg = ctqw.parse_config(
        "dims = [9]\nm = 2\nR = 4\nsteps = 20\npost_rate = 10\nseed = 2\nprecision = \"double\"\n"
    )
    assert cfg.rows == 81
    report = ctqw.run(cfg)
    assert report["snapshots"] == 2
    rho = report["final_density"]
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.allclose(rho, rho.conj().T)
    again = ctqw.run(cfg)
    assert np.array_equal(rho, again["final_density"])

    code, err = ctqw.simulate(cfg, tmp_path)
    assert code == 0, err
    assert (tmp_path / "observables.csv").read_text().startswith("time,name,component_index,value")


def test_errors_and_validation():
    with pytest.raises(ctqw.ConfigError):
        ctqw.parse_config("dims = [9]\nbogus = 1\n")
    ok, text = ctqw.validate()
    assert ok, text
