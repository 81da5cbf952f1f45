"""Smoke tests for the python bindings: headline numbers and check verdicts."""

import math

import pytest

import bellforge as bf


def test_bb1_reaches_the_logical_bound():
    model = bf.bb1()
    table = bf.compose_bb(model)
    quad = bf.SettingsQuad("a", "a'", "b", "b'")
    report = bf.chsh(table, quad)
    assert report.x_bi == 4.0
    assert not bf.check_mi(model).satisfied
    assert all(v.satisfied for v in bf.check_no_signaling(model))


def test_dilorenzo_reproduces_the_singlet():
    quad = bf.SettingsQuad(0.0, math.pi / 2, 5 * math.pi / 4, 3 * math.pi / 4)
    model = bf.dilorenzo(quad)
    report = bf.chsh(bf.compose_bb(model), quad)
    assert abs(abs(report.x_bi) - 2 * math.sqrt(2)) <= 1e-12
    table = bf.compose_bb(model)
    p = table.prob([0.0, 3 * math.pi / 4], [1, 1])
    want = bf.quantum_correlation(1, 1, 0.0, 3 * math.pi / 4)
    assert abs(p - want) <= 1e-12


def test_ladder_point_values():
    lat = bf.ladder10()
    table = bf.bell_conditional(lat)
    assert abs(table.prob([1, 1], [1, 1]) - 0.9563261937724757) <= 1e-12
    assert abs(bf.lattice_chsh(lat).x_bi - (-0.6672125985282058)) <= 1e-12
    closed = bf.closed_form_ladder(math.tanh(1.0))
    assert abs(closed.prob([1, 1], [1, 1]) - table.prob([1, 1], [1, 1])) <= 1e-10


def test_lattice_model_bridge_and_checks():
    model = bf.lattice_as_hv_model(bf.ladder10(), ["4"], ["3", "6"], ["5", "8"])
    assert bf.check_oi(model).satisfied
    assert bf.check_pi(model).satisfied
    assert not bf.check_mi(model).satisfied
    assert not bf.check_screening_off(model).satisfied


def test_optimizer_hill_climb():
    space = bf.paper_grid_space()
    best = -4.0
    for seed in range(20):
        start = bf.random_assignment(space, seed)
        best = max(best, bf.hill_climb(space, start).best_x)
    assert best >= 2.86
    assert best > 2 * math.sqrt(2)


def test_serialization_round_trip():
    model = bf.bb1()
    text = bf.model_to_json(model)
    back = bf.model_from_json(text)
    assert back.rho0.entries == model.rho0.entries
    lat = bf.ladder10(1.5, 0.8)
    lat2 = bf.lattice_from_json(bf.lattice_to_json(lat))
    assert lat2.beta == lat.beta
    assert lat2.nodes == lat.nodes


def test_errors_surface_as_python_exceptions():
    with pytest.raises(Exception):
        bf.closed_form_ladder(1.0)
    with pytest.raises(Exception):
        bf.hexagon6(["a", "1", "u"])


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
