import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavesph.domain import (DomainBox, DomainError, Kind, PairList, ParticleSystem, for_each_neighbor,
                            minimum_image, neighbors_of, rebuild_grid)


def brute_image(xa, xb, box):
    """Shortest displacement over all image shifts {-L, 0, L} on periodic axes."""
    best = None
    choices = [(-1, 0, 1) if p else (0,) for p in box.periodic]
    for s in itertools.product(*choices):
        d = np.asarray(xa) - np.asarray(xb) + np.asarray(s) * box.lengths
        if best is None or d @ d < best @ best:
            best = d
    return best


def brute_pairs(pos, box, radius):
    out = set()
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            d = brute_image(pos[i], pos[j], box)
            if d @ d < radius * radius:
                out.add((i, j))
    return out


def random_system(n, box, seed):
    rng = np.random.default_rng(seed)
    pos = rng.uniform(box.lower, box.upper, (n, 3))
    return ParticleSystem.from_positions(pos, 1000.0, 1.0)


BOX = DomainBox((0.0, 0.0, -1.0), (1.0, 0.6, 0.2), (True, True, False))


def test_minimum_image_examples():
    box = DomainBox((0, 0, 0), (2.0, 2.0, 2.0), (True, False, False))
    np.testing.assert_allclose(minimum_image([1.9, 0, 0], [0.1, 0, 0], box), [-0.2, 0, 0], atol=1e-15)
    np.testing.assert_allclose(minimum_image([0, 1.9, 0], [0, 0.1, 0], box), [0, 1.8, 0])
    assert np.array_equal(minimum_image([0.3, 0.4, 0.5], [0.3, 0.4, 0.5], box), np.zeros(3))


@given(st.lists(st.floats(0.0, 0.999), min_size=6, max_size=6))
def test_minimum_image_matches_brute_force(c):
    box = DomainBox((0, 0, 0), (1.0, 0.5, 2.0), (True, True, False))
    xa = np.array(c[:3]) * box.lengths
    xb = np.array(c[3:]) * box.lengths
    np.testing.assert_allclose(minimum_image(xa, xb, box), brute_image(xa, xb, box), atol=1e-12)


def test_box_validation():
    with pytest.raises(DomainError):
        DomainBox((0, 0, 0), (1, 0, 1))
    with pytest.raises(DomainError):
        DomainBox((0, 0), (1, 1))
    box = DomainBox((0, 0, 0), (0.3, 1, 1), (True, False, False))
    with pytest.raises(DomainError):
        box.check_smoothing_length(0.1)
    box.check_smoothing_length(0.07)


@given(st.lists(st.floats(-5.0, 5.0), min_size=3, max_size=3))
def test_wrap_lands_inside(x):
    pos = np.array([x])
    BOX.wrap(pos)
    for a in (0, 1):
        assert BOX.lower[a] <= pos[0, a] < BOX.upper[a]
    assert pos[0, 2] == x[2]


def test_particle_system_validation():
    with pytest.raises(DomainError):
        ParticleSystem.from_positions(np.zeros((2, 3)), 0.0, 1.0)
    with pytest.raises(DomainError):
        ParticleSystem.from_positions(np.zeros((2, 3)), 1.0, -1.0)
    with pytest.raises(DomainError):
        ParticleSystem(np.zeros((2, 3)), np.zeros((2, 3)), np.ones(3), np.ones(2), np.zeros(2), np.zeros(2))
    ps = ParticleSystem.from_positions(np.zeros((3, 3)), 1000.0, 2.0)
    assert np.all(ps.volume == 2e-3)
    assert ParticleSystem.concatenate([ps, ps]).n == 6
    assert len(ParticleSystem.concatenate([])) == 0


def test_grid_empty_and_single():
    h = 0.05
    grid = rebuild_grid(ParticleSystem.empty(), BOX, h)
    assert grid.cell_start[-1] == 0
    ps = ParticleSystem.from_positions([[0.5, 0.3, -0.5]], 1000.0, 1.0)
    grid = rebuild_grid(ps, BOX, h)
    assert np.count_nonzero(np.diff(grid.cell_start)) == 1
    assert list(neighbors_of(0, grid, ps, BOX, h)) == [0]


def test_grid_every_particle_once():
    ps = random_system(300, BOX, 1)
    grid = rebuild_grid(ps, BOX, 0.05)
    assert sorted(grid.particles) == list(range(300))
    assert np.all(grid.cell_size >= 0.1)


def test_grid_rejects_escaped_particle():
    ps = ParticleSystem.from_positions([[0.5, 0.3, 1.0]], 1000.0, 1.0)
    with pytest.raises(DomainError, match="particle 0"):
        rebuild_grid(ps, BOX, 0.05)


def test_pair_beyond_support():
    h = 0.05
    ps = ParticleSystem.from_positions([[0.5, 0.3, -0.5], [0.5 + 2.01 * h, 0.3, -0.5]], 1000.0, 1.0)
    grid = rebuild_grid(ps, BOX, h)
    assert list(neighbors_of(0, grid, ps, BOX, h)) == [0]
    assert list(neighbors_of(0, grid, ps, BOX, h, include_self=False)) == []


def test_grid_neighbors_match_brute_force():
    h = 0.04
    ps = random_system(500, BOX, 2)
    grid = rebuild_grid(ps, BOX, h)
    found = set()
    for i in range(len(ps)):
        visited = []
        for_each_neighbor(i, grid, ps, BOX, h, visited.append, include_self=False)
        assert len(visited) == len(set(visited))
        found |= {(min(i, j), max(i, j)) for j in visited}
    expected = brute_pairs(ps.position, BOX, 2 * h * (1 + 1e-12))
    assert found == expected


def test_neighbor_relation_symmetric():
    h = 0.04
    ps = random_system(200, BOX, 3)
    grid = rebuild_grid(ps, BOX, h)
    nb = {i: set(neighbors_of(i, grid, ps, BOX, h).tolist()) for i in range(len(ps))}
    assert all(i in nb[j] for i in nb for j in nb[i])


@pytest.mark.parametrize("seed", [0, 1])
def test_pair_list_matches_brute_force_on_jittered_lattice(seed):
    dp, h = 0.05, 0.065
    box = DomainBox((0, 0, 0), (0.5, 0.4, 0.35), (True, True, False))
    g = [np.arange(int(round(L / dp))) * dp + dp / 2 for L in box.lengths]
    pos = np.array(np.meshgrid(*g, indexing="ij")).reshape(3, -1).T
    pos += np.random.default_rng(seed).uniform(-0.3 * dp, 0.3 * dp, pos.shape)
    ps = ParticleSystem.from_positions(pos, 1000.0, 1.0)
    pl = PairList.build(ps, box, h, skin=0.0)
    i, j = pl.pairs()
    assert set(zip(i.tolist(), j.tolist())) == brute_pairs(ps.position, box, 2 * h)
    # recorded images reproduce minimum-image displacements
    d = ps.position[i] - ps.position[j] + pl.shifts[pl.image]
    np.testing.assert_allclose(d, minimum_image(ps.position[i], ps.position[j], box), atol=1e-12)


def test_pair_list_staleness():
    ps = random_system(50, BOX, 4)
    pl = PairList.build(ps, BOX, 0.04, skin=0.01)
    assert not pl.stale(ps.position)
    ps.position[7, 2] += 0.006
    assert pl.stale(ps.position)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_skin_list_contains_all_interacting_pairs(seed):
    """Particles that moved less than skin/2 never leave the list while interacting."""
    h, skin = 0.04, 0.01
    ps = random_system(150, BOX, seed)
    pl = PairList.build(ps, BOX, h, skin)
    rng = np.random.default_rng(seed + 1)
    step = rng.normal(size=ps.position.shape)
    step *= 0.499 * skin / np.linalg.norm(step, axis=1, keepdims=True)
    moved = ps.position + step
    listed = set(zip(*(a.tolist() for a in pl.pairs())))
    for i, j in brute_pairs(moved, BOX, 2 * h):
        assert (i, j) in listed


def test_kinds():
    assert int(Kind.FLUID) == 0 and int(Kind.DYNAMIC_BOUNDARY) == 1 and int(Kind.WAVEMAKER) == 2
