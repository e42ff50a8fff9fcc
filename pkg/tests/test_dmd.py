import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from conftest import DT, modal_signal
from hodmd.dmd import (HODMD, DmdExpansion, ModifiedKoopman, extract_modes, fit_koopman,
                       hodmd, reduce)
from hodmd.exceptions import WindowError
from hodmd.phantom import PhantomSpec, make_phantom
from hodmd.repair import rrmse
from hodmd.tensor import SnapshotTensor, TimeGrid, as_snapshot_matrix


def _match(got, truth):
    """Reorder ``got`` so each entry is the nearest unused match of ``truth``."""
    got = list(got)
    out = []
    for lam in truth:
        j = int(np.argmin([abs(g - lam) for g in got]))
        out.append(got.pop(j))
    return np.array(out)


def _expansion(amps, lams, modes, grid, dims):
    lams = np.asarray(lams, dtype=complex)
    return DmdExpansion(np.asarray(amps, float), lams.real, lams.imag,
                        np.asarray(modes, complex), grid, dims)


@pytest.fixture(scope="module")
def phantom_slice():
    return make_phantom(PhantomSpec(slices=3))[:, :, 1]


# reduce -------------------------------------------------------------------------

def test_reduce_rank_two_exact(rng):
    v = np.outer(rng.normal(size=30), rng.normal(size=8)) + \
        np.outer(rng.normal(size=30), rng.normal(size=8))
    red = reduce(v, 1e-8)
    assert red.rank == 2
    assert np.max(np.abs(red.basis @ red.reduced - v)) <= 1e-10 * np.max(np.abs(v))


def test_reduce_phantom_slice_is_low_rank(phantom_slice):
    v = as_snapshot_matrix(phantom_slice)
    assert v.shape == (16384, 20)
    red = reduce(v, 5e-4)
    assert red.rank <= 6
    assert np.linalg.norm(v - red.basis @ red.reduced) <= red.svd.discarded_energy * (1 + 1e-8)


def test_duplicated_snapshot_keeps_rank(rng):
    v = modal_signal(rng, [0.1 + 3j, -0.2 + 7j], 12, np.arange(10) * 0.1)
    n = reduce(v, 1e-10).rank
    dup = np.hstack([v, v[:, 4:5]])
    assert reduce(dup, 1e-10).rank == n
    assert np.linalg.matrix_rank(dup, tol=1e-10 * np.linalg.norm(dup, 2)) == n


# fit_koopman ----------------------------------------------------------------------

def test_fit_koopman_recovers_linear_map(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    a = 0.95 * q
    v = np.empty((3, 12))
    v[:, 0] = rng.normal(size=3)
    for k in range(11):
        v[:, k + 1] = a @ v[:, k]
    koop = fit_koopman(v, 1)
    assert np.max(np.abs(koop.blocks[0] - a)) <= 1e-8


def test_fit_koopman_sinusoid_two_term_recurrence():
    t = np.arange(6) * DT
    v = np.cos(2 * np.pi * 6 * t)[None, :]
    koop = fit_koopman(v, 2)
    assert koop.residual <= 1e-8
    # cos satisfies v_{k+2} = 2 cos(w dt) v_{k+1} - v_k
    w = 2 * np.pi * 6 * DT
    assert koop.blocks[0][0, 0] == pytest.approx(-1.0, abs=1e-8)
    assert koop.blocks[1][0, 0] == pytest.approx(2 * np.cos(w), abs=1e-8)


def test_fit_koopman_constant_sequence():
    koop = fit_koopman(np.full((1, 5), 3.0), 1)
    assert koop.blocks[0][0, 0] == pytest.approx(1.0)


def test_companion_structure_is_exact(rng):
    v = rng.normal(size=(3, 15))
    r = fit_koopman(v, 3).matrix
    assert r.shape == (9, 9)
    assert np.array_equal(r[:6, :3], np.zeros((6, 3)))
    assert np.array_equal(r[:6, 3:], np.eye(6))


def test_fit_koopman_window_error():
    with pytest.raises(WindowError):
        fit_koopman(np.ones((2, 4)), 4)


# extract_modes / hodmd -------------------------------------------------------------

def test_cosine_at_360_bpm():
    grid = TimeGrid(DT, 20)
    v = np.cos(2 * np.pi * 6 * grid.times)[None, :]
    exp = hodmd(v, d=2, grid=grid)
    assert exp.n_modes == 2
    assert np.allclose(np.sort(exp.frequencies), [-2 * np.pi * 6, 2 * np.pi * 6], rtol=1e-6)
    assert np.allclose(exp.growth_rates, 0.0, atol=1e-6)
    assert np.allclose(np.abs(exp.freq_bpm), 360.0, rtol=1e-6)


def test_pure_decay():
    grid = TimeGrid(DT, 20)
    shape = np.array([1.0, -2.0, 0.5])
    v = np.outer(shape, np.exp(-grid.times))
    exp = hodmd(v, d=1, grid=grid)
    assert exp.n_modes == 1
    assert exp.frequencies[0] == 0.0
    assert exp.growth_rates[0] == pytest.approx(-1.0, rel=1e-6)
    assert exp.amplitudes[0] == pytest.approx(np.linalg.norm(shape), rel=1e-10)
    assert np.linalg.norm(exp.spatial_modes[:, 0]) == pytest.approx(1.0, abs=1e-10)


def test_three_frequency_mixture(rng):
    grid = TimeGrid(DT, 100)
    lams = np.array([-0.5 + 2j * np.pi * 6, 0.3 + 2j * np.pi * 13.7 * np.sqrt(2),
                     -1.2 + 2j * np.pi * 21.1])
    v = modal_signal(rng, lams, 40, grid.times)
    exp = hodmd(v, d=2, eps_svd=1e-8, eps_dmd=1e-8, grid=grid)
    assert exp.n_modes == 6
    truth = np.concatenate([lams, lams.conj()])
    got = _match(exp.eigenvalues, truth)
    assert np.allclose(got.imag, truth.imag, rtol=1e-6)
    assert np.allclose(got.real, truth.real, rtol=1e-6, atol=1e-6 * np.abs(truth))


def test_constant_field_single_static_mode(rng):
    v = np.repeat(rng.uniform(0.2, 1.0, size=(50, 1)), 20, axis=1)
    exp = hodmd(v, grid=TimeGrid(DT, 20))
    assert exp.n_modes == 1
    assert exp.frequencies[0] == 0.0
    assert exp.leading_frequency() == 0.0


def test_reconstruct_low_rank_signal(rng):
    grid = TimeGrid(DT, 40)
    v = modal_signal(rng, [0.0 + 0j, -0.3 + 2j * np.pi * 5, 0.1 + 2j * np.pi * 11], 25,
                     grid.times)
    exp = hodmd(v, d=2, eps_svd=1e-10, eps_dmd=1e-10, grid=grid)
    rec = exp.reconstruct()
    assert rec.dims == (25, 40)
    assert rrmse(rec.data, v) <= 1e-6
    full = exp.evaluate_complex(grid.times)
    assert np.linalg.norm(full.imag) <= 1e-8 * np.linalg.norm(full.real)


def test_reconstruct_static_and_zero_modes():
    grid = TimeGrid(DT, 5)
    exp = _expansion([2.0], [0.0], [[0.6], [0.8]], grid, (2,))
    rec = exp.reconstruct().data
    assert np.allclose(rec, np.array([[1.2], [1.6]]) * np.ones((1, 5)))
    zero = _expansion([0.0, 0.0], [1j, -1j], np.ones((2, 2)) / np.sqrt(2), grid, (2,))
    assert np.array_equal(zero.reconstruct().data, np.zeros((2, 5)))


def test_zero_eigenvalue_dropped_with_warning():
    grid = TimeGrid(DT, 4)
    koop = ModifiedKoopman(blocks=(np.zeros((1, 1)),))
    with pytest.warns(RuntimeWarning, match="undefined logarithm"):
        exp = extract_modes(koop, np.ones((2, 1)) / np.sqrt(2), np.ones((1, 4)), grid, 5e-4)
    assert exp.n_modes == 0 and exp.dropped_modes == 1


def test_phantom_invariants(phantom_slice):
    grid = TimeGrid(DT, 20)
    exp = hodmd(SnapshotTensor(phantom_slice, dt=DT))
    a = exp.amplitudes
    assert np.all(np.diff(a) <= 0)
    assert np.all(a / a[0] > exp.eps_dmd)
    assert np.allclose(np.linalg.norm(exp.spatial_modes, axis=0), 1.0, atol=1e-10)
    # conjugate closure
    for m in np.flatnonzero(exp.frequencies != 0):
        partner = np.flatnonzero(np.abs(exp.frequencies + exp.frequencies[m])
                                 <= 1e-9 * max(1.0, abs(exp.frequencies[m])))
        assert partner.size == 1
        assert exp.amplitudes[partner[0]] == pytest.approx(a[m], rel=1e-6)
    # reconstruction error bounded by C (eps_svd + eps_dmd), C = 10
    err = rrmse(exp.reconstruct(grid).data, phantom_slice)
    assert err <= 10 * (exp.eps_svd + exp.eps_dmd)


def test_hodmd_is_deterministic(phantom_slice):
    a = hodmd(as_snapshot_matrix(phantom_slice), grid=TimeGrid(DT, 20))
    b = hodmd(as_snapshot_matrix(phantom_slice.copy()), grid=TimeGrid(DT, 20))
    assert a.amplitudes.tobytes() == b.amplitudes.tobytes()
    assert a.spatial_modes.tobytes() == b.spatial_modes.tobytes()


@st.composite
def modal_generators(draw):
    """Up to 5 modes: oscillating pairs with separated frequencies plus real modes."""
    n_pairs = draw(st.integers(0, 2))
    n_real = draw(st.integers(0 if n_pairs else 1, 5 - 2 * n_pairs if n_pairs < 3 else 0))
    n_real = min(n_real, 5 - 2 * n_pairs)
    freqs = draw(st.lists(st.floats(2.0, 40.0), min_size=n_pairs, max_size=n_pairs))
    freqs = sorted(freqs)
    if any(b - a < 4.0 for a, b in zip(freqs, freqs[1:])):
        freqs = [5.0 + 12.0 * j + 0.37 * (f % 1) for j, f in enumerate(freqs)]
    decays = draw(st.lists(st.floats(-3.0, 1.0), min_size=n_pairs + n_real,
                           max_size=n_pairs + n_real))
    reals = sorted(draw(st.lists(st.floats(-8.0, 2.0), min_size=n_real, max_size=n_real)))
    if any(b - a < 1.5 for a, b in zip(reals, reals[1:])):
        reals = [-8.0 + 2.5 * j for j in range(n_real)]
    lams = [complex(decays[j], 2 * np.pi * f) for j, f in enumerate(freqs)]
    lams += [complex(r, 0.0) for r in reals]
    d = draw(st.integers(1, 3))
    seed = draw(st.integers(0, 2**31))
    return np.array(lams), d, seed


@settings(max_examples=40, deadline=None)
@given(modal_generators())
def test_exact_recovery_property(gen):
    lams, d, seed = gen
    r = np.random.default_rng(seed)
    n_modes = sum(2 if lam.imag else 1 for lam in lams)
    k = max(2 * n_modes + d, 30)
    grid = TimeGrid(DT, k)
    v = modal_signal(r, lams, 12, grid.times)
    exp = hodmd(v, d=d, eps_svd=1e-10, eps_dmd=1e-8, grid=grid)
    assert exp.n_modes == n_modes
    truth = np.concatenate([lams, lams[lams.imag != 0].conj()])
    got = _match(exp.eigenvalues, truth)
    scale = np.maximum(np.abs(truth), 1.0)
    assert np.all(np.abs(got.imag - truth.imag) <= 1e-6 * scale)
    assert np.all(np.abs(got.real - truth.real) <= 1e-6 * scale)


# estimator -------------------------------------------------------------------------

def test_estimator_api(phantom_slice):
    est = HODMD(d=2)
    assert clone(est).get_params() == est.get_params()
    with pytest.raises(NotFittedError):
        est.predict([0.0])
    est.fit(phantom_slice)
    assert est.n_modes_ == est.expansion_.n_modes
    assert est.predict([0.0, DT]).shape == (128, 128, 2)
    rec = est.reconstruct()
    assert rec.shape == phantom_slice.shape
    assert np.array_equal(est.reconstruct(50)[..., :20], rec)
    assert est.set_params(d=3).d == 3
