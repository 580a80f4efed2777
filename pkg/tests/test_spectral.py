import numpy as np
import pytest

from netctrl.errors import ContractError
from netctrl.spectral import eig_sym


def test_identity():
    dec = eig_sym(np.eye(3))
    np.testing.assert_allclose(dec.lambdas, [1.0, 1.0, 1.0])
    np.testing.assert_allclose(dec.p.T @ dec.p, np.eye(3), atol=1e-12)


def test_known_2x2():
    dec = eig_sym(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(dec.lambdas, [-1.0, 1.0], atol=1e-14)


def test_reconstruction_residual(rng):
    # the decomposition's own residual is the oracle here
    a = rng.standard_normal((10, 10))
    a = (a + a.T) / 2
    dec = eig_sym(a)
    assert np.max(np.abs(dec.reconstruct() - a)) <= 1e-8 * max(1.0, np.max(np.abs(a)))
    assert np.all(np.diff(dec.lambdas) >= 0)


def test_trace_equals_eigenvalue_sum(rng):
    a = rng.standard_normal((14, 14))
    a = (a + a.T) / 2
    dec = eig_sym(a)
    assert np.trace(a) == pytest.approx(np.sum(dec.lambdas), rel=1e-8)


def test_orthogonal_similarity_preserves_spectrum(rng):
    a = rng.standard_normal((9, 9))
    a = (a + a.T) / 2
    q, r = np.linalg.qr(rng.standard_normal((9, 9)))
    q = q * np.sign(np.diag(r))
    b = q.T @ a @ q
    b = (b + b.T) / 2
    np.testing.assert_allclose(eig_sym(b).lambdas, eig_sym(a).lambdas,
                               rtol=1e-8, atol=1e-10)


def test_sign_convention():
    dec = eig_sym(np.diag([2.0, 1.0]))
    for j in range(2):
        col = dec.p[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        assert col[nz[0]] > 0


def test_rejects_asymmetric():
    with pytest.raises(ContractError):
        eig_sym(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_rejects_nonfinite():
    with pytest.raises(ContractError):
        eig_sym(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_rejects_nonsquare():
    with pytest.raises(ContractError):
        eig_sym(np.zeros((2, 3)))
