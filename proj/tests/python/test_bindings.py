import numpy as np
import pytest

ub = pytest.importorskip("ubmat._core")
import ubmat  # noqa: E402

PART = [2, 3]
A = [1.2, 0.8]
B = [[0.5, 0.2], [0.2, 0.3]]


@pytest.fixture
def sigma():
    return ubmat.UBMatrix(A, B, PART)


def test_dense_roundtrip(sigma):
    dense = sigma.dense()
    assert dense.shape == (5, 5)
    back = ubmat.UBMatrix.from_dense(dense, PART)
    assert back == sigma
    assert ubmat.UBMatrix.from_dict(sigma.to_dict()) == sigma


def test_operations_match_numpy(sigma):
    dense = sigma.dense()
    assert sigma.determinant() == pytest.approx(np.linalg.det(dense), rel=1e-12)
    assert np.abs(sigma.inverse().dense() - np.linalg.inv(dense)).max() < 1e-12
    assert np.abs((sigma @ sigma).dense() - dense @ dense).max() < 1e-12
    assert np.abs(sigma.power(3).dense() - np.linalg.matrix_power(dense, 3)).max() < 1e-12
    assert np.abs((sigma + sigma - sigma).dense() - dense).max() < 1e-12
    v = np.arange(5.0)
    assert np.abs(sigma.apply(v) - dense @ v).max() < 1e-12
    assert np.allclose(np.sort(sigma.eigenvalues()), np.linalg.eigvalsh(dense), atol=1e-12)
    assert sigma.is_positive_definite()


def test_canonical_form(sigma):
    form = ubmat.canonical_form(sigma)
    gamma = np.asarray(form["gamma"])
    assert np.abs(gamma @ gamma.T - np.eye(5)).max() < 1e-12
    inner = gamma @ sigma.dense() @ gamma.T
    assert np.abs(inner - np.diag(np.diag(inner))).max() < 1e-12


def test_estimate_and_tests(sigma):
    x = ubmat.sample(sigma, np.zeros(5), 400, seed=3)
    assert x.shape == (400, 5)
    fit = ubmat.estimate(x, PART)
    assert np.abs(fit.dense() - sigma.dense()).max() < 0.25
    r = ubmat.one_sample_test(x, PART, np.zeros(5), replicates=2000, seed=2)
    assert r["statistic"] == pytest.approx(sum(r["components"]), rel=1e-12)
    labels = np.repeat([1, 2], 200)
    r = ubmat.m_sample_test(x, PART, labels, method="morrison")
    assert 0.0 <= r["p_value"] <= 1.0


def test_errors(sigma):
    with pytest.raises(ValueError):
        ubmat.UBMatrix([1.0], B, PART)
    with pytest.raises(ArithmeticError):
        ubmat.UBMatrix([1.0, -1.0], B, PART).precision()


def test_simulate_dict(sigma):
    plan = {"test": "one_sample", "sigma": sigma.to_dict(), "mu": [0.0] * 5, "n": 40,
            "replicates": 40, "law_replicates": 2000, "seed": 9}
    out = ubmat.simulate(plan)
    assert out["replicates"] == 40
    q = ubmat.null_quantile(PART, 40, replicates=20000)
    assert q == pytest.approx(out["critical_value"], rel=0.05)


def test_p_values_uniform_under_null(sigma):
    stats = pytest.importorskip("scipy.stats")
    runs = 5000
    p = np.empty(runs)
    for i in range(runs):
        x = ubmat.sample(sigma, np.zeros(5), 30, seed=1000 + i)
        p[i] = ubmat.one_sample_test(x, PART, np.zeros(5), replicates=2000, seed=500000 + i)["p_value"]
    ks = stats.kstest(p, "uniform").statistic
    assert ks < 0.02, ks
