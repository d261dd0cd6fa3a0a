"""Smoke tests for the python bindings: each main operation once, against
known closed forms on small kernels. The heavy numerical audits live in the
C++ acceptance binary."""

import math

import graphon_sis as gs


def flat_kernel():
    return gs.discrete_block([1.0], [[1.0]])


def test_version():
    assert gs.__version__ == "0.1.0"


def test_kernel_queries():
    k = gs.power_law(1.0, 0.4, grid_size=200)
    assert k.variant == "power_law"
    assert k.cells == 200
    assert len(k.weights) == 200
    assert math.isclose(sum(k.weights), 1.0, rel_tol=1e-12)
    # W(x, y) = lambda1 (1-2p) x^-p y^-p at an interior point.
    assert math.isclose(k.value_at(0.5, 0.5), 0.2 * 0.5**-0.8, rel_tol=1e-12)
    assert flat_kernel().distance(flat_kernel()) == 0.0


def test_spectrum_flat():
    s = gs.spectrum(flat_kernel())
    assert math.isclose(s["lambda1"], 1.0, abs_tol=1e-12)
    assert abs(s["lambda2"]) <= 1e-10
    assert math.isclose(s["phi1"][0], 1.0, abs_tol=1e-12)


def test_spectrum_annealed_uncorrelated():
    # lambda1 = <k^2>/<k> for the uncorrelated annealed kernel.
    s = gs.spectrum(gs.annealed([2.0, 3.0, 4.0], [0.3, 0.4, 0.3]))
    assert math.isclose(s["lambda1"], 9.6 / 3.0, rel_tol=1e-10)


def test_simulate_logistic():
    out = gs.simulate(flat_kernel(), beta=1.0, gamma=0.0, u0=1e-3, t0=0.0, t1=5.0, dt=0.5)
    for t, p in zip(out["t"], out["prevalence"]):
        exact = 1e-3 / (1e-3 + (1 - 1e-3) * math.exp(-t))
        assert abs(p - exact) <= 1e-8
    assert out["steps"] > 0
    assert len(out["states"][0]) == 1


def test_endemic_half():
    st = gs.endemic(flat_kernel(), beta=2.0, gamma=1.0)
    assert abs(st["psi"][0] - 0.5) <= 1e-12
    assert st["residual"] <= 1e-10


def test_chi_flat():
    c = gs.chi_curve(flat_kernel(), n_samples=50)
    for p, links in zip(c["prevalence"], c["si_links"]):
        assert abs(links - p * (1 - p)) <= 1e-10
