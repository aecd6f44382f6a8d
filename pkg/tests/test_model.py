import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mirrordeco.errors import InvalidInputError
from mirrordeco.model import (ModelSpec, ModeSet, build_effective_model, diagonalize_mass,
                              effective_couplings, mass_matrix)

positive = st.floats(0.1, 10.0)


def random_masses(rng, n):
    return rng.uniform(0.1, 10.0, n)


# ---------------------------------------------------------------- mass_matrix

def test_mass_matrix_two_equal_masses():
    np.testing.assert_array_equal(mass_matrix([1, 1]), [[2.0]])


def test_mass_matrix_three_masses():
    np.testing.assert_allclose(mass_matrix([1, 2, 3]),
                               [[4 / 3, 2 / 3], [2 / 3, 10 / 3]], rtol=1e-15)


def kinetic_lab(masses, v_rel):
    """Sum m_i v_i^2 / 2 with the CM at rest, eliminating v_N by hand."""
    m = np.asarray(masses)
    v_last = -np.dot(m[:-1], v_rel) / m[-1]
    v = np.append(v_rel, v_last)
    return 0.5 * np.dot(m, v * v)


def test_mass_matrix_is_relative_kinetic_form(rng):
    masses = [1.0, 2.0, 3.0]
    tau = mass_matrix(masses)
    residual = 0.0
    for _ in range(100):
        v = rng.normal(size=2)
        lhs = 0.5 * v @ tau @ v
        residual = max(residual, abs(lhs - kinetic_lab(masses, v)) / abs(lhs))
    assert residual < 1e-12


@pytest.mark.parametrize("masses", [[1.0], [], [1.0, 0.0], [1.0, -2.0, 3.0], [1.0, np.nan]])
def test_mass_matrix_rejects_bad_masses(masses):
    with pytest.raises(InvalidInputError):
        mass_matrix(masses)


@given(st.lists(positive, min_size=2, max_size=9))
def test_mass_matrix_symmetric_positive_definite(masses):
    tau = mass_matrix(masses)
    assert tau.shape == (len(masses) - 1,) * 2
    np.testing.assert_array_equal(tau, tau.T)
    assert np.linalg.eigvalsh(tau)[0] > 0


# --------------------------------------------------------- effective_couplings

def test_effective_couplings_symmetric_mirror():
    G, rel = effective_couplings([1, 1], [1, 1])
    assert G == 2.0
    np.testing.assert_array_equal(rel, [0.0])


def test_effective_couplings_example():
    G, rel = effective_couplings([1, 2], [3, 4])
    assert G == 7.0
    np.testing.assert_allclose(rel, [1.0], rtol=1e-15)


def test_effective_couplings_zero():
    G, rel = effective_couplings([1.0, 2.0, 5.0], [0, 0, 0])
    assert G == 0.0
    assert np.all(rel == 0.0)


def test_effective_couplings_match_substituted_potential(rng):
    """Coefficients of x and xi_i recovered by evaluating sum g_i x_i."""
    for n in (2, 3, 7):
        m = random_masses(rng, n)
        g = rng.normal(size=n)
        G, rel = effective_couplings(m, g)

        def lab_coords(x, xi):
            last = x - np.dot(m[:-1], xi) / m[-1]
            return np.append(x + xi, last)

        # the CM constraint is respected by construction
        x, xi = 0.7, rng.normal(size=n - 1)
        np.testing.assert_allclose(np.dot(m, lab_coords(x, xi)) / m.sum(), x, rtol=1e-12)

        potential = lambda x, xi: np.dot(g, lab_coords(x, xi))  # noqa: E731
        zero = np.zeros(n - 1)
        assert potential(1.0, zero) - potential(0.0, zero) == pytest.approx(G, rel=1e-12)
        for i in range(n - 1):
            e = np.zeros(n - 1)
            e[i] = 1.0
            coef = potential(0.0, e) - potential(0.0, zero)
            assert coef == pytest.approx(rel[i], rel=1e-10, abs=1e-12)


def test_effective_couplings_length_mismatch():
    with pytest.raises(InvalidInputError):
        effective_couplings([1, 2, 3], [1, 2])


# ------------------------------------------------------------ diagonalize_mass

def test_diagonalize_scalar():
    U, mp = diagonalize_mass([[2.0]])
    np.testing.assert_array_equal(U, [[1.0]])
    np.testing.assert_array_equal(mp, [2.0])


def test_diagonalize_three_mass_example():
    U, mp = diagonalize_mass(mass_matrix([1, 2, 3]))
    # roots of lambda^2 - (14/3) lambda + 4
    roots = np.sort(np.roots([1.0, -14.0 / 3.0, 4.0]))
    np.testing.assert_allclose(mp, roots, rtol=1e-14)
    np.testing.assert_allclose(mp, [(14 - np.sqrt(52)) / 6, (14 + np.sqrt(52)) / 6], rtol=1e-14)
    np.testing.assert_allclose(mp, [1.13148, 3.53518], atol=5e-6)


def test_diagonalize_identity():
    U, mp = diagonalize_mass(np.eye(4))
    np.testing.assert_allclose(U, np.eye(4), atol=0)
    np.testing.assert_array_equal(mp, np.ones(4))


@pytest.mark.parametrize("tau", [
    [[1.0, 0.5], [0.2, 1.0]],          # not symmetric
    [[1.0, 2.0], [2.0, 1.0]],          # indefinite
    [[0.0]],                           # singular
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],  # not square
])
def test_diagonalize_rejects(tau):
    with pytest.raises(InvalidInputError):
        diagonalize_mass(tau)


def test_diagonalize_random_specs(rng):
    """U orthogonal and U tau U^T diagonal for 1000 random mass sets (N <= 8)."""
    worst_orth = worst_diag = 0.0
    for _ in range(1000):
        tau = mass_matrix(random_masses(rng, int(rng.integers(2, 9))))
        U, mp = diagonalize_mass(tau)
        k = tau.shape[0]
        worst_orth = max(worst_orth, np.max(np.abs(U @ U.T - np.eye(k))))
        D = U @ tau @ U.T
        scale = np.max(np.abs(tau))
        worst_diag = max(worst_diag, np.max(np.abs(D - np.diag(mp))) / scale)
        assert np.all(mp > 0) and np.all(np.diff(mp) >= 0)
        assert np.sum(mp) == pytest.approx(np.trace(tau), rel=1e-12)
    assert worst_orth < 1e-12
    assert worst_diag < 1e-12


def test_diagonalize_sign_convention_deterministic():
    tau = mass_matrix([1.0, 2.0, 3.0, 4.0])
    U1, _ = diagonalize_mass(tau)
    U2, _ = diagonalize_mass(tau.copy())
    np.testing.assert_array_equal(U1, U2)
    lead = U1[np.arange(3), np.argmax(np.abs(U1), axis=1)]
    assert np.all(lead > 0)


# -------------------------------------------------------- build_effective_model

def test_build_symmetric_mirror_decouples():
    eff = build_effective_model(ModelSpec([1, 1], [1, 1]))
    np.testing.assert_array_equal(eff.mode_forces, [0.0])
    assert eff.g_total == 2.0 and eff.total_mass == 2.0


@pytest.mark.parametrize("n", [2, 5, 9])
def test_build_identical_particles_have_no_relative_force(n):
    eff = build_effective_model(ModelSpec([2.5] * n, [0.3] * n))
    np.testing.assert_allclose(eff.mode_forces, 0.0, atol=1e-15)
    assert eff.g_total == pytest.approx(0.3 * n, rel=1e-15)


def test_build_two_particle_example():
    eff = build_effective_model(ModelSpec([1, 2], [3, 4]))
    np.testing.assert_allclose(eff.mass_matrix, [[1.5]])
    np.testing.assert_array_equal(eff.diagonalizer, [[1.0]])
    np.testing.assert_allclose(eff.mode_forces, [1.0], rtol=1e-15)
    np.testing.assert_allclose(eff.effective_masses, [1.5])


def test_build_forces_rotate_relative_couplings(rng):
    for _ in range(50):
        n = int(rng.integers(2, 9))
        eff = build_effective_model(ModelSpec(random_masses(rng, n), rng.normal(size=n)))
        np.testing.assert_allclose(eff.diagonalizer.T @ eff.mode_forces,
                                   eff.relative_couplings, atol=1e-12)
        # a rotation preserves the squared coupling strength
        assert np.sum(eff.mode_forces ** 2) == pytest.approx(
            np.sum(eff.relative_couplings ** 2), rel=1e-12, abs=1e-24)


@given(st.lists(positive, min_size=2, max_size=7), st.floats(0.1, 10.0))
def test_build_mass_scaling(masses, s):
    """Scaling every mass by s scales the effective masses by s."""
    g = np.linspace(-1.0, 1.0, len(masses))
    a = build_effective_model(ModelSpec(masses, g))
    b = build_effective_model(ModelSpec([s * m for m in masses], g))
    np.testing.assert_allclose(b.effective_masses, s * a.effective_masses, rtol=1e-10)


def test_build_arrays_are_read_only():
    eff = build_effective_model(ModelSpec([1.0, 2.0, 3.0], [1.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        eff.mode_forces[0] = 1.0


def test_model_modes_use_spec_widths():
    spec = ModelSpec([1.0, 2.0, 3.0], [1.0, 0.0, 0.0], mode_widths=[0.5, 2.0])
    modes = build_effective_model(spec).modes()
    np.testing.assert_array_equal(modes.widths, [0.5, 2.0])
    ptr = build_effective_model(spec).pointer()
    assert ptr.total_mass == 6.0 and ptr.coupling == 1.0


# ------------------------------------------------------------- spec validation

@pytest.mark.parametrize("kwargs", [
    dict(masses=[1.0, 2.0], couplings=[1.0]),
    dict(masses=[1.0, 2.0], couplings=[1.0, np.inf]),
    dict(masses=[1.0, 2.0], couplings=[1.0, 1.0], hbar=0.0),
    dict(masses=[1.0, 2.0], couplings=[1.0, 1.0], packet_width=-1.0),
    dict(masses=[1.0, 2.0], couplings=[1.0, 1.0], mode_widths=[1.0, 1.0]),
    dict(masses=[1.0, 2.0], couplings=[1.0, 1.0], mode_widths=[0.0]),
])
def test_model_spec_validation(kwargs):
    with pytest.raises(InvalidInputError):
        ModelSpec(**kwargs)


def test_modeset_validation_and_collapse():
    with pytest.raises(InvalidInputError):
        ModeSet([1.0, 2.0], [1.0], [1.0])
    with pytest.raises(InvalidInputError):
        ModeSet([1.0], [1.0], [0.0])
    with pytest.raises(InvalidInputError):
        ModeSet([1.0], [1.0], [1.0], multiplicity=0)
    ms = ModeSet([2.0, 2.0, 2.0], [1.0, 1.0, 1.0], 0.5, multiplicity=4)
    c = ms.collapsed()
    assert c.masses.size == 1 and c.multiplicity == 12 and c.n_modes == ms.n_modes
    mixed = ModeSet([1.0, 2.0], [1.0, 1.0], 1.0)
    assert mixed.collapsed() is mixed
