import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import X, Y, Z, entropy, partial_trace_site, site_op
from spinsignal.states import (
    BranchEnsemble,
    MeasurementAxis,
    Parity,
    PositivityError,
    PureState,
    QubitReducedDM,
    SiteError,
    basis_code,
    code_from_bitstring,
    entropy_from_marginals,
    expectation_sigma_plus,
    expectation_sigma_z,
    magnon_parity,
    nats_to_bits,
    reduced_qubit_dm,
    rho01_elements,
    sz_expectations,
    von_neumann_entropy,
)

finite = st.floats(-1, 1, allow_nan=False, allow_infinity=False)


def random_state(n, seed):
    r = np.random.default_rng(seed)
    v = r.normal(size=1 << n) + 1j * r.normal(size=1 << n)
    return PureState(n, v / np.linalg.norm(v))


def test_basis_codes_put_site_one_on_lowest_bit():
    assert basis_code([1], 4) == 1
    assert basis_code([1, 2], 4) == 3
    assert basis_code([4], 4) == 8
    assert code_from_bitstring("0100") == 2


def test_site_out_of_range():
    rho = BranchEnsemble.pure(PureState.basis(3))
    with pytest.raises(SiteError):
        expectation_sigma_z(rho, 4)
    with pytest.raises(SiteError):
        reduced_qubit_dm(rho, 0)


@pytest.mark.parametrize(
    "codes, parity",
    [([0], Parity.EVEN), ([0b11], Parity.EVEN), ([0b1, 0b10], Parity.ODD), ([0, 0b1], Parity.MIXED)],
)
def test_magnon_parity(codes, parity):
    assert magnon_parity(PureState.from_codes(4, codes)) is parity


def test_maximally_mixed_site_has_entropy_ln2():
    # (|00> + |11>)/sqrt2: each site is maximally mixed
    rho = BranchEnsemble.pure(PureState.from_codes(2, [0, 3]))
    dm = reduced_qubit_dm(rho, 1)
    assert von_neumann_entropy(dm) == pytest.approx(np.log(2), abs=1e-14)
    assert nats_to_bits(von_neumann_entropy(dm)) == pytest.approx(1.0, abs=1e-14)


def test_sigma_plus_reads_lower_left_element():
    # (|0> + i|1>)/sqrt2 on one site: <sigma^+> = <1|rho|0> = i/2
    psi = PureState(1, np.array([1, 1j]) / np.sqrt(2))
    assert expectation_sigma_plus(BranchEnsemble.pure(psi), 1) == pytest.approx(0.5j)


def test_axis_vector():
    assert np.allclose(MeasurementAxis(np.pi / 2, np.pi / 2).vector, [0, 1, 0])
    assert np.allclose(MeasurementAxis().vector, [0, 0, 1])


def test_entropy_rejects_negative_eigenvalue():
    with pytest.raises(PositivityError):
        von_neumann_entropy(QubitReducedDM(1.0, 0.0, 0.3))
    with pytest.raises(PositivityError):
        entropy_from_marginals(np.array([1.0]), np.array([0.3]))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 5), seed=st.integers(0, 2**31 - 1))
def test_kernels_match_partial_trace(n, seed):
    psi = random_state(n, seed)
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
    sz = sz_expectations(psi.amplitudes)
    m01 = rho01_elements(psi.amplitudes)
    ens = BranchEnsemble.pure(psi)
    for k in range(1, n + 1):
        red = partial_trace_site(rho, k, n)
        assert sz[k - 1] == pytest.approx(np.trace(red @ Z).real, abs=1e-12)
        assert m01[k - 1] == pytest.approx(red[0, 1], abs=1e-12)
        dm = reduced_qubit_dm(ens, k)
        assert np.allclose(dm.matrix(), red, atol=1e-12)
        assert von_neumann_entropy(dm) == pytest.approx(entropy(red), abs=1e-10)
        assert expectation_sigma_z(ens, k) == pytest.approx(np.trace(rho @ site_op(Z, k, n)).real, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(x=finite, y=finite, z=finite)
def test_entropy_bounds_and_closed_form(x, y, z):
    r = np.sqrt(x * x + y * y + z * z)
    if r > 1:
        x, y, z = x / r, y / r, z / r
    dm = QubitReducedDM((1 + z) / 2, (1 - z) / 2, (x - 1j * y) / 2)
    s = von_neumann_entropy(dm)
    assert -1e-12 <= s <= np.log(2) + 1e-12
    closed = entropy_from_marginals(np.array([dm.m00]), np.array([dm.m01]))[0]
    assert closed == pytest.approx(s, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(amps=arrays(complex, 8, elements=st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False)))
def test_ensemble_trace_is_sum_of_weights(amps):
    ens = BranchEnsemble(3, (amps, 0.5 * amps))
    assert ens.trace() == pytest.approx(1.25 * np.vdot(amps, amps).real)
    assert np.trace(ens.density_matrix()).real == pytest.approx(ens.trace())


def test_pure_state_validates_shape():
    with pytest.raises(ValueError):
        PureState(3, np.ones(4))
    assert PureState.basis(3).is_normalized()
    assert not PureState(2, np.ones(4)).is_normalized()


def test_single_site_operators_agree_with_kron():
    # sanity of the reference helper against the package's sign convention
    psi = PureState.basis(3, [2])
    assert sz_expectations(psi.amplitudes)[1] == -1.0
    assert np.vdot(psi.amplitudes, site_op(Z, 2, 3) @ psi.amplitudes).real == -1.0
    assert np.allclose(site_op(X, 1, 2) @ PureState.basis(2).amplitudes, PureState.basis(2, [1]).amplitudes)
    assert np.allclose(site_op(Y, 1, 1) @ np.array([1, 0]), [0, 1j])
