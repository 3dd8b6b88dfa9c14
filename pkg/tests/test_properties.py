import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from threepoint import forwardmap as fm
from threepoint.coeffs import CoefficientPair
from threepoint.monodromy import cardano_roots

coeff_vectors = st.integers(1, 5).flatmap(
    lambda N: st.tuples(st.just(N), arrays(np.float64, 4 * N, elements=st.floats(-1, 1))))


@given(coeff_vectors)
def test_F_inverse_round_trip(case):
    N, v = case
    u = CoefficientPair.from_vector(v, N)
    back = fm.F_inverse(fm.F_apply(u, N)).to_vector()
    assert np.allclose(back, v, atol=1e-12)


@given(coeff_vectors)
def test_F_commutes_with_star_reflection_on_eigenvalue_part(case):
    N, v = case
    u = CoefficientPair.from_vector(v, N)
    a, b = fm.F_apply(u, N), fm.F_apply(u.star_reflect(), N)
    for n in range(1, N + 1):
        assert np.isclose(a.entries[-n][0], -b.entries[n][0], atol=1e-12)
        assert np.isclose(a.entries[-n][1], -b.entries[n][1], atol=1e-12)


@given(coeff_vectors)
def test_norm_is_scale_covariant(case):
    N, v = case
    u = CoefficientPair.from_vector(v, N)
    assert np.isclose((2.5 * u).norm1(), 2.5 * u.norm1())


@settings(max_examples=200)
@given(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False))
def test_cardano_vieta(T, Tt):
    r = cardano_roots(T, Tt)
    scale = max(1.0, abs(T), abs(Tt))
    assert abs(np.prod(r) - 1) <= 1e-8 * scale**3
    assert abs(np.sum(r) - T) <= 1e-8 * scale
