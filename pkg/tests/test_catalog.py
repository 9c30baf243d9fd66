import pytest
from hypothesis import given
from hypothesis import strategies as st

from constgen.catalog import (
    OMEGA,
    Abelian,
    CustomAffine,
    MatrixSplit,
    MaxClass3,
    ScalarSplit,
    TorsionScalar,
    build,
    census,
    certify,
    family,
    quotient_at,
    realise_phi_entry,
    symbolic_phi_series,
)
from constgen.errors import CertificateUnavailable, ConstraintViolation
from constgen.padic import RMatrix, hnf, lattice_index, full_lattice
from constgen.pgroup import frattini_series
from constgen.suites import KLEIN


def test_family_constructors():
    assert family(1, p=5, d=3) == Abelian(5, 3)
    f3 = family(3)
    assert isinstance(f3, MaxClass3) and OMEGA == ((0, -1), (1, -1))
    assert family(4, d=2) == ScalarSplit(2, 2, -1)
    assert family(2, p=3, d=2, s=1).lam == 4
    assert family(2, p=2, d=2, s=2, sign=-1).lam == -5


@pytest.mark.parametrize("kwargs", [
    dict(item=2, p=2, d=2, s=1, sign=1),
    dict(item=2, p=3, d=1, s=1),
    dict(item=2, p=3, d=2, s=0),
    dict(item=3, p=5),
    dict(item=4, p=3, d=2),
    dict(item=5, p=2, d=2),
])
def test_family_constraints(kwargs):
    item = kwargs.pop("item")
    with pytest.raises(ConstraintViolation):
        family(item, **kwargs)


def test_family_renormalises_lambda():
    # 3 = -(1 + 2^2) up to a unit square class
    assert str(family(2, p=2, d=3, lam=3).form) == "Minus(2)"
    assert str(family(2, p=2, d=2, lam=7).form) == "Minus(3)"
    assert str(family(2, p=2, d=2, lam=9).form) == "Plus(3)"
    with pytest.raises(ConstraintViolation):
        family(2, p=2, d=2, lam=-1)


def test_matrix_split_validation():
    MatrixSplit(3, ((1, 3), (0, 1)))
    with pytest.raises(ConstraintViolation):
        MatrixSplit(5, ((2, 0), (0, 1)))
    with pytest.raises(ConstraintViolation):
        MatrixSplit(3, ((3, 0), (0, 1)))


@given(st.integers(-200, 200).filter(lambda x: x % 2))
def test_scalar_validation_accepts_every_unit_at_two(lam):
    spec = ScalarSplit(2, 2, lam)
    assert spec.form.kind in ("Trivial", "MinusOne", "Plus", "Minus")
    if spec.form.kind in ("Plus", "Minus"):
        assert spec.form.s >= 2


@given(st.sampled_from([3, 5, 7]), st.integers(-50, 50))
def test_scalar_validation_odd_p(p, k):
    spec = ScalarSplit(p, 2, 1 + p * k)
    assert spec.form.kind in ("Trivial", "Plus")


def test_build_examples():
    Q = build(family(2, p=3, d=2, s=1), 2)
    assert (Q.certificate.mode, Q.certificate.K) == ("Exact", 3)
    Q = build(family(4, d=2), 2)
    assert Q.certificate.mode == "Exact"
    Q = build(KLEIN, 2)
    assert Q.certificate.mode == "Heuristic"


def test_counter_coordinate_keeps_top_infinite():
    # without the counter the top of the -1 scalar group truncates to order 2
    Q = build(family(4, d=2), 2).group
    y = Q.generator_ids[0]
    assert Q.power(y, 2) != Q.identity_id
    flat = CustomAffine(2, ((((-1,),), (0,)), (((1,),), (1,))))
    F = quotient_at(flat, 3)
    (z, _) = F.generator_ids
    assert F.power(z, 2) == F.identity_id


def test_certify_examples():
    assert certify(ScalarSplit(5, 2, 6), 3, 2).mode == "Exact"
    assert certify(ScalarSplit(3, 2, 4), 2, 2).mode == "Failed"
    for K in (2, 3):
        assert certify(KLEIN, K, 1).mode in ("Heuristic", "Failed")


def test_build_raises_when_no_certificate():
    with pytest.raises(CertificateUnavailable):
        build(ScalarSplit(3, 2, 4), 2, precision=2)


def test_symbolic_series_examples():
    s = symbolic_phi_series(ScalarSplit(3, 2, 4), 2)
    assert [e.lattice.pivots for e in s] == [(0,), (1,), (2,)]
    assert [e.top_exp for e in s] == [0, 1, 2]
    m = symbolic_phi_series(MaxClass3(), 2)
    pi = RMatrix.from_ints(3, 5, OMEGA) - RMatrix.identity(3, 5, 2)
    assert m[1].lattice == hnf(pi)
    assert m[2].lattice == hnf(pi @ pi @ pi)
    assert m[1].top_exp is None and m[2].top_exp is None
    for j, e in enumerate(symbolic_phi_series(Abelian(5, 3), 3)):
        assert e.lattice.pivots == (j, j, j)


def test_maxclass3_pi_filtration_steps_are_three():
    K = 4
    pi = RMatrix.from_ints(3, K + 3, OMEGA) - RMatrix.identity(3, K + 3, 2)
    prev, P = full_lattice(3, K + 3, 2), pi
    for _ in range(2 * K - 1):
        L = hnf(P)
        assert lattice_index(L, prev) == 3
        prev, P = L, P @ pi


POSITIVE_SMALL = [
    (family(1, p=2, d=2), 2),
    (family(2, p=3, d=2, s=1), 2),
    (family(2, p=2, d=2, s=2, sign=-1), 2),
    (family(3), 2),
    (family(4, d=2), 2),
    (TorsionScalar(2), 1),
    (MatrixSplit(5, ((1, 5), (0, 1))), 1),
]


@pytest.mark.parametrize("spec,m", POSITIVE_SMALL)
def test_symbolic_series_matches_engine(spec, m):
    Q = build(spec, m)
    assert Q.certificate.mode == "Exact"
    chain = frattini_series(Q.group, m + 1)
    for entry in symbolic_phi_series(spec, m + 1):
        assert realise_phi_entry(spec, entry, Q.group).key == chain[entry.level].key


CENSUS_CASES = POSITIVE_SMALL[:-1] + [pytest.param(*POSITIVE_SMALL[-1], marks=pytest.mark.slow)]


@pytest.mark.parametrize("spec,m", CENSUS_CASES)
def test_exact_census_is_stable_in_precision(spec, m):
    Q = build(spec, m)
    K = Q.certificate.K
    assert census(quotient_at(spec, K), m) == census(quotient_at(spec, K + 1), m)


@pytest.mark.parametrize("spec,d", [
    (family(1, p=3, d=3), 3), (family(2, p=5, d=2, s=1), 2), (family(3), 2), (family(4, d=3), 3),
])
def test_listed_families_have_expected_d(spec, d):
    assert build(spec, 1).group.whole().d == d


def test_certificate_json_is_plain():
    import json

    cert = build(family(3), 1).certificate
    json.dumps(cert.to_json())
