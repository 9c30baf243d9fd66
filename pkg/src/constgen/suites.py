"""Built-in positive and negative instance suites."""

from __future__ import annotations

from dataclasses import dataclass, field

from .catalog import CustomAffine, MatrixSplit, TorsionScalar, analytic_dim, family

I3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


@dataclass(frozen=True)
class SuiteEntry:
    name: str
    spec: object
    m: int
    note: str = ""
    expect: dict = field(default_factory=dict)


def _pos(name, spec):
    m = 3 if analytic_dim(spec) == 2 else 2
    return SuiteEntry(name, spec, m)


POSITIVE = (
    _pos("abelian-p2-d2", family(1, p=2, d=2)),
    _pos("abelian-p2-d3", family(1, p=2, d=3)),
    _pos("abelian-p3-d2", family(1, p=3, d=2)),
    _pos("abelian-p3-d3", family(1, p=3, d=3)),
    _pos("abelian-p5-d2", family(1, p=5, d=2)),
    _pos("scalar-p3-d2-s1", family(2, p=3, d=2, s=1)),
    _pos("scalar-p3-d3-s1", family(2, p=3, d=3, s=1)),
    _pos("scalar-p5-d2-s1", family(2, p=5, d=2, s=1)),
    _pos("scalar-p2-d2-s2-plus", family(2, p=2, d=2, s=2, sign=1)),
    _pos("scalar-p2-d2-s2-minus", family(2, p=2, d=2, s=2, sign=-1)),
    _pos("scalar-p2-d3-s2-minus", family(2, p=2, d=3, s=2, sign=-1)),
    _pos("maxclass3", family(3)),
    _pos("minusone-p2-d2", family(4, d=2)),
    _pos("minusone-p2-d3", family(4, d=3)),
)

# z acts as diag(1, 1, -1) on the translations and squares to the first of them
T22 = CustomAffine(2, (((E1, E2, (0, 0, -1)), E1), (I3, E2), (I3, E3)), name="T2.2", dim=3)
# z swaps the first two coordinates, fixes the third, and z^2 = 1
T23 = CustomAffine(2, ((((0, 1, 0), (1, 0, 0), E3), (0, 0, 0)), (I3, E1), (I3, E2), (I3, E3)),
                   name="T2.3", dim=3)
# z swaps the first two coordinates, inverts the third, and z^2 = 1
T26 = CustomAffine(2, ((((0, 1, 0), (1, 0, 0), (0, 0, -1)), (0, 0, 0)), (I3, E1), (I3, E2), (I3, E3)),
                   name="T2.6", dim=3)
C2_Z2SQ = CustomAffine(2, ((((-1, 0), (0, -1)), (0, 0)), (((1, 0), (0, 1)), (1, 0)),
                           (((1, 0), (0, 1)), (0, 1))), name="C2 x| Z_2^2", dim=2)
# counter coordinate for y (acting as 4), z acting as omega on Z_3[omega]
CASE21 = CustomAffine(3, (
    (((1, 0, 0), (0, 4, 0), (0, 0, 4)), E1),
    (((1, 0, 0), (0, 0, -1), (0, 1, -1)), (0, 0, 0)),
    (I3, E2),
    (I3, E3),
), name="p=3 case 2.1", dim=3)
KLEIN = CustomAffine(2, (
    (((1, 0, 0), (0, -1, 0), (0, 0, -1)), (1, 1, 0)),
    (((-1, 0, 0), (0, 1, 0), (0, 0, -1)), (0, 1, 1)),
), name="Klein four", dim=3)

NEGATIVE = (
    SuiteEntry("t22-p2-d3", T22, 1, "witness with d = d(G) - 1", {"d_found": 2}),
    SuiteEntry("t23-swap-p2-d3", T23, 1, "witness with d = d(G) + 1", {"d_found": 4}),
    SuiteEntry("t26-swap-p2-d3", T26, 1, "witness with d = d(G) + 1", {"d_found": 4}),
    SuiteEntry("c2-z2sq-affine", C2_Z2SQ, 1, "witness at index 2", {"index": 2}),
    SuiteEntry("c2-z2sq-torsion", TorsionScalar(2), 1, "witness at index 2",
               {"index": 2, "d_found": 2, "d_expected": 3}),
    SuiteEntry("case21-p3-omega", CASE21, 1, "2-generated witness", {"d_found": 2}),
    SuiteEntry("unipotent-p5", MatrixSplit(5, ((1, 5), (0, 1))), 1, "witness at index 5",
               {"index": 5, "d_found": 2, "d_expected": 3}),
    SuiteEntry("diag-4-10-p3", MatrixSplit(3, ((4, 0), (0, 10))), 1, "non-scalar action", {}),
    SuiteEntry("klein-four-p2", KLEIN, 2, "2-generated at the top", {"d_group": 2}),
)


def by_name(name: str) -> SuiteEntry:
    for e in POSITIVE + NEGATIVE:
        if e.name == name:
            return e
    raise KeyError(name)
