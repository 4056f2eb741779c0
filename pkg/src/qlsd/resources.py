"""Shared entangled resource states, each with an explicit distribution note.

Resources are ancilla-only layouts whose parties map positionally onto a state
set's parties when a protocol runs.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .model import Ket, PartyLayout, Resource
from .scalars import CScalar, QScalar


def _anc_layout(n_parties: int, dims_per_party: list[int]) -> PartyLayout:
    parties = [(f"P{i+1}", 0) for i in range(n_parties)]
    anc = {f"P{i+1}": list(dims_per_party) for i in range(n_parties)}
    return PartyLayout(parties, anc)


def epr() -> Resource:
    """Two-qubit maximally entangled state (|00> + |11>)/sqrt2 between two parties."""
    layout = _anc_layout(2, [2])
    inv = CScalar(QScalar(0, Fraction(1, 2)))
    ket = Ket(layout, {0: inv, 3: inv})
    return Resource("epr", layout, ket, note="one qubit per party")


def chi(alpha, beta, n: int = 2) -> Resource:
    """alpha|0...0> + beta|1...1> on n parties; exact when the weights parse exactly."""
    layout = _anc_layout(n, [2])
    top = 2 ** n - 1
    try:
        a = CScalar.parse(alpha) if not isinstance(alpha, CScalar) else alpha
        b = CScalar.parse(beta) if not isinstance(beta, CScalar) else beta
        ket = Ket(layout, {0: a, top: b})
    except (ValueError, TypeError):
        ket = Ket(layout, {0: complex(alpha), top: complex(beta)}, exact=False)
    name = "chi" if n == 2 else f"chi{n}"
    return Resource(name, layout, ket, note="one qubit per party, tunable weights")


def ghz(n: int) -> Resource:
    """n-party GHZ state (|0...0> + |1...1>)/sqrt2, one qubit per party."""
    layout = _anc_layout(n, [2])
    inv = CScalar(QScalar(0, Fraction(1, 2)))
    ket = Ket(layout, {0: inv, 2 ** n - 1: inv})
    return Resource(f"ghz{n}", layout, ket, note="one qubit per party")


def w3() -> Resource:
    """Three-qubit W state; 1/sqrt3 leaves Q(sqrt2), so this one is float-path."""
    layout = _anc_layout(3, [2])
    c = 1.0 / math.sqrt(3.0)
    ket = Ket(layout, {1: c, 2: c, 4: c}, exact=False)
    return Resource("w3", layout, ket, note="one qubit per party (float amplitudes)")


def ghz3_pair() -> Resource:
    """Two copies of the three-qubit GHZ state, each party holding one qubit of each."""
    layout = _anc_layout(3, [2, 2])
    half = CScalar(QScalar(Fraction(1, 2)))
    amps = {}
    for x in (0, 1):
        for y in (0, 1):
            coords = (x, y, x, y, x, y)
            amps[layout.index_of(coords)] = half
    ket = Ket(layout, amps)
    return Resource("ghz3x2", layout, ket,
                    note="two GHZ copies; party i holds qubit i of each copy")


def epr_triangle() -> Resource:
    """Three EPR pairs on the triangle P1-P2, P2-P3, P1-P3 (two qubits per party)."""
    layout = _anc_layout(3, [2, 2])
    c = CScalar(QScalar(0, Fraction(1, 4)))  # 1/(2 sqrt2)
    amps = {}
    for x in (0, 1):
        for y in (0, 1):
            for z in (0, 1):
                # P1 = (x, z), P2 = (x, y), P3 = (y, z)
                coords = (x, z, x, y, y, z)
                amps[layout.index_of(coords)] = c
    ket = Ket(layout, amps)
    return Resource("epr-triangle", layout, ket,
                    note="pairs on P1-P2 (anc0,anc0), P2-P3 (anc1,anc0), P1-P3 (anc1,anc1)")


def ghz4level() -> Resource:
    """Three-party four-level GHZ (|000>+|111>+|222>+|333>)/2, one share per party."""
    layout = _anc_layout(3, [4])
    half = CScalar(QScalar(Fraction(1, 2)))
    amps = {layout.index_of((t, t, t)): half for t in range(4)}
    ket = Ket(layout, amps)
    return Resource("ghz4level", layout, ket, note="one four-level share per party")


def product_zero(n_parties: int, dims_per_party: list[int]) -> Resource:
    """|0...0> on the given ancilla layout: the unentangled baseline."""
    layout = _anc_layout(n_parties, dims_per_party)
    ket = Ket(layout, {0: CScalar(QScalar(1))})
    return Resource("product-zero", layout, ket, note="no entanglement")


_FIXED = {
    "epr": epr,
    "w3": w3,
    "ghz3x2": ghz3_pair,
    "epr-triangle": epr_triangle,
    "ghz4level": ghz4level,
}


def build(name: str, **kwargs) -> Resource:
    """Resolve a resource catalog name, e.g. "epr", "ghz3", "chi", "ghz3x2"."""
    if name in _FIXED:
        return _FIXED[name]()
    if name.startswith("ghz") and name[3:].isdigit():
        return ghz(int(name[3:]))
    if name == "chi" or (name.startswith("chi") and name[3:].isdigit()):
        n = int(name[3:]) if name[3:] else 2
        return chi(kwargs.get("alpha", "3/5"), kwargs.get("beta", "4/5"), n)
    raise KeyError(f"unknown resource {name!r}")


def catalog_names() -> list[str]:
    return ["epr", "chi", "ghz<N>", "w3", "ghz3x2", "epr-triangle", "ghz4level"]
