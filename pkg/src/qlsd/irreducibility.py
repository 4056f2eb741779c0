"""Orthogonality-preserving-measurement analysis for local irreducibility.

For an acting group of parties, the checker solves the exact linear system
over Hermitian operators E on the group's joint space:

    <psi_i| (E x I) |psi_j> = 0  for all i != j,

parameterized by d^2 real unknowns (diagonal entries, then the real and
imaginary parts of each upper off-diagonal entry, row-major).  The identity
always solves the system, so the solution dimension is at least 1; dimension
exactly 1 means no party measurement in the group can distinguish anything
while preserving orthogonality ("trivial" verdict).

Triviality at every cut is *evidence* of local irreducibility: sufficient for
it, but not necessary for indistinguishability under interactive protocols.
Reports state this explicitly and never upgrade evidence to proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .linalg import Matrix, echelon_from_rows, in_real_span
from .model import StateSet
from .scalars import CScalar, C_ZERO, QScalar, Q_ZERO


@dataclass(frozen=True)
class Cut:
    acting: tuple[str, ...]
    rest: tuple[str, ...]

    @staticmethod
    def of(sset: StateSet, acting: list[str]) -> "Cut":
        order = sset.layout.party_names
        act = tuple(p for p in order if p in acting)
        if len(act) != len(acting):
            raise ValueError("acting group contains unknown parties")
        rest = tuple(p for p in order if p not in acting)
        if not act or not rest:
            raise ValueError("acting group must be a nonempty proper subset")
        return Cut(act, rest)

    def label(self) -> str:
        return ",".join(self.acting) + " | " + ",".join(self.rest)


def _group_vector(member, layout, group: tuple[str, ...]) -> list[CScalar]:
    vecs = [member.locals[layout.party_names.index(p)] for p in group]
    out = vecs[0]
    for v in vecs[1:]:
        out = [a * b for a in out for b in v]
    return out


def _param_index(dim: int):
    """Parameter order: diagonal entries, then (re, im) per upper pair row-major."""
    off = {}
    n = dim
    for k in range(dim):
        for l in range(k + 1, dim):
            off[(k, l)] = n
            n += 2
    return off, n


def constraint_rows(sset: StateSet, cut: Cut):
    """Real constraint rows of the orthogonality-preserving system for a cut."""
    layout = sset.layout
    dim = 1
    for p in cut.acting:
        dim *= layout.system_dims[p]
    off, nparams = _param_index(dim)
    g_vecs = [_group_vector(m, layout, cut.acting) for m in sset.members]
    r_vecs = [_group_vector(m, layout, cut.rest) for m in sset.members]
    rows: list[list[QScalar]] = []
    for i, j in combinations(range(len(sset.members)), 2):
        c = C_ZERO
        for a, b in zip(r_vecs[i], r_vecs[j]):
            c = c + a.conj() * b
        if c.is_zero():
            continue
        gi, gj = g_vecs[i], g_vecs[j]
        re_row = [Q_ZERO] * nparams
        im_row = [Q_ZERO] * nparams
        for k in range(dim):
            vk = gi[k]
            if vk.is_zero():
                continue
            vk = vk.conj()
            for l in range(dim):
                wl = gj[l]
                if wl.is_zero():
                    continue
                a = vk * wl * c  # coefficient of E_{kl}
                if k == l:
                    re_row[k] = re_row[k] + a.re
                    im_row[k] = im_row[k] + a.im
                elif k < l:
                    p = off[(k, l)]
                    re_row[p] = re_row[p] + a.re
                    im_row[p] = im_row[p] + a.im
                    re_row[p + 1] = re_row[p + 1] - a.im
                    im_row[p + 1] = im_row[p + 1] + a.re
                else:
                    p = off[(l, k)]
                    re_row[p] = re_row[p] + a.re
                    im_row[p] = im_row[p] + a.im
                    re_row[p + 1] = re_row[p + 1] + a.im
                    im_row[p + 1] = im_row[p + 1] - a.re
        if any(not v.is_zero() for v in re_row):
            rows.append(re_row)
        if any(not v.is_zero() for v in im_row):
            rows.append(im_row)
    return rows, nparams, dim


def _params_to_matrix(vec: list[QScalar], dim: int) -> Matrix:
    off, _ = _param_index(dim)
    m = Matrix.zero(dim, dim)
    for k in range(dim):
        m.data[k][k] = CScalar(vec[k])
    for (k, l), p in off.items():
        m.data[k][l] = CScalar(vec[p], vec[p + 1])
        m.data[l][k] = CScalar(vec[p], -vec[p + 1])
    return m


@dataclass
class OplmEntry:
    cut: Cut
    dimension: int
    basis: list[Matrix]
    verdict: str  # "trivial" | "nontrivial"
    witness: Matrix | None

    def to_json(self):
        out = {
            "cut": self.cut.label(),
            "dimension": self.dimension,
            "verdict": self.verdict,
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def oplm_space(sset: StateSet, acting: list[str]) -> OplmEntry:
    """Solve the orthogonality-preserving operator system for one acting group."""
    cut = Cut.of(sset, acting)
    rows, nparams, dim = constraint_rows(sset, cut)
    ech = echelon_from_rows(rows, nparams)
    basis_vecs = ech.null_space()
    ident = [Q_ZERO] * nparams
    for k in range(dim):
        ident[k] = QScalar(1)
    if not in_real_span(basis_vecs, ident):
        raise AssertionError("identity left the solution space; constraints are wrong")
    d = len(basis_vecs)
    basis = [_params_to_matrix(v, dim) for v in basis_vecs]
    witness = None
    if d > 1:
        for v, m in zip(basis_vecs, basis):
            # subtract the identity component; any remainder is a witness
            tr = Q_ZERO
            for k in range(dim):
                tr = tr + v[k]
            mean = tr / QScalar(dim)
            if any((v[k] - mean).sign() != 0 for k in range(dim)) or any(
                v[p].sign() != 0 for p in range(dim, nparams)
            ):
                witness = m
                break
    verdict = "trivial" if d == 1 else "nontrivial"
    return OplmEntry(cut, d, basis, verdict, witness)


@dataclass
class IrreducibilityReport:
    set_name: str
    entries: list[OplmEntry]

    def to_json(self):
        return {
            "set": self.set_name,
            "note": (
                "dimension 1 (identity only) certifies that the acting group has no "
                "nontrivial orthogonality-preserving measurement; this is evidence of "
                "local irreducibility, sufficient for it, not a full indistinguishability proof"
            ),
            "cuts": [e.to_json() for e in self.entries],
        }

    def all_trivial(self) -> bool:
        return all(e.verdict == "trivial" for e in self.entries)


def cut_groups(sset: StateSet, mode: str) -> list[list[str]]:
    names = sset.layout.party_names
    if mode == "singles":
        return [[p] for p in names]
    if mode == "leave-one-out":
        singles = [[p] for p in names]
        loo = [[q for q in names if q != p] for p in names]
        seen = []
        for g in singles + loo:
            if g not in seen:
                seen.append(g)
        return seen
    if mode == "all":
        out = []
        for r in range(1, len(names)):
            out.extend([list(c) for c in combinations(names, r)])
        return out
    raise ValueError(f"unknown cut mode {mode!r}")


def gnps_evidence(sset: StateSet, mode: str = "leave-one-out") -> IrreducibilityReport:
    """Run the checker over every single party and every all-but-one grouping
    (or all bipartitions with mode="all")."""
    if len(sset.layout.party_names) < 2:
        raise ValueError("need at least two parties")
    entries = [oplm_space(sset, g) for g in cut_groups(sset, mode)]
    return IrreducibilityReport(sset.name, entries)
