"""States, party structure, resources, and reduced-state utilities.

Subsystem ordering convention used everywhere (JSON files, operators, kets):
all system factors in party order first, then all ancilla factors in party
order.  This removes the usual ambiguity of interleaving a party's system with
its ancilla shares.

Amplitudes are exact (:class:`~qlsd.scalars.CScalar`) by default.  Kets built
from floating-point input carry ``exact=False`` and are compared with a single
global tolerance (default ``1e-9``); every report downstream flags which
arithmetic path was used.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import Matrix, rank_complex
from .scalars import CScalar, C_ONE, C_ZERO, QScalar, Q_ZERO

TOLERANCE_DEFAULT = 1e-9


@dataclass(frozen=True)
class Factor:
    name: str
    owner: str
    dim: int
    kind: str  # "system" | "ancilla"


class PartyLayout:
    """Declared per-party system dimensions plus optional ancilla shares."""

    def __init__(
        self,
        parties: list[tuple[str, int]],
        ancillas: dict[str, list[int]] | None = None,
        labels: dict[str, list[str]] | None = None,
    ):
        names = [p for p, _ in parties]
        if len(set(names)) != len(names):
            raise ValueError("party names must be unique")
        self.party_names = names
        self.system_dims = {p: d for p, d in parties if d}
        self.ancillas = {p: list(ds) for p, ds in (ancillas or {}).items() if ds}
        for p in self.ancillas:
            if p not in names:
                raise ValueError(f"ancilla owner {p!r} is not a declared party")
        self.labels = dict(labels or {})
        self._factors = self._build_factors()
        self._strides = self._build_strides()

    def _build_factors(self) -> list[Factor]:
        factors = [
            Factor(p, p, self.system_dims[p], "system")
            for p in self.party_names
            if p in self.system_dims
        ]
        for p in self.party_names:
            for k, d in enumerate(self.ancillas.get(p, [])):
                factors.append(Factor(f"{p}.anc{k}", p, d, "ancilla"))
        return factors

    def _build_strides(self) -> list[int]:
        strides = [1] * len(self._factors)
        for i in range(len(self._factors) - 2, -1, -1):
            strides[i] = strides[i + 1] * self._factors[i + 1].dim
        return strides

    @property
    def factors(self) -> list[Factor]:
        return self._factors

    @property
    def factor_dims(self) -> list[int]:
        return [f.dim for f in self._factors]

    @property
    def total_dim(self) -> int:
        n = 1
        for f in self._factors:
            n *= f.dim
        return n

    def coords_of(self, index: int) -> tuple[int, ...]:
        out = []
        for s, f in zip(self._strides, self._factors):
            out.append((index // s) % f.dim)
        return tuple(out)

    def index_of(self, coords) -> int:
        return sum(c * s for c, s in zip(coords, self._strides))

    def factor_positions(self, owner: str, kinds=("system", "ancilla")) -> list[int]:
        """Positions (in canonical factor order) of the factors a party holds."""
        return [
            i
            for i, f in enumerate(self._factors)
            if f.owner == owner and f.kind in kinds
        ]

    def party_local_dim(self, party: str) -> int:
        n = 1
        for i in self.factor_positions(party):
            n *= self._factors[i].dim
        return n

    def label_index(self, party: str, label: str) -> int:
        labels = self.labels.get(party)
        if labels is None:
            return int(label)
        return labels.index(label)

    def with_resource(self, resource_layout: PartyLayout) -> PartyLayout:
        """Attach a resource's ancilla shares, matching parties positionally."""
        if len(resource_layout.party_names) != len(self.party_names):
            raise ValueError("resource party count does not match the set layout")
        anc = {p: list(ds) for p, ds in self.ancillas.items()}
        for mine, theirs in zip(self.party_names, resource_layout.party_names):
            extra = resource_layout.ancillas.get(theirs, [])
            anc.setdefault(mine, [])
            anc[mine] = anc[mine] + list(extra)
        return PartyLayout(
            [(p, self.system_dims.get(p, 0)) for p in self.party_names],
            anc,
            self.labels,
        )

    def to_json(self):
        out = []
        for p in self.party_names:
            entry: dict = {"party": p}
            if p in self.system_dims:
                entry["dim"] = self.system_dims[p]
            if self.ancillas.get(p):
                entry["ancilla_dims"] = self.ancillas[p]
            if p in self.labels:
                entry["labels"] = self.labels[p]
            out.append(entry)
        return out

    @classmethod
    def from_json(cls, obj) -> PartyLayout:
        parties = [(e["party"], e.get("dim", 0)) for e in obj]
        anc = {e["party"]: e["ancilla_dims"] for e in obj if e.get("ancilla_dims")}
        labels = {e["party"]: e["labels"] for e in obj if e.get("labels")}
        return cls(parties, anc, labels)

    def __eq__(self, other):
        if not isinstance(other, PartyLayout):
            return NotImplemented
        return self.to_json() == other.to_json()


def _is_exact_amp(v) -> bool:
    return isinstance(v, CScalar)


class Ket:
    """A state vector over a layout's tensor product, sparse over basis indices.

    ``exact`` selects the arithmetic path: CScalar amplitudes with zero
    tolerance, or complex floats with the global tolerance.
    """

    def __init__(self, layout: PartyLayout, amps: dict, exact: bool = True):
        self.layout = layout
        self.exact = exact
        if exact:
            self.amps = {i: v for i, v in amps.items() if not v.is_zero()}
        else:
            self.amps = {i: complex(v) for i, v in amps.items() if abs(complex(v)) > 0}

    def to_float(self) -> Ket:
        if not self.exact:
            return self
        return Ket(self.layout, {i: complex(v) for i, v in self.amps.items()}, exact=False)

    def norm2(self):
        if self.exact:
            n = Q_ZERO
            for v in self.amps.values():
                n = n + v.abs2()
            return n
        return sum(abs(v) ** 2 for v in self.amps.values())

    def is_normalized(self, tol: float = TOLERANCE_DEFAULT) -> bool:
        n = self.norm2()
        if self.exact:
            return n == QScalar(1)
        return abs(n - 1.0) <= tol

    def dense(self) -> list:
        zero = C_ZERO if self.exact else 0j
        out = [zero] * self.layout.total_dim
        for i, v in self.amps.items():
            out[i] = v
        return out

    def to_json(self):
        state = []
        for v in self.dense():
            state.append(v.to_json() if self.exact else [v.real, v.imag])
        return {"layout": self.layout.to_json(), "amplitudes": state}

    @classmethod
    def from_json(cls, obj) -> Ket:
        layout = PartyLayout.from_json(obj["layout"])
        raw = obj["amplitudes"]
        exact = all(_json_amp_exact(v) for v in raw)
        amps: dict = {}
        for i, v in enumerate(raw):
            if exact:
                c = CScalar.parse(v)
                if not c.is_zero():
                    amps[i] = c
            else:
                c = _json_amp_float(v)
                if c != 0:
                    amps[i] = c
        return cls(layout, amps, exact=exact)


def _json_amp_exact(v) -> bool:
    if isinstance(v, (str, int)):
        return True
    if isinstance(v, list) and len(v) == 2:
        return all(isinstance(x, (str, int)) for x in v)
    return False


def _json_amp_float(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, str):
        return complex(CScalar.parse(v))
    if isinstance(v, list) and len(v) == 2:
        return complex(
            _json_amp_float(v[0]).real, _json_amp_float(v[1]).real
        )
    raise ValueError(f"bad amplitude encoding: {v!r}")


def inner(x: Ket, y: Ket, tol: float = TOLERANCE_DEFAULT):
    """Hermitian inner product <x|y>, exact when both kets are exact."""
    if x.layout.factor_dims != y.layout.factor_dims:
        raise ValueError("layout mismatch in inner product")
    if x.exact and y.exact:
        acc = C_ZERO
        for i, v in x.amps.items():
            w = y.amps.get(i)
            if w is not None:
                acc = acc + v.conj() * w
        return acc
    xf, yf = x.to_float(), y.to_float()
    return sum(v.conjugate() * yf.amps.get(i, 0j) for i, v in xf.amps.items())


def tensor(kets: list[Ket]) -> Ket:
    """Flattened product of kets on disjoint layouts, in the given order.

    Party names are suffixed where they collide, so the result always has a
    well-formed layout.  Grouping factors per party afterwards (e.g. two GHZ
    copies into one four-level share per party) is a relabeling concern; see
    :func:`lu_relabel_check` and the resource builders.
    """
    exact = all(k.exact for k in kets)
    parties: list[tuple[str, int]] = []
    anc: dict[str, list[int]] = {}
    labels: dict[str, list[str]] = {}
    renames: list[dict[str, str]] = []
    seen: set[str] = set()
    for k in kets:
        ren: dict[str, str] = {}
        for p in k.layout.party_names:
            new = p
            n = 1
            while new in seen:
                new = f"{p}~{n}"
                n += 1
            seen.add(new)
            ren[p] = new
            parties.append((new, k.layout.system_dims.get(p, 0)))
            if k.layout.ancillas.get(p):
                anc[new] = list(k.layout.ancillas[p])
            if p in k.layout.labels:
                labels[new] = k.layout.labels[p]
        renames.append(ren)
    joint = PartyLayout(parties, anc, labels)
    out: dict = {0: C_ONE if exact else 1 + 0j}
    for k in kets:
        block = k.layout.total_dim
        nxt: dict = {}
        for i, v in out.items():
            for j, w in (k.amps if exact else k.to_float().amps).items():
                nxt[i * block + j] = (v * w) if exact else (complex(v) * w)
        out = nxt
    return Ket(joint, out, exact=exact)


def single_party_marginal(state: Ket, party: str) -> Matrix:
    """Exact partial trace onto one party's full local space (system + shares)."""
    if party not in state.layout.party_names:
        raise ValueError(f"unknown party {party!r}")
    if not state.exact:
        raise ValueError("marginals are computed on the exact path only")
    pos = state.layout.factor_positions(party)
    dims = state.layout.factor_dims
    local_dim = 1
    for i in pos:
        local_dim *= dims[i]
    rho = Matrix.zero(local_dim, local_dim)
    items = [(state.layout.coords_of(i), v) for i, v in state.amps.items()]
    for cx, vx in items:
        lx = 0
        for i in pos:
            lx = lx * dims[i] + cx[i]
        rest_x = tuple(c for i, c in enumerate(cx) if i not in pos)
        for cy, vy in items:
            rest_y = tuple(c for i, c in enumerate(cy) if i not in pos)
            if rest_x != rest_y:
                continue
            ly = 0
            for i in pos:
                ly = ly * dims[i] + cy[i]
            rho.data[lx][ly] = rho.data[lx][ly] + vx * vy.conj()
    return rho


def psd_check(rho: Matrix) -> bool:
    """Exact positive-semidefiniteness via all principal minors (small dims)."""
    if not rho.is_hermitian():
        return False
    n = rho.rows
    idx = list(range(n))
    from itertools import combinations

    for k in range(1, n + 1):
        for sub in combinations(idx, k):
            d = _det(rho, sub)
            if not d.im.is_zero() or d.re.sign() < 0:
                return False
    return True


def _det(m: Matrix, sub) -> CScalar:
    k = len(sub)
    if k == 1:
        return m.data[sub[0]][sub[0]]
    total = C_ZERO
    first = sub[0]
    rest = sub[1:]
    for pos, col in enumerate(sub):
        minor_cols = tuple(c for c in sub if c != col)
        v = m.data[first][col]
        if v.is_zero():
            continue
        sign = -1 if pos % 2 else 1
        d = _det_rows(m, rest, minor_cols)
        total = total + (v * d if sign > 0 else -(v * d))
    return total


def _det_rows(m: Matrix, rows, cols) -> CScalar:
    if len(rows) == 1:
        return m.data[rows[0]][cols[0]]
    total = C_ZERO
    for pos, col in enumerate(cols):
        v = m.data[rows[0]][col]
        if v.is_zero():
            continue
        minor_cols = tuple(c for c in cols if c != col)
        d = _det_rows(m, rows[1:], minor_cols)
        total = total + (v * d if pos % 2 == 0 else -(v * d))
    return total


def schmidt_rank(state: Ket, left_parties: list[str]) -> int:
    """Schmidt rank of a pure state across the cut left | rest, by exact rank."""
    names = state.layout.party_names
    left = set(left_parties)
    if not left or not left.issubset(set(names)) or left == set(names):
        raise ValueError("cut must split the parties into two nonempty groups")
    if not state.exact:
        raise ValueError("schmidt_rank is computed on the exact path only")
    dims = state.layout.factor_dims
    lpos = [i for i, f in enumerate(state.layout.factors) if f.owner in left]
    rpos = [i for i in range(len(dims)) if i not in lpos]
    ldim = 1
    for i in lpos:
        ldim *= dims[i]
    rdim = 1
    for i in rpos:
        rdim *= dims[i]
    rows = [[C_ZERO for _ in range(rdim)] for _ in range(ldim)]
    for idx, v in state.amps.items():
        c = state.layout.coords_of(idx)
        li = 0
        for i in lpos:
            li = li * dims[i] + c[i]
        ri = 0
        for i in rpos:
            ri = ri * dims[i] + c[i]
        rows[li][ri] = v
    return rank_complex(rows, rdim)


def lu_relabel_check(x: Ket, y: Ket, perms: dict[str, list[int]]) -> bool:
    """True iff per-party basis permutations map x onto y exactly.

    Each permutation acts on the party's flattened local space (its factors in
    canonical order).  Raises on malformed permutations or dimension mismatch.
    """
    if not (x.exact and y.exact):
        raise ValueError("lu_relabel_check runs on the exact path only")
    xp, yp = x.layout.party_names, y.layout.party_names
    if len(xp) != len(yp):
        raise ValueError("party count mismatch")
    for px, py in zip(xp, yp):
        if x.layout.party_local_dim(px) != y.layout.party_local_dim(py):
            raise ValueError("per-party dimensions do not match after flattening")
    for px in xp:
        perm = perms.get(px)
        if perm is None:
            raise ValueError(f"missing permutation for party {px!r}")
        if sorted(perm) != list(range(x.layout.party_local_dim(px))):
            raise ValueError(f"malformed permutation for party {px!r}")

    dims = x.layout.factor_dims
    mapped: dict[int, CScalar] = {}
    for idx, v in x.amps.items():
        coords = x.layout.coords_of(idx)
        locals_per_party = []
        for px in xp:
            pos = x.layout.factor_positions(px)
            li = 0
            for i in pos:
                li = li * dims[i] + coords[i]
            locals_per_party.append(perms[px][li])
        # recompose in y's layout (party-local flattening, canonical order)
        ydims = y.layout.factor_dims
        ycoords = [0] * len(ydims)
        for py, li in zip(yp, locals_per_party):
            pos = y.layout.factor_positions(py)
            for i in reversed(pos):
                ycoords[i] = li % ydims[i]
                li //= ydims[i]
        mapped[y.layout.index_of(ycoords)] = v
    if set(mapped) != set(y.amps):
        return False
    return all(mapped[i] == y.amps[i] for i in mapped)


class ProductState:
    """A fully product member of a state set: one local vector per party."""

    def __init__(self, layout: PartyLayout, locals_: list[list[CScalar]], label: str):
        self.layout = layout
        self.locals = locals_
        self.label = label
        for p, vec in zip(layout.party_names, locals_):
            if len(vec) != layout.system_dims[p]:
                raise ValueError(f"local factor of {label!r} has wrong dimension at {p}")

    def ket(self) -> Ket:
        amps: dict[int, CScalar] = {}
        dims = [self.layout.system_dims[p] for p in self.layout.party_names]

        def rec(pos: int, idx: int, amp: CScalar):
            if pos == len(dims):
                amps[idx] = amp
                return
            for i, v in enumerate(self.locals[pos]):
                if not v.is_zero():
                    rec(pos + 1, idx * dims[pos] + i, amp * v)

        rec(0, 0, C_ONE)
        return Ket(self.layout, amps, exact=True)

    def inner(self, other: ProductState) -> CScalar:
        acc = C_ONE
        for a, b in zip(self.locals, other.locals):
            f = C_ZERO
            for va, vb in zip(a, b):
                f = f + va.conj() * vb
            if f.is_zero():
                return C_ZERO
            acc = acc * f
        return acc

    def norm2(self) -> QScalar:
        n = self.inner(self)
        return n.re

    def to_json(self):
        return {
            "label": self.label,
            "locals": [[v.to_json() for v in vec] for vec in self.locals],
        }


class StateSet:
    """An ordered list of labeled, pairwise-orthogonal product states."""

    def __init__(self, layout: PartyLayout, members: list[ProductState], name: str,
                 check: bool = True, provenance: str | None = None):
        self.layout = layout
        self.members = members
        self.name = name
        self.provenance = provenance
        labels = [m.label for m in members]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate member labels in set {name!r}")
        if check:
            bad = self.first_nonorthogonal_pair()
            if bad is not None:
                raise ValueError(
                    f"set {name!r} members {bad[0]!r} and {bad[1]!r} are not orthogonal"
                )

    def first_nonorthogonal_pair(self):
        for i in range(len(self.members)):
            for j in range(i + 1, len(self.members)):
                if not self.members[i].inner(self.members[j]).is_zero():
                    return (self.members[i].label, self.members[j].label)
        return None

    def member(self, label: str) -> ProductState:
        for m in self.members:
            if m.label == label:
                return m
        raise KeyError(f"no member labeled {label!r} in set {self.name!r}")

    @property
    def labels(self) -> list[str]:
        return [m.label for m in self.members]

    def __len__(self):
        return len(self.members)

    def to_json(self):
        out = {
            "name": self.name,
            "layout": self.layout.to_json(),
            "members": [m.to_json() for m in self.members],
        }
        if self.provenance:
            out["provenance"] = self.provenance
        return out

    @classmethod
    def from_json(cls, obj, check: bool = True) -> StateSet:
        layout = PartyLayout.from_json(obj["layout"])
        members = [
            ProductState(
                layout,
                [[CScalar.parse(v) for v in vec] for vec in e["locals"]],
                e["label"],
            )
            for e in obj["members"]
        ]
        return cls(layout, members, obj["name"], check=check,
                   provenance=obj.get("provenance"))


class Resource:
    """A shared entangled (or product) state distributed over ancilla shares."""

    def __init__(self, name: str, layout: PartyLayout, ket: Ket, note: str = ""):
        if any(p in layout.system_dims for p in layout.party_names):
            raise ValueError("resource layouts carry ancilla factors only")
        self.name = name
        self.layout = layout
        self.ket = ket
        self.note = note
        if ket.exact and ket.norm2() != QScalar(1):
            raise ValueError(f"resource {name!r} is not normalized")

    def to_json(self):
        return {
            "name": self.name,
            "layout": self.layout.to_json(),
            "amplitudes": self.ket.to_json()["amplitudes"],
            "note": self.note,
        }

    @classmethod
    def from_json(cls, obj) -> Resource:
        ket = Ket.from_json(obj)
        return cls(obj["name"], ket.layout, ket, obj.get("note", ""))


def joint_ket(member: ProductState, resource: Resource | None) -> Ket:
    """member (systems) tensor resource (ancillas) in canonical factor order."""
    base = member.ket()
    if resource is None:
        return base
    joint_layout = member.layout.with_resource(resource.layout)
    anc_total = resource.ket.layout.total_dim
    exact = base.exact and resource.ket.exact
    amps: dict = {}
    for i, v in base.amps.items():
        for j, w in resource.ket.amps.items():
            amps[i * anc_total + j] = v * w if exact else complex(v) * complex(w)
    return Ket(joint_layout, amps, exact=exact)


def product_ancilla_resource(layout_like: Resource) -> Resource:
    """The |0...0> product resource on the same ancilla layout (no entanglement)."""
    ket = Ket(layout_like.layout, {0: C_ONE}, exact=True)
    return Resource(f"product-zero[{layout_like.name}]", layout_like.layout, ket,
                    note="unentangled ancilla placeholder")
