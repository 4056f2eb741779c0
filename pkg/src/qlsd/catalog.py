"""Constructors for the shipped nonlocal product-state sets and combinators.

Every constructor returns a verified :class:`~qlsd.model.StateSet` (pairwise
orthogonality is checked exactly on construction) with deterministic member
ordering and labels: sign "+" before "-", four-state families in lexicographic
(i,j,k) order.  Symbolic basis labels are shipped per set (e.g. the four-level
first party of ``g3`` uses labels p, q, 1, 2), so members are named by their
factor content, like ``"p|eps+|2"`` or ``"0|S0123.011|3"``.

Nonlocality status is carried as provenance metadata, never asserted as a
verified fact: the checker in :mod:`qlsd.irreducibility` produces evidence.
"""

from __future__ import annotations

from fractions import Fraction

from .model import PartyLayout, ProductState, StateSet
from .scalars import CScalar, QScalar

_HALF = CScalar(QScalar(Fraction(1, 2)))
_INV_SQRT2 = CScalar(QScalar(0, Fraction(1, 2)))
_ONE = CScalar(QScalar(1))

QUAD_SIGNS = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]


def basis_vec(dim: int, i: int) -> list[CScalar]:
    v = [CScalar() for _ in range(dim)]
    v[i] = _ONE
    return v


def pair_vec(dim: int, i: int, j: int, sign: int) -> list[CScalar]:
    """(|i> +- |j>)/sqrt2."""
    v = [CScalar() for _ in range(dim)]
    v[i] = _INV_SQRT2
    v[j] = _INV_SQRT2 if sign > 0 else -_INV_SQRT2
    return v


def quad_vec(dim: int, levels: tuple[int, int, int, int], ijk: tuple[int, int, int]) -> list[CScalar]:
    """(|a> + (-1)^i |b> + (-1)^j |c> + (-1)^k |d>)/2 on the given levels."""
    i, j, k = ijk
    v = [CScalar() for _ in range(dim)]
    v[levels[0]] = _HALF
    v[levels[1]] = _HALF if i == 0 else -_HALF
    v[levels[2]] = _HALF if j == 0 else -_HALF
    v[levels[3]] = _HALF if k == 0 else -_HALF
    return v


def quad_name(labels: list[str], levels: tuple[int, int, int, int], ijk) -> str:
    lv = "".join(labels[x] for x in levels)
    return f"S{lv}.{ijk[0]}{ijk[1]}{ijk[2]}"


def _sgn(sign: int) -> str:
    return "+" if sign > 0 else "-"


# ---------------------------------------------------------------------------
# Two-qutrit domino set (the classic 3x3 tiling)
# ---------------------------------------------------------------------------

def build_s_ben() -> StateSet:
    """The 8 orthogonal domino states on C3 x C3.

    eta+- = (|0> +- |1>)/sqrt2, xi+- = (|1> +- |2>)/sqrt2.
    """
    layout = PartyLayout([("A", 3), ("B", 3)],
                         labels={"A": ["0", "1", "2"], "B": ["0", "1", "2"]})
    members = []

    def add(a, b, label):
        members.append(ProductState(layout, [a, b], label))

    for s in (1, -1):
        add(basis_vec(3, 0), pair_vec(3, 0, 1, s), f"0|eta{_sgn(s)}")
    for s in (1, -1):
        add(pair_vec(3, 0, 1, s), basis_vec(3, 2), f"eta{_sgn(s)}|2")
    for s in (1, -1):
        add(basis_vec(3, 2), pair_vec(3, 1, 2, s), f"2|xi{_sgn(s)}")
    for s in (1, -1):
        add(pair_vec(3, 1, 2, s), basis_vec(3, 0), f"xi{_sgn(s)}|0")
    return StateSet(layout, members, "sben",
                    provenance="claimed nonlocal (two-party domino construction)")


# ---------------------------------------------------------------------------
# The (m+1)-party family: Alice in C^{m+2}, m assistants in C^3
# ---------------------------------------------------------------------------

def g_alice_labels(m: int) -> list[str]:
    return ["p", "q"] + [str(i) for i in range(1, m + 1)]


def g_layout(m: int) -> PartyLayout:
    parties = [("A", m + 2)] + [(f"B{i}", 3) for i in range(1, m + 1)]
    labels = {"A": g_alice_labels(m)}
    for i in range(1, m + 1):
        labels[f"B{i}"] = ["p", "q", str(i)]
    return PartyLayout(parties, labels=labels)


def _g_fixed_tag_label(m: int) -> list[str]:
    # assistant j's fixed state is its own third level, labeled str(j)
    return [str(j) for j in range(1, m + 1)]


def g_member_label(m: int, which: str, i: int | None, sign: int) -> str:
    """Deterministic member labels for the (m+1)-party family."""
    tags = _g_fixed_tag_label(m)
    s = _sgn(sign)
    if which == "top":
        cols = [f"eps{s}"] + tags
    elif which == "one":
        cols = [str(i)] + tags[: i - 1] + [f"gam{i}{s}"] + tags[i:]
    elif which == "two":
        cols = [f"gam{i}{s}"] + tags[: i - 1] + ["p"] + tags[i:]
    elif which == "three":
        cols = ["p"] + tags[: i - 1] + [f"eps{s}"] + tags[i:]
    else:
        raise ValueError(which)
    return "|".join(cols)


def build_g_general(m: int) -> StateSet:
    """The 6m+2 orthogonal product states on C^{m+2} x (C^3)^m.

    Alice's basis is labeled p, q, 1..m; assistant i's basis is p, q, i.
    eps+- = (|p> +- |q>)/sqrt2 and gam_i+- = (|q> +- |i>)/sqrt2.  Restricted to
    Alice and assistant i (others carrying their fixed tags), each block is the
    domino pattern of :func:`build_s_ben`.
    """
    if m < 1:
        raise ValueError("the family needs at least one assistant (m >= 1)")
    layout = g_layout(m)
    da = m + 2
    members = []

    def bob_vecs(fixed_except: int | None = None, special=None):
        out = []
        for j in range(1, m + 1):
            if j == fixed_except:
                out.append(special)
            else:
                out.append(basis_vec(3, 2))
        return out

    for s in (1, -1):
        members.append(ProductState(
            layout, [pair_vec(da, 0, 1, s)] + bob_vecs(),
            g_member_label(m, "top", None, s)))
    for i in range(1, m + 1):
        for s in (1, -1):
            members.append(ProductState(
                layout,
                [basis_vec(da, i + 1)] + bob_vecs(i, pair_vec(3, 1, 2, s)),
                g_member_label(m, "one", i, s)))
        for s in (1, -1):
            members.append(ProductState(
                layout,
                [pair_vec(da, 1, i + 1, s)] + bob_vecs(i, basis_vec(3, 0)),
                g_member_label(m, "two", i, s)))
        for s in (1, -1):
            members.append(ProductState(
                layout,
                [basis_vec(da, 0)] + bob_vecs(i, pair_vec(3, 0, 1, s)),
                g_member_label(m, "three", i, s)))
    name = f"g{m + 1}"
    return StateSet(layout, members, name,
                    provenance="claimed genuinely nonlocal (every m-party grouping "
                               "retains a domino core with fixed tags)")


def build_g3() -> StateSet:
    """The 14-state three-party instance (m = 2) of the general family."""
    return build_g_general(2)


# ---------------------------------------------------------------------------
# Two-qudit layered tiling on C5 x C5
# ---------------------------------------------------------------------------

SG5_LABELS = ["a", "b", "c", "d", "e"]


def build_sg5() -> StateSet:
    """The 24-state layered tiling on C5 x C5.

    Inner tiles are +- pairs over {a,b,c}; outer tiles are four-state families
    S_abcd and S_abce (levels d and e close the layer).
    """
    layout = PartyLayout([("A", 5), ("B", 5)],
                         labels={"A": SG5_LABELS, "B": SG5_LABELS})
    L = SG5_LABELS
    members = []

    def add(a, b, label):
        members.append(ProductState(layout, [a, b], label))

    for s in (1, -1):
        add(basis_vec(5, 0), pair_vec(5, 0, 1, s), f"a|s{_sgn(s)}")
    for s in (1, -1):
        add(pair_vec(5, 0, 1, s), basis_vec(5, 2), f"s{_sgn(s)}|c")
    for s in (1, -1):
        add(basis_vec(5, 2), pair_vec(5, 1, 2, s), f"c|t{_sgn(s)}")
    for s in (1, -1):
        add(pair_vec(5, 1, 2, s), basis_vec(5, 0), f"t{_sgn(s)}|a")
    abcd = (0, 1, 2, 3)
    abce = (0, 1, 2, 4)
    for ijk in QUAD_SIGNS:
        add(basis_vec(5, 3), quad_vec(5, abcd, ijk), f"d|{quad_name(L, abcd, ijk)}")
    for ijk in QUAD_SIGNS:
        add(quad_vec(5, abcd, ijk), basis_vec(5, 4), f"{quad_name(L, abcd, ijk)}|e")
    for ijk in QUAD_SIGNS:
        add(basis_vec(5, 4), quad_vec(5, abce, ijk), f"e|{quad_name(L, abce, ijk)}")
    for ijk in QUAD_SIGNS:
        add(quad_vec(5, abce, ijk), basis_vec(5, 3), f"{quad_name(L, abce, ijk)}|d")
    return StateSet(layout, members, "sg5",
                    provenance="claimed nonlocal (layered tile structure)")


# ---------------------------------------------------------------------------
# The 42-state three-party set on C6 x C5 x C5
# ---------------------------------------------------------------------------

SIGMA_A_LABELS = ["0", "1", "2", "3", "4", "5"]
SIGMA_B1_LABELS = ["0", "1", "2", "3", "4"]
# The source construction tags the second assistant with levels 1..5 and never
# uses a level 0 there; indices are relabeled 1..5 -> 0..4 (recorded decision),
# the shipped label map preserves the original names.
SIGMA_B2_LABELS = ["1", "2", "3", "4", "5"]


def sigma_layout() -> PartyLayout:
    return PartyLayout(
        [("A", 6), ("B1", 5), ("B2", 5)],
        labels={"A": SIGMA_A_LABELS, "B1": SIGMA_B1_LABELS, "B2": SIGMA_B2_LABELS},
    )


def _b2(label: str) -> int:
    return SIGMA_B2_LABELS.index(label)


SIGMA_QUADS = {
    # family -> (party, levels on that party's index space)
    "psi_b1": ("B1", (0, 1, 2, 3)),
    "psi_a": ("A", (0, 1, 2, 3)),
    "phi_b1": ("B1", (1, 2, 3, 4)),
    "phi_a": ("A", (1, 2, 3, 4)),
    "phi_b2": ("B2", (_b2("1"), _b2("2"), _b2("3"), _b2("4"))),
    "ups_a": ("A", (1, 2, 4, 5)),
    "ups_b2": ("B2", (_b2("1"), _b2("2"), _b2("4"), _b2("5"))),
}


def sigma_pair_label(idx: int, sign: int) -> str:
    cols = {
        1: ["1", f"alpha{_sgn(sign)}", "4"],
        2: [f"alpha{_sgn(sign)}", "3", "4"],
        3: ["3", f"beta{_sgn(sign)}", "4"],
        4: [f"beta{_sgn(sign)}", "1", "4"],
        5: ["4", "3", f"gam{_sgn(sign)}"],
        6: [f"gam{_sgn(sign)}", "3", "1"],
        7: ["1", "3", f"alpha{_sgn(sign)}"],
    }[idx]
    return "|".join(cols)


def sigma_quad_label(idx: int, ijk) -> str:
    sfx = f"{ijk[0]}{ijk[1]}{ijk[2]}"
    cols = {
        8: ["0", f"S0123.{sfx}", "3"],
        9: [f"S0123.{sfx}", "4", "3"],
        10: ["4", f"S1234.{sfx}", "3"],
        11: [f"S1234.{sfx}", "0", "3"],
        12: ["5", "0", f"S1234.{sfx}"],
        13: [f"S1245.{sfx}", "0", "5"],
        14: ["3", "0", f"S1245.{sfx}"],
    }[idx]
    return "|".join(cols)


def build_sigma() -> StateSet:
    """The 42-state set on C6 x C5 x C5: seven +- pairs and seven quad families.

    alpha+- = (|1> +- |2>)/sqrt2, beta+- = (|2> +- |3>)/sqrt2 and
    gam+- = (|2> +- |4>)/sqrt2 (on the second assistant's original labels).
    """
    layout = sigma_layout()
    members = []

    def add(a, b1, b2, label):
        members.append(ProductState(layout, [a, b1, b2], label))

    b2_4 = _b2("4")
    for s in (1, -1):
        add(basis_vec(6, 1), pair_vec(5, 1, 2, s), basis_vec(5, b2_4),
            sigma_pair_label(1, s))
    for s in (1, -1):
        add(pair_vec(6, 1, 2, s), basis_vec(5, 3), basis_vec(5, b2_4),
            sigma_pair_label(2, s))
    for s in (1, -1):
        add(basis_vec(6, 3), pair_vec(5, 2, 3, s), basis_vec(5, b2_4),
            sigma_pair_label(3, s))
    for s in (1, -1):
        add(pair_vec(6, 2, 3, s), basis_vec(5, 1), basis_vec(5, b2_4),
            sigma_pair_label(4, s))
    for s in (1, -1):
        add(basis_vec(6, 4), basis_vec(5, 3), pair_vec(5, _b2("2"), _b2("4"), s),
            sigma_pair_label(5, s))
    for s in (1, -1):
        add(pair_vec(6, 2, 4, s), basis_vec(5, 3), basis_vec(5, _b2("1")),
            sigma_pair_label(6, s))
    for s in (1, -1):
        add(basis_vec(6, 1), basis_vec(5, 3), pair_vec(5, _b2("1"), _b2("2"), s),
            sigma_pair_label(7, s))

    b2_3 = _b2("3")
    for ijk in QUAD_SIGNS:
        add(basis_vec(6, 0), quad_vec(5, SIGMA_QUADS["psi_b1"][1], ijk),
            basis_vec(5, b2_3), sigma_quad_label(8, ijk))
    for ijk in QUAD_SIGNS:
        add(quad_vec(6, SIGMA_QUADS["psi_a"][1], ijk), basis_vec(5, 4),
            basis_vec(5, b2_3), sigma_quad_label(9, ijk))
    for ijk in QUAD_SIGNS:
        add(basis_vec(6, 4), quad_vec(5, SIGMA_QUADS["phi_b1"][1], ijk),
            basis_vec(5, b2_3), sigma_quad_label(10, ijk))
    for ijk in QUAD_SIGNS:
        add(quad_vec(6, SIGMA_QUADS["phi_a"][1], ijk), basis_vec(5, 0),
            basis_vec(5, b2_3), sigma_quad_label(11, ijk))
    for ijk in QUAD_SIGNS:
        add(basis_vec(6, 5), basis_vec(5, 0),
            quad_vec(5, SIGMA_QUADS["phi_b2"][1], ijk), sigma_quad_label(12, ijk))
    for ijk in QUAD_SIGNS:
        add(quad_vec(6, SIGMA_QUADS["ups_a"][1], ijk), basis_vec(5, 0),
            basis_vec(5, _b2("5")), sigma_quad_label(13, ijk))
    for ijk in QUAD_SIGNS:
        add(basis_vec(6, 3), basis_vec(5, 0),
            quad_vec(5, SIGMA_QUADS["ups_b2"][1], ijk), sigma_quad_label(14, ijk))
    return StateSet(layout, members, "sigma",
                    provenance="claimed genuinely nonlocal (both two-party "
                               "restrictions show the layered tiling)")


def sigma_ab1_subset_labels() -> list[str]:
    """The members whose A-B1 restriction forms the layered tiling."""
    out = []
    for idx in (1, 2, 3, 4):
        out += [sigma_pair_label(idx, 1), sigma_pair_label(idx, -1)]
    for idx in (8, 9, 10, 11):
        out += [sigma_quad_label(idx, ijk) for ijk in QUAD_SIGNS]
    return out


# ---------------------------------------------------------------------------
# The 27-state three-qutrit basis
# ---------------------------------------------------------------------------

def build_h() -> StateSet:
    """The complete orthogonal product basis of (C3)^3: 24 tilted states + |kkk>.

    eta+- = (|0> +- |1>)/sqrt2, kap+- = (|0> +- |2>)/sqrt2.
    """
    layout = PartyLayout([("A", 3), ("B", 3), ("C", 3)],
                         labels={p: ["0", "1", "2"] for p in "ABC"})
    members = []

    def eta(s):
        return pair_vec(3, 0, 1, s)

    def kap(s):
        return pair_vec(3, 0, 2, s)

    rows = [
        (lambda s: [basis_vec(3, 0), basis_vec(3, 1), eta(s)], "0|1|eta{s}"),
        (lambda s: [basis_vec(3, 1), eta(s), basis_vec(3, 0)], "1|eta{s}|0"),
        (lambda s: [eta(s), basis_vec(3, 0), basis_vec(3, 1)], "eta{s}|0|1"),
        (lambda s: [basis_vec(3, 0), basis_vec(3, 2), kap(s)], "0|2|kap{s}"),
        (lambda s: [basis_vec(3, 2), kap(s), basis_vec(3, 0)], "2|kap{s}|0"),
        (lambda s: [kap(s), basis_vec(3, 0), basis_vec(3, 2)], "kap{s}|0|2"),
        (lambda s: [basis_vec(3, 1), basis_vec(3, 2), eta(s)], "1|2|eta{s}"),
        (lambda s: [basis_vec(3, 2), eta(s), basis_vec(3, 1)], "2|eta{s}|1"),
        (lambda s: [eta(s), basis_vec(3, 1), basis_vec(3, 2)], "eta{s}|1|2"),
        (lambda s: [basis_vec(3, 2), basis_vec(3, 1), kap(s)], "2|1|kap{s}"),
        (lambda s: [basis_vec(3, 1), kap(s), basis_vec(3, 2)], "1|kap{s}|2"),
        (lambda s: [kap(s), basis_vec(3, 2), basis_vec(3, 1)], "kap{s}|2|1"),
    ]
    for mk, pat in rows:
        for s in (1, -1):
            members.append(ProductState(layout, mk(s), pat.format(s=_sgn(s))))
    for k in range(3):
        members.append(ProductState(
            layout, [basis_vec(3, k)] * 3, f"{k}|{k}|{k}"))
    return StateSet(layout, members, "h",
                    provenance="claimed genuinely nonlocal basis (strong form: "
                               "single states cannot be removed by any "
                               "orthogonality-preserving local measurement)")


H_PRIME_LABELS = ["0|1|eta+", "0|1|eta-", "1|eta+|0", "1|eta-|0",
                  "eta+|0|1", "eta-|0|1", "0|0|0", "1|1|1"]


def build_h_prime() -> StateSet:
    """The 8-state sub-basis matching the SHIFTS unextendible-product-basis completion."""
    return restrict(build_h(), H_PRIME_LABELS, "h_prime")


# ---------------------------------------------------------------------------
# Combinators
# ---------------------------------------------------------------------------

def restrict(s: StateSet, labels: list[str], name: str) -> StateSet:
    members = [s.member(l) for l in labels]
    return StateSet(s.layout, members, name, provenance=s.provenance)


def singleton_set(layout: PartyLayout, locals_: list[list[CScalar]], label: str,
                  name: str | None = None) -> StateSet:
    st = ProductState(layout, locals_, label)
    return StateSet(layout, [st], name or label)


def union_orthogonal(s: StateSet, t: StateSet) -> StateSet:
    """Concatenate two mutually orthogonal sets; raises naming the offending pair."""
    if s.layout.to_json() != t.layout.to_json():
        raise ValueError("union requires identical layouts")
    for a in s.members:
        for b in t.members:
            if not a.inner(b).is_zero():
                raise ValueError(
                    f"cross inner product of {a.label!r} and {b.label!r} is nonzero")
    return StateSet(s.layout, s.members + t.members, f"{s.name}+{t.name}",
                    provenance=s.provenance)


def append_fixed_local(s: StateSet, fixed: ProductState,
                       placement: dict[str, str]) -> StateSet:
    """Tensor every member with the same fixed product state on new parties.

    ``placement`` maps each new party to the existing party that physically
    holds the factor; the mapping is recorded in the result's provenance.
    """
    for new_p in fixed.layout.party_names:
        holder = placement.get(new_p)
        if holder not in s.layout.party_names:
            raise ValueError(f"placement for {new_p!r} references unknown party {holder!r}")
    parties = [(p, s.layout.system_dims[p]) for p in s.layout.party_names]
    parties += [(p, fixed.layout.system_dims[p]) for p in fixed.layout.party_names]
    labels = dict(s.layout.labels)
    labels.update(fixed.layout.labels)
    layout = PartyLayout(parties, labels=labels)
    members = [
        ProductState(layout, m.locals + fixed.locals, m.label)
        for m in s.members
    ]
    note = ", ".join(f"{p} held by {placement[p]}" for p in fixed.layout.party_names)
    return StateSet(layout, members, f"{s.name}*{fixed.label}",
                    provenance=f"{s.provenance or ''} [fixed local factors: {note}]".strip())


def project_out_fixed(s: StateSet, fixed: ProductState, base_name: str) -> StateSet:
    """Undo :func:`append_fixed_local`, verifying the dropped factors match exactly."""
    n_keep = len(s.layout.party_names) - len(fixed.layout.party_names)
    kept = s.layout.party_names[:n_keep]
    parties = [(p, s.layout.system_dims[p]) for p in kept]
    labels = {p: s.layout.labels[p] for p in kept if p in s.layout.labels}
    layout = PartyLayout(parties, labels=labels)
    members = []
    for m in s.members:
        for vec, ref in zip(m.locals[n_keep:], fixed.locals):
            if vec != ref:
                raise ValueError(f"member {m.label!r} does not carry the fixed factor")
        members.append(ProductState(layout, m.locals[:n_keep], m.label))
    return StateSet(layout, members, base_name)


BUILDERS = {
    "sben": build_s_ben,
    "g3": build_g3,
    "sg5": build_sg5,
    "sigma": build_sigma,
    "h": build_h,
    "h_prime": build_h_prime,
}


def build(name: str, m: int | None = None) -> StateSet:
    """Build a catalog set by name; ``g{n}`` takes n from the name or --m."""
    if name in BUILDERS:
        return BUILDERS[name]()
    if name == "g":
        if m is None:
            raise ValueError("g requires --m")
        return build_g_general(m)
    if name.startswith("g") and name[1:].isdigit():
        n = int(name[1:])
        if n < 2:
            raise ValueError("gN needs N >= 2 parties")
        return build_g_general(n - 1)
    raise KeyError(f"unknown catalog set {name!r}")


def catalog_names() -> list[str]:
    return ["sben", "g3", "g<N>", "sg5", "sigma", "h", "h_prime"]
