"""Constructors for the shipped discrimination protocols.

Three protocol families are built here as plain measurement trees:

* ``prop3-m<k>`` / ``theorem1`` — GHZ-assisted discrimination of the
  (m+1)-party catalog family ``g<m+1>``.  The first branch is written out; the
  sibling branch is the ancilla bit-flip conjugate ("a similar protocol
  follows"), which leaves the GHZ resource invariant.
* ``prop5`` — four-level-GHZ-assisted discrimination of the 42-state set
  ``sigma``.  Branches two to four are cyclic ancilla-shift conjugates of the
  written branch; the run-time orthogonality audit, not the symmetry argument,
  is the correctness gate.
* The twist-breaking node for the first tile line, plus the residual-tag
  analysis that reproduces the stalling phenomenon with three EPR pairs.

Where a four-state family ends up phase-entangled with the shared ancillas
(three GHZ levels carry the signs), a plain family-basis measurement by the
holder is provably insufficient: the post-measurement survivors stop being
orthogonal.  The shipped trees therefore finish those branches with an
ancilla-release cascade: each assistant measures its share in the real
Hadamard basis (uniform outcome weights, so no information leaks early), and
the holder measures system-plus-share in the family basis whose signs are
corrected by the broadcast outcomes.  The cascade is exact and the audit
passes at every node.
"""

from __future__ import annotations

from fractions import Fraction

from . import catalog, resources
from .catalog import QUAD_SIGNS
from .linalg import Matrix, kron_all, projector
from .model import Resource, StateSet
from .protocol import Leaf, MeasurementNode, ProtocolTree
from .scalars import CScalar, QScalar


def _dproj(dim: int, levels) -> Matrix:
    m = Matrix.zero(dim, dim)
    one = CScalar(QScalar(1))
    for l in levels:
        m.data[l][l] = one
    return m


def _ident(dims: list[int]) -> Matrix:
    n = 1
    for d in dims:
        n *= d
    return Matrix.identity(n)


def _block(sys_dim: int, anc_dims: list[int], sys_levels, anc_levels) -> Matrix:
    """Projector (sum over sys_levels) x (sum over anc levels per share)."""
    mats = [_dproj(sys_dim, sys_levels)]
    for d, levels in zip(anc_dims, anc_levels):
        mats.append(_dproj(d, range(d)) if levels is None else _dproj(d, levels))
    return kron_all(mats)


def _local_vec(dims: list[int], comps: list[tuple[tuple[int, ...], CScalar]]):
    n = 1
    for d in dims:
        n *= d
    vec = [CScalar() for _ in range(n)]
    for coords, val in comps:
        idx = 0
        for c, d in zip(coords, dims):
            idx = idx * d + c
        vec[idx] = val
    return vec


def _perm_matrix(dim: int, perm: list[int]) -> Matrix:
    m = Matrix.zero(dim, dim)
    one = CScalar(QScalar(1))
    for i, t in enumerate(perm):
        m.data[t][i] = one
    return m


def _conj_subtree(node, units: dict[str, Matrix]):
    """Conjugate every operator by the actor's local unitary, recursively."""
    if isinstance(node, Leaf):
        return node
    u = units[node.actor]
    ud = u.dagger()
    ops = [(o, u @ m @ ud) for o, m in node.operators]
    children = {o: _conj_subtree(c, units) for o, c in node.children.items()}
    return MeasurementNode(node.actor, ops, children)


# ---------------------------------------------------------------------------
# GHZ-assisted protocol for the (m+1)-party family
# ---------------------------------------------------------------------------


def build_prop3_protocol(m: int) -> ProtocolTree:
    """The two-step GHZ protocol for ``g<m+1>``: a tagging measurement by the
    first party, share-checked eliminations by each assistant, then the first
    party's level readout; every +- pair finishes in a two-state sign readout.
    """
    if m < 1:
        raise ValueError("m >= 1")
    da = m + 2

    def pair(which, i, s):
        return catalog.g_member_label(m, which, i, s)

    def mprime_node() -> MeasurementNode:
        ops = []
        children: dict = {}
        for i in range(1, m + 1):
            ops.append((f"w{i}", _block(da, [2], [i + 1], [None])))
            children[f"w{i}"] = Leaf("pair_readout", plus=pair("one", i, 1),
                                     minus=pair("one", i, -1))
        ops.append(("w0", _block(da, [2], [0, 1], [None])))
        children["w0"] = Leaf("pair_readout", plus=pair("top", None, 1),
                              minus=pair("top", None, -1))
        return MeasurementNode("A", ops, children)

    def bob_chain(i: int) -> MeasurementNode:
        k2 = _block(3, [2], [0], [[1]])
        k3 = _block(3, [2], [0, 1], [[0]])
        k1 = _ident([3, 2]) - k2 - k3
        nxt = bob_chain(i + 1) if i < m else mprime_node()
        return MeasurementNode(
            f"B{i}",
            [("k1", k1), ("k2", k2), ("k3", k3)],
            {
                "k1": nxt,
                "k2": Leaf("pair_readout", plus=pair("two", i, 1), minus=pair("two", i, -1)),
                "k3": Leaf("pair_readout", plus=pair("three", i, 1), minus=pair("three", i, -1)),
            },
        )

    tag = _block(da, [2], [0], [[0]]) + _block(da, [2], list(range(1, da)), [[1]])
    branch = bob_chain(1)
    flips = {"A": kron_all([Matrix.identity(da), _perm_matrix(2, [1, 0])])}
    for i in range(1, m + 1):
        flips[f"B{i}"] = kron_all([Matrix.identity(3), _perm_matrix(2, [1, 0])])
    root = MeasurementNode(
        "A",
        [("m0", tag), ("m1", _ident([da, 2]) - tag)],
        {"m0": branch, "m1": _conj_subtree(branch, flips)},
    )
    return ProtocolTree(f"prop3-m{m}", f"g{m + 1}", f"ghz{m + 1}", root)


def build_theorem1_protocol() -> ProtocolTree:
    """The three-party instance: GHZ-assisted discrimination of ``g3``."""
    t = build_prop3_protocol(2)
    return ProtocolTree("theorem1", "g3", "ghz3", t.root)


# ---------------------------------------------------------------------------
# Four-level GHZ protocol for the 42-state set
# ---------------------------------------------------------------------------


def _hsign(s: int, t: int) -> int:
    return -1 if bin(s & t).count("1") % 2 else 1


def _hadamard4_proj(s: int) -> Matrix:
    quarter = CScalar(QScalar(Fraction(1, 4)))
    m = Matrix.zero(4, 4)
    for t in range(4):
        for u in range(4):
            v = quarter
            if _hsign(s, t) * _hsign(s, u) < 0:
                v = -v
            m.data[t][u] = v
    return m


def _family_basis_node(actor: str, sys_dim: int, anc_dims: list[int],
                       levels: tuple[int, int, int, int],
                       declare) -> MeasurementNode:
    """Measure the actor's system factor in a four-state family basis.

    Used where the family sits on a product factor (no ancilla correlation);
    remaining system levels fall into a completion outcome that never clicks.
    """
    ops = []
    children: dict = {}
    half = CScalar(QScalar(Fraction(1, 2)))
    total = _ident([sys_dim] + anc_dims)
    acc = Matrix.zero(total.rows, total.cols)
    for ijk in QUAD_SIGNS:
        comps = []
        signs = (1, -1 if ijk[0] else 1, -1 if ijk[1] else 1, -1 if ijk[2] else 1)
        vec = [CScalar() for _ in range(sys_dim)]
        for lv, sg in zip(levels, signs):
            vec[lv] = half if sg > 0 else -half
        op = kron_all([projector(vec)] + [Matrix.identity(d) for d in anc_dims])
        name = f"f{ijk[0]}{ijk[1]}{ijk[2]}"
        ops.append((name, op))
        children[name] = Leaf("declare", label=declare(ijk))
        acc = acc + op
    ops.append(("rest", total - acc))
    children["rest"] = Leaf("reject")
    return MeasurementNode(actor, ops, children)


def _release_cascade(holder_sys_dim: int, sectors: list[tuple[int, int, str]],
                     declare) -> MeasurementNode:
    """Finish a phase-entangled four-state family exactly.

    ``sectors`` lists the holder's nonzero components as (system level, share
    level, sign source) with sign sources "1", "i", "j", "k".  Both assistants
    release their four-level shares in the real Hadamard basis; the holder then
    measures system-plus-share in the sign-corrected family basis and declares.
    """
    half = CScalar(QScalar(Fraction(1, 2)))

    def holder_node(s1: int, s2: int) -> MeasurementNode:
        ops = []
        children: dict = {}
        total = _ident([holder_sys_dim, 4])
        acc = Matrix.zero(total.rows, total.cols)
        for ijk in QUAD_SIGNS:
            sign_of = {"1": 1,
                       "i": -1 if ijk[0] else 1,
                       "j": -1 if ijk[1] else 1,
                       "k": -1 if ijk[2] else 1}
            comps = []
            for sys_lv, anc_lv, src in sectors:
                sg = sign_of[src] * _hsign(s1, anc_lv) * _hsign(s2, anc_lv)
                comps.append(((sys_lv, anc_lv), half if sg > 0 else -half))
            vec = _local_vec([holder_sys_dim, 4], comps)
            op = projector(vec)
            name = f"f{ijk[0]}{ijk[1]}{ijk[2]}"
            ops.append((name, op))
            children[name] = Leaf("declare", label=declare(ijk))
            acc = acc + op
        ops.append(("rest", total - acc))
        children["rest"] = Leaf("reject")
        return MeasurementNode("A", ops, children)

    def b2_node(s1: int) -> MeasurementNode:
        ops = [(f"h{s2}", kron_all([Matrix.identity(5), _hadamard4_proj(s2)]))
               for s2 in range(4)]
        children = {f"h{s2}": holder_node(s1, s2) for s2 in range(4)}
        return MeasurementNode("B2", ops, children)

    ops = [(f"h{s1}", kron_all([Matrix.identity(5), _hadamard4_proj(s1)]))
           for s1 in range(4)]
    children = {f"h{s1}": b2_node(s1) for s1 in range(4)}
    return MeasurementNode("B1", ops, children)


def build_prop5_protocol() -> ProtocolTree:
    """Four-level-GHZ-assisted discrimination of the 42-state set ``sigma``."""
    sq = catalog.sigma_quad_label
    sp = catalog.sigma_pair_label
    b2 = catalog.SIGMA_B2_LABELS.index

    def pair_leaf(idx):
        return Leaf("pair_readout", plus=sp(idx, 1), minus=sp(idx, -1))

    # sector tables for the three phase-entangled families (written branch)
    mu_sectors = [(0, 0, "1"), (1, 1, "i"), (2, 1, "j"), (3, 2, "k")]
    nu_sectors = [(1, 1, "1"), (2, 1, "i"), (3, 2, "j"), (4, 3, "k")]
    lam_sectors = [(1, 1, "1"), (2, 1, "i"), (4, 3, "j"), (5, 0, "k")]

    # Assistant-one elimination chain
    ka1 = _block(5, [4], [2, 3], [[2]])
    kb1 = _block(5, [4], [1, 2], [[1, 2]])
    kc1 = _block(5, [4], [4], [[0, 1, 2]])
    kd1 = _block(5, [4], [1, 2, 3, 4], [[1, 2, 3]])

    n11 = _block(5, [4], [b2("2"), b2("4")], [[3]])
    n12 = _block(5, [4], [b2("3")], [[3]])
    n13 = _block(5, [4], [b2("4")], [[1]])
    n21 = _block(5, [4], [b2("1"), b2("2"), b2("4"), b2("5")], [[2]])
    n22 = _block(5, [4], [b2("1"), b2("2"), b2("3"), b2("4")], [[0]])

    a_is_1 = _block(6, [4], [1], [None])
    a_24 = _block(6, [4], [2, 4], [None])
    a_0 = _block(6, [4], [0], [None])
    a_5 = _block(6, [4], [5], [None])

    split_67 = MeasurementNode(
        "A",
        [("a24", a_24), ("a1", a_is_1), ("rest", _ident([6, 4]) - a_24 - a_is_1)],
        {"a24": pair_leaf(6), "a1": pair_leaf(7), "rest": Leaf("reject")},
    )
    split_14 = MeasurementNode(
        "A",
        [("a1", a_is_1), ("rest", _ident([6, 4]) - a_is_1)],
        {"a1": pair_leaf(1), "rest": pair_leaf(4)},
    )
    split_8_12 = MeasurementNode(
        "A",
        [("a0", a_0), ("a5", a_5), ("rest", _ident([6, 4]) - a_0 - a_5)],
        {
            "a0": _family_basis_node("B1", 5, [4], (0, 1, 2, 3),
                                     lambda ijk: sq(8, ijk)),
            "a5": _family_basis_node("B2", 5, [4],
                                     (b2("1"), b2("2"), b2("3"), b2("4")),
                                     lambda ijk: sq(12, ijk)),
            "rest": Leaf("reject"),
        },
    )
    b2_3 = _block(5, [4], [b2("3")], [None])
    b2_5 = _block(5, [4], [b2("5")], [None])
    split_nu_lam = MeasurementNode(
        "B2",
        [("b3", b2_3), ("b5", b2_5), ("rest", _ident([5, 4]) - b2_3 - b2_5)],
        {
            "b3": _release_cascade(6, nu_sectors, lambda ijk: sq(11, ijk)),
            "b5": _release_cascade(6, lam_sectors, lambda ijk: sq(13, ijk)),
            "rest": Leaf("reject"),
        },
    )
    n2_node = MeasurementNode(
        "B2",
        [("n1", n21), ("n2", n22), ("n3", _ident([5, 4]) - n21 - n22)],
        {
            "n1": _family_basis_node("B2", 5, [4],
                                     (b2("1"), b2("2"), b2("4"), b2("5")),
                                     lambda ijk: sq(14, ijk)),
            "n2": split_8_12,
            "n3": split_nu_lam,
        },
    )
    n1_node = MeasurementNode(
        "B2",
        [("n1", n11), ("n2", n12), ("n3", n13),
         ("n4", _ident([5, 4]) - n11 - n12 - n13)],
        {
            "n1": pair_leaf(5),
            "n2": _family_basis_node("B1", 5, [4], (1, 2, 3, 4),
                                     lambda ijk: sq(10, ijk)),
            "n3": pair_leaf(2),
            "n4": split_67,
        },
    )
    kd_node = MeasurementNode(
        "B1",
        [("k1", kd1), ("k2", _ident([5, 4]) - kd1)],
        {"k1": n1_node, "k2": n2_node},
    )
    kc_node = MeasurementNode(
        "B1",
        [("k1", kc1), ("k2", _ident([5, 4]) - kc1)],
        {"k1": _release_cascade(6, mu_sectors, lambda ijk: sq(9, ijk)),
         "k2": kd_node},
    )
    kb_node = MeasurementNode(
        "B1",
        [("k1", kb1), ("k2", _ident([5, 4]) - kb1)],
        {"k1": split_14, "k2": kc_node},
    )
    branch = MeasurementNode(
        "B1",
        [("k1", ka1), ("k2", _ident([5, 4]) - ka1)],
        {"k1": pair_leaf(3), "k2": kb_node},
    )

    def tag_op(shift: int) -> Matrix:
        groups = [([0, 5], 0), ([1, 2], 1), ([3], 2), ([4], 3)]
        acc = Matrix.zero(24, 24)
        for levels, t in groups:
            acc = acc + _block(6, [4], levels, [[(t + shift) % 4]])
        return acc

    ops = [(f"m{s}", tag_op(s)) for s in range(4)]
    children: dict = {"m0": branch}
    for s in (1, 2, 3):
        perm = [(t + s) % 4 for t in range(4)]
        units = {
            "A": kron_all([Matrix.identity(6), _perm_matrix(4, perm)]),
            "B1": kron_all([Matrix.identity(5), _perm_matrix(4, perm)]),
            "B2": kron_all([Matrix.identity(5), _perm_matrix(4, perm)]),
        }
        children[f"m{s}"] = _conj_subtree(branch, units)
    root = MeasurementNode("A", ops, children)
    return ProtocolTree("prop5", "sigma", "ghz4level", root)


# ---------------------------------------------------------------------------
# Twist-breaking analysis (three EPR pairs on the triangle)
# ---------------------------------------------------------------------------


def build_twistbreak_L1() -> MeasurementNode:
    """The two-outcome tile-line node for assistant one.

    One outcome correlates share level 1 with system levels {1,2,3,4} and 0
    with level 0; the other outcome is its complement.  Built against the
    triangle resource, so the actor's local space is system x two qubit shares.
    """
    m = (_block(5, [2, 2], [1, 2, 3, 4], [[1], None])
         + _block(5, [2, 2], [0], [[0], None]))
    ident = _ident([5, 2, 2])
    return MeasurementNode(
        "B1",
        [("tb", m), ("tbc", ident - m)],
        {"tb": Leaf("reject"), "tbc": Leaf("reject")},
    )


def twistbreak_stall_report(tol: float | None = None) -> dict:
    """Apply the tile-line node to the 42-state set with the EPR triangle.

    For every member of the A-B1 restricted subset, report per outcome whether
    the residual's first-share tag is a single level (constant) or mixed, and
    whether the system part is left exactly in the original product state.
    The stall signature: the four inner +- pairs keep a constant tag under
    both outcomes with their system factors untouched, so that subset is the
    same domino pattern as before, now with one EPR pair consumed.
    """
    from .protocol import _Space, _apply, _factor_product, _sparse_cols
    from .model import joint_ket

    sset = catalog.build_sigma()
    resource = resources.epr_triangle()
    node = build_twistbreak_L1()
    joint = sset.layout.with_resource(resource.layout)
    space = _Space(joint)
    positions = tuple(joint.factor_positions("B1"))
    b1_pos = [i for i, f in enumerate(joint.factors) if f.name == "B1.anc0"][0]
    sys_total = 1
    for p in joint.party_names:
        sys_total *= joint.system_dims[p]
    anc_total = joint.total_dim // sys_total

    report: dict = {"members": {}, "inner_pair_core": [], "stalled": True}
    pair_core = [catalog.sigma_pair_label(i, s) for i in (1, 2, 3, 4) for s in (1, -1)]
    quad_layer = [catalog.sigma_quad_label(i, ijk) for i in (8, 9, 10, 11)
                  for ijk in QUAD_SIGNS]
    interesting = pair_core + quad_layer

    for label in interesting:
        member = sset.member(label)
        amps = joint_ket(member, resource).amps
        entry = {}
        for outcome, op in node.operators:
            res = _apply(space, positions, _sparse_cols(op, True), amps, True, 0.0)
            if not res:
                entry[outcome] = {"b1_tag": None, "system_untouched": None}
                continue
            tags = {space.layout.coords_of(i)[b1_pos] for i in res}
            factors = _factor_product(res, [sys_total, anc_total], [anc_total, 1])
            untouched = False
            if factors is not None:
                mamps = member.ket().amps
                sys_vec = {i: v for i, v in enumerate(factors[0]) if not v.is_zero()}
                ref_idx = min(sys_vec)
                if ref_idx in mamps:
                    scale = mamps[ref_idx] / sys_vec[ref_idx]
                    untouched = all(
                        i in mamps and mamps[i] == v * scale for i, v in sys_vec.items()
                    ) and len(sys_vec) == len(mamps)
            entry[outcome] = {
                "b1_tag": tags.pop() if len(tags) == 1 else "mixed",
                "system_untouched": untouched,
            }
        report["members"][label] = entry
        if label in pair_core:
            const = all(
                entry[o]["b1_tag"] != "mixed" and entry[o]["system_untouched"]
                for o in ("tb", "tbc")
            )
            report["inner_pair_core"].append({"label": label, "constant_tag": const})
            if not const:
                report["stalled"] = False
    return report


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


def build_protocol(name: str, m: int | None = None) -> ProtocolTree:
    if name == "theorem1":
        return build_theorem1_protocol()
    if name == "prop5":
        return build_prop5_protocol()
    if name == "prop3":
        if m is None:
            raise ValueError("prop3 requires --m")
        return build_prop3_protocol(m)
    if name.startswith("prop3-m") and name[7:].isdigit():
        return build_prop3_protocol(int(name[7:]))
    raise KeyError(f"unknown protocol {name!r}")


def protocol_names() -> list[str]:
    return ["theorem1", "prop3-m<k>", "prop5"]


def designated_context(tree: ProtocolTree) -> tuple[StateSet, Resource]:
    """Resolve a shipped protocol's set and designated resource references."""
    sset = catalog.build(tree.set_ref)
    resource = resources.build(tree.resource_ref)
    return sset, resource
