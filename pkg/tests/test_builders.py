"""Shipped protocol trees: structure, validity, and exact reproduction runs."""

from fractions import Fraction

import pytest

from qlsd import builders, catalog, resources
from qlsd.catalog import QUAD_SIGNS
from qlsd.linalg import Matrix
from qlsd.protocol import Leaf, run_exhaustive, validate
from qlsd.scalars import QScalar


@pytest.fixture(scope="module")
def prop5_tree():
    return builders.build_prop5_protocol()


@pytest.fixture(scope="module")
def prop5_run(prop5_tree):
    sset = catalog.build("sigma")
    res = resources.build("ghz4level")
    return run_exhaustive(prop5_tree, sset, res)


def test_theorem1_root_has_two_outcomes():
    tree = builders.build_theorem1_protocol()
    assert len(tree.root.operators) == 2
    assert tree.set_ref == "g3" and tree.resource_ref == "ghz3"


def test_prop5_root_has_four_outcomes():
    tree = builders.build_prop5_protocol()
    assert len(tree.root.operators) == 4


def test_every_node_resolves_a_complete_measurement(prop5_tree):
    # validation checks sum M^dag M = identity exactly at every node
    for tree, set_name, res_name in [
        (builders.build_theorem1_protocol(), "g3", "ghz3"),
        (builders.build_prop3_protocol(1), "g2", "ghz2"),
        (builders.build_prop3_protocol(3), "g4", "ghz4"),
        (prop5_tree, "sigma", "ghz4level"),
    ]:
        report = validate(tree, catalog.build(set_name), resources.build(res_name))
        assert report.ok, (tree.name, [i.to_json() for i in report.issues])


@pytest.mark.parametrize("m", [1, 2, 3])
def test_prop3_reproduces_certainty(m):
    tree = builders.build_prop3_protocol(m)
    run = run_exhaustive(tree, catalog.build(f"g{m+1}"), resources.build(f"ghz{m+1}"))
    assert run.success == QScalar(1)
    assert run.audit_passed


def test_prop5_reproduces_certainty_with_audit(prop5_run):
    assert prop5_run.success == QScalar(1)
    assert prop5_run.audit_passed
    # all four generated branches carry probability mass
    roots = {rec[0][0] for state in prop5_run.per_state.values()
             for rec in state["branches"]}
    assert roots == {"m0", "m1", "m2", "m3"}


def test_prop5_every_member_fully_classified(prop5_run):
    for label, rec in prop5_run.per_state.items():
        assert rec["correct"] == QScalar(1), label


def test_generated_branches_are_conjugates_not_copies(prop5_tree):
    tree = prop5_tree
    m0 = tree.root.children["m0"]
    m1 = tree.root.children["m1"]
    assert m0.operators[0][1] != m1.operators[0][1]
    assert m0.operators[0][0] == m1.operators[0][0]


def test_release_cascade_structure(prop5_tree):
    # the phase-entangled family finisher: share release by both assistants,
    # then a sign-corrected family basis with a declare leaf per member
    node = prop5_tree.root.children["m0"]
    # walk to the first cascade (outcome k2/k2/k1 from the chain)
    node = node.children["k2"].children["k2"].children["k1"]
    assert node.actor == "B1" and len(node.operators) == 4
    b2 = node.children["h0"]
    assert b2.actor == "B2" and len(b2.operators) == 4
    alice = b2.children["h0"]
    assert alice.actor == "A" and len(alice.operators) == 5
    declares = [c for c in alice.children.values() if isinstance(c, Leaf)
                and c.kind == "declare"]
    assert len(declares) == 4
    labels = {c.label for c in declares}
    assert labels == {catalog.sigma_quad_label(9, ijk) for ijk in QUAD_SIGNS}


def test_plain_family_basis_insufficient_for_entangled_quads():
    """Replacing a release cascade by the holder's bare family-basis node breaks
    the audit and certainty: the cascade is load-bearing, not decorative."""
    tree = builders.build_prop5_protocol()
    node = tree.root.children["m0"].children["k2"].children["k2"]
    bare = builders._family_basis_node(
        "A", 6, [4], (0, 1, 2, 3), lambda ijk: catalog.sigma_quad_label(9, ijk))
    node.children["k1"] = bare
    run = run_exhaustive(tree, catalog.build("sigma"), resources.build("ghz4level"))
    assert run.success < QScalar(1)
    assert not run.audit_passed


def test_twistbreak_node_is_a_complete_measurement():
    node = builders.build_twistbreak_L1()
    dim = 5 * 2 * 2
    acc = Matrix.zero(dim, dim)
    for _, m in node.operators:
        assert m.is_projector()
        acc = acc + m.dagger() @ m
    assert acc == Matrix.identity(dim)


def test_twistbreak_stall_report():
    rep = builders.twistbreak_stall_report()
    assert rep["stalled"] is True
    core = {e["label"]: e["constant_tag"] for e in rep["inner_pair_core"]}
    assert len(core) == 8 and all(core.values())
    # the quad tile crossed by the line is twist-broken; its three neighbors
    # keep a constant share tag
    m = rep["members"]
    for ijk in QUAD_SIGNS:
        broken = m[catalog.sigma_quad_label(8, ijk)]
        assert broken["tb"]["b1_tag"] == "mixed"
        for idx in (9, 10, 11):
            entry = m[catalog.sigma_quad_label(idx, ijk)]
            assert entry["tb"]["b1_tag"] != "mixed"
            assert entry["tb"]["system_untouched"]


def test_protocol_registry():
    assert builders.build_protocol("theorem1").name == "theorem1"
    assert builders.build_protocol("prop3", m=2).name == "prop3-m2"
    assert builders.build_protocol("prop3-m4").name == "prop3-m4"
    with pytest.raises(KeyError):
        builders.build_protocol("nope")
    with pytest.raises(ValueError):
        builders.build_protocol("prop3")
