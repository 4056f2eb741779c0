"""Catalog constructors: cardinalities, orthogonality, structure, combinators."""

from fractions import Fraction

import pytest

from qlsd import catalog
from qlsd.catalog import (
    QUAD_SIGNS,
    append_fixed_local,
    basis_vec,
    build_g3,
    build_g_general,
    build_h,
    build_h_prime,
    build_s_ben,
    build_sg5,
    build_sigma,
    pair_vec,
    project_out_fixed,
    restrict,
    singleton_set,
    union_orthogonal,
)
from qlsd.linalg import rank_complex
from qlsd.model import PartyLayout, ProductState
from qlsd.scalars import cs


def exhaustive_orthogonality(sset):
    for i in range(len(sset)):
        for j in range(i + 1, len(sset)):
            assert sset.members[i].inner(sset.members[j]).is_zero(), (
                sset.members[i].label, sset.members[j].label)


@pytest.mark.parametrize("name,size", [
    ("sben", 8), ("g3", 14), ("sg5", 24), ("sigma", 42), ("h", 27),
])
def test_cardinalities_and_orthogonality(name, size):
    sset = catalog.build(name)
    assert len(sset) == size
    exhaustive_orthogonality(sset)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
def test_general_family_size(m):
    sset = build_g_general(m)
    assert len(sset) == 6 * m + 2
    exhaustive_orthogonality(sset)


def test_g3_equals_general_family_m2_member_for_member():
    a, b = build_g3(), build_g_general(2)
    assert a.labels == b.labels
    for x, y in zip(a.members, b.members):
        assert x.locals == y.locals


def test_m1_matches_the_domino_pattern():
    g2 = build_g_general(1)
    assert len(g2) == 8
    assert g2.layout.system_dims == {"A": 3, "B1": 3}
    sben = build_s_ben()
    # relabel p,q,1 -> 0,1,2: the two sets coincide as amplitude tables
    table_g2 = sorted(tuple(tuple(v.to_json() for v in vec) for vec in m.locals)
                      for m in g2.members)
    table_sb = sorted(tuple(tuple(v.to_json() for v in vec) for vec in m.locals)
                      for m in sben.members)
    assert table_g2 == table_sb


def test_g3_first_block_has_third_party_fixed():
    g3 = build_g3()
    block = [m for m in g3.members if "2," not in m.label and m.label.endswith("|2")]
    # the seven-label first family: top pair and the three first-assistant dominoes
    labels = [catalog.g_member_label(2, "top", None, s) for s in (1, -1)]
    for which in ("one", "two", "three"):
        labels += [catalog.g_member_label(2, which, 1, s) for s in (1, -1)]
    fixed = basis_vec(3, 2)
    for lab in labels:
        m = g3.member(lab)
        assert m.locals[2] == fixed  # last party carries its fixed tag


def test_sigma_tags_follow_the_layered_tiling():
    sigma = build_sigma()
    b2_labels = sigma.layout.labels["B2"]
    for idx in (1, 2, 3, 4):
        for s in (1, -1):
            m = sigma.member(catalog.sigma_pair_label(idx, s))
            level = max(i for i, v in enumerate(m.locals[2]) if not v.is_zero())
            assert b2_labels[level] == "4"
    for idx in (8, 9, 10, 11):
        for ijk in QUAD_SIGNS:
            m = sigma.member(catalog.sigma_quad_label(idx, ijk))
            level = max(i for i, v in enumerate(m.locals[2]) if not v.is_zero())
            assert b2_labels[level] == "3"


def test_sigma_counts_by_family():
    sigma = build_sigma()
    pairs = [l for l in sigma.labels if "S" not in l]
    quads = [l for l in sigma.labels if "S" in l]
    assert len(pairs) == 14 and len(quads) == 28


def test_sg5_quad_families_have_four_members():
    sg5 = build_sg5()
    for family in ("Sabcd", "Sabce"):
        for side in (0, 1):
            members = [l for l in sg5.labels
                       if l.split("|")[side].startswith(family)]
            assert len(members) == 4


def test_h_spans_everything_but_g3_does_not():
    h = build_h()
    rows = [[m.ket().amps.get(i, cs(0)) for i in range(27)] for m in h.members]
    assert rank_complex(rows, 27) == 27
    g3 = build_g3()
    dim = g3.layout.total_dim
    rows = [[m.ket().amps.get(i, cs(0)) for i in range(dim)] for m in g3.members]
    assert rank_complex(rows, dim) == 14 < dim


def test_h_prime_subset():
    hp = build_h_prime()
    assert len(hp) == 8
    assert set(hp.labels) == set(catalog.H_PRIME_LABELS)
    exhaustive_orthogonality(hp)


def test_constructors_are_deterministic():
    for name in ("sben", "g3", "sigma", "h", "sg5"):
        a, b = catalog.build(name), catalog.build(name)
        assert a.labels == b.labels
        assert a.to_json() == b.to_json()


def test_union_with_center_state_keeps_orthogonality():
    sben = build_s_ben()
    center = singleton_set(sben.layout, [basis_vec(3, 1), basis_vec(3, 1)], "1|1")
    bigger = union_orthogonal(sben, center)
    assert len(bigger) == 9
    exhaustive_orthogonality(bigger)


def test_union_with_itself_fails_naming_the_pair():
    sben = build_s_ben()
    with pytest.raises(ValueError, match="0\\|eta\\+"):
        union_orthogonal(sben, restrict(sben, sben.labels, "copy"))


def test_union_with_empty_set_is_identity():
    g3 = build_g3()
    from qlsd.model import StateSet

    empty = StateSet(g3.layout, [], "empty")
    out = union_orthogonal(g3, empty)
    assert out.labels == g3.labels


def test_append_fixed_local_and_project_back():
    sben = build_s_ben()
    fixed_layout = PartyLayout([("C", 2)])
    fixed = ProductState(fixed_layout, [[cs(1), cs(0)]], "phi0")
    bigger = append_fixed_local(sben, fixed, {"C": "A"})
    assert len(bigger) == 8
    assert bigger.layout.party_names == ["A", "B", "C"]
    assert "held by A" in (bigger.provenance or "")
    exhaustive_orthogonality(bigger)
    back = project_out_fixed(bigger, fixed, "sben")
    assert back.labels == sben.labels
    for x, y in zip(back.members, sben.members):
        assert x.locals == y.locals


def test_append_fixed_local_unknown_placement():
    sben = build_s_ben()
    fixed = ProductState(PartyLayout([("C", 2)]), [[cs(1), cs(0)]], "phi0")
    with pytest.raises(ValueError):
        append_fixed_local(sben, fixed, {"C": "Z"})


def test_restricted_family_is_a_tagged_domino_block():
    # within the m=3 family, the block of assistant 2 is the domino pattern
    # between the first party and that assistant, others carrying fixed tags
    m = 3
    g4 = build_g_general(m)
    labels = [catalog.g_member_label(m, "top", None, s) for s in (1, -1)]
    for which in ("one", "two", "three"):
        labels += [catalog.g_member_label(m, which, 2, s) for s in (1, -1)]
    block = restrict(g4, labels, "block2")
    for member in block.members:
        for j in (1, 3):  # assistants 1 and 3 hold their fixed tags
            assert member.locals[j] == basis_vec(3, 2)
    # and the (A, B2) restriction is pairwise orthogonal by itself
    for i in range(len(block)):
        for j in range(i + 1, len(block)):
            a, b = block.members[i], block.members[j]
            ip = cs(1)
            for pos in (0, 2):
                f = cs(0)
                for x, y in zip(a.locals[pos], b.locals[pos]):
                    f = f + x.conj() * y
                ip = ip * f
            assert ip.is_zero()


def test_build_by_name_errors():
    with pytest.raises(KeyError):
        catalog.build("nope")
    with pytest.raises(ValueError):
        catalog.build("g", m=None)
    with pytest.raises(ValueError):
        build_g_general(0)
