"""States, layouts, marginals, Schmidt ranks, and relabeling checks."""

from fractions import Fraction

import pytest

from qlsd import catalog, resources
from qlsd.linalg import Matrix
from qlsd.model import (
    Ket,
    PartyLayout,
    ProductState,
    Resource,
    StateSet,
    inner,
    joint_ket,
    lu_relabel_check,
    psd_check,
    schmidt_rank,
    single_party_marginal,
    tensor,
)
from qlsd.scalars import CScalar, QScalar, cs

INV_SQRT2 = Fraction(1, 2)  # the sqrt2-part of 1/sqrt2


def ket1(dim, amps):
    layout = PartyLayout([("A", dim)])
    return Ket(layout, {i: v for i, v in amps.items()})


def test_tensor_of_single_party_kets():
    zero = ket1(2, {0: cs(1)})
    eta_plus = ket1(2, {0: cs(0, INV_SQRT2), 1: cs(0, INV_SQRT2)})
    t = tensor([zero, eta_plus])
    assert t.amps == {0: cs(0, INV_SQRT2), 1: cs(0, INV_SQRT2)}
    assert t.layout.total_dim == 4


def test_tensor_renames_colliding_parties():
    a = ket1(2, {0: cs(1)})
    t = tensor([a, a])
    assert len(t.layout.party_names) == 2
    assert len(set(t.layout.party_names)) == 2


def test_tensor_of_three_epr_pairs_has_eight_uniform_amplitudes():
    phi3 = resources.build("epr-triangle")
    assert len(phi3.ket.amps) == 8
    assert all(v == cs(0, Fraction(1, 4)) for v in phi3.ket.amps.values())
    assert phi3.ket.norm2() == QScalar(1)


def test_two_ghz_copies_equal_four_level_ghz_after_pair_grouping():
    psi3 = resources.build("ghz3x2")
    g4 = resources.build("ghz4level")
    ident = {p: list(range(4)) for p in ("P1", "P2", "P3")}
    assert lu_relabel_check(psi3.ket, g4.ket, ident)


def test_lu_relabel_rejects_distinct_states_and_bad_perms():
    psi3 = resources.build("ghz3x2")
    phi3 = resources.build("epr-triangle")
    ident = {p: list(range(4)) for p in ("P1", "P2", "P3")}
    assert not lu_relabel_check(psi3.ket, phi3.ket, ident)
    with pytest.raises(ValueError):
        lu_relabel_check(psi3.ket, phi3.ket, {p: [0, 0, 1, 2] for p in ("P1", "P2", "P3")})


def test_inner_products():
    g3 = resources.build("ghz3").ket
    assert inner(g3, g3) == cs(1)
    sben = catalog.build("sben")
    k1 = sben.member("0|eta+").ket()
    k2 = sben.member("0|eta-").ket()
    assert inner(k1, k2).is_zero()
    zeta_p = catalog.build("g3").member("eps+|1|2").ket()
    zeta_q = catalog.build("g3").member("1|gam1+|2").ket()
    assert inner(zeta_p, zeta_q).is_zero()


def test_inner_layout_mismatch_raises():
    a = ket1(2, {0: cs(1)})
    b = ket1(3, {0: cs(1)})
    with pytest.raises(ValueError):
        inner(a, b)


def test_marginal_of_epr_is_maximally_mixed():
    epr = resources.build("epr")
    rho = single_party_marginal(epr.ket, "P1")
    assert rho == Matrix.identity(2).scale(cs(Fraction(1, 2)))


def test_marginals_of_both_triple_resources_are_i4_over_4():
    quarter = Matrix.identity(4).scale(cs(Fraction(1, 4)))
    for name in ("ghz3x2", "epr-triangle"):
        ket = resources.build(name).ket
        for party in ("P1", "P2", "P3"):
            rho = single_party_marginal(ket, party)
            assert rho == quarter
            assert rho.trace() == cs(1)
            assert psd_check(rho)


def test_marginal_unknown_party_raises():
    with pytest.raises(ValueError):
        single_party_marginal(resources.build("epr").ket, "Z")


def test_schmidt_ranks():
    assert schmidt_rank(resources.build("epr").ket, ["P1"]) == 2
    assert schmidt_rank(resources.build("ghz3").ket, ["P1"]) == 2
    assert schmidt_rank(resources.build("ghz3x2").ket, ["P1"]) == 4
    assert schmidt_rank(resources.build("epr-triangle").ket, ["P1"]) == 4


def test_schmidt_rank_invariant_under_relabeling():
    psi3 = resources.build("ghz3x2")
    perm = [2, 0, 3, 1]
    amps = {}
    layout = psi3.ket.layout
    for idx, v in psi3.ket.amps.items():
        coords = list(layout.coords_of(idx))
        # apply the same local permutation on P1's flattened share
        loc = coords[0] * 2 + coords[1]
        loc = perm[loc]
        coords[0], coords[1] = loc // 2, loc % 2
        amps[layout.index_of(coords)] = v
    permuted = Ket(layout, amps)
    assert schmidt_rank(permuted, ["P1"]) == schmidt_rank(psi3.ket, ["P1"])


def test_schmidt_rank_needs_proper_cut():
    with pytest.raises(ValueError):
        schmidt_rank(resources.build("ghz3").ket, ["P1", "P2", "P3"])


def test_product_state_flattening_matches_tensor_of_locals():
    for name in ("sben", "g3", "sigma", "h", "sg5"):
        sset = catalog.build(name)
        for m in sset.members[:6]:
            k = m.ket()
            singles = []
            for p, vec in zip(sset.layout.party_names, m.locals):
                dim = sset.layout.system_dims[p]
                singles.append(ket1(dim, {i: v for i, v in enumerate(vec)
                                          if not v.is_zero()}))
            flat = tensor(singles)
            assert flat.amps == k.amps


def test_state_set_rejects_nonorthogonal_members():
    layout = PartyLayout([("A", 2)])
    a = ProductState(layout, [[cs(1), cs(0)]], "x")
    b = ProductState(layout, [[cs(0, INV_SQRT2), cs(0, INV_SQRT2)]], "y")
    with pytest.raises(ValueError):
        StateSet(layout, [a, b], "bad")


def test_set_json_round_trip():
    for name in ("sben", "sigma"):
        sset = catalog.build(name)
        back = StateSet.from_json(sset.to_json())
        assert back.labels == sset.labels
        for m1, m2 in zip(sset.members, back.members):
            assert m1.locals == m2.locals


def test_resource_json_round_trip():
    for name in ("epr", "ghz3", "ghz3x2", "epr-triangle", "ghz4level"):
        r = resources.build(name)
        back = Resource.from_json(r.to_json())
        assert back.ket.amps == r.ket.amps
        assert back.layout == r.layout


def test_float_ket_flagged_and_normalized_check():
    import math

    w3 = resources.build("w3")
    assert not w3.ket.exact
    assert abs(w3.ket.norm2() - 1.0) < 1e-12
    assert math.isclose(abs(inner(w3.ket, w3.ket)), 1.0)


def test_joint_ket_orders_systems_before_ancillas():
    sben = catalog.build("sben")
    epr = resources.build("epr")
    k = joint_ket(sben.member("0|eta+"), epr)
    # joint index = system index * 4 + ancilla index
    dims = k.layout.factor_dims
    assert dims == [3, 3, 2, 2]
    assert [f.kind for f in k.layout.factors] == ["system", "system", "ancilla", "ancilla"]
    assert k.norm2() == QScalar(1)
