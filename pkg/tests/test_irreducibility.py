"""Orthogonality-preserving-measurement checker vs the brute-force oracle."""

import pytest

from qlsd import catalog
from qlsd.catalog import basis_vec
from qlsd.irreducibility import Cut, cut_groups, gnps_evidence, oplm_space
from qlsd.linalg import Matrix
from qlsd.model import PartyLayout, ProductState, StateSet
from qlsd.scalars import QScalar

from oracles import oracle_oplm_dimension


def product_basis_22():
    layout = PartyLayout([("A", 2), ("B", 2)])
    members = [
        ProductState(layout, [basis_vec(2, i), basis_vec(2, j)], f"{i}{j}")
        for i in range(2) for j in range(2)
    ]
    return StateSet(layout, members, "pb22")


def test_distinguishable_basis_is_nontrivial_with_witness():
    pb = product_basis_22()
    for party in ("A", "B"):
        e = oplm_space(pb, [party])
        assert e.verdict == "nontrivial"
        assert e.dimension == 2  # all diagonal operators preserve orthogonality
        assert e.witness is not None
        assert e.witness.is_hermitian()
        # the witness is not proportional to the identity
        w = e.witness
        assert any(w.data[i][i] != w.data[0][0] for i in range(w.rows)) or any(
            not w.data[i][j].is_zero() for i in range(w.rows)
            for j in range(w.cols) if i != j
        )


def test_every_basis_element_is_hermitian_and_solves_constraints():
    sben = catalog.build("sben")
    e = oplm_space(sben, ["A"])
    for op in e.basis:
        assert op.is_hermitian()
        for i, mi in enumerate(sben.members):
            for j, mj in enumerate(sben.members):
                if i == j:
                    continue
                # <psi_i| (E x I) |psi_j> = <a_i|E|a_j> <b_i|b_j>
                bi = mi.locals[1]
                bj = mj.locals[1]
                rest = sum((x.conj() * y for x, y in zip(bi, bj)),
                           start=op.data[0][0] - op.data[0][0])
                left = mi.locals[0]
                right = mj.locals[0]
                acc = rest - rest
                for k in range(3):
                    for l in range(3):
                        acc = acc + left[k].conj() * op.data[k][l] * right[l]
                assert (acc * rest).is_zero()


@pytest.mark.parametrize("party", ["A", "B"])
def test_sben_matches_oracle(party):
    sben = catalog.build("sben")
    e = oplm_space(sben, [party])
    assert e.dimension == oracle_oplm_dimension(sben, [party])


def test_g3_all_cuts_match_oracle():
    g3 = catalog.build("g3")
    for group in cut_groups(g3, "all"):
        e = oplm_space(g3, group)
        assert e.dimension == oracle_oplm_dimension(g3, group), group


def test_sigma_singles_match_oracle():
    sigma = catalog.build("sigma")
    for group in (["A"], ["B1"], ["B2"]):
        e = oplm_space(sigma, group)
        assert e.verdict == "trivial"
        assert e.dimension == oracle_oplm_dimension(sigma, group) == 1


@pytest.mark.slow
def test_sigma_pair_groupings_match_certified_oracle():
    sigma = catalog.build("sigma")
    for group in (["B1", "B2"], ["A", "B1"], ["A", "B2"]):
        e = oplm_space(sigma, group)
        params = e.basis[0]
        vecs = [_matrix_to_params(b) for b in e.basis]
        assert e.dimension == oracle_oplm_dimension(sigma, group, vecs), group


def _matrix_to_params(m: Matrix):
    dim = m.rows
    out = [m.data[k][k].re for k in range(dim)]
    for k in range(dim):
        for l in range(k + 1, dim):
            out.append(m.data[k][l].re)
            out.append(m.data[k][l].im)
    return out


def test_h_trivial_at_every_cut():
    h = catalog.build("h")
    rep = gnps_evidence(h, "all")
    assert rep.all_trivial()
    assert all(e.dimension == 1 for e in rep.entries)


def test_dimension_invariant_under_member_permutation_and_relabeling():
    sben = catalog.build("sben")
    base = oplm_space(sben, ["A"]).dimension
    shuffled = StateSet(sben.layout, list(reversed(sben.members)), "sben-rev")
    assert oplm_space(shuffled, ["A"]).dimension == base
    # relabel both parties' bases by the cycle 0->1->2->0
    perm = [1, 2, 0]
    members = []
    for m in sben.members:
        locs = []
        for vec in m.locals:
            new = [vec[0] - vec[0]] * 3
            for i, v in enumerate(vec):
                new[perm[i]] = v
            locs.append(new)
        members.append(ProductState(sben.layout, locs, m.label))
    relabeled = StateSet(sben.layout, members, "sben-perm")
    assert oplm_space(relabeled, ["A"]).dimension == base


def test_cut_validation():
    g3 = catalog.build("g3")
    with pytest.raises(ValueError):
        Cut.of(g3, ["A", "B1", "B2"])
    with pytest.raises(ValueError):
        Cut.of(g3, ["Z"])
    with pytest.raises(ValueError):
        Cut.of(g3, [])


def test_report_json_shape():
    g3 = catalog.build("g3")
    rep = gnps_evidence(g3, "leave-one-out")
    obj = rep.to_json()
    assert obj["set"] == "g3"
    assert "evidence" in obj["note"]
    assert len(obj["cuts"]) == 6
    singles = [c for c in obj["cuts"] if c["cut"].split("|")[0].count(",") == 0]
    assert all(c["dimension"] == 1 and c["verdict"] == "trivial" for c in singles)
