"""Independent brute-force oracles used to cross-check the main implementations.

The orthogonality-preserving-measurement oracle rebuilds the constraint system
from full member kets (dense reshape and matrix products, not the per-party
factor contraction the package uses) and row-reduces it naively:

* dense fraction-free Gaussian elimination over Z[sqrt2] for systems up to a
  few hundred real unknowns;
* for the largest groupings, dense elimination modulo two primes with an exact
  certificate: the modular rank can only undershoot the true rank, and the
  candidate basis is checked exactly against every constraint row, so when
  rank_p + candidate_dimension equals the unknown count the dimension is
  pinned exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

# primes with 2 a quadratic residue (p = 7 mod 8) and p = 3 mod 4 for easy sqrt
_PRIMES = (2147483647, 2147483423)


def _sqrt2_mod(p: int) -> int:
    s = pow(2, (p + 1) // 4, p)
    assert (s * s) % p == 2
    return s


def member_full_amps(member):
    """Dense joint amplitudes of one product state as a coordinate dict."""
    layout = member.layout
    dims = [layout.system_dims[p] for p in layout.party_names]
    amps = {}

    def rec(pos, coords, val):
        if pos == len(dims):
            amps[tuple(coords)] = val
            return
        for x, v in enumerate(member.locals[pos]):
            if not v.is_zero():
                rec(pos + 1, coords + [x], val * v)

    from qlsd.scalars import CScalar, QScalar

    rec(0, [], CScalar(QScalar(1)))
    return amps


def oplm_rows(sset, acting: list[str]):
    """Constraint rows over the d^2 real Hermitian parameters, built densely."""
    from qlsd.scalars import CScalar, QScalar

    layout = sset.layout
    names = layout.party_names
    acting = [p for p in names if p in acting]
    rest = [p for p in names if p not in acting]
    apos = [names.index(p) for p in acting]
    rpos = [names.index(p) for p in rest]
    adims = [layout.system_dims[p] for p in acting]
    rdims = [layout.system_dims[p] for p in rest]
    D = math.prod(adims)
    R = math.prod(rdims)

    mats = []
    for m in sset.members:
        full = member_full_amps(m)
        M = [[CScalar() for _ in range(R)] for _ in range(D)]
        for coords, v in full.items():
            g = 0
            for p, d in zip(apos, adims):
                g = g * d + coords[p]
            r = 0
            for p, d in zip(rpos, rdims):
                r = r * d + coords[p]
            M[g][r] = v
        mats.append(M)

    off = {}
    nparams = D
    for k in range(D):
        for l in range(k + 1, D):
            off[(k, l)] = nparams
            nparams += 2

    zero = QScalar(0)
    rows = []
    n = len(sset.members)
    for i in range(n):
        for j in range(i + 1, n):
            # C[g][g'] = sum_r conj(M_i[g][r]) * M_j[g'][r]
            C = [[CScalar() for _ in range(D)] for _ in range(D)]
            nonzero = False
            for g in range(D):
                for gp in range(D):
                    acc = CScalar()
                    for r in range(R):
                        a = mats[i][g][r]
                        if a.is_zero():
                            continue
                        b = mats[j][gp][r]
                        if not b.is_zero():
                            acc = acc + a.conj() * b
                    C[g][gp] = acc
                    if not acc.is_zero():
                        nonzero = True
            if not nonzero:
                continue
            re_row = [zero] * nparams
            im_row = [zero] * nparams
            for k in range(D):
                c = C[k][k]
                re_row[k] = re_row[k] + c.re
                im_row[k] = im_row[k] + c.im
            for (k, l), p in off.items():
                s = C[k][l] + C[l][k]
                d = C[k][l] - C[l][k]
                re_row[p] = re_row[p] + s.re
                im_row[p] = im_row[p] + s.im
                # coefficient of the imaginary parameter is i*(C_kl - C_lk)
                re_row[p + 1] = re_row[p + 1] - d.im
                im_row[p + 1] = im_row[p + 1] + d.re
            if any(not v.is_zero() for v in re_row):
                rows.append(re_row)
            if any(not v.is_zero() for v in im_row):
                rows.append(im_row)
    return rows, nparams


def _int_rows(rows):
    out = []
    for row in rows:
        den = 1
        for v in row:
            d = v.a.denominator * v.b.denominator
            den = den * d // math.gcd(den, d)
        pairs = [(int(v.a * den), int(v.b * den)) for v in row]
        g = 0
        for na, nb in pairs:
            g = math.gcd(g, math.gcd(abs(na), abs(nb)))
        if g > 1:
            pairs = [(na // g, nb // g) for na, nb in pairs]
        out.append(pairs)
    return out


def dense_nullity(rows, nparams: int) -> int:
    """Naive dense fraction-free elimination over Z[sqrt2]; returns the nullity."""
    work = [list(r) for r in _int_rows(rows)]
    rank = 0
    for col in range(nparams):
        piv = None
        for i in range(rank, len(work)):
            if work[i][col] != (0, 0):
                piv = i
                break
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        pl = work[rank][col]
        for i in range(rank + 1, len(work)):
            rl = work[i][col]
            if rl == (0, 0):
                continue
            row = work[i]
            prow = work[rank]
            new = []
            for (r0, r1), (p0, p1) in zip(row, prow):
                new.append((
                    pl[0] * r0 + 2 * pl[1] * r1 - (rl[0] * p0 + 2 * rl[1] * p1),
                    pl[0] * r1 + pl[1] * r0 - (rl[0] * p1 + rl[1] * p0),
                ))
            g = 0
            for na, nb in new:
                g = math.gcd(g, math.gcd(abs(na), abs(nb)))
                if g == 1:
                    break
            if g > 1:
                new = [(na // g, nb // g) for na, nb in new]
            work[i] = new
        rank += 1
        work = [r for r in work if any(v != (0, 0) for v in r)]
        if rank >= len(work):
            break
    return nparams - rank


def _rank_mod_p(mat: np.ndarray, p: int) -> int:
    mat = mat % p
    rows, cols = mat.shape
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if mat[i, c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            mat[[r, piv]] = mat[[piv, r]]
        inv = pow(int(mat[r, c]), p - 2, p)
        mat[r] = (mat[r] * inv) % p
        if r + 1 < rows:
            col = mat[r + 1:, c].copy()
            if col.any():
                mat[r + 1:] = (mat[r + 1:] - np.outer(col, mat[r])) % p
        r += 1
        if r == rows:
            break
    return r


def modp_certified_nullity(rows, nparams: int, candidate_basis) -> int | None:
    """Exact nullity via modular rank plus exact verification of a candidate basis.

    The modular rank never exceeds the true rank, and a verified basis bounds
    the nullity from below; equality pins the dimension exactly.  Returns None
    if the certificate fails for both primes.
    """
    int_rows = _int_rows(rows)
    sparse_rows = [
        [(j, na, nb) for j, (na, nb) in enumerate(row) if na or nb]
        for row in int_rows
    ]
    # exact check: every candidate vector annihilates every row
    for vec in candidate_basis:
        support = {j for j, v in enumerate(vec) if not v.is_zero()}
        for row in sparse_rows:
            sa = Fraction(0)
            sb = Fraction(0)
            for j, na, nb in row:
                if j in support:
                    v = vec[j]
                    sa += na * v.a + 2 * nb * v.b
                    sb += na * v.b + nb * v.a
            if sa or sb:
                return None
    want_rank = nparams - len(candidate_basis)
    for p in _PRIMES:
        s = _sqrt2_mod(p)
        mat = np.zeros((len(int_rows), nparams), dtype=np.int64)
        for i, row in enumerate(sparse_rows):
            for j, na, nb in row:
                mat[i, j] = (na + nb * s) % p
        if _rank_mod_p(mat, p) == want_rank:
            return len(candidate_basis)
    return None


def oracle_oplm_dimension(sset, acting: list[str], candidate_basis=None) -> int:
    """Independent dimension of the orthogonality-preserving operator space."""
    rows, nparams = oplm_rows(sset, acting)
    if nparams <= 300:
        return dense_nullity(rows, nparams)
    if candidate_basis is None:
        raise ValueError("large cuts need a candidate basis for the certificate")
    out = modp_certified_nullity(rows, nparams, candidate_basis)
    if out is None:
        raise AssertionError("modular certificate failed; dimensions disagree")
    return out
