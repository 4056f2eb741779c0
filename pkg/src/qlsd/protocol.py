"""Measurement-tree representation and exhaustive execution of assisted
local-discrimination protocols.

A protocol is data: a rooted tree of local measurements whose outcome branches
model broadcast classical communication, with leaves that either declare a
member, run a two-state sign readout, or reject.  The engine validates trees,
executes every input state down every nonzero branch, audits that surviving
candidates stay mutually orthogonal at every node, and accumulates exact
success probabilities.

Two-state readout leaves are compiled against the protocol's *designated*
resource: the residual pair must have the branch-product form
(|X0> +- |X1>)/sqrt2 with X0, X1 fully product and factorwise identical or
orthogonal.  The compiled per-factor sign measurements are then fixed, so
re-running the same protocol with a degraded resource measures exactly what
the designed protocol would measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct

from .linalg import Matrix, projector
from .model import (
    Ket,
    PartyLayout,
    Resource,
    StateSet,
    TOLERANCE_DEFAULT,
    joint_ket,
)
from .scalars import CScalar, C_ZERO, QScalar, Q_ZERO


class ProtocolError(Exception):
    def __init__(self, message: str, path: tuple[str, ...] = ()):
        self.path = path
        super().__init__(f"{message} (at node path {'/'.join(path) or '<root>'})")


@dataclass
class Leaf:
    kind: str  # "declare" | "pair_readout" | "reject"
    label: str | None = None
    plus: str | None = None
    minus: str | None = None

    def to_json(self):
        if self.kind == "declare":
            return {"leaf": {"kind": "declare", "label": self.label}}
        if self.kind == "pair_readout":
            return {"leaf": {"kind": "pair_readout", "plus": self.plus, "minus": self.minus}}
        return {"leaf": {"kind": "reject"}}

    @classmethod
    def from_json(cls, obj) -> Leaf:
        kind = obj["kind"]
        if kind == "declare":
            return cls("declare", label=obj["label"])
        if kind == "pair_readout":
            return cls("pair_readout", plus=obj["plus"], minus=obj["minus"])
        if kind == "reject":
            return cls("reject")
        raise ValueError(f"unknown leaf kind {kind!r}")


@dataclass
class MeasurementNode:
    actor: str
    operators: list[tuple[str, Matrix]]
    children: dict[str, "MeasurementNode | Leaf"]

    def to_json(self):
        return {
            "actor": self.actor,
            "operators": [
                {"outcome": o, "matrix": m.to_json()} for o, m in self.operators
            ],
            "children": {o: c.to_json() for o, c in self.children.items()},
        }

    @classmethod
    def from_json(cls, obj) -> MeasurementNode:
        ops = [(e["outcome"], Matrix.from_json(e["matrix"])) for e in obj["operators"]]
        children = {}
        for o, c in obj["children"].items():
            children[o] = Leaf.from_json(c["leaf"]) if "leaf" in c else cls.from_json(c)
        return cls(obj["actor"], ops, children)


@dataclass
class ProtocolTree:
    name: str
    set_ref: str
    resource_ref: str
    root: MeasurementNode
    _plans: dict = field(default_factory=dict, repr=False, compare=False)

    def to_json(self):
        return {
            "name": self.name,
            "set_ref": self.set_ref,
            "resource_ref": self.resource_ref,
            "root": self.root.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> ProtocolTree:
        return cls(obj["name"], obj["set_ref"], obj["resource_ref"],
                   MeasurementNode.from_json(obj["root"]))


# ---------------------------------------------------------------------------
# sparse state plumbing
# ---------------------------------------------------------------------------


class _Space:
    """Joint layout bookkeeping: factor dims, strides, per-actor positions."""

    def __init__(self, layout: PartyLayout):
        self.layout = layout
        self.dims = layout.factor_dims
        self.strides = layout._strides
        self._offsets: dict[tuple[int, ...], list[int]] = {}

    def local_offsets(self, positions: tuple[int, ...]) -> list[int]:
        """offsets[l] = joint-index contribution of local index l on these factors."""
        cached = self._offsets.get(positions)
        if cached is not None:
            return cached
        dims = [self.dims[p] for p in positions]
        total = 1
        for d in dims:
            total *= d
        offsets = []
        for l in range(total):
            rem = l
            off = 0
            for p, d in zip(reversed(positions), reversed(dims)):
                off += (rem % d) * self.strides[p]
                rem //= d
            offsets.append(off)
        self._offsets[positions] = offsets
        return offsets


_C_ONE = CScalar(QScalar(1))


def _sparse_cols(m: Matrix, exact: bool):
    """Compile a local operator: 0/1-diagonal projectors become index filters."""
    cols: dict[int, list[tuple[int, object]]] = {}
    diag01 = True
    for r in range(m.rows):
        row = m.data[r]
        for c in range(m.cols):
            v = row[c]
            if not v.is_zero():
                if r != c or v != _C_ONE:
                    diag01 = False
                cols.setdefault(c, []).append((r, v if exact else complex(v)))
    if diag01:
        return ("diag", frozenset(cols))
    return ("gen", cols)


def _apply(space: _Space, positions: tuple[int, ...], op, amps: dict, exact: bool,
           tol: float) -> dict:
    kind, cols = op
    strides = space.strides
    dims = space.dims
    if kind == "diag":
        out = {}
        for idx, amp in amps.items():
            l = 0
            for p in positions:
                l = l * dims[p] + (idx // strides[p]) % dims[p]
            if l in cols:
                out[idx] = amp
        return out
    offsets = space.local_offsets(positions)
    out = {}
    for idx, amp in amps.items():
        l = 0
        for p in positions:
            l = l * dims[p] + (idx // strides[p]) % dims[p]
        col = cols.get(l)
        if not col:
            continue
        base = idx - offsets[l]
        for r, val in col:
            j = base + offsets[r]
            prev = out.get(j)
            term = val * amp
            out[j] = term if prev is None else prev + term
    if exact:
        return {i: v for i, v in out.items() if not v.is_zero()}
    return {i: v for i, v in out.items() if abs(v) > tol}


def _norm2(amps: dict, exact: bool):
    if exact:
        n = Q_ZERO
        for v in amps.values():
            n = n + v.abs2()
        return n
    return sum(abs(v) ** 2 for v in amps.values())


def _inner(a: dict, b: dict, exact: bool):
    if exact:
        acc = C_ZERO
        for i, v in a.items():
            w = b.get(i)
            if w is not None:
                acc = acc + v.conj() * w
        return acc
    return sum(v.conjugate() * b[i] for i, v in a.items() if i in b)


def _add(a: dict, b: dict, exact: bool, sub: bool = False) -> dict:
    out = dict(a)
    for i, v in b.items():
        w = out.get(i)
        t = (-v if sub else v)
        out[i] = t if w is None else w + t
    if exact:
        return {i: v for i, v in out.items() if not v.is_zero()}
    return {i: v for i, v in out.items() if v != 0}


# ---------------------------------------------------------------------------
# compiled two-state readouts
# ---------------------------------------------------------------------------


@dataclass
class PairPlan:
    positions: list[int]          # differing factor positions
    projs: list[tuple]            # per factor: (P+ op, P- op) compiled operators
    plus: str
    minus: str


def _op_to_float(op):
    kind, cols = op
    if kind == "diag":
        return op
    return (kind, {c: [(r, complex(v)) for r, v in e] for c, e in cols.items()})


def _factor_product(amps: dict, dims: list[int], strides: list[int]):
    """Exact factorization of a product vector into per-factor dense vectors.

    Returns None when the vector is not a tensor product.
    """
    if not amps:
        return None
    idx0 = min(amps)
    c0 = amps[idx0]
    n = len(dims)
    coords0 = [(idx0 // strides[k]) % dims[k] for k in range(n)]
    factors: list[list[CScalar]] = []
    for k in range(n):
        base = idx0 - coords0[k] * strides[k]
        factors.append([amps.get(base + x * strides[k], C_ZERO) for x in range(dims[k])])
    # v = (tensor of factors) / c0^(n-1); fold the scale into the first factor
    scale = CScalar(QScalar(1))
    for _ in range(n - 1):
        scale = scale * c0
    inv = scale.inv()
    factors[0] = [v * inv for v in factors[0]]
    supports = [[x for x, v in enumerate(f) if not v.is_zero()] for f in factors]
    count = 1
    for s in supports:
        count *= len(s)
    if count != len(amps):
        return None
    for combo in iproduct(*supports):
        val = factors[0][combo[0]]
        for k in range(1, n):
            val = val * factors[k][combo[k]]
        idx = sum(c * strides[k] for k, c in enumerate(combo))
        if amps.get(idx, C_ZERO) != val:
            return None
    return factors


def _local_inner(a: list[CScalar], b: list[CScalar]) -> CScalar:
    acc = C_ZERO
    for x, y in zip(a, b):
        acc = acc + x.conj() * y
    return acc


def _compile_pair(leaf: Leaf, survivors, space: _Space, path) -> PairPlan:
    by_label = {lab: amps for lab, amps in survivors}
    if set(by_label) != {leaf.plus, leaf.minus}:
        raise ProtocolError(
            f"pair readout expects candidates {{{leaf.plus!r}, {leaf.minus!r}}}, "
            f"got {sorted(by_label)}", path)
    vp, vm = by_label[leaf.plus], by_label[leaf.minus]
    x0 = _add(vp, vm, exact=True)
    x1 = _add(vp, vm, exact=True, sub=True)
    if not x0 or not x1:
        raise ProtocolError("degenerate pair: the two residual branches coincide", path)
    f0 = _factor_product(x0, space.dims, space.strides)
    f1 = _factor_product(x1, space.dims, space.strides)
    if f0 is None or f1 is None:
        raise ProtocolError(
            "residual pair is not branch-product (sum/difference of the two "
            "candidates must both be fully product)", path)
    positions: list[int] = []
    projs = []
    for k, (a, b) in enumerate(zip(f0, f1)):
        ip = _local_inner(a, b)
        if ip.is_zero():
            # differing factor: scale b to a's norm so the +- vectors are orthogonal
            na = _local_inner(a, a).re
            nb = _local_inner(b, b).re
            ratio = (na / nb).sqrt()
            if ratio is None:
                raise ProtocolError(
                    "factor norms are not comparable inside Q(sqrt2); "
                    "cannot build the exact sign basis", path)
            b = [v * CScalar(ratio) for v in b]
            plus_vec = [x + y for x, y in zip(a, b)]
            minus_vec = [x - y for x, y in zip(a, b)]
            positions.append(k)
            projs.append((
                _sparse_cols(projector(plus_vec), True),
                _sparse_cols(projector(minus_vec), True),
            ))
        else:
            # identical (up to scalar) factors carry no sign information;
            # Cauchy-Schwarz equality |<a|b>|^2 = <a|a><b|b> certifies b = c a
            cross = ip.abs2()
            na = _local_inner(a, a).re
            nb = _local_inner(b, b).re
            if cross != na * nb:
                raise ProtocolError(
                    "factors are neither orthogonal nor proportional; "
                    "two-state readout precondition violated", path)
    if not positions:
        raise ProtocolError("no differing factor in residual pair", path)
    return PairPlan(positions, projs, leaf.plus, leaf.minus)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass
class ValidationIssue:
    path: tuple[str, ...]
    kind: str
    message: str

    def to_json(self):
        return {"path": list(self.path), "kind": self.kind, "message": self.message}


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def to_json(self):
        return {"valid": self.ok, "issues": [i.to_json() for i in self.issues]}


def validate(tree: ProtocolTree, sset: StateSet, resource: Resource) -> ValidationReport:
    """Structural validation plus compilation of readout leaves.

    Checks: operator completeness (sum of M^dag M equals the identity on the
    actor's factors, exactly), actor locality (operator shape matches the
    actor's system-plus-share dimension), outcome/child consistency, and leaf
    label validity.  Readout compilation failures are reported with the node
    path.
    """
    report = ValidationReport()
    joint = sset.layout.with_resource(resource.layout)
    space = _Space(joint)
    labels = set(sset.labels)

    def walk(node, path):
        if isinstance(node, Leaf):
            if node.kind == "declare" and node.label not in labels:
                report.issues.append(ValidationIssue(path, "dangling-label",
                                                     f"unknown member {node.label!r}"))
            if node.kind == "pair_readout":
                for lab in (node.plus, node.minus):
                    if lab not in labels:
                        report.issues.append(ValidationIssue(
                            path, "dangling-label", f"unknown member {lab!r}"))
            return
        if node.actor not in joint.party_names:
            report.issues.append(ValidationIssue(path, "unknown-actor",
                                                 f"no party named {node.actor!r}"))
            return
        positions = tuple(joint.factor_positions(node.actor))
        dim = 1
        for p in positions:
            dim *= space.dims[p]
        gram: dict = {}
        shape_ok = True
        for outcome, m in node.operators:
            if m.rows != dim or m.cols != dim:
                report.issues.append(ValidationIssue(
                    path, "locality",
                    f"operator {outcome!r} has shape {m.rows}x{m.cols}; the actor's "
                    f"system-and-share space has dimension {dim} (operators may touch "
                    f"only the actor's factors)"))
                shape_ok = False
                continue
            # accumulate M^dag M sparsely: each row contributes its entry pairs
            for r in range(dim):
                row = [(c, v) for c, v in enumerate(m.data[r]) if not v.is_zero()]
                for c1, v1 in row:
                    v1c = v1.conj()
                    for c2, v2 in row:
                        key = (c1, c2)
                        prev = gram.get(key)
                        term = v1c * v2
                        gram[key] = term if prev is None else prev + term
        if shape_ok:
            complete = all(
                (gram.get((c, c), C_ZERO) == _C_ONE) for c in range(dim)
            ) and all(
                v.is_zero() for (c1, c2), v in gram.items() if c1 != c2
            )
            if not complete:
                report.issues.append(ValidationIssue(
                    path, "incomplete-measurement",
                    "sum of M^dag M differs from the identity on the actor's factors"))
        outs = [o for o, _ in node.operators]
        if len(set(outs)) != len(outs):
            report.issues.append(ValidationIssue(path, "duplicate-outcome",
                                                 "outcome labels must be unique"))
        if set(outs) != set(node.children):
            report.issues.append(ValidationIssue(
                path, "child-mismatch",
                f"outcomes {sorted(outs)} vs children {sorted(node.children)}"))
        for o, child in node.children.items():
            walk(child, path + (o,))

    walk(tree.root, ())
    if report.ok:
        try:
            _cached_plans(tree, sset, resource)
        except ProtocolError as e:
            report.issues.append(ValidationIssue(e.path, "readout", str(e)))
    return report


def _cached_plans(tree: ProtocolTree, sset: StateSet, designated: Resource):
    key = (sset.name, designated.name)
    plans = tree._plans.get(key)
    if plans is None:
        plans = _prepare(tree, sset, designated)
        tree._plans[key] = plans
    return plans


def _prepare(tree: ProtocolTree, sset: StateSet, designated: Resource):
    """Evolve the designated ensemble down the tree and compile readout plans."""
    joint = sset.layout.with_resource(designated.layout)
    space = _Space(joint)
    survivors = [(m.label, joint_ket(m, designated).amps) for m in sset.members]
    plans: dict[tuple[str, ...], PairPlan] = {}

    def walk(node, survivors, path):
        if isinstance(node, Leaf):
            if node.kind == "pair_readout":
                plans[path] = _compile_pair(node, survivors, space, path)
            return
        positions = tuple(joint.factor_positions(node.actor))
        for outcome, m in node.operators:
            cols = _sparse_cols(m, True)
            nxt = []
            for lab, amps in survivors:
                res = _apply(space, positions, cols, amps, True, 0.0)
                if res:
                    nxt.append((lab, res))
            if nxt:
                walk(node.children[outcome], nxt, path + (outcome,))

    walk(tree.root, survivors, ())
    return plans


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------


@dataclass
class AuditEntry:
    path: tuple[str, ...]
    ok: bool
    pair: tuple[str, str] | None = None

    def to_json(self):
        out = {"path": list(self.path), "ok": self.ok}
        if self.pair:
            out["pair"] = list(self.pair)
        return out


@dataclass
class RunReport:
    protocol: str
    set_name: str
    resource_name: str
    exact: bool
    tolerance: float
    success: QScalar | float
    per_state: dict
    audit: list[AuditEntry]

    @property
    def audit_passed(self) -> bool:
        return all(e.ok for e in self.audit)

    def success_is_one(self) -> bool:
        if self.exact:
            return self.success == QScalar(1)
        return abs(self.success - 1.0) <= self.tolerance

    def to_json(self):
        def fmt(p):
            return p.format() if self.exact else float(p)

        per_state = {}
        for lab, rec in self.per_state.items():
            per_state[lab] = {
                "correct": fmt(rec["correct"]),
                "total": fmt(rec["total"]),
                "branches": [
                    {"path": list(b[0]), "declared": b[1], "probability": fmt(b[2])}
                    for b in rec["branches"]
                ],
            }
        return {
            "protocol": self.protocol,
            "set": self.set_name,
            "resource": self.resource_name,
            "arithmetic": "exact" if self.exact else "float",
            "tolerance": None if self.exact else self.tolerance,
            "success_probability": fmt(self.success),
            "success_exactly_one": self.success_is_one(),
            "audit": {
                "passed": self.audit_passed,
                "nodes_checked": len(self.audit),
                "failures": [e.to_json() for e in self.audit if not e.ok],
            },
            "per_state": per_state,
        }


def run_exhaustive(tree: ProtocolTree, sset: StateSet, resource: Resource,
                   designated: Resource | None = None,
                   prior: list[Fraction] | None = None,
                   tol: float = TOLERANCE_DEFAULT) -> RunReport:
    """Execute the protocol on every member, traversing all nonzero branches.

    ``designated`` is the resource the readout leaves are compiled against
    (defaults to ``resource`` itself); pass the protocol's designed resource
    when probing degraded ones.  Probabilities are exact whenever the set and
    both resources are exact.
    """
    if designated is None:
        designated = resource
    plans = _cached_plans(tree, sset, designated)
    joint = sset.layout.with_resource(resource.layout)
    space = _Space(joint)
    exact = resource.ket.exact
    if prior is None:
        prior = [Fraction(1, len(sset.members))] * len(sset.members)
    if len(prior) != len(sset.members) or sum(prior) != 1:
        raise ValueError("prior must assign one weight per member and sum to 1 exactly")

    survivors = []
    for m in sset.members:
        k = joint_ket(m, resource)
        survivors.append((m.label, k.amps if exact else k.to_float().amps))

    audit: list[AuditEntry] = []
    per_state = {m.label: {"correct": Q_ZERO if exact else 0.0,
                           "total": Q_ZERO if exact else 0.0,
                           "branches": []} for m in sset.members}

    def is_zero_scalar(z):
        if exact:
            return z.is_zero()
        return abs(z) <= tol

    def do_audit(survs, path):
        for i in range(len(survs)):
            for j in range(i + 1, len(survs)):
                if not is_zero_scalar(_inner(survs[i][1], survs[j][1], exact)):
                    audit.append(AuditEntry(path, False, (survs[i][0], survs[j][0])))
                    return
        audit.append(AuditEntry(path, True))

    def record(lab, path, declared, mass):
        rec = per_state[lab]
        rec["total"] = rec["total"] + mass
        if declared == lab:
            rec["correct"] = rec["correct"] + mass
        rec["branches"].append((path, declared, mass))

    op_cache: dict[int, object] = {}

    def walk(node, survs, path):
        if len(survs) > 1:
            do_audit(survs, path)
        if isinstance(node, Leaf):
            if node.kind == "declare":
                for lab, amps in survs:
                    record(lab, path, node.label, _norm2(amps, exact))
            elif node.kind == "reject":
                for lab, amps in survs:
                    record(lab, path, "reject", _norm2(amps, exact))
            else:
                plan = plans.get(path)
                if plan is None:
                    for lab, amps in survs:
                        record(lab, path, "reject", _norm2(amps, exact))
                    return
                run_pair(plan, survs, path)
            return
        positions = tuple(joint.factor_positions(node.actor))
        for outcome, m in node.operators:
            key = id(m)
            cols = op_cache.get(key)
            if cols is None:
                cols = _sparse_cols(m, exact)
                op_cache[key] = cols
            nxt = []
            for lab, amps in survs:
                res = _apply(space, positions, cols, amps, exact, tol)
                if res:
                    nxt.append((lab, res))
            if nxt:
                walk(node.children[outcome], nxt, path + (outcome,))

    def run_pair(plan: PairPlan, survs, path):
        for lab, amps in survs:
            total = _norm2(amps, exact)
            seen = Q_ZERO if exact else 0.0
            states = [(amps, 0, "")]
            for pos, (pp, pm) in zip(plan.positions, plan.projs):
                cols_p = pp if exact else _op_to_float(pp)
                cols_m = pm if exact else _op_to_float(pm)
                nxt = []
                for amps_c, minus, tag in states:
                    rp = _apply(space, (pos,), cols_p, amps_c, exact, tol)
                    if rp:
                        nxt.append((rp, minus, tag + "+"))
                    rm = _apply(space, (pos,), cols_m, amps_c, exact, tol)
                    if rm:
                        nxt.append((rm, minus + 1, tag + "-"))
                states = nxt
            for amps_c, minus, tag in states:
                mass = _norm2(amps_c, exact)
                declared = plan.plus if minus % 2 == 0 else plan.minus
                record(lab, path + (tag,), declared, mass)
                seen = seen + mass
            leftover = total - seen
            if (exact and not leftover.is_zero()) or (not exact and abs(leftover) > tol):
                record(lab, path + ("rest",), "reject", leftover)

    walk(tree.root, survivors, ())

    success = Q_ZERO if exact else 0.0
    for w, m in zip(prior, sset.members):
        c = per_state[m.label]["correct"]
        if exact:
            success = success + c * QScalar(w)
        else:
            success = success + float(w) * c
    # every branch is accounted for: per-state masses must total 1
    for lab, rec in per_state.items():
        t = rec["total"]
        if exact:
            if t != QScalar(1):
                raise ProtocolError(f"branch probabilities for {lab!r} sum to "
                                    f"{t.format()} instead of 1")
        elif abs(t - 1.0) > max(tol, 1e-7):
            raise ProtocolError(f"branch probabilities for {lab!r} sum to {t}")
    return RunReport(tree.name, sset.name, resource.name, exact, tol,
                     success, per_state, audit)


# ---------------------------------------------------------------------------
# sequential tasks
# ---------------------------------------------------------------------------


@dataclass
class SequentialTask:
    """Repeated discrimination with disjoint shares consumed per round."""

    name: str
    set_ref: str
    rounds: int
    partition: list[list[str]]  # per round: resource factor names ("P1.anc0", ...)
    protocol_refs: list[str]

    def to_json(self):
        return {"name": self.name, "set_ref": self.set_ref, "rounds": self.rounds,
                "partition": self.partition, "protocols": self.protocol_refs}

    @classmethod
    def from_json(cls, obj) -> SequentialTask:
        return cls(obj["name"], obj["set_ref"], obj["rounds"],
                   obj["partition"], obj["protocols"])


def split_resource(resource: Resource, partition: list[list[str]]) -> list[Resource | None]:
    """Split a resource across rounds; the state must factor exactly over the groups.

    Rounds with an empty share list get None (callers substitute a product
    ancilla).  Raises if groups overlap or the state does not factorize.
    """
    factor_names = [f.name for f in resource.layout.factors]
    seen: set[str] = set()
    groups: list[list[int]] = []
    for share in partition:
        pos = []
        for name in share:
            if name not in factor_names:
                raise ValueError(f"unknown resource factor {name!r}")
            if name in seen:
                raise ValueError(f"resource factor {name!r} assigned to two rounds")
            seen.add(name)
            pos.append(factor_names.index(name))
        groups.append(sorted(pos))
    unassigned = [i for i in range(len(factor_names)) if factor_names[i] not in seen]
    work_groups = [g for g in groups if g] + ([unassigned] if unassigned else [])
    if not resource.ket.exact:
        raise ValueError("sequential splitting runs on the exact path only")

    dims = resource.layout.factor_dims
    # regroup amplitudes over (group1, group2, ...) super-factors
    gdims = []
    for g in work_groups:
        d = 1
        for i in g:
            d *= dims[i]
        gdims.append(d)
    strides = [1] * len(gdims)
    for i in range(len(gdims) - 2, -1, -1):
        strides[i] = strides[i + 1] * gdims[i + 1]
    regrouped: dict[int, CScalar] = {}
    for idx, v in resource.ket.amps.items():
        coords = resource.layout.coords_of(idx)
        gidx = 0
        for gi, g in enumerate(work_groups):
            li = 0
            for p in g:
                li = li * dims[p] + coords[p]
            gidx += li * strides[gi]
        regrouped[gidx] = v
    factors = _factor_product(regrouped, gdims, strides)
    if factors is None:
        raise ValueError("resource does not factor across the round partition")

    out: list[Resource | None] = []
    gi = 0
    for share, g in zip(partition, groups):
        if not g:
            out.append(None)
            continue
        vec = factors[gi]
        gi += 1
        anc: dict[str, list[int]] = {}
        parties = [(p, 0) for p in resource.layout.party_names]
        for i in g:
            f = resource.layout.factors[i]
            anc.setdefault(f.owner, []).append(f.dim)
        sub_layout = PartyLayout(parties, anc)
        # positions ascending keeps party-major ancilla order, matching sub_layout
        amps = {i: v for i, v in enumerate(vec) if not v.is_zero()}
        norm2 = Q_ZERO
        for v in amps.values():
            norm2 = norm2 + v.abs2()
        root = norm2.sqrt()
        if root is None:
            raise ValueError("round share norm leaves Q(sqrt2)")
        inv = CScalar(root.inv())
        amps = {i: v * inv for i, v in amps.items()}
        sub = Ket(sub_layout, amps)
        out.append(Resource(f"{resource.name}[round share]", sub_layout, sub))
    return out


@dataclass
class SequentialReport:
    task: str
    rounds: list[RunReport]
    success: QScalar | float
    exact: bool

    def success_is_one(self) -> bool:
        if self.exact:
            return self.success == QScalar(1)
        return abs(self.success - 1.0) <= TOLERANCE_DEFAULT

    def to_json(self):
        return {
            "task": self.task,
            "success_probability": self.success.format() if self.exact else float(self.success),
            "success_exactly_one": self.success_is_one(),
            "rounds": [r.to_json() for r in self.rounds],
        }


def run_sequential(task: SequentialTask, resource: Resource,
                   protocols: list[ProtocolTree], sset: StateSet,
                   designated: list[Resource],
                   tol: float = TOLERANCE_DEFAULT) -> SequentialReport:
    """Run each round independently; success needs a correct call every round.

    Draws are independent and uniform across rounds, so the task success
    probability is the product of the per-round success probabilities.  Rounds
    whose share list is empty run with the unentangled |0...0> ancilla of the
    round protocol's designated shape.
    """
    if task.rounds != len(task.partition) or task.rounds != len(protocols):
        raise ValueError("rounds, partition and protocols must agree")
    shares = split_resource(resource, task.partition)
    reports = []
    for rnd in range(task.rounds):
        res = shares[rnd]
        if res is None:
            from .model import product_ancilla_resource

            res = product_ancilla_resource(designated[rnd])
        reports.append(run_exhaustive(protocols[rnd], sset, res,
                                      designated=designated[rnd], tol=tol))
    exact = all(r.exact for r in reports)
    if exact:
        success = QScalar(1)
        for r in reports:
            success = success * r.success
    else:
        success = 1.0
        for r in reports:
            success = success * float(r.success)
    return SequentialReport(task.name, reports, success, exact)
