"""Integer linear program for node scanwidth.

Variables, for vertices ``u, v, w``:

* ``s``          integer, the width;
* ``x_u_v``      1 iff ``u -> v`` is a tree-extension edge;
* ``y_u_v``      1 iff ``v`` is reachable from ``u`` in the tree (``y_v_v`` is fixed to 1);
* ``z_u_v``      1 iff ``u`` lies in the bag of ``v``;
* ``a_u_v_w``    1 iff ``u`` reaches ``v`` and ``v -> w`` is a tree edge.

``x_v_v`` is fixed to 0.  Constraint families are named ``gw``, ``reach``,
``bagdef``, ``treeedges``, ``treein``, ``acyc``, ``adef`` and ``a1`` to
``a4``.  The model can be written in CPLEX LP format; no solver is bundled.
:func:`check_assignment` evaluates an assignment against every row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Dag
from .extension import TreeExtension

_SENSES = {">=": lambda a, b: a >= b, "<=": lambda a, b: a <= b, "=": lambda a, b: a == b}


class MissingVariable(KeyError):
    pass


@dataclass(frozen=True)
class Constraint:
    name: str
    family: str
    terms: tuple[tuple[int, str], ...]   # (coefficient, variable)
    sense: str
    rhs: int

    def lhs(self, values) -> int:
        return sum(c * values[v] for c, v in self.terms)

    def holds(self, values) -> bool:
        return _SENSES[self.sense](self.lhs(values), self.rhs)


@dataclass
class IlpModel:
    vertices: tuple[int, ...]
    binaries: list[str] = field(default_factory=list)
    integers: list[str] = field(default_factory=list)
    fixed: dict[str, int] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    _matrix: tuple | None = field(default=None, init=False, repr=False, compare=False)

    @property
    def variables(self) -> list[str]:
        return self.integers + self.binaries

    def family_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.constraints:
            out[c.family] = out.get(c.family, 0) + 1
        return out

    def matrix(self):
        """Rows as coordinate arrays ``(rows, cols, coefs, rhs, sense)``; cached."""
        if self._matrix is None:
            col = {v: i for i, v in enumerate(self.variables)}
            rows, cols, coefs = [], [], []
            for i, c in enumerate(self.constraints):
                for coef, v in c.terms:
                    rows.append(i)
                    cols.append(col[v])
                    coefs.append(coef)
            rhs = np.array([c.rhs for c in self.constraints], dtype=float)
            sense = np.array([c.sense for c in self.constraints])
            self._matrix = (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
                            np.array(coefs, dtype=float), rhs, sense)
        return self._matrix

    def to_lp(self) -> str:
        lines = ["\\ node scanwidth of a DAG", "Minimize", " obj: s", "Subject To"]
        for c in self.constraints:
            lines.append(_row(c))
        lines.append("Bounds")
        lines += [f" 0 <= {v}" for v in self.integers]
        lines += [f" {v} = {val}" for v, val in self.fixed.items()]
        lines.append("Binaries")
        lines += _wrap(self.binaries)
        lines.append("Generals")
        lines += _wrap(self.integers)
        lines.append("End")
        return "\n".join(lines) + "\n"


def _wrap(names: list[str], per_line: int = 8) -> list[str]:
    return [" " + " ".join(names[i:i + per_line]) for i in range(0, len(names), per_line)]


def _row(c: Constraint) -> str:
    parts = []
    for coef, var in c.terms:
        sign = "-" if coef < 0 else "+"
        mag = "" if abs(coef) == 1 else f"{abs(coef)} "
        parts.append(f"{sign} {mag}{var}")
    if parts and parts[0].startswith("+ "):
        parts[0] = parts[0][2:]
    body = []
    for i in range(0, len(parts), 8):
        body.append(" ".join(parts[i:i + 8]))
    text = "\n   ".join(body)
    return f" {c.name}: {text} {c.sense} {c.rhs}"


def _x(u, v):
    return f"x_{u}_{v}"


def _y(u, v):
    return f"y_{u}_{v}"


def _z(u, v):
    return f"z_{u}_{v}"


def _a(u, v, w):
    return f"a_{u}_{v}_{w}"


def emit_ilp(g: Dag) -> IlpModel:
    V = g.vertices
    E = set(g.edges)
    n = len(V)
    m = IlpModel(tuple(V))
    m.integers.append("s")
    for name in (_x, _y, _z):
        m.binaries += [name(u, v) for u in V for v in V]
    m.binaries += [_a(u, v, w) for u in V for v in V for w in V]
    for v in V:
        m.fixed[_y(v, v)] = 1
    for v in V:
        m.fixed[_x(v, v)] = 0
    add = m.constraints.append

    def terms(*pairs):
        merged: dict[str, int] = {}
        for coef, var in pairs:
            merged[var] = merged.get(var, 0) + coef
        return tuple((c, var) for var, c in merged.items() if c)

    for v in V:
        add(Constraint(f"gw_{v}", "gw", terms((1, "s"), *((-1, _z(u, v)) for u in V)), ">=", 0))
    for u, v in g.edges:
        add(Constraint(f"reach_{u}_{v}", "reach", terms((1, _y(u, v))), ">=", 1))
    for u in V:
        for v in V:
            if u == v:
                continue
            for w in V:
                delta = 1 if (u, w) in E else 0
                add(Constraint(f"bagdef_{u}_{v}_{w}", "bagdef",
                               terms((1, _z(u, v)), (-1, _y(u, v)), (-1, _y(v, w))),
                               ">=", delta - 2))
    add(Constraint("treeedges", "treeedges",
                   terms(*((1, _x(u, v)) for u in V for v in V)), "=", n - 1))
    for v in V:
        add(Constraint(f"treein_{v}", "treein", terms(*((1, _x(u, v)) for u in V)), "<=", 1))
    for i, u in enumerate(V):
        for v in V[i + 1:]:
            add(Constraint(f"acyc_{u}_{v}", "acyc", terms((1, _y(u, v)), (1, _y(v, u))), "<=", 1))
    for u in V:
        for v in V:
            for w in V:
                add(Constraint(f"adef_{u}_{v}_{w}", "adef",
                               terms((1, _a(u, v, w)), (-1, _y(u, v)), (-1, _x(v, w))), ">=", -1))
    for u in V:
        for v in V:
            for w in V:
                if u != w:
                    add(Constraint(f"a1_{u}_{v}_{w}", "a1",
                                   terms((1, _y(u, w)), (-1, _a(u, v, w))), ">=", 0))
    for u in V:
        for w in V:
            if u != w:
                add(Constraint(f"a2_{u}_{w}", "a2",
                               terms((1, _y(u, w)), *((-1, _a(u, v, w)) for v in V)), "<=", 0))
    for u in V:
        for v in V:
            for w in V:
                add(Constraint(f"a3_{u}_{v}_{w}", "a3",
                               terms((1, _a(u, v, w)), (-1, _y(u, v))), "<=", 0))
    for u in V:
        for v in V:
            for w in V:
                add(Constraint(f"a4_{u}_{v}_{w}", "a4",
                               terms((1, _a(u, v, w)), (-1, _x(v, w))), "<=", 0))
    return m


def expected_counts(n: int, n_edges: int) -> dict[str, int]:
    """Number of rows per family for ``n`` vertices and ``n_edges`` edges."""
    return {"gw": n, "reach": n_edges, "bagdef": n * n * (n - 1), "treeedges": 1,
            "treein": n, "acyc": n * (n - 1) // 2, "adef": n ** 3, "a1": n * n * (n - 1),
            "a2": n * (n - 1), "a3": n ** 3, "a4": n ** 3}


def encode_extension(g: Dag, ext: TreeExtension | dict) -> dict[str, int]:
    """Variable assignment describing ``ext``."""
    if not isinstance(ext, TreeExtension):
        ext = TreeExtension(g, ext)
    V = g.vertices
    values: dict[str, int] = {"s": ext.width}
    below = {v: ext.subtree(v) for v in V}
    for u in V:
        bag_u = ext.bag(u)
        for v in V:
            values[_x(u, v)] = int(ext.parent[v] == u)
            values[_y(u, v)] = int(v in below[u])
            values[_z(v, u)] = int(v in bag_u)
    for u in V:
        for v in V:
            for w in V:
                values[_a(u, v, w)] = values[_y(u, v)] & values[_x(v, w)]
    return values


def check_assignment(model: IlpModel, values: dict[str, int]) -> tuple[bool, list[str]]:
    """Evaluate ``values`` against the model; returns (feasible, violated row names).

    Domain violations (non-binary values, wrong fixed values) are reported as
    ``domain:<variable>``.
    """
    for v in model.variables:
        if v not in values:
            raise MissingVariable(v)
    bad = []
    for v in model.binaries:
        if values[v] not in (0, 1):
            bad.append(f"domain:{v}")
    for v in model.integers:
        if int(values[v]) != values[v] or values[v] < 0:
            bad.append(f"domain:{v}")
    for v, val in model.fixed.items():
        if values[v] != val:
            bad.append(f"domain:{v}")
    rows, cols, coefs, rhs, sense = model.matrix()
    x = np.array([values[v] for v in model.variables], dtype=float)
    lhs = np.bincount(rows, weights=coefs * x[cols], minlength=len(rhs))
    ok = np.where(sense == ">=", lhs >= rhs, np.where(sense == "<=", lhs <= rhs, lhs == rhs))
    bad += [model.constraints[i].name for i in np.nonzero(~ok)[0]]
    return not bad, bad
