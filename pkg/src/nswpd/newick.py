"""Extended Newick networks, taxon-cost tables and JSON result records."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core import CyclicInput, Dag, Network, NetworkError, UnknownTaxon


class NewickSyntaxError(NetworkError):
    def __init__(self, position: int, message: str):
        super().__init__(f"at position {position}: {message}")
        self.position = position


class InconsistentHybridTag(NetworkError):
    pass


class DanglingHybrid(NetworkError):
    pass


class CostError(ValueError):
    pass


class MissingTaxon(CostError):
    pass


class NonIntegerCost(CostError):
    pass


class NegativeCost(CostError):
    pass


class DuplicateTaxon(CostError):
    pass


_SPECIAL = set("(),:;[]'#")


class _Occurrence:
    __slots__ = ("name", "tag", "length", "children", "pos")

    def __init__(self, pos):
        self.name = ""
        self.tag = None
        self.length = None
        self.children = None
        self.pos = pos


class _Parser:
    def __init__(self, text: str):
        self.s = text
        self.i = 0

    def error(self, msg):
        raise NewickSyntaxError(self.i, msg)

    def skip(self):
        s = self.s
        while self.i < len(s):
            c = s[self.i]
            if c.isspace():
                self.i += 1
            elif c == "[":
                end = s.find("]", self.i)
                if end < 0:
                    self.error("unterminated comment")
                self.i = end + 1
            else:
                break

    def peek(self):
        self.skip()
        return self.s[self.i] if self.i < len(self.s) else ""

    def parse(self) -> _Occurrence:
        stack: list[_Occurrence] = []
        while True:
            while self.peek() == "(":
                self.i += 1
                occ = _Occurrence(self.i)
                occ.children = []
                stack.append(occ)
            node = _Occurrence(self.i)
            self.tail(node)
            while True:
                if not stack:
                    if self.peek() != ";":
                        self.error("expected ';'")
                    self.i += 1
                    if self.peek():
                        self.error("trailing characters after ';'")
                    return node
                stack[-1].children.append(node)
                c = self.peek()
                if c == ",":
                    self.i += 1
                    break
                if c != ")":
                    self.error("expected ',' or ')'")
                self.i += 1
                node = stack.pop()
                self.tail(node)

    def tail(self, node: _Occurrence):
        node.name = self.label()
        if self.peek() == "#":
            self.i += 1
            node.tag = self.label()
            if not node.tag:
                self.error("empty hybrid tag")
        if self.peek() == ":":
            self.i += 1
            node.length = self.number()
            # extended Newick may append :support:probability
            while self.peek() == ":":
                self.i += 1
                self.number(optional=True)

    def label(self) -> str:
        self.skip()
        s = self.s
        if self.i < len(s) and s[self.i] == "'":
            out = []
            self.i += 1
            while True:
                if self.i >= len(s):
                    self.error("unterminated quoted label")
                c = s[self.i]
                if c == "'":
                    if s.startswith("''", self.i):
                        out.append("'")
                        self.i += 2
                        continue
                    self.i += 1
                    return "".join(out)
                out.append(c)
                self.i += 1
        start = self.i
        while self.i < len(s) and s[self.i] not in _SPECIAL and not s[self.i].isspace():
            self.i += 1
        return s[start:self.i]

    def number(self, optional=False):
        self.skip()
        start = self.i
        s = self.s
        while self.i < len(s) and (s[self.i].isalnum() or s[self.i] in "+-."):
            self.i += 1
        tok = s[start:self.i]
        if not tok:
            if optional:
                return None
            self.error("expected a branch length")
        try:
            return Fraction(tok)
        except (ValueError, ZeroDivisionError):
            raise NewickSyntaxError(start, f"bad number {tok!r}") from None


def parse_enewick(text: str) -> tuple[Dag, dict[int, str]]:
    """Parse an extended Newick string.

    Occurrences sharing a hybrid tag (``name#H1``) become one reticulation;
    exactly one occurrence may carry the subtree.  Missing branch lengths
    are 0.  Returns the DAG and its leaf labels; internal names are kept on
    the DAG but not in the returned label map.
    """
    root = _Parser(text).parse()
    tag_vertex: dict[str, int] = {}
    tag_owner: dict[str, _Occurrence] = {}
    tag_count: dict[str, int] = {}
    names: dict[int, str] = {}
    edges: list[tuple[int, int]] = []
    weights: dict[tuple[int, int], Fraction] = {}
    counter = 0

    def vertex_for(occ):
        nonlocal counter
        if occ.tag is not None:
            tag_count[occ.tag] = tag_count.get(occ.tag, 0) + 1
            if occ.children is not None:
                if occ.tag in tag_owner:
                    raise InconsistentHybridTag(f"#{occ.tag} carries two subtrees")
                tag_owner[occ.tag] = occ
            if occ.tag not in tag_vertex:
                tag_vertex[occ.tag] = counter
                counter += 1
            v = tag_vertex[occ.tag]
            if occ.name:
                if names.get(v, occ.name) != occ.name:
                    raise InconsistentHybridTag(
                        f"#{occ.tag} named both {names[v]!r} and {occ.name!r}")
                names[v] = occ.name
            return v
        v = counter
        counter += 1
        if occ.name:
            names[v] = occ.name
        return v

    root_v = vertex_for(root)
    stack = [(root, root_v)]
    while stack:
        occ, v = stack.pop()
        kids = []
        for child in occ.children or ():
            w = vertex_for(child)
            if (v, w) in weights:
                raise NetworkError(f"parallel edge into vertex {w}")
            edges.append((v, w))
            weights[(v, w)] = child.length if child.length is not None else Fraction(0)
            if child.children is not None:
                kids.append((child, w))
        stack.extend(reversed(kids))
    for tag, n in tag_count.items():
        if n < 2:
            raise DanglingHybrid(f"hybrid #{tag} occurs only once")
    if root.tag is not None:
        raise InconsistentHybridTag("the root cannot be a hybrid")
    vertices = list(range(counter))
    try:
        dag = Dag(vertices, edges, weights, names)
    except CyclicInput as exc:
        raise CyclicInput(f"hybrid tags induce a cycle: {exc}") from None
    labels = {v: names[v] for v in vertices if v in names and not dag.children(v)}
    return dag, labels


def _format_weight(w: Fraction) -> str:
    if w.denominator == 1:
        return str(w.numerator)
    d = w.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return repr(float(w))
    places = max(twos, fives)
    scaled = w * 10 ** places
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def _format_label(name: str) -> str:
    if not name:
        return ""
    if any(c in _SPECIAL or c.isspace() for c in name):
        return "'" + name.replace("'", "''") + "'"
    return name


def serialize_enewick(net: Dag, names: Mapping[int, str] | None = None) -> str:
    """Write ``net`` as extended Newick.

    Children appear in stored order; a reticulation's subtree is written at
    its first occurrence in that order and referenced by ``#H<k>`` elsewhere.
    """
    roots = net.sources()
    if len(roots) != 1:
        raise NetworkError("serialisation needs a single root")
    names = dict(net.labels) if names is None else dict(names)
    tags: dict[int, int] = {}
    written: set[int] = set()
    out: list[str] = []

    # explicit stack of ("open", v, length) / ("text", s) items
    stack = [("node", roots[0], None)]
    while stack:
        item = stack.pop()
        if item[0] == "text":
            out.append(item[1])
            continue
        _, v, length = item
        suffix = ""
        if net.in_degree(v) >= 2:
            if v not in tags:
                tags[v] = len(tags) + 1
            suffix = f"#H{tags[v]}"
        tail = _format_label(names.get(v, "")) + suffix
        if length is not None:
            tail += ":" + _format_weight(length)
        kids = net.children(v)
        if v in written or not kids:
            written.add(v)
            out.append(tail)
            continue
        written.add(v)
        out.append("(")
        stack.append(("text", ")" + tail))
        for i, w in reversed(list(enumerate(kids))):
            stack.append(("node", w, net.weight(v, w)))
            if i:
                stack.append(("text", ","))
    return "".join(out) + ";"


# -- costs ------------------------------------------------------------------

def parse_costs(text: str, net: Network) -> dict[str, int]:
    """Read ``taxon,cost`` lines (optional header, LF or CRLF) into a complete table."""
    table: dict[str, int] = {}
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    for lineno, row in enumerate(rows):
        if len(row) != 2:
            raise CostError(f"line {lineno + 1}: expected 'taxon,cost'")
        taxon, raw = row[0].strip(), row[1].strip()
        if lineno == 0 and taxon not in net.taxa and not _is_int(raw):
            continue  # header
        if taxon not in net.taxa:
            raise UnknownTaxon(f"unknown taxon {taxon!r} in cost table")
        if not _is_int(raw):
            raise NonIntegerCost(f"cost {raw!r} of {taxon!r} is not an integer")
        cost = int(raw)
        if cost < 0:
            raise NegativeCost(f"cost of {taxon!r} is negative")
        if taxon in table:
            raise DuplicateTaxon(f"taxon {taxon!r} listed twice")
        table[taxon] = cost
    for taxon in net.taxon_names:
        if taxon not in table:
            raise MissingTaxon(taxon)
    return table


def unit_costs(net: Network) -> dict[str, int]:
    return {t: 1 for t in net.taxon_names}


def serialize_costs(costs: Mapping[str, int]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["taxon", "cost"])
    for taxon, cost in costs.items():
        writer.writerow([taxon, cost])
    return buf.getvalue()


def _is_int(raw: str) -> bool:
    try:
        int(raw)
    except ValueError:
        return False
    return True


# -- result records ------------------------------------------------------------

def digest(*parts: str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode())
        h.update(b"\0")
    return h.hexdigest()[:16]


def json_number(x):
    """Exact JSON rendering: integers as numbers, other rationals as 'p/q' strings."""
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass
class ResultRecord:
    problem: str
    value: object = None
    taxa: list[str] | None = None
    budget: int | None = None
    nsw: int | None = None
    millis: float = 0.0
    seed: int | None = None
    digest: str | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self, timings: bool = True) -> dict:
        d = {"problem": self.problem,
             "value": json_number(self.value) if self.value is not None else None,
             "taxa": sorted(self.taxa) if self.taxa is not None else None,
             "budget": self.budget, "nsw": self.nsw,
             "millis": round(self.millis, 3) if timings else None,
             "seed": self.seed, "digest": self.digest}
        d.update(self.extra)
        return d

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), sort_keys=False, separators=(",", ":"))
