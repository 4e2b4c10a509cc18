"""Line-oriented text formats for every instance type and certificate.

Each instance file starts with ``<TAG> <version>``; blank lines and
everything after ``#`` are ignored. Weights are integers or ``inf``.
Rendering is deterministic, so ``render(parse(text))`` is the canonical
form of ``text``.
"""

from __future__ import annotations

from typing import Callable, Iterator, Sequence

from eulerext._kernels import INF
from eulerext.advice import CYCLE, PATH, Hint
from eulerext.cbm import CBMInstance
from eulerext.graph_core import Arc, DirectedMultigraph
from eulerext.preprocess import EEInstance
from eulerext.reductions import CNF, EEAInstance, RPInstance
from eulerext.ssc import PlanarEEInstance, SSCInstance

VERSION = 1


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class _Lines:
    """Cursor over the meaningful lines of a file, keeping line numbers."""

    def __init__(self, text: str) -> None:
        self.items: list[tuple[int, list[str]]] = []
        for no, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].split()
            if body:
                self.items.append((no, body))
        self.pos = 0

    @property
    def line(self) -> int | None:
        if self.pos < len(self.items):
            return self.items[self.pos][0]
        return self.items[-1][0] if self.items else None

    def next(self, what: str) -> list[str]:
        if self.pos >= len(self.items):
            raise ParseError(f"unexpected end of input, expected {what}", self.line)
        toks = self.items[self.pos][1]
        self.pos += 1
        return toks

    def keyed(self, key: str, count: int | None = 1) -> list[str]:
        toks = self.next(f"'{key}'")
        if toks[0] != key:
            raise ParseError(f"expected '{key}', got '{toks[0]}'", self.items[self.pos - 1][0])
        if count is not None and len(toks) != count + 1:
            raise ParseError(f"'{key}' takes {count} value(s)", self.items[self.pos - 1][0])
        return toks[1:]

    def peek_key(self) -> str | None:
        return self.items[self.pos][1][0] if self.pos < len(self.items) else None

    def end(self) -> None:
        if self.pos < len(self.items):
            raise ParseError(f"unexpected trailing content '{' '.join(self.items[self.pos][1])}'", self.line)

    def fail(self, message: str) -> ParseError:
        return ParseError(message, self.items[self.pos - 1][0] if self.pos else self.line)


def _int(tok: str, lines: _Lines) -> int:
    try:
        return int(tok)
    except ValueError:
        raise lines.fail(f"expected an integer, got '{tok}'") from None


def _weight(tok: str, lines: _Lines) -> int:
    if tok == "inf":
        return INF
    w = _int(tok, lines)
    if w < 0:
        raise lines.fail("weights must be non-negative")
    return w


def _fmt_w(w: int) -> str:
    return "inf" if w >= INF else str(w)


def _header(lines: _Lines, tag: str) -> None:
    toks = lines.next(f"'{tag} {VERSION}' header")
    if toks[0] != tag:
        raise lines.fail(f"expected a {tag} file, got '{toks[0]}'")
    if len(toks) != 2 or _int(toks[1], lines) != VERSION:
        raise lines.fail(f"unsupported {tag} version '{' '.join(toks[1:])}'")


def _rows(lines: _Lines, key: str, width: int, conv: Callable[[str, _Lines], int] = _int) -> list[list[int]]:
    (count,) = lines.keyed(key)
    out = []
    for _ in range(_int(count, lines)):
        toks = lines.next(f"a {key} line")
        if len(toks) != width:
            raise lines.fail(f"{key} lines need {width} values")
        out.append([conv(t, lines) if i == width - 1 else _int(t, lines) for i, t in enumerate(toks)])
    return out


def _guard(lines: _Lines, build: Callable):
    try:
        return build()
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc), lines.line) from None


# ---------------------------------------------------------------------------
# EE and EEA


def _parse_ee_body(lines: _Lines) -> EEInstance:
    (n,) = lines.keyed("vertices")
    n = _int(n, lines)
    arcs = [tuple(r) for r in _rows(lines, "arcs", 2)]
    weights = {(u, v): w for u, v, w in _rows(lines, "weights", 3, _weight)}
    default = INF
    if lines.peek_key() == "default-weight":
        (tok,) = lines.keyed("default-weight")
        default = _weight(tok, lines)
    (omega,) = lines.keyed("omega-max")
    omega = _int(omega, lines)

    def build() -> EEInstance:
        g = DirectedMultigraph(n, tuple(arcs))
        for u, v in weights:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"weight for ({u},{v}) names an unknown vertex")
        return EEInstance.build(g, weights, omega, default)

    return _guard(lines, build)


def parse_ee(text: str) -> EEInstance:
    lines = _Lines(text)
    _header(lines, "EE")
    inst = _parse_ee_body(lines)
    lines.end()
    return inst


def _render_ee_body(inst: EEInstance) -> list[str]:
    out = [f"vertices {inst.n}", f"arcs {inst.graph.m}"]
    out += [f"{u} {v}" for u, v in inst.graph.arcs]
    finite = [(u, v, inst.w(u, v)) for u in range(inst.n) for v in range(inst.n) if inst.w(u, v) < INF]
    out.append(f"weights {len(finite)}")
    out += [f"{u} {v} {w}" for u, v, w in finite]
    out.append(f"omega-max {inst.omega_max}")
    return out


def render_ee(inst: EEInstance) -> str:
    return "\n".join([f"EE {VERSION}"] + _render_ee_body(inst)) + "\n"


def parse_eea(text: str) -> EEAInstance:
    """EE body followed by ``hints h`` and lines ``path a b ...`` or
    ``cycle a b ... a`` over component ids (numbered by smallest vertex)."""
    lines = _Lines(text)
    _header(lines, "EEA")
    base = _parse_ee_body(lines)
    (count,) = lines.keyed("hints")
    hints = []
    for _ in range(_int(count, lines)):
        toks = lines.next("a hint line")
        if toks[0] not in (PATH, CYCLE):
            raise lines.fail(f"hint kind must be '{PATH}' or '{CYCLE}'")
        hints.append(Hint(toks[0], tuple(_int(t, lines) for t in toks[1:])))
    lines.end()
    return _guard(lines, lambda: EEAInstance(base, tuple(hints)))


def render_eea(inst: EEAInstance) -> str:
    out = [f"EEA {VERSION}"] + _render_ee_body(inst.base) + [f"hints {len(inst.advice)}"]
    out += [" ".join([h.kind] + [str(x) for x in h.seq]) for h in inst.advice]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# CBM


def parse_cbm(text: str) -> CBMInstance:
    lines = _Lines(text)
    _header(lines, "CBM")
    (L,) = lines.keyed("v1")
    (R,) = lines.keyed("v2")
    L, R = _int(L, lines), _int(R, lines)
    edges = [tuple(r) for r in _rows(lines, "edges", 3, _weight)]
    (k,) = lines.keyed("cells")
    left = [_int(t, lines) for t in lines.keyed("left", L)]
    right = [_int(t, lines) for t in lines.keyed("right", R)]
    joins = [tuple(r) for r in _rows(lines, "joins", 2)]
    (omega,) = lines.keyed("omega-max")
    lines.end()
    return _guard(
        lines,
        lambda: CBMInstance(L, R, tuple(edges), tuple(left + right), _int(k, lines), tuple(joins), _int(omega, lines)),
    )


def render_cbm(inst: CBMInstance) -> str:
    L = inst.left_count
    out = [f"CBM {VERSION}", f"v1 {L}", f"v2 {inst.right_count}", f"edges {len(inst.edges)}"]
    out += [f"{i} {j} {_fmt_w(w)}" for i, j, w in inst.edges]
    out.append(f"cells {inst.num_cells}")
    out.append(" ".join(["left"] + [str(c) for c in inst.cell_of[:L]]))
    out.append(" ".join(["right"] + [str(c) for c in inst.cell_of[L:]]))
    out.append(f"joins {len(inst.joins)}")
    out += [f"{a} {b}" for a, b in inst.joins]
    out.append(f"omega-max {inst.omega_max}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# SSC


def parse_ssc(text: str) -> SSCInstance:
    lines = _Lines(text)
    _header(lines, "SSC")
    (c,) = lines.keyed("colors")
    (k,) = lines.keyed("switches")
    switches = []
    for _ in range(_int(k, lines)):
        (p,) = lines.keyed("switch")
        positions = []
        for _ in range(_int(p, lines)):
            toks = lines.keyed("pos", None)
            positions.append(tuple(_int(t, lines) for t in toks))
        switches.append(tuple(positions))
    lines.end()
    return _guard(lines, lambda: SSCInstance(_int(c, lines), tuple(switches)))


def render_ssc(inst: SSCInstance) -> str:
    out = [f"SSC {VERSION}", f"colors {inst.color_count}", f"switches {inst.k}"]
    for s in inst.switches:
        out.append(f"switch {len(s)}")
        out += [" ".join(["pos"] + [str(x) for x in pos]) for pos in s]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# RP, 2DEE, HC, CNF


def parse_rp(text: str) -> RPInstance:
    lines = _Lines(text)
    _header(lines, "RP")
    (n,) = lines.keyed("vertices")
    arcs = {(u, v): w for u, v, w in _rows(lines, "arcs", 3, _weight)}
    required = [tuple(r) for r in _rows(lines, "required", 2)]
    (omega,) = lines.keyed("omega-max")
    lines.end()
    return _guard(lines, lambda: RPInstance(_int(n, lines), arcs, tuple(required), _int(omega, lines)))


def render_rp(inst: RPInstance) -> str:
    out = [f"RP {VERSION}", f"vertices {inst.n}", f"arcs {len(inst.weights)}"]
    out += [f"{u} {v} {w}" for (u, v), w in inst.weights.items()]
    out.append(f"required {len(inst.required)}")
    out += [f"{u} {v}" for u, v in inst.required]
    out.append(f"omega-max {inst.omega_max}")
    return "\n".join(out) + "\n"


def parse_2dee(text: str) -> PlanarEEInstance:
    lines = _Lines(text)
    _header(lines, "2DEE")
    points = [tuple(r) for r in _rows(lines, "points", 2)]
    arcs = [tuple(r) for r in _rows(lines, "arcs", 2)]
    (budget,) = lines.keyed("budget")
    lines.end()
    return _guard(
        lines,
        lambda: PlanarEEInstance(tuple(points), DirectedMultigraph(len(points), tuple(arcs)), _int(budget, lines)),
    )


def render_2dee(inst: PlanarEEInstance) -> str:
    out = [f"2DEE {VERSION}", f"points {len(inst.points)}"]
    out += [f"{x} {y}" for x, y in inst.points]
    out.append(f"arcs {inst.graph.m}")
    out += [f"{u} {v}" for u, v in inst.graph.arcs]
    out.append(f"budget {inst.extension_budget}")
    return "\n".join(out) + "\n"


def parse_hc(text: str) -> tuple[int, tuple[Arc, ...]]:
    lines = _Lines(text)
    _header(lines, "HC")
    (n,) = lines.keyed("vertices")
    arcs = tuple(sorted({tuple(r) for r in _rows(lines, "arcs", 2)}))
    lines.end()
    return _int(n, lines), arcs  # type: ignore[return-value]


def render_hc(n: int, arcs: Sequence[Arc]) -> str:
    body = sorted(set(arcs))
    return "\n".join([f"HC {VERSION}", f"vertices {n}", f"arcs {len(body)}"] + [f"{u} {v}" for u, v in body]) + "\n"


def parse_cnf(text: str) -> CNF:
    """DIMACS: comment lines start with ``c``, then ``p cnf n m`` and
    clauses terminated by ``0``."""
    header: tuple[int, int] | None = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for no, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split()
        if not toks or toks[0] == "c" or toks[0].startswith("%"):
            continue
        if toks[0] == "p":
            if header is not None or len(toks) != 4 or toks[1] != "cnf":
                raise ParseError("malformed 'p cnf n m' line", no)
            try:
                header = (int(toks[2]), int(toks[3]))
            except ValueError:
                raise ParseError("malformed 'p cnf n m' line", no) from None
            continue
        if header is None:
            raise ParseError("clause before the 'p cnf' header", no)
        for t in toks:
            try:
                x = int(t)
            except ValueError:
                raise ParseError(f"expected a literal, got '{t}'", no) from None
            if x == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(x)
    if header is None:
        raise ParseError("missing 'p cnf' header")
    if current:
        clauses.append(tuple(current))
    if len(clauses) != header[1]:
        raise ParseError(f"header announces {header[1]} clauses, found {len(clauses)}")
    try:
        return CNF(header[0], tuple(clauses))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def render_cnf(phi: CNF) -> str:
    out = [f"p cnf {phi.num_vars} {len(phi.clauses)}"]
    out += [" ".join(str(x) for x in c) + (" 0" if c else "0") for c in phi.clauses]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# certificates and dispatch


def parse_pairs(text: str) -> tuple[tuple[int, int], ...]:
    """Arc or edge list, one ``a b`` pair per line."""
    lines = _Lines(text)
    out = []
    while lines.peek_key() is not None:
        toks = lines.next("a pair")
        if len(toks) != 2:
            raise lines.fail("expected two integers")
        out.append((_int(toks[0], lines), _int(toks[1], lines)))
    return tuple(out)


def render_pairs(pairs: Sequence[tuple[int, int]]) -> str:
    return "".join(f"{a} {b}\n" for a, b in pairs)


def parse_choice(text: str) -> tuple[int, ...]:
    lines = _Lines(text)
    out = []
    while lines.peek_key() is not None:
        toks = lines.next("an index")
        if len(toks) != 1:
            raise lines.fail("expected one index per line")
        out.append(_int(toks[0], lines))
    return tuple(out)


def render_choice(choice: Sequence[int]) -> str:
    return "".join(f"{j}\n" for j in choice)


PARSERS: dict[str, Callable[[str], object]] = {
    "EE": parse_ee,
    "EEA": parse_eea,
    "CBM": parse_cbm,
    "SSC": parse_ssc,
    "RP": parse_rp,
    "2DEE": parse_2dee,
    "HC": parse_hc,
}


def sniff(text: str) -> str:
    """Format tag of an instance file; ``CNF`` for DIMACS input."""
    for raw in text.splitlines():
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        if toks[0] in ("c", "p"):
            return "CNF"
        return toks[0]
    raise ParseError("empty input")


def parse_any(text: str) -> tuple[str, object]:
    tag = sniff(text)
    if tag == "CNF":
        return tag, parse_cnf(text)
    if tag not in PARSERS:
        raise ParseError(f"unknown format tag '{tag}'", 1)
    return tag, PARSERS[tag](text)


def render_any(obj: object) -> str:
    if isinstance(obj, EEAInstance):
        return render_eea(obj)
    if isinstance(obj, EEInstance):
        return render_ee(obj)
    if isinstance(obj, CBMInstance):
        return render_cbm(obj)
    if isinstance(obj, SSCInstance):
        return render_ssc(obj)
    if isinstance(obj, RPInstance):
        return render_rp(obj)
    if isinstance(obj, PlanarEEInstance):
        return render_2dee(obj)
    if isinstance(obj, CNF):
        return render_cnf(obj)
    raise TypeError(f"no text format for {type(obj).__name__}")


def iter_blocks(text: str) -> Iterator[str]:
    """Split a stream holding several instances at each header line."""
    block: list[str] = []
    for raw in text.splitlines():
        toks = raw.split("#", 1)[0].split()
        if toks and toks[0] in PARSERS and len(toks) == 2 and block and any(
            b.split("#", 1)[0].split() for b in block
        ):
            yield "\n".join(block) + "\n"
            block = []
        block.append(raw)
    if any(b.split("#", 1)[0].split() for b in block):
        yield "\n".join(block) + "\n"
