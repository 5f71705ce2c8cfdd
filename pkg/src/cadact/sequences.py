"""Parse, validate, and summarize quantized sketch-extrude command sequences.

The on-disk grammar (`.cadseq`) is one sequence per line; `#` starts a comment
line.  A token is 17 comma-separated integers
``[t, x, y, alpha, f, r, theta, phi, gamma, px, py, pz, s, e1, e2, u, b]``
and tokens are separated by ``;``.  Unused fields carry the sentinel -1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DanglingLoop, EmptyInput, EmptySequence, MalformedToken

TOKEN_WIDTH = 17

CMD_LINE = 0
CMD_ARC = 1
CMD_CIRCLE = 2
CMD_LOOP_SEP = 4
CMD_EXTRUDE = 5

FIELD_NAMES = (
    "t", "x", "y", "alpha", "f", "r", "theta", "phi", "gamma",
    "px", "py", "pz", "s", "e1", "e2", "u", "b",
)

# Field indices (1-based within the 16 parameter slots, 0 is the code).
_X, _Y, _ALPHA, _F, _R = 1, 2, 3, 4, 5
_THETA, _PHI, _GAMMA, _PX, _PY, _PZ, _S, _E1, _E2, _U, _B = range(6, 17)

# Which parameter slots each command uses; everything else must be -1.
_USED = {
    CMD_LINE: {_X, _Y},
    CMD_ARC: {_X, _Y, _ALPHA, _F},
    CMD_CIRCLE: {_X, _Y, _R},
    CMD_LOOP_SEP: set(),
    CMD_EXTRUDE: {_THETA, _PHI, _GAMMA, _PX, _PY, _PZ, _S, _E1, _E2, _U, _B},
}


@dataclass(frozen=True)
class PrimitiveSpec:
    """One quantized sketch primitive."""

    kind: str  # "line" | "arc" | "circle"
    x: int
    y: int
    alpha: int = -1   # arc sweep
    f: int = -1       # arc direction flag
    r: int = -1       # circle radius


@dataclass(frozen=True)
class LoopSpec:
    primitives: tuple[PrimitiveSpec, ...]

    def is_circle_loop(self) -> bool:
        return len(self.primitives) == 1 and self.primitives[0].kind == "circle"


@dataclass(frozen=True)
class ExtrusionRecordRaw:
    """One sketch profile plus its quantized extrusion parameters."""

    loops: tuple[LoopSpec, ...]
    theta: int
    phi: int
    gamma: int
    px: int
    py: int
    pz: int
    s: int
    e1: int
    e2: int
    u: int  # 0 new, 1 remove, 2 union
    b: int  # 0 one-sided, 1 symmetric, 2 two-sided


@dataclass(frozen=True)
class CadSequence:
    records: tuple[ExtrusionRecordRaw, ...]
    source_id: str = "seq"


@dataclass
class ValidationReport:
    violations: list[tuple[int, str, str]] = field(default_factory=list)
    # (record index, code, message); record index -1 = sequence level

    def add(self, record: int, code: str, message: str) -> None:
        self.violations.append((record, code, message))

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass
class StatsTable:
    primitive_kinds: dict[str, int]
    loops_per_record: dict[int, int]
    records_per_sequence: dict[int, int]

    def csv_rows(self) -> list[str]:
        rows = ["table,key,count"]
        for name, hist in (
            ("primitive_kinds", self.primitive_kinds),
            ("loops_per_record", self.loops_per_record),
            ("records_per_sequence", self.records_per_sequence),
        ):
            for key in sorted(hist, key=str):
                rows.append(f"{name},{key},{hist[key]}")
        return rows


def _parse_token(text: str, pos: int) -> list[int]:
    fields = [p for chunk in text.split(",") for p in chunk.split()]
    if len(fields) != TOKEN_WIDTH:
        raise MalformedToken(f"token {pos}: expected {TOKEN_WIDTH} fields, got {len(fields)}")
    try:
        values = [int(p) for p in fields]
    except ValueError as exc:
        raise MalformedToken(f"token {pos}: non-integer field ({exc})") from None
    t = values[0]
    if t not in _USED:
        raise MalformedToken(f"token {pos}: unknown command code {t}")
    used = _USED[t]
    for i in range(1, TOKEN_WIDTH):
        v = values[i]
        if i in used:
            if not 0 <= v <= 255:
                raise MalformedToken(
                    f"token {pos}: field {FIELD_NAMES[i]}={v} outside [0, 255]"
                )
        elif v != -1:
            raise MalformedToken(
                f"token {pos}: unused field {FIELD_NAMES[i]}={v}, expected -1"
            )
    return values


def _primitive_from(values: list[int], pos: int) -> PrimitiveSpec:
    t = values[0]
    if t == CMD_LINE:
        return PrimitiveSpec("line", values[_X], values[_Y])
    if t == CMD_ARC:
        return PrimitiveSpec("arc", values[_X], values[_Y],
                             alpha=values[_ALPHA], f=values[_F])
    if t == CMD_CIRCLE:
        return PrimitiveSpec("circle", values[_X], values[_Y], r=values[_R])
    raise MalformedToken(f"token {pos}: code {t} is not a primitive")


def parse_sequence(text: str, source_id: str = "seq") -> CadSequence:
    """Parse one sequence (one logical line) into typed extrusion records."""
    body = text.split("#", 1)[0].strip()
    if not body:
        raise EmptySequence("no tokens")
    records: list[ExtrusionRecordRaw] = []
    loops: list[LoopSpec] = []
    current: list[PrimitiveSpec] = []
    for pos, raw in enumerate(t for t in body.split(";") if t.strip()):
        values = _parse_token(raw, pos)
        t = values[0]
        if t == CMD_LOOP_SEP:
            if not current:
                raise MalformedToken(f"token {pos}: loop separator closes an empty loop")
            loops.append(LoopSpec(tuple(current)))
            current = []
        elif t == CMD_EXTRUDE:
            if current:
                loops.append(LoopSpec(tuple(current)))
                current = []
            if not loops:
                raise MalformedToken(f"token {pos}: extrusion with no loops")
            records.append(ExtrusionRecordRaw(
                loops=tuple(loops),
                theta=values[_THETA], phi=values[_PHI], gamma=values[_GAMMA],
                px=values[_PX], py=values[_PY], pz=values[_PZ],
                s=values[_S], e1=values[_E1], e2=values[_E2],
                u=values[_U], b=values[_B],
            ))
            loops = []
        else:
            current.append(_primitive_from(values, pos))
    if current or loops:
        raise DanglingLoop("sketch tokens after the last extrusion token")
    if not records:
        raise EmptySequence("no records")
    return CadSequence(records=tuple(records), source_id=source_id)


def serialize_sequence(seq: CadSequence) -> str:
    """Inverse of parse_sequence (canonical form, single line)."""
    tokens: list[str] = []

    def tok(code: int, **kw: int) -> str:
        values = [-1] * TOKEN_WIDTH
        values[0] = code
        for name, v in kw.items():
            values[FIELD_NAMES.index(name)] = v
        return ",".join(str(v) for v in values)

    for rec in seq.records:
        for li, loop in enumerate(rec.loops):
            if li > 0:
                tokens.append(tok(CMD_LOOP_SEP))
            for p in loop.primitives:
                if p.kind == "line":
                    tokens.append(tok(CMD_LINE, x=p.x, y=p.y))
                elif p.kind == "arc":
                    tokens.append(tok(CMD_ARC, x=p.x, y=p.y, alpha=p.alpha, f=p.f))
                else:
                    tokens.append(tok(CMD_CIRCLE, x=p.x, y=p.y, r=p.r))
        tokens.append(tok(
            CMD_EXTRUDE,
            theta=rec.theta, phi=rec.phi, gamma=rec.gamma,
            px=rec.px, py=rec.py, pz=rec.pz, s=rec.s,
            e1=rec.e1, e2=rec.e2, u=rec.u, b=rec.b,
        ))
    return ";".join(tokens)


def parse_file_text(text: str, source_prefix: str = "seq") -> list[CadSequence]:
    """Parse a .cadseq file body: one sequence per line, '#' comments."""
    out: list[CadSequence] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        out.append(parse_sequence(stripped, source_id=f"{source_prefix}:{lineno:05d}"))
    return out


def validate(seq: CadSequence) -> ValidationReport:
    """Report per-record violations without mutating or raising."""
    report = ValidationReport()
    for ri, rec in enumerate(seq.records):
        if ri == 0 and rec.u != 0:
            report.add(ri, "first-op", "first op must be new (u=0)")
        if ri > 0 and rec.u == 0:
            report.add(ri, "op", "op=new only legal for record 0")
        if rec.u not in (0, 1, 2):
            report.add(ri, "range", f"u={rec.u} outside {{0,1,2}}")
        if rec.b not in (0, 1, 2):
            report.add(ri, "range", f"b={rec.b} outside {{0,1,2}}")
        if rec.s == 0:
            report.add(ri, "range", "sketch scale s must be positive")
        for li, loop in enumerate(rec.loops):
            kinds = [p.kind for p in loop.primitives]
            if "circle" in kinds and len(kinds) != 1:
                report.add(ri, "loop-arity", f"loop {li}: circle loop must be a single primitive")
            if "circle" not in kinds and len(kinds) < 2:
                report.add(ri, "loop-arity", f"loop {li}: line/arc loop needs >= 2 primitives")
            for p in loop.primitives:
                if p.kind == "arc":
                    if p.alpha < 1:
                        report.add(ri, "range", f"loop {li}: zero-sweep arc (alpha={p.alpha})")
                    if p.f not in (0, 1):
                        report.add(ri, "range", f"loop {li}: arc flag f={p.f} outside {{0,1}}")
                if p.kind == "circle" and p.r < 1:
                    report.add(ri, "range", f"loop {li}: circle radius r={p.r} < 1")
    return report


def sequence_stats(seqs: list[CadSequence]) -> StatsTable:
    """Histograms over primitive kinds, loops per record, records per sequence."""
    if not seqs:
        raise EmptyInput("no sequences")
    kinds: dict[str, int] = {}
    loops_hist: dict[int, int] = {}
    records_hist: dict[int, int] = {}
    for seq in seqs:
        records_hist[len(seq.records)] = records_hist.get(len(seq.records), 0) + 1
        for rec in seq.records:
            loops_hist[len(rec.loops)] = loops_hist.get(len(rec.loops), 0) + 1
            for loop in rec.loops:
                for p in loop.primitives:
                    kinds[p.kind] = kinds.get(p.kind, 0) + 1
    return StatsTable(kinds, loops_hist, records_hist)
