"""Structured UI actions, the 7-field discrete vector codec, and programs.

Vector layout is (c, x, y, k, n, s, v): command index plus the parameters of
exactly that command; every unused field is -1.  Continuous fields are binned
into 1000 classes (x, y over [0,1]; scroll and typed values over [-1,1] via
(v+1)/2); key index and press count are stored raw, capped at 999.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import MalformedVector, OutOfRange
from .uiprotocol import KEYS

CMD_MOVETO = 0
CMD_PRESSKEY = 1
CMD_SCROLL = 2
CMD_TYPE = 3
CMD_CLICK = 4

CMD_NAMES = ("MoveTo", "PressKey", "Scroll", "Type", "Click")

# Vector slots used by each command (slot 0 is the command itself).
_SLOTS = {
    CMD_MOVETO: (1, 2),
    CMD_PRESSKEY: (3, 4),
    CMD_SCROLL: (5,),
    CMD_TYPE: (6,),
    CMD_CLICK: (),
}

PARAM_COUNT = {CMD_MOVETO: 2, CMD_PRESSKEY: 2, CMD_SCROLL: 1, CMD_TYPE: 1, CMD_CLICK: 0}

N_BINS = 1000
UNUSED = -1


@dataclass(frozen=True)
class Action:
    cmd: int
    x: float = 0.0
    y: float = 0.0
    key: int = UNUSED
    count: int = UNUSED
    scroll: float = 0.0
    value: float = 0.0
    dt: float = 0.0


def move_to(x: float, y: float, dt: float = 0.0) -> Action:
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise OutOfRange(f"MoveTo coordinates ({x:.4f}, {y:.4f}) outside [0,1]^2")
    return Action(CMD_MOVETO, x=x, y=y, dt=dt)


def press_key(key: str, count: int = 1, dt: float = 0.0) -> Action:
    return Action(CMD_PRESSKEY, key=KEYS.index(key), count=count, dt=dt)


def scroll(amount: float, dt: float = 0.0) -> Action:
    if not -1.0 <= amount <= 1.0:
        raise OutOfRange(f"scroll amount {amount} outside [-1,1]")
    return Action(CMD_SCROLL, scroll=amount, dt=dt)


def type_value(value: float, dt: float = 0.0) -> Action:
    if not -1.0 <= value <= 1.0:
        raise OutOfRange(f"typed value {value} outside [-1,1]")
    return Action(CMD_TYPE, value=value, dt=dt)


def click(dt: float = 0.0) -> Action:
    return Action(CMD_CLICK, dt=dt)


def _bin_unit(v: float) -> int:
    return min(N_BINS - 1, int(v * N_BINS))


def _bin_signed(v: float) -> int:
    return min(N_BINS - 1, int((v + 1.0) / 2.0 * N_BINS))


def _unbin_unit(b: int) -> float:
    return (b + 0.5) / N_BINS


def _unbin_signed(b: int) -> float:
    return (b + 0.5) / N_BINS * 2.0 - 1.0


def encode_action(a: Action) -> tuple[int, ...]:
    vec = [a.cmd, UNUSED, UNUSED, UNUSED, UNUSED, UNUSED, UNUSED]
    if a.cmd == CMD_MOVETO:
        vec[1] = _bin_unit(a.x)
        vec[2] = _bin_unit(a.y)
    elif a.cmd == CMD_PRESSKEY:
        vec[3] = min(N_BINS - 1, a.key)
        vec[4] = min(N_BINS - 1, a.count)
    elif a.cmd == CMD_SCROLL:
        vec[5] = _bin_signed(a.scroll)
    elif a.cmd == CMD_TYPE:
        vec[6] = _bin_signed(a.value)
    elif a.cmd != CMD_CLICK:
        raise MalformedVector(f"unknown command {a.cmd}")
    return tuple(vec)


def decode_action(vec: tuple[int, ...] | list[int]) -> Action:
    """Inverse of encode_action up to bin centers; validates the -1 pattern."""
    if len(vec) != 7:
        raise MalformedVector(f"vector has {len(vec)} fields, expected 7")
    cmd = vec[0]
    if cmd not in _SLOTS:
        raise MalformedVector(f"unknown command index {cmd}")
    used = _SLOTS[cmd]
    for i in range(1, 7):
        if i in used:
            if not 0 <= vec[i] < N_BINS:
                raise MalformedVector(
                    f"{CMD_NAMES[cmd]}: field {i} = {vec[i]} outside [0, {N_BINS - 1}]")
        elif vec[i] != UNUSED:
            raise MalformedVector(
                f"{CMD_NAMES[cmd]}: field {i} = {vec[i]} must be unused (-1)")
    if cmd == CMD_MOVETO:
        return Action(cmd, x=_unbin_unit(vec[1]), y=_unbin_unit(vec[2]))
    if cmd == CMD_PRESSKEY:
        return Action(cmd, key=vec[3], count=vec[4])
    if cmd == CMD_SCROLL:
        return Action(cmd, scroll=_unbin_signed(vec[5]))
    if cmd == CMD_TYPE:
        return Action(cmd, value=_unbin_signed(vec[6]))
    return Action(cmd)


@dataclass
class ActionProgram:
    actions: list[Action] = field(default_factory=list)
    hl_events: list[tuple[int, str]] = field(default_factory=list)

    def append(self, action: Action, hl: str | None = None) -> int:
        self.actions.append(action)
        idx = len(self.actions) - 1
        if hl is not None:
            self.hl_events.append((idx, hl))
        return idx

    def tag_last(self, hl: str) -> None:
        self.hl_events.append((len(self.actions) - 1, hl))

    def to_jsonl(self) -> str:
        tags = dict(self.hl_events)
        lines = []
        for i, a in enumerate(self.actions):
            row: dict = {"i": i, "a": list(encode_action(a)), "dt": a.dt}
            if i in tags:
                row["hl"] = tags[i]
            lines.append(json.dumps(row, separators=(", ", ": ")))
        return "\n".join(lines) + "\n"


def parse_jsonl(text: str) -> list[dict]:
    """Rows of {'i', 'a', 'dt', 'hl'?}; vector patterns are validated."""
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        row = json.loads(line)
        decode_action(row["a"])
        rows.append(row)
    return rows
