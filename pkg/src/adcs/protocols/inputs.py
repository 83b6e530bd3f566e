"""Fixed-width encoding of the messages nodes exchange in all-to-all."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..exactmath import ceil_log2


def message_width(n: int) -> int:
    """ceil(log2 n) bits, at least one."""
    if n < 2:
        raise ValueError("need n >= 2")
    return max(1, ceil_log2(n))


@dataclass(frozen=True, order=True)
class InputMessage:
    bits: str

    def __post_init__(self) -> None:
        if not self.bits or set(self.bits) - {"0", "1"}:
            raise ValueError(f"not a bit string: {self.bits!r}")

    @property
    def width(self) -> int:
        return len(self.bits)

    @property
    def value(self) -> int:
        return int(self.bits, 2)

    @classmethod
    def canonical(cls, raw: int | str, n: int) -> InputMessage:
        """Encode an int or bit string at width ceil(log2 n).

        Ints and strings of exactly that width map directly. Shorter strings
        are length-prefixed (shortlex rank, so "1" and "01" differ) before
        zero padding.
        """
        w = message_width(n)
        if isinstance(raw, bool):
            raw = int(raw)
        if isinstance(raw, int):
            code = raw
        else:
            s = str(raw)
            if s and not set(s) - {"0", "1"} and len(s) == w:
                return cls(s)
            if set(s) - {"0", "1"}:
                raise ValueError(f"not a bit string: {s!r}")
            code = int("1" + s, 2) - 1
        if not 0 <= code < 1 << w:
            raise ValueError(f"{raw!r} does not fit in {w} bits")
        return cls(format(code, f"0{w}b"))


def canonicalize_all(raws: Sequence[int | str], n: int) -> list[InputMessage]:
    """Canonicalize a whole input vector, refusing encodings that merge distinct inputs."""
    out = [InputMessage.canonical(r, n) for r in raws]
    seen: dict[InputMessage, int | str] = {}
    for raw, msg in zip(raws, out):
        prior = seen.setdefault(msg, raw)
        if prior != raw:
            raise ValueError(f"inputs {prior!r} and {raw!r} collide at width {msg.width}")
    return out


def histogram(messages: Iterable[InputMessage]) -> dict[str, int]:
    return dict(sorted(Counter(m.bits for m in messages).items(), reverse=True))
