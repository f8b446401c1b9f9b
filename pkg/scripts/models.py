"""Data models and configuration utilities for the pliable index coding solver."""

from __future__ import annotations

import yaml
from dataclasses import dataclass, field
from typing import ClassVar, Iterable

MAX_MESSAGES = 24  # hard limit; receivers are bitmasks over at most 24 bits


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class InstanceError(ValueError):
    """An instance, code or trace document violates its schema."""


class ChainError(ValueError):
    """A decoding-chain step is illegal, or a trace disagrees with its D."""


class CapExceededError(RuntimeError):
    """An exhaustive search was asked to run beyond its configured cap."""


# ---------------------------------------------------------------------------
# Bitmask helpers (message i <-> bit i-1)
# ---------------------------------------------------------------------------

def bit(message: int) -> int:
    return 1 << (message - 1)


def mask_of(members: Iterable[int]) -> int:
    """Return the bitmask of a collection of 1-based message indices."""
    mask = 0
    for i in members:
        mask |= bit(i)
    return mask


def members_of(mask: int) -> list[int]:
    """Return the sorted 1-based message indices of *mask*."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def smallest_missing(mask: int) -> int:
    """Smallest message index not in *mask*."""
    return (~mask & (mask + 1)).bit_length()


# ---------------------------------------------------------------------------
# Instances and chains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PliableInstance:
    """m messages plus the family of absent receivers (as bitmasks).

    Present receivers are never stored: a set H is present iff it is not
    absent and is not the full message set.
    """

    m: int
    absent: frozenset[int] = frozenset()

    def __post_init__(self):
        if not 1 <= self.m <= MAX_MESSAGES:
            raise InstanceError(
                f"m must be in [1:{MAX_MESSAGES}], got {self.m}"
            )
        object.__setattr__(self, "absent", frozenset(self.absent))
        full = self.full
        for h in self.absent:
            if h < 0 or h > full:
                raise InstanceError(
                    f"absent receiver {h:#x} uses a message outside [1:{self.m}]"
                )
            if h == full:
                raise InstanceError(f"[1:{self.m}] cannot be an absent receiver")

    @property
    def full(self) -> int:
        return (1 << self.m) - 1

    def is_absent(self, receiver: int) -> bool:
        return receiver in self.absent

    def is_present(self, receiver: int) -> bool:
        return receiver != self.full and receiver not in self.absent

    def sorted_absent(self) -> tuple[int, ...]:
        return tuple(sorted(self.absent))

    def present_receivers(self):
        """Yield present receivers in ascending bitmask order."""
        for h in range(self.full):
            if h not in self.absent:
                yield h

    def relabel(self, perm: tuple[int, ...]) -> "PliableInstance":
        """Apply ``perm`` (perm[i-1] is the new label of message i)."""
        return PliableInstance(
            self.m, frozenset(relabel_mask(h, perm) for h in self.absent)
        )

    def to_dict(self) -> dict:
        return {"m": self.m, "absent": [members_of(h) for h in self.sorted_absent()]}

    @classmethod
    def from_dict(cls, data: dict) -> "PliableInstance":
        return cls(m=data["m"], absent=frozenset(mask_of(s) for s in data["absent"]))


def relabel_mask(mask: int, perm: tuple[int, ...]) -> int:
    out = 0
    for i in members_of(mask):
        out |= bit(perm[i - 1])
    return out


@dataclass(frozen=True)
class NestedChain:
    """Absent receivers strictly increasing under inclusion."""

    links: tuple[int, ...] = ()

    def __post_init__(self):
        for lower, upper in zip(self.links, self.links[1:]):
            if lower & upper != lower or lower == upper:
                raise ValueError("chain links must be strictly nested")

    def __len__(self) -> int:
        return len(self.links)

    def to_dict(self) -> dict:
        return {"links": [members_of(h) for h in self.links]}


# ---------------------------------------------------------------------------
# Decoding choices and traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecodingChoice:
    """A partial map D from present receivers to a message they lack.

    With ``fallback="smallest"`` every unassigned receiver answers with its
    smallest missing message, which makes the choice total.
    """

    assignment: dict[int, int] = field(default_factory=dict)
    fallback: str | None = None

    VALID_FALLBACKS: ClassVar[tuple] = (None, "smallest")

    def __post_init__(self):
        if self.fallback not in self.VALID_FALLBACKS:
            raise ValueError(
                f"fallback must be one of {self.VALID_FALLBACKS}, got '{self.fallback}'"
            )
        object.__setattr__(self, "assignment", dict(self.assignment))
        for receiver, message in self.assignment.items():
            if message < 1 or receiver & bit(message):
                raise ValueError(
                    f"D({members_of(receiver)}) = {message} is already held"
                )

    def get(self, receiver: int) -> int | None:
        message = self.assignment.get(receiver)
        if message is None and self.fallback == "smallest":
            return smallest_missing(receiver)
        return message

    def decode(self, receiver: int) -> int:
        message = self.get(receiver)
        if message is None:
            raise ChainError(f"no decoding choice for receiver {members_of(receiver)}")
        return message

    def validate(self, inst: PliableInstance) -> None:
        """Raise ChainError unless every mapped receiver is present in *inst*."""
        for receiver, message in self.assignment.items():
            if not inst.is_present(receiver):
                raise ChainError(
                    f"D is defined on non-present receiver {members_of(receiver)}"
                )
            if message > inst.m:
                raise ChainError(f"D({members_of(receiver)}) = {message} > m")

    def to_dict(self) -> dict:
        return {
            "assignment": [
                {"receiver": members_of(h), "message": x}
                for h, x in sorted(self.assignment.items())
            ],
            "fallback": self.fallback,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecodingChoice":
        return cls(
            assignment={
                mask_of(entry["receiver"]): entry["message"]
                for entry in data.get("assignment", [])
            },
            fallback=data.get("fallback"),
        )


@dataclass(frozen=True)
class ChainStep:
    kind: str
    message: int
    via: int | None = None  # receiver whose decoding choice supplied the message

    VALID_KINDS: ClassVar[tuple] = ("decode", "skip", "avoid")

    def __post_init__(self):
        if self.kind not in self.VALID_KINDS:
            raise ValueError(
                f"kind must be one of {self.VALID_KINDS}, got '{self.kind}'"
            )
        if self.kind == "avoid" and self.via is None:
            raise ValueError("avoid steps need a via receiver")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "message": self.message,
            "via": None if self.via is None else members_of(self.via),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChainStep":
        via = data.get("via")
        return cls(data["kind"], data["message"], None if via is None else mask_of(via))


@dataclass(frozen=True)
class ChainTrace:
    """A completed decoding chain with its skipped messages and hits."""

    steps: tuple[ChainStep, ...]
    hits: tuple[int, ...] = ()

    @property
    def order(self) -> list[int]:
        return [s.message for s in self.steps]

    @property
    def skipped(self) -> list[int]:
        return sorted(s.message for s in self.steps if s.kind == "skip")

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "skipped": self.skipped,
            "hits": [members_of(h) for h in self.hits],
            "steps": [s.to_dict() for s in self.steps],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChainTrace":
        return cls(
            steps=tuple(ChainStep.from_dict(s) for s in data["steps"]),
            hits=tuple(mask_of(h) for h in data.get("hits", [])),
        )


# ---------------------------------------------------------------------------
# Partitions, codes and structure tags
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """P_0, P_1, ..., P_L as bitmasks. P_0 may be empty; the others may not."""

    m: int
    parts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if len(self.parts) < 2:
            raise ValueError("a partition needs P_0 and at least one more part")
        seen = 0
        for i, part in enumerate(self.parts):
            if i and not part:
                raise ValueError(f"P_{i} is empty")
            if seen & part:
                raise ValueError("partition parts overlap")
            seen |= part
        if seen != (1 << self.m) - 1:
            raise ValueError("partition parts do not cover [1:m]")

    @property
    def L(self) -> int:
        return len(self.parts) - 1

    def members(self, i: int) -> list[int]:
        return members_of(self.parts[i])

    def leader(self, i: int) -> int:
        """Z_{i,1}: the smallest message of P_i."""
        return members_of(self.parts[i])[0]

    def union(self, indices: Iterable[int]) -> int:
        """P_0 together with every P_i for i in *indices*."""
        mask = self.parts[0]
        for i in indices:
            mask |= self.parts[i]
        return mask

    def to_dict(self) -> dict:
        return {"parts": [members_of(p) for p in self.parts]}

    @classmethod
    def from_dict(cls, m: int, data: dict) -> "Partition":
        return cls(m, tuple(mask_of(p) for p in data["parts"]))


@dataclass(frozen=True)
class LinearCode:
    """An l x m generator matrix over GF(q), rows as coefficient tuples."""

    q: int
    m: int
    rows: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(int(c) for c in r) for r in self.rows))
        if self.q < 2:
            raise InstanceError(f"q must be a prime, got {self.q}")
        for row in self.rows:
            if len(row) != self.m:
                raise InstanceError(f"code row has {len(row)} entries, expected {self.m}")
            if any(c < 0 or c >= self.q for c in row):
                raise InstanceError(f"code coefficients must lie in [0:{self.q - 1}]")

    def __len__(self) -> int:
        return len(self.rows)

    def to_dict(self) -> dict:
        return {"q": self.q, "m": self.m, "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, data: dict, m: int | None = None) -> "LinearCode":
        try:
            rows = data["rows"]
            q = data["q"]
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"code document needs 'q' and 'rows': {exc}") from exc
        width = data.get("m", m)
        if width is None:
            if not rows:
                raise InstanceError("an empty code needs an explicit 'm'")
            width = len(rows[0])
        return cls(q=q, m=width, rows=tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class StructureClass:
    """Which closed-form family an absent-receiver family belongs to."""

    tag: str = "none"
    L: int | None = None
    T: int | None = None
    partition: Partition | None = None
    Q: tuple[int, ...] | None = None        # part indices of the shrunk receiver
    shrunk: int | None = None               # the strict subset replacing H_Q
    triple: tuple[int, int, int] | None = None

    VALID_TAGS: ClassVar[tuple] = (
        "none",
        "perfect_nested",
        "truncated_nested",
        "slightly_imperfect",
        "prop1_triple",
    )

    def __post_init__(self):
        if self.tag not in self.VALID_TAGS:
            raise ValueError(f"tag must be one of {self.VALID_TAGS}, got '{self.tag}'")

    def to_dict(self) -> dict:
        out: dict = {"tag": self.tag}
        if self.L is not None:
            out["L"] = self.L
        if self.T is not None:
            out["T"] = self.T
        if self.partition is not None:
            out["partition"] = self.partition.to_dict()["parts"]
        if self.Q is not None:
            out["Q"] = list(self.Q)
        if self.shrunk is not None:
            out["shrunk"] = members_of(self.shrunk)
        if self.triple is not None:
            out["triple"] = [members_of(h) for h in self.triple]
        return out


@dataclass
class BoundReport:
    """Lower bounds, closed form and best verified construction for one instance."""

    m: int
    lb_longest_chain: int
    lb_algorithmic: int | None = None
    lb_improved: int | None = None
    closed_form: int | None = None
    ub_construction: int | None = None
    beta_confirmed: int | None = None
    structure: StructureClass = field(default_factory=StructureClass)
    code: LinearCode | None = None

    def __post_init__(self):
        lower = [b for b in (self.lb_longest_chain, self.lb_algorithmic, self.lb_improved)
                 if b is not None]
        if self.ub_construction is not None and any(b > self.ub_construction for b in lower):
            raise ValueError(
                f"lower bound {max(lower)} exceeds construction length {self.ub_construction}"
            )

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "lb_longest_chain": self.lb_longest_chain,
            "lb_algorithmic": self.lb_algorithmic,
            "lb_improved": self.lb_improved,
            "closed_form": self.closed_form,
            "ub_construction": self.ub_construction,
            "beta_confirmed": self.beta_confirmed,
            "structure": self.structure.to_dict(),
            "code": None if self.code is None else self.code.to_dict(),
        }


@dataclass
class SweepRecord:
    """One canonical instance of the closed-form verification sweep."""

    m: int
    absent: tuple[int, ...]
    lb_chain: int
    lb_algo: int
    closed_form: int | None
    oracle_len: int | None
    oracle_q: int
    structure: str = "none"
    subfamily: bool = False  # some subfamily is perfect 2-nested or 1-truncated 3-nested

    CSV_COLUMNS: ClassVar[tuple] = (
        "canonical_absent", "n_absent", "lb_chain", "lb_algo",
        "closed_form", "oracle_len", "agree", "m", "oracle_q", "structure",
    )

    @property
    def n_absent(self) -> int:
        return len(self.absent)

    @property
    def agree(self) -> bool:
        if self.closed_form is None:
            return True
        return self.closed_form == self.oracle_len

    def canonical_absent(self) -> str:
        return ";".join(
            "{" + ",".join(str(i) for i in members_of(h)) + "}" for h in self.absent
        )

    def csv_row(self) -> dict:
        return {
            "canonical_absent": self.canonical_absent(),
            "n_absent": self.n_absent,
            "lb_chain": self.lb_chain,
            "lb_algo": self.lb_algo,
            "closed_form": "" if self.closed_form is None else self.closed_form,
            "oracle_len": "" if self.oracle_len is None else self.oracle_len,
            "agree": self.agree,
            "m": self.m,
            "oracle_q": self.oracle_q,
            "structure": self.structure,
        }

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "absent": [members_of(h) for h in self.absent],
            "n_absent": self.n_absent,
            "lb_chain": self.lb_chain,
            "lb_algo": self.lb_algo,
            "closed_form": self.closed_form,
            "oracle_len": self.oracle_len,
            "oracle_q": self.oracle_q,
            "structure": self.structure,
            "subfamily": self.subfamily,
            "agree": self.agree,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepRecord":
        return cls(
            m=data["m"],
            absent=tuple(mask_of(h) for h in data["absent"]),
            lb_chain=data["lb_chain"],
            lb_algo=data["lb_algo"],
            closed_form=data.get("closed_form"),
            oracle_len=data.get("oracle_len"),
            oracle_q=data["oracle_q"],
            structure=data.get("structure", "none"),
            subfamily=data.get("subfamily", False),
        )


def load_config(path: str) -> dict:
    """Read a YAML config file and return its contents as a dict."""
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}
