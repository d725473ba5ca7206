"""Base fields: Milnor K-theory and l-adic / mod-l motivic cohomology.

A bidegree ``m + n·α`` of motivic cohomology ``π_{m+nα} MZ_l`` is the étale
group ``H^c(k; Z_l(j))`` with ``c = -m - n`` and ``j = -n``. Everything here is
phrased in the ``(m, n)`` coordinates that chart assembly uses.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass
from typing import Mapping

from sympy import factorint, isprime

from .abgrp import (FG, KM, FgModule, GroupExpr, Opaque, ZZ, ell_part, fg,
                    expr_tensor_cyclic, expr_tor_cyclic, valuation, zl)
from .errors import CharacteristicError, ParseError, UnknownCohomologyError


class CdStatus(enum.Enum):
    LOW_DIM = "LowDim"
    NOT_LOW_DIM = "NotLowDim"
    EQUALS_CHAR = "EqualsChar"


def prime_power(q: int) -> tuple[int, int]:
    """``(p, f)`` with ``q = p**f``; raises ValueError otherwise."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    fac = factorint(q)
    if len(fac) != 1:
        raise ValueError(f"{q} is not a prime power")
    (p, f), = fac.items()
    return p, f


class Field:
    """Common interface; concrete variants are frozen dataclasses below."""

    kind = ""
    chart_capable = True

    @property
    def characteristic(self) -> int:
        raise NotImplementedError

    def exp_char(self) -> int:
        return self.characteristic or 1

    def cd(self, ell: int) -> int:
        raise NotImplementedError

    def milnor_k(self, i: int, m: int = 0) -> GroupExpr:
        raise NotImplementedError

    def cohomology(self, c: int, j: int, ell: int) -> GroupExpr | None:
        """Built-in ``H^c(k; Z_l(j))`` inside the vanishing window, None if unknown."""
        raise NotImplementedError

    def contains_mu(self, ell: int) -> bool | None:
        """Whether the l-th roots of unity lie in k (None: not determined)."""
        raise NotImplementedError

    def spec_string(self) -> str:
        raise NotImplementedError

    def describe(self) -> str:
        return self.spec_string()

    def _degree0(self, m: int) -> GroupExpr:
        return fg(m)


def _units_mod(m: int, *cyclic_orders: int) -> list[int]:
    return [math.gcd(m, d) for d in cyclic_orders]


@dataclass(frozen=True)
class AlgClosed(Field):
    p: int = 1
    kind = "algclosed"

    def __post_init__(self):
        if self.p == 0:
            object.__setattr__(self, "p", 1)
        if self.p != 1 and not isprime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")

    @property
    def characteristic(self):
        return 0 if self.p == 1 else self.p

    def cd(self, ell):
        return 0

    def milnor_k(self, i, m=0):
        if i == 0:
            return self._degree0(m)
        if m == 0:
            label = "k×" if i == 1 else f"K^M_{i}(k)"
            return GroupExpr.of(Opaque(label, "divisible, not finitely generated"))
        return GroupExpr.zero()

    def cohomology(self, c, j, ell):
        return fg(0, ring=zl(ell)) if c == 0 else GroupExpr.zero()

    def contains_mu(self, ell):
        return True

    def spec_string(self):
        return f"algclosed:p={0 if self.p == 1 else self.p}"


@dataclass(frozen=True)
class Finite(Field):
    q: int
    kind = "finite"

    def __post_init__(self):
        prime_power(self.q)

    @property
    def characteristic(self):
        return prime_power(self.q)[0]

    def cd(self, ell):
        return 1

    def milnor_k(self, i, m=0):
        if i == 0:
            return self._degree0(m)
        if i == 1:
            return fg(math.gcd(self.q - 1, m) if m else self.q - 1)
        return GroupExpr.zero()

    def cohomology(self, c, j, ell):
        r = zl(ell)
        if c == 0:
            return fg(0, ring=r) if j == 0 else GroupExpr.zero()
        if c == 1:
            return fg(ell_part(self.q**j - 1, ell), ring=r)
        return GroupExpr.zero()

    def contains_mu(self, ell):
        return (self.q - 1) % ell == 0

    def spec_string(self):
        return f"Fq={self.q}"


@dataclass(frozen=True)
class LocalPosChar(Field):
    """A local field of characteristic p with residue field F_q."""

    q: int
    kind = "localpos"

    def __post_init__(self):
        prime_power(self.q)

    @property
    def characteristic(self):
        return prime_power(self.q)[0]

    def cd(self, ell):
        return 2

    def milnor_k(self, i, m=0):
        p = self.characteristic
        if i == 0:
            return self._degree0(m)
        if m == 0 or m % p == 0:
            return GroupExpr.of(Opaque(
                f"K^M_{i}(k)" + (f"/{m}" if m else ""),
                "contains the non-finitely-generated (Z_p)^N part of the units"))
        if i == 1:
            return fg(*_units_mod(m, 0, self.q - 1))
        if i == 2:
            return fg(math.gcd(self.q - 1, m))
        return GroupExpr.zero()

    def cohomology(self, c, j, ell):
        r = zl(ell)
        if c == 0:
            return fg(0, ring=r) if j == 0 else GroupExpr.zero()
        if (c, j) == (1, 1):
            return fg(0, ell_part(self.q - 1, ell), ring=r)
        if (c, j) == (2, 2):
            return fg(ell_part(self.q - 1, ell), ring=r)
        return None

    def contains_mu(self, ell):
        return (self.q - 1) % ell == 0

    def spec_string(self):
        return f"localpos:q={self.q}"


@dataclass(frozen=True)
class LocalCharZero(Field):
    """Finite extension of Q_l0: residue field F_q, degree d, mu_{l0^inf} = mu_{l0^a}, n roots of unity."""

    l0: int
    q: int
    d: int
    a: int
    n: int
    kind = "local"

    def __post_init__(self):
        p, _ = prime_power(self.q)
        if p != self.l0:
            raise ValueError(f"residue order {self.q} is not a power of {self.l0}")
        if self.d < 1 or self.a < 0 or self.n < 1:
            raise ValueError("need d >= 1, a >= 0, n >= 1")
        if self.n % (self.q - 1) or self.n % self.l0**self.a:
            raise ValueError("n must be divisible by q-1 and by l0^a")

    @property
    def characteristic(self):
        return 0

    def cd(self, ell):
        return 2

    def milnor_k(self, i, m=0):
        if i == 0:
            return self._degree0(m)
        if i == 1:
            if m == 0:
                return (fg(0, self.q - 1, self.l0**self.a)
                        + fg(*([0] * self.d), ring=zl(self.l0)))
            wild = ell_part(m, self.l0)
            return fg(*_units_mod(m, 0, self.q - 1, self.l0**self.a), *([wild] * self.d))
        if m == 0:
            return GroupExpr.of(Opaque(
                f"K^M_{i}(k)", "torsion plus a uniquely divisible part"))
        if i == 2:
            return fg(math.gcd(self.n, m))
        return GroupExpr.zero()

    def cohomology(self, c, j, ell):
        r = zl(ell)
        if c == 0:
            return fg(0, ring=r) if j == 0 else GroupExpr.zero()
        if (c, j) == (1, 1):
            cyc = [0, ell_part(self.q - 1, ell)]
            if ell == self.l0:
                cyc += [ell_part(self.l0**self.a, ell)] + [0] * self.d
            return fg(*cyc, ring=r)
        if (c, j) == (2, 2):
            return fg(ell_part(self.n, ell), ring=r)
        return None

    def contains_mu(self, ell):
        return self.n % ell == 0

    def spec_string(self):
        return f"local:l0={self.l0},q={self.q},d={self.d},a={self.a},n={self.n}"


class _SymbolicGlobal(Field):
    def cd(self, ell):
        return 2

    def milnor_k(self, i, m=0):
        if i == 0:
            return self._degree0(m)
        if i in (1, 2):
            return GroupExpr.of(KM(i, m))
        # Bass-Tate: K^M_i vanishes for i >= 3 without real places
        return GroupExpr.zero()

    def cohomology(self, c, j, ell):
        if c == 0:
            return fg(0, ring=zl(ell)) if j == 0 else GroupExpr.zero()
        if c == j:
            # l-completed Milnor K-groups, kept symbolic
            return GroupExpr.of(KM(c, 0))
        return None


@dataclass(frozen=True)
class NumberFieldNonreal(_SymbolicGlobal):
    r2: int = 1
    kind = "numberfield"

    def __post_init__(self):
        if self.r2 < 0:
            raise ValueError("r2 must be non-negative")

    @property
    def characteristic(self):
        return 0

    def contains_mu(self, ell):
        return True if ell == 2 else None

    def spec_string(self):
        return f"numberfield:r2={self.r2}"


@dataclass(frozen=True)
class FunctionFieldOverFinite(_SymbolicGlobal):
    """The rational function field F_q(T)."""

    q: int
    kind = "funcfield"
    chart_capable = False

    def __post_init__(self):
        prime_power(self.q)

    @property
    def characteristic(self):
        return prime_power(self.q)[0]

    def contains_mu(self, ell):
        return (self.q - 1) % ell == 0

    def spec_string(self):
        return f"funcfield:q={self.q}"

    def describe(self):
        return (f"{self.spec_string()} (K^M_2(k) ≅ ⊕_𝔭 (F[T]/𝔭)^×, "
                "sum over monic irreducibles)")


FieldDescriptor = Field

BUILTIN_EXAMPLES = (
    Finite(5), Finite(9), AlgClosed(1), AlgClosed(3),
    LocalCharZero(5, 5, 1, 0, 4), LocalCharZero(3, 3, 1, 1, 6),
    LocalCharZero(2, 2, 2, 2, 4), LocalPosChar(25),
    NumberFieldNonreal(1), FunctionFieldOverFinite(4),
)


# --- parsing -----------------------------------------------------------------

_KEYS = {
    "algclosed": ("p",),
    "local": ("l0", "q", "d", "a", "n"),
    "localpos": ("q",),
    "numberfield": ("r2",),
    "funcfield": ("q",),
    "finite": ("q",),
}
_CLASSES = {
    "algclosed": AlgClosed, "local": LocalCharZero, "localpos": LocalPosChar,
    "numberfield": NumberFieldNonreal, "funcfield": FunctionFieldOverFinite,
    "finite": Finite,
}


def parse_field(text: str) -> Field:
    """Parse ``Fq=9``, ``algclosed:p=0``, ``local:l0=5,q=5,d=1,a=0,n=4`` and friends.

    >>> parse_field("Fq=9")
    Finite(q=9)
    >>> parse_field("local:l0=5,q=5,d=1,a=0,n=4").milnor_k(2, 24).render()
    'Z/4'
    """
    raw = text
    text = text.strip()
    offset = len(raw) - len(raw.lstrip())
    m = re.fullmatch(r"Fq\s*=\s*(\d+)", text)
    if m:
        return _build(Finite, {"q": int(m.group(1))}, raw, offset + 3)
    kind, sep, rest = text.partition(":")
    if kind not in _KEYS:
        raise ParseError(f"unknown field kind {kind!r}", raw, offset)
    if not sep:
        raise ParseError("expected ':' after field kind", raw, offset + len(kind))
    values = {}
    pos = offset + len(kind) + 1
    for item in rest.split(","):
        key, eq, val = item.partition("=")
        key = key.strip()
        if not eq or key not in _KEYS[kind]:
            raise ParseError(f"unexpected parameter {key!r} for {kind}", raw, pos)
        if key in values:
            raise ParseError(f"duplicate parameter {key!r}", raw, pos)
        try:
            values[key] = int(val)
        except ValueError:
            raise ParseError(f"parameter {key!r} needs an integer", raw,
                             pos + len(item) - len(val)) from None
        pos += len(item) + 1
    missing = [k for k in _KEYS[kind] if k not in values]
    if missing:
        raise ParseError(f"missing parameter(s) {', '.join(missing)}", raw, len(raw))
    return _build(_CLASSES[kind], values, raw, offset)


def _build(cls, values, raw, pos):
    try:
        return cls(**values)
    except ValueError as exc:
        raise ParseError(str(exc), raw, pos) from None


# --- queries -------------------------------------------------------------------


def exp_char(f: Field) -> int:
    return f.exp_char()


def cd_check(f: Field, ell: int) -> CdStatus:
    if not isprime(ell):
        raise ValueError(f"{ell} is not prime")
    if f.characteristic == ell:
        return CdStatus.EQUALS_CHAR
    return CdStatus.LOW_DIM if f.cd(ell) <= 2 else CdStatus.NOT_LOW_DIM


def milnor_k(f: Field, i: int, m: int = 0) -> GroupExpr:
    if i < 0 or m < 0:
        raise ValueError("degree and modulus must be non-negative")
    if m == 1:
        return GroupExpr.zero()
    return f.milnor_k(i, m)


class CohomTable(Mapping):
    """User overrides ``(l, m, n) -> GroupExpr`` for l-adic motivic cohomology."""

    def __init__(self, entries: Mapping[tuple[int, int, int], GroupExpr] = ()):
        self._entries = dict(entries)
        for (ell, m, n), value in self._entries.items():
            c = -m - n
            if (m < 0 or c < 0 or c > 2) and not value.is_zero:
                raise ValueError(f"entry ({ell},{m},{n}) lies in the vanishing range")

    def __getitem__(self, key):
        return self._entries[key]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    @classmethod
    def from_json(cls, data: dict | str) -> CohomTable:
        if isinstance(data, str):
            data = json.loads(data)
        entries = {}
        for key, value in data.items():
            ell, m, n = (int(x) for x in key.split(","))
            entries[(ell, m, n)] = GroupExpr.from_json(value)
        return cls(entries)

    def to_json(self) -> dict:
        return {f"{l},{m},{n}": v.to_json() for (l, m, n), v in self._entries.items()}


def _check_ell(f: Field, ell: int):
    if f.characteristic == ell:
        raise CharacteristicError(f"l = {ell} equals the characteristic of {f.spec_string()}")


def mot_cohom_zl(f: Field, m: int, n: int, ell: int,
                 override: CohomTable | None = None) -> GroupExpr:
    """``π_{m+nα} MZ_l = H^{-m-n}(k; Z_l(-n))``; raises UnknownCohomologyError."""
    _check_ell(f, ell)
    c = -m - n
    if m < 0 or c < 0 or c > f.cd(ell):
        return GroupExpr.zero()
    if override is not None and (ell, m, n) in override:
        return override[(ell, m, n)]
    value = f.cohomology(c, -n, ell)
    if value is None:
        raise UnknownCohomologyError(
            f"H^{c}(k; Z_{ell}({-n})) is not known for {f.spec_string()}")
    return value


def try_mot_cohom_zl(f, m, n, ell, override=None) -> GroupExpr | None:
    try:
        return mot_cohom_zl(f, m, n, ell, override)
    except UnknownCohomologyError:
        return None


def bockstein_split(f: Field, ell: int, n: int, m: int = 1,
                    override: CohomTable | None = None):
    """Pieces ``(Z/l ⊗ π_{m+nα} MZ_l, Tor(Z/l, π_{m-1+nα} MZ_l))`` of ``π_{m+nα} MF_l``."""
    upper = mot_cohom_zl(f, m, n, ell, override)
    lower = mot_cohom_zl(f, m - 1, n, ell, override)
    return expr_tensor_cyclic(upper, ell), expr_tor_cyclic(lower, ell)


def mot_cohom_fl(f: Field, m: int, n: int, ell: int,
                 override: CohomTable | None = None) -> GroupExpr:
    """``π_{m+nα} MF_l``: K^M_c/l times τ^m when the l-th roots of unity are present."""
    _check_ell(f, ell)
    c = -m - n
    if m < 0 or c < 0 or c > f.cd(ell):
        return GroupExpr.zero()
    if ell == 2 or f.contains_mu(ell):
        return milnor_k(f, c, ell)
    try:
        tens, tor = bockstein_split(f, ell, n, m, override)
    except UnknownCohomologyError:
        return GroupExpr.of(Opaque(f"H^{c}(k;μ_{ell}^⊗{-n})", "mod-l cohomology unknown"))
    if tens.is_explicit and tor.is_explicit:
        return tens + tor
    return GroupExpr.of(Opaque(f"H^{c}(k;μ_{ell}^⊗{-n})", "mod-l cohomology unknown"))
