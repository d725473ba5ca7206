"""Finitely generated modules over Z and Z_l, plus symbolic group expressions.

Modules are stored in invariant-factor form, so two modules are isomorphic
exactly when they compare equal::

    >>> a = FgModule.cyclic(4)
    >>> b = FgModule.cyclic(6)
    >>> str(tensor(a, b)), str(tor1(a, b))
    ('Z/2', 'Z/2')
    >>> str(canonical_form(Presentation(ZZ, 2, ((4, 0), (0, 6)))))
    'Z/2 ⊕ Z/12'

Answers that are not finitely generated (Milnor K-groups of a symbolic field,
rational vector spaces) are carried by :class:`GroupExpr`, a formal direct sum
of atoms with optional generator labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from sympy import factorint, isprime

from .errors import RingMismatchError

INFINITE = math.inf


@dataclass(frozen=True, order=True)
class RingTag:
    """``ell=None`` is Z; otherwise the l-adic integers Z_l."""

    ell: int | None = None

    def __post_init__(self):
        if self.ell is not None and not isprime(self.ell):
            raise ValueError(f"Z_l needs a prime, got {self.ell}")

    @property
    def is_ladic(self) -> bool:
        return self.ell is not None

    def __str__(self):
        return "Z" if self.ell is None else f"Z_{self.ell}"

    @classmethod
    def parse(cls, text: str) -> RingTag:
        if text == "Z":
            return ZZ
        if text.startswith("Z_"):
            return cls(int(text[2:]))
        raise ValueError(f"unknown ring tag {text!r}")


ZZ = RingTag()


def zl(ell: int) -> RingTag:
    return RingTag(ell)


def ell_part(n: int, ell: int) -> int:
    """Largest power of ``ell`` dividing ``n`` (``n`` nonzero)."""
    n = abs(n)
    part = 1
    while n % ell == 0:
        n //= ell
        part *= ell
    return part


def valuation(n: int, ell: int) -> int:
    n = abs(n)
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def _invariant_factors(orders: Iterable[int]) -> tuple[int, ...]:
    """Merge cyclic orders (> 1) into an ascending divisibility chain."""
    exponents: dict[int, list[int]] = {}
    for d in orders:
        for p, e in factorint(d).items():
            exponents.setdefault(p, []).append(e)
    if not exponents:
        return ()
    for exps in exponents.values():
        exps.sort(reverse=True)
    length = max(len(e) for e in exponents.values())
    factors = []
    for i in range(length):
        d = 1
        for p, exps in exponents.items():
            if i < len(exps):
                d *= p ** exps[i]
        factors.append(d)
    return tuple(sorted(factors))


@dataclass(frozen=True)
class FgModule:
    """Z^free (or Z_l^free) plus ``torsion`` invariant factors d1 | d2 | ..."""

    ring: RingTag = ZZ
    free: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free < 0:
            raise ValueError("negative free rank")
        for d in self.torsion:
            if d <= 1:
                raise ValueError(f"invariant factor {d} must exceed 1")
            if self.ring.is_ladic and ell_part(d, self.ring.ell) != d:
                raise ValueError(f"{d} is not a power of {self.ring.ell}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"divisibility chain broken: {self.torsion}")

    @classmethod
    def from_cyclics(cls, orders: Iterable[int], ring: RingTag = ZZ) -> FgModule:
        """Direct sum of cyclic modules; order 0 means a free summand."""
        free = 0
        finite = []
        for d in orders:
            d = abs(int(d))
            if d == 0:
                free += 1
                continue
            if ring.is_ladic:
                d = ell_part(d, ring.ell)
            if d > 1:
                finite.append(d)
        return cls(ring, free, _invariant_factors(finite))

    @classmethod
    def cyclic(cls, n: int, ring: RingTag = ZZ) -> FgModule:
        return cls.from_cyclics([n], ring)

    @classmethod
    def zero(cls, ring: RingTag = ZZ) -> FgModule:
        return cls(ring)

    @classmethod
    def free_module(cls, rank: int, ring: RingTag = ZZ) -> FgModule:
        return cls(ring, rank)

    def cyclics(self) -> list[int]:
        return [0] * self.free + list(self.torsion)

    @property
    def is_zero(self) -> bool:
        return self.free == 0 and not self.torsion

    @property
    def is_finite(self) -> bool:
        return self.free == 0

    def order(self):
        return order(self)

    def exponent(self) -> int:
        return self.torsion[-1] if self.torsion else 1

    def elementary_divisors(self) -> list[int]:
        """Prime-power decomposition of the torsion, ascending."""
        out = []
        for d in self.torsion:
            out.extend(p**e for p, e in factorint(d).items())
        return sorted(out)

    def rank_mod(self, ell: int) -> int:
        """Dimension of M/ell over F_ell."""
        return self.free + sum(1 for d in self.torsion if d % ell == 0)

    def with_ring(self, ring: RingTag) -> FgModule:
        """Finite l-primary modules are the same over Z and Z_l."""
        if ring == self.ring:
            return self
        if self.free and ring != self.ring:
            raise RingMismatchError(f"cannot move free {self.ring} module to {ring}")
        return FgModule.from_cyclics(self.torsion, ring)

    def __add__(self, other: FgModule) -> FgModule:
        return direct_sum(self, other)

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free:
            base = str(self.ring)
            parts.append(base if self.free == 1 else f"{base}^{self.free}")
        return " ⊕ ".join(parts)

    def to_json(self) -> dict:
        return {"kind": "FG", "ring": str(self.ring), "free": self.free,
                "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data: dict) -> FgModule:
        return cls(RingTag.parse(data["ring"]), int(data["free"]),
                   tuple(data["torsion"]))


def order(m: FgModule):
    """Product of the invariant factors, or INFINITE with a free summand."""
    if m.free:
        return INFINITE
    return math.prod(m.torsion)


def _check_rings(a: FgModule, b: FgModule):
    if a.ring != b.ring:
        raise RingMismatchError(f"ring mismatch: {a.ring} vs {b.ring}")


def direct_sum(*mods: FgModule) -> FgModule:
    if not mods:
        return FgModule.zero()
    for m in mods[1:]:
        _check_rings(mods[0], m)
    return FgModule.from_cyclics(
        [c for m in mods for c in m.cyclics()], mods[0].ring)


def _cyclic_tensor(m: int, n: int) -> int:
    # 0 encodes a free cyclic module
    return math.gcd(m, n)


def tensor(a: FgModule, b: FgModule) -> FgModule:
    _check_rings(a, b)
    return FgModule.from_cyclics(
        [_cyclic_tensor(x, y) for x in a.cyclics() for y in b.cyclics()], a.ring)


def tor1(a: FgModule, b: FgModule) -> FgModule:
    _check_rings(a, b)
    return FgModule.from_cyclics(
        [math.gcd(x, y) for x in a.torsion for y in b.torsion], a.ring)


# --- Smith normal form -------------------------------------------------------


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(mat: Sequence[Sequence[int]]):
    """Return ``(diag, left, right)`` with ``left @ mat @ right`` diagonal.

    ``diag`` lists the nonzero invariant factors (ascending, each dividing the
    next). ``left`` and ``right`` are unimodular. Pivots are chosen by minimal
    absolute value, so the output is deterministic.
    """
    a = [[int(x) for x in row] for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    left = _identity(rows)
    right = _identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        # row[dst] += k * row[src]
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        left[dst] = [x + k * y for x, y in zip(left[dst], left[src])]

    def add_col(dst, src, k):
        for row in a:
            row[dst] += k * row[src]
        for row in right:
            row[dst] += k * row[src]

    diag = []
    t = 0
    while t < min(rows, cols):
        candidates = [(abs(a[i][j]), i, j) for i in range(t, rows)
                      for j in range(t, cols) if a[i][j]]
        if not candidates:
            break
        _, i, j = min(candidates)
        swap_rows(t, i)
        swap_cols(t, j)
        p = a[t][t]
        dirty = False
        for i in range(t + 1, rows):
            if a[i][t]:
                add_row(i, t, -(a[i][t] // p))
                dirty = dirty or bool(a[i][t])
        for j in range(t + 1, cols):
            if a[t][j]:
                add_col(j, t, -(a[t][j] // p))
                dirty = dirty or bool(a[t][j])
        if dirty:
            continue
        bad = next((i for i in range(t + 1, rows)
                    if any(a[i][j] % p for j in range(t + 1, cols))), None)
        if bad is not None:
            add_row(t, bad, 1)
            continue
        if p < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]
        diag.append(a[t][t])
        t += 1
    return tuple(diag), left, right


@dataclass(frozen=True)
class Presentation:
    """Cokernel of the relation matrix; rows are relations, columns generators."""

    ring: RingTag
    generators: int
    relations: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        rels = tuple(tuple(int(x) for x in row) for row in self.relations)
        for row in rels:
            if len(row) != self.generators:
                raise ValueError("relation length differs from generator count")
        object.__setattr__(self, "relations", rels)


def canonical_form(p: Presentation) -> FgModule:
    if not p.relations:
        return FgModule(p.ring, p.generators)
    diag, _, _ = smith_normal_form(p.relations)
    return FgModule.from_cyclics(
        list(diag) + [0] * (p.generators - len(diag)), p.ring)


# --- symbolic expressions ------------------------------------------------------


@dataclass(frozen=True)
class FG:
    module: FgModule


@dataclass(frozen=True)
class KM:
    """K^M_degree(k)/modulus; modulus 0 is the integral group."""

    degree: int
    modulus: int = 0
    field_bound: bool = True

    def __post_init__(self):
        if self.degree < 0 or self.modulus < 0:
            raise ValueError("KM degree and modulus must be non-negative")


@dataclass(frozen=True)
class Tor4K2:
    """Tor(Z/4, K^M_2(k))."""


@dataclass(frozen=True)
class QVec:
    rank: int


@dataclass(frozen=True)
class Opaque:
    label: str
    note: str = ""


Atom = Union[FG, KM, Tor4K2, QVec, Opaque]

_SUPERSCRIPT = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def render_atom(atom: Atom) -> str:
    if isinstance(atom, FG):
        return str(atom.module)
    if isinstance(atom, KM):
        base = "k×" if atom.degree == 1 else f"K^M_{atom.degree}(k)"
        return base if atom.modulus == 0 else f"{base}/{atom.modulus}"
    if isinstance(atom, Tor4K2):
        return "Tor(Z/4,K^M_2(k))"
    if isinstance(atom, QVec):
        return "Q" if atom.rank == 1 else f"Q^{atom.rank}"
    return atom.label


def _atom_is_zero(atom: Atom) -> bool:
    if isinstance(atom, FG):
        return atom.module.is_zero
    if isinstance(atom, QVec):
        return atom.rank == 0
    if isinstance(atom, KM):
        return atom.modulus == 1
    return False


def _normalize_atom(atom: Atom) -> Atom:
    if isinstance(atom, KM) and atom.degree == 0:
        # K^M_0 = Z
        return FG(FgModule.cyclic(atom.modulus))
    return atom


def _atom_order(atom: Atom):
    """Order when determined by the atom alone, else None."""
    if isinstance(atom, FG):
        return order(atom.module)
    if isinstance(atom, QVec):
        return INFINITE if atom.rank else 1
    return None


@dataclass(frozen=True)
class Summand:
    atom: Atom
    label: str | None = None

    def render(self, labels: bool = True) -> str:
        text = render_atom(self.atom)
        if labels and self.label:
            if " ⊕ " in text:
                text = f"({text})"
            text += "{" + self.label + "}"
        return text


@dataclass(frozen=True)
class GroupExpr:
    """Formal direct sum; the empty sum is the zero group."""

    summands: tuple[Summand, ...] = field(default_factory=tuple)

    def __post_init__(self):
        kept = []
        for s in self.summands:
            atom = _normalize_atom(s.atom)
            if not _atom_is_zero(atom):
                kept.append(Summand(atom, s.label))
        object.__setattr__(self, "summands", tuple(kept))

    @classmethod
    def of(cls, atom: Atom | FgModule, label: str | None = None) -> GroupExpr:
        if isinstance(atom, FgModule):
            atom = FG(atom)
        return cls((Summand(atom, label),))

    @classmethod
    def zero(cls) -> GroupExpr:
        return cls(())

    @classmethod
    def sum(cls, exprs: Iterable[GroupExpr]) -> GroupExpr:
        return cls(tuple(s for e in exprs for s in e.summands))

    def __add__(self, other: GroupExpr) -> GroupExpr:
        return GroupExpr(self.summands + other.summands)

    def labeled(self, label: str | None) -> GroupExpr:
        return GroupExpr(tuple(Summand(s.atom, label) for s in self.summands))

    @property
    def is_zero(self) -> bool:
        return not self.summands

    @property
    def is_explicit(self) -> bool:
        """Every summand is an honest finitely generated module."""
        return all(isinstance(s.atom, FG) for s in self.summands)

    @property
    def is_exact(self) -> bool:
        """No OPAQUE atoms: the value is pinned down, if only symbolically."""
        return not any(isinstance(s.atom, Opaque) for s in self.summands)

    def module(self, ring: RingTag | None = None) -> FgModule:
        """Collapse an explicit expression into one FgModule."""
        if not self.is_explicit:
            raise ValueError(f"not explicit: {self}")
        mods = [s.atom.module for s in self.summands]
        if ring is None:
            rings = {m.ring for m in mods if m.free} or {m.ring for m in mods}
            ring = rings.pop() if len(rings) == 1 else ZZ
        if not mods:
            return FgModule.zero(ring)
        return direct_sum(*(m.with_ring(ring) for m in mods))

    def order(self):
        """Order, INFINITE, or None when a symbolic atom blocks the count."""
        total = 1
        for s in self.summands:
            o = _atom_order(s.atom)
            if o is None:
                return None
            total *= o
        return total

    def atoms(self) -> list[Atom]:
        return [s.atom for s in self.summands]

    def simplify(self) -> GroupExpr:
        """Merge same-label finite cyclic pieces and KM quotients of coprime moduli."""
        out: list[Summand] = []
        pending: dict = {}
        for s in self.summands:
            key = None
            if isinstance(s.atom, FG) and s.atom.module.is_finite:
                key = ("FG", s.label)
            elif isinstance(s.atom, KM) and s.atom.modulus > 1:
                key = ("KM", s.atom.degree, s.atom.field_bound, s.label)
            if key is None:
                out.append(s)
                continue
            pending.setdefault(key, []).append(s)
            if len(pending[key]) == 1:
                out.append(key)
        result = []
        for item in out:
            if isinstance(item, Summand):
                result.append(item)
                continue
            group = pending[item]
            if item[0] == "FG":
                mod = direct_sum(*(g.atom.module.with_ring(ZZ) for g in group))
                for d in mod.torsion:
                    result.append(Summand(FG(FgModule.cyclic(d)), item[1]))
            else:
                result.extend(_merge_km(group))
        return GroupExpr(tuple(result))

    def canonical(self) -> tuple:
        """Isomorphism-class key; generator labels are ignored."""
        finite = []
        free: dict[str, int] = {}
        symbolic = []
        qrank = 0
        for s in self.summands:
            atom = s.atom
            if isinstance(atom, FG):
                finite.extend(atom.module.torsion)
                if atom.module.free:
                    key = str(atom.module.ring)
                    free[key] = free.get(key, 0) + atom.module.free
            elif isinstance(atom, KM):
                if atom.modulus == 0:
                    symbolic.append(("KM", atom.degree, 0))
                else:
                    for p, e in factorint(atom.modulus).items():
                        symbolic.append(("KM", atom.degree, p**e))
            elif isinstance(atom, QVec):
                qrank += atom.rank
            elif isinstance(atom, Tor4K2):
                symbolic.append(("TOR4K2",))
            else:
                symbolic.append(("OPAQUE", atom.label))
        return (_invariant_factors(finite), tuple(sorted(free.items())),
                tuple(sorted(symbolic, key=repr)), qrank)

    def iso(self, other: GroupExpr) -> bool:
        return self.canonical() == other.canonical()

    def render(self, labels: bool = True) -> str:
        if self.is_zero:
            return "0"
        return " ⊕ ".join(s.render(labels) for s in self.summands)

    def render_canonical(self) -> str:
        """Unlabeled rendering with all finite pieces merged into invariant factors."""
        finite = []
        rest = []
        for s in self.summands:
            if isinstance(s.atom, FG) and s.atom.module.is_finite:
                finite.extend(s.atom.module.torsion)
            else:
                rest.append(Summand(s.atom))
        parts = [f"Z/{d}" for d in _invariant_factors(finite)]
        parts += [s.render(False) for s in GroupExpr(tuple(rest)).simplify().summands]
        return " ⊕ ".join(parts) if parts else "0"

    def __str__(self):
        return self.render()

    def to_json(self) -> dict:
        return {"summands": [{"atom": atom_to_json(s.atom), "label": s.label}
                             for s in self.summands]}

    @classmethod
    def from_json(cls, data: dict) -> GroupExpr:
        return cls(tuple(Summand(atom_from_json(s["atom"]), s.get("label"))
                         for s in data["summands"]))


def _merge_km(group: list[Summand]) -> list[Summand]:
    """CRT-merge KM(i, a) and KM(i, b) when gcd(a, b) = 1."""
    merged: list[Summand] = []
    for s in group:
        for idx, t in enumerate(merged):
            if math.gcd(t.atom.modulus, s.atom.modulus) == 1:
                merged[idx] = Summand(
                    KM(t.atom.degree, t.atom.modulus * s.atom.modulus,
                       t.atom.field_bound), t.label)
                break
        else:
            merged.append(s)
    return merged


def atom_to_json(atom: Atom) -> dict:
    if isinstance(atom, FG):
        return atom.module.to_json()
    if isinstance(atom, KM):
        return {"kind": "KM", "degree": atom.degree, "modulus": atom.modulus,
                "fieldBound": atom.field_bound}
    if isinstance(atom, Tor4K2):
        return {"kind": "TOR4K2"}
    if isinstance(atom, QVec):
        return {"kind": "QVEC", "rank": atom.rank}
    return {"kind": "OPAQUE", "label": atom.label, "note": atom.note}


def atom_from_json(data: dict) -> Atom:
    kind = data["kind"]
    if kind == "FG":
        return FG(FgModule.from_json(data))
    if kind == "KM":
        return KM(int(data["degree"]), int(data["modulus"]),
                  bool(data.get("fieldBound", True)))
    if kind == "TOR4K2":
        return Tor4K2()
    if kind == "QVEC":
        return QVec(int(data["rank"]))
    if kind == "OPAQUE":
        return Opaque(data["label"], data.get("note", ""))
    raise ValueError(f"unknown atom kind {kind!r}")


def fg(*cyclics: int, ring: RingTag = ZZ, label: str | None = None) -> GroupExpr:
    """Shorthand: ``fg(2, 4)`` is Z/2 ⊕ Z/4, ``fg(0)`` is Z."""
    return GroupExpr.of(FgModule.from_cyclics(cyclics, ring), label)


def _tensor_atom_cyclic(atom: Atom, m: int) -> list[Atom]:
    if isinstance(atom, FG):
        mod = atom.module
        return [FG(tensor(mod, FgModule.cyclic(m, mod.ring)))]
    if isinstance(atom, KM):
        new = m if atom.modulus == 0 else math.gcd(m, atom.modulus)
        return [KM(atom.degree, new, atom.field_bound)]
    if isinstance(atom, QVec):
        return []
    if isinstance(atom, Tor4K2):
        if m % 2:
            return []
        if m % 4 == 0:
            return [atom]
        return [Opaque(f"Tor(Z/4,K^M_2(k))/{m}", "tensor of a symbolic torsion group")]
    return [Opaque(f"{atom.label} ⊗ Z/{m}", "symbolic tensor left unresolved")]


def _tor_atom_cyclic(atom: Atom, m: int) -> list[Atom]:
    if isinstance(atom, FG):
        mod = atom.module
        return [FG(tor1(FgModule.cyclic(m, mod.ring), mod))]
    if isinstance(atom, QVec):
        return []
    if isinstance(atom, KM):
        if atom.modulus:
            g = math.gcd(m, atom.modulus)
            if g == 1:
                return []
            return [Opaque(f"Tor(Z/{m},{render_atom(atom)})",
                           "torsion of a symbolic quotient")]
        if atom.degree == 2 and m == 4:
            return [Tor4K2()]
        if atom.degree == 1:
            return [Opaque(f"μ_{m}(k)", "roots of unity of the base field")]
        return [Opaque(f"Tor(Z/{m},{render_atom(atom)})", "symbolic Tor left unresolved")]
    if isinstance(atom, Tor4K2):
        if m % 2:
            return []
        return [Opaque(f"Tor(Z/{m},Tor(Z/4,K^M_2(k)))", "symbolic Tor left unresolved")]
    return [Opaque(f"Tor(Z/{m},{atom.label})", "symbolic Tor left unresolved")]


def expr_tensor_cyclic(e: GroupExpr, m: int) -> GroupExpr:
    """Atom-wise ``e ⊗ Z/m``; labels are kept."""
    if m < 2:
        raise ValueError("modulus must be at least 2")
    return GroupExpr(tuple(Summand(a, s.label) for s in e.summands
                           for a in _tensor_atom_cyclic(s.atom, m)))


def expr_tor_cyclic(e: GroupExpr, m: int) -> GroupExpr:
    """Atom-wise ``Tor(Z/m, e)``; labels are kept."""
    if m < 2:
        raise ValueError("modulus must be at least 2")
    return GroupExpr(tuple(Summand(a, s.label) for s in e.summands
                           for a in _tor_atom_cyclic(s.atom, m)))


def expr_tensor(g: FgModule, e: GroupExpr) -> GroupExpr:
    """``g ⊗ e`` for a finitely generated ``g``, split over its cyclic factors."""
    parts = []
    for c in g.cyclics():
        if c == 0:
            parts.append(e)
        else:
            parts.append(expr_tensor_cyclic(e, c))
    return GroupExpr.sum(parts)


def expr_tor(g: FgModule, e: GroupExpr) -> GroupExpr:
    return GroupExpr.sum(expr_tor_cyclic(e, d) for d in g.torsion)

