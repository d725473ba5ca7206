"""Milnor–Witt words, Grothendieck–Witt groups of finite fields, and the
twisted group law on ``π₁`` together with the Hermitian target map ``e``.

Words are noncommutative polynomials in unit symbols ``[u]`` with a central
``η`` and at most one π-tag (``η_s`` or ``ν``) per monomial.

>>> str(normalize_mw(MWWord.parse("(2+[-1]*eta)*eta"), AlgClosed(0)))
'0'
>>> str(normalize_mw(MWWord.parse("[u*v]"), NumberFieldNonreal(1)))
'[u][v]η + [u] + [v]'
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import product

from sympy import discrete_log, isprime, primitive_root

from .abgrp import GroupExpr, Opaque, fg
from .errors import ParseError, UnsupportedError
from .fieldcat import AlgClosed, Field, Finite, NumberFieldNonreal, exp_char
from .manss import TwistLaw

Unit = tuple[str, ...]  # product of unit labels, with multiplicity, sorted

_SUPERSCRIPT = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")
_FROM_SUPERSCRIPT = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789")
TAGS = ("η_s", "ν")


def _clean_label(label: str) -> str:
    return label.strip().replace("−", "-").replace(" ", "")


def render_unit(u: Unit) -> str:
    if not u:
        return "1"
    counts = Counter(u)
    return "*".join(x if c == 1 else f"{x}^{c}" for x, c in sorted(counts.items()))


@dataclass(frozen=True)
class Monomial:
    coeff: int
    symbols: tuple[Unit, ...] = ()
    eta: int = 0
    tag: str | None = None

    @property
    def degree(self) -> int:
        return len(self.symbols) - self.eta

    @property
    def shape(self):
        return (self.symbols, self.eta, self.tag)

    def times(self, other: Monomial) -> Monomial:
        if self.tag and other.tag:
            raise ValueError("a monomial carries at most one of η_s, ν")
        return Monomial(self.coeff * other.coeff, self.symbols + other.symbols,
                        self.eta + other.eta, self.tag or other.tag)

    def render(self) -> str:
        body = "".join(f"[{render_unit(u)}]" for u in self.symbols)
        if self.eta:
            body += "η" + ("" if self.eta == 1 else str(self.eta).translate(_SUPERSCRIPT))
        if self.tag:
            body += self.tag
        if not body:
            return str(self.coeff)
        if self.coeff == 1:
            return body
        if self.coeff == -1:
            return "-" + body
        return f"{self.coeff}{body}"


@dataclass(frozen=True)
class MWWord:
    terms: tuple[Monomial, ...] = ()

    def __post_init__(self):
        acc: dict = {}
        for t in self.terms:
            acc[t.shape] = acc.get(t.shape, 0) + t.coeff
        terms = tuple(Monomial(c, *shape) for shape, c in sorted(acc.items(), key=_shape_key) if c)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def parse(cls, text: str) -> MWWord:
        return _Parser(text).parse()

    @property
    def degree(self) -> int | None:
        degs = {t.degree for t in self.terms}
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous word {self}")
        return degs.pop() if degs else None

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: MWWord) -> MWWord:
        return MWWord(self.terms + other.terms)

    def __neg__(self) -> MWWord:
        return MWWord(tuple(Monomial(-t.coeff, *t.shape) for t in self.terms))

    def __sub__(self, other: MWWord) -> MWWord:
        return self + (-other)

    def __mul__(self, other: MWWord) -> MWWord:
        return MWWord(tuple(a.times(b) for a in self.terms for b in other.terms))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = self.terms[0].render()
        for t in self.terms[1:]:
            r = t.render()
            out += " - " + r[1:] if r.startswith("-") else " + " + r
        return out


def _shape_key(item):
    (symbols, eta, tag), _ = item
    return (len(symbols) - eta, tag or "", -len(symbols), symbols, eta)


def _word(*monomials) -> MWWord:
    return MWWord(tuple(monomials))


# --- parser --------------------------------------------------------------------


class _Parser:
    _TOKEN = re.compile(r"\s*(?:(\d+)|(eta_s|η_s|eta|η|nu|ν)|([\[<⟨])|([-+−*·^()])|([⁰¹²³⁴⁵⁶⁷⁸⁹]+))")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise ParseError(msg, self.text, self.pos)

    def peek(self):
        m = self._TOKEN.match(self.text, self.pos)
        if m is None:
            if self.text[self.pos:].strip():
                self.error("unexpected character")
            return None
        return m

    def take(self):
        m = self.peek()
        if m is None:
            self.error("unexpected end of input")
        self.pos = m.end()
        return m

    def parse(self) -> MWWord:
        w = self.expr()
        if self.peek() is not None:
            self.error("trailing input")
        try:
            w.degree
        except ValueError as exc:
            raise ParseError(str(exc), self.text, 0) from None
        return w

    def expr(self) -> MWWord:
        sign = 1
        m = self.peek()
        if m and m.group(4) in ("-", "−"):
            self.take()
            sign = -1
        w = self.term()
        w = w if sign == 1 else -w
        while (m := self.peek()) and m.group(4) in ("+", "-", "−"):
            self.take()
            t = self.term()
            w = w + t if m.group(4) == "+" else w - t
        return w

    def term(self) -> MWWord:
        w = self.power()
        while (m := self.peek()) and (m.group(4) in ("*", "·") or m.group(1) or m.group(2)
                                     or m.group(3) or m.group(4) == "("):
            if m.group(4) in ("*", "·"):
                self.take()
            w = w * self.power()
        return w

    def power(self) -> MWWord:
        base = self.atom()
        m = self.peek()
        if m and m.group(5):
            self.take()
            n = int(m.group(5).translate(_FROM_SUPERSCRIPT))
        elif m and m.group(4) == "^":
            self.take()
            e = self.take()
            if not e.group(1):
                self.error("expected an exponent")
            n = int(e.group(1))
        else:
            return base
        out = _word(Monomial(1))
        for _ in range(n):
            out = out * base
        return out

    def atom(self) -> MWWord:
        m = self.take()
        if m.group(1):
            return _word(Monomial(int(m.group(1))))
        if m.group(2):
            name = m.group(2)
            if name in ("eta", "η"):
                return _word(Monomial(1, (), 1))
            return _word(Monomial(1, (), 0, "η_s" if name in ("eta_s", "η_s") else "ν"))
        if m.group(3):
            close = {"[": "]", "<": ">", "⟨": "⟩"}[m.group(3)]
            end = self.text.find(close, self.pos)
            if end < 0:
                self.error(f"missing {close!r}")
            unit = _parse_unit(self.text[self.pos:end], self.text, self.pos)
            self.pos = end + 1
            sym = _word(Monomial(1, (unit,)))
            if close == "]":
                return sym
            return _word(Monomial(1), Monomial(1, (unit,), 1))  # ⟨u⟩ = 1 + [u]η
        if m.group(4) == "(":
            w = self.expr()
            if self.take().group(4) != ")":
                self.error("expected ')'")
            return w
        self.error(f"unexpected {m.group(0).strip()!r}")


def _parse_unit(raw: str, text: str, pos: int) -> Unit:
    labels = []
    for factor in re.split(r"[*·]", raw):
        factor = _clean_label(factor)
        if not factor:
            raise ParseError("empty unit", text, pos)
        base, _, exp = factor.partition("^")
        if base == "0":
            raise ParseError("0 is not a unit", text, pos)
        labels += [base] * (int(exp) if exp else 1)
    return tuple(sorted(labels))


# --- normalization -------------------------------------------------------------


def _symbolic_pass(w: MWWord) -> MWWord:
    out = []
    for t in w.terms:
        out += _rewrite(t)
    return MWWord(tuple(out))


def _rewrite(t: Monomial) -> list[Monomial]:
    syms = [tuple(x for x in u if x != "1") for u in t.symbols]
    if any(not u for u in syms):
        return []  # [1] = 0
    for i, u in enumerate(syms):
        if len(u) > 1:  # [uv] = [u] + [v] + [u][v]η
            a, b = (u[0],), u[1:]
            pre, post = tuple(syms[:i]), tuple(syms[i + 1:])
            return [Monomial(t.coeff, pre + (a,) + post, t.eta, t.tag),
                    Monomial(t.coeff, pre + (b,) + post, t.eta, t.tag),
                    Monomial(t.coeff, pre + (a, b) + post, t.eta + 1, t.tag)]
    labels = [u[0] for u in syms]
    for a, b in zip(labels, labels[1:]):
        if b == f"1-{a}" or a == f"1-{b}":
            return []
    if "-1" in labels and t.eta >= 2:  # (2 + [-1]η)η = 0
        i = labels.index("-1")
        rest = tuple(syms[:i] + syms[i + 1:])
        return [Monomial(-2 * t.coeff, rest, t.eta - 1, t.tag)]
    return [Monomial(t.coeff, tuple(syms), t.eta, t.tag)]


def _symbolic_normalize(w: MWWord) -> MWWord:
    while True:
        nxt = _symbolic_pass(w)
        if nxt == w:
            return w
        w = nxt


class _FiniteModel:
    """Faithful model of ``K^MW_*(F_q)`` as ``I^n ×_{I^n/I^{n+1}} K^M_n``."""

    def __init__(self, f: Finite):
        self.f = f
        self.q = f.q
        p = exp_char(f)
        self.p = p
        self.odd = self.q % 2 == 1
        self.prime = isprime(self.q)
        self.g = primitive_root(self.q) if self.prime else None
        self.minus_one = (self.q - 1) // 2 if self.odd else 0
        # disc(-1): -1 is a nonsquare exactly when q ≡ 3 mod 4
        self.delta = 1 if self.q % 4 == 3 else 0

    def log(self, label: str) -> int:
        """Exponent of ``label`` with respect to the generator g."""
        n = self.q - 1
        if label == "1":
            return 0
        if label == "g":
            return 1
        if label == "-1":
            return self.minus_one
        if self.prime:
            val = None
            if re.fullmatch(r"-?\d+", label):
                val = int(label) % self.q
            elif (m := re.fullmatch(r"1-(-?\d+)", label)):
                val = (1 - int(m.group(1))) % self.q
            if val is not None:
                if val == 0:
                    raise ValueError(f"{label} is not a unit in F_{self.q}")
                return discrete_log(self.q, val, self.g) % n
        raise UnsupportedError(f"unit {label!r} has no value in F_{self.q}; use g^k")

    def unit_exp(self, u: Unit) -> int:
        return sum(self.log(x) for x in u) % (self.q - 1)

    # GW elements are (rank, disc); W is GW modulo h = (2, delta)
    def gw_mul(self, x, y):
        return (x[0] * y[0], (y[0] * x[1] + x[0] * y[1]) % 2 if self.odd else 0)

    def w_reduce(self, x):
        r, d = x
        k = r // 2
        return (r - 2 * k, (d - k * self.delta) % 2 if self.odd else 0)

    def monomial_class(self, t: Monomial):
        """GW component and K^M_1 exponent of one monomial.

        η maps to ⟨1⟩ in W and ``[u]`` to ``⟨u⟩ - 1``; in degree 1 the K^M_1
        component alone determines the class because ``I ≅ I/I²`` here.
        """
        gw = (t.coeff, 0)
        for u in t.symbols:
            gw = self.gw_mul(gw, (0, self.unit_exp(u) % 2))
        k1 = t.coeff * self.unit_exp(t.symbols[0]) if len(t.symbols) == 1 and not t.eta else 0
        return gw, k1

    def normalize(self, w: MWWord) -> MWWord:
        groups: dict = {}
        for t in w.terms:
            groups.setdefault(t.tag, []).append(t)
        out = MWWord()
        for tag, terms in groups.items():
            out = out + self._normalize_homogeneous(terms, tag)
        return out

    def _normalize_homogeneous(self, terms, tag) -> MWWord:
        d = terms[0].degree
        if d >= 2:
            return MWWord()
        gw, k1 = (0, 0), 0
        for t in terms:
            if t.degree != d:
                raise ValueError("inhomogeneous word")
            cls_gw, k = self.monomial_class(t)
            gw = (gw[0] + cls_gw[0], (gw[1] + cls_gw[1]) % 2)
            k1 += k
        if d == 1:
            k = k1 % (self.q - 1)
            return MWWord((Monomial(1, (("g",) * k,), 0, tag),)) if k else MWWord()
        if d == 0:
            return self._gw_word(gw[0], gw[1], 0, tag)
        r, disc = self.w_reduce((gw[0], gw[1]))
        return self._gw_word(r, disc, -d, tag)

    def _gw_word(self, rank, disc, eta, tag) -> MWWord:
        terms = []
        if rank:
            terms.append(Monomial(rank, (), eta, tag))
        if disc and self.odd:
            terms.append(Monomial(1, (("g",),), eta + 1, tag))
        return MWWord(tuple(terms))


def _algclosed_normalize(w: MWWord) -> MWWord:
    out = []
    for t in _symbolic_normalize(w).terms:
        if t.degree >= 1:
            out.append(t)
        elif not t.symbols:  # every unit is a square: GW = Z, W = Z/2
            c = t.coeff if t.eta == 0 else t.coeff % 2
            if c:
                out.append(Monomial(c, (), t.eta, t.tag))
        # a symbol next to η is ⟨u⟩ - 1 = 0
    return MWWord(tuple(out))


def normalize_mw(w: MWWord, f: Field) -> MWWord:
    """Directed-rule normal form; a full normal form over finite and
    algebraically closed fields. Idempotent and degree preserving."""
    if isinstance(f, Finite):
        return _FiniteModel(f).normalize(w)
    if isinstance(f, AlgClosed):
        return _algclosed_normalize(w)
    return _symbolic_normalize(w)


# --- Grothendieck–Witt ---------------------------------------------------------


@dataclass(frozen=True)
class GWElement:
    rank: int
    disc: int  # square class of the determinant, 0 or 1

    def __add__(self, other):
        return GWElement(self.rank + other.rank, (self.disc + other.disc) % 2)

    def __mul__(self, other):
        return GWElement(self.rank * other.rank,
                         (other.rank * self.disc + self.rank * other.disc) % 2)

    def __str__(self):
        return f"({self.rank}, {'[g]' if self.disc else '0'})"


def diagonal_form(units, f: Field) -> GWElement:
    """Class of ``⟨u₁, …, u_r⟩``; units are labels or F_q elements."""
    if isinstance(f, AlgClosed):
        return GWElement(len(units), 0)
    if not isinstance(f, Finite):
        raise UnsupportedError("GW classes are only computed over finite and algebraically closed fields")
    model = _FiniteModel(f)
    disc = 0
    for u in units:
        k = model.log(_clean_label(str(u))) if not isinstance(u, tuple) else model.unit_exp(u)
        disc += k
    return GWElement(len(units), disc % 2 if model.odd else 0)


def gw(f: Field) -> GroupExpr:
    if isinstance(f, AlgClosed):
        return fg(0, label="rank")
    if isinstance(f, Finite):
        if f.q % 2 == 0:
            return fg(0, label="rank")
        return fg(0, label="rank") + fg(2, label="disc")
    return GroupExpr.of(Opaque("GW(k)", "no quadratic form theory for this field"))


# --- Milnor symbols and π₁ -----------------------------------------------------


def _symbol_key(a: str, b: str):
    """Normalize ``{a, b}`` to (key, sign) or None when it vanishes formally."""
    if a == "1" or b == "1" or b == f"1-{a}" or a == f"1-{b}":
        return None
    if a == b and a != "-1":
        a, b = "-1", a  # {a,a} = {a,-1} = ±{-1,a}, which has order 2
        return (a, b), 1
    if a > b:
        return (b, a), -1
    return (a, b), 1


@dataclass(frozen=True)
class K2Sum:
    """Formal sum of Milnor symbols modulo ``modulus``."""

    terms: tuple[tuple[tuple[str, str], int], ...]
    modulus: int

    @classmethod
    def zero(cls, modulus: int) -> K2Sum:
        return cls((), modulus)

    @classmethod
    def make(cls, acc: dict, modulus: int) -> K2Sum:
        out = []
        for key, c in sorted(acc.items()):
            m = modulus
            if "-1" in key:
                m = 2 if modulus % 2 == 0 else 1  # 2{-1, a} = {1, a} = 0
            c %= m
            if c:
                out.append((key, c))
        return cls(tuple(out), modulus)

    @classmethod
    def symbol(cls, u: Unit, v: Unit, modulus: int, coeff: int = 1) -> K2Sum:
        """``coeff·{u, v}`` expanded bilinearly over the labels of u and v."""
        acc: dict = {}
        for a, b in product(u, v):
            norm = _symbol_key(a, b)
            if norm is not None:
                key, sign = norm
                acc[key] = acc.get(key, 0) + sign * coeff
        return cls.make(acc, modulus)

    def __add__(self, other: K2Sum) -> K2Sum:
        if self.modulus != other.modulus:
            raise ValueError("K^M_2 sums with different moduli")
        acc = dict(self.terms)
        for k, c in other.terms:
            acc[k] = acc.get(k, 0) + c
        return K2Sum.make(acc, self.modulus)

    def __neg__(self):
        return K2Sum.make({k: -c for k, c in self.terms}, self.modulus)

    @property
    def is_zero(self):
        return not self.terms

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(("" if c == 1 else f"{c}") + "{" + f"{a},{b}" + "}"
                          for (a, b), c in self.terms)

    def to_json(self):
        return [[a, b, c] for (a, b), c in self.terms]


def twist_law(f: Field) -> TwistLaw:
    p = exp_char(f)
    if p == 2:
        return TwistLaw(0, 3)
    if p == 3:
        return TwistLaw(4, 8)
    return TwistLaw(12, 24)


def _reduce_unit(u, f: Field) -> tuple[Unit, list[str]]:
    """Representative with exponents 0 or 1, plus the labels that were squared."""
    if isinstance(f, AlgClosed):
        return (), []
    if isinstance(f, Finite):
        model = _FiniteModel(f)
        k = model.unit_exp(tuple(u)) if model.odd else 0
        return (("g",) if k % 2 else ()), []
    counts = Counter(x for x in u if x != "1")
    rep = tuple(sorted(x for x, c in counts.items() if c % 2))
    squared = [x for x, c in counts.items() for _ in range(c // 2)]
    return rep, squared


def _has_concrete_k2(f: Field) -> bool:
    # K^M_2/N vanishes over finite fields and algebraically closed fields
    return isinstance(f, (Finite, AlgClosed))


@dataclass(frozen=True)
class PiOneElement:
    """``ν``-part in K^M_2/N, ``ηη_s``-part in k×/2 (a unit representative),
    ``η_s``-part in Z/2."""

    nu: K2Sum
    eta_eta_s: Unit
    eta_s: int
    field: Field = field(compare=False, repr=False, default=None)

    @classmethod
    def make(cls, f: Field, nu=(), eta_eta_s=(), eta_s=0) -> PiOneElement:
        law = twist_law(f)
        if law.modulus == 3 and (eta_eta_s or eta_s % 2):
            raise UnsupportedError("in characteristic 2 only the ν-part K^M_2/3 is present")
        rep, squared = _reduce_unit(tuple(_clean_label(x) for x in eta_eta_s), f)
        n = K2Sum.make({}, law.modulus)
        if isinstance(nu, K2Sum):
            n = nu
        else:
            for entry in nu:
                a, b, c = entry
                n = n + K2Sum.symbol((a,), (b,), law.modulus, c)
        for x in squared:
            n = n + K2Sum.symbol((x,), ("-1",), law.modulus, law.coefficient)
        if _has_concrete_k2(f):
            n = K2Sum.zero(law.modulus)
        return cls(n, rep, eta_s % 2, f)

    @classmethod
    def zero(cls, f: Field) -> PiOneElement:
        return cls.make(f)

    @property
    def is_zero(self):
        return self.nu.is_zero and not self.eta_eta_s and not self.eta_s

    def __str__(self):
        parts = []
        if not self.nu.is_zero:
            parts.append(f"({self.nu})ν")
        if self.eta_eta_s:
            parts.append(f"[{render_unit(self.eta_eta_s)}]ηη_s")
        if self.eta_s:
            parts.append("η_s")
        return " + ".join(parts) if parts else "0"

    def to_json(self):
        return {"nu": self.nu.to_json(), "etaEtaS": list(self.eta_eta_s), "etaS": self.eta_s}

    @classmethod
    def from_json(cls, d: dict, f: Field) -> PiOneElement:
        return cls.make(f, [tuple(x) for x in d.get("nu", [])], tuple(d.get("etaEtaS", ())),
                        int(d.get("etaS", 0)))


def pi_one_add(x: PiOneElement, y: PiOneElement, f: Field) -> PiOneElement:
    """``[u]ηη_s + [v]ηη_s = [uv]ηη_s - c[u,v]ν`` with the η_s parts adding in Z/2."""
    for e in (x, y):
        if e.field is not None and e.field != f:
            raise ValueError("π₁ elements over different fields")
    law = twist_law(f)
    correction = K2Sum.symbol(x.eta_eta_s, y.eta_eta_s, law.modulus, -law.coefficient)
    nu = x.nu + y.nu + correction
    return PiOneElement.make(f, nu, x.eta_eta_s + y.eta_eta_s, x.eta_s + y.eta_s)


def pi_one_neg(x: PiOneElement, f: Field) -> PiOneElement:
    # solve x + y = 0 with y = (ν', u, e): ν' = -ν + c{u,u} - c·Σ{a,-1}
    law = twist_law(f)
    nu = -x.nu + K2Sum.symbol(x.eta_eta_s, x.eta_eta_s, law.modulus, law.coefficient)
    for a in x.eta_eta_s:
        nu = nu + K2Sum.symbol((a,), ("-1",), law.modulus, -law.coefficient)
    return PiOneElement.make(f, nu, x.eta_eta_s, x.eta_s)


def gw_times_eta_s(units, f: Field) -> PiOneElement:
    """``⟨u₁, …, u_r⟩·η_s``, using ``⟨u⟩η_s = η_s + [u]ηη_s``."""
    total = PiOneElement.zero(f)
    for u in units:
        total = pi_one_add(total, PiOneElement.make(f, (), (str(u),), 1), f)
    return total


def hermitian_e(x: PiOneElement) -> tuple[Unit, int]:
    """The map to ``π₁ KO = k×/2 ⊕ Z/2``; its kernel is the ν-part."""
    return x.eta_eta_s, x.eta_s
