"""Rational homotopy and integral gluing across the arithmetic fracture square.

Integral ``π_{1+wα} S[1/p]`` sits in the long exact sequence

    π_{2+wα}(∏ S∧_l)_Q → π_{1+wα} S[1/p] → π_{1+wα} S_Q ⊕ π_{1+wα} ∏ S∧_l → π_{1+wα}(∏ S∧_l)_Q

with ``l`` running over primes other than the exponential characteristic.
For ``w >= -1`` both rational ends vanish and the middle map is an isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from sympy import factorint, primerange

from .abgrp import ZZ, GroupExpr, Opaque, QVec, fg
from .errors import UnsupportedError, UnknownCohomologyError
from .fieldcat import (AlgClosed, CdStatus, Field, Finite, FunctionFieldOverFinite,
                       LocalCharZero, LocalPosChar, NumberFieldNonreal, cd_check,
                       exp_char, milnor_k, try_mot_cohom_zl)
from .kmw import twist_law
from .manss import (ChartEntry, GradedResult, GroupResult, SesResult, assemble_e2_column,
                    coefficient_label, pi_label, pi_one_l_complete, result_canonical,
                    result_from_json, unit_piece)

_GLOBAL = (NumberFieldNonreal, FunctionFieldOverFinite)


def rational_pi(f: Field, m: int, n: int) -> GroupExpr:
    """``π_{m+nα} S_Q = H^{-m-n}(k; Q(-n))`` on the nonreal fields in the catalogue."""
    if n >= -1:
        if (m, n) == (0, 0):
            return GroupExpr.of(QVec(1))  # W(k) is torsion, so GW ⊗ Q = Q
        if (m, n) == (0, -1):
            if isinstance(f, Finite):
                return GroupExpr.zero()
            return GroupExpr.of(Opaque("k×⊗Q", "units tensor Q"))
        return GroupExpr.zero()
    if m < 0 or isinstance(f, Finite):
        return GroupExpr.zero()
    if m == 1:
        if n == -2:
            if isinstance(f, NumberFieldNonreal):
                return GroupExpr.of(QVec(f.r2))
            if isinstance(f, (LocalPosChar, FunctionFieldOverFinite)):
                return GroupExpr.zero()
            if isinstance(f, AlgClosed) and f.characteristic > 0:
                return GroupExpr.zero()
            return GroupExpr.of(Opaque("K_3^ind(k)⊗Q", "rational indecomposable K_3"))
        if n == -3:
            if isinstance(f, _GLOBAL):
                return GroupExpr.zero()
            return GroupExpr.of(Opaque("H^2(k;Q(3))", "summand of K_4(k)⊗Q"))
        return GroupExpr.zero()
    if m == 0 and isinstance(f, NumberFieldNonreal):
        return GroupExpr.zero()  # K^M_j of a nonreal number field is torsion for j >= 2
    return GroupExpr.of(Opaque(f"H^{-m - n}(k;Q({-n}))", "rational motivic cohomology"))


def adelic_rational(f: Field, i: int, n: int) -> GroupExpr:
    """``π_{i+nα}(∏_l S∧_l)_Q = (∏_l H^{-i-n}(k; Z_l(-n))) ⊗ Q`` for n in -4..-2."""
    c, j = -i - n, -n
    if c < 0 or c > 2 or (i, n) == (1, -4):
        return GroupExpr.zero()
    if isinstance(f, Finite):
        # finite groups, nonzero for the finitely many l dividing q^j - 1
        return GroupExpr.zero()
    if isinstance(f, AlgClosed):
        if c == 0:
            return GroupExpr.of(Opaque("(∏_l Z_l)⊗Q", "finite adeles"))
        return GroupExpr.zero()
    if c == 0 and j >= 1 and isinstance(f, _GLOBAL):
        return GroupExpr.zero()  # only finitely many roots of unity
    return GroupExpr.of(Opaque(f"(∏_l H^{c}(k;Z_l({j})))⊗Q", "rationalized product"))


def _moduli(p: int) -> int:
    return (8 if p != 2 else 1) * (3 if p != 3 else 1)


def _primes_away(p: int, limit: int = 8) -> list[int]:
    return [ell for ell in primerange(2, limit) if ell != p]


@dataclass(frozen=True)
class FourTermReport:
    """``T1 → π → T3 → T4``; ``resolved`` is set once the ends are known to vanish."""

    weight: int
    terms: tuple[tuple[str, GroupExpr | None], ...]
    resolved: GroupExpr | None = None
    surjection: bool = False
    kind = "fourterm"

    def pieces(self):
        return [self.resolved] if self.resolved is not None else []

    def order(self):
        return None if self.resolved is None else self.resolved.order()

    def render(self) -> str:
        shown = []
        for label, g in self.terms:
            shown.append(label if g is None else f"{label} = {g.simplify().render()}")
        arrow = " ↠ " if self.surjection else " → "
        text = arrow.join(shown)
        if self.resolved is not None:
            text += f"\n  ≅ {self.resolved.simplify().render()}"
        return text

    def to_json(self):
        return {"kind": "fourterm", "weight": self.weight,
                "terms": [{"label": lab, "group": None if g is None else g.to_json()}
                          for lab, g in self.terms],
                "surjection": self.surjection,
                "resolved": None if self.resolved is None else self.resolved.to_json()}


IntegralResult = GroupResult | SesResult | FourTermReport


def integral_from_json(d: dict):
    if d["kind"] == "fourterm":
        return FourTermReport(
            d["weight"],
            tuple((t["label"], None if t["group"] is None else GroupExpr.from_json(t["group"]))
                  for t in d["terms"]),
            None if d.get("resolved") is None else GroupExpr.from_json(d["resolved"]),
            d.get("surjection", False))
    return result_from_json(d)


def _odd_unit_pieces(f: Field, weight: int) -> GroupExpr:
    """``⊕_{l odd, l ≠ p} π_{1+wα} MZ_l{1}``."""
    if isinstance(f, Finite):
        if weight != -2:  # H^c with c = -1 - w must be 1 <= cd
            return GroupExpr.zero()
        out = GroupExpr.zero()
        for ell, e in factorint(f.q**2 - 1).items():
            if ell != 2 and ell != f.characteristic:
                out = out + fg(ell**e, label="1")
        return out
    if isinstance(f, AlgClosed):
        return GroupExpr.zero()  # c >= 1 exceeds the cohomological dimension
    return GroupExpr.of(Opaque(f"∏_{{l odd}}{pi_label(1, weight)}MZ_l", "odd-primary unit pieces"),
                        "1")


def _unit_piece_2(f: Field, weight: int) -> GroupExpr:
    if exp_char(f) == 2:
        return GroupExpr.zero()
    return unit_piece(f, 2, weight)


def fracture_assemble(f: Field, weight: int) -> IntegralResult:
    """Integral ``π_{1+wα} S[1/p]``."""
    p = exp_char(f)
    for ell in (2, 3):
        if ell != p and cd_check(f, ell) is not CdStatus.LOW_DIM:
            raise UnsupportedError(f"{f.spec_string()} is not low-dimensional at l = {ell}")
    w = weight
    n_mod = _moduli(p)
    if w >= 3 or w < -4:
        return GroupResult(GroupExpr.zero())
    if w == 2:
        return GroupResult(fg(n_mod, label="ν"))
    if w == 1:
        nu = milnor_k(f, 1, n_mod).labeled("ν")
        return GroupResult(nu if p == 2 else nu + fg(2, label="ηη_s"))
    if w == 0:
        kernel = milnor_k(f, 2, n_mod).labeled("ν")
        if p == 2:
            return GroupResult(kernel)
        quotient = milnor_k(f, 1, 2).labeled("ηη_s") + fg(2, label="η_s")
        return SesResult(kernel, "π₁", quotient, twist_law(f))
    if w == -1:
        if p == 2:
            return GroupResult(GroupExpr.zero())
        return GroupResult(milnor_k(f, 2, 2).labeled("ηη_s") + milnor_k(f, 1, 2).labeled("η_s"))
    label = f"{pi_label(1, w)}S[1/p]"
    t1 = adelic_rational(f, 2, w)
    t1_label = f"{pi_label(2, w)}(∏S∧_l)_Q"
    if w == -4:
        resolved = GroupExpr.zero() if t1.is_zero else None
        return FourTermReport(w, ((t1_label, t1), (label, None)), resolved, surjection=True)
    rat = rational_pi(f, 1, w)
    if w == -2:
        two = (milnor_k(f, 2, 2).labeled("η_s") if p != 2 else GroupExpr.zero()) \
            + _unit_piece_2(f, -2)
    else:
        two = _unit_piece_2(f, -3)
    l_pieces = two + _odd_unit_pieces(f, w)
    t4 = adelic_rational(f, 1, w)
    terms = ((t1_label, t1), (label, None),
             (f"{pi_label(1, w)}S_Q ⊕ {pi_label(1, w)}∏S∧_l", rat + l_pieces),
             (f"{pi_label(1, w)}(∏S∧_l)_Q", t4))
    resolved = None
    if t1.is_zero and rat.is_zero and t4.is_zero and l_pieces.is_explicit:
        resolved = GroupExpr.of(l_pieces.module().with_ring(ZZ))
    return FourTermReport(w, terms, resolved)


def fracture_caveats(f: Field, weight: int) -> list[str]:
    notes = []
    if weight == -1 and isinstance(f, AlgClosed):
        notes.append("the torsion-free pieces π_{1-α}MZ_l{1} = Z_l of the l-complete "
                     "answers cancel against the rational terms and do not appear integrally")
    for ell in (2, 3):
        if ell != exp_char(f) and isinstance(f, FunctionFieldOverFinite):
            notes.append("function field: groups computed from the answer layer only")
            break
    return notes


def l_complete_sum(f: Field, weight: int) -> GroupExpr:
    """Direct sum over l ≠ p of the l-complete associated graded pieces."""
    p = exp_char(f)
    pieces = []
    for ell in _primes_away(p):
        pieces += pi_one_l_complete(f, ell, weight).pieces()
    return GroupExpr.sum(pieces)


@dataclass(frozen=True)
class TorsionReport:
    all_torsion: bool
    witnesses: tuple[tuple[int, int, str, object], ...] = dc_field(default_factory=tuple)

    def __bool__(self):
        return self.all_torsion


def pi_two_torsion_check(f: Field, weights=range(-1, 7)) -> TorsionReport:
    """Every E2 entry of the 2-columns has finite order at each l <= 7 away from p."""
    if not isinstance(f, (Finite, AlgClosed)):
        raise UnknownCohomologyError(f"{f.spec_string()} lacks full chart data")
    witnesses = []
    ok = True
    for ell in _primes_away(exp_char(f)):
        for w in weights:
            col = assemble_e2_column(f, ell, 2, w, strict=True)
            for e in col.entries:
                o = e.order()
                witnesses.append((ell, w, e.label, o))
                if o is None or o == float("inf"):
                    ok = False
    return TorsionReport(ok, tuple(witnesses))
