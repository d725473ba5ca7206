"""Motivic Adams–Novikov columns: E2 assembly, differentials, extensions.

The E2 page is tensor-plus-Tor of the topological E2 page against
``π_{m+nα} MZ_l``. A topological class ``x`` in ``(s, t)`` tensored with
``π_{m+nα}`` lands in filtration ``s`` of the ``m + t/2 - s`` column at weight
``n + t/2``; its Tor partner sits one filtration lower and one column to the
right.

At l = 2 every entry of the 1-column is the unit, ``α_{2/2} ⊗ π_{(w-2)α}``, or
one of the pairs ``{Tor(α₁^k, π_{(w-k)α}), α₁^k ⊗ π_{1+(w-k)α}}``, which
together make up ``π_{1+(w-k)α} MF_2{α₁^k} = K^M_{k-w-1}/2``. Pairs with
``k >= 4`` die, the ``k = 3`` pair is cut down by a d3 out of column 2, and
everything else survives.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .abgrp import (FgModule, GroupExpr, Opaque, expr_tensor, expr_tor, fg,
                    zl)
from .errors import (CharacteristicError, InconsistencyError,
                     UnknownCohomologyError, UnsupportedError)
from .fieldcat import (CdStatus, Field, Finite, AlgClosed, cd_check, milnor_k,
                       mot_cohom_fl, try_mot_cohom_zl)
from .ssinput import CURATED_MAX_STEM, TopAnssEntry, alpha1_power, top_anss_entries

_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def bidegree(m: int, n: int) -> str:
    """Compact bidegree text.

    >>> bidegree(1, -2), bidegree(0, -1), bidegree(2, 0)
    ('1-2α', '-α', '2')
    """
    if n == 0:
        return str(m)
    alpha = "α" if abs(n) == 1 else f"{abs(n)}α"
    if m == 0:
        return alpha if n > 0 else "-" + alpha
    return f"{m}{'+' if n > 0 else '-'}{alpha}"


def pi_label(m: int, n: int) -> str:
    return "π_{" + bidegree(m, n) + "}"


def coefficient_label(m: int, n: int, ell: int) -> str:
    return pi_label(m, n) + "MZ" + str(ell).translate(_SUB)


class EntryKind(enum.Enum):
    TENSOR = "TENSOR"
    TOR = "TOR"
    MERGED = "MERGED"


@dataclass(frozen=True)
class ChartEntry:
    s: int
    stem: int
    weight: int
    group: GroupExpr
    gen: str
    kind: EntryKind
    source: tuple[str, tuple[int, int]]
    flags: tuple[str, ...] = ()

    @property
    def coefficient(self) -> tuple[int, int]:
        return self.source[1]

    @property
    def label(self) -> str:
        m, n = self.coefficient
        if self.kind is EntryKind.TENSOR:
            return f"{self.gen}⊗{pi_label(m, n)}"
        if self.kind is EntryKind.TOR:
            return f"Tor({self.gen},{pi_label(m, n)})"
        if self.gen.startswith("τ"):
            return self.gen
        return f"{self.gen}·{pi_label(m, n)}MF"

    def order(self):
        return self.group.order()

    def to_json(self) -> dict:
        return {"s": self.s, "stem": self.stem, "weight": self.weight,
                "group": self.group.to_json(), "gen": self.gen,
                "kind": self.kind.value,
                "source": {"top": self.source[0], "m": self.source[1][0],
                           "n": self.source[1][1]},
                "flags": list(self.flags)}

    @classmethod
    def from_json(cls, d: dict) -> ChartEntry:
        src = d["source"]
        return cls(d["s"], d["stem"], d["weight"], GroupExpr.from_json(d["group"]),
                   d["gen"], EntryKind(d["kind"]), (src["top"], (src["m"], src["n"])),
                   tuple(d.get("flags", ())))


def _sort_key(e: ChartEntry):
    return (e.s, e.kind.value, e.gen, e.coefficient)


@dataclass(frozen=True)
class ChartColumn:
    stem: int
    weight: int
    prime: int
    entries: tuple[ChartEntry, ...]
    page: str = "E2"
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(sorted(self.entries, key=_sort_key)))

    def order(self):
        """Product of entry orders; None when some entry is symbolic."""
        total = 1
        for e in self.entries:
            o = e.order()
            if o is None:
                return None
            total *= o
        return total

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def at(self, s: int) -> list[ChartEntry]:
        return [e for e in self.entries if e.s == s]

    def find(self, gen: str, kind: EntryKind | None = None) -> list[ChartEntry]:
        return [e for e in self.entries
                if e.gen == gen and (kind is None or e.kind is kind)]

    def to_json(self) -> dict:
        return {"stem": self.stem, "weight": self.weight, "prime": self.prime,
                "page": self.page, "notes": list(self.notes),
                "entries": [e.to_json() for e in self.entries]}

    @classmethod
    def from_json(cls, d: dict) -> ChartColumn:
        return cls(d["stem"], d["weight"], d["prime"],
                   tuple(ChartEntry.from_json(e) for e in d["entries"]),
                   d.get("page", "E2"), tuple(d.get("notes", ())))


# --- E2 assembly -----------------------------------------------------------------


def _require_low_dim(f: Field, ell: int):
    status = cd_check(f, ell)
    if status is CdStatus.EQUALS_CHAR:
        raise CharacteristicError(f"l = {ell} is the characteristic of {f.spec_string()}")
    if status is not CdStatus.LOW_DIM:
        raise UnsupportedError(f"{f.spec_string()} is not low-dimensional at l = {ell}")


def _tops_for_column(ell: int, stem: int, weight: int) -> list[TopAnssEntry]:
    # Entries with topological stem in [stem + weight - 1, stem + weight + 2]
    # can contribute; nothing else meets the coefficient window.
    top_stem = max(stem + weight + 2, 0)
    if ell == 2:
        return top_anss_entries(2, top_stem, tower_extension=True)
    # Odd l: E2^{s,t} = 0 for 0 < t - s < (2l - 3)s, so a class with stem above
    # 6 sits too low to reach columns 0-2 through a nonzero coefficient.
    return top_anss_entries(ell, min(top_stem, CURATED_MAX_STEM))


@dataclass
class _Candidate:
    top: TopAnssEntry
    kind: EntryKind
    s: int
    coeff: tuple[int, int]
    value: GroupExpr | None
    flags: tuple[str, ...] = ()


def _candidates(f, ell, stem, weight, override):
    out = []
    for top in _tops_for_column(ell, stem, weight):
        th = top.t // 2
        n = weight - th
        placements = [(EntryKind.TENSOR, top.s, stem - th + top.s)]
        if top.s >= 1:
            placements.append((EntryKind.TOR, top.s - 1, stem - th + top.s - 1))
        for kind, s, m in placements:
            c = -m - n
            if m < 0 or c < 0 or c > f.cd(ell):
                continue
            coeff = try_mot_cohom_zl(f, m, n, ell, override)
            if coeff is None:
                value = None
            elif kind is EntryKind.TENSOR:
                value = expr_tensor(top.group, coeff)
            else:
                value = expr_tor(top.group, coeff)
            out.append(_Candidate(top, kind, s, (m, n), value))
    return out


def _elementary_dim(expr: GroupExpr, ell: int) -> int | None:
    if not expr.is_explicit:
        return None
    mod = expr.module()
    if mod.free or any(d != ell for d in mod.torsion):
        return None
    return len(mod.torsion)


def _resolve_mod_l(cands: list[_Candidate], f, ell, override) -> list[_Candidate]:
    """Fill unknown Z/l-coefficient pieces from π_{m+nα} MF_l, or merge the pair."""
    by_pair: dict = {}
    for c in cands:
        if c.top.group.torsion == (ell,) and c.top.group.free == 0:
            m_upper = c.coeff[0] + (1 if c.kind is EntryKind.TOR else 0)
            by_pair.setdefault((c.top.name, m_upper, c.coeff[1]), []).append(c)
    out = [c for c in cands if not (c.top.group.torsion == (ell,) and c.top.group.free == 0)]
    for (name, m, n), pair in by_pair.items():
        tens = next((c for c in pair if c.kind is EntryKind.TENSOR), None)
        tor = next((c for c in pair if c.kind is EntryKind.TOR), None)
        top = pair[0].top
        if tens is None:
            tens = _Candidate(top, EntryKind.TENSOR, top.s, (m, n), GroupExpr.zero())
        if tor is None:
            tor = _Candidate(top, EntryKind.TOR, top.s - 1, (m - 1, n), GroupExpr.zero())
        exact = [x for x in (tens, tor) if x.value is not None and x.value.is_exact]
        if len(exact) == 2:
            out += [tens, tor]
            continue
        total = mot_cohom_fl(f, m, n, ell, override)
        known = exact[0] if exact else None
        other = tor if known is tens else tens
        if known is not None:
            dim_total = _elementary_dim(total, ell)
            dim_known = _elementary_dim(known.value, ell)
            if dim_total is not None and dim_known is not None:
                if dim_known > dim_total:
                    raise InconsistencyError(
                        f"Bockstein piece of {name} exceeds π_{{{bidegree(m, n)}}}MF_{ell}")
                other.value = fg(*([ell] * (dim_total - dim_known)), ring=zl(ell))
                other.flags = ("mod-l",)
                out += [known, other]
                continue
            if known.value.is_zero and total.is_exact:
                other.value = total
                other.flags = ("mod-l",)
                out += [known, other]
                continue
        if total.is_exact:
            out.append(_Candidate(top, EntryKind.MERGED, top.s, (m, n), total, ("merged",)))
            continue
        out += [tens, tor]
    return out


def assemble_e2_column(f: Field, ell: int, stem: int, weight: int, *,
                       override=None, strict: bool = True,
                       keep_zero: bool = False, resolve_mod_l: bool = True) -> ChartColumn:
    """E2 entries of the ``stem + weight·α`` column of the l-MANSS.

    With ``strict`` an unknown coefficient that no mod-l identification can
    recover raises UnknownCohomologyError; otherwise it becomes an OPAQUE entry
    flagged ``unknown``. ``keep_zero`` with ``resolve_mod_l=False`` gives the
    field-independent skeleton of the column.
    """
    _require_low_dim(f, ell)
    if not f.chart_capable:
        raise UnsupportedError(f"{f.spec_string()} is answer-layer only (no chart assembly)")
    cands = _candidates(f, ell, stem, weight, override)
    if resolve_mod_l:
        cands = _resolve_mod_l(cands, f, ell, override)
    entries = []
    for c in cands:
        value, flags = c.value, c.flags
        if value is None:
            label = coefficient_label(*c.coeff, ell)
            if strict:
                raise UnknownCohomologyError(
                    f"{label} is unknown for {f.spec_string()} ({c.top.name} entry)")
            text = (f"{c.top.group}⊗{label}" if c.kind is EntryKind.TENSOR
                    else f"Tor({c.top.group},{label})")
            value = GroupExpr.of(Opaque(text, "coefficient unknown"))
            flags = flags + ("unknown",)
        if value.is_zero and not keep_zero:
            continue
        if not c.top.verified:
            flags = flags + ("unverified",)
        entries.append(ChartEntry(c.s, stem, weight, value, c.top.name,
                                  c.kind, (c.top.name, c.coeff), flags))
    return ChartColumn(stem, weight, ell, tuple(entries))


# --- differentials -------------------------------------------------------------


def _alpha1_exponent(gen: str) -> int | None:
    for k in range(1, 64):
        if alpha1_power(k) == gen:
            return k
    return None


def _tau_alpha1_cubed(f: Field, j: int, override=None) -> GroupExpr:
    """``K^M_j/(2, image of Tor(Z/4, K^M_j))`` computed from ``π_{-jα} MZ_2``."""
    a = try_mot_cohom_zl(f, 0, -j, 2, override)
    if a is None or not a.is_explicit:
        return GroupExpr.of(Opaque(f"K^M_{j}(k)/(2,Tor(Z/4,K^M_{j}(k)))",
                                   "d3 image of the α_{2/2} Tor class"))
    mod = a.module()
    # a cyclic Z/2^v keeps a Z/2 exactly when v >= 3; a free summand always does
    dim = mod.free + sum(1 for d in mod.torsion if d >= 8)
    return fg(*([2] * dim), ring=zl(2))


def apply_differential_rules(col1: ChartColumn, col0: ChartColumn | None,
                             col2: ChartColumn | None, f: Field, ell: int,
                             weight: int, override=None) -> ChartColumn:
    """E∞ 1-column. Nothing leaves the 1-column; at l = 2 the α₁-towers die
    from ``α₁⁴`` on and the ``α₁³`` pair loses the d3 image of
    ``Tor(α_{2/2}, π_{(w-2)α})``."""
    for col in (col0, col2):
        if col is not None and (col.prime, col.weight) != (ell, weight):
            raise ValueError("columns come from different charts")
    if (col1.prime, col1.weight) != (ell, weight) or col1.stem != 1:
        raise ValueError("col1 must be the 1-column at the given prime and weight")
    if ell != 2:
        return replace(col1, page="E∞", notes=("no differentials reach the 1-column",))
    kept, notes = [], []
    tau_pair = []
    for e in col1.entries:
        k = _alpha1_exponent(e.gen)
        if e.gen in ("1", "α_{2/2}") and e.kind is EntryKind.TENSOR:
            kept.append(e)
        elif k is None:
            raise UnsupportedError(f"no differential rule for {e.label} at weight {weight}")
        elif k <= 2:
            kept.append(e)
        elif k == 3:
            tau_pair.append(e)
        else:
            notes.append(f"{e.label} killed: multiple of η³η_s = 4ην = 0")
    if tau_pair:
        j = 2 - weight
        group = _tau_alpha1_cubed(f, j, override)
        d3_source = f"Tor(α_{{2/2}},{pi_label(0, weight - 2)})"
        notes.append(f"d3 from {d3_source} cuts the α₁³ pair to K^M_{j}/(2,Tor(Z/4,K^M_{j}))")
        if not group.is_zero:
            kept.append(ChartEntry(3, 1, weight, group, "τα₁³", EntryKind.MERGED,
                                   ("α₁³", (1, weight - 3)), ("d3-quotient",)))
    return ChartColumn(1, weight, ell, tuple(kept), page="E∞", notes=tuple(notes))


def two_column_einf(f: Field, ell: int, weight: int) -> ChartColumn:
    """The ``2 + nα`` column is wiped out for ``n >= 5``; lower weights are open."""
    if weight < 5:
        raise UnsupportedError("differentials into the 2-column are only settled for weight >= 5")
    col = assemble_e2_column(f, ell, 2, weight, strict=False)
    return ChartColumn(2, weight, ell, (), page="E∞",
                       notes=tuple(f"{e.label} killed" for e in col.entries))


# --- l-complete answers ----------------------------------------------------------


@dataclass(frozen=True)
class TwistLaw:
    """``[u]ηη_s + [v]ηη_s = [uv]ηη_s - c[u,v]ν`` with ν of order ``modulus``."""

    coefficient: int
    modulus: int

    @property
    def tag(self) -> str:
        return f"twist{self.coefficient}nu"

    def __str__(self):
        return f"−{self.coefficient}[u,v]ν"

    @classmethod
    def from_tag(cls, tag: str) -> TwistLaw:
        c = int(tag.removeprefix("twist").removesuffix("nu"))
        return cls(c, {12: 24, 4: 8, 0: 3}.get(c, 2 * c))


def _canonical_of(exprs) -> tuple:
    return GroupExpr.sum(exprs).canonical()


@dataclass(frozen=True)
class GroupResult:
    group: GroupExpr
    kind = "group"

    def pieces(self):
        return [self.group]

    def order(self):
        return self.group.order()

    def render(self) -> str:
        return self.group.simplify().render()

    def to_json(self):
        return {"kind": "group", "group": self.group.to_json()}


@dataclass(frozen=True)
class SesResult:
    kernel: GroupExpr
    name: str
    quotient: GroupExpr
    addition_law: TwistLaw | None = None
    kind = "SES"

    def pieces(self):
        return [self.kernel, self.quotient]

    def order(self):
        a, b = self.kernel.order(), self.quotient.order()
        return None if a is None or b is None else a * b

    def render(self) -> str:
        if self.kernel.is_zero:
            return self.quotient.simplify().render()
        if self.quotient.is_zero:
            return self.kernel.simplify().render()
        return (f"0 → {self.kernel.simplify().render(False)} → {self.name} → "
                f"{self.quotient.simplify().render(False)} → 0")

    def to_json(self):
        d = {"kind": "SES", "kernel": self.kernel.to_json(), "name": self.name,
             "quotient": self.quotient.to_json()}
        if self.addition_law is not None:
            d["additionLaw"] = self.addition_law.tag
        return d


@dataclass(frozen=True)
class GradedResult:
    """Associated graded, listed from filtration 0 upwards."""

    graded: tuple[GroupExpr, ...]
    kind = "graded"

    def pieces(self):
        return list(self.graded)

    def order(self):
        total = 1
        for g in self.graded:
            o = g.order()
            if o is None:
                return None
            total *= o
        return total

    def render(self) -> str:
        parts = [g.simplify().render() for g in self.graded if not g.is_zero]
        return "gr: " + (", ".join(parts) if parts else "0")

    def to_json(self):
        return {"kind": "graded", "graded": [g.to_json() for g in self.graded]}


LCompleteResult = GroupResult | SesResult | GradedResult


def result_canonical(result) -> tuple:
    """Isomorphism key of the associated graded."""
    return _canonical_of(result.pieces())


def result_from_json(d: dict):
    kind = d["kind"]
    if kind == "group":
        return GroupResult(GroupExpr.from_json(d["group"]))
    if kind == "SES":
        law = d.get("additionLaw")
        return SesResult(GroupExpr.from_json(d["kernel"]), d.get("name", "π₁"),
                         GroupExpr.from_json(d["quotient"]),
                         TwistLaw.from_tag(law) if law else None)
    if kind == "graded":
        return GradedResult(tuple(GroupExpr.from_json(g) for g in d["graded"]))
    raise ValueError(f"unknown result kind {kind!r}")


def unit_piece(f: Field, ell: int, weight: int, override=None) -> GroupExpr:
    """``π_{1+wα} MZ_l{1}``, the permanent unit contribution to the 1-column."""
    g = try_mot_cohom_zl(f, 1, weight, ell, override)
    if g is None:
        g = GroupExpr.of(Opaque(coefficient_label(1, weight, ell), "motivic cohomology unknown"))
    return g.labeled("1")


_PAIR_LABEL = {1: "η_s", 2: "ηη_s"}


def resolve_extensions(einf: ChartColumn | None, f: Field, ell: int, weight: int,
                       override=None):
    """Group structure on the E∞ 1-column; checks total orders when finite."""
    w = weight
    if ell == 2:
        if w >= 3 or w <= -4:
            result = GroupResult(GroupExpr.zero())
        elif w == 2:
            result = GroupResult(fg(8, label="ν"))
        elif w == 1:
            result = GroupResult(milnor_k(f, 1, 8).labeled("ν") + fg(2, label="ηη_s"))
        elif w == 0:
            result = SesResult(milnor_k(f, 2, 8).labeled("ν"), "π₁𝖲∧₂",
                               milnor_k(f, 1, 2).labeled("ηη_s") + fg(2, label="η_s"))
        elif w == -1:
            result = GradedResult((unit_piece(f, 2, -1, override),
                                   milnor_k(f, 1, 2).labeled("η_s"),
                                   milnor_k(f, 2, 2).labeled("ηη_s")))
        elif w == -2:
            result = SesResult(milnor_k(f, 2, 2).labeled("η_s"), "π_{1-2α}𝖲∧₂",
                               unit_piece(f, 2, -2, override))
        else:
            result = GroupResult(unit_piece(f, 2, -3, override))
    elif ell == 3 and 0 <= w <= 2:
        result = GroupResult(milnor_k(f, 2 - w, 3).labeled("ν"))
    elif -3 <= w <= -1:
        result = GroupResult(unit_piece(f, ell, w, override))
    else:
        result = GroupResult(GroupExpr.zero())
    if einf is not None:
        _check_orders(result, einf, f, ell, w)
    return result


def _check_orders(result, einf: ChartColumn, f, ell, w):
    got, expected = result.order(), einf.order()
    if got is None or expected is None:
        return
    if got != expected:
        raise InconsistencyError(
            f"order bookkeeping failed for {f.spec_string()} at l={ell}, weight {w}: "
            f"answer has order {got}, E∞ column has order {expected}")


def pi_one_l_complete(f: Field, ell: int, weight: int, override=None,
                      with_columns: bool = False):
    """``π_{1+wα}`` of the l-completed sphere: assemble, differentiate, resolve."""
    _require_low_dim(f, ell)
    if not f.chart_capable:
        result = resolve_extensions(None, f, ell, weight, override)
        return (result, None) if with_columns else result
    col1 = assemble_e2_column(f, ell, 1, weight, override=override, strict=False)
    col0 = assemble_e2_column(f, ell, 0, weight, override=override, strict=False)
    col2 = assemble_e2_column(f, ell, 2, weight, override=override, strict=False)
    einf = apply_differential_rules(col1, col0, col2, f, ell, weight, override)
    result = resolve_extensions(einf, f, ell, weight, override)
    if with_columns:
        return result, {"E2": (col0, col1, col2), "E∞": einf}
    return result


# --- zero line -----------------------------------------------------------------


def morel_zero_line(f: Field, n: int) -> GroupExpr:
    """``π_{nα} S = K^MW_{-n}(k)``."""
    if isinstance(f, Finite):
        odd = f.q % 2
        if n == 0:
            return fg(0, 2) if odd else fg(0)
        if n == -1:
            return fg(f.q - 1)
        if n < -1:
            return GroupExpr.zero()
        if not odd:
            return fg(2)
        return fg(4) if f.q % 4 == 3 else fg(2, 2)
    if isinstance(f, AlgClosed):
        if n == 0:
            return fg(0)
        if n > 0:
            return fg(2)
        return milnor_k(f, -n, 0)
    label = "GW(k)" if n == 0 else ("W(k)" if n > 0 else f"K^MW_{-n}(k)")
    return GroupExpr.of(Opaque(label, "Milnor-Witt K-group of a general field"))
