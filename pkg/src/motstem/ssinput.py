"""Topological Adams–Novikov input, slice collapse bookkeeping, BP coefficients.

The topological E2 page is a frozen low-stem dataset. Above the curated window
only the α₁-towers (``α₁^k`` and ``α₃α₁^j``) are available, and only through
``tower_extension=True``; those are the sole classes in filtration
``s >= (t - s) - 4`` that columns 0-2 of the high-weight charts consume.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count

from sympy import isprime

from .abgrp import FgModule, GroupExpr, zl
from .errors import UnsupportedError
from .fieldcat import CdStatus, Field, cd_check, try_mot_cohom_zl

CURATED_MAX_STEM = 7

_SUPERSCRIPT = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def alpha1_power(k: int) -> str:
    return "α₁" if k == 1 else "α₁" + str(k).translate(_SUPERSCRIPT)


def alpha3_alpha1_power(j: int) -> str:
    return "α₃" if j == 0 else "α₃" + alpha1_power(j)


@dataclass(frozen=True)
class TopAnssEntry:
    name: str
    s: int
    t: int
    group: FgModule
    verified: bool = True
    family: str = ""

    def __post_init__(self):
        if self.t % 2 or self.t - self.s < 0:
            raise ValueError(f"bad bidegree ({self.s},{self.t}) for {self.name}")

    @property
    def stem(self) -> int:
        return self.t - self.s

    def to_json(self) -> dict:
        g = self.group
        order = f"Z{g.ring.ell}-free" if g.free else g.order()
        return {"name": self.name, "s": self.s, "t": self.t, "order": order,
                "verified": self.verified}


def _cyc(order: int, ell: int) -> FgModule:
    return FgModule.cyclic(order, zl(ell))


def _towers(ell: int, max_stem: int, min_stem: int = 0) -> list[TopAnssEntry]:
    out = []
    for k in count(1):
        if k > max_stem:
            break
        if k >= min_stem:
            out.append(TopAnssEntry(alpha1_power(k), k, 2 * k, _cyc(2, ell),
                                    family="alpha1"))
    for j in count(0):
        stem = 5 + j
        if stem > max_stem:
            break
        if stem >= min_stem:
            out.append(TopAnssEntry(alpha3_alpha1_power(j), 1 + j, 6 + 2 * j,
                                    _cyc(2, ell), family="alpha3"))
    return out


def top_anss_entries(ell: int, max_stem: int, *,
                     tower_extension: bool = False) -> list[TopAnssEntry]:
    """Entries of the topological E2 page with stem ``t - s <= max_stem``."""
    if not isprime(ell):
        raise ValueError(f"{ell} is not prime")
    if max_stem > CURATED_MAX_STEM and not (tower_extension and ell == 2):
        raise UnsupportedError(
            f"stem {max_stem} exceeds the curated range (<= {CURATED_MAX_STEM})")
    window = min(max_stem, CURATED_MAX_STEM)
    entries = [TopAnssEntry("1", 0, 0, FgModule.free_module(1, zl(ell)), family="unit")]
    if ell == 2:
        entries += _towers(2, window)
        entries += [
            TopAnssEntry("α_{2/2}", 1, 4, _cyc(4, 2), family="alpha22"),
            TopAnssEntry("β_{2/2}", 2, 8, _cyc(2, 2), verified=False),
            TopAnssEntry("α_{4/4}", 1, 8, _cyc(16, 2)),
        ]
        if max_stem > CURATED_MAX_STEM:
            entries += _towers(2, max_stem, CURATED_MAX_STEM + 1)
    elif ell == 3:
        entries += [TopAnssEntry("α₁", 1, 4, _cyc(3, 3)),
                    TopAnssEntry("α₂", 1, 8, _cyc(3, 3), verified=False)]
    elif 2 * ell - 3 <= window:
        entries.append(TopAnssEntry("α₁", 1, 2 * ell - 2, _cyc(ell, ell)))
    entries = [e for e in entries if e.stem <= max_stem]
    return sorted(entries, key=lambda e: (e.stem, e.s, e.name))


def dataset_json(ell: int, max_stem: int = CURATED_MAX_STEM) -> list[dict]:
    return [e.to_json() for e in top_anss_entries(ell, max_stem)]


@dataclass(frozen=True)
class SliceDifferentialReport:
    """Triples ``(r, source window index, target window index)`` that could be nonzero."""

    triples: tuple[tuple[int, int, int], ...]

    @property
    def collapses(self) -> bool:
        return not self.triples


def slice_collapse_check(cd: int, r_max: int) -> SliceDifferentialReport:
    """A d_r moves the window index ``2q - (m+n)`` from ``w`` to ``w + 2r + 1``."""
    if cd < 0 or r_max < 1:
        raise ValueError("need cd >= 0 and r_max >= 1")
    triples = tuple((r, w, w + 2 * r + 1)
                    for w in range(cd + 1) for r in range(1, r_max + 1)
                    if w + 2 * r + 1 <= cd)
    return SliceDifferentialReport(triples)


@dataclass(frozen=True)
class BpMonomial:
    exponents: tuple[int, ...]  # exponent of v_1, v_2, ...
    degree: int  # diagonal degree d, the bidegree is d(1+α)
    coefficients: tuple[tuple[tuple[int, int], GroupExpr | None], ...]

    @property
    def name(self) -> str:
        if not any(self.exponents):
            return "1"
        parts = []
        for i, e in enumerate(self.exponents, start=1):
            if e:
                sub = str(i).translate(str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉"))
                parts.append(f"v{sub}" + ("" if e == 1 else str(e).translate(_SUPERSCRIPT)))
        return "".join(parts)


def _partitions(total: int, sizes: list[int]) -> list[tuple[int, ...]]:
    if not sizes:
        return [()] if total == 0 else []
    out = []
    for e in range(total // sizes[0] + 1):
        for rest in _partitions(total - e * sizes[0], sizes[1:]):
            out.append((e,) + rest)
    return out


def bp_monomials(ell: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors with ``sum e_i (l^i - 1) == degree``."""
    sizes = []
    i = 1
    while ell**i - 1 <= max(degree, 1):
        sizes.append(ell**i - 1)
        i += 1
    return sorted(_partitions(degree, sizes), reverse=True)


def bp_coefficients(f: Field, ell: int, max_total_dim: int) -> list[BpMonomial]:
    """Monomials in the v_i of total dimension ``2d <= max_total_dim``.

    Each monomial carries the motivic cohomology groups ``π_{m+nα} MZ_l`` with
    ``0 <= m <= 2`` inside the cohomological window; None marks an unknown group.
    """
    status = cd_check(f, ell)
    if status is not CdStatus.LOW_DIM:
        raise UnsupportedError(f"{f.spec_string()} is not low-dimensional at {ell}: {status.value}")
    coeffs = []
    for m in range(3):
        for c in range(f.cd(ell) + 1):
            coeffs.append(((m, -m - c), try_mot_cohom_zl(f, m, -m - c, ell)))
    out = []
    for d in range(max_total_dim // 2 + 1):
        for exps in bp_monomials(ell, d):
            out.append(BpMonomial(exps, d, tuple(coeffs)))
    return out
