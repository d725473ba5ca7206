"""Self-check suites behind ``motstem verify``.

Each suite returns a :class:`SuiteReport`; failures carry the counterexamples.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path

from .abgrp import FgModule, GroupExpr, smith_normal_form, tensor, tor1
from .fieldcat import Finite, NumberFieldNonreal, mot_cohom_fl
from .fracture import fracture_assemble
from .kmw import PiOneElement, hermitian_e, pi_one_add
from .manss import assemble_e2_column
from .ssinput import slice_collapse_check


@dataclass
class SuiteReport:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, detail):
        self.cases += 1
        if not ok:
            self.failures.append(detail)

    def to_json(self):
        return {"suite": self.name, "passed": self.passed, "cases": self.cases,
                "failures": [str(f) for f in self.failures]}


def _tensor_brute(m: int, n: int) -> int:
    # order of Z/m ⊗ Z/n = Z / (mZ + nZ): smallest positive a·m + b·n
    return min(a * m + b * n for a in range(-n, n + 1) for b in range(-m, m + 1)
               if a * m + b * n > 0)


def _tor_brute(m: int, n: int) -> int:
    # Tor(Z/m, Z/n) = m-torsion of Z/n
    return sum(1 for x in range(n) if (m * x) % n == 0)


def abgrp_oracle(rng_seed: int = 0, max_modulus: int = 30, random_sums: int = 200) -> SuiteReport:
    rep = SuiteReport("abgrp-oracle")
    for m in range(1, max_modulus + 1):
        for n in range(1, max_modulus + 1):
            a, b = FgModule.cyclic(m), FgModule.cyclic(n)
            rep.check(tensor(a, b).order() == _tensor_brute(m, n), ("tensor", m, n))
            rep.check(tor1(a, b).order() == _tor_brute(m, n), ("tor", m, n))
    rng = random.Random(rng_seed)
    for _ in range(random_sums):
        xs = [rng.randint(2, 12) for _ in range(rng.randint(1, 3))]
        ys = [rng.randint(2, 12) for _ in range(rng.randint(1, 3))]
        a, b = FgModule.from_cyclics(xs), FgModule.from_cyclics(ys)
        t = 1
        r = 1
        for x in xs:
            for y in ys:
                t *= _tensor_brute(x, y)
                r *= _tor_brute(x, y)
        rep.check(tensor(a, b).order() == t and tor1(a, b).order() == r, ("sum", xs, ys))
    for _ in range(50):
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        mat = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
        diag, left, right = smith_normal_form(mat)
        prod = _matmul(_matmul(left, mat), right)
        want = [[diag[i] if i == j and i < len(diag) else 0 for j in range(cols)]
                for i in range(rows)]
        rep.check(prod == want and abs(_det(left)) == 1 and abs(_det(right)) == 1, ("snf", mat))
    return rep


def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def _det(m):
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]])
               for j in range(len(m)))


def uct_orders(qs=(3, 5, 7, 9, 11, 13, 25, 27), weights=range(-3, 4)) -> SuiteReport:
    """Each Z/2-top pair in the 1-column has order |π MF_2| computed independently."""
    rep = SuiteReport("uct-orders")
    for q in qs:
        f = Finite(q)
        for w in weights:
            col = assemble_e2_column(f, 2, 1, w, keep_zero=True)
            pairs: dict = {}
            for e in col.entries:
                top_order = 2 if e.gen.startswith("α₁") else None
                if top_order is None:
                    continue
                m, n = e.coefficient
                key = (e.gen, m + (1 if e.kind.value == "TOR" else 0), n)
                pairs[key] = pairs.get(key, 1) * e.order()
            for (gen, m, n), total in pairs.items():
                expected = mot_cohom_fl(f, m, n, 2).order()
                rep.check(total == expected, (q, w, gen, m, n, total, expected))
    return rep


_FINITE_QS = (3, 5, 7, 9, 11, 13, 25, 27)


def finite_field_expected(q: int, n: int) -> tuple[int, ...]:
    """Invariant factors the finite-field 1-line table lists for weight n."""
    if n >= 3 or n <= -2:
        return ()
    if n == 2:
        return (24,)
    if n == 1:
        return tuple(sorted(d for d in (gcd(q - 1, 24), 2) if d > 1))
    if n == 0:
        return (2, 2)
    return (gcd(q - 1, 2),) if gcd(q - 1, 2) > 1 else ()


def _invariant_factors(result) -> tuple[int, ...] | None:
    g = GroupExpr.sum(result.pieces())
    if not g.is_explicit:
        return None
    mod = g.module()
    return tuple(FgModule.from_cyclics(mod.torsion).torsion)


def _invariants_of(orders) -> tuple[int, ...]:
    return FgModule.from_cyclics([o for o in orders if o > 1]).torsion


def finitefield_table(qs=_FINITE_QS, weights=range(-6, 7)) -> SuiteReport:
    rep = SuiteReport("finitefield-table")
    for q in qs:
        for n in weights:
            got = _invariant_factors(fracture_assemble(Finite(q), n))
            want = _invariants_of(finite_field_expected(q, n))
            rep.check(got == want, f"q={q} n={n}: computed {got}, table {want}")
    return rep


def twistlaw(cases: int = 1000, seed: int = 0) -> SuiteReport:
    rep = SuiteReport("twistlaw")
    rng = random.Random(seed)
    f = NumberFieldNonreal(1)
    labels = ["-1", "u", "v", "w", "x", "1-u"]

    def rand_elem():
        units = tuple(rng.choice(labels) for _ in range(rng.randint(0, 3)))
        nu = [(rng.choice(labels), rng.choice(labels), rng.randint(0, 23))
              for _ in range(rng.randint(0, 2))]
        return PiOneElement.make(f, nu, units, rng.randint(0, 1))

    for _ in range(cases):
        x, y, z = rand_elem(), rand_elem(), rand_elem()
        rep.check(pi_one_add(x, y, f) == pi_one_add(y, x, f), ("commutative", str(x), str(y)))
        lhs = pi_one_add(pi_one_add(x, y, f), z, f)
        rhs = pi_one_add(x, pi_one_add(y, z, f), f)
        rep.check(lhs == rhs, ("associative", str(x), str(y), str(z)))
        d = pi_one_add(x, x, f)
        rep.check(not d.eta_s and not d.eta_eta_s, ("doubling", str(x)))
        ex, ey = hermitian_e(x), hermitian_e(y)
        esum = hermitian_e(pi_one_add(x, y, f))
        prod = PiOneElement.make(f, (), ex[0] + ey[0], 0).eta_eta_s
        rep.check(esum == (prod, (ex[1] + ey[1]) % 2), ("homomorphism", str(x), str(y)))
        pure_nu = PiOneElement(x.nu, (), 0, f)
        rep.check(hermitian_e(pure_nu) == ((), 0), ("kernel", str(x)))
    return rep


def slice_collapse(max_cd: int = 6, r_max: int = 10) -> SuiteReport:
    rep = SuiteReport("slice-collapse")
    for cd in range(max_cd + 1):
        for r in range(1, r_max + 1):
            rep.check(slice_collapse_check(cd, r).collapses == (cd <= 2), (cd, r))
    return rep


def golden_suite(name: str, golden_dir: Path) -> SuiteReport:
    from .goldens import GOLDEN_CASES, render_golden
    rep = SuiteReport(name)
    for case in GOLDEN_CASES[name]:
        path = golden_dir / case.filename
        if not path.exists():
            rep.check(False, f"missing golden {path}")
            continue
        rep.check(path.read_text(encoding="utf-8") == render_golden(case), f"mismatch {path.name}")
    return rep


SUITES = {
    "abgrp-oracle": abgrp_oracle,
    "uct-orders": uct_orders,
    "finitefield-table": finitefield_table,
    "twistlaw": twistlaw,
    "slice-collapse": slice_collapse,
    "table1-golden": None,
    "table3-golden": None,
}


def run_suite(name: str, golden_dir: Path | None = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(name)
    if SUITES[name] is None:
        return golden_suite(name, golden_dir or Path("tests/golden"))
    return SUITES[name]()
