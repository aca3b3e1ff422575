"""Command-line front end.

Subcommands::

    compute   evaluate one invariant and print its exact value as "p/q"
    trace     same, writing the recursion trace as indented text
    strata    enumerate boundary divisors with their multiplicities
    table     tabulate relative invariants of (P^2, H) up to a degree
    selftest  run the built-in acceptance checks

Exit codes: 0 success, 2 parse error, 3 validation error, 4 fixture
conflict, 5 file write failure.
"""

from __future__ import annotations

import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction as Rat
from math import factorial, prod

import click

from . import engine, store as store_mod
from .genus1 import UnsupportedKeyError
from .keys import (
    Insertion,
    InvariantKey,
    TangencyVector,
    ValidationError,
    parse_insertion,
    rat_to_str,
)
from .multiplicity import contribution_factor, splitting_degree, vanishing_order
from .store import FixtureConflictError
from .tropical import enumerate_boundary_divisors

EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_FIXTURE_CONFLICT = 4
EXIT_WRITE = 5

THEORY_NAMES = {
    "absolute-Y": ("AbsoluteDivisor", 1),
    "relative": ("Relative", 1),
    "rubber": ("Rubber", 1),
    "absolute-X-g0": ("AbsoluteAmbient", 0),
}


@click.group()
def main():
    """Exact reduced Gromov-Witten invariants of (P^m, hyperplane)."""


def _parse_int_list(text: str, what: str) -> tuple[int, ...]:
    if not text.strip():
        return ()
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            out.append(int(tok))
        except ValueError:
            raise click.UsageError(f"malformed {what} entry {tok!r}")
    return tuple(out)


def _build_key(target, theory, genus, degree, tangency, insertions):
    theory_name, default_genus = THEORY_NAMES[theory]
    if genus is None:
        genus = default_genus
    orders = _parse_int_list(tangency or "", "tangency")
    ins_tokens = [t for t in (insertions or "").split(",") if t.strip()]
    try:
        parsed = [parse_insertion(tok, i) for i, tok in enumerate(ins_tokens)]
    except ValidationError as exc:
        raise click.UsageError(str(exc))
    n = max(len(orders), len(parsed))
    parsed += [Insertion(markIndex=i) for i in range(len(parsed), n)]
    tv = None
    if theory_name in ("Relative", "Rubber"):
        entries = orders + (0,) * (n - len(orders))
        tv = TangencyVector(entries=entries, degree=degree)
    elif orders:
        raise click.UsageError(f"theory {theory} does not take a tangency vector")
    return InvariantKey(
        theory=theory_name, m=target, genus=genus, degree=degree,
        tangency=tv, insertions=tuple(parsed),
    )


def _open_store(cache_path, m):
    path = cache_path or store_mod.default_cache_path()
    if path is None:
        return None, None
    import os
    try:
        if os.path.exists(path):
            st = store_mod.load(path)
            # the packaged fixture table stays authoritative over any
            # record the cache file may carry
            st.merge(store_mod.fixture_store(m=st.m))
        else:
            st = store_mod.fixture_store(m=m)
    except FixtureConflictError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FIXTURE_CONFLICT)
    except store_mod.StoreError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    return st, path


def _save_store(st, path):
    if st is None or path is None:
        return
    try:
        st.save(path)
    except OSError as exc:
        click.echo(f"error: cannot write cache {path}: {exc}", err=True)
        sys.exit(EXIT_WRITE)


def _common_options(fn):
    fn = click.option("--target", "-m", type=int, default=2,
                      help="ambient projective dimension m")(fn)
    fn = click.option("--theory", type=click.Choice(sorted(THEORY_NAMES)),
                      required=True)(fn)
    fn = click.option("--genus", type=click.IntRange(0, 1), default=None,
                      help="override the theory's default genus")(fn)
    fn = click.option("--degree", "-d", type=int, required=True)(fn)
    fn = click.option("--tangency", default="",
                      help="comma list of contact orders (signed for rubber)")(fn)
    fn = click.option("--insertions", default="",
                      help="comma list of H^a*psi^k per marking")(fn)
    fn = click.option("--cache", "cache_path", default=None,
                      help="cache file (default: $REDGW_CACHE)")(fn)
    fn = click.option("--jobs", type=int, default=1,
                      help="worker threads for batch evaluation")(fn)
    return fn


def _evaluate(target, theory, genus, degree, tangency, insertions,
              cache_path, jobs):
    key = _build_key(target, theory, genus, degree, tangency, insertions)
    try:
        key.validate()
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    st, path = _open_store(cache_path, target)
    if not engine.dimension_matched(key):
        click.echo(
            "warning: insertion codimension does not match the virtual "
            "dimension; the invariant vanishes", err=True,
        )
        return key, Rat(0), st, path
    try:
        value = engine.compute(key, st)
    except FixtureConflictError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FIXTURE_CONFLICT)
    except (ValidationError, UnsupportedKeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    return key, value, st, path


@main.command()
@_common_options
def compute(target, theory, genus, degree, tangency, insertions,
            cache_path, jobs):
    """Evaluate one invariant and print its exact rational value."""
    _, value, st, path = _evaluate(
        target, theory, genus, degree, tangency, insertions, cache_path, jobs
    )
    click.echo(rat_to_str(value))
    _save_store(st, path)


@main.command()
@_common_options
@click.option("--out", "out_path", default=None,
              help="write the trace to a file instead of stdout")
@click.option("--depth", type=int, default=None,
              help="bound the trace depth (default: full)")
def trace(target, theory, genus, degree, tangency, insertions,
          cache_path, jobs, out_path, depth):
    """Evaluate one invariant and emit its recursion trace."""
    key, value, st, path = _evaluate(
        target, theory, genus, degree, tangency, insertions, cache_path, jobs
    )
    tr = engine.trace(key, depth=depth)
    if tr.replay() != value:
        click.echo("error: trace replay does not match the value", err=True)
        sys.exit(EXIT_VALIDATION)
    text = tr.render() + "\n"
    if out_path is not None:
        try:
            with open(out_path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            click.echo(f"error: cannot write {out_path}: {exc}", err=True)
            sys.exit(EXIT_WRITE)
    else:
        click.echo(text, nl=False)
    click.echo(rat_to_str(value))
    _save_store(st, path)


@main.command()
@click.option("--degree", "-d", type=int, required=True)
@click.option("--tangency", default="",
              help="comma list of contact orders; marking 0 is the recursion marking")
@click.option("--genus", type=click.IntRange(0, 1), default=1)
@click.option("--kind", type=click.Choice(["I", "II", "III", "dagger"]),
              default=None)
def strata(degree, tangency, genus, kind):
    """Enumerate codimension-1 boundary strata with their multiplicities."""
    orders = _parse_int_list(tangency, "tangency")
    try:
        tv = TangencyVector(entries=orders, degree=degree)
        kind_filter = None
        if kind is not None:
            kind_filter = {"dagger": "Dagger"}.get(kind, kind)
            kind_filter = {kind_filter}
        divisors = enumerate_boundary_divisors(
            degree, tv, kindFilter=kind_filter, genus=genus
        )
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    click.echo("kind\tslopes\tvanishing\tsplitting\tfactor")
    for div in divisors:
        slopes = div.slopes or (1,)
        click.echo(
            f"{div.kind}\t{','.join(str(s) for s in div.slopes) or '-'}\t"
            f"{vanishing_order(slopes)}\t{rat_to_str(splitting_degree(slopes))}\t"
            f"{contribution_factor(slopes)}"
        )


@main.command()
@click.option("--target", "-m", type=int, default=2)
@click.option("--genus", type=click.IntRange(0, 1), default=1)
@click.option("--degree-max", "degree_max", type=int, default=3)
@click.option("--cache", "cache_path", default=None)
@click.option("--jobs", type=int, default=1)
def table(target, genus, degree_max, cache_path, jobs):
    """Tabulate relative invariants of (P^m, H): degree, fixed contacts
    (alpha), free contacts (beta), count of irreducible curves through
    general points."""
    if target != 2:
        click.echo("error: the table command tabulates the plane (m=2)",
                   err=True)
        sys.exit(EXIT_VALIDATION)
    st, path = _open_store(cache_path, target)
    rows = []
    for d in range(1, degree_max + 1):
        for wa in range(d + 1):
            for alpha in _tuples(wa, d):
                for beta in _tuples(d - wa, d):
                    rows.append((d, alpha, beta))

    def value_of(row):
        d, alpha, beta = row
        key = _table_key(target, genus, d, alpha, beta)
        bare = engine.compute(key, st)
        return bare / prod(factorial(b) for b in beta)

    try:
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                values = list(pool.map(value_of, rows))
        else:
            values = [value_of(row) for row in rows]
    except FixtureConflictError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FIXTURE_CONFLICT)
    click.echo("d\talpha\tbeta\tcount")
    for (d, alpha, beta), value in zip(rows, values):
        click.echo(
            f"{d}\t{','.join(map(str, alpha)) or '-'}\t"
            f"{','.join(map(str, beta)) or '-'}\t{rat_to_str(value)}"
        )
    _save_store(st, path)


def _tuples(total, kmax):
    """Multiplicity tuples (c_1, ..., c_kmax) with sum k*c_k = total."""
    def rec(rem, k):
        if k == 0:
            if rem == 0:
                yield ()
            return
        for c in range(rem // k + 1):
            for rest in rec(rem - c * k, k - 1):
                yield rest + (c,)
    yield from rec(total, kmax)


def _table_key(m, genus, d, alpha, beta):
    """Fully-marked relative key for the (alpha, beta) plane-curve count:
    fixed contacts carry an extra H, all curves pass through 2d + |beta|
    general points (genus 1, reduced) or 2d + |beta| - 1 (genus 0)."""
    orders, ins = [], []
    for k, c in enumerate(alpha):
        for _ in range(c):
            ins.append(Insertion(markIndex=len(orders), classExp=1))
            orders.append(k + 1)
    for k, c in enumerate(beta):
        for _ in range(c):
            ins.append(Insertion(markIndex=len(orders)))
            orders.append(k + 1)
    npts = 2 * d + sum(beta) - (1 - genus)
    for _ in range(npts):
        ins.append(Insertion(markIndex=len(orders), classExp=2))
        orders.append(0)
    return InvariantKey(
        theory="Relative", m=m, genus=genus, degree=d,
        tangency=TangencyVector(entries=tuple(orders), degree=d),
        insertions=tuple(ins),
    )


@main.command()
@click.option("--quick", is_flag=True, help="run the fast subset only")
def selftest(quick):
    """Run the built-in acceptance checks and print one line per check."""
    checks = _selftest_checks(quick)
    failed = 0
    for name, fn in checks:
        t0 = time.time()
        try:
            fn()
            status = "PASS"
        except Exception as exc:  # noqa: BLE001 - report and continue
            status = f"FAIL ({exc})"
            failed += 1
        click.echo(f"{status}: {name} ({time.time() - t0:.1f}s)")
    if failed:
        click.echo(f"{failed} check(s) failed", err=True)
        sys.exit(1)
    click.echo("all checks passed")


def _selftest_checks(quick):
    from random import Random

    from .dm import DMKey, dm_integral
    from .genus0 import absolute_g0
    from .genus1 import absolute_g1, relative_g1

    def multiplicities():
        rng = Random(20260823)
        rounds = 1000 if quick else 10000
        for _ in range(rounds):
            slopes = [rng.randint(1, 50) for _ in range(rng.randint(1, 6))]
            got = splitting_degree(slopes) * vanishing_order(slopes)
            assert got == contribution_factor(slopes) == prod(slopes)

    def dm_string_dilaton():
        for n in range(3, 6 if quick else 8):
            for ks in _exponent_tuples(n, n - 3):
                total = dm_integral(DMKey(0, n, ks))
                expect = Rat(factorial(n - 3), prod(factorial(k) for k in ks))
                assert total == expect, (ks, total, expect)

    def rational_counts():
        expected = {1: 1, 2: 1, 3: 12, 4: 620}
        if not quick:
            expected[5] = 87304
        for d, want in expected.items():
            ins = ((2, 0),) * (3 * d - 1)
            assert absolute_g0(2, d, ins) == want

    def genus1_cubics():
        marks = ((1, 0, 0),) * 3 + ((0, 2, 0),) * 9
        assert relative_g1(2, 3, marks) == factorial(3) * 1
        assert absolute_g1(2, 3, ((2, 0),) * 9) == 1

    def genus1_quartics():
        marks = ((1, 0, 0),) * 4 + ((0, 2, 0),) * 12
        assert relative_g1(2, 4, marks) == factorial(4) * 225

    def absolute_Y_d1():
        from .genus1 import absolute_g1_Y
        for n in (1, 2, 3):
            for ins in _degree1_keys(n):
                assert absolute_g1_Y(3, 1, ins) == 0

    checks = [
        ("multiplicity identities", multiplicities),
        ("DM genus-0 closed form", dm_string_dilaton),
        ("rational plane curve counts", rational_counts),
        ("genus-1 cubic counts", genus1_cubics),
        ("absolute divisor theory vanishes in degree 1", absolute_Y_d1),
    ]
    if not quick:
        checks.append(("genus-1 quartic count", genus1_quartics))
    return checks


def _exponent_tuples(n, total):
    def rec(rem, slots):
        if slots == 0:
            if rem == 0:
                yield ()
            return
        for k in range(rem + 1):
            for rest in rec(rem - k, slots - 1):
                yield (k,) + rest
    yield from rec(total, n)


def _degree1_keys(n):
    # dimension-matched insertion tuples for the divisor P^2 in P^3, d=1
    target = 3 * 1 + n  # m_Y = 2: (m_Y + 1) d + n
    def rec(rem, slots):
        if slots == 0:
            if rem == 0:
                yield ()
            return
        for a in range(min(2, rem) + 1):
            for k in range(rem - a + 1):
                for rest in rec(rem - a - k, slots - 1):
                    yield ((a, k),) + rest
    yield from rec(target, n)
