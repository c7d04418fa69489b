"""Existence of ADE configurations on complex and supersingular K3 surfaces.

The complex question NK(0, R) asks for a root-free even overlattice M of
Sigma_R that embeds primitively into the K3 lattice (signature (3, 19),
unimodular). In characteristic p with Artin invariant sigma the target is
the rank-22 lattice Lambda_{p,sigma} of signature (1, 21) whose
discriminant group is (Z/p)^(2 sigma).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import gcd

from sympy import isprime, jacobi_symbol, legendre_symbol

from . import fqf
from .local import LocalInvariant, exists_even_lattice
from .overlattices import enumerate_overlattices
from .roots import children, enumerate_dynkin_types, parse_dynkin, s_closure


class K3Error(ValueError):
    pass


class PDividesD(K3Error):
    pass


class PNotCoprime(K3Error):
    pass


class BadSigma(K3Error):
    pass


class EvenP(K3Error):
    pass


class SignatureOutOfRange(K3Error):
    pass


class RankTooLarge(K3Error):
    pass


class NotBoundaryCase(K3Error):
    pass


@dataclass
class NkResult:
    verdict: bool
    witness: dict | None = None
    elapsed_ms: float = 0.0
    extra: dict = field(default_factory=dict)


def _check_p(p):
    if p == 2:
        raise EvenP("p must be odd")
    if p < 3 or not isprime(p):
        raise K3Error(f"{p} is not an odd prime")


def _check_sigma(sigma):
    if not 1 <= sigma <= 10:
        raise BadSigma(f"Artin invariant must lie in 1..10, got {sigma}")


def arth(p: int, sigma: int, d: int) -> bool:
    """Whether ((-1)^(sigma+1) d / p) = -1."""
    _check_p(p)
    _check_sigma(sigma)
    if d == 0 or d % p == 0:
        raise PDividesD(f"{p} divides {d}")
    a = (-1) ** (sigma + 1) * d
    return legendre_symbol(a % p, p) == -1


def _check_signature(t_plus, t_minus):
    if t_plus < 0 or t_minus < 0 or t_plus > 1 or t_minus > 19:
        raise SignatureOutOfRange(f"need t+ <= 1 and t- <= 19, got ({t_plus}, {t_minus})")


def emb_complex(form_m, t_plus: int, t_minus: int, with_witness: bool = False):
    """Primitive embedding of M into the K3 lattice, decided on (D_M, q_M)."""
    _check_signature(t_plus, t_minus)
    return exists_even_lattice(3 - t_plus, 19 - t_minus, fqf.negate(form_m), with_witness)


def smallest_nonsquare(p: int) -> int:
    return next(v for v in range(2, p) if legendre_symbol(v, p) == -1)


@lru_cache(maxsize=None)
def lambda_fqf(p: int, sigma: int) -> fqf.FiniteQuadraticForm:
    """Discriminant form of Lambda_{p,sigma} as a sum of cyclic forms of order p."""
    _check_p(p)
    _check_sigma(sigma)
    q1 = Fraction(p + 1, p)
    vals = [q1] * (2 * sigma)
    if (sigma * (p - 1)) % 4 == 0:
        v = smallest_nonsquare(p)
        vals[-1] = Fraction(v, p) if v % 2 == 0 else Fraction(v + p, p)
    k = len(vals)
    b = [[fqf.mod1(vals[i]) if i == j else Fraction(0) for j in range(k)] for i in range(k)]
    return fqf.make_fqf([p] * k, vals, b)


def lambda_local_set(p: int, sigma: int, n: int) -> frozenset:
    """Closed form of the p-adic invariant set of (D_{p,sigma}, q_{p,sigma})."""
    _check_p(p)
    _check_sigma(sigma)
    sq, ns = LocalInvariant(p, 4, 1), LocalInvariant(p, 4, -1)
    if n < 2 * sigma:
        return frozenset()
    if n > 2 * sigma:
        return frozenset({sq, ns})
    return frozenset({sq}) if (sigma * (p - 1)) % 4 == 2 else frozenset({ns})


def _disc_of(form_m, t_minus):
    return (-1) ** t_minus * form_m.size


def emb_supersingular(form_m, t_plus: int, t_minus: int, p: int, sigma: int,
                      d_m: int | None = None) -> bool:
    """Primitive embedding of M into Lambda_{p,sigma}, decided two ways."""
    _check_signature(t_plus, t_minus)
    _check_p(p)
    _check_sigma(sigma)
    if d_m is None:
        d_m = _disc_of(form_m, t_minus)
    if d_m % p == 0:
        raise PNotCoprime(f"p = {p} divides 2 d_M = {2 * d_m}")
    r = t_plus + t_minus
    generic = exists_even_lattice(1 - t_plus, 21 - t_minus,
                                  fqf.direct_sum(fqf.negate(form_m), lambda_fqf(p, sigma)))
    if 2 * sigma > 22 - r:
        short = False
    elif 2 * sigma < 22 - r:
        short = emb_complex(form_m, t_plus, t_minus)
    else:
        short = emb_complex(form_m, t_plus, t_minus) and arth(p, sigma, d_m)
    if generic != short:
        raise AssertionError(f"embedding paths disagree for p={p}, sigma={sigma}: "
                             f"generic={generic}, trichotomy={short}")
    return short


def _witness(ov, local):
    return {"glue": [list(g) for g in ov.generators], "index": ov.order,
            "local": {str(l): str(x) for l, x in sorted(local.items())}}


def nk0(r, budget_seconds: float | None = None) -> NkResult:
    """NK(0, R): some root-free overlattice of Sigma_R embeds into the K3 lattice."""
    r = parse_dynkin(r)
    if r.rank > 19:
        raise RankTooLarge(f"rank {r.rank} > 19")
    start = time.monotonic()
    res = None
    for ov in enumerate_overlattices(r, budget_seconds=budget_seconds):
        ok, local = emb_complex(ov.form, 0, r.rank, with_witness=True)
        if ok:
            res = NkResult(True, _witness(ov, local))
            break
    if res is None:
        res = NkResult(False, None)
    res.elapsed_ms = (time.monotonic() - start) * 1000
    return res


@lru_cache(maxsize=4096)
def _nk0_memo(r) -> NkResult:
    return nk0(r)


def nk(p: int, sigma: int, r, verify_direct: bool = False) -> NkResult:
    """NK(p, sigma, R) for p not dividing 2 disc(R)."""
    r = parse_dynkin(r)
    _check_sigma(sigma)
    if p == 2:
        raise PNotCoprime("p = 2 divides 2 disc(R)")
    _check_p(p)
    if r.rank > 19:
        raise RankTooLarge(f"rank {r.rank} > 19")
    d = (-1) ** r.rank * r.disc
    if d % p == 0:
        raise PNotCoprime(f"p = {p} divides disc(R) = {r.disc}")
    start = time.monotonic()
    n = r.rank
    extra = {}
    if 2 * sigma > 22 - n:
        res = NkResult(False, None)
        extra["case"] = "rank too large for sigma"
    else:
        base = _nk0_memo(r)
        if 2 * sigma < 22 - n:
            res = NkResult(base.verdict, base.witness)
            extra["case"] = "same as complex"
        else:
            a = arth(p, sigma, d)
            res = NkResult(base.verdict and a, base.witness if (base.verdict and a) else None)
            extra["case"] = "boundary"
            extra["arth"] = a
    if verify_direct:
        direct = any(emb_supersingular(ov.form, 0, n, p, sigma)
                     for ov in enumerate_overlattices(r))
        if direct != res.verdict:
            raise AssertionError(f"direct enumeration disagrees for nk({p}, {sigma}, {r})")
        extra["direct"] = direct
    res.extra = extra
    res.elapsed_ms = (time.monotonic() - start) * 1000
    return res


def residue_set(r, sigma: int) -> tuple[int, frozenset]:
    """(modulus 4|d|, residues x with Arth true for primes p = x mod 4|d|)."""
    r = parse_dynkin(r)
    _check_sigma(sigma)
    if 2 * sigma != 22 - r.rank:
        raise NotBoundaryCase(f"2 sigma = {2 * sigma} differs from 22 - rank = {22 - r.rank}")
    d = (-1) ** r.rank * r.disc
    a = (-1) ** (sigma + 1) * d
    mod = 4 * abs(d)
    out = frozenset(x for x in range(1, mod, 2) if gcd(x, mod) == 1
                    and jacobi_symbol(a % x, x) == -1)
    return mod, out


def lift_residues(mod: int, residues, target: int) -> frozenset:
    """Unit residues modulo a multiple ``target`` of ``mod`` lying over ``residues``."""
    if target % mod:
        raise ValueError(f"{mod} does not divide {target}")
    res = {x % mod for x in residues}
    return frozenset(y for y in range(1, target) if gcd(y, target) == 1 and y % mod in res)


# -- scan for minimal false types ---------------------------------------------

def load_table1() -> list:
    text = resources.files("k3rdp").joinpath("data/table1.txt").read_text()
    return [parse_dynkin(line) for line in text.split() if line.strip()]


def table1_scan(max_rank: int = 19, verdicts: dict | None = None, budget_seconds=None,
                progress=None):
    """Minimal types R of rank <= max_rank with NK(0, R) false.

    ``verdicts`` (canonical string -> bool) is read and extended in place;
    types with a false child are false without further work.
    """
    if max_rank > 19:
        raise RankTooLarge("the scan covers rank <= 19 only")
    verdicts = {} if verdicts is None else verdicts
    verdicts.setdefault("0", True)
    minimal = []
    for t in enumerate_dynkin_types(max_rank):
        key = str(t)
        kids = children(t)
        if any(not verdicts[str(k)] for k in kids):
            verdicts[key] = False
            continue
        if key not in verdicts:
            verdicts[key] = nk0(t, budget_seconds=budget_seconds).verdict
            if progress:
                progress(t, verdicts[key])
        if not verdicts[key]:
            minimal.append(t)
    return minimal


@lru_cache(maxsize=1)
def _table1_set():
    return frozenset(load_table1())


def nk0_via_table1(r) -> bool:
    """NK(0, R) read off from the stored minimal list."""
    r = parse_dynkin(r)
    if r.rank > 19:
        raise RankTooLarge(f"rank {r.rank} > 19")
    if r.rank < 15:
        return True
    return not (s_closure(r, min_rank=15) & _table1_set())


# -- elliptic fibrations and reductions ----------------------------------------

def parse_group(text: str) -> tuple:
    """'Z/2xZ/4' -> prime-power orders of its cyclic decomposition, sorted."""
    text = text.replace(" ", "")
    if text in ("", "0", "1"):
        return ()
    out = []
    for part in text.lower().split("x"):
        n = int(part.replace("z/", ""))
        if n < 1:
            raise K3Error(f"bad cyclic factor {part!r}")
        if n > 1:
            out += [pe for _, pe in fqf.split_prime_powers(n)]
    return tuple(sorted(out))


def elliptic_pair(r, mw) -> bool:
    """Whether (R, MW) occurs as (reducible fibres, torsion Mordell-Weil)."""
    r = parse_dynkin(r)
    if r.rank > 18:
        raise RankTooLarge(f"rank {r.rank} > 18")
    target = parse_group(mw) if isinstance(mw, str) else tuple(sorted(mw))
    for ov in enumerate_overlattices(r):
        if ov.glue_invariants != target:
            continue
        if exists_even_lattice(2, 18 - r.rank, fqf.negate(ov.form)):
            return True
    return False


def ss_reduction_possible(disc_t: int, p: int) -> bool:
    """Necessary condition (-disc T / p) = -1 for supersingular reduction."""
    _check_p(p)
    if disc_t <= 0:
        raise K3Error("disc(T) must be positive")
    if disc_t % p == 0:
        raise PNotCoprime(f"p = {p} divides 2 disc(T)")
    return legendre_symbol((-disc_t) % p, p) == -1
