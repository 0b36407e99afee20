"""Finite-field and Galois-ring arithmetic for prime-power MUB.

Elements of ``GF(p^n)`` (and of the Galois ring ``GR(4, n)``) are
represented as coefficient tuples ``(c_0, ..., c_{n-1})`` of polynomials in
the root ``x`` of a fixed monic modulus, reduced modulo ``p`` (or 4).

Odd characteristic
    Basis ``a`` of the complete set consists of the vectors
    ``q^{-1/2} sum_x w^{tr(a x^2 + b x)} |x>`` for ``b`` in ``GF(q)``,
    with ``w = exp(2 pi i / p)``.

Characteristic two
    The quadratic construction fails; instead the Hensel lift ``h`` of the
    binary modulus to ``Z_4[x]`` defines ``GR(4, n)``, whose Teichmuller set
    ``T = {0, 1, xi, xi^2, ...}`` indexes both bases and components:
    ``q^{-1/2} sum_{x in T} i^{Tr((a + 2b) x)} |x>``.

In both cases the standard basis is prepended, giving ``q + 1`` bases.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

__all__ = [
    "DEFAULT_MODULI",
    "Ring",
    "is_prime",
    "prime_power",
    "is_irreducible",
    "hensel_lift",
    "galois_mub",
]

#: Default monic moduli, coefficients listed from the constant term upwards.
#: 4: x^2+x+1, 8: x^3+x+1, 9: x^2+x+2, 16: x^4+x+1 (all primitive).
DEFAULT_MODULI: dict[int, tuple[int, ...]] = {
    4: (1, 1, 1),
    8: (1, 1, 0, 1),
    9: (2, 1, 1),
    16: (1, 1, 0, 0, 1),
    25: (2, 1, 1),
    27: (1, 2, 0, 1),
    32: (1, 0, 1, 0, 0, 1),
}


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, int(p**0.5) + 1))


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, n)`` with ``q = p**n`` and ``p`` prime, else ``None``."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            n = 0
            while q % p == 0:
                q //= p
                n += 1
            return (p, n) if q == 1 else None
    return None


class Ring:
    """Polynomial quotient ring ``Z_M[x] / (h)`` with ``h`` monic of degree n."""

    def __init__(self, h: tuple[int, ...], modulus: int):
        self.h = tuple(int(c) % modulus for c in h)
        if self.h[-1] != 1:
            raise ValueError("modulus polynomial must be monic")
        self.M = modulus
        self.n = len(h) - 1

    def mul(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        n, M, h = self.n, self.M, self.h
        r = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    r[i + j] += x * y
        for k in range(2 * n - 2, n - 1, -1):
            c = r[k] % M
            if c:
                for i in range(n + 1):
                    r[k - n + i] -= c * h[i]
        return tuple(v % M for v in r[:n])

    def add(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((x + y) % self.M for x, y in zip(a, b))

    def scale(self, c: int, a: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((c * x) % self.M for x in a)

    def one(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.n - 1)

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.n

    def root(self) -> tuple[int, ...]:
        """The class of ``x``."""
        if self.n == 1:
            return ((-self.h[0]) % self.M,)
        return (0, 1) + (0,) * (self.n - 2)

    def trace(self, a: tuple[int, ...]) -> int:
        """Trace of the multiplication-by-``a`` map, reduced mod ``M``."""
        t = 0
        for j in range(self.n):
            e = [0] * self.n
            e[j] = 1
            t += self.mul(a, tuple(e))[j]
        return t % self.M

    def elements(self) -> list[tuple[int, ...]]:
        return [tuple(c) for c in itertools.product(range(self.M), repeat=self.n)]


def is_irreducible(f: tuple[int, ...], p: int) -> bool:
    """Irreducibility of a monic polynomial over ``GF(p)`` (trial division)."""
    f = tuple(c % p for c in f)
    n = len(f) - 1
    if n < 1 or f[-1] != 1:
        return False
    if n == 1:
        return True

    def polymod(a: list[int], b: tuple[int, ...]) -> list[int]:
        a = a[:]
        db = len(b) - 1
        inv = pow(b[-1], -1, p)
        while len(a) - 1 >= db and any(a):
            if a[-1] % p == 0:
                a.pop()
                continue
            c = (a[-1] * inv) % p
            shift = len(a) - 1 - db
            for i, bc in enumerate(b):
                a[shift + i] = (a[shift + i] - c * bc) % p
            a.pop()
        return a

    for deg in range(1, n // 2 + 1):
        for tail in itertools.product(range(p), repeat=deg):
            g = tuple(tail) + (1,)
            if not any(polymod(list(f), g)):
                return False
    return True


def hensel_lift(f: tuple[int, ...]) -> tuple[int, ...]:
    """Lift a binary monic polynomial to ``Z_4[x]`` via the Graeffe step
    ``h(x^2) = +-(e(x)^2 - o(x)^2)`` with ``f = e + o`` split by parity."""
    n = len(f) - 1
    e = np.array([c if i % 2 == 0 else 0 for i, c in enumerate(f)], dtype=np.int64)
    o = np.array([c if i % 2 == 1 else 0 for i, c in enumerate(f)], dtype=np.int64)
    g = np.convolve(e, e) - np.convolve(o, o)
    h = g[::2][: n + 1] % 4
    if h[-1] != 1:
        h = (-h) % 4
    return tuple(int(v) for v in h)


def _teichmuller(ring: Ring) -> list[tuple[int, ...]]:
    q = 2**ring.n
    xi = ring.root()
    T = [ring.zero()]
    y = ring.one()
    for _ in range(q - 1):
        T.append(y)
        y = ring.mul(y, xi)
    if y != ring.one() or len(set(T)) != q:
        raise ValueError("modulus is not primitive: x does not generate the Teichmuller set")
    return T


@lru_cache(maxsize=None)
def _galois_mub_cached(p: int, n: int, f: tuple[int, ...]) -> tuple[np.ndarray, ...]:
    q = p**n
    if n == 1 and p == 2:
        f = (1, 1)
    if n > 1 and not is_irreducible(f, p):
        raise ValueError(f"polynomial {f} is not irreducible over GF({p})")
    bases = [np.eye(q, dtype=complex)]
    if p == 2:
        ring = Ring(hensel_lift(f), 4)
        T = _teichmuller(ring)
        trs = {}
        for a in T:
            for b in T:
                c = ring.add(a, ring.scale(2, b))
                if c not in trs:
                    trs[c] = [ring.trace(ring.mul(c, x)) for x in T]
        for a in T:
            cols = [(1j ** np.array(trs[ring.add(a, ring.scale(2, b))])) for b in T]
            bases.append(np.array(cols).T / np.sqrt(q))
    else:
        ring = Ring(f if n > 1 else (0, 1), p)
        F = ring.elements()
        w = np.exp(2j * np.pi / p)
        sq = [ring.mul(x, x) for x in F]
        tr_b = np.array([[ring.trace(ring.mul(b, x)) for x in F] for b in F])
        for a in F:
            tr_a = np.array([ring.trace(ring.mul(a, s)) for s in sq])
            cols = [w ** ((tr_a + tr_b[ib]) % p) for ib in range(len(F))]
            bases.append(np.array(cols).T / np.sqrt(q))
    for b in bases:
        b.setflags(write=False)
    return tuple(bases)


def galois_mub(q: int, modulus: tuple[int, ...] | None = None) -> list[np.ndarray]:
    """Complete set of ``q + 1`` MUB in prime-power dimension ``q``.

    Each basis is returned as a ``q x q`` unitary whose columns are the basis
    vectors; the first basis is the identity.  ``modulus`` overrides the
    default irreducible polynomial (coefficients from the constant term up);
    in characteristic two it must be primitive.
    """
    pn = prime_power(q)
    if pn is None:
        raise ValueError(f"{q} is not a prime power")
    p, n = pn
    if modulus is None:
        if n == 1:
            modulus = (0, 1)
        elif q in DEFAULT_MODULI:
            modulus = DEFAULT_MODULI[q]
        else:
            raise ValueError(f"no default modulus for q={q}; pass one explicitly")
    modulus = tuple(int(c) for c in modulus)
    if len(modulus) != n + 1:
        raise ValueError(f"modulus must have degree {n}")
    return [b.copy() for b in _galois_mub_cached(p, n, modulus)]
