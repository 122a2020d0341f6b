"""Binary extension field GF(2^k) arithmetic and univariate polynomials.

Elements are plain Python ints in [0, 2^k) whose bits are the coefficients
of a polynomial over GF(2), reduced modulo a fixed irreducible polynomial.
Addition is XOR.  A :class:`BinaryField` instance owns the modulus and all
element operations; :class:`FieldElement` is a thin checked wrapper used at
API boundaries, while hot paths work on raw ints and numpy arrays.

Every field exposes a canonical element enumeration ``0, 1, g, g^2, ...``
(``g`` a fixed generator of the multiplicative group), which downstream
codes use as their evaluation-point order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

# Irreducible (in fact primitive, so x generates the multiplicative group)
# moduli for GF(2^k), k = 1..32.  Shipped fixed for reproducibility; custom
# moduli are re-verified at construction.
DEFAULT_MODULI: dict[int, int] = {
    1: 0x3,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
    17: 0x20009,
    18: 0x40081,
    19: 0x80027,
    20: 0x100009,
    21: 0x200005,
    22: 0x400003,
    23: 0x800021,
    24: 0x1000087,
    25: 0x2000009,
    26: 0x4000047,
    27: 0x8000027,
    28: 0x10000009,
    29: 0x20000005,
    30: 0x40800007,
    31: 0x80000009,
    32: 0x100400007,
}

# Prime factorizations of 2^k - 1 for k = 1..32, used to verify that a
# candidate generator has full multiplicative order.
_GROUP_ORDER_FACTORS: dict[int, tuple[int, ...]] = {
    1: (),
    2: (3,),
    3: (7,),
    4: (3, 5),
    5: (31,),
    6: (3, 7),
    7: (127,),
    8: (3, 5, 17),
    9: (7, 73),
    10: (3, 11, 31),
    11: (23, 89),
    12: (3, 5, 7, 13),
    13: (8191,),
    14: (3, 43, 127),
    15: (7, 31, 151),
    16: (3, 5, 17, 257),
    17: (131071,),
    18: (3, 7, 19, 73),
    19: (524287,),
    20: (3, 5, 11, 31, 41),
    21: (7, 127, 337),
    22: (3, 23, 89, 683),
    23: (47, 178481),
    24: (3, 5, 7, 13, 17, 241),
    25: (31, 601, 1801),
    26: (3, 2731, 8191),
    27: (7, 73, 262657),
    28: (3, 5, 29, 43, 113, 127),
    29: (233, 1103, 2089),
    30: (3, 7, 11, 31, 151, 331),
    31: (2147483647,),
    32: (3, 5, 17, 257, 65537),
}

_TABLE_MAX_K = 16  # log/antilog tables only for k <= 16


class FieldMismatchError(ValueError):
    """Raised when elements of different fields are combined."""


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2) polynomials encoded as ints."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly2_degree(f: int) -> int:
    return f.bit_length() - 1


def poly2_mod(a: int, f: int) -> int:
    """Reduce the GF(2) polynomial ``a`` modulo ``f``."""
    df = poly2_degree(f)
    while a.bit_length() - 1 >= df:
        a ^= f << (a.bit_length() - 1 - df)
    return a


def poly2_mulmod(a: int, b: int, f: int) -> int:
    return poly2_mod(clmul(a, b), f)


def poly2_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly2_mod(a, b)
    return a


def _poly2_pow_xq(exponent_log2: int, f: int) -> int:
    """x^(2^exponent_log2) mod f, by repeated squaring of x."""
    r = 2  # the polynomial x
    for _ in range(exponent_log2):
        r = poly2_mulmod(r, r, f)
    return r


def is_irreducible(f: int) -> bool:
    """Exact irreducibility test for a GF(2) polynomial.

    Trial division by every lower-degree polynomial for degree <= 16,
    Rabin's deterministic criterion above that.
    """
    k = poly2_degree(f)
    if k <= 0:
        return False
    if k == 1:
        return True
    if k <= _TABLE_MAX_K:
        for g in range(2, 1 << (k // 2 + 1)):
            if poly2_degree(g) < 1:
                continue
            if poly2_mod(f, g) == 0:
                return False
        return True
    # Rabin: x^(2^k) == x (mod f), and for each prime p | k the polynomial
    # x^(2^(k/p)) - x must be coprime with f.
    if _poly2_pow_xq(k, f) != 2:
        return False
    for p in _prime_factors(k):
        h = _poly2_pow_xq(k // p, f) ^ 2
        if poly2_gcd(f, h) != 1:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class BinaryField:
    """GF(2^k) with a fixed irreducible modulus.

    Provides scalar int operations, vectorized numpy operations (table
    backed for k <= 16, carry-less otherwise), and the canonical element
    enumeration ``0, 1, g, g^2, ...``.
    """

    def __init__(self, k: int, modulus: int | None = None):
        if not 1 <= k <= 32:
            raise ValueError(f"extension degree k={k} out of supported range 1..32")
        if modulus is None:
            modulus = DEFAULT_MODULI[k]
        if poly2_degree(modulus) != k:
            raise ValueError(f"modulus degree {poly2_degree(modulus)} != k={k}")
        if not is_irreducible(modulus):
            raise ValueError(f"modulus {modulus:#x} is reducible")
        self.k = k
        self.modulus = modulus
        self.order = 1 << k
        self._exp: np.ndarray | None = None
        self._log: np.ndarray | None = None
        self._generator: int | None = None
        if k <= _TABLE_MAX_K:
            self._build_tables()

    # -- construction helpers -------------------------------------------------

    def _mul_raw(self, a: int, b: int) -> int:
        return poly2_mod(clmul(a, b), self.modulus)

    def _element_order_is_full(self, g: int) -> bool:
        n = self.order - 1
        if pow_field(self, g, n) != 1:
            return False
        return all(pow_field(self, g, n // p) != 1 for p in _GROUP_ORDER_FACTORS[self.k])

    def _find_generator(self) -> int:
        if self.k == 1:
            return 1
        for g in range(2, self.order):
            if self._element_order_is_full(g):
                return g
        raise AssertionError("no generator found; field construction is broken")

    def _build_tables(self) -> None:
        g = self._find_generator()
        n = self.order - 1
        exp = np.zeros(2 * n, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x = self._mul_raw(x, g)
        if x != 1:
            raise AssertionError("generator does not cycle back; table build failed")
        exp[n:] = exp[:n]
        self._exp = exp
        self._log = log
        self._generator = g

    # -- scalar operations -----------------------------------------------------

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return int(self._exp[self._log[a] + self._log[b]])
        return self._mul_raw(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        if self._exp is not None:
            n = self.order - 1
            return int(self._exp[(n - self._log[a]) % n])
        return pow_field(self, a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    @property
    def generator(self) -> int:
        if self._generator is not None:
            return self._generator
        # Big field: x is primitive for all shipped moduli; verify once.
        if self._element_order_is_full(2):
            self._generator = 2
            return 2
        raise ValueError(
            "x is not primitive for this modulus; supply evaluation points explicitly"
        )

    def elements(self) -> Iterator[int]:
        return iter(range(self.order))

    def enumeration(self, count: int | None = None) -> list[int]:
        """Canonical evaluation order: 0, 1, g, g^2, ...  (length ``count``)."""
        if count is None:
            count = self.order
        if count > self.order:
            raise ValueError(f"requested {count} points from a field of order {self.order}")
        if count == 1:
            return [0]
        if self._exp is not None:
            return [0] + [int(v) for v in self._exp[: count - 1]]
        out = [0]
        x = 1
        g = self.generator
        while len(out) < count:
            out.append(x)
            x = self._mul_raw(x, g)
        return out

    def element_index(self, a: int) -> int:
        """Position of ``a`` in the canonical enumeration."""
        if a == 0:
            return 0
        if self._log is not None:
            return int(self._log[a]) + 1
        return self.enumeration().index(a)

    def element_index_vec(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self._log is not None:
            return np.where(a == 0, 0, self._log[a] + 1)
        return np.array([self.element_index(int(x)) for x in a.ravel()],
                        dtype=np.int64).reshape(a.shape)

    # -- vectorized operations (int64 numpy arrays) -----------------------------

    def mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._exp is not None:
            if b.ndim == 0:
                if int(b) == 0:
                    return np.zeros(a.shape, dtype=np.int64)
                out = self._exp[self._log[a] + int(self._log[b])]
                out[a == 0] = 0
                return out
            if a.shape == b.shape:
                out = self._exp[self._log[a] + self._log[b]]
                out[(a == 0) | (b == 0)] = 0
                return out
            a, b = np.broadcast_arrays(a, b)
            out = np.zeros(a.shape, dtype=np.int64)
            nz = (a != 0) & (b != 0)
            if nz.any():
                out[nz] = self._exp[self._log[a[nz]] + self._log[b[nz]]]
            return out
        flat_a, flat_b = np.broadcast_arrays(a, b)
        out = np.array(
            [self._mul_raw(int(x), int(y)) for x, y in zip(flat_a.ravel(), flat_b.ravel())],
            dtype=np.int64,
        )
        return out.reshape(flat_a.shape)

    def mul_outer(self, col: np.ndarray, row: np.ndarray) -> np.ndarray:
        """Outer product table col[i]*row[j], used by the linear algebra kernels."""
        return self.mul_vec(np.asarray(col, dtype=np.int64)[:, None],
                            np.asarray(row, dtype=np.int64)[None, :])

    def inv_vec(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse")
        if self._exp is not None:
            n = self.order - 1
            return self._exp[(n - self._log[a]) % n]
        return np.array([self.inv(int(x)) for x in a.ravel()], dtype=np.int64).reshape(a.shape)

    def pow_vec(self, a: int, exponents: np.ndarray) -> np.ndarray:
        """a^e for an array of non-negative exponents."""
        exponents = np.asarray(exponents, dtype=np.int64)
        out = np.ones(exponents.shape, dtype=np.int64)
        base = a
        e = exponents.copy()
        # square-and-multiply, vectorized over the exponent array
        while np.any(e > 0):
            odd = (e & 1) == 1
            if odd.any():
                out[odd] = self.mul_vec(out[odd], np.int64(base))
            base = self.mul(base, base)
            e >>= 1
        return out

    def power_table(self, xs: Sequence[int], max_power: int) -> np.ndarray:
        """Table P[i, e] = xs[i]^e for e = 0..max_power."""
        xs = np.asarray(xs, dtype=np.int64)
        table = np.ones((len(xs), max_power + 1), dtype=np.int64)
        for e in range(1, max_power + 1):
            table[:, e] = self.mul_vec(table[:, e - 1], xs)
        return table

    def random_elements(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.integers(0, self.order, size=size, dtype=np.int64)

    # -- identity / serialization -----------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, BinaryField) and (self.k, self.modulus) == (other.k, other.modulus)

    def __hash__(self) -> int:
        return hash((self.k, self.modulus))

    def __repr__(self) -> str:
        return f"BinaryField(k={self.k}, modulus={self.modulus:#x})"

    @property
    def element_size_bytes(self) -> int:
        return (self.k + 7) // 8

    def element_to_bytes(self, a: int) -> bytes:
        return int(a).to_bytes(self.element_size_bytes, "little")

    def element_from_bytes(self, raw: bytes) -> int:
        a = int.from_bytes(raw, "little")
        if a >= self.order:
            raise ValueError(f"value {a} outside field of order {self.order}")
        return a

    def to_json(self) -> dict:
        return {"k": self.k, "modulus_hex": format(self.modulus, "x")}

    @classmethod
    def from_json(cls, obj: dict) -> "BinaryField":
        return cls(int(obj["k"]), int(obj["modulus_hex"], 16))


def pow_field(field: BinaryField, a: int, e: int) -> int:
    """a^e in the field (e >= 0), via square-and-multiply on raw ints."""
    if e == 0:
        return 1
    if a == 0:
        return 0
    r = 1
    base = a
    while e:
        if e & 1:
            r = field.mul(r, base)
        base = field.mul(base, base)
        e >>= 1
    return r


@dataclass(frozen=True)
class FieldElement:
    """A checked field element; arithmetic validates field compatibility."""

    field: BinaryField
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < self.field.order:
            raise ValueError(f"element {self.bits} outside field of order {self.field.order}")

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError(f"field mismatch: {self.field} vs {other.field}")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.field.mul(self.bits, other.bits))

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.field.div(self.bits, other.bits))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.bits))

    def __bool__(self) -> bool:
        return self.bits != 0

    def to_bytes(self) -> bytes:
        return self.field.element_to_bytes(self.bits)


def fe(field: BinaryField, bits: int) -> FieldElement:
    return FieldElement(field, bits)


class Poly:
    """Univariate polynomial over a BinaryField; coeffs lowest degree first."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: BinaryField, coeffs: Sequence[int]):
        self.field = field
        trimmed = list(int(c) for c in coeffs)
        while trimmed and trimmed[-1] == 0:
            trimmed.pop()
        self.coeffs = tuple(trimmed)

    @classmethod
    def zero(cls, field: BinaryField) -> "Poly":
        return cls(field, [])

    @classmethod
    def constant(cls, field: BinaryField, c: int) -> "Poly":
        return cls(field, [c])

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Poly)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)})"

    def evaluate(self, x: int) -> int:
        """Horner evaluation."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = self.field.mul(acc, x) ^ c
        return acc

    def evaluate_many(self, xs: Sequence[int]) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        acc = np.zeros(len(xs), dtype=np.int64)
        for c in reversed(self.coeffs):
            acc = self.field.mul_vec(acc, xs) ^ np.int64(c)
        return acc

    def __add__(self, other: "Poly") -> "Poly":
        if self.field != other.field:
            raise FieldMismatchError("polynomial fields differ")
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] ^= c
        return Poly(self.field, out)

    def __mul__(self, other: "Poly") -> "Poly":
        if self.field != other.field:
            raise FieldMismatchError("polynomial fields differ")
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.field)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] ^= self.field.mul(a, b)
        return Poly(self.field, out)

    def scale(self, c: int) -> "Poly":
        return Poly(self.field, [self.field.mul(c, a) for a in self.coeffs])

    def divmod(self, divisor: "Poly") -> tuple["Poly", "Poly"]:
        """Polynomial long division: self = q*divisor + r."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        field = self.field
        rem = list(self.coeffs)
        dd = divisor.degree
        lead_inv = field.inv(divisor.coeffs[-1])
        quot = [0] * max(0, len(rem) - dd)
        while len(rem) - 1 >= dd and rem:
            if rem[-1] == 0:
                rem.pop()
                continue
            shift = len(rem) - 1 - dd
            factor = field.mul(rem[-1], lead_inv)
            quot[shift] = factor
            for i, c in enumerate(divisor.coeffs):
                rem[shift + i] ^= field.mul(factor, c)
            rem.pop()
        return Poly(field, quot), Poly(field, rem)

    def hasse_derivative(self, j: int) -> "Poly":
        """Order-j Hasse derivative.

        Output coefficient at x^i is C(i+j, j) mod 2 times the coefficient at
        x^(i+j); by Lucas the binomial is odd exactly when i and j share no
        set bits.
        """
        if j < 0:
            raise ValueError("derivative order must be non-negative")
        if j == 0:
            return self
        out = []
        for i in range(0, len(self.coeffs) - j):
            out.append(self.coeffs[i + j] if (i & j) == 0 else 0)
        return Poly(self.field, out)

    def shift_argument(self, a: int) -> "Poly":
        """Substitution p(x + a), expanded by binomials mod 2.

        Independent of hasse_derivative; used as the oracle for the Taylor
        property in tests.
        """
        field = self.field
        out = [0] * max(1, len(self.coeffs))
        for e, c in enumerate(self.coeffs):
            if c == 0:
                continue
            # (x + a)^e = sum over i subset of e (bitwise) of x^i a^(e-i)
            for i in range(e + 1):
                if (i & e) == i:
                    out[i] ^= field.mul(c, pow_field(field, a, e - i))
        return Poly(field, out)

    @classmethod
    def interpolate(cls, field: BinaryField, points: Sequence[tuple[int, int]]) -> "Poly":
        """Unique polynomial of degree < len(points) through the points (Lagrange)."""
        xs = [p[0] for p in points]
        if len(set(xs)) != len(xs):
            raise ValueError("interpolation points must have distinct x values")
        acc = cls.zero(field)
        for i, (xi, yi) in enumerate(points):
            if yi == 0:
                continue
            basis = cls.constant(field, 1)
            denom = 1
            for j, (xj, _) in enumerate(points):
                if j == i:
                    continue
                basis = basis * cls(field, [xj, 1])
                denom = field.mul(denom, xi ^ xj)
            acc = acc + basis.scale(field.div(yi, denom))
        return acc
