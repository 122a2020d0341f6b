"""Bipartite d-regular sampler graphs with rotation maps.

A graph here is the data of a rotation map (left vertex, port) -> (right
vertex, port) together with its inverse.  The explicit construction takes
a Gabber-Galil expander on the smallest square >= n vertices, merges
surplus vertex pairs (self-loops keep the rest regular), measures the
normalized second eigenvalue numerically, raises the graph to the power
that pushes it below sqrt(alpha)*gamma, and passes to the bipartite double
cover.  The powered rotation map is evaluated by walking the base graph,
so the (astronomically wide) rotation table is never materialized; edge
counts into a set come from dense matrix powering instead.

A seeded-random union of perfect matchings serves as the desk-scale
fallback when the explicit degree is impractical; `certify` gates its use.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class SamplerParams:
    """Sampling contract: all but an alpha fraction of left vertices see at
    most |T|/n + gamma of their edge fraction inside any right subset T."""

    alpha: float
    gamma: float
    n: int

    def __post_init__(self):
        if not (0 < self.alpha < 1 and 0 < self.gamma < 1):
            raise ValueError("alpha and gamma must lie in (0, 1)")
        if self.n < 2:
            raise ValueError("side size must be at least 2")

    @property
    def spectral_target(self) -> float:
        return math.sqrt(self.alpha) * self.gamma


@dataclass
class CertReport:
    """Result of certifying a graph against SamplerParams."""

    params: SamplerParams
    lambda2: float | None
    trials: int
    max_violation_fraction: float
    mean_violation_fraction: float

    @property
    def passes_spectral(self) -> bool:
        return self.lambda2 is not None and self.lambda2 <= self.params.spectral_target + 1e-12

    @property
    def passes_empirical(self) -> bool:
        return self.max_violation_fraction <= self.params.alpha + 1e-12

    @property
    def passed(self) -> bool:
        return self.passes_spectral or self.passes_empirical

    def to_dict(self) -> dict:
        return {
            "alpha": self.params.alpha,
            "gamma": self.params.gamma,
            "n": self.params.n,
            "lambda2": self.lambda2,
            "trials": self.trials,
            "max_violation_fraction": self.max_violation_fraction,
            "mean_violation_fraction": self.mean_violation_fraction,
            "passes_spectral": self.passes_spectral,
            "passes_empirical": self.passes_empirical,
            "passed": self.passed,
        }


_EIG_LIMIT = 4096  # dense spectra only up to this side size


class SamplerGraph:
    """d-regular bipartite graph given by a rotation map and its inverse.

    Materialized graphs store tables of shape (n, d, 2).  Explicit powered
    graphs store the base rotation table plus the exponent and evaluate the
    rotation by walking.
    """

    def __init__(self, n: int, d: int, mode: str,
                 left_table: np.ndarray | None = None,
                 right_table: np.ndarray | None = None,
                 base_table: np.ndarray | None = None,
                 power: int = 1,
                 seed: int | None = None):
        self.n = n
        self.d = d
        self.mode = mode
        self.seed = seed
        self.power = power
        self._left = left_table
        self._right = right_table
        self._base = base_table
        self._transition: np.ndarray | None = None
        if left_table is None and base_table is None:
            raise ValueError("graph needs either a rotation table or a base table")
        if base_table is not None:
            self._base_d = base_table.shape[1]
            if d != self._base_d**power:
                raise ValueError("degree must equal base degree ** power")

    # -- constructors -------------------------------------------------------------

    @classmethod
    def from_left_table(cls, table: np.ndarray, mode: str, seed: int | None = None
                        ) -> "SamplerGraph":
        table = np.asarray(table, dtype=np.int64)
        n, d, _ = table.shape
        right = np.zeros_like(table)
        us = np.repeat(np.arange(n), d)
        js = np.tile(np.arange(d), n)
        vs = table[:, :, 0].ravel()
        jps = table[:, :, 1].ravel()
        right[vs, jps, 0] = us
        right[vs, jps, 1] = js
        # involution sanity: every (v, port) must be hit exactly once
        hits = np.zeros((n, d), dtype=np.int64)
        np.add.at(hits, (vs, jps), 1)
        if not (hits == 1).all():
            raise ValueError("rotation table is not a bijection on (vertex, port) pairs")
        return cls(n, d, mode, left_table=table, right_table=right, seed=seed)

    # -- rotation map ---------------------------------------------------------------

    def rotation(self, u: int, j: int) -> tuple[int, int]:
        """Left-to-right rotation: the right endpoint and its port label."""
        if not (0 <= u < self.n and 0 <= j < self.d):
            raise ValueError(f"rotation argument out of range: u={u}, j={j}")
        if self._left is not None:
            v, jp = self._left[u, j]
            return int(v), int(jp)
        return self._walk(u, j)

    def rotation_right(self, v: int, j: int) -> tuple[int, int]:
        """Right-to-left rotation, inverse of :meth:`rotation`."""
        if not (0 <= v < self.n and 0 <= j < self.d):
            raise ValueError(f"rotation argument out of range: v={v}, j={j}")
        if self._right is not None:
            u, jp = self._right[v, j]
            return int(u), int(jp)
        # the double cover of an involutive base map is its own inverse
        return self._walk(v, j)

    def _walk(self, u: int, j: int) -> tuple[int, int]:
        base = self._base
        db = self._base_d
        w = u
        back = []
        for _ in range(self.power):
            w, bp = base[w, j % db]
            w = int(w)
            back.append(int(bp))
            j //= db
        ret = 0
        for bp in back:  # reversed walk labels, last step becomes first digit
            ret = ret * db + bp
        return w, ret

    def neighbors_left(self, u: int) -> np.ndarray:
        """(d, 2) array of (right vertex, right port) over the ports of u."""
        if self._left is None:
            raise ValueError("neighbor table not materialized for powered graphs")
        return self._left[u]

    def neighbors_right(self, v: int) -> np.ndarray:
        if self._right is None:
            raise ValueError("neighbor table not materialized for powered graphs")
        return self._right[v]

    # -- spectra and certification -----------------------------------------------------

    def transition_matrix(self) -> np.ndarray:
        """P[u, v] = (#edges between left u and right v) / d, exact up to float."""
        if self._transition is not None:
            return self._transition
        if self._left is not None:
            counts = np.zeros((self.n, self.n))
            np.add.at(counts, (np.repeat(np.arange(self.n), self.d),
                               self._left[:, :, 0].ravel()), 1.0)
            self._transition = counts / self.d
        else:
            base_counts = np.zeros((self.n, self.n))
            np.add.at(base_counts, (np.repeat(np.arange(self.n), self._base_d),
                                    self._base[:, :, 0].ravel()), 1.0)
            p1 = base_counts / self._base_d
            self._transition = np.linalg.matrix_power(p1, self.power)
        return self._transition

    def second_singular_value(self) -> float | None:
        if self.n > _EIG_LIMIT:
            return None
        if self._base is not None:
            # symmetric base: sigma_2 of the power is sigma_2(base) ** power
            lam = _second_eig_symmetric(self._base, self._base_d)
            return lam**self.power
        svals = np.linalg.svd(self.transition_matrix(), compute_uv=False)
        return float(svals[1])

    def certify(self, params: SamplerParams, trials: int, rng_seed: int) -> CertReport:
        """Measure lambda_2 and empirical gamma-violation fractions.

        Each trial draws a uniform random subset size and subset T of the
        right side; the violation fraction is the share of left vertices
        whose edge fraction into T exceeds |T|/n + gamma.  Edge fractions
        come from the transition matrix, so they are exact for materialized
        graphs and exact-up-to-float for powered ones.
        """
        if params.n != self.n:
            raise ValueError(f"params are for n={params.n}, graph has n={self.n}")
        if trials < 1:
            raise ValueError("need at least one trial")
        rng = np.random.default_rng(rng_seed)
        p = self.transition_matrix()
        worst = 0.0
        total = 0.0
        batch = max(1, min(trials, 2_000_000 // max(1, self.n)))
        done = 0
        while done < trials:
            count = min(batch, trials - done)
            indicators = np.zeros((self.n, count))
            sizes = rng.integers(1, self.n + 1, size=count)
            for c, size in enumerate(sizes):
                indicators[rng.choice(self.n, size=size, replace=False), c] = 1.0
            fractions = p @ indicators
            thresholds = sizes / self.n + params.gamma + 1e-9
            viol = (fractions > thresholds[None, :]).mean(axis=0)
            worst = max(worst, float(viol.max()))
            total += float(viol.sum())
            done += count
        return CertReport(
            params=params,
            lambda2=self.second_singular_value(),
            trials=trials,
            max_violation_fraction=worst,
            mean_violation_fraction=total / trials,
        )

    # -- serialization -------------------------------------------------------------------

    def header_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "mode": self.mode,
            "seed": self.seed,
            "power": self.power,
            "base_degree": None if self._base is None else int(self._base_d),
        }

    def table_bytes(self) -> bytes:
        """Rotation table as little-endian uint32 (vertex, port) pairs.

        Explicit powered graphs serialize their base table; the header's
        power field reconstructs the rest.
        """
        table = self._left if self._left is not None else self._base
        return table.astype("<u4").tobytes()

    def to_file(self, path: str) -> None:
        header = json.dumps(self.header_json()).encode()
        with open(path, "wb") as fh:
            fh.write(len(header).to_bytes(4, "little"))
            fh.write(header)
            fh.write(self.table_bytes())

    @classmethod
    def from_file(cls, path: str) -> "SamplerGraph":
        with open(path, "rb") as fh:
            hlen = int.from_bytes(fh.read(4), "little")
            header = json.loads(fh.read(hlen).decode())
            raw = fh.read()
        n = header["n"]
        if header["base_degree"] is not None:
            db = header["base_degree"]
            table = np.frombuffer(raw, dtype="<u4").reshape(n, db, 2).astype(np.int64)
            return cls(n, header["d"], header["mode"], base_table=table,
                       power=header["power"], seed=header["seed"])
        d = header["d"]
        table = np.frombuffer(raw, dtype="<u4").reshape(n, d, 2).astype(np.int64)
        return cls.from_left_table(table, header["mode"], seed=header["seed"])


def _second_eig_symmetric(base_table: np.ndarray, d: int) -> float:
    n = base_table.shape[0]
    counts = np.zeros((n, n))
    np.add.at(counts, (np.repeat(np.arange(n), d), base_table[:, :, 0].ravel()), 1.0)
    eig = np.linalg.eigvalsh(counts / d)
    by_abs = np.sort(np.abs(eig))
    return float(by_abs[-2])


# -- Gabber-Galil base expander -------------------------------------------------------

def _gabber_galil_table(m: int) -> np.ndarray:
    """8-regular rotation table on the m*m torus.

    Ports 0..3 apply the four affine shift maps; ports 4..7 apply their
    inverses, so the map is an involution with port pairing j <-> j+4.
    """
    n = m * m
    xs, ys = np.divmod(np.arange(n), m)
    table = np.zeros((n, 8, 2), dtype=np.int64)

    def fwd(x, y, which):
        if which == 0:
            return (x + 2 * y) % m, y
        if which == 1:
            return (x + 2 * y + 1) % m, y
        if which == 2:
            return x, (y + 2 * x) % m
        return x, (y + 2 * x + 1) % m

    def bwd(x, y, which):
        if which == 0:
            return (x - 2 * y) % m, y
        if which == 1:
            return (x - 2 * y - 1) % m, y
        if which == 2:
            return x, (y - 2 * x) % m
        return x, (y - 2 * x - 1) % m

    for which in range(4):
        fx, fy = fwd(xs, ys, which)
        table[:, which, 0] = fx * m + fy
        table[:, which, 1] = which + 4
        bx, by = bwd(xs, ys, which)
        table[:, which + 4, 0] = bx * m + by
        table[:, which + 4, 1] = which
    return table


def _merge_and_loop(table: np.ndarray, n: int) -> np.ndarray:
    """Merge vertex i with m^2-1-i for i < k = m^2 - n; self-loops keep the rest regular.

    Merged vertices inherit both port blocks; unmerged vertices fill ports
    8..15 with paired self-loops.
    """
    full = table.shape[0]
    k = full - n
    if k == 0:
        return table
    d0 = table.shape[1]

    def relabel(v: int) -> tuple[int, int]:
        # returns (new label, port offset of this original vertex)
        if v >= n:
            return full - 1 - v, d0
        return v, 0

    out = np.zeros((n, 2 * d0, 2), dtype=np.int64)
    for v in range(full):
        nv, off = relabel(v)
        for j in range(d0):
            w, jp = table[v, j]
            nw, woff = relabel(int(w))
            out[nv, off + j] = (nw, woff + int(jp))
    # paired self-loops on the unmerged vertices
    for v in range(k, n):
        for j in range(d0):
            out[v, d0 + j] = (v, d0 + (j ^ 1))
    return out


def build_explicit(params: SamplerParams) -> SamplerGraph:
    """Explicit sampler: merged Gabber-Galil base, powered, double-covered.

    The base second eigenvalue is measured numerically on the concrete
    merged graph; the exponent is the smallest that drives it below
    sqrt(alpha) * gamma.
    """
    n = params.n
    if n < 4:
        raise ValueError("explicit construction needs n >= 4")
    m = math.isqrt(n)
    if m * m < n:
        m += 1
    k = m * m - n
    assert 2 * k <= m * m, "merge count exceeds half the base graph"
    base = _merge_and_loop(_gabber_galil_table(m), n)
    d_base = base.shape[1]
    lam = _second_eig_symmetric(base, d_base)
    if lam >= 1.0 - 1e-12:
        raise ValueError("base graph is not an expander; cannot power below target")
    target = params.spectral_target
    power = max(1, math.ceil(math.log(target) / math.log(lam)))
    while lam**power > target:
        power += 1
    d = d_base**power
    if power == 1:
        return SamplerGraph.from_left_table(base, "explicit")
    return SamplerGraph(n, d, "explicit", base_table=base, power=power)


def build_seeded_random(n: int, d: int, seed: int) -> SamplerGraph:
    """Union of d seeded uniform perfect matchings; port labels are preserved."""
    if d > n:
        raise ValueError(f"degree {d} exceeds side size {n}")
    rng = np.random.default_rng(seed)
    table = np.zeros((n, d, 2), dtype=np.int64)
    for j in range(d):
        table[:, j, 0] = rng.permutation(n)
        table[:, j, 1] = j
    return SamplerGraph.from_left_table(table, "seeded", seed=seed)


def build_complete(n: int) -> SamplerGraph:
    """Complete bipartite graph with the canonical labeling rotation(u, j) = (j, u)."""
    table = np.zeros((n, n, 2), dtype=np.int64)
    table[:, :, 0] = np.arange(n)[None, :]
    table[:, :, 1] = np.arange(n)[:, None]
    return SamplerGraph.from_left_table(table, "complete")


def build_from_matchings(perms: Sequence[np.ndarray], mode: str = "custom") -> SamplerGraph:
    """Graph from explicit permutations, one per port (testing hook)."""
    perms = [np.asarray(p, dtype=np.int64) for p in perms]
    n = len(perms[0])
    d = len(perms)
    table = np.zeros((n, d, 2), dtype=np.int64)
    for j, perm in enumerate(perms):
        table[:, j, 0] = perm
        table[:, j, 1] = j
    return SamplerGraph.from_left_table(table, mode)
