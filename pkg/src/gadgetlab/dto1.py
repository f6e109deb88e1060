"""The correlated-test 3-uniform hypergraph over +-1 long codes.

Cube points are bitmasks (bit j set means coordinate j equals -1), so the
GF(2) Walsh-Hadamard machinery doubles as the +-1-cube Fourier transform.
Per constraint, the hyperedge support is a product over target labels i of
the base distribution on (x_i, y restricted to the preimage of i, z there).
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boolfn import FiniteJointDist, maximal_correlation
from .games import LayeredPcp, PcpConstraint, check_weak_density
from .seeding import derive_rng
from .verify import GenericHypergraph

MAX_TABLE_R = 10
EDGE_ENUM_BITS = 20


class NoHeavyError(RuntimeError):
    """Decoding ran out of heavy variables or qualifying layer pairs."""


def _pm(mask: int, j: int) -> int:
    return -1 if (mask >> j) & 1 else 1


def _mask_tuple(mask: int, r: int) -> tuple[int, ...]:
    return tuple(_pm(mask, j) for j in range(r))


@dataclass(frozen=True)
class DDeltaR:
    """The base correlated distribution on (X, Y, Z) with Y, Z in {-1,1}^r."""

    delta: float
    r: int
    joint: FiniteJointDist

    @property
    def xi(self) -> float:
        return self.delta / (self.r * 2.0**self.r)

    def prob(self, x_bit: int, y_mask: int, z_mask: int) -> float:
        return float(self.joint.probs[x_bit, y_mask, z_mask])

    def support(self) -> list[tuple[int, int, int]]:
        out = []
        for x_bit in range(2):
            for y in range(1 << self.r):
                for z in range(1 << self.r):
                    if self.joint.probs[x_bit, y, z] > 0:
                        out.append((x_bit, y, z))
        return out

    def yz_marginal(self) -> FiniteJointDist:
        return FiniteJointDist(
            (self.joint.factors[1], self.joint.factors[2]),
            self.joint.marginal((1, 2)),
        )

    def to_csv(self) -> str:
        lines = ["atom,probability"]
        for x_bit in range(2):
            for y in range(1 << self.r):
                for z in range(1 << self.r):
                    p = float(self.joint.probs[x_bit, y, z])
                    if p > 0:
                        xs = "+" if x_bit == 0 else "-"
                        ys = "".join("-" if (y >> j) & 1 else "+" for j in range(self.r))
                        zs = "".join("-" if (z >> j) & 1 else "+" for j in range(self.r))
                        lines.append(f"{xs}|{ys}|{zs},{p!r}")
        return "\n".join(lines) + "\n"


def dist_table(delta: float, r: int) -> DDeltaR:
    """Exact atom table: with probability 1-delta, Z = -Y coordinatewise
    and X is an independent uniform bit; with probability delta a uniform
    coordinate j gets Y_j = Z_j = -X."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must be in [0, 1], got {delta}")
    if not 1 <= r <= MAX_TABLE_R:
        raise ValueError(f"r must be in [1, {MAX_TABLE_R}] for a full table, got {r}")
    size = 1 << r
    probs = np.zeros((2, size, size))
    full = size - 1
    plain = (1.0 - delta) / (2.0 * size)
    for x_bit in range(2):
        for y in range(size):
            probs[x_bit, y, y ^ full] += plain
    resampled = delta / (r * size) if delta else 0.0
    for j in range(r):
        for x_bit in range(2):
            target = (1 - x_bit) << j
            for rest in range(size):
                if (rest >> j) & 1:
                    continue
                y = (rest & ~(1 << j)) | target
                z_rest = (rest ^ full) & ~(1 << j)
                z = z_rest | target
                probs[x_bit, y, z] += resampled
    factors = (
        (1, -1),
        tuple(_mask_tuple(m, r) for m in range(size)),
        tuple(_mask_tuple(m, r) for m in range(size)),
    )
    return DDeltaR(delta, r, FiniteJointDist(factors, probs))


def sample(delta: float, r: int, rng: random.Random | int) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
    """One generative draw of (X, Y, Z) as +-1 values."""
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    x = rng.choice((1, -1))
    y = [rng.choice((1, -1)) for _ in range(r)]
    z = [-v for v in y]
    if rng.random() < delta:
        j = rng.randrange(r)
        y[j] = -x
        z[j] = -x
    return x, tuple(y), tuple(z)


def support_safety(dist: DDeltaR) -> bool:
    """No positive atom has (X, Y_j, Z_j) monochromatic at any j."""
    for x_bit, y, z in dist.support():
        xv = 1 if x_bit == 0 else -1
        for j in range(dist.r):
            if xv == _pm(y, j) == _pm(z, j):
                return False
    return True


def correlation_suite(delta: float, r: int) -> dict:
    """Min atom and the four correlation quantities, each against its
    stated bound; the min-atom equality only binds when delta <= r/(r+2)."""
    dist = dist_table(delta, r)
    xi = dist.xi
    min_atom = dist.joint.min_atom()
    in_regime = delta <= r / (r + 2.0)
    rho_x_yz = maximal_correlation(dist.joint, ((0,), (1, 2)))
    rho_xy_z = maximal_correlation(dist.joint, ((0, 1), (2,)))
    rho_y_z = maximal_correlation(dist.yz_marginal(), ((0,), (1,)))
    rho_joint = max(
        maximal_correlation(dist.joint, ((1, 2), (0,))),
        maximal_correlation(dist.joint, ((0, 2), (1,))),
        maximal_correlation(dist.joint, ((0, 1), (2,))),
    )
    cap = 1.0 - xi**2 / 2.0
    return {
        "delta": delta, "r": r, "xi": xi,
        "min_atom": min_atom,
        "min_atom_bound": xi,
        "min_atom_regime": in_regime,
        "min_atom_ok": (min_atom == xi) if in_regime else (min_atom <= xi),
        "rho_x_yz": rho_x_yz, "rho_x_yz_ok": rho_x_yz <= delta + 1e-9,
        "rho_xy_z": rho_xy_z, "rho_xy_z_ok": rho_xy_z <= cap + 1e-9,
        "rho_y_z": rho_y_z, "rho_y_z_ok": rho_y_z <= cap + 1e-9,
        "rho_all": rho_joint, "rho_all_ok": rho_joint <= cap + 1e-9,
        "cap": cap,
    }


# ---------------------------------------------------------------------------
# Cube spectra (masks; bit j set means coordinate j is -1)

def cube_spectrum(values: np.ndarray) -> np.ndarray:
    out = np.asarray(values, dtype=np.float64).copy()
    n = out.size
    h = 1
    while h < n:
        out = out.reshape(-1, 2 * h)
        left = out[:, :h].copy()
        right = out[:, h:].copy()
        out[:, :h] = left + right
        out[:, h:] = left - right
        out = out.reshape(n)
        h *= 2
    return out / n


def cube_from_spectrum(coeffs: np.ndarray) -> np.ndarray:
    out = cube_spectrum(coeffs)
    return out * coeffs.size


def popcounts(n_bits: int) -> np.ndarray:
    return np.array([bin(m).count("1") for m in range(1 << n_bits)])


def blocks_of(projection: tuple[int, ...], target_size: int) -> list[int]:
    """Preimage bitmask per target label."""
    masks = [0] * target_size
    for j, i in enumerate(projection):
        masks[i] |= 1 << j
    return masks


def shattered_mask(blocks: list[int], n_bits: int) -> np.ndarray:
    """Boolean per character mask: True when no block holds two of its bits."""
    pops = popcounts(n_bits)
    masks = np.arange(1 << n_bits)
    hits = np.zeros(1 << n_bits, dtype=np.int64)
    for b in blocks:
        hits += (masks & b) != 0
    return hits == pops


@dataclass(frozen=True)
class ShatterDecomp:
    """Spectrum split into high-degree, low-unshattered, low-shattered."""

    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray
    s: float

    @property
    def norms(self) -> tuple[float, float, float]:
        return (float(np.sqrt((self.f1**2).sum())),
                float(np.sqrt((self.f2**2).sum())),
                float(np.sqrt((self.f3**2).sum())))


def shattered_decomposition(coeffs: np.ndarray, projection: tuple[int, ...],
                            target_size: int, s: float) -> ShatterDecomp:
    n_bits = int(round(math.log2(coeffs.size)))
    pops = popcounts(n_bits)
    blocks = blocks_of(projection, target_size)
    shat = shattered_mask(blocks, n_bits)
    high = pops >= s
    f1 = np.where(high, coeffs, 0.0)
    f2 = np.where(~high & ~shat, coeffs, 0.0)
    f3 = np.where(~high & shat, coeffs, 0.0)
    return ShatterDecomp(f1, f2, f3, s)


def noisy_influences(coeffs: np.ndarray, gamma: float) -> np.ndarray:
    """Inf_i of T_{1-gamma} f per coordinate, by spectrum reweighting."""
    n_bits = int(round(math.log2(coeffs.size)))
    pops = popcounts(n_bits)
    damped = coeffs**2 * (1.0 - gamma) ** (2 * pops)
    out = np.zeros(n_bits)
    masks = np.arange(coeffs.size)
    for i in range(n_bits):
        out[i] = float(damped[(masks >> i) & 1 == 1].sum())
    return out


def block_noisy_influences(coeffs: np.ndarray, gamma: float,
                           blocks: list[int]) -> np.ndarray:
    """Inf_i over the cube of the blockwise noise operator, which damps a
    character by (1-gamma) per touched block rather than per coordinate."""
    n_bits = int(round(math.log2(coeffs.size)))
    masks = np.arange(coeffs.size)
    hits = np.zeros(coeffs.size, dtype=np.int64)
    for b in blocks:
        hits += (masks & b) != 0
    damped = coeffs**2 * (1.0 - gamma) ** (2 * hits)
    out = np.zeros(n_bits)
    for i in range(n_bits):
        out[i] = float(damped[(masks >> i) & 1 == 1].sum())
    return out


def block_influence(coeffs: np.ndarray, block_mask: int) -> float:
    masks = np.arange(coeffs.size)
    return float((coeffs**2)[(masks & block_mask) != 0].sum())


def yz_character_matrix(dist: DDeltaR) -> np.ndarray:
    """M[a, b] = E[chi_a(Y) chi_b(Z)] under the base distribution."""
    size = 1 << dist.r
    yz = dist.joint.marginal((1, 2))
    M = np.zeros((size, size))
    signs = np.array([[(-1) ** bin(a & m).count("1") for m in range(size)]
                      for a in range(size)], dtype=np.float64)
    # signs[a, m] = chi_a(point m)
    for a in range(size):
        for b in range(size):
            M[a, b] = float((np.outer(signs[a], signs[b]) * yz).sum())
    return M


def cross_expectation(f_coeffs: np.ndarray, g_coeffs: np.ndarray,
                      blocks: list[int], M: np.ndarray) -> float:
    """E[f(y) g(z)] when (y, z) restricted to each block is an independent
    draw of the base (Y, Z) pair."""
    n = f_coeffs.size
    fa = np.nonzero(np.abs(f_coeffs) > 1e-15)[0]
    gb = np.nonzero(np.abs(g_coeffs) > 1e-15)[0]
    block_pos = [sorted(j for j in range(int(round(math.log2(n)))) if (b >> j) & 1)
                 for b in blocks]

    def local(mask: int, positions) -> int:
        out = 0
        for t, j in enumerate(positions):
            out |= ((mask >> j) & 1) << t
        return out

    total = 0.0
    for a in fa:
        for b in gb:
            prod = float(f_coeffs[a]) * float(g_coeffs[b])
            for bi, positions in enumerate(block_pos):
                prod *= M[local(int(a), positions), local(int(b), positions)]
                if prod == 0.0:
                    break
            total += prod
    return total


# ---------------------------------------------------------------------------
# Gadget construction

@dataclass
class Dto1Gadget:
    pcp: LayeredPcp
    delta: float
    mode: str
    offsets: dict[tuple[int, int], int]
    vertex_count: int
    constraint_edges: list[list[tuple[int, int, int]] | None]
    constraint_pairs: list[list[tuple[int, int]] | None]
    constraint_r: list[int]

    @property
    def dropped_degenerate(self) -> int:
        return sum(len(p) for p in self.constraint_pairs if p is not None)

    def vertex_id(self, layer: int, var: int, point: int) -> int:
        return self.offsets[(layer, var)] + point

    def vertex_weight(self, layer: int, var: int) -> Fraction:
        return Fraction(1, (1 << self.pcp.label_sizes[layer])
                        * self.pcp.layers * self.pcp.var_counts[layer])

    def edge_exists(self, ci: int, x: int, y: int, z: int) -> bool:
        c = self.pcp.constraints[ci]
        dist = dist_table(self.delta, self.constraint_r[ci])
        blocks = blocks_of(c.projection, self.pcp.label_sizes[c.to_layer])
        for i, bmask in enumerate(blocks):
            positions = [j for j in range(self.pcp.label_sizes[c.from_layer]) if (bmask >> j) & 1]
            ym = sum(((y >> j) & 1) << t for t, j in enumerate(positions))
            zm = sum(((z >> j) & 1) << t for t, j in enumerate(positions))
            if dist.prob((x >> i) & 1, ym, zm) <= 0:
                return False
        return True

    def to_hypergraph(self) -> GenericHypergraph:
        if self.mode != "enumerate":
            raise ValueError("export requires enumerate mode")
        vertices = []
        weights = {}
        for (l, v), off in sorted(self.offsets.items(), key=lambda kv: kv[1]):
            w = self.vertex_weight(l, v)
            for pt in range(1 << self.pcp.label_sizes[l]):
                vertices.append(off + pt)
                weights[off + pt] = w
        edges = set()
        for ci, c in enumerate(self.pcp.constraints):
            for x, y, z in self.constraint_edges[ci]:
                edges.add(tuple(sorted((
                    self.vertex_id(c.to_layer, c.u, x),
                    self.vertex_id(c.from_layer, c.v, y),
                    self.vertex_id(c.from_layer, c.v, z),
                ))))
        meta = {"kind": "dto1", "delta": self.delta,
                "dropped_degenerate": self.dropped_degenerate}
        return GenericHypergraph(3, tuple(vertices), tuple(sorted(edges)), weights, meta)


def build(pcp: LayeredPcp, delta: float) -> Dto1Gadget:
    """Per-constraint product supports over the base distribution; full
    enumeration when the packed (x, y, z) description fits the bit cap."""
    if pcp.params is None or "d" not in pcp.params:
        raise ValueError("the correlated-test gadget needs a smooth layered PCP")
    d = pcp.params["d"]
    offsets = {}
    acc = 0
    for l in range(pcp.layers):
        for v in range(pcp.var_counts[l]):
            offsets[(l, v)] = acc
            acc += 1 << pcp.label_sizes[l]
    constraint_edges: list[list[tuple[int, int, int]] | None] = []
    constraint_pairs: list[list[tuple[int, int]] | None] = []
    constraint_r: list[int] = []
    dist_cache: dict[int, DDeltaR] = {}
    for c in pcp.constraints:
        r = d ** (c.to_layer - c.from_layer)
        constraint_r.append(r)
        if pcp.label_sizes[c.to_layer] * (1 + 2 * r) > EDGE_ENUM_BITS:
            constraint_edges.append(None)
            constraint_pairs.append(None)
            continue
        dist = dist_cache.setdefault(r, dist_table(delta, r))
        support = dist.support()
        blocks = blocks_of(c.projection, pcp.label_sizes[c.to_layer])
        block_pos = [
            [j for j in range(pcp.label_sizes[c.from_layer]) if (b >> j) & 1]
            for b in blocks
        ]
        partial: list[tuple[int, int, int]] = [(0, 0, 0)]
        for i, positions in enumerate(block_pos):
            scattered = []
            for x_bit, ym, zm in support:
                ys = sum(((ym >> t) & 1) << j for t, j in enumerate(positions))
                zs = sum(((zm >> t) & 1) << j for t, j in enumerate(positions))
                scattered.append((x_bit << i, ys, zs))
            partial = [
                (x | xb, y | yb, z | zb)
                for (x, y, z) in partial
                for (xb, yb, zb) in scattered
            ]
        edges = []
        pairs = []
        for x, y, z in partial:
            if y == z:
                pairs.append((x, y))
            else:
                edges.append((x, y, z))
        constraint_edges.append(edges)
        constraint_pairs.append(pairs)
    if all(e is not None for e in constraint_edges):
        mode = "enumerate"
    elif all(e is None for e in constraint_edges):
        mode = "rule"
    else:
        mode = "mixed"
    return Dto1Gadget(pcp, delta, mode, offsets, acc, constraint_edges,
                      constraint_pairs, constraint_r)


@dataclass
class YesCheckResult:
    violations: list[tuple[int, int, int, int]]
    checked: int
    coverage: str

    @property
    def ok(self) -> bool:
        return not self.violations


def yes_check(g: Dto1Gadget, sigma, samples: int = 2000, seed: int = 0) -> YesCheckResult:
    """The dictated coloring (the bit named by the labeling) must make
    every edge non-monochromatic."""
    pcp = g.pcp
    sigma = [list(layer) for layer in sigma]
    for c in pcp.constraints:
        if c.projection[sigma[c.from_layer][c.v]] != sigma[c.to_layer][c.u]:
            raise ValueError("labeling does not satisfy the PCP")
    violations = []
    checked = 0

    def check(ci: int, c: PcpConstraint, x: int, y: int, z: int) -> None:
        nonlocal checked
        checked += 1
        cx = (x >> sigma[c.to_layer][c.u]) & 1
        cy = (y >> sigma[c.from_layer][c.v]) & 1
        cz = (z >> sigma[c.from_layer][c.v]) & 1
        if cx == cy == cz:
            violations.append((ci, x, y, z))

    sampled = 0
    for ci, c in enumerate(pcp.constraints):
        if g.constraint_edges[ci] is not None:
            for x, y, z in g.constraint_edges[ci]:
                check(ci, c, x, y, z)
            for x, y in g.constraint_pairs[ci]:
                check(ci, c, x, y, y)
            continue
        sampled += 1
        rng = derive_rng(seed, "yes-check", ci)
        r = g.constraint_r[ci]
        blocks = blocks_of(c.projection, pcp.label_sizes[c.to_layer])
        for _ in range(samples):
            x = y = z = 0
            for i, bmask in enumerate(blocks):
                positions = [j for j in range(pcp.label_sizes[c.from_layer])
                             if (bmask >> j) & 1]
                xv, yv, zv = sample(g.delta, r, rng)
                x |= (1 if xv == -1 else 0) << i
                for t, j in enumerate(positions):
                    y |= (1 if yv[t] == -1 else 0) << j
                    z |= (1 if zv[t] == -1 else 0) << j
            check(ci, c, x, y, z)
    coverage = ("exhaustive" if sampled == 0
                else f"sampled:{samples} per constraint on {sampled} constraints")
    return YesCheckResult(violations, checked, coverage)


# ---------------------------------------------------------------------------
# Decoding

@dataclass(frozen=True)
class DecodeParams:
    """The caller-supplied parameter cascade; eta is derived once r is
    fixed by the chosen layer pair."""

    delta: float
    eps: float
    nu: float
    gamma: float
    tau: float
    s: float
    T: int

    def eta(self, r: int) -> float:
        return 2.0 * self.delta / r


def suggest_params(delta: float, eps: float, nu: float, r: int, T: int,
                   c_gamma: float = 1.0, c_tau: float = 1.0) -> DecodeParams:
    """The formula values with the unspecified absolute constants set to
    the caller's choices (1 by default); suggestions only."""
    xi = delta / (r * 2.0**r)
    gamma = c_gamma * nu * xi**2 / (2.0 * math.log(1.0 / nu))
    tau = nu ** (c_tau * math.log(1.0 / xi) * math.log(1.0 / nu) / (nu * (1.0 - delta)))
    s = max(r / xi * math.log(1.0 / nu),
            r / (2.0 * gamma) * math.log(32.0 * r * r / max(tau, 1e-300)))
    return DecodeParams(delta, eps, nu, gamma, tau, s, T)


@dataclass
class Dto1DecodeResult:
    outcome: str
    layer_pair: tuple[int, int] | None
    r: int | None
    labels_v: dict[tuple[int, int], int]
    labels_u: dict[tuple[int, int], int]
    satisfied_fraction: Fraction
    satisfied_fraction_all: Fraction
    good_neighbors: dict[tuple[int, int], bool]
    diagnostics: dict


def decode(indicators: dict[tuple[int, int], np.ndarray], pcp: LayeredPcp,
           params: DecodeParams, seed: int = 0) -> Dto1DecodeResult:
    """Influence decoding: pick a heavy layer pair, mark good neighbors by
    the unshattered-mass bound, and label each side with probability
    proportional to its noisy influences."""
    if pcp.params is None or "d" not in pcp.params:
        raise ValueError("decode needs a smooth layered PCP")
    d = pcp.params["d"]
    for key, f in indicators.items():
        f = np.asarray(f)
        if f.min() < -1e-12 or f.max() > 1.0 + 1e-12:
            raise ValueError(f"indicator {key} is not [0, 1]-valued")

    half = params.eps / 2.0
    heavy: dict[int, list[int]] = {l: [] for l in range(pcp.layers)}
    for (l, v), f in indicators.items():
        if float(np.mean(f)) >= half:
            heavy[l].append(v)
    if not any(heavy.values()):
        raise NoHeavyError("no heavy variables at threshold eps/2")
    quarter = params.eps / 4.0
    qualified = {l: set(vs) for l, vs in heavy.items()
                 if len(vs) >= quarter * pcp.var_counts[l]}
    if len(qualified) < 2:
        raise NoHeavyError("fewer than two layers reach an eps/4 fraction of heavy variables")
    density = check_weak_density(pcp, qualified, quarter)
    if density["best_pair"] is None:
        raise NoHeavyError("no constraints between qualifying layers")
    l, l2 = density["best_pair"]
    r = d ** (l2 - l)
    eta = params.eta(r)
    dist = dist_table(params.delta, r)
    M = yz_character_matrix(dist)

    spectra: dict[tuple[int, int], np.ndarray] = {}
    for v in qualified[l]:
        spectra[(l, v)] = cube_spectrum(np.asarray(indicators[(l, v)], dtype=np.float64))
    for u in qualified[l2]:
        spectra[(l2, u)] = cube_spectrum(np.asarray(indicators[(l2, u)], dtype=np.float64))

    good: dict[tuple[int, int], bool] = {}
    pair_floor = (params.eps / 2.0) ** (4.0 / eta)
    good_bound = (params.s**2 / params.T) ** 0.25
    diag_pairs = []
    cons = [c for c in pcp.constraints_between(l, l2)
            if c.v in qualified[l] and c.u in qualified[l2]]
    for c in cons:
        blocks = blocks_of(c.projection, pcp.label_sizes[l2])
        dec = shattered_decomposition(spectra[(l, c.v)], c.projection,
                                      pcp.label_sizes[l2], params.s)
        f2_norm = dec.norms[1]
        is_good = f2_norm <= good_bound
        good[(c.v, c.u)] = is_good
        eyz = cross_expectation(spectra[(l, c.v)], spectra[(l, c.v)], blocks, M)
        inf_bar = block_noisy_influences(spectra[(l, c.v)], params.gamma, blocks)
        inf_plain = noisy_influences(spectra[(l, c.v)], params.gamma)
        gap = float(np.max(np.abs(inf_bar - inf_plain))) if inf_bar.size else 0.0
        inf_u = noisy_influences(spectra[(l2, c.u)], params.gamma)
        matched = False
        for i in range(pcp.label_sizes[l2]):
            block_sum = float(inf_bar[[j for j in range(pcp.label_sizes[l])
                                       if (blocks[i] >> j) & 1]].sum())
            if min(inf_u[i], 4.0 * r * block_sum) >= params.tau:
                matched = True
                break
        diag_pairs.append({
            "v": c.v, "u": c.u, "good": is_good, "f2_norm": f2_norm,
            "pair_expectation": eyz, "pair_floor": pair_floor,
            "influence_gap": gap,
            "influence_gap_bound": 2.0 * good_bound + params.tau / (16.0 * r * r),
            "matched_influence": matched,
        })

    labels_v: dict[tuple[int, int], int] = {}
    labels_u: dict[tuple[int, int], int] = {}
    no_influence = True
    for (layer, var) in sorted(spectra):
        weights = noisy_influences(spectra[(layer, var)], params.gamma)
        total = float(weights.sum())
        if total <= 0.0:
            continue
        no_influence = False
        rng = derive_rng(seed, "label", layer, var)
        pick = rng.random() * total
        acc = 0.0
        chosen = weights.size - 1
        for i, w in enumerate(weights):
            acc += float(w)
            if pick <= acc:
                chosen = i
                break
        (labels_v if layer == l else labels_u)[(layer, var)] = chosen

    if no_influence:
        return Dto1DecodeResult("no_influential_coordinates", (l, l2), r, {}, {},
                                Fraction(0), Fraction(0), good,
                                {"pairs": diag_pairs, "eta": eta})

    sat = labeled = 0
    for c in cons:
        rv = labels_v.get((l, c.v))
        lu = labels_u.get((l2, c.u))
        if rv is None or lu is None:
            continue
        labeled += 1
        sat += c.projection[rv] == lu
    total_cons = len(pcp.constraints_between(l, l2))
    return Dto1DecodeResult(
        "ok", (l, l2), r, labels_v, labels_u,
        Fraction(sat, labeled) if labeled else Fraction(0),
        Fraction(sat, total_cons) if total_cons else Fraction(0),
        good,
        {"pairs": diag_pairs, "eta": eta,
         "density": {str(k): str(f) for k, f in density["per_pair"].items()}},
    )
