"""Weighted digraphs, their Laplacians, and symmetrizable structure.

The Laplacian of a weighted digraph is D - A with D the diagonal of out-degrees
d_i = sum_j w_ij and A the weighted adjacency matrix.  A digraph is
symmetrizable when a positive left null vector m of the Laplacian satisfies
detailed balance m_i * w_ij = m_j * w_ji on every adjacent pair; the Laplacian
then factors as diag(m)^-1 times a symmetric Laplacian.  A general Laplacian
splits into a symmetrizable part plus a one-way-link part, and the family
lap0 + eps * lapI interpolates away from the symmetrizable point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import Disconnected, InvalidGraph, ParseError

# Entry-level tolerance used by the Laplacian invariant checks, scaled by
# (1 + max |entry|).
_ENTRY_TOL = 1e-12


@dataclass(frozen=True)
class WeightedDigraph:
    """Node count plus positively weighted directed edges.

    Edges are (src, dst, weight) with 0 <= src, dst < n, src != dst, weight > 0,
    and at most one edge per ordered pair.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidGraph(f"node count must be positive, got {self.n}")
        object.__setattr__(
            self, "edges",
            tuple((int(s), int(d), float(w)) for s, d, w in self.edges),
        )
        seen = set()
        for s, d, w in self.edges:
            if not (0 <= s < self.n and 0 <= d < self.n):
                raise InvalidGraph(f"edge ({s},{d}) out of range for n={self.n}")
            if s == d:
                raise InvalidGraph(f"self-loop at node {s}")
            if not (w > 0 and np.isfinite(w)):
                raise InvalidGraph(f"edge ({s},{d}) has non-positive weight {w}")
            if (s, d) in seen:
                raise InvalidGraph(f"duplicate edge ({s},{d})")
            seen.add((s, d))


def undirected_graph(n, pairs, weight=1.0):
    """Digraph carrying each undirected pair in both directions at ``weight``.

    ``pairs`` may also be (i, j, w) triples giving per-pair weights.
    """
    edges = []
    for p in pairs:
        if len(p) == 3:
            i, j, w = p
        else:
            (i, j), w = p, weight
        edges.append((i, j, w))
        edges.append((j, i, w))
    return WeightedDigraph(n=n, edges=tuple(edges))


class LaplacianMatrix:
    """Dense real n x n matrix with zero row sums, nonpositive off-diagonal
    and nonnegative diagonal entries.  Immutable after construction."""

    __slots__ = ("n", "entries")

    def __init__(self, entries):
        arr = np.array(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidGraph(f"Laplacian must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidGraph("Laplacian entries must be finite")
        scale = _ENTRY_TOL * (1.0 + np.max(np.abs(arr), initial=0.0))
        rowsum = arr.sum(axis=1)
        if np.max(np.abs(rowsum), initial=0.0) > scale:
            raise InvalidGraph(
                f"row sums must vanish: worst {np.max(np.abs(rowsum)):.3e}")
        off = arr - np.diag(np.diag(arr))
        if off.max(initial=0.0) > scale:
            raise InvalidGraph("off-diagonal entries must be <= 0")
        if np.diag(arr).min(initial=0.0) < -scale:
            raise InvalidGraph("diagonal entries must be >= 0")
        arr.flags.writeable = False
        object.__setattr__(self, "n", arr.shape[0])
        object.__setattr__(self, "entries", arr)

    def __setattr__(self, name, value):
        raise AttributeError("LaplacianMatrix is immutable")

    def __repr__(self):
        return f"LaplacianMatrix(n={self.n})"

    def __eq__(self, other):
        return (isinstance(other, LaplacianMatrix)
                and np.array_equal(self.entries, other.entries))

    @property
    def d_max(self):
        """Largest weighted out-degree (largest diagonal entry, floored at 0)."""
        return float(max(np.max(np.diag(self.entries)), 0.0))

    def weight(self, i, j):
        """Weight of the directed link i -> j (0 if absent)."""
        return float(-self.entries[i, j]) if i != j else 0.0

    def is_symmetric(self, rtol=1e-12):
        scale = max(np.max(np.abs(self.entries)), 1.0)
        return bool(np.max(np.abs(self.entries - self.entries.T)) <= rtol * scale)


@dataclass(frozen=True)
class GershgorinDisk:
    """Disk centered at d_max with radius d_max; contains the whole spectrum."""

    center: float
    radius: float

    def contains(self, z, slack=0.0):
        return abs(complex(z) - self.center) <= self.radius + slack


@dataclass(frozen=True)
class SymmetrizableDecomposition:
    """Masses m and symmetric Laplacian L with lap = diag(m)^-1 L."""

    m: np.ndarray
    lap_sym: LaplacianMatrix

    def __post_init__(self):
        m = np.array(self.m, dtype=float)
        m.flags.writeable = False
        object.__setattr__(self, "m", m)
        if np.any(m <= 0):
            raise InvalidGraph("mass vector must be positive")
        if not self.lap_sym.is_symmetric():
            raise InvalidGraph("lap_sym must be symmetric")


@dataclass(frozen=True)
class NotSymmetrizable:
    """Verdict explaining why a Laplacian admits no symmetrizing mass vector.

    ``reason`` is "nonpositive_mass" or "detailed_balance"; ``pair`` names the
    offending node (mass case) or node pair (balance case).
    """

    reason: str
    pair: tuple = ()
    detail: str = ""

    def __bool__(self):
        return False


@dataclass(frozen=True)
class OneWaySplit:
    """Symmetrizable part plus one-way-link part; parts sum to the original."""

    lap_sym_part: LaplacianMatrix
    lap_oneway: LaplacianMatrix


def laplacian_of(g: WeightedDigraph) -> LaplacianMatrix:
    """Laplacian D - A of a weighted digraph."""
    mat = np.zeros((g.n, g.n))
    for s, d, w in g.edges:
        mat[s, d] -= w
        mat[s, s] += w
    return LaplacianMatrix(mat)


def gershgorin_disk(lap: LaplacianMatrix) -> GershgorinDisk:
    """Largest Gershgorin disk: center and radius both equal d_max."""
    d = lap.d_max
    return GershgorinDisk(center=d, radius=d)


def _undirected_components(pattern):
    """Connected components of the symmetrized nonzero pattern."""
    n = pattern.shape[0]
    adj = (pattern != 0) | (pattern != 0).T
    np.fill_diagonal(adj, False)
    comp = -np.ones(n, dtype=int)
    ncomp = 0
    for start in range(n):
        if comp[start] >= 0:
            continue
        stack = [start]
        comp[start] = ncomp
        while stack:
            u = stack.pop()
            for v in np.flatnonzero(adj[u]):
                if comp[v] < 0:
                    comp[v] = ncomp
                    stack.append(v)
        ncomp += 1
    return ncomp


def left_null_vector(lap: LaplacianMatrix) -> np.ndarray:
    """Left eigenvector m of the zero eigenvalue, with min nonzero |m_i| = 1.

    Requires a connected nonzero pattern and a simple zero eigenvalue; the sign
    is fixed so the largest-magnitude component is positive.
    """
    n = lap.n
    if n == 1:
        return np.ones(1)
    if _undirected_components(lap.entries) != 1:
        raise Disconnected("graph nonzero pattern is not connected")
    # Null space of lap^T via SVD; simplicity of the zero eigenvalue shows up
    # as exactly one vanishing singular value.
    u, s, vt = np.linalg.svd(lap.entries.T)
    smax = s[0] if s[0] > 0 else 1.0
    if n >= 2 and s[-2] <= 1e-10 * smax:
        raise Disconnected("zero eigenvalue is not simple")
    m = vt[-1]
    k = int(np.argmax(np.abs(m)))
    if m[k] < 0:
        m = -m
    nonzero = np.abs(m) > 1e-12 * np.max(np.abs(m))
    m = m / np.min(np.abs(m[nonzero]))
    m[~nonzero] = 0.0
    norm = np.linalg.norm(lap.entries, np.inf)
    resid = np.linalg.norm(m @ lap.entries, np.inf)
    if resid > 1e-9 * max(norm, 1.0):
        raise Disconnected(f"left null vector residual too large: {resid:.3e}")
    return m


def check_symmetrizable(lap: LaplacianMatrix, tol: float = 1e-9):
    """Symmetrizable decomposition of ``lap``, or a NotSymmetrizable verdict.

    Positive-mass and detailed-balance checks both use ``tol`` relative to the
    largest edge weight and mass.  Returns SymmetrizableDecomposition on
    success; the returned lap_sym is diag(m) @ lap, symmetrized to kill
    floating-point fuzz.
    """
    m = left_null_vector(lap)
    mmax = np.max(np.abs(m)) if lap.n > 1 else 1.0
    bad = np.flatnonzero(m <= tol * mmax)
    if bad.size:
        i = int(bad[0])
        return NotSymmetrizable(
            reason="nonpositive_mass", pair=(i,),
            detail=f"component m[{i}] = {m[i]:.3e} is not positive")
    off = -lap.entries + np.diag(np.diag(lap.entries))
    wmax = np.max(off) if lap.n > 1 else 0.0
    thresh = tol * max(wmax, 1e-300) * mmax
    bal = m[:, None] * off - (m[:, None] * off).T
    viol = np.abs(bal)
    if lap.n > 1 and np.max(viol) > thresh:
        i, j = np.unravel_index(np.argmax(viol), viol.shape)
        return NotSymmetrizable(
            reason="detailed_balance", pair=(int(i), int(j)),
            detail=(f"m_i*w_ij = {m[i] * off[i, j]:.6e} vs "
                    f"m_j*w_ji = {m[j] * off[j, i]:.6e}"))
    prod = m[:, None] * lap.entries
    lap_sym = LaplacianMatrix((prod + prod.T) / 2.0)
    return SymmetrizableDecomposition(m=m, lap_sym=lap_sym)


def scaled_laplacian(dec: SymmetrizableDecomposition) -> np.ndarray:
    """Symmetric matrix diag(m)^-1/2 L diag(m)^-1/2, isospectral to the
    symmetrizable Laplacian diag(m)^-1 L."""
    inv_sqrt = 1.0 / np.sqrt(dec.m)
    s = inv_sqrt[:, None] * dec.lap_sym.entries * inv_sqrt[None, :]
    return (s + s.T) / 2.0


def _exact_complement(total, part):
    # fl(total - fl(total - part)) is exact for 0 <= part <= total (the
    # FastTwoSum lemma), so complement + residual recomposes to total with no
    # rounding.
    residual = total - part
    return total - residual, residual


def canonical_split(lap: LaplacianMatrix) -> OneWaySplit:
    """Split into an undirected Laplacian plus a one-way-link Laplacian.

    Symmetric-min rule: each unordered pair keeps min(w_ij, w_ji) in both
    directions; the heavier direction carries the weight difference as a
    one-way link.  Entries are arranged so the two parts recompose to ``lap``
    exactly, entry by entry.
    """
    n = lap.n
    a = lap.entries
    sym = np.zeros((n, n))
    one = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            w_ij, w_ji = -a[i, j], -a[j, i]
            if w_ij == 0.0 and w_ji == 0.0:
                continue
            if w_ij >= w_ji:
                hi, lo, heavy = w_ij, w_ji, (i, j)
            else:
                hi, lo, heavy = w_ji, w_ij, (j, i)
            u_heavy, residual = _exact_complement(hi, lo)
            # light direction keeps its original entry bit-for-bit; the heavy
            # direction's min copy may differ by one ulp, which stays far
            # inside the symmetry tolerance
            sym[i, j] = sym[j, i] = -lo
            sym[heavy] = -u_heavy
            one[heavy] = -residual
    # Diagonals: the symmetric part's degree is the exact complement of the
    # one-way degree inside the original diagonal, so both parts keep zero row
    # sums (within tolerance) and the matrices recompose exactly.
    for i in range(n):
        d_sym = float(-np.sum(sym[i]))
        d_sym_exact, d_one = _exact_complement(a[i, i], min(d_sym, a[i, i]))
        sym[i, i] = d_sym_exact
        one[i, i] = d_one
    sym += 0.0  # clear negative zeros
    one += 0.0
    return OneWaySplit(lap_sym_part=LaplacianMatrix(sym),
                       lap_oneway=LaplacianMatrix(one))


def compose_epsilon(split, eps: float) -> LaplacianMatrix:
    """Laplacian lap0 + eps * lapI; eps = 0 returns lap0 exactly.

    ``split`` is a OneWaySplit or an explicit (lap0, lapI) pair.
    """
    if isinstance(split, OneWaySplit):
        lap0, lapI = split.lap_sym_part, split.lap_oneway
    else:
        lap0, lapI = split
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if lap0.n != lapI.n:
        raise ValueError("parts must have the same dimension")
    if eps == 0.0:
        return lap0
    return LaplacianMatrix(lap0.entries + eps * lapI.entries)


# --- interchange formats ----------------------------------------------------

def graph_from_json(text: str) -> WeightedDigraph:
    """Parse {"n": int, "edges": [[src, dst, w], ...]}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "n" not in doc or "edges" not in doc:
        raise ParseError('graph JSON requires keys "n" and "edges"')
    try:
        edges = tuple((int(s), int(d), float(w)) for s, d, w in doc["edges"])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed edge list: {exc}") from exc
    return WeightedDigraph(n=int(doc["n"]), edges=edges)


def graph_from_edge_csv(text: str) -> WeightedDigraph:
    """Parse an edge-list CSV with header src,dst,w."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty edge CSV")
    header = [h.strip().lower() for h in lines[0].split(",")]
    if header[:3] != ["src", "dst", "w"]:
        raise ParseError(f'expected header "src,dst,w", got "{lines[0]}"', line=1)
    edges = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 3:
            raise ParseError(f"expected 3 fields, got {len(parts)}", line=lineno)
        try:
            edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from exc
    n = 1 + max((max(s, d) for s, d, _ in edges), default=-1)
    if n < 1:
        raise ParseError("edge CSV contains no edges")
    return WeightedDigraph(n=n, edges=tuple(edges))


def matrix_to_csv(mat) -> str:
    """Dense row-major CSV with 17 significant digits."""
    arr = mat.entries if isinstance(mat, LaplacianMatrix) else np.asarray(mat)
    return "\n".join(",".join(f"{v:.17g}" for v in row) for row in arr) + "\n"


def matrix_from_csv(text: str) -> np.ndarray:
    rows = []
    for lineno, ln in enumerate(text.splitlines(), start=1):
        if not ln.strip():
            continue
        try:
            rows.append([float(v) for v in ln.split(",")])
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from exc
    if not rows:
        raise ParseError("empty matrix CSV")
    lens = {len(r) for r in rows}
    if len(lens) != 1:
        raise ParseError("ragged matrix CSV")
    return np.array(rows)
