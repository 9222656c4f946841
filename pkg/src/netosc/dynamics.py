"""Wave-equation dynamics on networks and oscillation-energy centrality.

States obey d2x/dt2 = -L x.  With a symmetrizable decomposition L = M^-1 K the
substitution y = M^1/2 x turns the system symmetric, the eigenbasis is
orthonormal, and each mode is a harmonic oscillator
a_mu(t) = c+ exp(i w t) + c- exp(-i w t) with w = sqrt(lambda).  Without the
decomposition the same expansion runs on the (possibly oblique) eigenbasis of
L itself, with coefficients obtained by solving V a = y(0) rather than by
inner products.  Per-node oscillation energy
E_i = sum_mu lambda_mu (|c+|^2 + |c-|^2) v_mu(i)^2 is time-independent on an
orthonormal basis and reduces to degree or betweenness centrality for special
link weights; on an oblique basis the total energy gains cross terms beating
at the eigenfrequency differences.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    DefectiveMatrix,
    Disconnected,
    InvalidGraph,
    NotSymmetrizableError,
    Unstable,
)
from .graph import (
    LaplacianMatrix,
    NotSymmetrizable,
    SymmetrizableDecomposition,
    WeightedDigraph,
    check_symmetrizable,
    compose_epsilon,
    laplacian_of,
    scaled_laplacian,
    undirected_graph,
)
from .signal import TimeSeries, estimate_beat_frequency
from .spectral import (
    ZERO_TOL_FACTOR,
    EigenSystem,
    eigen_gap,
    eigendecompose,
    mode_frequencies,
    spectrum_is_real,
)

# Trajectories whose max |x_i| crosses this are reported as unstable.
DIVERGENCE_CUTOFF = 1e12


@dataclass(frozen=True)
class InitialCondition:
    """Initial states x0 and state velocities v0."""

    x0: np.ndarray
    v0: np.ndarray

    def __post_init__(self):
        x0 = np.array(self.x0, dtype=float)
        v0 = np.array(self.v0, dtype=float)
        if x0.shape != v0.shape or x0.ndim != 1:
            raise ValueError(f"mismatched shapes {x0.shape} vs {v0.shape}")
        if not (np.all(np.isfinite(x0)) and np.all(np.isfinite(v0))):
            raise ValueError("initial condition must be finite")
        x0.flags.writeable = False
        v0.flags.writeable = False
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "v0", v0)

    @classmethod
    def at_rest(cls, x0):
        x0 = np.asarray(x0, dtype=float)
        return cls(x0=x0, v0=np.zeros_like(x0))

    @property
    def n(self):
        return self.x0.size


@dataclass(frozen=True)
class ModalSolution:
    """Mode expansion of a wave-equation solution.

    mass is all-ones when a general Laplacian was decomposed directly; zero
    modes are stored as (mode index, offset, drift) triples realizing
    a(t) = offset + drift * t, the w -> 0 limit of the oscillator solution.
    """

    mass: np.ndarray
    omegas: np.ndarray
    eigvecs: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    zero_modes: tuple

    @property
    def n(self):
        return self.omegas.size

    @property
    def spectrum_real(self):
        return bool(np.max(np.abs(self.omegas.imag), initial=0.0) == 0.0)

    def basis_is_orthonormal(self, tol=1e-8):
        v = self.eigvecs
        gram = v.conj().T @ v
        return bool(np.max(np.abs(gram - np.eye(self.n))) <= tol
                    and np.max(np.abs(v.imag)) <= tol)


@dataclass(frozen=True)
class Trajectory:
    """Uniformly time-stepped states and velocities."""

    times: np.ndarray
    states: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        for name in ("times", "states", "velocities"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        steps = np.diff(self.times)
        if steps.size and np.max(np.abs(steps - steps[0])) > 1e-12 * max(abs(steps[0]), 1.0):
            raise ValueError("time grid must be uniform")
        if not np.all(np.isfinite(self.states)):
            raise ValueError("trajectory contains non-finite states")

    def peak_amplitude(self):
        return float(np.max(np.abs(self.states)))


@dataclass(frozen=True)
class EnergyReport:
    """Per-node energies, stationary total, and optionally the E(t) series."""

    per_node: np.ndarray
    total: float
    series: TimeSeries | None = None


def _solution_coefficients(es: EigenSystem, mass, ic: InitialCondition):
    sqrt_m = np.sqrt(mass)
    y0 = (sqrt_m * ic.x0).astype(complex)
    yd0 = (sqrt_m * ic.v0).astype(complex)
    a0 = np.linalg.solve(es.eigenvectors, y0)
    ad0 = np.linalg.solve(es.eigenvectors, yd0)
    om = mode_frequencies(es).omegas
    nonzero = om != 0
    c_plus = np.zeros_like(a0)
    c_minus = np.zeros_like(a0)
    c_plus[nonzero] = (a0[nonzero] - 1j * ad0[nonzero] / om[nonzero]) / 2.0
    c_minus[nonzero] = (a0[nonzero] + 1j * ad0[nonzero] / om[nonzero]) / 2.0
    zero_modes = tuple(
        (int(k), float(a0[k].real), float(ad0[k].real))
        for k in np.flatnonzero(~nonzero))
    return om, c_plus, c_minus, zero_modes


def modal_solve(lap: LaplacianMatrix, ic: InitialCondition,
                sym: SymmetrizableDecomposition | None = None) -> ModalSolution:
    """Mode expansion of the wave equation for ``lap`` from ``ic``.

    With ``sym`` the expansion runs on the orthonormal basis of the scaled
    symmetric matrix; without it the Laplacian itself is decomposed (mass 1).
    Raises DefectiveMatrix when the eigenbasis is numerically dependent.
    """
    if ic.n != lap.n:
        raise ValueError(f"initial condition size {ic.n} != n = {lap.n}")
    if sym is not None:
        prod = sym.m[:, None] * lap.entries
        scale = max(np.max(np.abs(prod)), 1.0)
        if np.max(np.abs(prod - sym.lap_sym.entries)) > 1e-10 * scale:
            raise ValueError("decomposition does not match the Laplacian")
        mass = sym.m
        es = eigendecompose(scaled_laplacian(sym))
    else:
        mass = np.ones(lap.n)
        es = eigendecompose(lap)
    om, c_plus, c_minus, zero_modes = _solution_coefficients(es, mass, ic)
    sol = ModalSolution(mass=mass, omegas=om, eigvecs=es.eigenvectors,
                        c_plus=c_plus, c_minus=c_minus, zero_modes=zero_modes)
    x0_check, v0_check = evaluate_state(sol, 0.0), evaluate_velocity(sol, 0.0)
    scale = 1.0 + max(np.max(np.abs(ic.x0)), np.max(np.abs(ic.v0)))
    if (np.max(np.abs(x0_check - ic.x0)) > 1e-8 * scale
            or np.max(np.abs(v0_check - ic.v0)) > 1e-8 * scale):
        raise DefectiveMatrix("initial condition not reproduced by the mode expansion")
    return sol


def _mode_amplitudes(sol: ModalSolution, times):
    times = np.asarray(times, dtype=float)
    at = np.zeros((sol.n, times.size), dtype=complex)
    adot = np.zeros_like(at)
    nz = sol.omegas != 0
    if np.any(nz):
        arg = 1j * np.outer(sol.omegas[nz], times)
        plus, minus = np.exp(arg), np.exp(-arg)
        at[nz] = sol.c_plus[nz, None] * plus + sol.c_minus[nz, None] * minus
        adot[nz] = 1j * sol.omegas[nz, None] * (
            sol.c_plus[nz, None] * plus - sol.c_minus[nz, None] * minus)
    for k, offset, drift in sol.zero_modes:
        at[k] = offset + drift * times
        adot[k] = drift
    return at, adot


def _to_real(arr, what):
    scale = 1.0 + np.max(np.abs(arr.real), initial=0.0)
    worst = np.max(np.abs(arr.imag), initial=0.0)
    if worst > 1e-8 * scale:
        raise DefectiveMatrix(f"{what} has imaginary residue {worst:.3e}")
    return np.ascontiguousarray(arr.real)


def evaluate_states(sol: ModalSolution, times) -> np.ndarray:
    """States x(t) for a vector of times, shape (len(times), n)."""
    at, _ = _mode_amplitudes(sol, times)
    y = sol.eigvecs @ at
    x = y / np.sqrt(sol.mass)[:, None]
    return _to_real(x.T, "state reconstruction")


def evaluate_state(sol: ModalSolution, t: float) -> np.ndarray:
    """State x(t) at a single time."""
    return evaluate_states(sol, [t])[0]


def evaluate_velocity(sol: ModalSolution, t: float) -> np.ndarray:
    _, adot = _mode_amplitudes(sol, [t])
    yd = sol.eigvecs @ adot
    v = yd / np.sqrt(sol.mass)[:, None]
    return _to_real(v.T, "velocity reconstruction")[0]


def state_amplitude_bound(sol: ModalSolution, t_end: float = 0.0) -> float:
    """Time-independent envelope bound on max_i |x_i(t)| for real spectra
    (zero-mode drift contributes linearly up to ``t_end``)."""
    coef = np.abs(sol.c_plus) + np.abs(sol.c_minus)
    for k, offset, drift in sol.zero_modes:
        coef[k] = abs(offset) + abs(drift) * t_end
    per_node = (np.abs(sol.eigvecs) @ coef) / np.sqrt(sol.mass)
    return float(np.max(per_node))


def integrate_numeric(lap: LaplacianMatrix, ic: InitialCondition,
                      dt: float, t_end: float, substeps: int = 10) -> Trajectory:
    """Velocity-Verlet integration of d2x/dt2 = -L x on a grid of step ``dt``.

    Each output step advances through ``substeps`` internal Verlet steps, so
    the global error stays O(dt^2) in the output step with a constant small
    enough to track the mode expansion tightly at desk scale.  dt must respect
    the stability guard 0.2 / sqrt(2 d_max).  Raises Unstable with the first
    crossing time if any |x_i| exceeds 1e12.
    """
    if ic.n != lap.n:
        raise ValueError(f"initial condition size {ic.n} != n = {lap.n}")
    if dt <= 0 or t_end < 0:
        raise ValueError("dt must be positive and t_end nonnegative")
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    d_max = lap.d_max
    if d_max > 0 and dt > 0.2 / np.sqrt(2.0 * d_max):
        raise ValueError(
            f"dt = {dt} exceeds stability guard {0.2 / np.sqrt(2 * d_max):.6g}")
    steps = int(round(t_end / dt))
    h = dt / substeps
    times = np.arange(steps + 1) * dt
    states = np.empty((steps + 1, lap.n))
    vels = np.empty((steps + 1, lap.n))
    x = ic.x0.copy()
    v = ic.v0.copy()
    acc = -(lap.entries @ x)
    states[0], vels[0] = x, v
    for k in range(1, steps + 1):
        for _ in range(substeps):
            x = x + h * v + 0.5 * h * h * acc
            acc_new = -(lap.entries @ x)
            v = v + 0.5 * h * (acc + acc_new)
            acc = acc_new
        if np.max(np.abs(x)) > DIVERGENCE_CUTOFF:
            raise Unstable(f"|x| crossed {DIVERGENCE_CUTOFF:.0e} at t = {times[k]:.6g}",
                           t_diverge=float(times[k]))
        states[k], vels[k] = x, v
    return Trajectory(times=times, states=states, velocities=vels)


def node_energies(sol: ModalSolution) -> EnergyReport:
    """Per-node oscillation energies sum_mu lambda_mu (|c+|^2+|c-|^2) v_mu(i)^2.

    Valid on an orthonormal eigenbasis (symmetrizable graph); raises
    NotSymmetrizableError otherwise.  Time-independent by construction.
    """
    if not sol.basis_is_orthonormal():
        raise NotSymmetrizableError(
            "node energies need an orthonormal eigenbasis; "
            "the underlying graph is not symmetrizable")
    lam = (sol.omegas ** 2).real
    weights = lam * (np.abs(sol.c_plus) ** 2 + np.abs(sol.c_minus) ** 2)
    per_node = (np.abs(sol.eigvecs) ** 2) @ weights
    return EnergyReport(per_node=per_node, total=float(per_node.sum()))


def total_energy_series(sol: ModalSolution, times) -> EnergyReport:
    """Total oscillation energy over time.

    The stationary part is sum_mu w_mu^2 (|c+|^2 + |c-|^2); mode pairs add
    cross terms A_mu A_nu w_mu w_nu (v_mu . v_nu) cos((w_mu - w_nu) t), with
    per-mode amplitude A = sqrt(2 (|c+|^2 + |c-|^2)).  On an orthonormal basis
    the cross terms vanish and the series is constant, equal to the per-node
    total; oblique bases beat at the eigenfrequency differences.
    """
    times = np.asarray(times, dtype=float)
    amp = np.sqrt(2.0 * (np.abs(sol.c_plus) ** 2 + np.abs(sol.c_minus) ** 2))
    for k, _, _ in sol.zero_modes:
        amp[k] = 0.0
    om = sol.omegas
    stationary = 0.5 * float(np.sum(amp ** 2 * np.abs(om) ** 2))
    energy = np.full(times.size, stationary, dtype=complex)
    for mu in range(sol.n):
        if amp[mu] == 0.0:
            continue
        for nu in range(mu + 1, sol.n):
            if amp[nu] == 0.0:
                continue
            dot = np.dot(sol.eigvecs[:, mu], sol.eigvecs[:, nu])
            coef = amp[mu] * amp[nu] * om[mu] * om[nu] * dot
            energy += coef * np.cos((om[mu] - om[nu]) * times)
    if sol.spectrum_real:
        series_values = _to_real(energy, "energy series")
    else:
        series_values = np.ascontiguousarray(energy.real)
    lam = (om ** 2).real
    per_node = (np.abs(sol.eigvecs) ** 2) @ (
        lam * (np.abs(sol.c_plus) ** 2 + np.abs(sol.c_minus) ** 2))
    series = None
    if times.size >= 2:
        dt = float(times[1] - times[0])
        series = TimeSeries(values=series_values, dt=dt, origin=float(times[0]))
    return EnergyReport(per_node=per_node, total=stationary, series=series)


def _bfs_counts(adj, source):
    n = len(adj)
    dist = np.full(n, -1, dtype=int)
    sigma = np.zeros(n, dtype=float)
    dist[source] = 0
    sigma[source] = 1.0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
            if dist[v] == dist[u] + 1:
                sigma[v] += sigma[u]
    return dist, sigma


def betweenness_weights(g: WeightedDigraph) -> WeightedDigraph:
    """Reweight an undirected unit-weight graph by shortest-path counts.

    Each link's new weight is the number of shortest paths, over all node
    pairs, that traverse it (same weight in both orientations).
    """
    if g.n > 64:
        raise InvalidGraph(f"betweenness reweighting is desk-scale (n <= 64), got {g.n}")
    links = {}
    for s, d, w in g.edges:
        if w != 1.0:
            raise InvalidGraph("betweenness reweighting requires unit weights")
        links[(s, d)] = w
    for s, d in links:
        if (d, s) not in links:
            raise InvalidGraph(f"missing reciprocal edge for ({s},{d})")
    adj = [[] for _ in range(g.n)]
    for s, d in links:
        adj[s].append(d)
    dists, sigmas = zip(*(_bfs_counts(adj, s) for s in range(g.n)))
    if any(np.any(d < 0) for d in dists):
        raise Disconnected("betweenness weights need a connected graph")
    counts = {pair: 0.0 for pair in links if pair[0] < pair[1]}
    for s in range(g.n):
        for t in range(s + 1, g.n):
            d_st = dists[s][t]
            for (u, v) in counts:
                # paths crossing u -> v plus paths crossing v -> u
                if dists[s][u] + 1 + dists[t][v] == d_st:
                    counts[(u, v)] += sigmas[s][u] * sigmas[t][v]
                if dists[s][v] + 1 + dists[t][u] == d_st:
                    counts[(u, v)] += sigmas[s][v] * sigmas[t][u]
    return undirected_graph(g.n, [(u, v, c) for (u, v), c in counts.items()])


def oscillation_centrality(lap: LaplacianMatrix, convention: str = "uniform") -> np.ndarray:
    """Per-node oscillation energy under the uniform-mode convention
    |c+|^2 + |c-|^2 = 1 for every nonzero mode (zero mode excluded).

    For unit-weight undirected graphs this is exactly the degree vector; with
    shortest-path-count weights it is an affine image of betweenness
    centrality on trees.
    """
    if convention != "uniform":
        raise ValueError(f"unknown convention {convention!r}")
    dec = check_symmetrizable(lap)
    if isinstance(dec, NotSymmetrizable):
        raise NotSymmetrizableError(f"{dec.reason}: {dec.detail}")
    es = eigendecompose(scaled_laplacian(dec))
    lam = es.eigenvalues.real
    keep = np.abs(lam) > ZERO_TOL_FACTOR * max(es.scale, 1.0)
    return (np.abs(es.eigenvectors[:, keep]) ** 2) @ lam[keep]


def fit_growth_rate(times, amplitudes, n_chunks: int = 24, decades: float = 1.0) -> float:
    """Exponential growth rate of an amplitude envelope.

    Reduces the curve to per-chunk maxima (so beat nulls do not bias the fit),
    keeps the trailing window spanning ``decades`` of growth, and returns the
    slope of a linear fit to log max.
    """
    times = np.asarray(times, dtype=float)
    amplitudes = np.asarray(amplitudes, dtype=float)
    idx_chunks = np.array_split(np.arange(times.size), n_chunks)
    tc = np.array([times[c].mean() for c in idx_chunks if c.size])
    ac = np.array([amplitudes[c].max() for c in idx_chunks if c.size])
    mask = ac >= ac.max() / (10.0 ** decades)
    # use the contiguous tail only
    start = len(mask) - 1
    while start > 0 and mask[start - 1]:
        start -= 1
    tc, ac = tc[start:], ac[start:]
    if tc.size < 4 or np.any(ac <= 0):
        raise ValueError("not enough growth to fit a rate")
    return float(np.polyfit(tc, np.log(ac), 1)[0])


@dataclass(frozen=True)
class SweepRecord:
    """Summary of one epsilon probe."""

    eps: float
    spectrum_real: bool | None = None
    max_im_omega: float | None = None
    eigen_gap: float | None = None
    peak_amplitude: float | None = None
    beat_frequency: float | None = None
    error: str | None = None

    def as_dict(self):
        return {
            "eps": self.eps,
            "spectrum_real": self.spectrum_real,
            "max_im_omega": self.max_im_omega,
            "eigen_gap": self.eigen_gap,
            "peak_amplitude": self.peak_amplitude,
            "beat_frequency": self.beat_frequency,
            "error": self.error,
        }


def epsilon_sweep(lap0: LaplacianMatrix, lapI: LaplacianMatrix, eps_list,
                  ic: InitialCondition, t_end: float, dt: float,
                  node: int = 0) -> list[SweepRecord]:
    """Per-epsilon regime summary along lap0 + eps * lapI.

    Uses the modal path where the eigenbasis is well conditioned and falls
    back to numeric integration otherwise; per-epsilon failures are recorded,
    not raised, and output order follows ``eps_list``.
    """
    records = []
    for eps in eps_list:
        eps = float(eps)
        fields = {"eps": eps}
        try:
            lap = compose_epsilon((lap0, lapI), eps)
            es = eigendecompose(lap)
            real = spectrum_is_real(es)
            om = mode_frequencies(es).omegas
            fields["spectrum_real"] = real
            fields["max_im_omega"] = float(np.max(np.abs(om.imag)))
            if real and lap.n >= 2:
                fields["eigen_gap"] = eigen_gap(es)
            sol = modal_solve(lap, ic)
            times = np.arange(0.0, t_end + dt / 2.0, dt)
            states = evaluate_states(sol, times)
            fields["peak_amplitude"] = float(np.max(np.abs(states)))
            if real:
                fields["beat_frequency"] = float(
                    estimate_beat_frequency(states[:, node], dt))
        except DefectiveMatrix:
            try:
                traj = integrate_numeric(lap, ic, dt, t_end)
                fields["peak_amplitude"] = traj.peak_amplitude()
                if fields.get("spectrum_real"):
                    fields["beat_frequency"] = float(
                        estimate_beat_frequency(traj.states[:, node], dt))
            except (Unstable, ValueError) as exc:
                fields["error"] = f"{type(exc).__name__}: {exc}"
        except Exception as exc:  # record, keep sweeping
            fields["error"] = f"{type(exc).__name__}: {exc}"
        records.append(SweepRecord(**fields))
    return records
