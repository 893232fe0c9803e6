"""Discrete one-step transition kernels with m-point support, their
composition algebra, and seeded Monte Carlo simulation of the chain they
generate (q > 1).

Given a state y, the next state lives on the m support points
chi_k(y, q), k in (m), with masses solved from the moment system

    sum_k mass_k = 1
    sum_k mass_k H_j(chi_k | q) = q^{-j(m-1)/2} H_j(y | q),   j = 1..m-1.

Atoms are keyed by the integer index k, never by floating value: the
composition law accumulates mass by index sum i + j, which stays exact
even when values collide numerically.  Composing an order-m kernel with
order-n kernels lands exactly on the order-(m+n-1) kernel — the
consistency property the verifier checks atom by atom.
"""

from __future__ import annotations

import json
import math
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .exactnum import QuadraticNumber, format_scalar, linear_solve, parse_exact
from .qcore import QParams, eval_H_seq, eval_p_seq
from .spectra import (
    VerificationFailed,
    VerificationReport,
    chi,
    index_set,
)

__all__ = [
    "DEFAULT_SEED",
    "Atom",
    "ConditionalDistribution",
    "ChainConfig",
    "Trajectory",
    "DegenerateSupport",
    "NegativeMassError",
    "CompositionMismatch",
    "StateOverflow",
    "InsufficientSamples",
    "build_distribution",
    "conditional_moment_residual",
    "compose",
    "k_step_distribution",
    "verify_chapman_kolmogorov",
    "sample_step",
    "simulate",
    "empirical_conditional_moment",
]

DEFAULT_SEED = 42

MASS_TOL = 1e-10  # float-mode slack for nonnegativity / normalization


class DegenerateSupport(ArithmeticError):
    """Support points collided; the mass system would be singular."""


class NegativeMassError(ArithmeticError):
    """A solved mass is negative beyond tolerance."""

    def __init__(self, index: int, value):
        self.index = index
        self.value = value
        super().__init__(f"mass at index {index} is negative: {value}")


class CompositionMismatch(ArithmeticError):
    """Composed kernel disagrees with the directly built one."""


class StateOverflow(RuntimeError):
    """A simulated state left the configured magnitude bound."""


class InsufficientSamples(ValueError):
    """Not enough grouped transitions for an empirical moment check."""


class Atom(NamedTuple):
    value: object
    mass: object


def _is_exact(q) -> bool:
    return isinstance(q, (int, Fraction))


def _exact_state(y) -> bool:
    return isinstance(y, (int, Fraction, QuadraticNumber))


@dataclass
class ConditionalDistribution:
    """The one-step conditional law at state y: atoms keyed by k in (m),
    each carrying the support value chi_k(y, q) and its mass."""

    m: int
    y: object
    q: object
    atoms: dict[int, Atom]

    @property
    def exact(self) -> bool:
        return _is_exact(self.q)

    def indices(self) -> list[int]:
        return sorted(self.atoms)

    def value(self, k: int):
        return self.atoms[k].value

    def mass(self, k: int):
        return self.atoms[k].mass

    def mass_total(self):
        total = 0
        for atom in self.atoms.values():
            total = total + atom.mass
        return total

    def negative_atoms(self, tol: float = MASS_TOL) -> list[int]:
        bad = []
        for k, atom in self.atoms.items():
            if self.exact:
                if atom.mass < 0:
                    bad.append(k)
            elif atom.mass < -tol:
                bad.append(k)
        return sorted(bad)

    def kernel_moment(self, g) -> object:
        """sum_k mass_k * g(value_k) for a scalar function g."""
        total = 0
        for atom in self.atoms.values():
            total = total + atom.mass * g(atom.value)
        return total

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        mode = "exact" if self.exact else "float"
        atoms = []
        for k in self.indices():
            atom = self.atoms[k]
            if mode == "exact":
                atoms.append({"k": k, "value": format_scalar(atom.value), "mass": format_scalar(atom.mass)})
            else:
                atoms.append({"k": k, "value": float(atom.value), "mass": float(atom.mass)})
        return {"q": str(self.q), "m": self.m, "y": format_scalar(self.y), "atoms": atoms, "mode": mode}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ConditionalDistribution":
        mode = doc["mode"]
        if mode == "exact":
            q = Fraction(doc["q"])
            y = parse_exact(doc["y"])
            atoms = {
                entry["k"]: Atom(parse_exact(str(entry["value"])), parse_exact(str(entry["mass"])))
                for entry in doc["atoms"]
            }
        else:
            q = float(doc["q"])
            y = float(doc["y"])
            atoms = {entry["k"]: Atom(float(entry["value"]), float(entry["mass"])) for entry in doc["atoms"]}
        return cls(m=int(doc["m"]), y=y, q=q, atoms=atoms)

    def max_deviation(self, other: "ConditionalDistribution") -> float:
        """Largest atom-wise |value| / |mass| gap against another kernel
        sharing the same index set (inf when the supports differ)."""
        if self.indices() != other.indices():
            return math.inf
        worst = 0.0
        for k in self.indices():
            mine, theirs = self.atoms[k], other.atoms[k]
            if self.exact and other.exact:
                if mine.value != theirs.value or mine.mass != theirs.mass:
                    dv = abs(float(mine.value) - float(theirs.value))
                    dm = abs(float(mine.mass) - float(theirs.mass))
                    worst = max(worst, dv, dm, math.ulp(1.0))
            else:
                dv = abs(float(mine.value) - float(theirs.value))
                dm = abs(float(mine.mass) - float(theirs.mass))
                worst = max(worst, dv, dm)
        return worst


def build_distribution(m: int, y, q, sqrt_q=None, strict: bool = False) -> ConditionalDistribution:
    """Construct the one-step kernel at state y.

    Support points come from chi; masses solve the (m x m) moment system
    whose first row enforces normalization and whose j-th row matches the
    j-th q-Hermite conditional moment.  The equivalent Al-Salam-Chihara
    system (sum_k mass_k p_j(chi_k | y, rho, q) = 0) is then evaluated as
    an independent cross-check.

    Negative masses raise NegativeMassError when strict, otherwise warn.
    """
    if m < 2:
        raise ValueError(f"transition order m must be >= 2, got {m}")
    if isinstance(q, int):
        q = Fraction(q)
    if not q > 1:
        raise ValueError(f"kernel needs q > 1, got {q}")
    if _is_exact(q) and not _exact_state(y):
        q, sqrt_q = float(q), None  # a float state forces the float backend
    params = QParams.create(q, m, sqrt_q)
    sq, rho = params.sqrt_q, params.rho
    if not _is_exact(q):
        y = float(y)

    ks = index_set(m)
    values = [chi(k, y, q, sq) for k in ks]

    # support must consist of m distinct points (strictly increasing in k)
    for left, right in zip(values, values[1:]):
        if _is_exact(q):
            if not left < right:
                raise DegenerateSupport(f"support points collide at state y={y}")
        elif not right - left > 1e-12 * max(1.0, abs(left), abs(right)):
            raise DegenerateSupport(f"support points collide at state y={y}")

    H_at_value = [eval_H_seq(m - 1, v, q) for v in values]
    H_at_y = eval_H_seq(m - 1, y, q)
    one = values[0] * 0 + 1  # unit in the value backend (QuadraticNumber or float)
    matrix = [[one for _ in ks]] + [[H_at_value[i][j] for i in range(m)] for j in range(1, m)]
    rhs = [one] + [one * (rho**j * H_at_y[j]) for j in range(1, m)]
    masses = linear_solve(matrix, rhs)

    dist = ConditionalDistribution(m=m, y=y, q=q, atoms={k: Atom(v, lam) for k, v, lam in zip(ks, values, masses)})

    _cross_check_p_system(dist, rho, sq)

    negatives = dist.negative_atoms()
    if negatives:
        k = negatives[0]
        if strict:
            raise NegativeMassError(k, dist.atoms[k].mass)
        warnings.warn(
            f"kernel(m={m}, y={y}, q={q}) has negative mass at index {k}: {dist.atoms[k].mass}",
            stacklevel=2,
        )
    return dist


def _cross_check_p_system(dist: ConditionalDistribution, rho, sq) -> None:
    # the Al-Salam-Chihara route to the same masses must agree: identically
    # in exact mode, and with a small backward error (residual normalized by
    # row norm times mass norm, the float solve's natural accuracy) in floats
    m, y, q = dist.m, dist.y, dist.q
    p_at_value = {k: eval_p_seq(m - 1, atom.value, y, rho, q) for k, atom in dist.atoms.items()}
    mass_norm = max(1.0, sum(abs(float(atom.mass)) for atom in dist.atoms.values()))
    for j in range(1, m):
        residual = 0
        row_norm = 1.0
        for k, atom in dist.atoms.items():
            residual = residual + atom.mass * p_at_value[k][j]
            row_norm = max(row_norm, abs(float(p_at_value[k][j])))
        if dist.exact:
            if residual != 0:
                raise AssertionError(
                    f"mass cross-check regression: p-system residual {residual} at j={j}"
                )
        elif abs(float(residual)) > 1e-10 * row_norm * mass_norm:
            raise AssertionError(
                f"mass cross-check regression: p-system residual {residual} at j={j}"
            )


def conditional_moment_residual(dist: ConditionalDistribution, j: int):
    """sum_k mass_k H_j(value_k | q) - q^{-j(m-1)/2} H_j(y | q).

    Zero (identically, in exact mode) for j = 1..m-1; j >= m is allowed as
    a diagnostic and is generally nonzero.
    """
    if j < 1:
        raise ValueError("moment order j must be >= 1")
    params = QParams.create(dist.q, dist.m)
    moment = dist.kernel_moment(lambda v: eval_H_seq(j, v, dist.q)[j])
    return moment - params.rho**j * eval_H_seq(j, dist.y, dist.q)[j]


def compose(dist: ConditionalDistribution, n: int, check: bool = True) -> ConditionalDistribution:
    """Chain an order-n kernel after every atom of `dist`: mass at index
    i flows to indices i + j, j in (n), weighted by the inner kernel
    built at the atom's value.

    The result is supported on (m + n - 1) and, when `check` is set, is
    asserted to coincide atom-for-atom with the directly built
    order-(m+n-1) kernel (CompositionMismatch otherwise).
    """
    if n < 2:
        raise ValueError(f"inner kernel order must be >= 2, got {n}")
    m, y, q = dist.m, dist.y, dist.q
    out_values: dict[int, object] = {}
    out_masses: dict[int, object] = {}
    for i in sorted(dist.atoms):
        outer = dist.atoms[i]
        inner = build_distribution(n, outer.value, q)
        for j in sorted(inner.atoms):
            inner_atom = inner.atoms[j]
            k = i + j
            if k in out_masses:
                out_masses[k] = out_masses[k] + outer.mass * inner_atom.mass
                # chi_j(chi_i(y)) = chi_{i+j}(y): collisions must agree
                if dist.exact and out_values[k] != inner_atom.value:
                    raise CompositionMismatch(
                        f"value collision at index {k}: {out_values[k]} vs {inner_atom.value}"
                    )
            else:
                out_masses[k] = outer.mass * inner_atom.mass
                out_values[k] = inner_atom.value

    expected_support = index_set(m + n - 1)
    if sorted(out_masses) != expected_support:
        raise CompositionMismatch(
            f"composed support {sorted(out_masses)} != ({m + n - 1}) = {expected_support}"
        )
    composed = ConditionalDistribution(
        m=m + n - 1,
        y=y,
        q=q,
        atoms={k: Atom(out_values[k], out_masses[k]) for k in expected_support},
    )
    if check:
        direct = build_distribution(m + n - 1, y, q)
        deviation = composed.max_deviation(direct)
        tolerance = 0.0 if composed.exact else 1e-9
        if deviation > tolerance:
            raise CompositionMismatch(
                f"compose({m},{n}) at y={y}, q={q}: max atom deviation {deviation}"
            )
    return composed


def k_step_distribution(m: int, k: int, y, q, sqrt_q=None) -> ConditionalDistribution:
    """The k-step kernel: k composed one-step kernels of order m collapse
    to the single kernel of order k(m-1) + 1."""
    if k < 1:
        raise ValueError("step count k must be >= 1")
    return build_distribution(k * (m - 1) + 1, y, q, sqrt_q) if k > 1 else build_distribution(m, y, q, sqrt_q)


def verify_chapman_kolmogorov(
    m: int,
    n: int,
    y,
    q,
    mode: str | None = None,
    multi_step: bool = True,
) -> VerificationReport:
    """Check kernel consistency: compose(kernel_m, n) == kernel_{m+n-1},
    atom for atom (exact mode: identical; float mode: masses within 1e-9
    absolute).  With `multi_step`, additionally compose the 2-step kernel
    with a further order-m step and match it against the 3-step kernel.
    """
    if mode == "exact" and not _is_exact(q):
        raise ValueError("exact mode needs rational q (and y)")
    if mode == "float":
        q, y = float(q), float(y)
    exact = _is_exact(q)
    report = VerificationReport(
        identity="chapman-kolmogorov",
        parameters={"m": m, "n": n, "y": str(y), "q": str(q), "mode": "exact" if exact else "float"},
        points_checked=0,
        max_residual=0.0,
    )

    def check_pair(composed: ConditionalDistribution, direct: ConditionalDistribution, label: str):
        deviation = composed.max_deviation(direct)
        report.points_checked += len(direct.atoms)
        if exact:
            if deviation != 0.0:
                report.witness = {"stage": label, "max_deviation": deviation}
                report.passed = False
                raise VerificationFailed(report)
        else:
            report.max_residual = max(report.max_residual, deviation)
            if deviation > 1e-9:
                report.witness = {"stage": label, "max_deviation": deviation}
                report.passed = False
                raise VerificationFailed(report)

    try:
        composed = compose(build_distribution(m, y, q), n, check=False)
    except CompositionMismatch as exc:
        report.witness = {"stage": "one-step", "error": str(exc)}
        report.passed = False
        raise VerificationFailed(report) from exc
    check_pair(composed, build_distribution(m + n - 1, y, q), "one-step")

    if multi_step:
        two_step = k_step_distribution(m, 2, y, q)
        try:
            lifted = compose(two_step, m, check=False)
        except CompositionMismatch as exc:
            report.witness = {"stage": "multi-step", "error": str(exc)}
            report.passed = False
            raise VerificationFailed(report) from exc
        check_pair(lifted, k_step_distribution(m, 3, y, q), "multi-step")
    return report


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainConfig:
    """Simulation parameters; identical configs reproduce identical runs."""

    q: float
    m: int
    initial_y: float
    steps: int
    seed: int = DEFAULT_SEED
    max_state: float = 1e100

    def __post_init__(self):
        if not self.q > 1:
            raise ValueError(f"simulation needs q > 1, got {self.q}")
        if self.m < 2:
            raise ValueError("transition order m must be >= 2")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")


def _fmt_state(s: float) -> str:
    text = repr(float(s))
    return text[:-2] if text.endswith(".0") else text


@dataclass
class Trajectory:
    """A sampled path X_0 .. X_T plus the config that produced it."""

    states: list[float]
    config: ChainConfig

    def to_csv(self) -> str:
        lines = ["step,state"]
        lines.extend(f"{i},{_fmt_state(s)}" for i, s in enumerate(self.states))
        return "\n".join(lines) + "\n"

    def metadata(self) -> dict:
        return {
            "q": self.config.q,
            "m": self.config.m,
            "initial_y": self.config.initial_y,
            "steps": self.config.steps,
            "seed": self.config.seed,
            "max_state": self.config.max_state,
            "states_recorded": len(self.states),
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    def write_metadata(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.metadata(), fh, indent=2)
            fh.write("\n")


def sample_step(dist: ConditionalDistribution, rng: random.Random):
    """Draw the next state from `dist` by inverse CDF over its atoms
    (ascending index order).  Refuses kernels with a mass below -1e-10;
    smaller float negatives are treated as empty atoms.
    """
    negatives = dist.negative_atoms()
    if negatives:
        k = negatives[0]
        raise NegativeMassError(k, dist.atoms[k].mass)
    u = rng.random()
    acc = 0.0
    ks = dist.indices()
    for k in ks:
        atom = dist.atoms[k]
        acc += max(float(atom.mass), 0.0)
        if u < acc:
            return atom.value
    return dist.atoms[ks[-1]].value  # mass sum rounded slightly under 1


def simulate(config: ChainConfig) -> Trajectory:
    """Run the chain from config.initial_y for config.steps transitions.

    Float backend throughout (kernels are rebuilt at each new state).
    States grow without bound with positive probability; exceeding
    config.max_state raises StateOverflow rather than continuing with
    overflowing floats.
    """
    rng = random.Random(config.seed)
    q = float(config.q)
    sq = math.sqrt(q)
    state = float(config.initial_y)
    states = [state]
    for step in range(config.steps):
        dist = build_distribution(config.m, state, q, sqrt_q=sq)
        state = float(sample_step(dist, rng))
        if abs(state) > config.max_state:
            raise StateOverflow(
                f"|state| = {abs(state):.6g} exceeded bound {config.max_state:.6g} "
                f"at step {step + 1}"
            )
        states.append(state)
    return Trajectory(states=states, config=config)


# ---------------------------------------------------------------------------
# empirical checks
# ---------------------------------------------------------------------------


@dataclass
class MomentGroupStats:
    source: float
    n_samples: int
    empirical_mean: float
    empirical_std: float
    expected: float
    kernel_std: float
    z_score: float


@dataclass
class MomentCheckReport:
    j: int
    lag: int
    groups: list[MomentGroupStats] = field(default_factory=list)
    threshold: float = 4.0

    @property
    def max_abs_z(self) -> float:
        return max((abs(g.z_score) for g in self.groups), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_abs_z <= self.threshold

    def to_json_dict(self) -> dict:
        return {
            "j": self.j,
            "lag": self.lag,
            "threshold": self.threshold,
            "max_abs_z": self.max_abs_z,
            "passed": self.passed,
            "groups": [vars(g) for g in self.groups],
        }


def empirical_conditional_moment(
    trajectories: list[Trajectory],
    j: int,
    lag: int = 1,
    min_samples: int = 100,
) -> MomentCheckReport:
    """Regression check of the conditional moment law on simulated paths:
    grouped by exact source state, the empirical mean of H_j at the
    lag-step destination is compared against rho^{lag*j} H_j(source), with
    z-scores using the exact lag-step kernel's variance (sources are
    reproduced atoms, so exact float grouping is well defined).
    """
    if not trajectories:
        raise InsufficientSamples("no trajectories supplied")
    if lag < 1:
        raise ValueError("lag must be >= 1")
    config = trajectories[0].config
    if j < 1 or j > config.m - 1:
        raise ValueError(f"moment order j must be in 1..{config.m - 1}")
    q = float(config.q)
    rho = math.sqrt(q) ** (-(config.m - 1))

    groups: dict[float, list[float]] = {}
    for traj in trajectories:
        if (traj.config.q, traj.config.m) != (config.q, config.m):
            raise ValueError("trajectories mix incompatible configs")
        for s in range(len(traj.states) - lag):
            groups.setdefault(traj.states[s], []).append(traj.states[s + lag])

    report = MomentCheckReport(j=j, lag=lag)
    for source, dests in sorted(groups.items()):
        if len(dests) < min_samples:
            continue
        h_dest = [eval_H_seq(j, d, q)[j] for d in dests]
        n = len(h_dest)
        mean = math.fsum(h_dest) / n
        var_emp = math.fsum((h - mean) ** 2 for h in h_dest) / n
        expected = rho ** (lag * j) * eval_H_seq(j, source, q)[j]
        kernel = k_step_distribution(config.m, lag, source, q)
        second = kernel.kernel_moment(lambda v: eval_H_seq(j, v, q)[j] ** 2)
        kernel_var = max(float(second) - expected**2, 0.0)
        if kernel_var == 0.0:
            z = 0.0 if mean == expected else math.inf
        else:
            z = (mean - expected) / math.sqrt(kernel_var / n)
        report.groups.append(
            MomentGroupStats(
                source=source,
                n_samples=n,
                empirical_mean=mean,
                empirical_std=math.sqrt(var_emp),
                expected=expected,
                kernel_std=math.sqrt(kernel_var),
                z_score=z,
            )
        )
    if not report.groups:
        raise InsufficientSamples(
            f"no source state reached {min_samples} transitions at lag {lag}"
        )
    return report
