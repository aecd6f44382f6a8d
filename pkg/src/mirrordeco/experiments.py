"""Batch experiments driven by an :class:`ExperimentConfig`.

Each runner returns a :class:`Table`; rows come out in input order no
matter how many worker threads evaluate them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import decoherence as deco
from . import oracle
from .config import ExperimentConfig, sweep_values
from .errors import ConfigError, InvalidInputError, NoDecoherenceError
from .gaussian import evolve_packet, moments, standard_packet
from .model import ModelSpec, build_effective_model
from .phase import amplification_threshold, phase_std_total
from .pointer import coherent_amplitudes, pointer_overlap, reduced_density
from .report import UNITS_NOTE, Table


def _pmap(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _comments(cfg: ExperimentConfig, command: str):
    return [f"mirrordeco {command}", UNITS_NOTE, f"config: {cfg.to_json_line()}"]


def describe_model(cfg: ExperimentConfig) -> str:
    lines = []
    if cfg.model.is_spec:
        eff = build_effective_model(cfg.model_spec())
        lines += [
            f"total_mass = {eff.total_mass!r}",
            f"g_total = {eff.g_total!r}",
            f"relative_couplings = {eff.relative_couplings.tolist()!r}",
            f"mass_matrix = {eff.mass_matrix.tolist()!r}",
            f"diagonalizer = {eff.diagonalizer.tolist()!r}",
            f"effective_masses = {eff.effective_masses.tolist()!r}",
            f"mode_forces = {eff.mode_forces.tolist()!r}",
        ]
    modes = cfg.modes()
    lines.append(f"n_modes = {modes.n_modes}")
    try:
        gamma = deco.gamma_longtime(modes, cfg.hbar)
        lines.append(f"gamma = {gamma!r}")
        td = deco.decoherence_time(cfg.m, cfg.n, modes, cfg.hbar)
        lines.append(f"tau_d = {td.long_time!r}")
        lines.append(f"tau_d_exact = {td.exact!r}")
    except NoDecoherenceError as exc:
        lines.append(f"tau_d = undefined ({exc})")
    return "\n".join(lines) + "\n"


def run_fig3(cfg: ExperimentConfig, threads: int = 1) -> Table:
    """|F_mn(t)| for each ensemble size, identical modes only."""
    base = cfg.modes().collapsed()
    if base.masses.size != 1:
        raise ConfigError("model", "fig3 needs an identical-modes model")
    m, n = cfg.m, cfg.n
    times = np.linspace(cfg.fig3.t_start, cfg.fig3.t_stop, cfg.fig3.count)
    jobs = []
    for count in cfg.fig3.mode_counts:
        modes = base.with_multiplicity(int(count))
        try:
            tau = deco.decoherence_time(m, n, modes, cfg.hbar).long_time
        except NoDecoherenceError:
            tau = math.inf
        jobs += [(int(count), float(t), modes, tau) for t in times]

    def row(job):
        count, t, modes, tau = job
        rec = deco.factor_total(m, n, t, modes, cfg.hbar)
        return (count, t, deco.norm_analytic(m, n, t, modes, cfg.hbar), rec.log_mag, tau)

    table = Table(["N", "t", "abs_F", "log_mag", "tau_d"], comments=_comments(cfg, "fig3"))
    table.rows = _pmap(row, jobs, threads)
    return table


def run_sweep(cfg: ExperimentConfig, threads: int = 1) -> Table:
    var = cfg.sweep.variable
    values = sweep_values(cfg.sweep)
    if var == "N":
        values = np.unique(np.maximum(1, np.rint(values))).astype(int)
    modes0 = cfg.modes()
    pointer0 = cfg.pointer_spec()
    cavity = coherent_amplitudes(cfg.alpha, cfg.cavity.tol, cfg.cavity.omega0)
    m, n, h = cfg.m, cfg.n, cfg.hbar

    def row(v):
        t, modes, pointer = cfg.t, modes0, pointer0
        if var == "t":
            t = float(v)
        elif var == "N":
            modes = modes0.with_multiplicity(int(v))
        elif var == "a":
            modes = modes0.with_widths(float(v))
        else:
            pointer = type(pointer0)(pointer0.total_mass, pointer0.coupling, float(v),
                                     pointer0.position)
        rec = deco.factor_total(m, n, t, modes, h)
        rep = phase_std_total(m, n, t, modes, h)
        rho = reduced_density(cavity, t, modes, None, h)
        return (v.item() if hasattr(v, "item") else v, rec.magnitude, rec.log_mag,
                rep.total_std, math.exp(-0.5 * rep.total_std ** 2),
                abs(pointer_overlap(m, n, t, pointer, h)), rho.offdiag_norm)

    table = Table([var, "abs_F", "log_mag", "phase_std", "exp_half_phase_var",
                   "abs_pointer_overlap", "offdiag_norm"], comments=_comments(cfg, "sweep"))
    table.rows = _pmap(row, list(values), threads)
    return table


def run_density(cfg: ExperimentConfig) -> Table:
    cavity = coherent_amplitudes(cfg.alpha, cfg.cavity.tol, cfg.cavity.omega0)
    rho = reduced_density(cavity, cfg.t, cfg.modes(), cfg.pointer_spec(), cfg.hbar)
    comments = _comments(cfg, "density") + [
        f"t = {cfg.t!r}", f"trace = {rho.trace!r}", f"purity = {rho.purity!r}",
        f"offdiag_norm = {rho.offdiag_norm!r}"]
    return Table(["n", "m", "re", "im", "abs_F", "abs_pointer_overlap"],
                 list(rho.rows()), comments)


def run_phase(cfg: ExperimentConfig) -> Table:
    modes = cfg.modes()
    rep = phase_std_total(cfg.m, cfg.n, cfg.t, modes, cfg.hbar)
    cols = ["kind", "index", "count", "mass", "force", "width", "d_variance", "phase_std",
            "sqrtN_bound", "threshold_2pi"]
    rows = []
    for j in range(modes.masses.size):
        rows.append(("mode", j, modes.multiplicity, float(modes.masses[j]),
                     float(modes.forces[j]), float(modes.widths[j]),
                     float(rep.d_variances[j]), float(rep.per_mode_std[j]), "", ""))
    thresh = amplification_threshold(rep.min_mode_std) if rep.min_mode_std > 0 else ""
    rows.append(("total", "", rep.n_modes, "", "", "", "", rep.total_std,
                 rep.sqrtN_bound, thresh))
    return Table(cols, rows, _comments(cfg, "phase") + [f"t = {cfg.t!r}"])


# --- oracle suite ------------------------------------------------------------

ORACLE_COLUMNS = ["check", "params", "analytic", "grid", "rel_err", "converged", "status"]


def _status(ok):
    return "pass" if ok else "fail"


def desk_parameter_sets(count: int, rng: np.random.Generator, floor: float = 1e-6):
    """Random (m, n, t, mass, force, width) in [0.25, 4] with 1 <= |n-m| <= 3.

    Draws whose exact factor is below ``floor`` are redrawn: relative
    comparison is meaningless once the value sits at the grid's noise level.
    """
    out = []
    while len(out) < count:
        mass, force, width, t = rng.uniform(0.25, 4.0, 4)
        m = int(rng.integers(0, 4))
        d = int(rng.integers(1, 4))
        n = m + d
        expo = d * d * force ** 2 * (t ** 4 / (32 * mass ** 2 * width ** 2) + width ** 2 * t ** 2 / 2)
        if math.exp(-expo) >= floor:
            out.append((m, n, float(t), float(mass), float(force), float(width)))
    return out


def random_spec(rng: np.random.Generator, n_particles: int) -> ModelSpec:
    return ModelSpec(masses=rng.uniform(0.2, 5.0, n_particles).tolist(),
                     couplings=rng.normal(size=n_particles).tolist(),
                     omega0=float(rng.uniform(0.5, 2.0)))


def run_oracle_suite(cfg: ExperimentConfig, seed: int = 0, threads: int = 1):
    """Run every oracle check; return ``(table, all_passed)``.

    Failures are collected, not raised.  A refused request (model too big
    for the operator check) is reported with status ``refused``.
    """
    tol = cfg.oracle.tolerance
    rng = np.random.default_rng(seed)
    rows = []

    # free spreading and Ehrenfest drift
    start = standard_packet(1.0)
    g0 = oracle.grid_from_packet(start, -40.0, 40.0, 2048)
    spread = oracle.grid_evolve(g0, 1.0, 0.0, 2.0, tol=1e-10)
    err = abs(spread.var_pos() - 2.0) / 2.0
    rows.append(("spread_variance", "m=1 F=0 t=2 a=1", 2.0, spread.var_pos(), err,
                 spread.converged, _status(err < tol and spread.valid)))
    drift = oracle.grid_evolve(g0, 1.0, 1.0, 2.0, tol=1e-10)
    err = abs(drift.mean_pos() - 2.0) / 2.0
    rows.append(("ehrenfest_mean", "m=1 F=1 t=2 a=1", 2.0, drift.mean_pos(), err,
                 drift.converged, _status(err < tol and drift.valid)))
    exact = evolve_packet(start, 1.0, 1.0, 2.0)
    dist = oracle.ray_distance(exact(drift.x), drift.samples, drift.dx)
    rows.append(("packet_state", "m=1 F=1 t=2 a=1", 0.0, dist, dist, drift.converged,
                 _status(dist < tol)))
    mo = moments(exact)
    rows.append(("packet_momentum", "m=1 F=1 t=2 a=1", mo.mean_mom, drift.mean_mom(),
                 abs(drift.mean_mom() - mo.mean_mom) / abs(mo.mean_mom), True,
                 _status(abs(drift.mean_mom() - mo.mean_mom) < tol * abs(mo.mean_mom))))

    # per-mode decoherence factor: packet algebra vs closed law vs grid
    sets = desk_parameter_sets(cfg.oracle.samples, rng)

    def factor_row(args):
        i, (m, n, t, mass, force, width) = args
        modes = deco.ModeSet.identical(mass, force, width)
        closed = abs(deco.factor_mode(0, m, n, t, modes))
        law = deco.norm_analytic(m, n, t, modes)
        grid, ok = oracle.grid_factor(m, n, t, mass, force, width)
        err = max(abs(abs(grid) - closed) / closed, abs(abs(grid) - law) / law)
        params = f"m={m} n={n} t={t:.6g} mass={mass:.6g} f={force:.6g} a={width:.6g}"
        return (f"factor_mode[{i}]", params, law, abs(grid), err, ok, _status(ok and err < tol))

    rows += _pmap(factor_row, list(enumerate(sets)), threads)

    # width placement in the quartic term
    a, f, mass, t = 2.0, 1.0, 1.0, 1.0
    grid, ok = oracle.grid_factor(0, 1, t, mass, f, a)
    good = deco.norm_analytic(0, 1, t, deco.ModeSet.identical(mass, f, a))
    bad = math.exp(oracle.log_norm_width_dropped(1, t, mass, f, a))
    err_good = abs(abs(grid) - good) / good
    err_bad = abs(abs(grid) - bad) / bad
    params = "a=2 f=1 mass=1 t=1 n-m=1"
    if cfg.oracle.width_dropped:
        rows.append(("width_pin", params + " formula=width-dropped", bad, abs(grid), err_bad, ok,
                     _status(ok and err_bad < tol)))
    else:
        rows.append(("width_pin", params, good, abs(grid), err_good, ok,
                     _status(ok and err_good < tol and err_bad > 1e3 * tol)))
        rows.append(("width_pin_rejects_dropped", params, bad, abs(grid), err_bad, ok,
                     _status(err_bad > 1e3 * tol)))

    # Hamiltonian forms and non-demolition commutators
    n_part = cfg.oracle.hamiltonian_n
    if n_part > oracle.MAX_SPEC_N:
        rows.append(("hamiltonian", f"N={n_part}", "", "", "", False, "refused"))
    else:
        for i in range(cfg.oracle.hamiltonian_specs):
            size = int(rng.integers(2, n_part + 1))
            spec = random_spec(rng, size)
            try:
                rep = oracle.hamiltonian_equivalence(spec, 100, rng)
            except InvalidInputError as exc:
                rows.append((f"hamiltonian[{i}]", f"N={size}", "", "", str(exc), False, "fail"))
                continue
            comm = max(v for k, v in rep.commutator_norms.items() if not k.startswith("control"))
            ok = rep.max_residual < 1e-10 and comm < 1e-10
            rows.append((f"hamiltonian[{i}]", f"N={size} commutator={comm:.3g}", 0.0,
                         rep.max_residual, rep.max_residual, True, _status(ok)))

    table = Table(ORACLE_COLUMNS, rows, _comments(cfg, "oracle") + [f"seed = {seed}"])
    passed = all(r[-1] != "fail" for r in rows)
    return table, passed
