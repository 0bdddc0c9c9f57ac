"""
Subcommands: build, normalform, scan, measure, simulate, scaling, verify

Each command reads an ExperimentConfig plus input directories, writes its
artifacts under `out` and returns the path of its main report. Failed
checks raise CheckFailedError after the report is written.
"""
import os
from typing import Dict, List, Optional

import numpy as np

from bracket.poisson import bracket_with_sobolev_sq
from cli.experiment_config import ExperimentConfig
from dynamics.integrators import IntegratorConfig, integrate
from dynamics.stability import default_dt, default_shape, drift_scaling, stability_sweep
from frontend.hamiltonian import Hamiltonian, build_type1, build_type2, verify_structure
from frontend.physical import physical_energy
from frontend.store import read_hamiltonian, write_hamiltonian
from helper.artifacts import make_header, write_csv, write_json
from helper.exceptions import CheckFailedError, ConfigError
from logs.logger import system_logger
from normalform.birkhoff import birkhoff_iterate, certify
from normalform.result_store import read_result, write_result
from normalform.transform import transform_state
from polynomial.lattice import State, scale_to_norm, sobolev_norm
from polynomial.multi_index import MultiIndexPair
from polynomial.polynomial import Polynomial, conj_symmetry_check
from polynomial.sampling import random_state
from settings import settings
from spectrum.potential import Potential, sample_potential
from spectrum.scan import measure_sweep, resonance_scan

MEASURE_COLUMNS = ["N", "gamma", "samples", "failures", "fraction", "ci_low", "ci_high", "advisory_bound"]
SCALING_COLUMNS = ["R", "max_drift", "mean_drift"]
STABILITY_COLUMNS = ["epsilon", "escape_time", "survived"]


def _header(config: ExperimentConfig, command: str, seeds: Optional[List[int]] = None) -> dict:
    return make_header(config.resolved(), seeds=seeds, command=command)


def _potential(config: ExperimentConfig) -> Potential:
    lattice = config.lattice
    section = config.potential
    if section.v is not None:
        return Potential(theta=lattice.theta, m=section.m, J=lattice.J, v=section.v, seed=None)
    return sample_potential(lattice.theta, section.m, lattice.J, section.seed, lattice.include_zero)


def build_hamiltonian(config: ExperimentConfig) -> Hamiltonian:
    lattice = config.lattice
    pot = _potential(config)
    if lattice.theta == 0:
        return build_type1(config.nonlinearity, pot, lattice.J, lattice.include_zero)
    return build_type2(config.nonlinearity, pot, lattice.J)


def _load_hamiltonian(config: ExperimentConfig, hamiltonian_dir: Optional[str]) -> Hamiltonian:
    if hamiltonian_dir is None:
        return build_hamiltonian(config)
    H = read_hamiltonian(hamiltonian_dir)
    if H.lattice != config.lattice:
        raise ConfigError(f"Hamiltonian in {hamiltonian_dir} was built on a different lattice", field="lattice")
    return H


def _integrator(config: ExperimentConfig, H: Hamiltonian) -> IntegratorConfig:
    section = config.integrate
    dt = section.dt if section.dt is not None else default_dt(H.omega.array(H.lattice))
    return IntegratorConfig(scheme=section.scheme, dt=dt, sample_every=section.sample_every,
                            record_modes=section.record_modes)


def cmd_build(config: ExperimentConfig, out: str) -> str:
    """Build the Hamiltonian of the configured equation and check its structure"""
    H = build_hamiltonian(config)
    header = _header(config, "build", [config.potential.seed])
    write_hamiltonian(out, H, header)
    beta = config.nf.beta if config.nf is not None and config.nf.beta is not None else 0.0
    report = verify_structure(H, beta)
    path = write_json(os.path.join(out, "structure.json"), report.model_dump(mode="json"), header)
    system_logger.info(f"Structure check: passed={report.passed}, smallest C={report.smallest_C}")
    if not report.passed:
        raise CheckFailedError(f"structure check failed: {report.conj_defects[:5]}")
    return path


def cmd_normalform(config: ExperimentConfig, hamiltonian_dir: Optional[str], out: str) -> str:
    """Run every Birkhoff stage, write the result directory and the certificate"""
    params = config.require_nf()
    H = _load_hamiltonian(config, hamiltonian_dir)
    result = birkhoff_iterate(H.omega, H.P, params, H.theta)
    header = _header(config, "normalform", [config.potential.seed])
    write_result(out, result, header)
    certificate = certify(result)
    path = write_json(os.path.join(out, "certificate.json"), certificate.model_dump(mode="json"), header)

    system_logger.info(f"{'stage':>5} {'degree':>6} {'|S|':>6} {'|Z_d|':>6} {'residual':>10} {'mismatch':>10}")
    for stage in result.diagnostics.stages:
        system_logger.info(f"{stage.stage:>5} {stage.degree:>6} {stage.generator_terms:>6} {stage.resonant_terms:>6} "
                           f"{stage.homological_residual:>10.2e} {stage.stage_mismatch:>10.2e}")
    for stage in result.diagnostics.stages:
        if stage.homological_residual > settings.RESIDUAL_EXIT_TOL:
            raise CheckFailedError(f"stage {stage.stage}: homological residual {stage.homological_residual:.3e}")
    if not certificate.passed:
        raise CheckFailedError(f"normal-form certificate failed: {certificate.model_dump()}")
    return path


def cmd_scan(config: ExperimentConfig, hamiltonian_dir: Optional[str], out: str) -> str:
    """Resonance scan of the configured (or loaded) frequencies; CSV of violations"""
    params = config.require_nf().resonance()
    r = config.degree()
    omega = _load_hamiltonian(config, hamiltonian_dir).omega
    report = resonance_scan(omega, r, params, config.lattice)
    header = _header(config, "scan", [config.potential.seed])
    rows = [[str(v.l), str(v.k), v.divisor, v.threshold] for v in report.violations]
    write_csv(os.path.join(out, "violations.csv"), ["l", "k", "divisor", "threshold"], rows, header)
    path = write_json(os.path.join(out, "scan.json"), report.model_dump(mode="json"), header)
    system_logger.info(f"Scan r={r}: {report.checked} indices, {len(report.violations)} violations")
    return path


def cmd_measure(config: ExperimentConfig, out: str) -> str:
    """Monte-Carlo resonant fraction over the (gamma, N) grid of the experiment section"""
    section = config.experiment
    if not section.gammas or not section.Ns:
        raise ConfigError("measure needs non-empty gammas and Ns", field="experiment.gammas")
    alpha = config.require_nf().alpha
    sweep = measure_sweep(config.lattice.theta, config.potential.m, config.degree(), alpha,
                          section.gammas, section.Ns, config.lattice.J, section.samples, section.seed)
    header = _header(config, "measure", [section.seed])
    rows = [[row.N, row.gamma, row.samples, row.failures, row.fraction, row.ci[0], row.ci[1], row.advisory_bound]
            for row in sweep.rows]
    write_csv(os.path.join(out, "measure.csv"), MEASURE_COLUMNS, rows, header)
    return write_json(os.path.join(out, "measure.json"), sweep.model_dump(mode="json"), header)


def cmd_simulate(config: ExperimentConfig, hamiltonian_dir: Optional[str], out: str) -> str:
    """
    Trajectory from the default shape at each epsilon, or stability times when
    experiment.kind is "stability"
    """
    H = _load_hamiltonian(config, hamiltonian_dir)
    cfg = _integrator(config, H)
    section = config.experiment
    p = config.p
    header = _header(config, "simulate", [section.seed])
    if section.kind == "stability":
        outcomes = stability_sweep(H, section.epsilon, p, cfg, config.integrate.T, section.threshold_factor,
                                   section.seed)
        rows = [[eps, None if isinstance(t, str) else t, isinstance(t, str)] for eps, t in outcomes]
        return write_csv(os.path.join(out, "stability.csv"), STABILITY_COLUMNS, rows, header)
    shape = default_shape(H.lattice, p, section.seed)
    path = out
    for index, eps in enumerate(section.epsilon):
        trajectory = integrate(H, scale_to_norm(shape, eps, p), cfg, config.integrate.T, p)
        path = write_csv(os.path.join(out, f"trajectory_{index}.csv"), trajectory.columns(cfg.record_modes),
                         trajectory.rows(cfg.record_modes), dict(header, epsilon=eps))
        drift = abs(trajectory.energy[-1] - trajectory.energy[0])
        system_logger.info(f"epsilon={eps:.3e}: |H(T)-H(0)|={drift:.3e}, final ||u||_{p}={trajectory.norm_p[-1]:.3e}")
    return path


def _scaling_targets(H: Hamiltonian, normalform_dir: Optional[str]) -> Dict[str, Dict[str, Polynomial]]:
    targets = {"original": {"H0": H.H0, "P": H.P}}
    if normalform_dir is not None:
        result = read_result(normalform_dir)
        targets["normalform"] = result.parts()
    return targets


def cmd_scaling(config: ExperimentConfig, hamiltonian_dir: Optional[str], normalform_dir: Optional[str],
                out: str) -> str:
    """Drift-slope fits of the original and, when given, the normalized Hamiltonian"""
    H = _load_hamiltonian(config, hamiltonian_dir)
    section = config.experiment
    if not section.ladder:
        raise ConfigError("scaling needs a norm ladder", field="experiment.ladder")
    header = _header(config, "scaling", [section.seed])
    slopes = {}
    for name, parts in _scaling_targets(H, normalform_dir).items():
        report = drift_scaling(parts, config.p, section.ladder, H.theta, section.samples, section.seed,
                               section.max_mode)
        write_csv(os.path.join(out, f"scaling_{name}.csv"), SCALING_COLUMNS, report.rows(), header)
        slopes[name] = report.model_dump(mode="json")
        system_logger.info(f"Drift scaling ({name}): {report.status}, slope={report.slope}")
    return write_json(os.path.join(out, "scaling.json"), {"reports": slopes}, header)


def _null_bracket_check(H: Hamiltonian, p: float) -> Optional[bool]:
    """{u_1 ubar_-1 + ubar_1 u_-1, ||u||_p^2} vanishes for theta=0 and not for theta=1"""
    lattice = H.lattice
    pair = Polynomial.from_scalars(lattice, {MultiIndexPair.from_modes((1,), (-1,)): 1.0,
                                             MultiIndexPair.from_modes((-1,), (1,)): 1.0})
    vanishes = bracket_with_sobolev_sq(pair, p).is_zero
    return vanishes if H.theta == 0 else not vanishes


def _physical_check(config: ExperimentConfig, H: Hamiltonian, states: List[State]) -> float:
    kind = "type1" if H.theta == 0 else "type2"
    worst = 0.0
    for s in states:
        fourier = H.P(s)
        physical = physical_energy(config.nonlinearity, s, kind)
        scale = max(abs(fourier), abs(physical), 1e-300)
        worst = max(worst, abs(fourier - physical) / scale)
    return worst


def cmd_verify(config: ExperimentConfig, hamiltonian_dir: Optional[str], normalform_dir: Optional[str],
               out: str) -> str:
    """
    Structural, physical-space and reality checks of the Hamiltonian; with a
    normal-form directory also the certificate and a transform round trip
    """
    H = _load_hamiltonian(config, hamiltonian_dir)
    section = config.experiment
    p = config.p
    rng = np.random.default_rng(section.seed)
    states = [random_state(H.lattice, 1.0, 0.0, rng) for _ in range(section.n_states)]
    beta = config.nf.beta if config.nf is not None and config.nf.beta is not None else 0.0

    structure = verify_structure(H, beta)
    physical_error = _physical_check(config, H, states)
    real_slice = max((abs(H.P(s).imag) / (1.0 + abs(H.P(s))) for s in states), default=0.0)
    checks = {
        "structure": structure.passed,
        "physical_energy": physical_error <= 1e-10,
        "real_slice": real_slice <= 1e-12,
        "null_brackets": _null_bracket_check(H, p),
    }
    payload = {"structure": structure.model_dump(mode="json"), "physical_energy_rel_error": physical_error,
               "real_slice_max_imag": real_slice}

    if normalform_dir is not None:
        result = read_result(normalform_dir)
        certificate = certify(result)
        s = scale_to_norm(default_shape(H.lattice, p, section.seed), 1e-2, p)
        back = transform_state(result.generators, transform_state(result.generators, s, "forward", p=p),
                               "inverse", p=p)
        round_trip = sobolev_norm(back - s, p)
        checks["certificate"] = certificate.passed
        checks["transform_round_trip"] = round_trip <= 1e-8
        checks["transformed_reality"] = conj_symmetry_check(result.total())
        payload.update(certificate=certificate.model_dump(mode="json"), round_trip_error=round_trip)

    header = _header(config, "verify", [section.seed])
    path = write_json(os.path.join(out, "verify.json"), dict(payload, checks=checks), header)
    failed = [name for name, ok in checks.items() if not ok]
    for name, ok in checks.items():
        system_logger.info(f"  {name:<22} {'ok' if ok else 'FAILED'}")
    if failed:
        raise CheckFailedError(f"failed checks: {', '.join(failed)}")
    return path
