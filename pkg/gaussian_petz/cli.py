# gaussian_petz/cli.py
"""
Command implementations behind main.py. Each returns a process exit status:
0 success, 1 check failed, 2 a required state is not faithful, 3 malformed
input or configuration.
"""
import dataclasses
import functools
import json
import sys

import numpy as np

from gaussian_petz.core.channels import GaussianChannel
from gaussian_petz.core.info_measures import QuadratureConfig, fidelity_recovery_bound
from gaussian_petz.core.petz import petz_channel, verify_petz_identity
from gaussian_petz.core.symplectic_core import GaussianState
from gaussian_petz.db.db import get_db, init_db
from gaussian_petz.services.oracle_service import OracleService
from gaussian_petz.services.run_analytics import RunAnalytics
from gaussian_petz.services.search_service import SearchService
from gaussian_petz.utils import config
from gaussian_petz.utils.errors import (
    EXIT_FAILURE,
    EXIT_OK,
    ConfigurationError,
    DomainError,
    GaussianPetzError,
    InvalidInputError,
    NonFaithfulError,
    exit_code_for,
)
from gaussian_petz.utils.io import matrix_to_json, read_json, vector_to_json, write_json
from gaussian_petz.utils.logging_utils import log_manager


def _reports_errors(fn):
    """Turn library exceptions into a logged message and the matching exit status."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except GaussianPetzError as e:
            log_manager(f"{type(e).__name__}: {e}", colors=kwargs.get("colors"), level="ERROR")
            return exit_code_for(e)
    return wrapper


def _load(path, loader):
    """Parse one input file; an object that cannot exist is malformed input."""
    obj = read_json(path)
    try:
        return loader(obj)
    except NonFaithfulError:
        raise
    except DomainError as e:
        raise InvalidInputError(f"{path}: {e}") from e


def _load_instance(state_path, channel_path):
    sigma = _load(state_path, GaussianState.from_json)
    channel = _load(channel_path, GaussianChannel.from_json)
    return sigma, channel


@_reports_errors
def run_petz(state_path, channel_path, out_path=None, tol=config.REVERSAL_TOL, colors=None):
    sigma, channel = _load_instance(state_path, channel_path)
    construction = petz_channel(sigma, channel)
    cov_defect, mean_defect = construction.reversal_defect()
    scale = max(1.0, float(np.max(np.abs(sigma.cov))), float(np.max(np.abs(sigma.mean))))
    cp_ok = construction.cp_min_eigenvalue >= -config.CP_TOL
    reversal_ok = max(cov_defect, mean_defect) <= tol * scale
    write_json(out_path, {
        "X_P": matrix_to_json(construction.X_P),
        "Y_P": matrix_to_json(construction.Y_P),
        "delta_P": vector_to_json(construction.delta_P),
        "cp_min_eigenvalue": construction.cp_min_eigenvalue,
        "reversal_defect": {"cov": cov_defect, "mean": mean_defect},
    })
    if cp_ok and reversal_ok:
        log_manager("Petz channel constructed; CP and reversal certificates pass", colors=colors, level="SUCCESS")
        return EXIT_OK
    log_manager(f"certificate failed: cp_min={construction.cp_min_eigenvalue:.3e}, "
                f"reversal defect={max(cov_defect, mean_defect):.3e}", colors=colors, level="ERROR")
    return EXIT_FAILURE


def lattice(grid, dim):
    """grid vectors of length dim with components from linspace(-2, 2, grid), cyclically shifted."""
    values = np.linspace(-2.0, 2.0, grid) if grid > 1 else np.zeros(1)
    return [np.array([values[(i + k) % grid] for k in range(dim)]) for i in range(grid)]


@_reports_errors
def run_verify(state_path, channel_path, grid=config.DEFAULT_GRID, tol=config.VERIFY_TOL, fault=False,
               out_path=None, colors=None):
    if grid < 1:
        raise ConfigurationError(f"grid must be >= 1, got {grid}")
    sigma, channel = _load_instance(state_path, channel_path)
    construction = petz_channel(sigma, channel)
    if fault:
        dim = construction.Y_P.shape[0]
        corrupted = GaussianChannel(construction.X_P, construction.Y_P + 0.5 * np.eye(dim),
                                    construction.delta_P, validate=False)
        construction = dataclasses.replace(construction, channel=corrupted)
        log_manager("fault injection: Y_P + 0.5 I", colors=colors, level="WARNING")

    worst = (0.0, None, None)
    for w1 in lattice(grid, 2 * channel.n_out):
        for w2 in lattice(grid, 2 * channel.n_in):
            identity = verify_petz_identity(sigma, channel, w1, w2, construction=construction)
            err = abs(identity.lhs - identity.rhs)
            if err > worst[0] or worst[1] is None:
                worst = (err, w1, w2)
    max_error, w1, w2 = worst
    passed = bool(max_error < tol)
    write_json(out_path, {
        "grid": grid,
        "max_error": float(max_error),
        "w1": vector_to_json(w1),
        "w2": vector_to_json(w2),
        "tol": tol,
        "passed": passed,
    })
    level = "SUCCESS" if passed else "ERROR"
    log_manager(f"max |lhs - rhs| = {max_error:.3e} at w1={w1.tolist()}, w2={w2.tolist()}",
                colors=colors, level=level)
    return EXIT_OK if passed else EXIT_FAILURE


@_reports_errors
def search_counterexamples(seed=config.DEFAULT_SEED, samples=config.DEFAULT_SAMPLES, modes=1, out_path=None,
                           top_k=config.DEFAULT_TOP_K, threads=None, archive=None,
                           executor=config.SEARCH_EXECUTOR, colors=None):
    if modes not in (1, 2):
        raise ConfigurationError(f"--modes must be 1 or 2, got {modes}")
    if samples < 0:
        raise ConfigurationError(f"--samples must be non-negative, got {samples}")
    service = SearchService(seed, samples, modes, threads=threads, top_k=top_k, colors=colors,
                            executor=executor)
    result = service.run()
    write_json(out_path, result.to_json())
    if archive:
        init_db(archive)
        analytics = RunAnalytics(functools.partial(get_db, archive), colors)
        analytics.summarize(result)
        analytics.save_search(result)
    return EXIT_OK if result.found > 0 else EXIT_FAILURE


@_reports_errors
def run_bound(rho_path, sigma_path, channel_path, quad_points=config.DEFAULT_QUAD_POINTS,
              quad_range=config.DEFAULT_QUAD_RANGE, out_path=None, colors=None):
    quad = QuadratureConfig(quad_range, quad_points).validate()
    rho = _load(rho_path, GaussianState.from_json)
    sigma, channel = _load_instance(sigma_path, channel_path)
    report = fidelity_recovery_bound(rho, sigma, channel, quad)
    passed = report.slack >= -config.BOUND_SLACK_TOL
    write_json(out_path, {"lhs": report.lhs, "rhs": report.rhs, "slack": report.slack, "passed": bool(passed)})
    log_manager(f"lhs={report.lhs:.10g} rhs={report.rhs:.10g} slack={report.slack:.3e}",
                colors=colors, level="SUCCESS" if passed else "ERROR")
    return EXIT_OK if passed else EXIT_FAILURE


@_reports_errors
def run_oracle_suite(cutoff=config.DEFAULT_CUTOFF, tol=config.DEFAULT_ORACLE_TOL, colors=None, stream=None):
    if cutoff > config.MAX_ORACLE_CUTOFF:
        raise ConfigurationError(f"--cutoff must be <= {config.MAX_ORACLE_CUTOFF}, got {cutoff}")
    stream = stream or sys.stdout
    checks = OracleService(cutoff, tol, colors).run()
    for check in checks:
        stream.write(json.dumps(check.to_json(), allow_nan=False) + "\n")
    failed = [c.check for c in checks if not c.passed]
    stream.write(json.dumps({"cutoff": cutoff, "tol": tol, "passed": len(checks) - len(failed),
                             "failed": failed}) + "\n")
    stream.flush()
    return EXIT_FAILURE if failed else EXIT_OK
