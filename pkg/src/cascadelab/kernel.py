"""Backend selection for batch simulation.

The compiled extension is used when it imports; setting
``CASCADELAB_PURE_PYTHON=1`` forces the pure-Python reference loop.
``CASCADELAB_WORKERS`` sets the thread count for the compiled backend
(default: available CPUs). Results never depend on the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from . import _kernel_py
from ._kernel_py import empty_arrays
from .costs import CAP_QUANTILE
from .rng import split_seed

_compiled = None
if os.environ.get("CASCADELAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernel as _compiled  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def worker_count() -> int:
    env = os.environ.get("CASCADELAB_WORKERS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"CASCADELAB_WORKERS must be >= 1, got {env!r}")
        return n
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def kernel_spec(config, hypotheses=None, stop_at_break: bool = False) -> dict:
    """Flatten a config into the scalars the compiled kernel reads."""
    from .dynamics import initial_llrs

    p, cm, rule = config.params, config.cost_model, config.subsidy_rule
    c1, c2 = cm.params()
    r1 = r2 = 0.0
    rule_code = 0 if rule is None else rule.code
    if rule_code == 1:
        r1 = rule.s
    elif rule_code == 2:
        r1 = rule.args(p)[0]
    elif rule_code == 3:
        ratio = rule.pi_bar / rule.p_star
        r1 = cm.fbar_effective if ratio >= CAP_QUANTILE else cm.quantile(ratio)
    L_U0, L_E0 = initial_llrs(config)
    key0, key1 = split_seed(config.seed)
    return {
        "mu0": p.mu0, "q0": p.q0, "q1": p.q1,
        "lam0": p.lam0, "lam1": p.lam1, "lamhat0": p.lamhat0, "lamhat1": p.lamhat1,
        "rho": p.rho, "eta": p.eta, "beta": p.beta, "epsilon": p.epsilon,
        "cost_code": cm.code, "c1": c1, "c2": c2, "cap": cm.fbar_effective,
        "rule_code": rule_code, "r1": r1, "r2": r2,
        "mode": 1 if config.mode == "imperfect" else 0,
        "edu_on": int(config.education_enabled),
        "theta_pin": -1 if config.theta is None else config.theta,
        "horizon": config.horizon,
        "L_U0": L_U0, "L_E0": L_E0,
        "key0": key0, "key1": key1,
        "check_h": int(hypotheses is not None),
        "h_delta": hypotheses.delta if hypotheses is not None else 0.0,
        "h_pstar": hypotheses.p_star if hypotheses is not None else 0.0,
        "stop_at_break": int(stop_at_break),
    }


def simulate_batch(
    config,
    hypotheses=None,
    stop_at_break: bool = False,
    path_start: int = 0,
    n: Optional[int] = None,
    backend: Optional[str] = None,
    workers: Optional[int] = None,
) -> dict:
    """Per-path summaries for paths ``path_start .. path_start + n - 1``.

    Returns a dict of numpy arrays; ``onset``, ``break_k`` and ``violation_k``
    are 0 when the event does not occur and ``cascade_action`` is -1.
    """
    n = config.n_reps if n is None else n
    backend = backend or BACKEND
    arrays = empty_arrays(n)
    if backend == "python":
        _kernel_py.run_chunk(config, arrays, 0, n, path_start, hypotheses, stop_at_break)
        return arrays
    if _compiled is None:
        raise RuntimeError("compiled kernel is not available")
    spec = kernel_spec(config, hypotheses, stop_at_break)
    workers = workers or worker_count()
    chunk = max(1, -(-n // (4 * workers)))
    bounds = [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]
    if workers == 1 or len(bounds) == 1:
        _compiled.run_chunk(spec, arrays, 0, n, path_start)
    else:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(lambda b: _compiled.run_chunk(spec, arrays, b[0], b[1], path_start), bounds))
    return arrays
