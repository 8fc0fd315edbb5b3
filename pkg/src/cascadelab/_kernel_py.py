"""Pure-Python batch backend: loops over the reference path simulator."""

from __future__ import annotations

import numpy as np

from .rng import PathStream

FIELDS = {
    "theta": np.int8,
    "n_edu": np.int32,
    "onset": np.int32,
    "break_k": np.int32,
    "violation_k": np.int32,
    "cascade_action": np.int8,
    "W": np.float64,
    "W_lb": np.float64,
    "outlay": np.float64,
    "outlay_n": np.int32,
    "L_U": np.float64,
    "L_E": np.float64,
    "e1": np.int8,
    "sd_edu_n": np.int32,
    "sd_edu_correct": np.int32,
}


def empty_arrays(n: int) -> dict:
    return {k: np.zeros(n, dtype=t) for k, t in FIELDS.items()}


def run_chunk(config, arrays: dict, lo: int, hi: int, path_start: int, hypotheses=None, stop_at_break=False) -> None:
    from .dynamics import simulate_path

    for i in range(lo, hi):
        r = simulate_path(config, PathStream(config.seed, path_start + i), hypotheses, stop_at_break)
        last = r.beliefs.states[-1]
        row = {
            "theta": r.theta,
            "n_edu": r.n_edu,
            "onset": r.onset or 0,
            "break_k": r.break_k or 0,
            "violation_k": r.violation_k or 0,
            "cascade_action": -1 if r.cascade_action is None else r.cascade_action,
            "W": r.W,
            "W_lb": r.W_lb,
            "outlay": r.outlay,
            "outlay_n": r.outlay_n,
            "L_U": last.L_U,
            "L_E": last.L_E,
            "e1": r.educations[0],
            "sd_edu_n": r.sd_edu_n,
            "sd_edu_correct": r.sd_edu_correct,
        }
        for k, v in row.items():
            arrays[k][i] = v
