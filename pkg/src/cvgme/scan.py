"""Threshold bisection, parameter sweeps and their tabular output."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.optimize

from .entanglement_sdp import (
    Feasible,
    cm_bisep_feasibility,
    decomposition_error,
    fully_decomposable_witness,
    verify_feasible,
)
from .errors import BracketError, NumericalError, UsageError
from .fs_analytics import gabriel_two_copy_fs
from .gaussian_fock import QUBIT_BASIS, oracle_qubit_subspace_table, qubit_projection, qubit_subspace_table
from .records import ScanRecord, map_ordered
from .symplectic import (
    PHYSICAL_TOL,
    ModeBipartition,
    direct_sum,
    fs_mixture_cm,
    fs_mixture_decomposition,
    multi_copy_gap,
    nu_tilde_closed_form,
    ppt_min_symplectic_eigenvalue,
    tripartite_bipartitions,
)
from .witnesses import ppt_min_eig, symmetric_witness, symmetric_witness_margin

MAX_BISECTION_ITER = 60
CONFIG_ENV = "GME_ACTIVATE_CONFIG"


@dataclass(frozen=True)
class ThresholdResult:
    name: str
    bracket: tuple[float, float]
    root: float
    tol: float
    iterations: int

    def as_dict(self) -> dict:
        return {"name": self.name, "lo": self.bracket[0], "hi": self.bracket[1], "root": self.root,
                "tol": self.tol, "iterations": self.iterations}


def find_threshold(criterion: Callable[[float], float], lo: float, hi: float, tol: float = 1e-8,
                   name: str = "threshold") -> ThresholdResult:
    """Bisect a sign change of ``criterion`` on ``[lo, hi]`` down to an interval shorter than ``tol``.

    Raises
    ------
    BracketError
        If the end points do not straddle a sign change.
    """
    if not (lo < hi) or tol <= 0:
        raise UsageError(f"need lo < hi and tol > 0, got [{lo}, {hi}], tol={tol}")
    flo, fhi = criterion(lo), criterion(hi)
    if not (np.isfinite(flo) and np.isfinite(fhi)) or flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f = {flo:.3g}, {fhi:.3g}")
    root, info = scipy.optimize.bisect(criterion, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps,
                                       maxiter=MAX_BISECTION_ITER, full_output=True, disp=False)
    if not info.converged:
        raise NumericalError(f"bisection for {name} did not converge in {MAX_BISECTION_ITER} steps")
    return ThresholdResult(name, (float(lo), float(hi)), float(root), float(tol), int(info.iterations))


# ---------------------------------------------------------------- the three thresholds

def r1_criterion(r: float) -> float:
    return nu_tilde_closed_form(r) - 1.0


def r0_prime_criterion(r: float) -> float:
    return symmetric_witness_margin(r)


def r0_criterion(r: float, options=None) -> float:
    return fully_decomposable_witness(qubit_projection(r), options)[1]


def thresholds(tol: float = 1e-6, sdp_tol: float = 1e-5, options=None) -> dict[str, ThresholdResult]:
    """The witness threshold ``r0_prime``, the SDP threshold ``r0`` and the PPT threshold ``r1``."""
    return {
        "r0_prime": find_threshold(r0_prime_criterion, 0.05, 0.5, tol, "r0_prime"),
        "r0": find_threshold(lambda r: r0_criterion(r, options), 0.3, 0.9, sdp_tol, "r0"),
        "r1": find_threshold(r1_criterion, 1.0, 1.5, tol, "r1"),
    }


# ---------------------------------------------------------------- sweeps

def linear_grid(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise UsageError(f"steps must be positive, got {steps}")
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo:
        raise UsageError(f"invalid range [{lo}, {hi}]")
    return np.linspace(lo, hi, steps)


def witness_point(r: float) -> ScanRecord:
    w = symmetric_witness(r)
    nu = ppt_min_symplectic_eigenvalue(fs_mixture_cm(r), ModeBipartition((0,), (1, 2)))
    return ScanRecord(
        {"r": r},
        {"witness_lhs": w.lhs, "witness_rhs": w.rhs, "witness_margin": w.lhs - w.rhs, "nu_tilde_minus": nu},
        {"witness_violated": w.violated, "ppt_entangled": bool(nu < 1.0 - PHYSICAL_TOL)},
    )


def witness_scan(r_min: float, r_max: float, steps: int, jobs: int = 1) -> list[ScanRecord]:
    if r_min < 0:
        raise UsageError("r must be nonnegative")
    return map_ordered(witness_point, [float(r) for r in linear_grid(r_min, r_max, steps)], jobs)


def _gabriel_point(args) -> ScanRecord:
    lam, n, cutoff, cross = args
    v = gabriel_two_copy_fs(n, lam, cutoff, cross)
    return ScanRecord({"lambda": lam}, {"lhs": v.lhs, "rhs": v.rhs}, {"violated": v.violated})


def gabriel_scan(lambdas: Sequence[float], n: int = 0, cutoff: int = 8, cross_check: bool = True,
                 jobs: int = 1) -> list[ScanRecord]:
    return map_ordered(_gabriel_point, [(float(x), n, cutoff, cross_check) for x in lambdas], jobs)


def element_records(r: float) -> list[ScanRecord]:
    closed, oracle = qubit_subspace_table(r), oracle_qubit_subspace_table(r)
    out = []
    for a, bra in enumerate(QUBIT_BASIS):
        for b, ket in enumerate(QUBIT_BASIS):
            out.append(ScanRecord(
                {"bra": int("".join(map(str, bra)), 2), "ket": int("".join(map(str, ket)), 2)},
                {"closed_form": closed[a, b], "oracle_re": float(np.real(oracle[a, b])),
                 "oracle_im": float(np.imag(oracle[a, b])), "abs_diff": float(abs(closed[a, b] - oracle[a, b]))},
            ))
    return out


REGIME_GME = "GME"
REGIME_ACTIVATABLE = "FIB-or-GME, activatable (k unknown)"
REGIME_NOT_FI = "not fully inseparable"


def gaussian_regime(r: float, sdp_optimum: float | None = None, options=None) -> str:
    """Label for the Gaussian state with CM ``fs_mixture_cm(r)``.

    GME is certified by the symmetric witness or by a negative fully decomposable
    witness on the qubit projection. Otherwise a PPT violation on the one-mode
    cuts leaves the state fully inseparable and thus either FIB (hence
    activatable for some unknown number of copies) or undetected GME.
    """
    if symmetric_witness(r).violated:
        return REGIME_GME
    if sdp_optimum is None:
        sdp_optimum = r0_criterion(r, options)
    if sdp_optimum < 0:
        return REGIME_GME
    nu = ppt_min_symplectic_eigenvalue(fs_mixture_cm(r), ModeBipartition((0,), (1, 2)))
    return REGIME_ACTIVATABLE if nu < 1.0 - PHYSICAL_TOL else REGIME_NOT_FI


def qubit_gme_report(r: float, options=None) -> dict:
    rho = qubit_projection(r)
    wit, opt = fully_decomposable_witness(rho, options)
    out = {"r": r, "witness_optimum": opt, "gme": bool(opt < 0), "regime": gaussian_regime(r, opt),
           "witness_trace": float(np.real(np.trace(wit.w))), "decomposition_error": decomposition_error(wit)}
    for m, label in enumerate("ABC"):
        out[f"ppt_min_eig_{label}"] = ppt_min_eig(rho, ModeBipartition.from_group([m], 3))
    return out


def multicopy_report(r: float, copies: int, options=None) -> dict:
    if copies < 1:
        raise UsageError("copies must be positive")
    gamma = direct_sum([fs_mixture_cm(r)] * copies)
    parties = [[x + 3 * j for j in range(copies)] for x in range(3)]
    res = cm_bisep_feasibility(gamma, tripartite_bipartitions(parties), options)
    dec = fs_mixture_decomposition(r)
    out = {"r": r, "copies": copies, "feasible": isinstance(res, Feasible),
           "gap_one_copy": multi_copy_gap(fs_mixture_cm(r), dec, 1),
           "gap_k_copies": multi_copy_gap(fs_mixture_cm(r), dec, copies)}
    if isinstance(res, Feasible):
        gap, valid = verify_feasible(gamma, res)
        out.update({f"weight_{i}": float(p) for i, p in enumerate(res.weights)})
        out.update({"residual_min_eig": gap, "validity_min_eig": valid})
    else:
        out["witness_value"] = res.witness.value
    return out


# ---------------------------------------------------------------- output

def to_json(obj: Mapping) -> str:
    def default(o):
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        if isinstance(o, np.bool_):
            return bool(o)
        raise TypeError(type(o).__name__)

    return json.dumps(obj, indent=2, sort_keys=False, default=default) + "\n"


# ---------------------------------------------------------------- config

CONFIG_KEYS = {
    "cutoff": int,
    "jobs": int,
    "feastol": float,
    "gaptol": float,
    "max_iter": int,
    "threshold_tol": float,
    "sdp_threshold_tol": float,
}


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Unknown keys are an error."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise UsageError(f"config line {lineno}: bad value {value!r} for {key}") from exc
    return out


def load_config(path: str | os.PathLike | None = None) -> dict:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc

