"""Sparse-recovery estimators behind a name-keyed registry."""
from __future__ import annotations

from ._common import (RIDGE, RecoveryError, RecoveryProblem, RecoveryResult, support_error,
                      top_k)
from .focuss import focuss
from .greedy import beamform, cosamp, l0_oracle, mbmp, ols, omp, ra_ormp
from .lasso import lasso_bpdn
from .music import music

METHODS = {
    "beamform": beamform,
    "omp": omp,
    "ols": ols,
    "cosamp": cosamp,
    "focuss": focuss,
    "lasso": lasso_bpdn,
    "music": music,
    "raormp": ra_ormp,
    "mbmp": mbmp,
    "l0": l0_oracle,
}


def get_method(name: str):
    try:
        return METHODS[name]
    except KeyError:
        raise KeyError(f"unknown method {name!r}; choose from {', '.join(METHODS)}") from None


def recover(name: str, problem: RecoveryProblem, **params) -> RecoveryResult:
    """Run the registered method ``name`` on ``problem`` with flat ``params``."""
    return get_method(name)(problem, **params)


__all__ = ["METHODS", "RIDGE", "RecoveryError", "RecoveryProblem", "RecoveryResult",
           "beamform", "cosamp", "focuss", "get_method", "l0_oracle", "lasso_bpdn", "mbmp",
           "music", "ols", "omp", "ra_ormp", "recover", "support_error", "top_k"]
