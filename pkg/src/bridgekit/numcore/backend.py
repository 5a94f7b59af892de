"""Kernel backend selection.

Two interchangeable kernel implementations exist: the compiled Cython core
(``_kernels_cy``) and the pure-Python numpy fallback (``_kernels_np``). The
compiled core is preferred when it built; ``BRIDGEKIT_KERNELS`` overrides
(``cy``, ``np``, or ``auto``). Tests and benchmarks switch at runtime with
``set_backend``.
"""

import importlib
import os

from ..errors import ConfigError

K = None  # active kernel module; ops read this on every call


def available_backends():
    names = []
    try:
        importlib.import_module("bridgekit.numcore._kernels_cy")
        names.append("cy")
    except ImportError:
        pass
    names.append("np")
    return names


def set_backend(name):
    """Activate a kernel backend by name ('cy', 'np', or 'auto')."""
    global K
    if name == "auto":
        name = available_backends()[0]
    if name not in ("cy", "np"):
        raise ConfigError(f"unknown kernel backend {name!r}")
    try:
        K = importlib.import_module(f"bridgekit.numcore._kernels_{name}")
    except ImportError as exc:
        raise ConfigError(f"kernel backend {name!r} is not available: {exc}")
    return K.NAME


def backend_name():
    return K.NAME


set_backend(os.environ.get("BRIDGEKIT_KERNELS", "auto"))
