"""Lie-bracket stabilizability toolkit (compiled core)."""

from ._liestab import *  # noqa: F401,F403
from ._liestab import __doc__ as _core_doc

__doc__ = _core_doc
