"""Concentrator-photovoltaic test-rig simulator and CSOC rating toolkit."""

from cpvsim._core import *  # noqa: F401,F403
from cpvsim._core import __doc__ as _core_doc

__doc__ = _core_doc
__version__ = "0.1.0"
