"""Typeclass instance synthesis engine for the ``.tc`` declaration language."""
__version__ = '0.1.0'

from .terms import Const, Meta, NatLit, Var, unify, whnf  # noqa: F401,E402
from .parser import parse_file, parse_term  # noqa: F401,E402
from .hierarchy import Environment, build_environment  # noqa: F401,E402
from .synth import SynthConfig, synthesize  # noqa: F401,E402
