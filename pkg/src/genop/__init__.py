"""Finite category theory and generalized operads over finite sets."""
from .fincat import CapExceeded, CategoryError, FinCategory, Functor, SetFunctor
from .fmulti import FMulticategory, check_fmulticategory, nonsym, sigma_star
from .report import Report

__version__ = "0.1.0"
