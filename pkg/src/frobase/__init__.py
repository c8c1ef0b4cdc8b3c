"""Frobenius structures on Hilbert bundles over finite discrete base spaces."""
from .base import BaseSpace, CFunction
from .errors import InputError, NoWitness, NotSpecialisable, VerificationError
from .frobenius import FrobeniusStructure, verify_laws
from .hilbmod import BundleMorphism, HilbertBundle, bundle

__version__ = "0.1.0"
