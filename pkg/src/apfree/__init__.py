"""Sets of positive integers without p-term arithmetic progressions."""

from .core import ApWitness, IntegerSet, extension_creates_ap, find_ap_witness, is_ap_free
from .greedy import GreedyGenerator, generate, generate_up_to
from .measure import ReciprocalSum, gerver_reference, mu, mu_tail

__all__ = [
    "ApWitness",
    "GreedyGenerator",
    "IntegerSet",
    "ReciprocalSum",
    "extension_creates_ap",
    "find_ap_witness",
    "generate",
    "generate_up_to",
    "gerver_reference",
    "is_ap_free",
    "mu",
    "mu_tail",
]
