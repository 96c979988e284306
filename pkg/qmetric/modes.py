"""
QMetric - quantum metrics on finite-dimensional noncommutative spaces.
Modes are the definitions a candidate metric can be verified against.

Each mode lists the axioms it checks, in report order, and how the diagonal
condition is imposed: through the projector P_delta or through the
multiplication map m.
"""

from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from .constants import DEFAULT_MODE
from .models import AxiomTag, DefinitionMode

AXIOM_STATEMENTS: Dict[str, str] = {
    "i": "rho >= 0",
    "ii": "rho P_delta = P_delta rho = 0",
    "iii": "rho is invertible on the complement of P_delta",
    "iv": "flip(rho) = rho",
    "v": "mid_embed(rho) <= rho (x) 1 + 1 (x) rho",
    "ii_alg": "m(rho) = 0",
    "iii_alg": "rho + nu is invertible for every admissible nu",
}

QMETRIC_MODES = [
    {
        "mode": "representation",
        "description": "Compact quantum metric w.r.t. the identity representation.",
        "usage": "Diagonal conditions are stated through the projector P_delta.",
        "axioms": ["i", "ii", "iii", "iv", "v"],
        "diagonal": "projector",
        "commutative_factor_required": False,
    },
    {
        "mode": "algebraic",
        "description": "Algebraic compact quantum metric, no enveloping algebra.",
        "usage": "Diagonal conditions use the multiplication map m; "
        "(iii)'' is checked by sampling.",
        "axioms": ["i", "ii_alg", "iii_alg", "iv", "v"],
        "diagonal": "multiplication",
        "commutative_factor_required": True,
    },
]


@lru_cache(maxsize=1)
def _registry() -> Dict[str, DefinitionMode]:
    modes = [DefinitionMode.model_validate(mode) for mode in QMETRIC_MODES]
    return {mode.mode: mode for mode in modes}


def get_available_modes() -> List[DefinitionMode]:
    """The registered definition modes, in registration order."""
    return list(_registry().values())


def get_available_mode_names() -> List[str]:
    return list(_registry())


def is_mode_valid(mode: str) -> bool:
    return mode in _registry()


def get_mode(mode: str) -> DefinitionMode:
    """
    Look up a mode by name.

    Raises:
        ValueError: If the mode is unknown.
    """
    if not is_mode_valid(mode):
        raise ValueError(f"Invalid mode. Available: {get_available_mode_names()}.")
    return _registry()[mode]


def get_default_mode() -> DefinitionMode:
    """
    The mode used when none is given.

    Raises:
        ValueError: If DEFAULT_MODE is not registered.
    """
    if not is_mode_valid(DEFAULT_MODE):
        raise ValueError(f"Default mode '{DEFAULT_MODE}' not found in available modes.")
    return get_mode(DEFAULT_MODE)


def uses_multiplication_map(mode: str) -> bool:
    """Whether the diagonal condition of `mode` is m(rho) = 0."""
    return get_mode(mode).diagonal == "multiplication"


def split_axioms(
    mode: str, skip: Sequence[str] = ()
) -> Tuple[List[AxiomTag], List[AxiomTag]]:
    """
    Partition the axioms of a mode into those to check and those skipped.

    Args:
        mode: The definition mode.
        skip: Axiom tags to leave out.

    Returns:
        (checked, skipped), both in report order.

    Raises:
        ValueError: If the mode is unknown or a skipped tag is not one of its
            axioms.
    """
    axioms = get_mode(mode).axioms
    unknown = sorted(set(skip) - set(axioms))
    if unknown:
        raise ValueError(f"Mode '{mode}' has no axioms {unknown}; it checks {axioms}.")
    checked = [axiom for axiom in axioms if axiom not in skip]
    skipped = [axiom for axiom in axioms if axiom in skip]
    return checked, skipped


def axiom_statement(axiom: str) -> str:
    """
    The condition an axiom tag stands for.

    Raises:
        ValueError: If the tag is unknown.
    """
    if axiom not in AXIOM_STATEMENTS:
        raise ValueError(f"Unknown axiom '{axiom}'.")
    return AXIOM_STATEMENTS[axiom]
