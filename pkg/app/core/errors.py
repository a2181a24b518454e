"""
COMBWALK - Exceptions métier

Chaque erreur porte son code de sortie CLI et son statut HTTP.
"""


class CombWalkError(Exception):
    exit_code: int = 4
    status_code: int = 500

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class DomainError(CombWalkError):
    """Précondition violée (ξ hors domaine, coupure, contour invalide...)"""
    exit_code = 2
    status_code = 422


class InfeasibleError(CombWalkError):
    """Oracle demandé hors de son enveloppe de coût"""
    exit_code = 3
    status_code = 409


class CapExceededError(InfeasibleError):
    """n au-delà du plafond du mode exact"""


class ToleranceError(CombWalkError):
    """Tolérance numérique interne non atteinte"""
    exit_code = 4
    status_code = 500
