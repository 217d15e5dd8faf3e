"""Possibility semantics for modal logic on finite frames."""
from .formula import And, Box, Dia, Iff, Imp, Neg, Or, Var, parse, to_text
from .frame import FinitePoset, PossibilityFrame, classify, validate_frame
from .forcing import Model, forces, truth_set, valid_on_frame

__all__ = ["And", "Box", "Dia", "Iff", "Imp", "Neg", "Or", "Var", "parse", "to_text",
           "FinitePoset", "PossibilityFrame", "classify", "validate_frame",
           "Model", "forces", "truth_set", "valid_on_frame"]
