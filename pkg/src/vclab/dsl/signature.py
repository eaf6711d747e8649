"""Signature levels and the symbol whitelist.

Levels are nested; a symbol is admitted at its own level and every level
above it.  Certification trusts this whitelist: o-minimality of each level is
taken as known, never checked.

==========  ==================================================
level       adds
==========  ==================================================
R_alg       + - * /, ^ with integer exponent, sqrt, abs, min, max
R_exp       exp, ln (alias log), ^ with any exponent
R_an_exp    sin_restricted, cos_restricted, atan_restricted
            (analytic on [-1, 1], zero outside)
R_an_Pfaff  Phi (standard normal cdf), erf
==========  ==================================================
"""

LEVELS = ("R_alg", "R_exp", "R_an_exp", "R_an_Pfaff")

# name -> (arity, minimal level)
FUNCTIONS = {
    "sqrt": (1, "R_alg"),
    "abs": (1, "R_alg"),
    "min": (2, "R_alg"),
    "max": (2, "R_alg"),
    "exp": (1, "R_exp"),
    "ln": (1, "R_exp"),
    "log": (1, "R_exp"),
    "sin_restricted": (1, "R_an_exp"),
    "cos_restricted": (1, "R_an_exp"),
    "atan_restricted": (1, "R_an_exp"),
    "Phi": (1, "R_an_Pfaff"),
    "erf": (1, "R_an_Pfaff"),
}

REAL_POWER_LEVEL = "R_exp"


def level_index(level: str) -> int:
    try:
        return LEVELS.index(level)
    except ValueError:
        raise ValueError(f"unknown signature level {level!r}; expected one of {', '.join(LEVELS)}") from None


def admits(level: str, required: str) -> bool:
    return level_index(level) >= level_index(required)


def symbols(level: str):
    """Function symbols available at ``level`` (the arithmetic operators are always present)."""
    i = level_index(level)
    return {name for name, (_, lvl) in FUNCTIONS.items() if level_index(lvl) <= i}
