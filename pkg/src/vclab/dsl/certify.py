"""Parameter-count certificates for uniformly definable families."""

import json
from dataclasses import dataclass, field

from .parser import Formula, required_level

ASSUMPTIONS = (
    "signature symbols are trusted from the o-minimal whitelist, not verified",
    "graph_is_function: unchecked (needed when the formula defines the subgraph of a function class)",
    "bounded envelope required for the covering-number exponent",
)


@dataclass(frozen=True)
class Certificate:
    formula_id: str
    level: str
    d: int
    params: tuple
    min_level: str
    envelope_required: bool = True
    assumptions: tuple = field(default=ASSUMPTIONS)
    warnings: tuple = ()

    @property
    def density_bound(self) -> int:
        return self.d

    @property
    def covering_exponent(self) -> str:
        return f"{self.d}+eta (any eta>0)"

    def to_dict(self):
        return {"formula_id": self.formula_id, "level": self.level, "min_level": self.min_level,
                "d": self.d, "params": list(self.params), "density_bound": self.density_bound,
                "covering_exponent": self.covering_exponent, "envelope_required": self.envelope_required,
                "assumptions": list(self.assumptions), "warnings": list(self.warnings)}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def certify(f: Formula) -> Certificate:
    """VC-density bound d = number of declared parameters; covering exponent d + eta."""
    return Certificate(f.name, f.level, len(f.params), tuple(f.params), required_level(f.root),
                       warnings=tuple(f.warnings))
