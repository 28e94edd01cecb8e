"""Index and sign conventions for the lexicographic-pyramid readouts.

Several readings of the combinatorial statements are plausible (where the
apex sits in a cofacet vector, whether parity counts the first gap, which
diagonal sign triggers a pull, and which index is used when no entry
triggers).  Each is a field here.  :data:`CALIBRATED` is the combination that
agrees with the geometric oracles; ``calibrate_convention`` in
:mod:`polyproj.project` re-derives it and the test suite asserts equality.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Convention:
    # label of the apex in a cofacet vector; vertex v_j then has label apex_index + j
    apex_index: int = 0
    # "local": count zeros inside the tail only; "shifted": also count the first gap
    lemma_parity: str = "shifted"
    cubical_parity: str = "shifted"
    # diagonal sign that marks the first pulled position
    ncp_trigger: str = "+"
    pdpp_trigger: str = "+"
    # index used when nothing triggers, relative to the number of Gale columns
    default_offset: int = 1

    def __post_init__(self):
        if self.apex_index not in (0, 1):
            raise ValueError("apex_index must be 0 or 1")
        for name in ("lemma_parity", "cubical_parity"):
            if getattr(self, name) not in ("local", "shifted"):
                raise ValueError(f"{name} must be 'local' or 'shifted'")
        for name in ("ncp_trigger", "pdpp_trigger"):
            if getattr(self, name) not in ("+", "-"):
                raise ValueError(f"{name} must be '+' or '-'")
        if self.default_offset not in (-1, 0, 1):
            raise ValueError("default_offset must be -1, 0 or 1")

    def with_(self, **changes) -> "Convention":
        return replace(self, **changes)


CALIBRATED = Convention()

# The statements read literally: apex labelled 1, parity counted from the
# first gap, "-" as the polygon trigger and the default one below the number
# of Gale columns.
LITERAL = Convention(
    apex_index=1,
    lemma_parity="shifted",
    cubical_parity="shifted",
    ncp_trigger="+",
    pdpp_trigger="-",
    default_offset=-1,
)


def named_convention(name: str) -> Convention:
    """Map the CLI ``--convention`` choice to a convention.

    ``ncp`` applies the cube trigger ``+`` to both families, ``pdpp`` the
    polygon trigger ``-``; ``auto`` is the calibrated choice.
    """
    if name == "auto":
        return CALIBRATED
    if name == "ncp":
        return CALIBRATED.with_(ncp_trigger="+", pdpp_trigger="+")
    if name == "pdpp":
        return CALIBRATED.with_(ncp_trigger="-", pdpp_trigger="-")
    raise ValueError(f"unknown convention {name!r}")
