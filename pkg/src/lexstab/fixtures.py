"""Standard quivers, charge presets and sheaf examples used by the CLI and tests.

Presets are linear functionals on dimension vectors; the ones defined here
are validated at import time (the audit is cheap and deterministic).
"""
from __future__ import annotations

from fractions import Fraction

from .p1 import SplitSheaf
from .quiver import ChargePreset, Quiver, QuiverRep

F = Fraction

#: Two vertices, one arrow 0 -> 1.
A2 = Quiver(2, ((0, 1),))

#: Two vertices, two parallel arrows 0 -> 1.
KRONECKER = Quiver(2, ((0, 1), (0, 1)))


def a2_m_rep(p: int = 2) -> QuiverRep:
    """The A2 representation F -> F with the identity map."""
    return QuiverRep(A2, p, (1, 1), (((1,),),))


def a2_s_rep(p: int = 2) -> QuiverRep:
    """The simple at the sink vertex."""
    # the arrow matrix has shape (1, 0): one empty row
    return QuiverRep(A2, p, (0, 1), (((),),))


#: r = 0 preset: a_0 = -d_2, b_0 = d_1 + d_2.
CP_A2_0 = ChargePreset(
    "CP-A2-0",
    alpha=((F(0), F(-1)),),
    beta=((F(1), F(1)),),
).validate()

#: r = 1 preset: a_1 = 0, b_1 = d_1 + d_2, a_0 = -d_2, b_0 = d_1.
CP_A2_1 = ChargePreset(
    "CP-A2-1",
    alpha=((F(0), F(-1)), (F(0), F(0))),
    beta=((F(1), F(0)), (F(1), F(1))),
).validate()

#: r = 1 preset with a nontrivial abelianizer: the level-1 charge
#: i*d_1 vanishes exactly on representations supported at the sink.
CP_2V_NIL = ChargePreset(
    "CP-2V-NIL",
    alpha=((F(0), F(-1)), (F(0), F(0))),
    beta=((F(0), F(0)), (F(1), F(0))),
).validate()

#: r = 1 preset whose level-1 simple slopes t and 1 cross at t = 1.
CP_2V_WALL = ChargePreset(
    "CP-2V-WALL",
    alpha=((F(0), F(0)), (F(-1), F(0))),
    beta=((F(0), F(1)), (F(1), F(1))),
).validate()

PRESETS = {p.name: p for p in (CP_A2_0, CP_A2_1, CP_2V_NIL, CP_2V_WALL)}

#: O(1) + O(-1) + a torsion sheaf of length 2.
FIX_P1 = SplitSheaf((1, -1), (("q", 2),))
