"""Group key establishment protocols over a simulated broadcast channel,
with insider attacks that split the group key while confirmation passes."""

from .attacks import (
    AttackPlan,
    forge_q_chh,
    forge_q_prod,
    forge_q_sum,
    forge_q_sum_literal,
    plan_for,
    run_attack,
    run_stage3_attack,
    run_stage4_masquerade,
)
from .errors import (
    ArityError,
    AuthError,
    ConfigError,
    DomainError,
    GKALabError,
    LengthMismatch,
    NonInvertible,
    ParamError,
    PolicyError,
    SelfKeyError,
)
from .gfpoly import BiPoly, Poly, bipoly_eval_partial, fe_encode, fe_inv, poly_eval, xor_bytes
from .netsim import ChannelPolicy, Envelope, Network, Rule
from .protocol import GroupRoster, Participant, Stage, Variant, combine_key
from .report import RunReport
from .scheme import SchemeParams, Token, derive_pairwise_key, mrc_setup
from .session import Session

__version__ = "0.1.0"
