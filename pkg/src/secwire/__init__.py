"""Individual-sequence coding for degraded wiretap channels.

The package bundles incremental-parsing complexity measures, converse
bounds built from them, secrecy-capacity optimization with certified
gaps, a finite-state encoder/channel/decoder simulator with exact
leakage accounting, random binning codes, and a feedback binning
scheme, plus a CLI that exposes all of it deterministically.
"""

from .bounds import (
    BoundParams,
    BoundReport,
    delta_eps,
    eta_n,
    theorem1_bound,
    theorem2_bound,
    theorem3_bound,
    zeta_n,
)
from .channels import (
    ChannelTriple,
    TransitionMatrix,
    bsc,
    cascade,
    channel_from_rows,
    dump_channel,
    identity_channel,
    load_channel,
    sample,
)
from .errors import BudgetError, InfeasibleError, ValidationError
from .feedback_binning import (
    BinAssignment,
    CodedTransport,
    IdealTransport,
    SessionTranscript,
    assign_bins,
    list_decode_step,
    run_session,
)
from .fsm_codec import (
    DecoderSpec,
    LeakageReport,
    SideInfoDecoderSpec,
    SideInfoEncoderSpec,
    SimulationStats,
    StochasticEncoderSpec,
    conditional_leakage,
    decode_stream,
    dump_fsm,
    encode_stream,
    induced_security_channel,
    load_fsm,
    max_conditional_leakage,
    max_mi_security,
    simulate_system,
    sweep_initial_states,
)
from .info_measures import (
    CapacityResult,
    GammaCurve,
    channel_capacity,
    conditional_mutual_information,
    entropy,
    gamma,
    gamma_curve,
    mutual_information,
    mutual_information_from_joint,
    secrecy_capacity,
    secrecy_capacity_oracle,
    secrecy_rate,
)
from .parsing import (
    JointPhraseParse,
    PhraseParse,
    conditional_lz_complexity,
    empirical_block_entropy,
    entropy_vs_lz_margin,
    incremental_parse,
    joint_parse,
    lz_complexity,
    prefix_phrase_counts,
)
from .sequences import (
    Alphabet,
    SymbolSequence,
    dump_sequence,
    load_sequence,
    sequence_from_array,
)
from .wyner_binning import (
    AuditReport,
    DecodeErrorEstimate,
    WynerCode,
    build_code,
    code_leakage,
    ml_decode,
    monte_carlo_error,
    randomness_audit,
    separation_plan,
    wyner_encode,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "AuditReport",
    "BinAssignment",
    "BoundParams",
    "BoundReport",
    "BudgetError",
    "CapacityResult",
    "ChannelTriple",
    "CodedTransport",
    "DecodeErrorEstimate",
    "DecoderSpec",
    "GammaCurve",
    "IdealTransport",
    "InfeasibleError",
    "LeakageReport",
    "SessionTranscript",
    "SideInfoDecoderSpec",
    "SideInfoEncoderSpec",
    "SimulationStats",
    "StochasticEncoderSpec",
    "SymbolSequence",
    "TransitionMatrix",
    "ValidationError",
    "WynerCode",
    "assign_bins",
    "bsc",
    "build_code",
    "cascade",
    "channel_capacity",
    "channel_from_rows",
    "code_leakage",
    "conditional_leakage",
    "conditional_lz_complexity",
    "conditional_mutual_information",
    "decode_stream",
    "delta_eps",
    "dump_channel",
    "dump_fsm",
    "dump_sequence",
    "empirical_block_entropy",
    "encode_stream",
    "entropy",
    "entropy_vs_lz_margin",
    "eta_n",
    "gamma",
    "gamma_curve",
    "identity_channel",
    "incremental_parse",
    "induced_security_channel",
    "joint_parse",
    "list_decode_step",
    "load_channel",
    "load_fsm",
    "load_sequence",
    "lz_complexity",
    "max_conditional_leakage",
    "max_mi_security",
    "ml_decode",
    "monte_carlo_error",
    "mutual_information",
    "mutual_information_from_joint",
    "prefix_phrase_counts",
    "randomness_audit",
    "run_session",
    "secrecy_capacity",
    "secrecy_capacity_oracle",
    "secrecy_rate",
    "separation_plan",
    "sequence_from_array",
    "simulate_system",
    "sweep_initial_states",
    "theorem1_bound",
    "theorem2_bound",
    "theorem3_bound",
    "wyner_encode",
    "zeta_n",
]
