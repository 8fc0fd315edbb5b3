"""Sequential social learning with misspecified beliefs and costly education."""

from .core import (
    Dominance,
    ModeError,
    ModelError,
    ModelParams,
    ScenarioInvalid,
    classify_dominance,
    folded_posterior,
    log_odds,
    posterior_from_llr,
)
from .costs import CostModel, ExponentialCost, LogitCost, UniformCost, cost_model_from_dict
from .decision import (
    Case,
    ValueBreakdown,
    accuracy,
    action_choice,
    early_value_closed_form,
    education_choice,
    flip_probability,
    value_of_education,
)
from .beliefs import (
    IMPERFECT,
    PERFECT,
    BeliefTrack,
    History,
    PeriodRecord,
    educated_increment,
    educated_increment_io,
    replay_beliefs,
    tag_posterior,
    uneducated_increment,
    uneducated_increment_io,
)
from .welfare import (
    FlatSubsidy,
    MyopicSubsidy,
    NoSubsidy,
    TargetBreakSubsidy,
    delta_lower,
    discounted_welfare_mc,
    dynamic_welfare_bound,
    myopic_subsidy,
    static_welfare_gain,
    target_break_subsidy,
)
from .dynamics import (
    SimConfig,
    break_time_experiment,
    detect_incorrect_cascade,
    forced_cascade_prefix,
    simulate_path,
)

__version__ = "0.1.0"
