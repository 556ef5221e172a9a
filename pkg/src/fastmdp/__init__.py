"""FastMDP pursuit/evasion simulator.

Aircraft fly a pseudo-6DOF point-mass model and pick actions by projecting
every candidate 1 s ahead and scoring the end state on a closed-form value
surface built from decaying reward peaks and bounded risk wells.
"""

from .dynamics import (
    AircraftState,
    ActionTable,
    ControlAction,
    DegenerateStateError,
    PerformanceLimits,
    StateDerivative,
    derivatives,
    enumerate_actions,
    forward_project,
    integrate_step,
    reachable_states,
)
from .engagement import (
    ConfigError,
    EngagementEvent,
    EpisodeResult,
    ScenarioConfig,
    WorldState,
    check_capture,
    run_episode,
    spawn_world,
    step,
)
from .metrics import TrialSummary, p_survive, p_win, timing_summary
from .rewards import (
    AircraftSnapshot,
    RewardPeak,
    TerrainConfig,
    altitude_penalty,
    build_opponent_peaks,
    build_teammate_peaks,
)
from .solver import DecisionRecord, FastMDPPolicy, ValueBreakdown, select_action, value_at

__version__ = "0.1.0"
