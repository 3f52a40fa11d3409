"""Orbital pursuit-evasion: scenarios, environment, pilots, datasets, evaluation."""

from ._core import (
    DEGREE,
    BodyConstants,
    DomainError,
    Environment,
    EpisodeFinishedError,
    EpisodeLog,
    Error,
    FormatError,
    GenerationFailure,
    IoError,
    Observation,
    OrbitalElements,
    Scenario,
    ScenarioConstraints,
    StateVector,
    StepResult,
    ThrottleVector,
    action_to_throttle,
    build_dataset,
    elements_to_state,
    evaluate,
    generate_batch,
    initial_separation,
    navball_decide,
    orbital_period,
    propagate_coast,
    propagate_thrusted,
    run_episode,
    sample_scenario,
    solve_kepler,
    specific_energy,
    state_to_elements,
    verify_constraints,
)

__version__ = "0.1.0"
