"""Public API

Anything that is not defined here is **internal** and
unreliable for external use.

Motivation for api.py:
    Storing the API in a module, as opposed to in __init__.py, enables
    use of it internally.

    For example, from the plug-ins:
        >> from sbfolio import api
        >> api.stage(instance, api.cmd_trace)

    The important bit is avoiding circular dependencies, where api.py
    is calling upon a module which in turn calls upon api.py.

"""

import logging

from . import schema

from .ising import (
    MAX_ENUMERATION,
    IsingProblem,
    energy,
    total_energy,
    from_qubo,
    random_problem,
    brute_force_ground_state,
)

from .solver import (
    SBParams,
    OscillatorState,
    SolveResult,
    pump_schedule,
    a_of_p,
    evolve,
    evolve_full,
    read_spins,
    local_descent,
    classical_hamiltonian,
    solve,
    trace_frame,
)

from .encoding import (
    MarketScenario,
    PortfolioSpec,
    SpinLayout,
    TrajectorySolution,
    build_layout,
    encode,
    decode,
    encode_weights,
    objective,
    objective_of_spins,
)

from .market import (
    MarketConfig,
    generate_scenario,
    add_risk_free,
)

from .oracle import (
    enumerate_best_trajectory,
    random_portfolios,
    per_time_local_optimal,
    sweep_monotonic,
)

from .pipeline import (
    install,
    uninstall,
    is_installed,

    publish,
    errors,

    FAMILIES,
    COMMANDS,

    cmd_sweep_gamma,
    cmd_trajectory,
    cmd_verify,
    cmd_benchmark,
    cmd_trace,
    cmd_generate_market,

    env_overrides,
    resolve_config,
    check_config,
    scenario_of,
    spec_of,
    params_of,
    list_presets,
    find_preset,

    stage,
    run_metadata,

    register_root,
    register_presets_path,
    register_override,
    register_plugins,

    registered_root,
    registered_presets_paths,
    registered_overrides,

    deregister_plugins,
    deregister_presets_path,
    deregister_override,
)

from .lib import (
    format_staging_dir,
    remove_empty_parents,
    makedirs,

    time,
)

logging.basicConfig()

__all__ = [
    "install",
    "uninstall",
    "is_installed",

    "schema",

    "MAX_ENUMERATION",
    "IsingProblem",
    "energy",
    "total_energy",
    "from_qubo",
    "random_problem",
    "brute_force_ground_state",

    "SBParams",
    "OscillatorState",
    "SolveResult",
    "pump_schedule",
    "a_of_p",
    "evolve",
    "evolve_full",
    "read_spins",
    "local_descent",
    "classical_hamiltonian",
    "solve",
    "trace_frame",

    "MarketScenario",
    "PortfolioSpec",
    "SpinLayout",
    "TrajectorySolution",
    "build_layout",
    "encode",
    "decode",
    "encode_weights",
    "objective",
    "objective_of_spins",

    "MarketConfig",
    "generate_scenario",
    "add_risk_free",

    "enumerate_best_trajectory",
    "random_portfolios",
    "per_time_local_optimal",
    "sweep_monotonic",

    "publish",
    "errors",

    "FAMILIES",
    "COMMANDS",

    "cmd_sweep_gamma",
    "cmd_trajectory",
    "cmd_verify",
    "cmd_benchmark",
    "cmd_trace",
    "cmd_generate_market",

    "env_overrides",
    "resolve_config",
    "check_config",
    "scenario_of",
    "spec_of",
    "params_of",
    "list_presets",
    "find_preset",

    "stage",
    "run_metadata",

    "register_root",
    "register_presets_path",
    "register_override",
    "register_plugins",

    "registered_root",
    "registered_presets_paths",
    "registered_overrides",

    "deregister_plugins",
    "deregister_presets_path",
    "deregister_override",

    "format_staging_dir",
    "remove_empty_parents",
    "makedirs",

    "time",
]
