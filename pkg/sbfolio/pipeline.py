"""Experiments as publishing pipelines

An experiment is one JSON document naming a command and its inputs.
Running it means publishing it with pyblish: a collector resolves the
configuration, validators check it, an extractor per command writes
its outputs into a staging directory and an integrator moves them into
the registered root, provided nothing failed along the way.

Every command is also available as a plain function, cmd_*, taking a
resolved configuration and a directory and returning the files written.

"""

import os
import sys
import json
import logging

import numpy
import pandas

from pyblish import api
import pyblish.util

from . import lib, schema, ising, solver, oracle, version
from .encoding import (
    MarketScenario,
    PortfolioSpec,
    encode,
    objective,
    build_layout,
)
from .market import MarketConfig, generate_scenario

from . import (
    _registered_presets_paths,
    _registered_root,
    _registered_overrides,
)

self = sys.modules[__name__]

self.log = logging.getLogger("sbfolio")
self._is_installed = False

ENV_PREFIX = "SBFOLIO_"

# Environment variables and the configuration key they override
_ENV_OVERRIDES = {
    "SEED": "seed",
    "RESTARTS": "restarts",
    "THREADS": "threads",
}

DEFAULTS = {
    "seed": 0,
    "restarts": 10,
    "threads": 1,
    "cloud": 0,
    "repeats": 10,
    "polish": False,
}

FAMILIES = {
    "sweep-gamma": "sbfolio.sweep",
    "trajectory": "sbfolio.trajectory",
    "verify": "sbfolio.verify",
    "benchmark": "sbfolio.benchmark",
    "trace": "sbfolio.trace",
    "generate-market": "sbfolio.market",
}

# Values closer than this count as the same trajectory value
VALUE_TOLERANCE = 1e-9


def install():
    """Install sbfolio into the running Python session

    Registers the accompanying plug-ins and presets, and the output
    root of $SBFOLIO_OUT, defaulting to ./results

    """

    register_plugins()
    register_presets_path(_default_presets_path())
    register_root(os.getenv(ENV_PREFIX + "OUT",
                            os.path.join(os.getcwd(), "results")))

    self._is_installed = True
    self.log.info("Successfully installed sbfolio")


def uninstall():
    deregister_plugins()
    deregister_presets_path(_default_presets_path())
    _registered_overrides.clear()

    self._is_installed = False
    self.log.info("Successfully uninstalled sbfolio")


def is_installed():
    """Return state of installation

    Returns:
        True if installed, False otherwise

    """

    return self._is_installed


def _package_path():
    return os.path.dirname(sys.modules[__name__].__file__)


def _default_presets_path():
    return os.path.join(_package_path(), "presets")


def register_plugins():
    """Register accompanying plugins"""
    api.register_plugin_path(os.path.join(_package_path(), "plugins"))


def deregister_plugins():
    try:
        api.deregister_plugin_path(os.path.join(_package_path(), "plugins"))
    except ValueError:
        self.log.warning("sbfolio plug-ins not registered.")


def register_root(path):
    """Register directory receiving the outputs of experiments"""
    self.log.info("Registering root: %s" % path)
    _registered_root["_"] = path


def registered_root():
    """Return currently registered root"""
    return _registered_root["_"]


def register_presets_path(path):
    path = os.path.normpath(path)
    _registered_presets_paths.add(path)


def registered_presets_paths():
    return sorted(_registered_presets_paths)


def deregister_presets_path(path):
    _registered_presets_paths.discard(os.path.normpath(path))


def register_override(key, value):
    """Register configuration value taking precedence over all others

    Arguments:
        key (str): Name of configuration key, e.g. "seed"
        value (object): Value replacing that of config file and
            environment

    """

    _registered_overrides[key] = value


def deregister_override(key):
    _registered_overrides.pop(key)


def registered_overrides():
    return _registered_overrides.copy()


def list_presets():
    """Return names of presets across registered paths"""
    names = set()

    for path in registered_presets_paths():
        assert os.path.isdir(path), "%s is not a directory" % path

        for fname in lib.listfiles(path, ".json"):
            names.add(os.path.splitext(fname)[0])

    return sorted(names)


def find_preset(name):
    """Return path of preset `name`

    Raises:
        ValueError if no registered path holds `name`

    """

    for path in registered_presets_paths():
        fname = os.path.join(path, name + ".json")
        if os.path.isfile(fname):
            return fname

    raise ValueError("No preset called \"%s\", available presets:\n- %s"
                     % (name, "\n- ".join(list_presets())))


def load_config(source):
    """Return experiment configuration of a file or preset

    Arguments:
        source (str): Path to a JSON file, or name of a preset

    Raises:
        ValidationError on a document not matching the experiment schema

    """

    fname = source if os.path.isfile(source) else find_preset(source)

    with open(fname) as f:
        config = json.load(f)

    schema.validate(config, "experiment")
    config.setdefault("name", os.path.splitext(os.path.basename(fname))[0])

    return config


def env_overrides(environ=None):
    """Return configuration values given by SBFOLIO_* variables

    Example:
        >>> env_overrides({"SBFOLIO_SEED": "7", "SBFOLIO_THREADS": "x"})
        {'seed': 7}

    """

    environ = os.environ if environ is None else environ
    overrides = dict()

    for suffix, key in sorted(_ENV_OVERRIDES.items()):
        value = environ.get(ENV_PREFIX + suffix)

        if value is None:
            continue

        try:
            overrides[key] = int(value)
        except ValueError:
            self.log.warning("Ignoring %s%s=%r, expected an integer"
                             % (ENV_PREFIX, suffix, value))

    return overrides


def resolve_config(source, overrides=None, environ=None):
    """Return configuration of `source` with every override applied

    Precedence, highest first: `overrides`, environment, `source`,
    :data:`DEFAULTS`.

    Arguments:
        source (str or dict): Path, preset name or configuration
        overrides (dict, optional): Values taking precedence, None
            values are ignored
        environ (dict, optional): Environment, defaults to os.environ

    """

    if isinstance(source, dict):
        config = dict(source)
        schema.validate(config, "experiment")
    else:
        config = load_config(source)

    resolved = dict(DEFAULTS)
    resolved.update(config)
    resolved.update(env_overrides(environ))
    resolved.update((key, value)
                    for key, value in (overrides or {}).items()
                    if value is not None)

    resolved["schema"] = schema.identifier("experiment")
    resolved.setdefault("name", resolved["command"])

    return resolved


def check_config(config):
    """Raise ValueError on a configuration its command cannot run

    Complements the schema with the semantics of each command.

    """

    command = config["command"]

    if command != "benchmark" and not ("market" in config or
                                       "scenario" in config):
        raise ValueError("\"%s\" requires either a market or a scenario"
                         % command)

    if command in ("sweep-gamma", "trajectory", "verify", "benchmark",
                   "trace") and "portfolio" not in config:
        raise ValueError("\"%s\" requires a portfolio" % command)

    if command == "sweep-gamma" and not config.get("gammas"):
        raise ValueError("sweep-gamma requires a non-empty list of gammas")

    if command == "benchmark" and not config.get("sizes"):
        raise ValueError("benchmark requires a non-empty list of sizes")

    if (command == "verify" and config.get("mode") == "c-sweep" and
            not config.get("costs")):
        raise ValueError("c-sweep requires a non-empty list of costs")

    # Constructing each part surfaces its own validation
    if "portfolio" in config:
        spec_of(config)
    if "market" in config:
        market_of(config)
    params_of(config)


def market_of(config):
    data = dict(config["market"])
    data.setdefault("seed", config["seed"])
    return MarketConfig.from_dict(data)


def scenario_of(config):
    """Return scenario loaded from file, or generated from the market"""
    if "scenario" in config:
        return MarketScenario.load(config["scenario"])
    return generate_scenario(market_of(config))


def spec_of(config):
    return PortfolioSpec.from_dict(config["portfolio"])


def params_of(config):
    params = solver.SBParams.from_dict(config.get("params", {}))
    return params.replace(seed=config["seed"])


def _solve(scenario, spec, config, params=None):
    """Return (TrajectorySolution, SolveResult) of best-of-R SB"""
    encoding = encode(scenario, spec)
    result = solver.solve(encoding.problem,
                          params or params_of(config),
                          restarts=config["restarts"],
                          threads=config["threads"],
                          polish=config["polish"])

    return objective(encoding.decode(result.spins), scenario, spec), result


def _write_json(data, path):
    with open(path, "w") as f:
        json.dump(data, f, indent=4, sort_keys=True)
        f.write("\n")
    return path


def cmd_sweep_gamma(config, dirname):
    """Trace an efficient frontier with one solve per gamma

    Writes frontier.csv, and cloud.csv of random portfolios when
    config["cloud"] is positive.

    """

    scenario = scenario_of(config)
    spec = spec_of(config)
    rows = list()

    for gamma in config["gammas"]:
        solution, result = _solve(scenario, spec.replace(gamma=gamma), config)

        rows.append({
            "gamma": gamma,
            "risk": float(solution.risk_term.sum()),
            "return": float(solution.return_term.sum()),
            "value": solution.total_value,
            "seconds": result.seconds,
            "seed_of_best": result.seed,
        })

        self.log.info("gamma=%g: risk %.6g, return %.6g"
                      % (gamma, rows[-1]["risk"], rows[-1]["return"]))

    files = ["frontier.csv"]
    lib.write_frame(pandas.DataFrame(rows, columns=[
        "gamma", "risk", "return", "value", "seconds", "seed_of_best"]),
        os.path.join(dirname, "frontier.csv"))

    if config["cloud"]:
        cloud = oracle.random_portfolios(scenario, spec, config["cloud"],
                                         seed=config["seed"])
        lib.write_frame(pandas.DataFrame(cloud, columns=["risk", "return"]),
                        os.path.join(dirname, "cloud.csv"))
        files.append("cloud.csv")

    return files


def cmd_trajectory(config, dirname):
    """Solve one trading trajectory

    Writes weights.csv, periods.csv and summary.json, plus universe.csv
    of random trajectories when config["cloud"] is positive.

    """

    scenario = scenario_of(config)
    spec = spec_of(config)
    solution, result = _solve(scenario, spec, config)

    lib.write_frame(solution.to_frame(), os.path.join(dirname, "weights.csv"))
    lib.write_frame(solution.periods_frame(),
                    os.path.join(dirname, "periods.csv"))

    summary = solution.summary()
    summary.update({
        "gamma": spec.gamma,
        "trade_cost": spec.trade_cost,
        "seed_of_best": result.seed,
        "energy": result.energy,
        "diverged": result.diverged,
    })
    _write_json(summary, os.path.join(dirname, "summary.json"))

    files = ["weights.csv", "periods.csv", "summary.json"]

    if config["cloud"]:
        values = oracle.random_portfolios(scenario, spec, config["cloud"],
                                          seed=config["seed"])
        count, horizon = values.shape
        lib.write_frame(pandas.DataFrame({
            "trajectory": numpy.repeat(numpy.arange(count), horizon),
            "t": numpy.tile(numpy.arange(horizon), count),
            "value": values.ravel(),
        }), os.path.join(dirname, "universe.csv"))
        files.append("universe.csv")

    self.log.info("Trajectory value %.6g with %d unit changes"
                  % (solution.total_value, solution.unit_changes))

    return files


def rank_of(value, ranked):
    """Return 1-based rank of `value` among descending `ranked` values

    Example:
        >>> rank_of(2.0, [3.0, 2.0, 1.0])
        2

    """

    ranked = numpy.asarray(ranked)
    return int(numpy.sum(ranked > value + VALUE_TOLERANCE)) + 1


def cmd_verify(config, dirname):
    """Compare the solver against exact references

    In "exhaustive" mode, the default, the best of R restarts is ranked
    among every enumerated trajectory; report.json and values.csv.
    Ranks beyond the kept values are flagged with "rank_capped".
    In "c-sweep" mode the best trajectory is compared with the
    trajectory of independently optimal periods over decreasing trading
    cost; csweep.csv and report.json.

    """

    if config.get("mode", "exhaustive") == "c-sweep":
        return _verify_costs(config, dirname)

    scenario = scenario_of(config)
    spec = spec_of(config)

    best, ranked = oracle.enumerate_best_trajectory(
        scenario, spec, values=True, threads=config["threads"])
    solution, result = _solve(scenario, spec, config)

    gap = best.total_value - solution.total_value
    rank = rank_of(solution.total_value, ranked)
    report = {
        "mode": "exhaustive",
        "match": bool(abs(gap) <= VALUE_TOLERANCE),
        "sb_value": solution.total_value,
        "oracle_value": best.total_value,
        "value_gap": gap,
        "rank": rank,
        "rank_capped": bool(rank > len(ranked)),
        "count": 2 ** build_layout(scenario, spec).total_spins,
        "seed_of_best": result.seed,
        "sb_weights": solution.weights.tolist(),
        "oracle_weights": best.weights.tolist(),
    }

    _write_json(report, os.path.join(dirname, "report.json"))
    lib.write_frame(pandas.DataFrame({"value": ranked}),
                    os.path.join(dirname, "values.csv"))

    self.log.info("Solver ranks %d of %d, gap %.3g"
                  % (report["rank"], report["count"], gap))

    return ["report.json", "values.csv"]


def _verify_costs(config, dirname):
    scenario = scenario_of(config)
    spec = spec_of(config)
    enumerable = (build_layout(scenario, spec).total_spins <=
                  ising.MAX_ENUMERATION)

    rows = list()
    for cost in config["costs"]:
        priced = spec.replace(trade_cost=cost, cost_matrix=None)

        if enumerable:
            best, _ = oracle.enumerate_best_trajectory(
                scenario, priced, threads=config["threads"])
        else:
            best, _ = _solve(scenario, priced, config)

        local = oracle.per_time_local_optimal(
            scenario, priced,
            params=params_of(config),
            restarts=config["restarts"],
            threads=config["threads"])

        rows.append({
            "c": cost,
            "global_value": best.total_value,
            "local_value": local.total_value,
            "gap": abs(best.total_value - local.total_value),
        })

    frame = pandas.DataFrame(rows, columns=[
        "c", "global_value", "local_value", "gap"])
    lib.write_frame(frame, os.path.join(dirname, "csweep.csv"))

    # Gaps ordered by decreasing cost
    ordered = frame.sort_values("c", ascending=False, kind="stable")["gap"]
    gaps = ordered.to_numpy()

    report = {
        "mode": "c-sweep",
        "exact_global": enumerable,
        "non_increasing": bool(numpy.all(
            numpy.diff(gaps) <= VALUE_TOLERANCE)),
        "gap_at_smallest_cost": float(gaps[-1]),
    }
    _write_json(report, os.path.join(dirname, "report.json"))

    return ["csweep.csv", "report.json"]


def cmd_benchmark(config, dirname):
    """Time single solves of growing instances

    Each (n_assets, unit_cap) pair is timed over config["repeats"]
    seeds, without restarts. Writes timing.csv.

    """

    params = params_of(config)
    gamma = config["portfolio"]["gamma"]
    market = dict(config.get("market", {}))
    rows = list()

    for n_assets, unit_cap in config["sizes"]:
        market.update({"n_assets": n_assets, "horizon": 1})
        scenario = generate_scenario(market_of(dict(config, market=market)))
        spec = PortfolioSpec(gamma=gamma, unit_cap=unit_cap)
        problem = encode(scenario, spec).problem

        seconds = [
            solver.evolve(problem, params.replace(seed=params.seed + r))
            .seconds for r in range(config["repeats"])
        ]

        rows.append({
            "n_assets": n_assets,
            "cap": unit_cap,
            "spins": problem.n,
            "mean_seconds": float(numpy.mean(seconds)),
            "std": float(numpy.std(seconds)),
        })

        self.log.info("%d assets, cap %d: %.3fs per solve"
                      % (n_assets, unit_cap, rows[-1]["mean_seconds"]))

    lib.write_frame(pandas.DataFrame(rows, columns=[
        "n_assets", "cap", "spins", "mean_seconds", "std"]),
        os.path.join(dirname, "timing.csv"))

    return ["timing.csv"]


def cmd_trace(config, dirname):
    """Record the evolution of one solve; trace.csv"""
    scenario = scenario_of(config)
    spec = spec_of(config)
    encoding = encode(scenario, spec)

    params = params_of(config).replace(record_trace=True)
    result = solver.evolve(encoding.problem, params,
                           objective=encoding.objective)

    lib.write_frame(solver.trace_frame(result),
                    os.path.join(dirname, "trace.csv"))

    return ["trace.csv"]


def cmd_generate_market(config, dirname):
    """Write the scenario of the configured market; scenario.json"""
    scenario_of(config).dump(os.path.join(dirname, "scenario.json"))
    return ["scenario.json"]


COMMANDS = {
    "sweep-gamma": cmd_sweep_gamma,
    "trajectory": cmd_trajectory,
    "verify": cmd_verify,
    "benchmark": cmd_benchmark,
    "trace": cmd_trace,
    "generate-market": cmd_generate_market,
}


def stage(instance, command):
    """Run `command` on the configuration of `instance` into staging

    Used by extractors, stores the staging directory and files written
    for the integrator.

    """

    context = instance.context
    dirname = lib.format_staging_dir(root=registered_root(),
                                     time=context.data["time"],
                                     name=instance.data["name"])

    # Reference for the integrator, also when `command` fails
    instance.data["stagingDir"] = lib.makedirs(dirname)

    files = command(instance.data["config"], dirname)

    if "files" not in instance.data:
        instance.data["files"] = list()

    instance.data["files"].extend(files)

    return dirname


def run_metadata(instance):
    """Return metadata describing the run of `instance`"""
    return {
        "schema": schema.identifier("run"),
        "name": instance.data["name"],
        "command": instance.data["config"]["command"],
        "time": instance.context.data["time"],
        "version": version.version,
        "files": list(instance.data.get("files", [])),
        "config": instance.data["config"],
    }


def publish(source, context=None):
    """Run the experiment of `source` through the registered plug-ins

    Arguments:
        source (str or dict): Path, preset name or configuration
        context (pyblish.api.Context, optional): Context to publish

    Returns:
        The published context, see :func:`errors`

    """

    assert is_installed(), "sbfolio must be installed, see install()"

    context = context if context is not None else api.Context()
    context.data["configSource"] = source

    pyblish.util.publish(context)

    return context


def errors(context):
    """Return the failed results of a published `context`"""
    return [result for result in context.data.get("results", [])
            if not result["success"]]
