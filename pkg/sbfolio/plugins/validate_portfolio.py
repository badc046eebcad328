import pyblish.api


class ValidatePortfolio(pyblish.api.InstancePlugin):
    """Scenario and portfolio fit the command

    - Frontier sweeps are single-period
    - Trajectories span at least two periods
    - Exhaustive verification stays within the enumeration bound

    """

    label = "Portfolio"
    order = pyblish.api.ValidatorOrder + 0.1
    families = [
        "sbfolio.sweep",
        "sbfolio.trajectory",
        "sbfolio.verify",
        "sbfolio.trace",
    ]

    def process(self, instance):
        from sbfolio import api

        config = instance.data["config"]
        command = config["command"]

        if "scenario" in config:
            scenario = api.MarketScenario.load(config["scenario"])
            horizon, n_assets = scenario.horizon, scenario.n_assets
        else:
            horizon = config["market"]["horizon"]
            n_assets = config["market"]["n_assets"]

        spec = api.spec_of(config)
        spins = n_assets * spec.bits_per_asset * horizon

        # Raises on a cost matrix of the wrong shape
        spec.costs(n_assets, horizon)

        if command == "sweep-gamma":
            assert horizon == 1, (
                "A frontier sweep is single-period, got %d periods"
                % horizon)

        if command == "trajectory" or config.get("mode") == "c-sweep":
            assert horizon >= 2, (
                "A trajectory needs at least 2 periods, got %d" % horizon)

        if command == "verify" and config.get("mode",
                                              "exhaustive") == "exhaustive":
            assert spins <= api.MAX_ENUMERATION, (
                "%d spins cannot be enumerated, the bound is %d"
                % (spins, api.MAX_ENUMERATION))

        self.log.info("%d assets x %d periods, %d spins"
                      % (n_assets, horizon, spins))
