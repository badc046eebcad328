import pyblish.api


class CollectExperiment(pyblish.api.ContextPlugin):
    """Resolve the configuration of the experiment being run

    The configuration is read from context.data["configSource"], a path,
    preset name or dictionary, and merged with the environment and any
    registered overrides. One instance is created per experiment, its
    family naming the command.

    Families:
        sbfolio.sweep: Efficient frontier over a grid of gammas
        sbfolio.trajectory: One trading trajectory
        sbfolio.verify: Solver against exact references
        sbfolio.benchmark: Timing of growing instances
        sbfolio.trace: Evolution of a single solve
        sbfolio.market: Synthetic market scenario

    """

    label = "Experiment"
    order = pyblish.api.CollectorOrder

    def process(self, context):
        from sbfolio import api

        source = context.data.get("configSource")
        assert source, "Missing configuration, see api.publish()"

        config = api.resolve_config(source, api.registered_overrides())

        instance = context.create_instance(config["name"])
        instance.data["family"] = api.FAMILIES[config["command"]]
        instance.data["config"] = config

        self.log.info("Found: \"%s\" (%s)" % (config["name"],
                                              config["command"]))
