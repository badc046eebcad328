import pyblish.api


class ValidateConfig(pyblish.api.InstancePlugin):
    """Configuration matches the experiment schema and its command"""

    label = "Configuration"
    order = pyblish.api.ValidatorOrder
    families = [
        "sbfolio.sweep",
        "sbfolio.trajectory",
        "sbfolio.verify",
        "sbfolio.benchmark",
        "sbfolio.trace",
        "sbfolio.market",
    ]

    def process(self, instance):
        from sbfolio import api

        config = instance.data["config"]

        self.log.info("Validating \"%s\".." % instance)
        api.schema.validate(config, "experiment")
        api.check_config(config)
