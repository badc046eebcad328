import pyblish.api


class ExtractFrontier(pyblish.api.InstancePlugin):
    """Solve a gamma sweep and write the frontier"""

    label = "Frontier"
    order = pyblish.api.ExtractorOrder
    families = ["sbfolio.sweep"]

    def process(self, instance):
        from sbfolio import api

        self.log.info("Running \"%s\".." % instance)
        dirname = api.stage(instance, api.cmd_sweep_gamma)

        self.log.info("Extracted {instance} to {dirname}".format(**locals()))
