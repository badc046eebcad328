import pyblish.api


class ExtractTrajectory(pyblish.api.InstancePlugin):
    """Solve a trading trajectory and write its decomposition"""

    label = "Trajectory"
    order = pyblish.api.ExtractorOrder
    families = ["sbfolio.trajectory"]

    def process(self, instance):
        from sbfolio import api

        self.log.info("Running \"%s\".." % instance)
        dirname = api.stage(instance, api.cmd_trajectory)

        self.log.info("Extracted {instance} to {dirname}".format(**locals()))
