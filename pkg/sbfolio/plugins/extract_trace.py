import pyblish.api


class ExtractTrace(pyblish.api.InstancePlugin):
    """Record the evolution of a single solve"""

    label = "Trace"
    order = pyblish.api.ExtractorOrder
    families = ["sbfolio.trace"]

    def process(self, instance):
        from sbfolio import api

        self.log.info("Running \"%s\".." % instance)
        dirname = api.stage(instance, api.cmd_trace)

        self.log.info("Extracted {instance} to {dirname}".format(**locals()))
