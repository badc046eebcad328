import pyblish.api


class ExtractMarket(pyblish.api.InstancePlugin):
    """Write the configured market scenario"""

    label = "Market"
    order = pyblish.api.ExtractorOrder
    families = ["sbfolio.market"]

    def process(self, instance):
        from sbfolio import api

        self.log.info("Running \"%s\".." % instance)
        dirname = api.stage(instance, api.cmd_generate_market)

        self.log.info("Extracted {instance} to {dirname}".format(**locals()))
