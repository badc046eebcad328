import pyblish.api


class ExtractVerification(pyblish.api.InstancePlugin):
    """Compare the solver with exact references"""

    label = "Verification"
    order = pyblish.api.ExtractorOrder
    families = ["sbfolio.verify"]

    def process(self, instance):
        from sbfolio import api

        self.log.info("Running \"%s\".." % instance)
        dirname = api.stage(instance, api.cmd_verify)

        self.log.info("Extracted {instance} to {dirname}".format(**locals()))
