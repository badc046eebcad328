import pyblish.api


class ExtractBenchmark(pyblish.api.InstancePlugin):
    """Time the solver over growing instances"""

    label = "Benchmark"
    order = pyblish.api.ExtractorOrder
    families = ["sbfolio.benchmark"]

    def process(self, instance):
        from sbfolio import api

        self.log.info("Running \"%s\".." % instance)
        dirname = api.stage(instance, api.cmd_benchmark)

        self.log.info("Extracted {instance} to {dirname}".format(**locals()))
