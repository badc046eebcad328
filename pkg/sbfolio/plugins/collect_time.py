import pyblish.api


class CollectTime(pyblish.api.ContextPlugin):
    """Store global time at the time of the run"""

    label = "Time"
    order = pyblish.api.CollectorOrder

    def process(self, context):
        from sbfolio import api
        context.data["time"] = api.time()
