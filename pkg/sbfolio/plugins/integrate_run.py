import pyblish.api


class IntegrateRun(pyblish.api.InstancePlugin):
    """Move staged outputs into the registered root

    Outputs land in the root only if every plug-in succeeded. On
    failure the staging directory is removed, leaving the root
    untouched.

    Schema:
        The root receives the outputs of the command and a
        metadata.json describing the run.
         ____________________
        |                    |
        | root               |
        |  ________________  |
        | |                | |
        | | metadata.json  | |
        | |________________| |
        | |                | |
        | | frontier.csv   | |
        | |________________| |
        | |                | |
        | | ...            | |
        | |________________| |
        |____________________|

    """

    label = "Run"
    order = pyblish.api.IntegratorOrder
    families = [
        "sbfolio.sweep",
        "sbfolio.trajectory",
        "sbfolio.verify",
        "sbfolio.benchmark",
        "sbfolio.trace",
        "sbfolio.market",
    ]

    def process(self, instance):
        import os
        import json
        import shutil
        from sbfolio import api

        context = instance.context
        stagingdir = instance.data.get("stagingDir")
        root = api.registered_root()

        # Atomicity
        #
        # Either every output of the run reaches the root, or none.
        #
        if not all(result["success"] for result in context.data["results"]):
            if stagingdir:
                shutil.rmtree(stagingdir, ignore_errors=True)
                api.remove_empty_parents(stagingdir, root)
            raise Exception("Atomicity not held, aborting.")

        assert stagingdir, (
            "Incomplete instance \"%s\": "
            "Missing reference to staging area."
            % instance
        )

        metadata = api.run_metadata(instance)
        fname = os.path.join(stagingdir, "metadata.json")

        with open(fname, "w") as f:
            json.dump(metadata, f, indent=4, sort_keys=True)

        # Metadata is written before being validated, such that
        # a failure can be inspected from within the staging area.
        api.schema.validate(metadata, "run")

        api.makedirs(root)
        for filename in metadata["files"] + ["metadata.json"]:
            os.replace(os.path.join(stagingdir, filename),
                       os.path.join(root, filename))

        shutil.rmtree(stagingdir)
        api.remove_empty_parents(stagingdir, root)

        self.log.info("Successfully integrated \"%s\" to \"%s\"" % (
            instance, root))
