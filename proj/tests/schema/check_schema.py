"""Checks docs/config.schema.json against the example configs and against the
fully resolved configuration that the CLI writes into manifest.json.

usage: python3 check_schema.py EFFEQ_BINARY DOCS_DIR
"""
import glob
import json
import os
import subprocess
import sys
import tempfile

import jsonschema


def main(binary, docs):
    schema = json.load(open(os.path.join(docs, "config.schema.json")))
    jsonschema.Draft202012Validator.check_schema(schema)
    for path in sorted(glob.glob(os.path.join(docs, "examples", "*.json"))):
        jsonschema.validate(json.load(open(path)), schema)
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "run")
        subprocess.run([binary, "resonances", "--out", out], check=True)
        resolved = json.load(open(os.path.join(out, "manifest.json")))["config"]
        jsonschema.validate(resolved, schema)
        # Fields the parser knows must all be in the schema (additionalProperties is false).
        bad = dict(resolved, numeric=dict(resolved["numeric"], cutoff="three"))
        try:
            jsonschema.validate(bad, schema)
        except jsonschema.ValidationError:
            pass
        else:
            raise SystemExit("schema accepted a string cutoff")
    print("schema ok")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
