"""
The JSON command line
=====================

Generate an instance, decompose it with verification, store both
documents and re-check the stored decomposition. The same steps from a
shell::

    lipext gen --n 4 --seed 3 > inst.json
    lipext decompose inst.json --verify > dec.json
    lipext verify inst.json dec.json
"""

import io
import json
import os
import tempfile

from lipext.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, json.loads(out.getvalue())


with tempfile.TemporaryDirectory() as tmp:
    inst, dec = os.path.join(tmp, "inst.json"), os.path.join(tmp, "dec.json")

    code, doc = run("gen", "--n", "4", "--seed", "3")
    json.dump(doc, open(inst, "w"))
    print("gen exit", code)

    code, doc = run("decompose", inst, "--verify")
    json.dump(doc, open(dec, "w"))
    print("decompose exit", code, "k =", doc["k"], "weights", [a["weight"] for a in doc["atoms"]])

    code, report = run("verify", inst, dec)
    print("verify exit", code, "passed:", report["passed"])

    # %%
    # Nudging one weight breaks the weight sum and verification exits 5.
    doc["atoms"][0]["weight"] += 1e-3
    json.dump(doc, open(dec, "w"))
    code, report = run("verify", inst, dec)
    print("tampered verify exit", code, [k for k, ok in report["checks"].items() if not ok])
