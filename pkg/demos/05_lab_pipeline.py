"""The experiment harness end to end.

Writes a spec file, runs it through the command line, reads back the CSV
and applies one operator to a generated field file.
"""

import csv
import os
import tempfile

from maxharm.lab.cli import main

with tempfile.TemporaryDirectory() as tmp:
    spec = os.path.join(tmp, "maximal.ini")
    with open(spec, "w") as fh:
        fh.write(
            "[experiment]\n"
            "name = maximal_q\n"
            "inequality = maximal1\n"
            "generator = indicator\n"
            "seed = 7\n"
            "count = 4\n"
            "shape = 64,64\n"
            "refine_shape = 128,128\n"
            "ladder = 1.125, 1.5, 2, 4\n"
            "\n[generator]\nmax_side = 0.1\n"
        )
    print("$ maxharm run maximal.ini")
    code = main(["run", spec, "--out", os.path.join(tmp, "out")])
    print("exit code", code)
    with open(os.path.join(tmp, "out", "maximal_q.csv")) as fh:
        rows = list(csv.DictReader(fh))
    print(f"{len(rows)} CSV rows; first: {rows[0]}")

    print("\n$ maxharm gen bump --count 1 ; maxharm op max_sharp")
    main(["gen", "bump", "--count", "1", "--shape", "64,64", "--out", tmp])
    code = main(["op", "max_sharp", "--in", os.path.join(tmp, "bump_0000.mhf"), "--out", os.path.join(tmp, "s.mhf")])
    print("exit code", code)

    print("\n$ maxharm verify --only plumbing")
    print("exit code", main(["verify", "--only", "plumbing"]))
