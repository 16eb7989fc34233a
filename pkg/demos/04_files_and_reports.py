"""File formats and the command line.

Round-trips the text formats under demos/data and drives a few subcommands
in-process, the same entry point the `ramseykit` console script uses.
"""

import json
import pathlib
import tempfile

import ramseykit as rk
from ramseykit import io as rio
from ramseykit.cli import main

DATA = pathlib.Path(__file__).resolve().parent / "data"

print("== text formats ==")
chain6 = rio.parse_structure((DATA / "chain6.struct").read_text())
print(f"chain6.struct parses to {chain6!r}")
print(f"serialize(parse(.)) is byte-identical: "
      f"{rio.serialize_structure(chain6) == (DATA / 'chain6.struct').read_text()}")

seq = rio.parse_sequence((DATA / "growing.seq").read_text())
print(f"growing.seq: prefix {seq.prefix_len}, factor(9) has size "
      f"{seq.factor(9).size}")

phi = rio.parse_formula((DATA / "pair_exists.qf").read_text())
print(f"pair_exists.qf -> {rio.format_formula(phi)}")

print()
print("== the command line, in process ==")
with tempfile.TemporaryDirectory() as tmp:
    report = pathlib.Path(tmp) / "run.json"
    code = main(["arrow-check",
                 "--ambient", str(DATA / "chain6.struct"),
                 "--big", str(DATA / "chain3.struct"),
                 "--small", str(DATA / "chain2.struct"),
                 "-k", "2", "-l", "1", "--report", str(report)])
    print(f"arrow-check exit code: {code}")
    payload = json.loads(report.read_text())
    print(f"report: holds={payload['result']['holds']} "
          f"nodes={payload['result']['nodes_explored']} "
          f"inputs hashed: {len(payload['inputs'])}")

    witness = pathlib.Path(tmp) / "witness.col"
    code = main(["arrow-check",
                 "--ambient", str(DATA / "chain5.struct"),
                 "--big", str(DATA / "chain3.struct"),
                 "--small", str(DATA / "chain2.struct"),
                 "-k", "2", "-l", "1", "--witness", str(witness)])
    print(f"5-chain instance exit code: {code} (1 = arrow fails)")
    parsed = rio.parse_coloring(witness.read_text(), rk.chain(5), rk.chain(2))
    print(f"witness coloring uses {len(set(parsed.assignments))} colors on "
          f"{len(parsed.copies)} pairs")

    code = main(["devlin-enumerate", "-n", "3"])
    print(f"devlin-enumerate exit code: {code}")
