"""Validates emitted program documents against docs/program.schema.json."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def main() -> int:
    cli, source = sys.argv[1], Path(sys.argv[2])
    schema = json.loads((source / "docs" / "program.schema.json").read_text())
    validator = jsonschema.Draft202012Validator(schema)

    docs = {"fixtures/example.json": json.loads((source / "fixtures" / "example.json").read_text())}
    for fixture in ["fixtures/example.2cm", "fixtures/example.json"]:
        out = subprocess.run([cli, "convert", str(source / fixture), "--to", "json"],
                             check=True, capture_output=True, text=True).stdout
        docs["convert " + fixture] = json.loads(out)

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([cli, "compile", str(source / "fixtures" / "example.2cm"), "--approach", "tx",
                        "--param-mode", "--out-dir", tmp], check=True, capture_output=True)
        docs["tx.params.json"] = json.loads((Path(tmp) / "example.tx.params.json").read_text())["program"]
        for tm in ["immediate_halt", "right_move", "unary_successor"]:
            out_file = Path(tmp) / f"{tm}.2cm"
            subprocess.run([cli, "reduce-tm", str(source / "fixtures" / f"tm_{tm}.json"), "--out", str(out_file)],
                           check=True, capture_output=True)
            out = subprocess.run([cli, "convert", str(out_file), "--to", "json"],
                                 check=True, capture_output=True, text=True).stdout
            docs["reduce-tm " + tm] = json.loads(out)

    failed = 0
    for name, doc in docs.items():
        errors = list(validator.iter_errors(doc))
        print(("ok   " if not errors else "FAIL ") + name)
        for e in errors[:3]:
            print("     ", e.message)
        failed += bool(errors)

    # The schema itself must reject a malformed entry.
    bad = [{"state": 0, "op": "INC", "counter": "C", "next": 0}]
    if validator.is_valid(bad):
        print("FAIL schema accepted an unknown counter")
        failed += 1
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
