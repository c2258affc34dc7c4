#!/usr/bin/env python3
"""Elaborates structural Verilog files with slang under `default_nettype none.

Exit status is nonzero if any diagnostic (warning or error) is reported, or
if a negative control with an undeclared net is accepted.

    lint_verilog.py FILE.v...
    lint_verilog.py --gpa PATH/TO/gpa FILE.bench...

The second form emits every technique, in combined and shadow-only mode, for
each .bench file and lints the results.
"""

import argparse
import subprocess
import sys
import tempfile
from pathlib import Path

import pyslang
from pyslang import ast, syntax


def diagnostics(text):
    tree = syntax.SyntaxTree.fromText("`default_nettype none\n" + text)
    comp = ast.Compilation()
    comp.addSyntaxTree(tree)
    diags = comp.getAllDiagnostics()
    return len(diags), pyslang.DiagnosticEngine.reportAll(comp.sourceManager, diags)


TECHNIQUES = ["imprecise-ift", "precise-ift", "xprop", "imprecise-fpa", "precise-fpa"]


def emit_all(gpa, benches, outdir):
    paths = []
    for bench in benches:
        for tech in TECHNIQUES:
            for extra in ([], ["--shadow-only"]):
                out = Path(outdir) / f"{Path(bench).stem}.{tech}{'.shadow' if extra else ''}.v"
                subprocess.run([gpa, "instrument", bench, "--tech", tech, "--format", "verilog", "-o", str(out)]
                               + extra, check=True, stdout=subprocess.DEVNULL)
                paths.append(str(out))
    return paths


def lint(paths):
    bad_count, _ = diagnostics("module m(a); input wire a; nand g(o, a, b); endmodule\n")
    if bad_count == 0:
        print("negative control was accepted")
        return 1
    status = 0
    for path in paths:
        with open(path) as f:
            count, report = diagnostics(f.read())
        print(f"{path}: {count} diagnostic(s)")
        if count:
            print(report)
            status = 1
    return status


def main(argv):
    parser = argparse.ArgumentParser()
    parser.add_argument("--gpa", help="gpa executable; inputs are then .bench files to instrument")
    parser.add_argument("files", nargs="+")
    args = parser.parse_args(argv)
    if not args.gpa:
        return lint(args.files)
    with tempfile.TemporaryDirectory() as outdir:
        return lint(emit_all(args.gpa, args.files, outdir))


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
