"""Command-line interface.

Exit codes: 0 success or verified, 1 verified false (witness printed),
2 usage error, 3 capacity error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

import numpy as np

from . import __version__
from .construct import (REGIMES, CffBuild, base_cff_field, build_cff, choose_regime,
                        choose_regime_k, phf_field, size_report)
from .core import DesignParams, read_matrix, verify_cff, write_matrix
from .errors import CapacityError, InvalidParams
from .family import max_members, read_fn_family, write_fn_family
from .grouptest import PoolingDesign, decode, design_tests, simulate
from .hashing import verify_phf
from .separators import (build_min_separating, read_separating, verify_min_separating,
                         write_separating)
from .splitters import splitter_params, verify_splitter

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


def export_tree(result: CffBuild, requested: Optional[dict] = None) -> dict:
    """Machine-readable construction record for a build."""
    rep = result.report
    return {
        "n": rep.n, "r": rep.r, "s": rep.s, "d": rep.d,
        "regime": rep.regime,
        "log_base": rep.log_base,
        "requested": requested or {},
        "effective": rep.params,
        "size": result.family.size,
        "tree_product": rep.tree_product,
        "report": {k: rep.as_dict()[k] for k in ("N_rs", "H2", "lower_bound")},
        "tree": rep.tree,
    }


def _dump(obj, stream):
    json.dump(obj, stream, indent=2, sort_keys=True, default=str)
    stream.write("\n")


def _verdict(v, out) -> int:
    if v:
        print("verified: true", file=out)
        return EXIT_OK
    print("verified: false", file=out)
    print("witness: " + v.witness.describe(), file=out)
    return EXIT_FALSE


# -- subcommands --------------------------------------------------------------------

def cmd_build(a, out):
    res = build_cff(a.n, a.r, a.s, a.regime, a.k, a.phi, a.mode)
    fam = res.family
    requested = {"regime": a.regime, "k": a.k, "phi": a.phi, "mode": a.mode}
    lazy = fam.size > max_members() and fam.descriptor is not None
    with open(a.output, "w") as fh:
        if lazy:
            write_fn_family(fam, fh, materialize=False)
        else:
            write_matrix(fam, a.r, a.s, fh)
    meta = export_tree(res, requested)
    meta["format"] = "fnf-descriptor" if lazy else "cff-matrix"
    with open(a.output + ".json", "w") as fh:
        _dump(meta, fh)
    print(f"wrote {a.output} ({meta['format']}, N={fam.size}, regime={res.report.regime})",
          file=out)
    return EXIT_OK


def _read_header(path):
    with open(path) as fh:
        return fh.readline().split()[0] if fh else ""


def cmd_verify(a, out):
    tag = _read_header(a.file)
    with open(a.file) as fh:
        if tag == "CFF":
            fam, r, s = read_matrix(fh)
            r = a.r if a.r is not None else r
            s = a.s if a.s is not None else s
            return _verdict(verify_cff(fam, r, s), out)
        if tag == "SEP":
            fam, t, k = read_separating(fh)
            return _verdict(verify_min_separating(fam, t, k), out)
        if tag == "FNF":
            fam = read_fn_family(fh)
            if a.phf is not None:
                return _verdict(verify_phf(fam, a.phf), out)
            if a.splitter is not None:
                return _verdict(verify_splitter(fam, a.splitter[0], a.splitter[1]), out)
            if fam.q == 2 and a.r is not None and a.s is not None:
                return _verdict(verify_cff(fam, a.r, a.s), out)
            side = a.file + ".json"
            if fam.q == 2 and os.path.exists(side):
                with open(side) as sh:
                    meta = json.load(sh)
                return _verdict(verify_cff(fam, meta["r"], meta["s"]), out)
            raise InvalidParams("FNF files need --phf D, --splitter R K, or -r/-s")
    raise InvalidParams(f"unrecognized file header {tag!r}")


def cmd_stats(a, out):
    p = DesignParams(a.n, a.r, a.s)
    r, s = min(a.r, a.s), max(a.r, a.s)
    regime, k = choose_regime(r, s, a.phi)
    regime = a.regime or regime
    params = {"normalized_r": r, "normalized_s": s}
    if regime == "base":
        params.update(q_phf=phf_field(p.d), q_base=base_cff_field(r, s))
    else:
        k = a.k or choose_regime_k(r, s, regime, a.phi)
        sp = splitter_params(r, k)
        params.update(k_requested=k, k_effective=sp.k_eff, z=sp.z, z_effective=sp.z_eff,
                      log2_sigma=sp.log2_sigma)
    if p.swapped:
        regime = "complement+" + regime
    rep = size_report(a.n, a.r, a.s, regime=regime, params=params)
    if a.json:
        _dump(rep.as_dict(), out)
    else:
        print("\n".join(rep.lines()), file=out)
    return EXIT_OK


def _read_design(path) -> PoolingDesign:
    with open(path) as fh:
        fam, r, s = read_matrix(fh)
    if r != 1:
        raise InvalidParams("a pooling design file must have r=1")
    return PoolingDesign(fam.n, s, fam, {"d": s + 1, "source": path})


def _parse_items(text: str) -> List[int]:
    text = text.strip()
    return [int(x) - 1 for x in text.replace(",", " ").split()] if text else []


def _read_outcomes(a, N) -> np.ndarray:
    text = a.outcomes
    if a.outcomes_file:
        with open(a.outcomes_file) as fh:
            text = fh.read().strip()
    if text is None:
        raise InvalidParams("give --outcomes or --outcomes-file")
    if set(text) - {"0", "1"}:
        raise InvalidParams("outcomes must be a string over {0,1}")
    return np.array([int(c) for c in text], dtype=np.int8)


def cmd_gt(a, out):
    if a.gt_cmd == "design":
        D = design_tests(a.n, a.s, not a.no_identity)
        with open(a.output, "w") as fh:
            write_matrix(D.tests, 1, a.s, fh)
        print(f"wrote {a.output}: {D.num_tests} tests for n={a.n}, s={a.s}, d={D.d} "
              f"({D.provenance['source']})", file=out)
        return EXIT_OK
    D = _read_design(a.design)
    if a.gt_cmd == "simulate":
        line = "".join(str(int(v)) for v in simulate(D, _parse_items(a.defectives)))
        if a.output:
            with open(a.output, "w") as fh:
                fh.write(line + "\n")
        else:
            print(line, file=out)
        return EXIT_OK
    items = decode(D, _read_outcomes(a, D.num_tests))
    for i in items:
        print(i + 1, file=out)
    return EXIT_OK


def cmd_sep(a, out):
    if a.sep_cmd == "build":
        H = build_min_separating(a.n, a.t, a.k)
        with open(a.output, "w") as fh:
            write_separating(H, a.t, a.k, fh)
        print(f"wrote {a.output}: N={H.size} (stages {H.f0.size} x {H.f1.size} x {H.f2.size})",
              file=out)
        return EXIT_OK
    with open(a.file) as fh:
        H, t, k = read_separating(fh)
    return _verdict(verify_min_separating(H, t, k), out)


# -- parser ------------------------------------------------------------------------------

def _positive(x):
    v = int(x)
    if v < 0:
        raise argparse.ArgumentTypeError("expected a nonnegative integer")
    return v


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cffkit", description="Cover-free family toolkit")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--max-members", type=int, default=None,
                    help="materialization cap (overrides CFFKIT_MAX_MEMBERS)")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def design_args(p):
        p.add_argument("-n", type=_positive, required=True)
        p.add_argument("-r", type=_positive, required=True)
        p.add_argument("-s", type=_positive, required=True)
        p.add_argument("-k", type=_positive, default=None, help="splitter bucket count")
        p.add_argument("--regime", choices=REGIMES, default=None)
        p.add_argument("--phi", type=_positive, default=None)

    b = sub.add_parser("build", help="build a CFF and write it with a metadata sidecar")
    design_args(b)
    b.add_argument("--mode", choices=("exact-product", "heuristic-random"),
                   default="exact-product", help="hitting-set mode for multi-CFFs")
    b.add_argument("-o", "--output", required=True)

    v = sub.add_parser("verify", help="exhaustively verify a family file")
    v.add_argument("file")
    v.add_argument("-r", type=_positive, default=None)
    v.add_argument("-s", type=_positive, default=None)
    v.add_argument("--phf", type=_positive, default=None, metavar="D")
    v.add_argument("--splitter", type=_positive, nargs=2, default=None, metavar=("R", "K"))

    st = sub.add_parser("stats", help="size report without building")
    design_args(st)
    st.add_argument("--json", action="store_true")

    gt = sub.add_parser("gt", help="group testing")
    gsub = gt.add_subparsers(dest="gt_cmd", required=True)
    gd = gsub.add_parser("design")
    gd.add_argument("-n", type=_positive, required=True)
    gd.add_argument("-s", type=_positive, required=True)
    gd.add_argument("--no-identity", action="store_true",
                    help="keep the CFF design even when the identity design is smaller")
    gd.add_argument("-o", "--output", required=True)
    gs = gsub.add_parser("simulate")
    gs.add_argument("design")
    gs.add_argument("--defectives", default="", help="1-based items, e.g. '3,17'")
    gs.add_argument("-o", "--output", default=None)
    gdc = gsub.add_parser("decode")
    gdc.add_argument("design")
    gdc.add_argument("--outcomes", default=None)
    gdc.add_argument("--outcomes-file", default=None)

    sp = sub.add_parser("sep", help="minimal separating families")
    ssub = sp.add_subparsers(dest="sep_cmd", required=True)
    sb = ssub.add_parser("build")
    sb.add_argument("-n", type=_positive, required=True)
    sb.add_argument("-t", type=_positive, required=True)
    sb.add_argument("-k", type=_positive, required=True)
    sb.add_argument("-o", "--output", required=True)
    sv = ssub.add_parser("verify")
    sv.add_argument("file")
    return ap


COMMANDS = {"build": cmd_build, "verify": cmd_verify, "stats": cmd_stats,
            "gt": cmd_gt, "sep": cmd_sep}


def run(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        a = make_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    saved = os.environ.get("CFFKIT_MAX_MEMBERS")
    if a.max_members is not None:
        os.environ["CFFKIT_MAX_MEMBERS"] = str(a.max_members)
    try:
        return COMMANDS[a.cmd](a, out)
    except CapacityError as e:
        print(f"capacity error: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InvalidParams, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        # the cap is per invocation, not a side effect on the caller
        if saved is None:
            os.environ.pop("CFFKIT_MAX_MEMBERS", None)
        else:
            os.environ["CFFKIT_MAX_MEMBERS"] = saved


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
