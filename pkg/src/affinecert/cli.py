"""Command-line front end: load group files, run the machinery, emit
re-checkable reports.

Exit codes: 0 on success (certificate found, where applicable), 2 on usage
or input errors, 3 when a certificate search exhausted its budget without
finding one, 1 when a report fails re-verification.
"""

import argparse
import sys
import time

import numpy as np

from . import __version__
from .affine import invariant_axis
from .certificates import (DegenerateAngle, check_certificate,
                           direction_set_estimate, eigenvalue_one_screen,
                           margulis3d_example, nonproper_witness,
                           opposite_sign_example, opposite_sign_search,
                           proper_scan)
from .classify import classification_lookup
from .dynamics import is_regular, profile
from .errors import AffineCertError, GroupFileError, NoVerifiedN, UnknownDescriptor
from .groupfile import (parse_group_file, parse_report, render_report,
                        write_group_file)
from .signs import extended_alpha, margulis_alpha

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


def _load_spec(path):
    try:
        with open(path) as fh:
            return parse_group_file(fh.read())
    except OSError as exc:
        raise GroupFileError(f"cannot read '{path}': {exc}") from None


def _resolve_element(spec, args):
    if args.element:
        for g in spec.generators:
            if g.name == args.element:
                return g.name, g
        raise GroupFileError(f"no generator named '{args.element}'")
    if args.word:
        word, m = spec.element(args.word)
        return word.to_str(spec.names), m
    raise GroupFileError("pass --element or --word")


def _report(args, command, results, certificates=(), started=None):
    config = {name: getattr(args, name.replace("-", "_"))
              for name in ("input", "element", "word", "alpha", "max_word_len",
                           "n_max", "radius", "seed", "jobs")
              if hasattr(args, name.replace("-", "_"))}
    report = {
        "schema": 1,
        "tool": f"affinecert {__version__}",
        "command": command,
        "config": config,
        "results": results,
        "certificates": [
            {"kind": c.kind, "words": c.words, "maps": c.maps, "witness": c.witness}
            for c in certificates],
        "timing": {"seconds": time.time() - started if started else 0.0},
    }
    text = render_report(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _subspace_payload(sub):
    return {"dim": sub.dim, "basis": sub.basis.tolist()}


def cmd_decompose(args):
    started = time.time()
    spec = _load_spec(args.input)
    name, g = _resolve_element(spec, args)
    prof = profile(g, alpha=args.alpha)
    split = prof.split
    results = {
        "element": name,
        "threshold": args.alpha,
        "dims": list(split.dims()),
        "a_plus": _subspace_payload(split.a_plus),
        "a_minus": _subspace_payload(split.a_minus),
        "a_zero": _subspace_payload(split.a_zero),
        "s": prof.s,
        "eps_hyperbolic": prof.eps_hyperbolic,
        "hyperbolic": prof.hyperbolic,
        "degenerate": prof.degenerate,
        "regularity": is_regular(g, spec.ambient),
    }
    try:
        axis = invariant_axis(g, split=split)
        results["axis"] = {"base_point": axis.base_point.tolist(),
                           "direction": axis.direction.tolist()}
    except AffineCertError as exc:
        results["axis"] = {"error": str(exc)}
        fixed = getattr(exc, "fixed_point", None)
        if fixed is not None:
            results["axis"]["fixed_point"] = fixed.tolist()
    _report(args, "decompose", results, started=started)
    return EXIT_OK


def cmd_sign(args):
    started = time.time()
    spec = _load_spec(args.input)
    name, g = _resolve_element(spec, args)
    if spec.form is not None:
        res = margulis_alpha(g, spec.form)
    elif spec.product_split is not None:
        res = extended_alpha(g, spec.product_split)
    else:
        raise GroupFileError("sign needs a declared form or product-split")
    results = {
        "element": name,
        "alpha": res.alpha,
        "neutral_vector": res.neutral_vector.tolist(),
        "axis": {"base_point": res.axis.base_point.tolist(),
                 "direction": res.axis.direction.tolist()},
    }
    _report(args, "sign", results, started=started)
    return EXIT_OK


def cmd_certify(args):
    started = time.time()
    spec = _load_spec(args.input)
    certificates = []
    results = {"stages": []}

    # stage 1: unit-eigenvalue screen, shortest violations only
    for length in range(1, args.max_word_len + 1):
        found = eigenvalue_one_screen(spec, length)
        if found:
            certificates.extend(found)
            results["stages"].append(
                {"stage": "eigenvalue-one-screen", "violations": len(found),
                 "at_length": length})
            break
    else:
        results["stages"].append({"stage": "eigenvalue-one-screen", "violations": 0})

    # stage 2: opposite-sign pair search, then the ball-intersection witness
    if not certificates and (spec.form is not None or spec.product_split is not None):
        pair = opposite_sign_search(spec, args.max_word_len, jobs=args.jobs)
        if pair is not None:
            certificates.append(pair)
            results["stages"].append({"stage": "opposite-sign-search",
                                      "found": pair.words})
            from .certificates import _payload_map
            g = _payload_map(pair.maps[0])
            h = _payload_map(pair.maps[1])
            try:
                witness = nonproper_witness(
                    g, h, sign_data={"alphas": pair.witness["alphas"]},
                    n_max=args.n_max, radius=args.radius)
                certificates.append(witness)
                results["stages"].append(
                    {"stage": "ball-intersection-witness",
                     "kind": witness.kind,
                     "verified_exponents": len(witness.witness.get("verified", []))})
            except (NoVerifiedN, AffineCertError) as exc:
                results["stages"].append(
                    {"stage": "ball-intersection-witness", "error": str(exc)})
        else:
            results["stages"].append({"stage": "opposite-sign-search", "found": None})

    results["certificate_found"] = bool(certificates)
    _report(args, "certify", results, certificates, started=started)
    return EXIT_OK if certificates else EXIT_BUDGET


def cmd_scan(args):
    started = time.time()
    spec = _load_spec(args.input)
    cert = proper_scan(spec, np.zeros(spec.dim), args.radius, args.max_word_len)
    results = {
        "return_set": cert.words,
        "returns_by_length": cert.witness["returns_by_length"],
        "words_scanned": cert.witness["words_scanned"],
    }
    _report(args, "scan", results, [cert], started=started)
    return EXIT_OK


def cmd_directions(args):
    started = time.time()
    spec = _load_spec(args.input)
    sample = direction_set_estimate(spec, np.zeros(spec.dim), args.radius,
                                    args.max_word_len, seed=args.seed)
    results = {
        "center": sample.center.tolist(),
        "radius": sample.radius,
        "directions": [
            {"direction": e["direction"].tolist(), "word": e["word"],
             "displacement": e["displacement"]}
            for e in sample.directions],
    }
    _report(args, "directions", results, started=started)
    return EXIT_OK


def cmd_classify(args):
    started = time.time()
    entry = classification_lookup(args.dim, args.descriptor)
    results = {
        "descriptor": entry.descriptor,
        "dim": entry.dim,
        "verdict": entry.verdict,
        "tag": entry.tag,
        "mechanism": entry.mechanism,
        "notes": entry.notes,
        "raw": entry.raw,
    }
    _report(args, "classify", results, started=started)
    return EXIT_OK


def cmd_example(args):
    if args.kind == "margulis3d":
        spec = margulis3d_example(args.boost_param, args.angle,
                                  args.translation_scale)
        note = "two-generator positive example: equal positive signs"
    else:
        spec = opposite_sign_example(args.boost_param, args.translation_scale)
        note = "built-in opposite-sign pair: signs +t and -t"
    text = write_group_file(spec, note=note)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args):
    with open(args.input) as fh:
        report = parse_report(fh.read())
    certs = report.get("certificates", [])
    if not certs:
        print("report carries no certificates")
        return EXIT_INPUT
    all_ok = True
    for i, cert in enumerate(certs):
        ok, messages = check_certificate(cert)
        status = "verified" if ok else "FAILED"
        print(f"certificate {i} ({cert['kind']}): {status}")
        for msg in messages:
            print(f"  {msg}")
        all_ok = all_ok and ok
    return EXIT_OK if all_ok else EXIT_FAILED_CHECK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="affinecert",
        description="numerical certificates for affine transformation groups")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="group file path")
        p.add_argument("--output", default=None, help="write the report here")

    p = sub.add_parser("decompose", help="invariant splitting of one element")
    common(p)
    p.add_argument("--element", default=None)
    p.add_argument("--word", default=None)
    p.add_argument("--alpha", type=float, default=1.0,
                   help="modulus threshold of the splitting")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("sign", help="signed displacement of one element")
    common(p)
    p.add_argument("--element", default=None)
    p.add_argument("--word", default=None)
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("certify", help="search for a non-properness certificate")
    common(p)
    p.add_argument("--max-word-len", type=int, default=6)
    p.add_argument("--n-max", type=int, default=200)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("scan", help="ball return-set evidence scan")
    common(p)
    p.add_argument("--max-word-len", type=int, default=6)
    p.add_argument("--radius", type=float, default=1.0)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("directions", help="asymptotic displacement directions")
    common(p)
    p.add_argument("--max-word-len", type=int, default=6)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_directions)

    p = sub.add_parser("classify", help="look up a semisimple part descriptor")
    p.add_argument("dim", type=int)
    p.add_argument("descriptor")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("example", help="write a built-in example group file")
    p.add_argument("--kind", choices=["margulis3d", "opposite-sign"],
                   default="margulis3d")
    p.add_argument("--boost-param", type=float, default=float(np.log(4.0)))
    p.add_argument("--angle", type=float, default=float(np.pi / 2))
    p.add_argument("--translation-scale", type=float, default=10.0)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("check", help="re-verify a report's certificates")
    p.add_argument("--input", required=True, help="report file path")
    p.set_defaults(func=cmd_check)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (GroupFileError, UnknownDescriptor, DegenerateAngle) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AffineCertError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
