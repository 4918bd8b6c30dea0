"""Command-line front end tying the numerical modules together.

Every subcommand writes machine-readable artifacts (CSV for data, JSON
for reports) plus a ``resolved_config.json`` that re-runs to identical
output.  Exit codes: 0 success, 2 validation error, 3 budget exceeded,
4 a verification failed (the failure report is still written).

All numeric text uses repr() of Python floats (shortest round-trip
decimal) or exact ``p/q`` rationals, so runs are bit-reproducible.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import __version__
from .errors import BudgetExceededError, ValidationError, VerificationFailed
from .measures import (SelfSimilarIFS, cantor_lebesgue, compose_word,
                       mu_t_ifs)
from .fourier import ft_digit_system, ft_mu_t, parse_frequency
from .slowdecay import (DecayFunction, IndexCertificate, LiouvilleSchedule,
                        build_liouville_t, monotone_envelope, rajchman_status,
                        slow_decay_constant, verify_lower_bound)
from .equidist import (GammaDigits, PsiBlock, PsiSchedule,
                       ScaledTowerSchedule, build_gamma, build_psi,
                       counting_bound_holds, enumerate_codings,
                       r_count_digits, sparse_point_from_coding)
from .smoothmaps import (SmoothMapSpec, build_schedule,
                         recurrence_zero_word, schedule_from_json_dict,
                         schedule_to_json_dict, verify_schedule, zero_scan)
from .pushforward import decay_profile, near_zero_check, pushforward_ft

__all__ = ["main", "build_parser"]


# ---------------------------------------------------------------------------
# small shared helpers
# ---------------------------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot parse rational {text!r}") from exc


def _word(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"cannot parse word {text!r}") from exc


def _write_text(path: str, text: str):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _load_json(path: str, what: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {what} file {path}: "
                              f"{exc}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ValidationError(f"{what} file {path} is not valid JSON: "
                              f"{exc}") from exc


def _write_json(path: str, obj):
    _write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path: str, lines: list[str]):
    _write_text(path, "\n".join(lines) + "\n")


def _out_path(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _emit_config(args, argv: list[str]):
    _write_json(_out_path(args, "resolved_config.json"),
                {"version": __version__, "command": argv[0], "argv": argv})


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _add_ifs_options(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--cantor", action="store_true",
                   help="base-3 measure on digits {0,2} (the default)")
    g.add_argument("--t", help="three-map family parameter, a rational")
    g.add_argument("--ifs", help="path to a system JSON file")


def _resolve_ifs(args) -> SelfSimilarIFS:
    if getattr(args, "ifs", None):
        with open(args.ifs) as fh:
            return SelfSimilarIFS.from_json(fh.read())
    if getattr(args, "t", None):
        return mu_t_ifs(_fraction(args.t))
    return cantor_lebesgue()


def _add_map_options(p: argparse.ArgumentParser):
    p.add_argument("--map", default="identity",
                   help="map spec: identity, affine:a:b, poly-flat:m, "
                        "explicit-h, explicit-x-plus-h, bump-sum-g, "
                        "integrated-f[:pure], affine-window[:lo:hi]")
    p.add_argument("--schedule", help="schedule JSON for the built variants")


def _load_schedule_file(path: str):
    obj = _load_json(path, "schedule")
    try:
        return schedule_from_json_dict(obj.get("schedule", obj))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"schedule file {path} is malformed: "
                              f"{exc!r}") from exc


def _resolve_map(args) -> SmoothMapSpec:
    spec = SmoothMapSpec.parse(args.map)
    if getattr(args, "schedule", None):
        spec = dataclasses.replace(spec,
                                   schedule=_load_schedule_file(args.schedule))
    return spec


def _materialize_frequency(text: str):
    """Exact int or Fraction from a command-line frequency form."""
    xq = parse_frequency(text).as_fraction()
    return int(xq) if xq.denominator == 1 else xq


# ---------------------------------------------------------------------------
# subcommand handlers (each returns the exit code)
# ---------------------------------------------------------------------------

def cmd_ft_selfsim(args) -> int:
    xi = parse_frequency(args.xi)
    if args.t is not None and args.ifs is None:
        fv = ft_mu_t(_fraction(args.t), xi, args.tol)
    else:
        fv = ft_digit_system(_resolve_ifs(args), xi, args.tol)
    _write_csv(_out_path(args, "ft_selfsim.csv"), [
        "xi,re,im,modulus,err",
        f"{args.xi},{fv.re!r},{fv.im!r},{fv.modulus!r},{fv.err!r}",
    ])
    _write_json(_out_path(args, "ft_selfsim.json"), {
        "xi": args.xi, "re": fv.re, "im": fv.im,
        "modulus": fv.modulus, "err": fv.err, "tol": args.tol,
    })
    return 0


def cmd_ft_pushforward(args) -> int:
    ifs = _resolve_ifs(args)
    spec = _resolve_map(args)
    xi = _materialize_frequency(args.xi)
    word = _word(args.root_word)
    try:
        res = pushforward_ft(ifs, spec, xi, args.tol,
                             linearize=not args.no_linearize,
                             root_word=word, leaf_budget=args.leaf_budget)
        status = "ok"
    except BudgetExceededError as exc:
        if exc.partial is None:
            raise
        res, status = exc.partial, "budget-exceeded"
    _write_csv(_out_path(args, "pushforward.csv"), [
        "xi,re,im,modulus,err,leaf_count,depth_max,status",
        f"{args.xi},{res.re!r},{res.im!r},{res.modulus!r},{res.err!r},"
        f"{res.leaf_count},{res.depth_max},{status}",
    ])
    _write_json(_out_path(args, "pushforward.json"), {
        "xi": args.xi, "map": args.map, "root_word": list(word),
        "re": res.re, "im": res.im, "modulus": res.modulus, "err": res.err,
        "leaf_count": res.leaf_count, "depth_max": res.depth_max,
        "tol": args.tol, "status": status,
    })
    return 0 if status == "ok" else 3


def _enc_int(v: int, hint: int | None = None):
    """JSON form of an exact integer; huge ones as 10^e + small rest."""
    if v.bit_length() <= 4000:
        return v
    e = hint if hint is not None else int((v.bit_length() - 1)
                                          * math.log10(2))
    p = 10 ** e
    while p * 10 <= v:
        p *= 10
        e += 1
    while p > v:
        p //= 10
        e -= 1
    r = v - p
    if r.bit_length() > 4000:
        raise ValidationError(
            "integer is not near a power of ten; no compact serialization")
    return {"pow10": e, "plus": int(r)}


def _dec_int(obj) -> int:
    if isinstance(obj, int):
        return obj
    return 10 ** obj["pow10"] + obj["plus"]


def _int_text(v: int, hint: int | None = None) -> str:
    enc = _enc_int(v, hint)
    if isinstance(enc, int):
        return str(enc)
    if enc["plus"] == 0:
        return f"10^{enc['pow10']}"
    return f"10^{enc['pow10']}+{enc['plus']}"


def _liouville_json(s: LiouvilleSchedule, phi_text: str, status: str) -> dict:
    certs = []
    for c in s.certificates:
        d = dataclasses.asdict(c)
        d["L"] = _enc_int(c.L, c.L_exp10)
        certs.append(d)
    hint = s.certificates[-1].L_exp10 if s.certificates else None
    try:
        described = s.describe_t()
    except ValueError:
        described = "digit places too large to print in decimal"
    return {
        "phi": phi_text, "status": status,
        "places": [_enc_int(p) for p in s.places],
        "k_tail": _enc_int(s.k_tail, hint),
        "describe_t": described,
        "certificates": certs,
    }


def cmd_construct_t(args) -> int:
    phi = DecayFunction.parse(args.phi)
    path = _out_path(args, "liouville_t.json")
    try:
        sched = build_liouville_t(phi, args.depth, k1=args.k1,
                                  digit_budget=args.digit_budget)
    except BudgetExceededError as exc:
        if exc.partial is not None:
            _write_json(path, _liouville_json(exc.partial, args.phi,
                                              "truncated-by-budget"))
        print(f"budget: {exc}", file=sys.stderr)
        return 3
    payload = _liouville_json(sched, args.phi, "complete")
    _write_json(path, payload)
    print(payload["describe_t"])
    return 0


def _load_liouville(path: str) -> LiouvilleSchedule:
    obj = _load_json(path, "digit-place schedule")
    try:
        certs = tuple(IndexCertificate(**{**c, "L": _dec_int(c["L"])})
                      for c in obj["certificates"])
        return LiouvilleSchedule(
            phi=DecayFunction.parse(obj["phi"]),
            places=tuple(_dec_int(p) for p in obj["places"]),
            k_tail=_dec_int(obj["k_tail"]), certificates=certs)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"digit-place schedule file {path} is "
                              f"malformed: {exc!r}") from exc


def cmd_verify_lower_bound(args) -> int:
    sched = _load_liouville(args.schedule)
    reports = verify_lower_bound(sched, digit_budget=args.digit_budget,
                                 cross_check_L_cap=args.l_cap,
                                 cross_check_tol=args.tol)
    lines = ["index,n,L,ln_measured,ln_err,ln_lemma_floor,ln_two_phi,"
             "beats_lemma_floor,beats_two_phi,certified,cross_checked"]
    for r in reports:
        lines.append(
            f"{r.index},{_int_text(r.n)},{_int_text(r.L)},{r.ln_measured!r},"
            f"{r.ln_err!r},{r.ln_lemma_floor!r},{r.ln_two_phi!r},"
            f"{r.beats_lemma_floor},{r.beats_two_phi},{r.certified},"
            f"{r.cross_checked}")
    _write_csv(_out_path(args, "lower_bound.csv"), lines)
    ok = all(r.beats_two_phi and r.beats_lemma_floor
             for r in reports if r.certified)
    _write_json(_out_path(args, "lower_bound.json"), {
        "schedule": args.schedule, "indices_audited": len(reports),
        "certified_indices": sum(1 for r in reports if r.certified),
        "all_certified_pass": ok,
        "slow_decay_constant": slow_decay_constant(),
    })
    return 0 if ok else 4


def cmd_rajchman_status(args) -> int:
    status, reason = rajchman_status(_fraction(args.t))
    _write_json(_out_path(args, "rajchman.json"),
                {"t": args.t, "status": status, "reason": reason})
    print(f"{status}: {reason}")
    return 0


def cmd_build_psi_gamma(args) -> int:
    places = tuple(int(p) for p in args.places.split(","))
    sched = ScaledTowerSchedule(M=places, strict=not args.no_strict)
    psi = build_psi(sched, value_mode=args.value_mode)
    samples = [sparse_point_from_coding(sched.t_places(), c)
               for c in enumerate_codings(args.depth)]
    gamma = build_gamma(sched, psi, samples, args.N,
                        fill_digit=args.fill_digit)
    _write_json(_out_path(args, "psi_gamma.json"), {
        "M": list(places), "strict": not args.no_strict,
        "value_mode": args.value_mode, "depth": args.depth, "N": args.N,
        "psi_blocks": [{"start": b.start, "end": b.end,
                        "value": _frac_str(b.value)} for b in psi.blocks],
        "psi_horizon": psi.horizon,
        "psi_partial_sum_N": _frac_str(psi.partial_sum(args.N)),
        "gamma_digits": "".join(str(d) for d in gamma.digits),
        "counting_bound_holds": counting_bound_holds(sched),
    })
    return 0


def _load_psi_gamma(path: str):
    obj = _load_json(path, "threshold-and-target")
    try:
        sched = ScaledTowerSchedule(M=tuple(obj["M"]), strict=obj["strict"])
        blocks = tuple(PsiBlock(start=b["start"], end=b["end"],
                                value=Fraction(b["value"]))
                       for b in obj["psi_blocks"])
        psi = PsiSchedule(blocks=blocks, value_mode=obj["value_mode"],
                          horizon=obj["psi_horizon"])
        gamma = GammaDigits(tuple(int(ch) for ch in obj["gamma_digits"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"threshold-and-target file {path} is "
                              f"malformed: {exc!r}") from exc
    return sched, psi, gamma


_RC_STATE: dict = {}


def _rc_init(t_places, gamma_digits, blocks, value_mode, horizon, n_shifts):
    _RC_STATE["t_places"] = t_places
    _RC_STATE["gamma"] = GammaDigits(gamma_digits)
    _RC_STATE["psi"] = PsiSchedule(
        blocks=tuple(PsiBlock(*b) for b in blocks),
        value_mode=value_mode, horizon=horizon)
    _RC_STATE["N"] = n_shifts


def _rc_chunk(codings: list[tuple[int, ...]]) -> list[tuple[int, int]]:
    out = []
    for c in codings:
        x = sparse_point_from_coding(_RC_STATE["t_places"], c)
        res = r_count_digits(x, _RC_STATE["gamma"], _RC_STATE["psi"],
                             _RC_STATE["N"])
        out.append((res.count, res.first_hit if res.first_hit else 0))
    return out


def cmd_r_count(args) -> int:
    sched, psi, gamma = _load_psi_gamma(args.schedule)
    codings = enumerate_codings(args.depth)
    init_args = (sched.t_places(), gamma.digits,
                 tuple((b.start, b.end, b.value) for b in psi.blocks),
                 psi.value_mode, psi.horizon, args.N)
    if args.jobs > 1:
        chunk = max(1, len(codings) // (args.jobs * 8))
        chunks = [codings[i:i + chunk] for i in range(0, len(codings), chunk)]
        with ProcessPoolExecutor(max_workers=args.jobs,
                                 initializer=_rc_init,
                                 initargs=init_args) as pool:
            parts = list(pool.map(_rc_chunk, chunks))
        results = [r for part in parts for r in part]
    else:
        _rc_init(*init_args)
        results = _rc_chunk(codings)
    lines = ["coding,count,first_hit"]
    violations = 0
    for coding, (count, first) in zip(codings, results):
        violations += count > 0
        lines.append(f"{''.join(map(str, coding))},{count},{first}")
    _write_csv(_out_path(args, "r_count.csv"), lines)
    _write_json(_out_path(args, "r_count.json"), {
        "schedule": args.schedule, "depth": args.depth, "N": args.N,
        "points": len(codings), "violations": violations,
        "max_count": max(r[0] for r in results),
        "psi_partial_sum_N": _frac_str(psi.partial_sum(args.N)),
    })
    return 0 if violations == 0 else 4


def cmd_build_schedule(args) -> int:
    phi = DecayFunction.parse(args.psi)
    env = monotone_envelope(phi, args.envelope_knots)
    sched = build_schedule(env, args.variant, args.terms)
    _write_json(_out_path(args, "schedule.json"),
                {"psi": args.psi, "schedule": schedule_to_json_dict(sched)})
    print(f"{args.variant} schedule with {sched.terms()} terms")
    return 0


def cmd_verify_schedule(args) -> int:
    sched = _load_schedule_file(args.schedule)
    report = verify_schedule(sched)
    lines = ["index,name,ok,margin"]
    for row in report.rows:
        lines.append(f"{row.index},{row.name},{row.ok},{row.margin!r}")
    _write_csv(_out_path(args, "schedule_verify.csv"), lines)
    _write_json(_out_path(args, "schedule_verify.json"), {
        "schedule": args.schedule, "variant": report.variant,
        "rows": len(report.rows), "all_ok": report.all_ok(),
        "failures": [r.line() for r in report.failures()],
    })
    return 0 if report.all_ok() else 4


def cmd_zero_scan(args) -> int:
    ifs = _resolve_ifs(args)
    spec = _resolve_map(args)
    word = _word(args.word)
    if not word:
        raise ValidationError("--word must name a nonempty branch word")
    lo_text, hi_text = (args.interval.split(",") + [""])[:2]
    lo, hi = _fraction(lo_text), _fraction(hi_text)
    rep = zero_scan(spec, compose_word(ifs, word), (lo, hi),
                    grid_n=args.grid_n)
    _write_json(_out_path(args, "zero_scan.json"), {
        "map": args.map, "word": list(word),
        "interval": [rep.interval[0], rep.interval[1]],
        "grid_n": rep.grid_n, "sign_changes": rep.sign_changes,
        "brackets": [[a, b] for a, b in rep.brackets],
        "refine_sign_changes": rep.refine_sign_changes,
        "stable": rep.stable,
        "near_zero": [[x, s, bool(conf)] for x, s, conf in rep.near_zero],
        "confident_sign": rep.confident_sign,
        "confident_up_to": rep.confident_up_to,
        "confident_up_to_y": rep.confident_up_to_y,
    })
    return 0 if rep.stable else 4


def _frequency_grid(args) -> list:
    if args.grid and args.grid_geom:
        raise ValidationError("give --grid or --grid-geom, not both")
    if args.grid_geom:
        try:
            base, klo, khi = (int(v) for v in args.grid_geom.split(":"))
        except ValueError as exc:
            raise ValidationError(
                f"cannot parse geometric grid {args.grid_geom!r}") from exc
        if base < 2 or khi < klo:
            raise ValidationError("geometric grid needs base >= 2, hi >= lo")
        return [base ** k for k in range(klo, khi + 1)]
    if not args.grid:
        raise ValidationError("a frequency grid is required")
    return [_materialize_frequency(t) for t in args.grid.split(",")]


def cmd_decay_profile(args) -> int:
    ifs = _resolve_ifs(args)
    spec = _resolve_map(args)
    grid = _frequency_grid(args)
    interval = None
    if args.interval:
        lo_text, hi_text = (args.interval.split(",") + [""])[:2]
        interval = (_fraction(lo_text), _fraction(hi_text))
    prof = decay_profile(ifs, spec, grid, args.tol,
                         root_word=_word(args.root_word), interval=interval)
    _write_csv(_out_path(args, "decay_profile.csv"), prof.csv_lines())
    _write_json(_out_path(args, "decay_profile.json"), {
        "map": args.map, "rows": len(prof.rows), "tol": args.tol,
        "slope": prof.slope, "certified": prof.certified,
    })
    if prof.slope is not None:
        print(f"fitted slope {prof.slope!r} (not certified)")
    return 0


def cmd_near_zero_check(args) -> int:
    ifs = _resolve_ifs(args)
    spec = _resolve_map(args)
    rep = near_zero_check(ifs, spec, args.n, args.j, tol=args.tol)
    _write_json(_out_path(args, "near_zero.json"), {
        "map": args.map, "n": rep.n, "j": rep.j, "kind": rep.kind,
        "k": rep.k, "modulus": rep.modulus, "err": rep.err,
        "threshold": rep.threshold, "margin": rep.margin,
        "passed": rep.passed, "note": rep.note,
    })
    if rep.passed is None:
        print(f"skipped: {rep.note}")
        return 0
    print(f"modulus {rep.modulus!r} vs threshold {rep.threshold!r}: "
          f"{'pass' if rep.passed else 'FAIL'}")
    return 0 if rep.passed else 4


def cmd_recurrence_word(args) -> int:
    ifs = _resolve_ifs(args)
    intervals = []
    for part in args.z.split(";"):
        lo_text, hi_text = (part.split(",") + [""])[:2]
        intervals.append((_fraction(lo_text), _fraction(hi_text)))
    wit = recurrence_zero_word(intervals, ifs, args.max_depth,
                               tol=args.tol, word_budget=args.word_budget)
    if wit is None:
        _write_json(_out_path(args, "recurrence.json"),
                    {"z": args.z, "found": False})
        print("no recurrent word up to the requested depth")
        return 0
    _write_json(_out_path(args, "recurrence.json"), {
        "z": args.z, "found": True, "word": list(wit.word),
        "letters": list(wit.letters),
        "overlap": [[_frac_str(a), _frac_str(b)] for a, b in wit.overlap],
        "measure_lower": _frac_str(wit.measure_lower),
        "measure_upper": _frac_str(wit.measure_upper),
    })
    print(f"word {wit.word} (letters {wit.letters}), branch-returned mass "
          f">= {_frac_str(wit.measure_lower)}")
    return 0


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fracfourier",
        description="transforms, slow-decay constructions and pushforward "
                    "integrals of self-similar measures")
    ap.add_argument("--config",
                    help="re-run from a resolved_config.json file")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command")

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--out", default=".", help="output directory")
        p.set_defaults(handler=fn)
        return p

    p = add("ft-selfsim", cmd_ft_selfsim,
            help="transform of a self-similar measure at an exact frequency")
    _add_ifs_options(p)
    p.add_argument("--xi", required=True,
                   help="frequency: 123, p/q, 10^L or a*10^L")
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("ft-pushforward", cmd_ft_pushforward,
            help="oscillatory integral of a smooth image of the measure")
    _add_ifs_options(p)
    _add_map_options(p)
    p.add_argument("--xi", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--root-word", default="",
                   help="restrict to this cylinder, e.g. 0,0")
    p.add_argument("--no-linearize", action="store_true")
    p.add_argument("--leaf-budget", type=int, default=10 ** 8)

    p = add("construct-t", cmd_construct_t,
            help="digit places of a slowly-decaying family parameter")
    p.add_argument("--phi", required=True,
                   help="decay target: log, loglog, ilog:k, power:a")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--k1", type=int, default=1)
    p.add_argument("--digit-budget", type=int, default=3_000_000)

    p = add("verify-lower-bound", cmd_verify_lower_bound,
            help="audit the decay lower bound of a constructed parameter")
    p.add_argument("--schedule", required=True,
                   help="liouville_t.json from construct-t")
    p.add_argument("--l-cap", type=int, default=2000,
                   help="cross-check exponent cap for the generic evaluator")
    p.add_argument("--digit-budget", type=int, default=30_000_000)
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("rajchman-status", cmd_rajchman_status,
            help="does the family transform vanish at infinity for this t")
    p.add_argument("--t", required=True)

    p = add("build-psi-gamma", cmd_build_psi_gamma,
            help="recurrence thresholds and an avoiding target point")
    p.add_argument("--places", default="100,10000",
                   help="comma-separated digit places M_1,M_2,...")
    p.add_argument("--no-strict", action="store_true",
                   help="allow toy schedules below the counting bound")
    p.add_argument("--value-mode", default="inverse",
                   choices=("inverse", "exp"))
    p.add_argument("--depth", type=int, default=10,
                   help="coding depth of the sample orbit points")
    p.add_argument("--N", type=int, default=300)
    p.add_argument("--fill-digit", type=int, default=5)

    p = add("r-count", cmd_r_count,
            help="exact recurrence counts for all codings of a depth")
    p.add_argument("--schedule", required=True,
                   help="psi_gamma.json from build-psi-gamma")
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--N", type=int, default=300)
    p.add_argument("--jobs", type=int, default=1)

    p = add("build-schedule", cmd_build_schedule,
            help="flatness schedule under a decay envelope")
    p.add_argument("--psi", default="power:2",
                   help="envelope decay function")
    p.add_argument("--variant", default="flat-cascade",
                   choices=("flat-cascade", "unit-slope"))
    p.add_argument("--terms", type=int, default=20)
    p.add_argument("--envelope-knots", type=int, default=None)

    p = add("verify-schedule", cmd_verify_schedule,
            help="re-check every inequality of a built schedule")
    p.add_argument("--schedule", required=True)

    p = add("zero-scan", cmd_zero_scan,
            help="sign structure of the conjugated second derivative")
    _add_ifs_options(p)
    _add_map_options(p)
    p.add_argument("--word", required=True, help="branch word, e.g. 0 or 1,2")
    p.add_argument("--interval", default="0,1/2")
    p.add_argument("--grid-n", type=int, default=64)

    p = add("decay-profile", cmd_decay_profile,
            help="transform modulus along a frequency grid")
    _add_ifs_options(p)
    _add_map_options(p)
    p.add_argument("--grid", help="comma-separated frequencies")
    p.add_argument("--grid-geom",
                   help="base:klo:khi meaning base^klo..base^khi")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--root-word", default="")
    p.add_argument("--interval", help="restrict to lo,hi on the line")

    p = add("near-zero-check", cmd_near_zero_check,
            help="persistent-modulus lower bound on the flat window")
    _add_ifs_options(p)
    _add_map_options(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-6)

    p = add("recurrence-word", cmd_recurrence_word,
            help="branch word returning part of a target set into itself")
    _add_ifs_options(p)
    p.add_argument("--z", required=True,
                   help="intervals lo,hi joined by ';'")
    p.add_argument("--max-depth", type=int, default=12)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--word-budget", type=int, default=200_000)

    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            saved = _load_json(args.config, "resolved config")
            return main(saved["argv"])
        except (ValidationError, KeyError, TypeError) as exc:
            print(f"validation error: {exc}", file=sys.stderr)
            return 2
    if not getattr(args, "handler", None):
        parser.print_help()
        return 2
    try:
        _emit_config(args, argv)
        return args.handler(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
