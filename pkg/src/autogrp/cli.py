"""Command line front end.

Exit codes: 0 success or verified, 1 unverified or a negative probe,
2 malformed input, 3 a state or rule budget ran out.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field

from .alphabet import AlphabetError
from .autostructure import AutLimits, StructureError, autstructure, word_reduce_quadratic
from .cosets import (CosetLimits, SubgroupData, SubgroupError, build_coset_system,
                     efficiency_check, generalized_word_problem, quasiconvexity_probe)
from .fsa import DEFAULT_STATE_CAP, BudgetExceeded, Dfa, enumerate_words, growth_series
from .fsaio import (AsyncTable, ParseError, format_fsa, format_rules, read_fsa, read_group,
                    read_hnn, read_subgroup, write_text)
from .hnn import HnnError, HnnInput, verify_async_structure
from .rewriting import KBLimits, PresentationError, knuth_bendix

EXIT_OK, EXIT_UNVERIFIED, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass
class JobConfig:
    subcommand: str
    inputs: list = field(default_factory=list)
    max_rules: int = KBLimits.max_rules
    max_lhs_len: int = KBLimits.max_lhs_len
    state_cap: int = DEFAULT_STATE_CAP
    depth: int | None = None
    outdir: str | None = None
    verbosity: int = 0

    def validate(self):
        for name in ("max_rules", "max_lhs_len", "state_cap", "depth"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise InputError(f"{name.replace('_', '-')} must be positive")
        for p in self.inputs:
            if not os.path.exists(p):
                raise InputError(f"{p}: no such file")
        if self.outdir is not None:
            os.makedirs(self.outdir, exist_ok=True)
            if not os.access(self.outdir, os.W_OK):
                raise InputError(f"{self.outdir}: not writable")
        return self

    def kb_limits(self) -> KBLimits:
        return KBLimits(max_rules=self.max_rules, max_lhs_len=self.max_lhs_len)

    def aut_limits(self) -> AutLimits:
        return AutLimits(kb=self.kb_limits(), state_cap=self.state_cap)

    def coset_limits(self) -> CosetLimits:
        return CosetLimits(kb=self.kb_limits(), state_cap=self.state_cap)


def _stem(path: str) -> str:
    base = os.path.basename(path)
    root, ext = os.path.splitext(base)
    return root if ext in (".grp", ".sub", ".hnn") else base


def _out(cfg: JobConfig, name: str) -> str:
    return os.path.join(cfg.outdir or ".", name)


def _say(cfg: JobConfig, msg: str):
    if cfg.verbosity:
        print(msg, file=sys.stderr)


def _parse_word(A, text: str):
    try:
        return A.parse_word(text)
    except AlphabetError as e:
        raise InputError(str(e)) from None


def _load_subgroup(cfg: JobConfig, args):
    """Group and subgroup from ``GROUPFILE --sub SUBFILE`` or ``SUBFILE`` alone."""
    if args.sub is None:
        sf = read_subgroup(args.file)
        group = sf.group
    else:
        group = read_group(args.file)
        sf = read_subgroup(args.sub, group)
    return group, SubgroupData(group.alphabet, sf.generators, sf.names)


def _coset_system(cfg, group, sub):
    _say(cfg, "building the coset system")
    cs = build_coset_system(group, sub, cfg.coset_limits())
    st = cs.stats()
    print(f"coset system: verified={cs.verified} strong={cs.strong} "
          f"acceptor={st['coset_wa_states']} general={st['coset_gm_states']} "
          f"k={st['k']} rules={st['rules']}")
    return cs


def _load_hnn(cfg: JobConfig, path: str) -> HnnInput:
    hf = read_hnn(path)
    sub = SubgroupData(hf.group.alphabet, hf.subgroup.generators, hf.subgroup.names)
    cs = _coset_system(cfg, hf.group, sub)
    if not (cs.verified and cs.strong):
        raise StructureError("the coset system did not verify")
    return HnnInput(cs, hf.alpha, hf.stable, limits=cfg.aut_limits(), cap=cfg.state_cap)


# ---------------------------------------------------------------------------
# subcommands


def cmd_kb(cfg, args):
    p = read_group(args.file)
    rs = knuth_bendix(p, cfg.kb_limits())
    print(f"{len(rs)} rules, confluent={'true' if rs.confluent else 'false'}")
    text = format_rules(rs)
    if args.output:
        write_text(args.output, text)
    elif cfg.verbosity:
        sys.stdout.write(text)
    return EXIT_OK if rs.confluent else EXIT_UNVERIFIED


def cmd_aut(cfg, args):
    p = read_group(args.file)
    s = autstructure(p, cfg.aut_limits())
    A = p.alphabet
    st = s.stats()
    print(f"verified={'true' if s.verified else 'false'} wa={st['wa_states']} "
          f"gm={st['gm_states']} diffs={st['diffs']} k={st['k']} rules={st['rules']}")
    if s.report is not None:
        print(f"axiom check: {s.report.summary()}")
    stem = _stem(args.file)
    write_text(_out(cfg, f"{stem}.wa"), format_fsa(s.acceptor))
    for a, m in s.multipliers.items():
        sym = "pad" if a == A.pad else A.names[a]
        write_text(_out(cfg, f"{stem}.m_{sym}"), format_fsa(m))
    return EXIT_OK if s.verified else EXIT_UNVERIFIED


def cmd_reduce(cfg, args):
    p = read_group(args.file)
    w = _parse_word(p.alphabet, args.word)
    s = autstructure(p, cfg.aut_limits())
    if not s.verified:
        print("structure did not verify", file=sys.stderr)
        return EXIT_UNVERIFIED
    print(p.alphabet.format_word(word_reduce_quadratic(w, s)))
    return EXIT_OK


def _read_dfa(path) -> Dfa:
    m = read_fsa(path)
    if not isinstance(m, Dfa) or m.pair:
        raise InputError(f"{path}: expected a word acceptor (kind = dfa)")
    return m


def cmd_growth(cfg, args):
    d = _read_dfa(args.file)
    print(" ".join(str(c) for c in growth_series(d, args.n + 1)))
    return EXIT_OK


def cmd_enum(cfg, args):
    d = _read_dfa(args.file)
    for w in enumerate_words(d, args.n):
        print(d.alphabet.format_word(w))
    return EXIT_OK


def cmd_cos(cfg, args):
    group, sub = _load_subgroup(cfg, args)
    cs = _coset_system(cfg, group, sub)
    A = group.alphabet
    stem = _stem(args.sub or args.file)
    write_text(_out(cfg, f"{stem}.cos.wa"), format_fsa(cs.acceptor))
    for a, m in cs.multipliers.items():
        sym = "pad" if a == A.pad else A.names[a]
        write_text(_out(cfg, f"{stem}.cos.m_{sym}"), format_fsa(m, sub.B))
    return EXIT_OK if cs.verified and cs.strong else EXIT_UNVERIFIED


def cmd_gwp(cfg, args):
    group, sub = _load_subgroup(cfg, args)
    w = _parse_word(group.alphabet, args.word)
    cs = _coset_system(cfg, group, sub)
    if not cs.verified:
        return EXIT_UNVERIFIED
    h, x = cs.decompose(w)
    inside = generalized_word_problem(w, cs)
    print(f"in_subgroup={'true' if inside else 'false'}")
    print(f"h={sub.B.format_word(h)} representative={group.alphabet.format_word(x)}")
    return EXIT_OK


def cmd_effcheck(cfg, args):
    group, sub = _load_subgroup(cfg, args)
    cs = _coset_system(cfg, group, sub)
    if not (cs.verified and cs.strong):
        return EXIT_UNVERIFIED
    eff = efficiency_check(cs)
    B = sub.B
    for b, labs in eff.labels.items():
        print(f"{B.names[b]}: " + " ".join(B.format_word(w) for w in labs))
    print(f"efficient={'true' if eff.efficient else 'false'}")
    return EXIT_OK if eff.efficient else EXIT_UNVERIFIED


def cmd_qcprobe(cfg, args):
    group, sub = _load_subgroup(cfg, args)
    s = autstructure(group, cfg.aut_limits())
    if not s.verified:
        print("structure of the group did not verify", file=sys.stderr)
        return EXIT_UNVERIFIED
    cs = _coset_system(cfg, group, sub)
    if not cs.verified:
        return EXIT_UNVERIFIED
    A = group.alphabet
    family = None
    if args.family:
        family = tuple(_parse_word(A, f) for f in args.family)
    pr = quasiconvexity_probe(s, cs, depth=cfg.depth or 8, family=family)
    print(f"profile={','.join(str(x) for x in pr.profile)}")
    if family is not None:
        for f in pr.witnesses:
            print(f"n={f['n']} in_L={f['in_L']} in_H={f['in_H']} "
                  f"prefix_rep={A.format_word(f['prefix_rep'])}")
    print(f"verdict={pr.verdict}")
    return EXIT_UNVERIFIED if pr.growing else EXIT_OK


def cmd_hnn(cfg, args):
    inp = _load_hnn(cfg, args.file)
    stem = _stem(args.file)
    L = inp.word_acceptor()
    print(f"L_K acceptor: {L.nstates} states")
    write_text(_out(cfg, f"{stem}.lk.wa"), format_fsa(L))
    for c in inp.generators():
        m = inp.multiplier(c)
        delta, read, acc = m.materialize()
        table = AsyncTable(inp.K, delta, read, m.initial, frozenset(acc))
        name = inp.K.names[c]
        print(f"M_{name}: {len(delta)} states")
        write_text(_out(cfg, f"{stem}.am_{name}"), format_fsa(table))
    return EXIT_OK


def cmd_hnnverify(cfg, args):
    inp = _load_hnn(cfg, args.file)
    rep = verify_async_structure(inp, cfg.depth or 4)
    print(rep.summary())
    for u, c, v, why in rep.failures:
        print(f"failure: {why}: {inp.format(u)} * {inp.K.names[c] if c is not None else '-'}"
              f" -> {inp.format(v)}")
    print(f"max_lag={rep.max_lag}")
    return EXIT_OK if rep.passed else EXIT_UNVERIFIED


def cmd_sapir(cfg, args):
    from .sapir import PipelineError, pipeline_sapir
    try:
        rep = pipeline_sapir(cfg.outdir, depth=cfg.depth or 4, max_rules=cfg.max_rules,
                             log=lambda m: _say(cfg, f"stage: {m}"))
    except PipelineError as e:
        print(str(e), file=sys.stderr)
        return EXIT_UNVERIFIED
    sys.stdout.write(rep.text())
    ok = all(rep.values.get(k) for k in ("coset_strong", "efficient", "hnn_passed"))
    return EXIT_OK if ok else EXIT_UNVERIFIED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="autogrp", description=__doc__.splitlines()[0])
    sp = ap.add_subparsers(dest="cmd", required=True)

    def common(p, out=True):
        p.add_argument("--max-rules", type=int, default=KBLimits.max_rules)
        p.add_argument("--max-lhs-len", type=int, default=KBLimits.max_lhs_len)
        p.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
        p.add_argument("-v", "--verbose", action="count", default=0)
        if out:
            p.add_argument("-o", "--output", default=None)
        return p

    p = common(sp.add_parser("kb", help="Knuth-Bendix completion"))
    p.add_argument("file")
    p = common(sp.add_parser("aut", help="shortlex automatic structure"))
    p.add_argument("file")
    p = common(sp.add_parser("reduce", help="reduce a word to normal form"), out=False)
    p.add_argument("file")
    p.add_argument("-w", "--word", required=True)
    for name, what in (("growth", "growth series"), ("enum", "list accepted words")):
        p = common(sp.add_parser(name, help=f"{what} of a word acceptor"), out=False)
        p.add_argument("file")
        p.add_argument("-n", type=int, required=True)
    for name, what in (("cos", "coset automatic system"),
                       ("gwp", "generalized word problem"),
                       ("effcheck", "efficiency of subgroup generators"),
                       ("qcprobe", "quasiconvexity probe")):
        p = common(sp.add_parser(name, help=what), out=(name == "cos"))
        p.add_argument("file", help="group file, or a subgroup file naming its group")
        p.add_argument("--sub", default=None)
        if name == "gwp":
            p.add_argument("-w", "--word", required=True)
        if name == "qcprobe":
            p.add_argument("--depth", type=int, default=8)
            p.add_argument("--family", nargs=2, metavar=("P", "Q"), default=None)
    p = common(sp.add_parser("hnn", help="L_K acceptor and asynchronous multipliers"))
    p.add_argument("file")
    p = common(sp.add_parser("hnnverify", help="bounded check of the HNN structure"),
               out=False)
    p.add_argument("file")
    p.add_argument("--depth", type=int, default=4)
    p = common(sp.add_parser("sapir", help="the Sapir group pipeline"))
    p.add_argument("--depth", type=int, default=4)
    p.set_defaults(max_rules=30000)
    return ap


COMMANDS = {
    "kb": cmd_kb, "aut": cmd_aut, "reduce": cmd_reduce, "growth": cmd_growth,
    "enum": cmd_enum, "cos": cmd_cos, "gwp": cmd_gwp, "effcheck": cmd_effcheck,
    "qcprobe": cmd_qcprobe, "hnn": cmd_hnn, "hnnverify": cmd_hnnverify, "sapir": cmd_sapir,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    inputs = [getattr(args, "file", None), getattr(args, "sub", None)]
    outdir = getattr(args, "output", None)
    if args.cmd == "kb":
        outdir = None
    cfg = JobConfig(args.cmd, [p for p in inputs if p], args.max_rules, args.max_lhs_len,
                    args.state_cap, getattr(args, "depth", None), outdir, args.verbose)
    logging.basicConfig(level=logging.INFO if args.verbose > 1 else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        cfg.validate()
        return COMMANDS[args.cmd](cfg, args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, PresentationError, AlphabetError, SubgroupError, HnnError,
            OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except StructureError as e:
        print(f"failed: {e}", file=sys.stderr)
        return EXIT_UNVERIFIED


if __name__ == "__main__":
    sys.exit(main())
