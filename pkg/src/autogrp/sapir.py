"""End-to-end computation for Sapir's group.

The presentation of ``K`` on ``a, b, r, t, x, z`` is rewritten by Tietze
moves into an HNN extension of a group ``G`` on ``u, v, b, r`` with stable
letter ``z`` centralising ``H = <uu, bvbu>``.  The pipeline then builds the
automatic structure of ``G``, a coset system for ``H``, checks that
``Y = {uu, bvbU}`` is an efficient generating set, probes quasiconvexity
along the family ``(buBV)^n (BvbU)^n`` and checks the asynchronous HNN
multipliers to a fixed depth.
"""

from __future__ import annotations

import os
from importlib import resources

from .autostructure import AutLimits, autstructure
from .cosets import (CosetLimits, SubgroupData, build_coset_system, efficiency_check,
                     quasiconvexity_probe)
from .fsaio import format_fsa, format_group, parse_group, write_text
from .hnn import HnnInput, verify_async_structure
from .report import Report
from .rewriting import (KBLimits, Presentation, balance_equation, drop_generator,
                        relator_set, reorder_generators, tietze_add_generator,
                        tietze_eliminate, tietze_substitute)

TARGET_COSET_STATES = 302
TARGET_MULTIPLIER_STATES = 1400
# G as it should come out of the Tietze moves
EXPECTED_G = [("uu", "vv"), ("bvbu", "BuBv"), ("UBvbr", "rUBvb")]
QC_FAMILY = ("buBV", "BvbU")
EFFICIENT_Y = ["uu", "bvbU"]


class PipelineError(RuntimeError):
    def __init__(self, stage: str, msg: str):
        self.stage = stage
        super().__init__(f"stage '{stage}': {msg}")


def fixture_text() -> str:
    return resources.files("autogrp").joinpath("data", "sapir_k.grp").read_text()


def tietze_steps(p: Presentation) -> list:
    """``(description, presentation)`` after each move, ending with ``K``."""
    steps = []
    p = tietze_eliminate(p, "t", 1)
    steps.append(("eliminate t = bxbx", p))
    p = tietze_add_generator(p, "u", "U", "x a")
    p = tietze_add_generator(p, "v", "V", "b x")
    steps.append(("add u = xa and v = bx", p))
    p = tietze_eliminate(p, "a", len(p.equations) - 2)
    p = tietze_eliminate(p, "x", len(p.equations) - 1)
    steps.append(("eliminate a and x", p))
    p = tietze_substitute(p, 0, 1)
    p = tietze_substitute(p, 0, 3)
    p = balance_equation(p, 1)
    steps.append(("simplify with uu = vv", p))
    p = reorder_generators(p, "u U v V b B r R z Z".split())
    steps.append(("reorder generators", p))
    return steps


def centralised_words(K: Presentation, z: str) -> list:
    """Words ``w`` with an equation ``z w = w z`` (either way round)."""
    A = K.alphabet
    s = A.index(z)
    out = []
    for l, r in K.equations:
        if s not in l + r and A.inv[s] not in l + r:
            continue
        if l[:1] == (s,) and r[-1:] == (s,) and l[1:] == r[:-1]:
            out.append(l[1:])
        elif r[:1] == (s,) and l[-1:] == (s,) and r[1:] == l[:-1]:
            out.append(r[1:])
        else:
            raise PipelineError("hnn form", "equation with z is not a commutation "
                                f"{A.format_word(l)}={A.format_word(r)}")
    return out


def _multiplier_sizes(mults, A) -> dict:
    return {(A.names[a] if a < A.size else "_"): m.nstates for a, m in mults.items()}


def pipeline_sapir(outdir=None, depth: int = 4, max_rules: int = 30000,
                   log=None) -> Report:
    """Run every stage and return the report; artifacts go to ``outdir``.

    ``log`` (if given) is called with a progress message before each stage.
    """
    say = log or (lambda msg: None)
    rep = Report("Sapir group pipeline")
    files = {}
    kb = KBLimits(max_rules=max_rules)

    say("tietze")
    p0 = parse_group(fixture_text(), "sapir_k.grp")
    rep.section("presentation")
    rep.line(f"input: {p0.format()}")
    steps = tietze_steps(p0)
    for what, p in steps:
        rep.line(f"{what}: {p.format()}")
    K = steps[-1][1]
    G = drop_generator(K, "z")
    A = G.alphabet
    expected = Presentation(A, [(A.parse_word(l), A.parse_word(r)) for l, r in EXPECTED_G])
    same = relator_set(G) == relator_set(expected)
    rep.line(f"base group G: {G.format()}")
    rep.line(f"matches the expected G up to free reduction and cyclic order: {same}")
    rep.put("generators_in", len(p0.alphabet.inverse_pairs()))
    rep.put("equations_in", len(p0.equations))
    rep.put("g_matches_expected", same)
    if not same:
        raise PipelineError("tietze", "derived G differs from the expected presentation")
    hgens = centralised_words(K, "z")
    rep.line("z centralises " + ", ".join(K.alphabet.format_word(w) for w in hgens))
    files["K.grp"] = format_group(K)
    files["G.grp"] = format_group(G)

    say("automatic structure of G")
    sG = autstructure(G, AutLimits(kb=kb))
    rep.section("automatic structure of G")
    st = sG.stats()
    rep.line(f"rules {st['rules']}, word differences {st['diffs']}, k = {st['k']}")
    rep.line(f"word acceptor {st['wa_states']} states, general multiplier "
             f"{st['gm_states']} states")
    mG = _multiplier_sizes(sG.multipliers, A)
    rep.line("letter multipliers: " + ", ".join(f"{a} {n}" for a, n in mG.items()))
    rep.put("g_verified", sG.verified)
    rep.put("g_wa_states", st["wa_states"])
    rep.put("g_gm_states", st["gm_states"])
    if not sG.verified:
        raise PipelineError("structure of G", sG.report.summary() if sG.report else "failed")
    files["G.wa"] = format_fsa(sG.acceptor)

    say("coset system for H")
    sub_text = [K.alphabet.format_word(w) for w in hgens]
    # K and G share the names of u, v, b, r.
    subH = SubgroupData(A, [A.parse_word(w) for w in sub_text])
    climits = CosetLimits(kb=kb)
    cs = build_coset_system(G, subH, climits)
    rep.section("coset system for H = <" + ", ".join(sub_text) + ">")
    cst = cs.stats()
    msz = cst["coset_multiplier_states"]
    letter_sizes = sorted({n for a, n in msz.items() if a != "_"})
    rep.line(f"coset rules {cst['rules']}, word differences {cst['diffs']}, k = {cst['k']}")
    rep.line(f"coset word acceptor: {cst['coset_wa_states']} states (target "
             f"{TARGET_COSET_STATES})")
    rep.line("coset multipliers: " + ", ".join(f"{a} {n}" for a, n in msz.items()))
    rep.line(f"general coset multiplier: {cst['coset_gm_states']} states (target about "
             f"{TARGET_MULTIPLIER_STATES})")
    dev = cst["coset_wa_states"] - TARGET_COSET_STATES
    rep.line(f"acceptor deviation from target: {dev:+d} states; general multiplier "
             f"deviation {cst['coset_gm_states'] - TARGET_MULTIPLIER_STATES:+d} states")
    rep.line("state counts are of minimized trim automata, so no failure state is "
             "counted; multipliers are built over the acceptor extended by one padding "
             "state; the general multiplier keeps accepting states with different "
             "letter sets apart")
    rep.put("coset_verified", cs.verified)
    rep.put("coset_strong", cs.strong)
    rep.put("coset_wa_states", cst["coset_wa_states"])
    rep.put("coset_wa_target", TARGET_COSET_STATES)
    rep.put("coset_gm_states", cst["coset_gm_states"])
    rep.put("coset_multiplier_states", letter_sizes)
    rep.put("coset_multiplier_target", TARGET_MULTIPLIER_STATES)
    if not (cs.verified and cs.strong):
        raise PipelineError("coset system", cs.report.summary() if cs.report else "failed")
    files["H.cos.wa"] = format_fsa(cs.acceptor)

    say("quasiconvexity probe")
    pr = quasiconvexity_probe(sG, cs, depth=6, family=QC_FAMILY)
    rep.section("quasiconvexity of H with respect to L(W)")
    reps_ok = True
    for f in pr.witnesses:
        n = f["n"]
        want = A.parse_word("b" * (2 * n)) if n else ()
        reps_ok = reps_ok and f["in_L"] and f["in_H"] and f["prefix_rep"] == want
        rep.line(f"n={n}: (buBV)^n (BvbU)^n in L {f['in_L']}, in H {f['in_H']}, "
                 f"representative of (buBV)^n {A.format_word(f['prefix_rep'])}")
    rep.line(f"distance profile to depth 6: {pr.profile}")
    rep.put("qc_verdict", pr.verdict)
    rep.put("qc_family_reps_b2n", reps_ok)

    say("efficiency of Y")
    subY = SubgroupData(A, EFFICIENT_Y)
    csY = build_coset_system(G, subY, climits)
    rep.section("efficiency of Y = {" + ", ".join(EFFICIENT_Y) + "}")
    rep.line(f"coset system for the same subgroup on Y: verified {csY.verified}, strong "
             f"{csY.strong}, acceptor {csY.acceptor.nstates} states")
    if not (csY.verified and csY.strong):
        raise PipelineError("coset system on Y", "not a verified strong system")
    eff = efficiency_check(csY)
    B = subY.B
    for b, labs in eff.labels.items():
        rep.line(f"labels for {B.names[b]}: " + " ".join(B.format_word(w) for w in labs))
    rep.put("efficient", eff.efficient)
    if not eff.efficient:
        raise PipelineError("efficiency", "label " + B.format_word(eff.witness[1]))

    say("HNN structure")
    inp = HnnInput(csY, None, group=sG, efficiency=eff, limits=AutLimits(kb=kb))
    hrules = len(inp.hs.rs.rules) - 2 * len(B.inverse_pairs())
    rep.section("HNN extension K with alpha the identity on Y")
    rep.line(f"structure of H: {len(inp.hs.rs.rules)} rules, {hrules} besides free "
             f"cancellation, acceptor {inp.hs.acceptor.nstates} states")
    L = inp.word_acceptor()
    rep.line(f"L_K acceptor: {L.nstates} states")
    rep.put("h_free", hrules == 0)
    rep.put("lk_states", L.nstates)
    files["K.lk.wa"] = format_fsa(L)

    say("verify")
    hr = verify_async_structure(inp, depth)
    rep.line(f"asynchronous multipliers: {hr.summary()}")
    rep.line(f"largest head lag seen: {hr.max_lag}")
    for u, c, v, why in hr.failures:
        rep.line(f"failure: {why}: {inp.format(u)} * {c} -> {inp.format(v)}")
    rep.put("hnn_depth", depth)
    rep.put("hnn_words", hr.words)
    rep.put("hnn_passed", hr.passed)
    rep.put("hnn_max_lag", hr.max_lag)

    if outdir is not None:
        os.makedirs(outdir, exist_ok=True)
        for name, text in files.items():
            write_text(os.path.join(outdir, name), text)
        write_text(os.path.join(outdir, "report.txt"), rep.text())
    return rep
