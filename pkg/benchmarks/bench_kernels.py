"""Time the compiled kernels against their pure-Python twins.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Both backends get identical inputs and must produce identical outputs;
the table shows the best time of N runs for each.
"""

import argparse
import random
import time

from autogrp._kernels import backends
from autogrp.alphabet import Alphabet
from autogrp.rewriting import IndexAutomaton, KBLimits, Presentation, _Trie, knuth_bendix


def rules_for_bench():
    # completion for the (2,3,7) triangle group gives a few thousand rules
    A = Alphabet("aAbB", {"a": "A", "b": "B"})
    p = Presentation(A, [(A.parse_word("aa"), ()), (A.parse_word("bbb"), ()),
                         (A.parse_word("ab" * 7), ())])
    return A, knuth_bendix(p, KBLimits(max_rules=3000)).rules


def random_dfa(rng, n, nsym):
    tails, labels, heads = [], [], []
    for s in range(n):
        for a in range(nsym):
            if rng.random() < 0.8:
                tails.append(s)
                labels.append(a)
                heads.append(rng.randrange(n))
    acc = [s for s in range(n) if rng.random() < 0.3]
    rest = [s for s in range(n) if s not in set(acc)]
    return tails, labels, heads, [acc, rest]


def best_of(f, repeat):
    best = None
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = f()
        dt = time.perf_counter() - t
        best = dt if best is None else min(best, dt)
    return best, out


def cases():
    rng = random.Random(20240101)
    A, rules = rules_for_bench()
    nsym = A.size
    lhss = [l for l, _ in rules]
    words = [tuple(rng.randrange(nsym) for _ in range(60)) for _ in range(400)]
    ia = IndexAutomaton(nsym, rules)
    trie_rules = lhss[:500]
    trie = _Trie(nsym)
    for rid, lhs in enumerate(trie_rules):
        trie.add(lhs, rid)
    dfa = random_dfa(rng, 3000, 4)
    return {
        "build_index": lambda k: k.build_index(nsym, lhss),
        "reduce_word": lambda k: [list(k.reduce_word(w, ia.goto, nsym, ia.match, ia.lhs_len,
                                                     ia.rhs_rev, ia.emit, []))
                                  for w in words],
        "scan_match": lambda k: [k.scan_match(w, ia.goto, nsym, ia.match) for w in words],
        "trie_scan": lambda k: [k.trie_scan(w, trie.goto, nsym, trie.term) for w in words],
        "partition_refine": lambda k: list(k.partition_refine(3000, *dfa)),
    }


def _norm(x):
    if isinstance(x, (list, tuple)):
        return [_norm(y) for y in x]
    if hasattr(x, "tolist"):
        return x.tolist()
    return x


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    found = backends()
    names = list(found)
    print(f"{'kernel':<18}" + "".join(f"{n:>12}" for n in names)
          + ("     speedup" if len(names) > 1 else ""))
    for kernel, run in cases().items():
        times, outs = [], []
        for n in names:
            dt, out = best_of(lambda: run(found[n]), args.repeat)
            times.append(dt)
            outs.append(_norm(out))
        if any(o != outs[0] for o in outs):
            raise SystemExit(f"{kernel}: backends disagree")
        line = f"{kernel:<18}" + "".join(f"{t * 1000:>10.2f}ms" for t in times)
        if len(times) > 1:
            line += f"{times[0] / times[1]:>11.1f}x"
        print(line)
    if len(names) == 1:
        print("compiled extension not built; only the Python backend was timed")


if __name__ == "__main__":
    main()
