"""Compare the compiled and pure-Python alignment kernels.

    python benchmarks/bench_align.py [--pairs 20000] [--max-len 8] [--repeat 3]

Also times fragment completion end to end on a synthetic collection under
each kernel (the pure run is a subprocess with OPENVOCAB_PURE=1).
"""

import argparse
import json
import os
import random
import subprocess
import sys
import time

from openvocab import _align_py

try:
    from openvocab import _align as _align_c
except ImportError:
    _align_c = None


def make_pairs(n, max_len, alphabet, seed):
    rng = random.Random(seed)
    seq = lambda: tuple(rng.randrange(alphabet) for _ in range(rng.randint(1, max_len)))
    return [(seq(), seq()) for _ in range(n)]


def time_kernel(fn, pairs, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for a, b in pairs:
            fn(a, b)
        best = min(best, time.perf_counter() - t0)
    return best


def completion_ms(pure, n_docs):
    code = (
        "import json; from openvocab import synth, BACKEND; from openvocab.config import Config;"
        "from openvocab.pipeline import System, run_experiment;"
        f"col = synth.generate(n_docs={n_docs}, n_topics=40, subtopics=5, seed=1);"
        "cfg = Config(K=col.vocab_size, p_sub=0.15, p_del=0.05, p_ins=0.05, seed=1);"
        "r = run_experiment(col.queries, System.build(col.docs, cfg), 4, cfg);"
        "print(json.dumps([BACKEND, r.ms_per_fragment]))"
    )
    env = dict(os.environ)
    env.pop("OPENVOCAB_PURE", None)
    if pure:
        env["OPENVOCAB_PURE"] = "1"
    out = subprocess.run([sys.executable, "-c", code], env=env, check=True, capture_output=True, text=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=20000)
    ap.add_argument("--max-len", type=int, default=8)
    ap.add_argument("--alphabet", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--docs", type=int, default=2000, help="collection size for the completion timing")
    args = ap.parse_args()

    pairs = make_pairs(args.pairs, args.max_len, args.alphabet, seed=0)
    py = time_kernel(_align_py.align_counts, pairs, args.repeat)
    print(f"align_counts  python  {py * 1e6 / len(pairs):8.2f} us/pair")
    if _align_c is None:
        print("align_counts  cython  (extension not built)")
    else:
        assert all(_align_c.align_counts(a, b) == _align_py.align_counts(a, b) for a, b in pairs[:2000])
        c = time_kernel(_align_c.align_counts, pairs, args.repeat)
        print(f"align_counts  cython  {c * 1e6 / len(pairs):8.2f} us/pair   speed-up x{py / c:.1f}")

    for pure in (False, True):
        backend, ms = completion_ms(pure, args.docs)
        print(f"completion    {backend:<7} {ms:8.3f} ms/fragment ({args.docs} docs)")


if __name__ == "__main__":
    main()
