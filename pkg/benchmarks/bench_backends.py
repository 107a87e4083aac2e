"""Time the compiled and pure-Python decoding engines on identical frames.

Usage:
    python3 benchmarks/bench_backends.py [--frames 200] [--esn0 1.0]

Both engines decode the same LLRs; the script also checks that their
survivor lists and path metrics agree.
"""

import argparse
import time

import numpy as np

from pspolar import backend
from pspolar.list_decoder import decode_scl, decode_sscl
from pspolar.polar_code import CodeConfig
from pspolar.ps_select import SelectionProfile
from pspolar.simulation import make_frame

CASES = (
    ("SCL L=8 (bit level)", 4, 8, None, "scl"),
    ("SSCL L=32 Nv=4", 4, 32, None, "sscl"),
    ("PS-SCL L=32 Nv=4 (4,2,1)", 4, 32, (4, 2, 1), "sscl"),
    ("SSCL L=32 Nv=8", 8, 32, None, "sscl"),
    ("PS-SCL L=32 Nv=8 (8,4,2)", 8, 32, (8, 4, 2), "sscl"),
)


def run(name, code, llrs, list_size, profile, kind):
    out = []
    start = time.perf_counter()
    for llr in llrs:
        if kind == "scl":
            out.append(decode_scl(code, llr, list_size, backend_name=name))
        else:
            out.append(decode_sscl(code, llr, list_size, profile, backend_name=name))
    return (time.perf_counter() - start) / len(llrs), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=200)
    ap.add_argument("--python-frames", type=int, default=20, help="frames for the slow engine")
    ap.add_argument("--esn0", type=float, default=1.0)
    args = ap.parse_args()

    if not backend.has_compiled():
        print("compiled extension not built; only the Python engine is available")
    print(f"{'case':28s} {'python ms':>10s} {'compiled ms':>12s} {'speedup':>8s}  agree")
    for label, nv, L, prof, kind in CASES:
        code = CodeConfig.from_pw(128, 38, 11, node_size=nv)
        llrs = [make_frame(code, args.esn0, 123, i)[1] for i in range(args.frames)]
        profile = None if prof is None else SelectionProfile(prof)
        t_py, res_py = run("python", code, llrs[: args.python_frames], L, profile, kind)
        if backend.has_compiled():
            t_c, res_c = run("compiled", code, llrs, L, profile, kind)
            agree = all(np.array_equal(a.survivors, b.survivors) and np.allclose(a.path_metrics, b.path_metrics)
                        for a, b in zip(res_py, res_c))
            print(f"{label:28s} {t_py * 1e3:10.2f} {t_c * 1e3:12.3f} {t_py / t_c:8.1f}  {agree}")
        else:
            print(f"{label:28s} {t_py * 1e3:10.2f} {'-':>12s} {'-':>8s}  -")


if __name__ == "__main__":
    main()
