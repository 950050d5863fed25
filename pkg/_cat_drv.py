"""Scratch: build+verify every catalog entry end to end."""
import sys
import time
from fractions import Fraction as Fr
from pdmverify import catalog as CAT
from pdmverify import diffop as DO
from pdmverify import grammar as G

ONLY = set(sys.argv[1:])
SKIP = {"ROT.06", "ROT.12"}
PREFERRED_N = {
    "ROT.03": [(Fr(-1), Fr(-1)), (Fr(-1), Fr(1))],
    "ROT.04": [(Fr(-1), Fr(1))],
    "ROT.09": [(Fr(1), Fr(1))],
}

entries = CAT.load_catalog()
print(f"loaded {len(entries)} entries", flush=True)

def verify_built(built):
    cons = built.constraints
    bad = []
    for i, q in enumerate(built.integrals):
        if not DO.op_is_zero(DO.commutator(built.hamiltonian, q), cons):
            bad.append(f"Q{i+1}")
    for name, op in built.first_order:
        if not DO.op_is_zero(DO.commutator(built.hamiltonian, op), cons):
            bad.append(name)
    return bad

for e in entries:
    if ONLY and e.entry_id not in ONLY:
        continue
    if not ONLY and e.entry_id in SKIP:
        print(f"{e.entry_id}: SKIPPED", flush=True)
        continue
    eps_vals = [Fr(1), Fr(-1)] if "epsilon" in e.params else [None]
    for ev in eps_vals:
        t0 = time.time()
        pv = {"epsilon": ev} if ev is not None else None
        tag = f"{e.entry_id}" + (f" eps={ev}" if ev is not None else "")
        if e.uses_n_token:
            cands = PREFERRED_N.get(e.entry_id, [])
            cands = cands + [c for c in CAT.n_epsilon_candidates()
                             if c not in cands]
            winner = None
            for nd in cands:
                built = CAT.build_entry(e, n_def=nd, param_values=pv)
                if not verify_built(built):
                    winner = nd
                    break
            dt = time.time() - t0
            if winner:
                print(f"{tag}: PASS with N=({winner[0]},{winner[1]})  ({dt:.0f}s)",
                      flush=True)
            else:
                print(f"{tag}: FAIL all N candidates  ({dt:.0f}s)", flush=True)
        else:
            built = CAT.build_entry(e, param_values=pv)
            bad = verify_built(built)
            dt = time.time() - t0
            status = "PASS" if not bad else f"FAIL {bad}"
            print(f"{tag}: {status}  ({dt:.0f}s)", flush=True)
