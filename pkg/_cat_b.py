"""Scratch: T2.09 / T2.10 nullspace solves."""
import time
from pdmverify import grammar as G
from pdmverify import diffop as DO
from pdmverify.linsolve import solve_combo

def H_of(ftxt, vtxt):
    return DO.hamiltonian(G.parse_scalar(ftxt), G.parse_scalar(vtxt))

def run(label, H, cands):
    t0 = time.time()
    sols = solve_combo(H, cands)
    print(f"{label}: nullspace dim {len(sols)}  ({time.time()-t0:.0f}s)", flush=True)
    for s in sols:
        print("   ", {k: str(v) for k, v in s.items() if v}, flush=True)

Em2 = "exp(-phi)*exp(-phi)"
H = H_of("rt^2", f"c1*{Em2}*(r^2+x3^2)/rt^2 + c2*exp(-phi)*x3/rt")
run("T2.09 q1", H, {
    "pl": "anti(P3,L3)", "pd": "anti(P3,D)",
    "s1": "{c1*" + Em2 + "*x3/rt^2}", "s2": "{c2*exp(-phi)/rt}",
})
run("T2.09 q2", H, {
    "kl": "anti(K3,L3)", "kd": "anti(K3,D)",
    "s1": "{c1*" + Em2 + "*r^2*x3/rt^2}", "s2": "{c2*exp(-phi)*r^2/rt}",
})

Ep2 = "exp(phi)*exp(phi)"
H = H_of("rt^2", f"c1*{Ep2}*(r^2+x3^2)/rt^2 + c2*exp(phi)*x3/rt")
run("T2.10 q1", H, {
    "pl": "anti(P3,L3)", "pd": "anti(P3,D)",
    "s1": "{c1*" + Ep2 + "*x3/rt^2}", "s2": "{c2*exp(phi)/rt}",
})
run("T2.10 q2", H, {
    "kl": "anti(K3,L3)", "kd": "anti(K3,D)",
    "s1": "{c1*" + Ep2 + "*r^2*x3/rt^2}", "s2": "{c2*exp(phi)*r^2/rt}",
})
