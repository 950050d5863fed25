"""Scratch batch 5: row 12 eps=-1 with widened candidate basis."""
import sys, time
from pdmverify import grammar as G
from pdmverify import diffop as DO
from pdmverify import symexpr as S
from pdmverify.linsolve import solve_combo

def shift(f):
    g1, g2, g3 = f.grad()
    lap = g1.diff(1) + g2.diff(2) + g3.diff(3)
    gg = g1*g1 + g2*g2 + g3*g3
    return lap/S.Scalar.constant(2) - gg/(S.Scalar.constant(4)*f)

def H_sym(ftxt, vtxt):
    f = G.parse_scalar(ftxt); V = G.parse_scalar(vtxt)
    return DO.hamiltonian(f, V - shift(f))

def run(label, H, cands):
    t0 = time.time()
    sols = solve_combo(H, cands)
    print(f"{label}: nullspace dim {len(sols)}  ({time.time()-t0:.0f}s)", flush=True)
    for s in sols:
        print("   ", {k: str(v) for k, v in s.items() if v}, flush=True)

log = open("/root/pkg/_t4e_results.txt", "w")
sys.stdout = log

eps = -1
for kap in ("2", "3"):
    H = H_sym(f"(r^4-({eps}))^2/(r^4-2*({kap})*r^2+1)",
              f"-alpha*r^2/(r^4-2*({kap})*r^2+1)")
    lap4e = (f"(P1*{{r^4+({eps})}}*P1 + P2*{{r^4+({eps})}}*P2"
             f" + P3*{{r^4+({eps})}}*P3)")
    run(f"T4.12 eps={eps:+d} kappa={kap} wide", H, {
        "kk": "anti(K1,K2)", "pp": "P1*P2+P2*P1",
        "pk": "anti(P1,K2)+anti(P2,K1)",
        "ll": "L1*L2+L2*L1",
        "aL": "anti(" + lap4e + ", {x1*x2/r^2})",
        "aLap": "anti(P1*P1+P2*P2+P3*P3, {x1*x2/r^2})",
        "aLap0": "anti(P1*P1+P2*P2+P3*P3, {x1*x2})",
        "aH": "anti(H, {x1*x2/r^2})",
        "aH0": "anti(H, {x1*x2})",
        "aHm": "anti(H, {x1*x2/r^4})",
        "sa": "{alpha*x1*x2/r^2}",
        "sb": "{x1*x2/r^2}",
        "sd": "{x1*x2}", "sg": "{x1*x2*r^2}", "se": "{x1*x2/r^4}",
    })

print("DONE", flush=True)
