"""Scratch batch 2: rows 6, 10, 12 with trimmed bases."""
import sys
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

def check(label, H, qt):
    Q = G.parse_operator(qt, hamiltonian=H)
    ok = DO.op_is_zero(DO.commutator(H, Q))
    print(f"{label}: {'PASS' if ok else 'FAIL'}", flush=True)

log = open("/root/pkg/_t4b_results.txt", "w")
sys.stdout = log

# ---- row 12 printed, direct: f=(r^4-eps)^2/(r^4-2 kappa r^2+1)
for eps in (1, -1):
    H = H_sym(f"(r^4-({eps}))^2/(r^4-2*kappa*r^2+1)",
              f"-alpha*r^2/(r^4-2*kappa*r^2+1)")
    lap4e = (f"(P1*{{r^4+({eps})}}*P1 + P2*{{r^4+({eps})}}*P2"
             f" + P3*{{r^4+({eps})}}*P3)")
    check(f"T4.12 sym eps={eps:+d} printed (1,2)",
          H, "anti(K1,K2) + P1*P2 + P2*P1 - anti(H + {6*kappa} + " + lap4e + ", {x1*x2/r^2})")

# ---- row 10 follow-up solve: f=(r^4-eps)^2/r^2, V=alpha(r^4+eps)/r^2
for eps in (1, -1):
    H = H_sym(f"(r^4-({eps}))^2/r^2", f"alpha*(r^4+({eps}))/r^2")
    lap14 = (f"(P1*{{1+({eps})*r^4}}*P1 + P2*{{1+({eps})*r^4}}*P2"
             f" + P3*{{1+({eps})*r^4}}*P3)")
    lap4e = (f"(P1*{{r^4+({eps})}}*P1 + P2*{{r^4+({eps})}}*P2"
             f" + P3*{{r^4+({eps})}}*P3)")
    print(f"T4.10 sym eps={eps:+d} solve (1,2):", flush=True)
    solve_combo(H, {
        "kk": "anti(K1,K2)", "pp": "P1*P2+P2*P1",
        "aL": "anti(" + lap14 + ", {x1*x2/r^2})",
        "aL2": "anti(" + lap4e + ", {x1*x2/r^2})",
        "aH": "anti(H, {x1*x2/r^2})",
        "sa": "{alpha*x1*x2/r^2}", "sb": "{x1*x2/r^2}",
        "sc": "{x1*x2}", "sd": "{x1*x2*r^2}",
    })

# ---- row 6 solve: f=(r^2+eps)^2 r/(r^2-2 kappa r-1)
for eps in (1, -1):
    H = H_sym(f"(r^2+({eps}))^2*r/(r^2-2*kappa*r-1)",
              f"alpha*r/(r^2-2*kappa*r-1)")
    print(f"T4.06 sym eps={eps:+d} solve:", flush=True)
    solve_combo(H, {
        "lp": "anti(L3,P2) - anti(L2,P3)",
        "lk": "anti(L3,K2) - anti(L2,K3)",
        "hx": "anti(H,{x1/r})",
        "s1": "{alpha*x1/r}",
    })

print("DONE", flush=True)
