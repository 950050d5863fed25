"""Scratch batch: resolve remaining Table-4 rows with literal epsilon."""
import sys
from pdmverify import grammar as G
from pdmverify import diffop as DO
from pdmverify import symexpr as S
from _solve import solve_combo

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

log = open("/root/pkg/_t4_results.txt", "w")
sys.stdout = log

# ---- row 4: f=(1+eps r^2)^2, V=alpha(1-eps r^2)/r, Q = eps{L,N} - alpha x/r
for eps in (1, -1):
    H = H_sym(f"(1+({eps})*r^2)^2", f"alpha*(1-({eps})*r^2)/r")
    print(f"T4.04 sym eps={eps:+d} solve:", flush=True)
    solve_combo(H, {
        "lp": "anti(L3,P2) - anti(L2,P3)",
        "lk": "anti(L3,K2) - anti(L2,K3)",
        "s1": "{alpha*x1/r}", "s2": "{x1/r}", "s3": "{x1}", "s4": "{x1*r}",
    })

# ---- row 9: f=(r^2-eps)^2, V=alpha r^2/(r^2+eps)^2, Q_ab={N_a,N_b}+2a x_a x_b/(r^2+eps)^2
for eps in (1, -1):
    H = H_sym(f"(r^2-({eps}))^2", f"alpha*r^2/(r^2+({eps}))^2")
    print(f"T4.09 sym eps={eps:+d} solve (1,2):", flush=True)
    solve_combo(H, {
        "pp": "P1*P2+P2*P1", "kk": "anti(K1,K2)",
        "pk": "anti(P1,K2)+anti(P2,K1)",
        "s1": f"{{alpha*x1*x2/(r^2+({eps}))^2}}",
        "s2": f"{{x1*x2/(r^2+({eps}))^2}}",
        "s3": "{x1*x2}", "s4": "{x1*x2/r^2}",
    })

# ---- row 11: f=1/(r^2+eps), V=alpha/(r^2+eps)
for eps in (1, -1):
    H = H_sym(f"1/(r^2+({eps}))", f"alpha/(r^2+({eps}))")
    check(f"T4.11 sym eps={eps:+d} printed (1,1)",
          H, f"2*P1*P1 - anti({{x1^2}}, H + {{1/(r^2+({eps}))^2}})")
    check(f"T4.11 sym eps={eps:+d} printed (1,2)",
          H, f"2*P1*P2 - anti({{x1*x2}}, H + {{1/(r^2+({eps}))^2}})")

# ---- row 10: f=(r^4-eps)^2/r^2, V=alpha(r^4+eps)/r^2
for eps in (1, -1):
    H = H_sym(f"(r^4-({eps}))^2/r^2", f"alpha*(r^4+({eps}))/r^2")
    lap14 = (f"(P1*{{1+({eps})*r^4}}*P1 + P2*{{1+({eps})*r^4}}*P2"
             f" + P3*{{1+({eps})*r^4}}*P3)")
    check(f"T4.10 sym eps={eps:+d} printed (1,2)",
          H, "anti(K1,K2) + P1*P2 + P2*P1 - anti(" + lap14 + " + {alpha}, {x1*x2/r^2})")
    check(f"T4.10 sym eps={eps:+d} printed (1,1)",
          H, "anti(K1,K1) + 2*P1*P1 - anti(" + lap14 + " + {alpha}, {x1^2/r^2})")

# ---- row 6: f=(r^2+eps)^2 r/(r^2-2 kappa r-1), V=alpha r/(r^2-2 kappa r-1)
for eps in (1, -1):
    H = H_sym(f"(r^2+({eps}))^2*r/(r^2-2*kappa*r-1)",
              f"alpha*r/(r^2-2*kappa*r-1)")
    print(f"T4.06 sym eps={eps:+d} solve:", flush=True)
    solve_combo(H, {
        "lp": "anti(L3,P2) - anti(L2,P3)",
        "lk": "anti(L3,K2) - anti(L2,K3)",
        "hx": "anti(H,{x1/r})",
        "s1": "{alpha*x1/r}", "s2": "{x1/r}", "s3": "{x1}", "s4": "{x1*r}",
    })

# ---- row 12: f=(r^4-eps)^2/(r^4-2 kappa r^2+1), V=-alpha r^2/(r^4-2 kappa r^2+1)
for eps in (1, -1):
    H = H_sym(f"(r^4-({eps}))^2/(r^4-2*kappa*r^2+1)",
              f"-alpha*r^2/(r^4-2*kappa*r^2+1)")
    lap4e = (f"(P1*{{r^4+({eps})}}*P1 + P2*{{r^4+({eps})}}*P2"
             f" + P3*{{r^4+({eps})}}*P3)")
    check(f"T4.12 sym eps={eps:+d} printed (1,2)",
          H, "anti(K1,K2) + P1*P2 + P2*P1 - anti(H + {6*kappa} + " + lap4e + ", {x1*x2/r^2})")

print("DONE", flush=True)
