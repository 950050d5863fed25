"""Scratch: resolve remaining row corrections for the catalog."""
import time
from pdmverify import grammar as G
from pdmverify import diffop as DO
from pdmverify import symexpr as S
from pdmverify.linsolve import solve_combo

def H_of(ftxt, vtxt):
    return DO.hamiltonian(G.parse_scalar(ftxt), G.parse_scalar(vtxt))

def run(label, H, cands, constraints=None):
    t0 = time.time()
    sols = solve_combo(H, cands, constraints)
    print(f"{label}: nullspace dim {len(sols)}  ({time.time()-t0:.0f}s)", flush=True)
    for s in sols:
        print("   ", {k: str(v) for k, v in s.items() if v}, flush=True)

def check(label, H, qtxt, constraints=None):
    t0 = time.time()
    Q = G.parse_operator(qtxt, hamiltonian=H)
    ok = DO.op_is_zero(DO.commutator(H, Q), constraints)
    print(f"{label}: {'ZERO' if ok else 'NONZERO'}  ({time.time()-t0:.0f}s)", flush=True)

# --- T1.02: f = r^2 F(theta), V = c F(theta) phi + G(theta)
H = H_of("r^2*F(theta)", "c*F(theta)*phi + G(theta)")
run("T1.02 {L3,D}+? lnr", H, {"ld": "anti(L3,D)", "sl": "{c*lnr}", "sp": "{c*phi}"})

# --- T1.04: f = rt^2 F(phi), V = c F(phi) x3/r + G(phi)
H = H_of("rt^2*F(phi)", "c*F(phi)*x3/r + G(phi)")
run("T1.04 q1 {P3,D}+? c/r", H, {"pd": "anti(P3,D)", "s": "{c/r}"})
run("T1.04 q2 {K3,D}+? c*r", H, {"kd": "anti(K3,D)", "s": "{c*r}"})
run("T1.04 q3 {P3,K3}+? c*x3/r", H, {"pk": "anti(P3,K3)", "s": "{c*x3/r}"})

# --- T2.01: f = r^2, V = c r^2/x3^2
H = H_of("r^2", "c*r^2/x3^2")
run("T2.01 q1 L2^2-L1^2+?", H,
    {"l22": "L2*L2", "l11": "L1*L1", "s": "{c*(x2^2-x1^2)/x3^2}"})
run("T2.01 q2 {L1,L2}+?", H, {"l12": "anti(L1,L2)", "s": "{c*x1*x2/x3^2}"})

# --- T2.05 (must-pass): f = x3^2, V = c x3^2/x1^2, corrected signs
H = H_of("x3^2", "c*x3^2/x1^2")
check("T2.05 {L3,P1}-2c*x2/x1^2", H, "anti(L3,P1) - {2*c*x2/x1^2}")
check("T2.05 {L3,K1}-2c*x2*r^2/x1^2", H, "anti(L3,K1) - {2*c*x2*r^2/x1^2}")
run("T2.05 q4 solve", H, {"lp": "anti(L3,P1)", "s": "{c*x2/x1^2}"})
run("T2.05 q5 solve", H, {"lk": "anti(L3,K1)", "s": "{c*x2*r^2/x1^2}"})

# --- T2.04: f = x3^2, V = c1 x3^2 x2/(rt x1^2) + c2 x3^2/x1^2
H = H_of("x3^2", "c1*x3^2*x2/(rt*x1^2) + c2*x3^2/x1^2")
run("T2.04 q1 {L3,P1}", H,
    {"lp": "anti(L3,P1)", "s2": "{c2*x2/x1^2}",
     "s1": "{c1*(2*x2^2+x1^2)/(rt*x1^2)}"})
run("T2.04 q2 {L3,K1}", H,
    {"lk": "anti(L3,K1)", "s2": "{c2*x2*r^2/x1^2}",
     "s1": "{c1*(2*x2^2+x1^2)*r^2/(rt*x1^2)}"})
run("T2.04 q3 P^2", H,
    {"pp": "P1*P1+P2*P2", "s": "{(c1*x2/rt + c2)/x1^2}"})
run("T2.04 q4 K^2", H,
    {"kk": "K1*K1+K2*K2", "s": "{(c1*x2/rt + c2)*r^4/x1^2}"})
run("T2.04 q5 L3^2", H,
    {"ll": "L3*L3", "s1": "{c1*rt*x2/x1^2}", "s2": "{c2*rt^2/x1^2}"})

# --- T2.07: f = x3^2, V = c rt^2/r^2
H = H_of("x3^2", "c*rt^2/r^2")
check("T2.07 q1", H, "anti(K1,P1) - anti(K2,P2) + {2*c*(x1^2-x2^2)/r^2}")
check("T2.07 q2", H, "anti(K1,P2) + anti(K2,P1) + {4*c*x1*x2/r^2}")

# --- T2.11: f = rt^2, V = c x3/r
H = H_of("rt^2", "c*x3/r")
check("T2.11 {K3,D}-c*r", H, "anti(K3,D) - {c*r}")
check("T2.11 {P3,K3}+2c*x3/r", H, "anti(P3,K3) + {2*c*x3/r}")
check("T2.11 {P3,D}-c/r", H, "anti(P3,D) - {c/r}")

# --- T3.03: f = x2^2, V = c x1/rt
H = H_of("x2^2", "c*x1/rt")
run("T3.03 q1", H, {"pd": "anti(P1,D)", "pl": "anti(P3,L2)", "s": "{c/rt}"})
run("T3.03 q2", H,
    {"kd": "anti(K1,D)", "kl": "anti(K3,L2)", "s": "{c*r^2/rt}",
     "s2": "{c*x1*rt}", "s3": "{c*x1^2/rt}"})

# --- T2.09 / T2.10: E^{+-} rows, f = rt^2
H = H_of("rt^2",
         "c1*exp(-phi)*exp(-phi)*(r^2+x3^2)/rt^2 + c2*exp(-phi)*x3/rt")
check("T2.09 q1", H,
      "anti(P3, L3+D) + {c1*exp(-phi)*exp(-phi)*x3/rt^2 + c2*exp(-phi)/rt}")
check("T2.09 q2", H,
      "anti(K3, L3+D) + {c1*exp(-phi)*exp(-phi)*r^2*x3/rt^2"
      " + c2*exp(-phi)*r^2/rt}")
H = H_of("rt^2",
         "c1*exp(phi)*exp(phi)*(r^2+x3^2)/rt^2 + c2*exp(phi)*x3/rt")
check("T2.10 q1", H,
      "anti(P3, L3-D) - {c1*exp(phi)*exp(phi)*x3/rt^2 + c2*exp(phi)/rt}")
check("T2.10 q2", H,
      "anti(K3, L3-D) - {c1*exp(phi)*exp(phi)*r^2*x3/rt^2"
      " + c2*exp(phi)*r^2/rt}")
