"""Scratch: T1.08 pullback entry, T2.02 direct check, T2.03 broad solve."""
import time
from fractions import Fraction as Fr
from pdmverify import grammar as G
from pdmverify import diffop as DO
from pdmverify import symexpr as S
from pdmverify.symexpr import Scalar
from pdmverify.linsolve import solve_combo
from pdmverify.detsys import solve_eta

def H_of(ftxt, vtxt):
    return DO.hamiltonian(G.parse_scalar(ftxt), G.parse_scalar(vtxt))

def run(label, H, cands, constraints=None):
    t0 = time.time()
    sols = solve_combo(H, cands, constraints)
    print(f"{label}: nullspace dim {len(sols)}  ({time.time()-t0:.0f}s)", flush=True)
    for s in sols:
        print("   ", {k: str(v) for k, v in s.items() if v}, flush=True)

# ---------- T2.02 direct check
t0 = time.time()
vtxt = ("alpha*x3^2/((kappa^2-kappa*omega)*x1^2 + (mu^2-mu*omega)*x2^2"
        " - (kappa-omega)*(mu-omega)*x3^2)")
V = G.parse_scalar(vtxt)
H = DO.hamiltonian(G.parse_scalar("x3^2"), V)
eta = G.parse_scalar("(kappa*x1^2 + mu*x2^2 + omega*x3^2)/x3^2") * V
Q = DO.op_add(
    DO.op_add(
        DO.op_scale(G.parse_operator("anti(P1,K1)"), S.param("mu")),
        DO.op_scale(G.parse_operator("anti(P2,K2)"), S.param("kappa")),
    ),
    DO.scalar_op(Fr(2) * eta),
)
ok = DO.op_is_zero(DO.commutator(H, Q))
print(f"T2.02 direct: {'ZERO' if ok else 'NONZERO'}  ({time.time()-t0:.0f}s)",
      flush=True)

# ---------- T2.03 broad solve
H = H_of("x2^2", "c1*x2^2/x3^2 + c2*x1/rt")
run("T2.03 q1", H, {
    "pd": "anti(P1,D)", "pl": "anti(P3,L2)",
    "s2": "{c2/rt}", "sa": "{c1*x1/x3^2}", "sb": "{c1*x1/x2^2}",
    "sc": "{c1*x1/rt^2}", "sd": "{c1*x1*rt^2/(x2^2*x3^2)}",
})
run("T2.03 q2", H, {
    "kd": "anti(K1,D)", "kl": "anti(K3,L2)",
    "s2": "{c2*r^2/rt}", "sa": "{c1*r^2*x1/x2^2}", "sb": "{c1*r^2*x1/x3^2}",
    "sc": "{c1*x1*rt^2/x2^2}", "sd": "{c1*x1}",
})

# ---------- T1.08: s=2 pullback with (a,b) = (3/5, 4/5)
a, b = Fr(3, 5), Fr(4, 5)
x1, x2, x3 = S.x1, S.x2, S.x3
y1 = x1 / x3
y2 = x2 / x3
cx = Scalar.constant
xx = cx(a) * y1 ** 2 - cx(b) * y2 ** 2 + cx(a * b * (b - a))
ynum = cx(b) * y1 ** 2 + cx(a) * y2 ** 2 + cx((a - b) * (a * a - b * b))
V = ynum ** 2 / cx(a * b * (b - a)) + xx
print("T1.08 V =", G.scalar_to_string(V), flush=True)

V1, V2, V3 = V.grad()
for mu_c, kap_c, tag in ((b, a, "mu=b,kappa=a"), (a, b, "mu=a,kappa=b")):
    g1 = (cx(mu_c) * (x2 ** 2 + x3 ** 2) * V1 - cx(kap_c) * x1 * x2 * V2) / x3 ** 2
    g2 = (cx(kap_c) * (x1 ** 2 + x3 ** 2) * V2 - cx(mu_c) * x1 * x2 * V1) / x3 ** 2
    g3 = -(x1 * g1 + x2 * g2) / x3
    try:
        eta = solve_eta((g1, g2, g3))
    except Exception as exc:
        print(f"T1.08 ({tag}): solve_eta failed: {exc}", flush=True)
        continue
    print(f"T1.08 ({tag}): eta = {G.scalar_to_string(eta)}", flush=True)
    H = DO.hamiltonian(x3 ** 2, V)
    Q = DO.op_add(
        DO.op_add(
            DO.op_scale(G.parse_operator("anti(P1,K1)"), cx(mu_c)),
            DO.op_scale(G.parse_operator("anti(P2,K2)"), cx(kap_c)),
        ),
        DO.scalar_op(Fr(2) * eta),
    )
    ok = DO.op_is_zero(DO.commutator(H, Q))
    print(f"T1.08 ({tag}) commutes: {ok}", flush=True)
