"""High-precision oracle for RK tableau constants and misc frozen test values.

Not part of the deliverable; used to derive/verify constants before freezing
them into Rust tests.
"""
import sympy as sp
from sympy import Rational as R, sqrt, nsimplify

def legendre_shifted_roots(s):
    x = sp.symbols('x')
    P = sp.legendre(s, 2*x - 1)
    return sorted(sp.nroots(sp.Poly(P, x), n=40))

def vander_solve(c, rhs_fn, s):
    # solve sum_j v_j c_j^{k-1} = rhs(k), k=1..s
    A = sp.Matrix([[c[j]**(k-1) for j in range(s)] for k in range(1, s+1)])
    b = sp.Matrix([rhs_fn(k) for k in range(1, s+1)])
    return A.solve(b)

def collocation(c, s):
    # a_{ij}: sum_j a_ij c_j^{k-1} = c_i^k / k
    a = sp.zeros(s, s)
    for i in range(s):
        sol = vander_solve(c, lambda k: c[i]**k / k, s)
        for j in range(s):
            a[i, j] = sol[j]
    b = vander_solve(c, lambda k: R(1, k), s)
    return a, b

def conjugate(a, b, s):
    # symplectic conjugate: abar_ij = b_j - b_j*a_ji/b_i
    ab = sp.zeros(s, s)
    for i in range(s):
        for j in range(s):
            ab[i, j] = b[j] - b[j]*a[j, i]/b[i]
    return ab

def sympl_residual(a, abar, b, s):
    r = 0
    for i in range(s):
        for j in range(s):
            r = max(r, abs(sp.N(b[i]*abar[i, j] + b[j]*a[j, i] - b[i]*b[j], 40)))
    return r

def rinf(a, b, s):
    try:
        ainv = a.inv()
    except Exception:
        return None
    e = sp.ones(s, 1)
    return sp.N(1 - (sp.Matrix([b]).reshape(1, s) * ainv * e)[0, 0], 30)

print("=== Gauss-Legendre ===")
for s in range(1, 7):
    c = legendre_shifted_roots(s)
    a, b = collocation(c, s)
    print(f"s={s} c={[sp.N(x,25) for x in c]}")
    print(f"  b={[sp.N(x,25) for x in b]}")
    if s <= 3:
        print(f"  a={[[sp.N(a[i,j],25) for j in range(s)] for i in range(s)]}")
    print(f"  sympl_res={sympl_residual(a,a,b,s)}  Rinf={rinf(a,b,s)}")

print("\n=== Lobatto nodes/weights and families ===")
lob_c = {2: [0, 1], 3: [0, R(1,2), 1],
         4: [0, (5-sqrt(5))/10, (5+sqrt(5))/10, 1]}
for s in (2, 3, 4):
    c = lob_c[s]
    aA, b = collocation(c, s)   # IIIA = collocation at Lobatto nodes
    aA = sp.simplify(aA); b = sp.simplify(b)
    aB = sp.simplify(conjugate(aA, b, s))
    # IIIC: a_i1 = b_1, collocation-type conditions k=1..s-1
    aC = sp.zeros(s, s)
    for i in range(s):
        A = sp.zeros(s, s); rhs = sp.zeros(s, 1)
        A[0, 0] = 1; rhs[0] = b[0]
        for k in range(1, s):
            for j in range(s):
                A[k, j] = c[j]**(k-1)
            rhs[k] = c[i]**k / k
        # conditions: row0: a_i1 = b1 ; rows 1..s-1: sum a_ij c_j^{k-1} = c_i^k/k for k=1..s-1
        sol = A.solve(rhs)
        for j in range(s):
            aC[i, j] = sp.nsimplify(sp.simplify(sol[j]), [sqrt(5)])
    aCs = sp.simplify(conjugate(aC, b, s))
    aD = sp.simplify((aA + aB)/2)
    aE = sp.simplify((aC + aCs)/2)
    print(f"s={s}: b={[sp.nsimplify(x,[sqrt(5)]) for x in b]}")
    for name, m in (("IIIA", aA), ("IIIB", aB), ("IIIC", aC), ("IIIC*", aCs), ("IIID", aD), ("IIIE", aE)):
        rows = [[sp.nsimplify(m[i, j], [sqrt(5)]) for j in range(s)] for i in range(s)]
        print(f"  {name}: {rows}")
    print(f"  pair residuals: A/B={sympl_residual(aA,aB,b,s)} B/A={sympl_residual(aB,aA,b,s)} C/C*={sympl_residual(aC,aCs,b,s)} D={sympl_residual(aD,aD,b,s)} E={sympl_residual(aE,aE,b,s)}")
    print(f"  Rinf: A={rinf(aA,b,s)} B={rinf(aB,b,s)} C={rinf(aC,b,s)} C*={rinf(aCs,b,s)} D={rinf(aD,b,s)} E={rinf(aE,b,s)}")

print("\n=== Radau IIA ===")
for s in (2, 3):
    x = sp.symbols('x')
    # right Radau points: roots of P_s(2x-1) - P_{s-1}(2x-1) ... standard: roots of (P_{s-1}(2x-1)+P_s(2x-1))/(x... use collocation at known nodes
    if s == 2:
        c = [R(1, 3), 1]
    else:
        c = [(4-sqrt(6))/10, (4+sqrt(6))/10, 1]
    a, b = collocation(c, s)
    a = sp.simplify(a); b = sp.simplify(b)
    print(f"s={s} c={[sp.nsimplify(ci,[sqrt(6)]) for ci in c]}")
    print(f"  a={[[sp.nsimplify(a[i,j],[sqrt(6)]) for j in range(s)] for i in range(s)]}")
    print(f"  b={[sp.nsimplify(x,[sqrt(6)]) for x in b]}")
    print(f"  self-sympl residual={sympl_residual(a,a,b,s)}  Rinf={rinf(a,b,s)}")

print("\n=== SRK3 ===")
s15 = sqrt(15)
a = sp.Matrix([[R(5,36), R(2,9), R(25,180)-s15/10],
               [R(5,36), R(2,9), R(5,36)],
               [R(25,180)+s15/10, R(2,9), R(5,36)]])
b = [R(5,18), R(4,9), R(5,18)]
c = [R(1,2)-s15/10, R(1,2), R(1,2)+s15/10]
print("row sums - c:", [sp.simplify(sum(a[i, j] for j in range(3)) - c[i]) for i in range(3)])
print("sympl residual:", sympl_residual(a, a, b, 3))
print("Rinf:", rinf(a, b, 3))

print("\n=== misc frozen values ===")
print("LV H(2,1) =", sp.N(2+1-sp.log(2), 30))
print("vortex H(q0) =", sp.N(R(1,100)/(2*sp.pi) * R(201,100)**2 * sp.log(R(4,100)), 30))
print("vortex P(q0) =", sp.N(R(1,10)*R(101,100)*R(201,100), 30))
print("tok theta3(2.5,0,0,0.1) =", sp.N(-sp.Rational(5,16)*1 - R(1,10)*4*R(5,2)/sqrt(R(65,4)), 30))
print("5/18 =", sp.N(R(5, 18), 40))
import struct
m = 5/18  # f64 nearest
print("5/18 machine =", repr(m), " corr =", sp.N(R(5, 18) - nsimplify(m, rational=True), 30))
corr = sp.N(R(5,18) - R(struct.unpack('<q', struct.pack('<d', m))[0] and 0 or 0), 5)  # unused
print("glrk2 a12 = 1/4 - sqrt(3)/6 =", sp.N(R(1,4)-sqrt(3)/6, 30))
print("glrk1 rinf=-1, glrk2 rinf=+1 (check above)")
print("kahan: f64(0.1) =", sp.N(nsimplify(0.1, rational=True), 30))
