"""Independent symbolic oracles for frozen test values.

Run with `python3 tests/oracles/symbolic_oracles.py`; the printed numbers are
copied into the C++ unit tests. Nothing here shares code with the library.
"""
import sympy as sp

r = sp.symbols("r", positive=True)


def scalar_curvature_conformal(phi):
    lap = sp.diff(phi, r, 2) + 2 * sp.diff(phi, r) / r
    return sp.simplify(-8 * phi**-5 * lap)


def radial_divx_sides(phi, u, p, c):
    """Both sides of the div X identity for a radial potential u on phi^4 delta."""
    p = sp.nsimplify(p)
    du = sp.diff(u, r)
    grad = du / phi**2                       # |grad u|_g
    d_nu_grad = sp.diff(grad, r) / phi**2    # <grad |grad u|, nu>
    H = (2 / r + 4 * sp.diff(phi, r) / phi) / phi**2
    lap_u = d_nu_grad + grad * H
    B = (3 - p) / (p - 1) * (1 - u)
    a = (p - 1) / (3 - p)
    A = c**a / B**a * (grad**(p - 1) / c**(p - 1) + (d_nu_grad - lap_u) / B + grad**2 / B**2)
    direct = sp.diff(phi**4 * r**2 * A, r) / (phi**6 * r**2)
    R = scalar_curvature_conformal(phi)
    R_sigma = 2 / (r**2 * phi**4)
    geometric = c**a * grad / B**(a + 1) * (
        grad**(p - 1) / c**(p - 1) - R_sigma / 2 + R / 2
        + (5 - p) / (p - 1) * (grad / B - H / 2) ** 2)
    return direct, geometric, lap_u, (2 - p) * d_nu_grad


def main():
    phi = 1 + 1 / (2 * r) + sp.Rational(1, 10) / r**2
    R = scalar_curvature_conformal(phi)
    print("R(phi=1+1/(2r)+0.1/r^2, r=2) =", sp.N(R.subs(r, 2), 17))

    m = 1
    phi_s = 1 + sp.Rational(m, 2) / r
    u_s = (1 - 1 / (2 * r)) / (1 + 1 / (2 * r))
    print("Schwarzschild R =", scalar_curvature_conformal(phi_s))
    direct, geometric, lap, pde = radial_divx_sides(phi_s, u_s, 2, 1)
    print("Schwarzschild p=2 Delta u - (2-p)... =", sp.simplify(lap - pde))
    print("Schwarzschild p=2 r=2 divX direct    =", sp.N(direct.subs(r, 2), 17))
    print("Schwarzschild p=2 r=2 divX geometric =", sp.N(geometric.subs(r, 2), 17))

    # flat p=2, u = 1 - 1/r at r = 2: Kato sides in closed form
    u_f = 1 - 1 / r
    du = sp.diff(u_f, r)
    d2u = sp.diff(u_f, r, 2)
    hess_sq = d2u**2 + 2 * (du / r) ** 2
    grad_grad_sq = d2u**2
    p = 2
    lhs = hess_sq - (1 + sp.Rational((p - 1) ** 2, 2)) * grad_grad_sq
    print("flat p=2 r=2 Kato lhs =", sp.N(lhs.subs(r, 2), 17), "(rhs is 0 by symmetry)")
    print("flat p=2 r=2 |hess u|^2 =", sp.N(hess_sq.subs(r, 2), 17))

    # Schwarzschild p=2 closed-form F, M, Q along t
    t = sp.symbols("t", positive=True)
    print("F_2(t) closed form = 8*pi - 3*pi/t ; F(1) =", sp.N(8 * sp.pi - 3 * sp.pi, 17))


if __name__ == "__main__":
    main()
