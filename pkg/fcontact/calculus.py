"""
Differential operators evaluated pointwise from first-order jets.

The exterior derivative carries the 1/2 factor:
``d eta(X, Y) = 1/2 (X eta(Y) - Y eta(X) - eta([X, Y]))``.
Under this convention the Cartan formula reads
``L_X theta = 2 i_X d theta + d(theta(X))``.
"""
import numpy as np

from .constants import FLOW_STEP, FLOW_TIME
from .fields import ScalarField, act, coordinate_frame, field_einsum, pair


def lie_bracket(X, Y, p):
    """[X, Y]^k = X^j d_j Y^k - Y^j d_j X^k at p."""
    jx = X.jet(p)
    jy = Y.jet(p)
    return jy.partials @ jx.value - jx.partials @ jy.value


def derivative_along(X, h, p):
    """X(h) at p for a scalar field h."""
    return float(h.jet(p).directional(X.value(p)))


def d_oneform(eta, X, Y, p):
    x_eta_y = derivative_along(X, pair(eta, Y), p)
    y_eta_x = derivative_along(Y, pair(eta, X), p)
    return 0.5 * (x_eta_y - y_eta_x - float(eta.value(p) @ lie_bracket(X, Y, p)))


def lie_derivative_oneform(X, theta):
    """(L_X theta)(Y) = X(theta(Y)) - theta([X, Y])."""
    def evaluate(Y, p):
        return derivative_along(X, pair(theta, Y), p) - float(theta.value(p) @ lie_bracket(X, Y, p))
    return evaluate


def lie_derivative_t11(X, f):
    """(L_X f)(Y) = [X, fY] - f([X, Y])."""
    def evaluate(Y, p):
        return lie_bracket(X, act(f, Y), p) - f.value(p) @ lie_bracket(X, Y, p)
    return evaluate


def lie_derivative_metric(X, g):
    """(L_X g)(Y, Z) = X(g(Y, Z)) - g([X, Y], Z) - g(Y, [X, Z])."""
    def evaluate(Y, Z, p):
        g_p = g.value(p)
        g_yz = _bilinear_pairing(g, Y, Z)
        return (derivative_along(X, g_yz, p)
                - float(lie_bracket(X, Y, p) @ g_p @ Z.value(p))
                - float(Y.value(p) @ g_p @ lie_bracket(X, Z, p)))
    return evaluate


def _bilinear_pairing(g, Y, Z):
    return field_einsum(ScalarField, 'ab,a,b->', g, Y, Z)


def nijenhuis(f):
    """[f,f](X, Y) = f^2 [X,Y] + [fX, fY] - f [X, fY] - f [fX, Y]."""
    def evaluate(X, Y, p):
        f_p = f.value(p)
        fX = act(f, X)
        fY = act(f, Y)
        return (f_p @ f_p @ lie_bracket(X, Y, p)
                + lie_bracket(fX, fY, p)
                - f_p @ lie_bracket(X, fY, p)
                - f_p @ lie_bracket(fX, Y, p))
    return evaluate


def d_oneform_matrix(eta, p):
    """Components d eta(d_a, d_b) on the coordinate frame."""
    frame = coordinate_frame(eta.chart)
    dim = len(frame)
    matrix = np.zeros((dim, dim))
    for a in range(dim):
        for b in range(a + 1, dim):
            matrix[a, b] = d_oneform(eta, frame[a], frame[b], p)
            matrix[b, a] = -matrix[a, b]
    return matrix


def lie_derivative_t11_matrix(X, f, p):
    """Components of L_X f; column b is (L_X f)(d_b)."""
    derivative = lie_derivative_t11(X, f)
    return np.stack([derivative(e, p) for e in coordinate_frame(f.chart)], axis=1)


def lie_derivative_metric_matrix(X, g, p):
    derivative = lie_derivative_metric(X, g)
    frame = coordinate_frame(g.chart)
    return np.array([[derivative(e_a, e_b, p) for e_b in frame] for e_a in frame])


def _rk4_flow(X, p, time, step):
    """Integrate the flow of X and its Jacobian from p for the given (signed) time."""
    count = max(1, int(round(abs(time) / step)))
    h = time / count
    x = np.array(p, dtype=float)
    J = np.eye(len(x))

    def rhs(x, J):
        jet = X.jet(x)
        return jet.value, jet.partials @ J

    for _ in range(count):
        k1x, k1J = rhs(x, J)
        k2x, k2J = rhs(x + 0.5 * h * k1x, J + 0.5 * h * k1J)
        k3x, k3J = rhs(x + 0.5 * h * k2x, J + 0.5 * h * k2J)
        k4x, k4J = rhs(x + h * k3x, J + h * k3J)
        x = x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        J = J + h / 6.0 * (k1J + 2 * k2J + 2 * k3J + k4J)
    return x, J


def lie_derivative_t11_flow(X, f, p, step=FLOW_STEP, time=FLOW_TIME):
    """
    L_X f at p as the central difference of the flow pullbacks
    (phi_t^* f)_p = (d phi_t)^-1 f(phi_t(p)) d phi_t at t = +-time.
    """
    def pulled_back(t):
        q, J = _rk4_flow(X, p, t, step)
        return np.linalg.solve(J, f.value(q) @ J)

    return (pulled_back(time) - pulled_back(-time)) / (2.0 * time)
