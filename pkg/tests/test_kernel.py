"""Kernel suite: normalization, continuity, gradients, peak/knot algebra."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from geosph.kernel import (
    KernelParams,
    eval_dw,
    eval_grad_w,
    eval_w,
    eval_w2,
    knot_for_peak,
    normalization_constant,
    peak_gradient_location,
)

A_VALUES = [0.2, 0.5, 1.0, 1.5, 2.0]
B = 2.0


# --- normalization ---------------------------------------------------------

def test_alpha_c_1d_formula():
    # 2/(b h); the quadrature below pins this independently
    assert normalization_constant(KernelParams(a=1.0, b=2.0, h=1.0, dim=1)) == pytest.approx(1.0, abs=1e-15)
    assert normalization_constant(KernelParams(a=1.0, b=2.0, h=0.5, dim=1)) == pytest.approx(2.0, abs=1e-15)


def test_alpha_c_2d_value():
    val = normalization_constant(KernelParams(a=1.0, b=2.0, h=1.0, dim=2))
    assert val == pytest.approx(15.0 / (7.0 * math.pi), rel=1e-14)
    assert val == pytest.approx(0.68209261325098, rel=1e-12)


@pytest.mark.parametrize("a", A_VALUES)
@pytest.mark.parametrize("h", [0.7, 1.0, 1.5])
def test_normalization_quadrature_1d(a, h):
    p = KernelParams(a=a, b=B, h=h, dim=1)
    integral, _ = quad(lambda x: eval_w(p, abs(x) / h), -B * h, B * h,
                       points=[-a * h, 0.0, a * h], limit=200)
    assert integral == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("a", A_VALUES)
@pytest.mark.parametrize("h", [0.7, 1.0, 1.5])
def test_normalization_quadrature_2d(a, h):
    p = KernelParams(a=a, b=B, h=h, dim=2)
    integral, _ = quad(lambda r: eval_w(p, r / h) * 2.0 * math.pi * r, 0.0, B * h,
                       points=[a * h], limit=200)
    assert integral == pytest.approx(1.0, abs=1e-6)


# --- shape and continuity --------------------------------------------------

def test_classical_cubic_spline_recovered():
    # a=1, b=2 must reduce to the standard cubic spline (independent closed form)
    h = 1.3
    p = KernelParams(a=1.0, b=2.0, h=h, dim=1)

    def classic(q):
        if q < 1.0:
            return (2.0 / (3.0 * h)) * (1.0 - 1.5 * q * q + 0.75 * q**3)
        if q < 2.0:
            return (2.0 / (3.0 * h)) * 0.25 * (2.0 - q) ** 3
        return 0.0

    for q in np.linspace(0.0, 2.5, 101):
        assert eval_w(p, float(q)) == pytest.approx(classic(float(q)), abs=1e-14)


def test_center_value_1d():
    # W(0) = alpha_c * b/(a+b) = 2/((a+b) h); classical 2/(3h) at a=1, b=2
    p = KernelParams(a=1.0, b=2.0, h=1.0, dim=1)
    assert eval_w(p, 0.0) == pytest.approx(2.0 / 3.0, rel=1e-14)


@pytest.mark.parametrize("a", A_VALUES)
def test_compact_support_exact(a):
    p = KernelParams(a=a, b=B, h=1.1, dim=2)
    for q in [B, B + 0.001, 5.0]:
        assert eval_w(p, q) == 0.0
        assert eval_dw(p, q) == 0.0
        assert eval_w2(p, q) == 0.0
    grad = eval_grad_w(p, np.array([B * 1.1, 0.0]))
    assert np.all(grad == 0.0)


@pytest.mark.parametrize("a", [0.2, 0.5, 1.0, 1.5])
@pytest.mark.parametrize("dim", [1, 2])
def test_branch_continuity(a, dim):
    p = KernelParams(a=a, b=B, h=1.0, dim=dim)
    scale = eval_w(p, 0.0)
    for knot in (a, B):
        below = float(np.nextafter(knot, 0.0))
        above = float(np.nextafter(knot, 10.0))
        assert abs(eval_w(p, below) - eval_w(p, above)) < 1e-12 * scale
        assert abs(eval_dw(p, below) - eval_dw(p, above)) < 1e-12 * max(abs(eval_dw(p, below)), scale)


@pytest.mark.parametrize("a", A_VALUES)
def test_non_negativity(a):
    p = KernelParams(a=a, b=B, h=1.0, dim=2)
    q = np.linspace(0.0, B, 2001)
    assert np.all(eval_w(p, q) >= 0.0)


def test_degenerate_a_equals_b():
    p = KernelParams(a=B, b=B, h=1.0, dim=2)
    q = np.linspace(0.0, B - 1e-12, 500)
    w = eval_w(p, q)
    assert np.all(np.isfinite(w)) and np.all(w >= 0.0)
    assert eval_w(p, float(np.nextafter(B, 0.0))) == pytest.approx(0.0, abs=1e-10)


# --- gradient --------------------------------------------------------------

@pytest.mark.parametrize("a", A_VALUES)
def test_gradient_matches_central_differences(a):
    h = 0.8
    p = KernelParams(a=a, b=B, h=h, dim=2)
    rng = np.random.default_rng(42)
    step = 1e-6 * h
    checked = 0
    for _ in range(300):
        r = rng.uniform(0.05, B - 0.05) * h
        # keep away from the knots where W' is only C1
        if min(abs(r / h - a), abs(r / h - B)) < 0.01:
            continue
        theta = rng.uniform(0.0, 2.0 * math.pi)
        vec = np.array([r * math.cos(theta), r * math.sin(theta)])
        grad = eval_grad_w(p, vec)
        for axis in range(2):
            dv = np.zeros(2)
            dv[axis] = step
            num = (eval_w(p, np.linalg.norm(vec + dv) / h)
                   - eval_w(p, np.linalg.norm(vec - dv) / h)) / (2.0 * step)
            if abs(num) > 1e-9:
                assert grad[axis] == pytest.approx(num, rel=1e-6)
                checked += 1
    assert checked > 100


def test_gradient_zero_at_center():
    p = KernelParams(a=1.0, b=B, h=1.0, dim=2)
    assert np.all(eval_grad_w(p, np.zeros(2)) == 0.0)


# --- second derivative -----------------------------------------------------

@pytest.mark.parametrize("a", A_VALUES)
def test_w2_root_and_signs(a):
    p = KernelParams(a=a, b=B, h=1.0, dim=2)
    root = a * B / (a + B)
    assert eval_w2(p, root) == pytest.approx(0.0, abs=1e-12)
    q_in = np.linspace(0.0, root * 0.999, 100)
    assert np.all(eval_w2(p, q_in) < 0.0)
    q_out = np.linspace(root * 1.001, float(np.nextafter(B, 0.0)), 100)
    assert np.all(eval_w2(p, q_out) > 0.0)


# --- peak location and knot inversion ---------------------------------------

@pytest.mark.parametrize("a", A_VALUES)
@pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
def test_peak_location_formula(a, h):
    p = KernelParams(a=a, b=B, h=h, dim=2)
    assert peak_gradient_location(p) == pytest.approx(a * B / (a + B) * h, abs=1e-12)


def test_peak_location_examples():
    assert peak_gradient_location(KernelParams(a=1.0, b=2.0, h=1.0)) == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert peak_gradient_location(KernelParams(a=2.0, b=2.0, h=1.0)) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("a", A_VALUES)
def test_peak_is_argmax_of_gradient_magnitude(a):
    # numeric confirmation: |dW/dq| is maximal at the predicted location
    h = 1.0
    p = KernelParams(a=a, b=B, h=h, dim=2)
    q_star = peak_gradient_location(p) / h
    grid = np.linspace(1e-6, B - 1e-6, 20001)
    mags = np.abs(eval_dw(p, grid))
    assert abs(grid[np.argmax(mags)] - q_star) < 2e-4
    assert abs(eval_dw(p, q_star)) >= mags.max() - 1e-12


def test_knot_for_peak_cap_and_examples():
    b, h = 2.0, 1.0
    assert knot_for_peak(0.5 * b * h, b, h) == b
    assert knot_for_peak(0.9 * b * h, b, h) == b
    # slope-scenario numbers: r = sqrt(2)*s, s = 0.025, h = 0.0375
    r = math.sqrt(2.0) * 0.025
    assert knot_for_peak(r, 2.0, 0.0375) == pytest.approx(1.7836116910229645, rel=1e-12)


@pytest.mark.parametrize("frac", [0.01, 0.1, 0.3, 0.49, 0.4999])
def test_knot_peak_round_trip(frac):
    b, h = 2.0, 0.0375
    r = frac * b * h
    a = knot_for_peak(r, b, h)
    back = peak_gradient_location(KernelParams(a=a, b=b, h=h, dim=2))
    assert back == pytest.approx(r, rel=1e-12)


def test_knot_for_peak_small_r_limit():
    assert knot_for_peak(1e-12, 2.0, 1.0) == pytest.approx(1e-12, rel=1e-9)
    with pytest.raises(ValueError):
        knot_for_peak(0.0, 2.0, 1.0)


# --- parameter validation ---------------------------------------------------

def test_params_validation():
    with pytest.raises(ValueError):
        KernelParams(a=0.0, b=2.0, h=1.0)
    with pytest.raises(ValueError):
        KernelParams(a=2.5, b=2.0, h=1.0)
    with pytest.raises(ValueError):
        KernelParams(a=1.0, b=2.0, h=0.0)
    with pytest.raises(ValueError):
        KernelParams(a=1.0, b=2.0, h=1.0, dim=3)
    with pytest.raises(ValueError):
        eval_w(KernelParams(a=1.0, b=2.0, h=1.0), -0.1)
