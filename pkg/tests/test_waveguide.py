import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize, special

from cylspdc.errors import AccuracyError, DomainError, NearModeError, ReducedAccuracyWarning
from cylspdc.waveguide import (
    Band,
    CylWaveIndex,
    WaveguideSpec,
    band_cutoff,
    cyl_wave_field,
    dispersion_residual,
    find_modes,
    group_velocity,
    mode_at,
    normalized_mode_field,
    scattering_field,
    scattering_solution,
    secular_matrix,
    to_cartesian,
)

SPEC = WaveguideSpec(5.0, 1.0)
SIG = np.array([1, -1, 1])


def cart_field(index, w, x, y, spec=SPEC):
    R, phi = math.hypot(x, y), math.atan2(y, x)
    f = cyl_wave_field(index, w, R, phi, spec)
    return to_cartesian(f.E, phi), to_cartesian(f.H, phi)


def fd_curl(index, w, x, y, h=1e-5):
    q = index.qa
    Ex = lambda dx, dy: cart_field(index, w, x + dx, y + dy)[0]
    dEdx = (Ex(h, 0) - Ex(-h, 0)) / (2 * h)
    dEdy = (Ex(0, h) - Ex(0, -h)) / (2 * h)
    E = Ex(0, 0)
    return np.array(
        [dEdy[2] - 1j * q * E[1], 1j * q * E[0] - dEdx[2], dEdx[1] - dEdy[0]]
    )


class TestSpec:
    def test_invariants(self):
        with pytest.raises(DomainError):
            WaveguideSpec(1.0, 2.0)
        with pytest.raises(DomainError):
            WaveguideSpec(5.0, 1.0, -1e-7)
        with pytest.raises(DomainError):
            WaveguideSpec(5.0, 0.5)


class TestCylWaves:
    def test_s_wave_has_no_ez(self):
        rng = np.random.default_rng(1)
        for R, phi in rng.uniform([0.1, 0], [2, 6], size=(10, 2)):
            f = cyl_wave_field(CylWaveIndex("core", 0.9, 2, "s"), 1.3, R, phi, SPEC)
            assert f.E[2] == 0

    def test_p_wave_ez(self):
        w, q, m, R, phi = 1.3, 0.9, 2, 0.7, 0.4
        Q = math.sqrt(5 * w * w - q * q)
        f = cyl_wave_field(CylWaveIndex("core", q, m, "p"), w, R, phi, SPEC)
        expect = Q / (math.sqrt(5) * w) * special.jv(m, Q * R) * np.exp(1j * m * phi)
        assert f.E[2] == pytest.approx(expect, rel=1e-13)

    @pytest.mark.parametrize(
        "index",
        [
            CylWaveIndex("core", 0.7, 2, "p"),
            CylWaveIndex("core", 0.0, 1, "p"),
            CylWaveIndex("host", 0.5, -1, "p", "outgoing_H"),
        ],
    )
    def test_curl_of_p_wave_is_s_wave(self, index):
        rng = np.random.default_rng(7)
        w = 1.2
        k = math.sqrt(SPEC.eps(index.medium)) * w
        s_index = index._replace(sigma="s")
        for _ in range(20):
            R = rng.uniform(0.5, 1.8)
            phi = rng.uniform(0, 2 * np.pi)
            x, y = R * math.cos(phi), R * math.sin(phi)
            curl = fd_curl(index, w, x, y)
            Es = cart_field(s_index, w, x, y)[0]
            assert np.max(np.abs(curl / k - Es)) < 1e-6

    def test_h_from_faraday(self):
        # H = -(i/w) curl E in units of a, checked on an s wave
        index = CylWaveIndex("core", 0.6, 3, "s")
        w = 1.4
        curl = fd_curl(index, w, 0.5, 0.3)
        H = cart_field(index, w, 0.5, 0.3)[1]
        assert np.max(np.abs(-1j / w * curl - H)) < 1e-6

    def test_outgoing_at_origin(self):
        with pytest.raises(Exception):
            cyl_wave_field(CylWaveIndex("host", 0.5, 0, "p", "outgoing_H"), 1.0, 0.0, 0.0, SPEC)


def continuity_jump(sol, sigma, n_phi=32):
    worst = 0.0
    for phi in np.linspace(0, 2 * np.pi, n_phi, endpoint=False):
        a = scattering_field(sol, sigma, 1 - 1e-15, phi, SPEC)
        b = scattering_field(sol, sigma, 1.0, phi, SPEC)
        ja = np.concatenate([a.E[1:], a.H[1:]])
        jb = np.concatenate([b.E[1:], b.H[1:]])
        scale = max(np.max(np.abs(ja)), np.max(np.abs(jb)))
        worst = max(worst, np.max(np.abs(ja - jb)) / scale)
    return worst


class TestScattering:
    def test_m0_no_polarization_mixing(self):
        c = scattering_solution(0, 0.8, 1.3, SPEC).coefficients
        for key in ("t_sp", "t_ps", "r_sp", "r_ps"):
            assert c[key] == 0

    def test_normal_incidence_decouples(self):
        c = scattering_solution(2, 0.0, 1.3, SPEC).coefficients
        for key in ("t_sp", "t_ps", "r_sp", "r_ps"):
            assert c[key] == 0

    @pytest.mark.parametrize("sigma", ["s", "p"])
    def test_tangential_continuity(self, sigma):
        sol = scattering_solution(1, 1.5, 1.0, SPEC)
        assert continuity_jump(sol, sigma) < 1e-8

    def test_linear_system_residual(self):
        sol = scattering_solution(2, 0.4, 2.1, SPEC)
        for sigma in ("s", "p"):
            c = sol.coefficients
            x = np.array([c[f"r_s{sigma}"], c[f"t_s{sigma}"], c[f"r_p{sigma}"], c[f"t_p{sigma}"]])
            rhs = sol.rhs[sigma]
            assert np.linalg.norm(sol.M @ x - rhs) < 1e-10 * np.linalg.norm(rhs)

    def test_near_mode(self):
        md = find_modes(1, 1.0, SPEC, compute_beta=False)[0]
        with pytest.raises(NearModeError) as exc:
            scattering_solution(1, md.qa, md.w, SPEC)
        assert exc.value.det >= 0

    @settings(max_examples=25, deadline=None)
    @given(
        st.integers(-3, 3),
        st.floats(0.3, 3.0),
        st.floats(0.0, 0.95),
        st.sampled_from(["s", "p"]),
    )
    def test_continuity_property(self, m, w, frac, sigma):
        qa = frac * w  # radiating in the host
        sol = scattering_solution(m, qa, w, SPEC)
        assert continuity_jump(sol, sigma, n_phi=8) < 1e-8


class TestDispersion:
    def test_residual_at_mode(self):
        for m in (0, 1, 2):
            for md in find_modes(m, 2.5, SPEC, compute_beta=False):
                r = dispersion_residual(m, md.qa, md.w, SPEC)
                # scale of the function over the window
                qs = np.linspace(md.w * 1.0001, md.w * math.sqrt(5) * 0.9999, 50)
                scale = max(abs(dispersion_residual(m, q, md.w, SPEC)) for q in qs)
                assert abs(r) < 1e-10 * max(scale, 1.0)

    def test_outside_window(self):
        with pytest.raises(DomainError):
            dispersion_residual(1, 0.5, 1.0, SPEC)
        with pytest.raises(DomainError):
            dispersion_residual(1, 2.5, 1.0, SPEC)

    def test_m0_factorizes(self):
        from cylspdc.waveguide import _residual_uk

        for u, kappa in ((1.0, 0.5), (2.7, 1.1), (4.0, 0.01)):
            w = math.sqrt((u * u + kappa * kappa) / 4.0)
            te = _residual_uk(0, u, kappa, w, 5.0, 1.0, "TE")
            tm = _residual_uk(0, u, kappa, w, 5.0, 1.0, "TM")
            full = _residual_uk(0, u, kappa, w, 5.0, 1.0)
            assert full == pytest.approx(u * u / (u * u + kappa * kappa) * te * tm, rel=1e-14)

    def test_det_equivalence(self):
        rng = np.random.default_rng(3)
        checked = 0
        while checked < 50:
            m = int(rng.integers(0, 4))
            w = float(rng.uniform(0.8, 3.0))
            for md in find_modes(m, w, SPEC, compute_beta=False):
                if md.kappa < 0.05:
                    continue  # |det M| is dominated by K_m growth there

                def absdet(q):
                    M = secular_matrix(m, q, w, SPEC)
                    return abs(np.linalg.det(M / np.linalg.norm(M, axis=0)))

                h = 1e-5
                res = optimize.minimize_scalar(
                    absdet, bounds=(md.qa - h, md.qa + h), method="bounded",
                    options={"xatol": 1e-14},
                )
                assert abs(res.x - md.qa) < 1e-8
                checked += 1

    def test_tm01_cutoff(self):
        wc = band_cutoff(Band(0, "TM", 1), SPEC)
        assert wc == pytest.approx(2.4048 / 2.0, rel=1e-3)
        assert mode_at(0, "TM", 1, wc * 0.999, SPEC) is None
        assert mode_at(0, "TM", 1, wc * 1.001, SPEC) is not None

    def test_he11_has_no_cutoff(self):
        for w in (0.05, 0.1, 0.3, 1.0, 2.0):
            labels = [md.label for md in find_modes(1, w, SPEC, compute_beta=False)]
            assert labels[0] == "HE11"

    def test_single_mode_window(self):
        for w in np.linspace(0.05, 2.4048 / 2 * 0.999, 12):
            allm = [md for m in range(4) for md in find_modes(m, w, SPEC, compute_beta=False)]
            assert [md.label for md in allm] == ["HE11"]

    def test_labels_ordered_by_qa(self):
        ms = find_modes(1, 3.5, SPEC, compute_beta=False)
        assert all(a.qa > b.qa for a, b in zip(ms, ms[1:]))
        he = [md.l for md in ms if md.family == "HE"]
        assert he == list(range(1, len(he) + 1))

    def test_l_max(self):
        ms = find_modes(1, 3.5, SPEC, l_max=1, compute_beta=False)
        assert sorted(md.label for md in ms) == ["EH11", "HE11"]
        with pytest.raises(DomainError):
            find_modes(1, 3.5, SPEC, l_max=0)

    def test_te_tm_nu_zero(self):
        for md in find_modes(0, 3.0, SPEC, compute_beta=False):
            assert md.nu == 0 and md.family in ("TE", "TM")

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 3), st.floats(0.1, 4.0))
    def test_light_line_confinement(self, m, w):
        for md in find_modes(m, w, SPEC, compute_beta=False):
            assert w < md.qa < math.sqrt(5) * w or md.kappa < 1e-8 * w
            assert md.qa <= math.sqrt(5) * w and md.kappa > 0

    @settings(max_examples=20, deadline=None)
    @given(st.integers(1, 3), st.floats(0.3, 4.0))
    def test_mirror_degeneracy(self, m, w):
        a = find_modes(m, w, SPEC, compute_beta=False)
        b = find_modes(-m, w, SPEC, compute_beta=False)
        assert [x.qa for x in a] == [x.qa for x in b]
        assert [abs(x.nu) for x in a] == [abs(x.nu) for x in b]
        assert [x.family for x in a] == [x.family for x in b]


class TestModeFields:
    @pytest.mark.parametrize("m,w", [(0, 2.5), (1, 1.0), (1, 3.0), (2, 3.0), (3, 3.5)])
    def test_boundary_continuity(self, m, w):
        for md in find_modes(m, w, SPEC, compute_beta=False):
            for phi in np.linspace(0, 2 * np.pi, 32, endpoint=False):
                a = normalized_mode_field(md, SPEC, 1 - 1e-15, phi)
                b = normalized_mode_field(md, SPEC, 1.0, phi)
                ja = np.concatenate([a.E[1:], a.H[1:]])
                jb = np.concatenate([b.E[1:], b.H[1:]])
                assert np.max(np.abs(ja - jb)) < 1e-8 * np.max(np.abs(jb))

    def test_ez_normalization(self):
        for m in (0, 1, 2):
            for md in find_modes(m, 3.0, SPEC, compute_beta=False):
                a = normalized_mode_field(md, SPEC, 1 - 1e-15).E[2]
                b = normalized_mode_field(md, SPEC, 1.0).E[2]
                if md.family == "TE":
                    assert a == 0 and b == 0
                else:
                    assert abs(a - 1) < 1e-10 and abs(b - 1) < 1e-10

    def test_te01_has_no_ez(self):
        md = mode_at(0, "TE", 1, 3.0, SPEC)
        for R in (0.2, 0.9, 1.5, 3.0):
            assert normalized_mode_field(md, SPEC, R, 0.4).E[2] == 0
        assert abs(normalized_mode_field(md, SPEC, 1.0).H[2] - 1) < 1e-10

    def test_exterior_decay(self):
        md = find_modes(1, 1.0, SPEC, compute_beta=False)[0]
        k = md.kappa
        ratio = normalized_mode_field(md, SPEC, 3.0).E[2] / normalized_mode_field(md, SPEC, 1.0).E[2]
        assert abs(ratio - special.k1(3 * k) / special.k1(k)) < 1e-8

    @pytest.mark.parametrize("m,w", [(1, 1.0), (1, 3.2), (2, 3.0)])
    def test_mirror_and_time_reversal(self, m, w):
        for md in find_modes(m, w, SPEC, compute_beta=False):
            for R, phi in ((0.4, 0.3), (1.7, 2.2)):
                f = normalized_mode_field(md, SPEC, R, phi)
                g = normalized_mode_field(md.mirrored(), SPEC, R, -phi)
                assert np.allclose(g.E, SIG * f.E, rtol=1e-12, atol=1e-14)
                assert np.allclose(g.H, -SIG * f.H, rtol=1e-12, atol=1e-14)
                t = normalized_mode_field(md.mirrored().reversed(), SPEC, R, phi)
                assert np.allclose(t.E, np.conj(f.E), rtol=1e-12, atol=1e-14)
                assert np.allclose(t.H, -np.conj(f.H), rtol=1e-12, atol=1e-14)

    def test_azimuthal_orthogonality(self):
        a = find_modes(1, 3.0, SPEC, compute_beta=False)[0]
        b = find_modes(2, 3.0, SPEC, compute_beta=False)[0]
        phis = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        for R in (0.5, 1.5):
            s = sum(
                normalized_mode_field(a, SPEC, R, p).E @ np.conj(normalized_mode_field(b, SPEC, R, p).E)
                for p in phis
            ) * (2 * np.pi / 64)
            assert abs(s) < 1e-10


class TestGroupVelocity:
    def test_deep_guidance(self):
        md = find_modes(1, 6.0, SPEC, compute_beta=False)[0]
        assert md.label == "HE11"
        assert group_velocity(md, SPEC) == pytest.approx(1 / math.sqrt(5), rel=0.02)

    def test_step_convergence(self):
        for md in find_modes(1, 2.0, SPEC, compute_beta=False):
            assert abs(group_velocity(md, SPEC, 1e-4) - group_velocity(md, SPEC, 5e-5)) < 1e-6

    def test_tm01_near_cutoff(self):
        wc = band_cutoff(Band(0, "TM", 1), SPEC)
        betas = []
        # the approach is logarithmic in the distance to cutoff (K_0 tail)
        for dw in (0.1, 0.01, 1e-3):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ReducedAccuracyWarning)
                betas.append(group_velocity(mode_at(0, "TM", 1, wc + dw, SPEC), SPEC))
        assert all(b < 1 for b in betas)
        assert betas[0] < betas[1] < betas[2]
        assert betas[2] > 0.9

    def test_sign_and_bounds(self):
        for m in (0, 1, 2):
            for md in find_modes(m, 3.0, SPEC):
                assert 0 < md.beta < 1
                assert group_velocity(md.reversed(), SPEC) == pytest.approx(-md.beta, rel=1e-12)

    def test_fd_slope_of_band(self):
        # independent check: slope of qa(w) from two find_modes solves
        h = 1e-5
        q = lambda w: find_modes(1, w, SPEC, compute_beta=False)[0].qa
        md = find_modes(1, 1.5, SPEC)[0]
        assert md.beta == pytest.approx(2 * h / (q(1.5 + h) - q(1.5 - h)), rel=1e-6)


def test_he11_below_double_range():
    assert find_modes(1, 0.1 / 2, SPEC, compute_beta=False)[0].label == "HE11"
    with pytest.raises(AccuracyError):
        find_modes(1, 0.08 / 2, SPEC, compute_beta=False)
    assert find_modes(0, 0.08 / 2, SPEC, compute_beta=False) == []
