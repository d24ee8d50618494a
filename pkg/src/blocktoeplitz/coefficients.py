"""Coefficient sequences attached to a rational symbol.

For a symbol w = h h* = h_sharp* h_sharp this module produces

* the power-series coefficients a_k of -h^{-1} and c_k of h, their
  tilde counterparts from h~(z) = h_sharp(conj(z))*,
* the autocovariance gamma(k) (Fourier coefficients of w),
* the phase-function Fourier coefficients beta_k of h* h_sharp^{-1},
* the decay majorant F(n) = (sum_j ||c~_j||) * sum_{l>=n} ||a_l||,

with every infinite sum truncated under a certified upper bound rather
than a heuristic stopping rule. The a/a~ sequences come from exact
closed forms; tails of the c/c~ sequences are controlled by a Cauchy
estimate on a circle strictly inside the analyticity radius, which is
found by locating the zeros of det h^{-1} numerically (those zeros are
the poles of h; for an AR symbol they are the only source of decay, so
the pole parameters alone would say nothing).

beta_k is served by three routes: the pole-machinery closed form for
k >= m0 + 1, the series sum_j a_{j+k} c~_j for 0 <= k <= m0, and direct
quadrature of the phase function for k < 0. The first two are certified;
the quadrature route is exponentially accurate for these analytic
integrands but carries no a-priori bound.
"""

import math
import threading

import numpy as np

from . import errors
from .symbol import h_inv_on_grid, h_on_grid
from .util import binom, geometric_poly_tail, unit_circle

_REL_TOL = 1e-14
_MAX_TERMS = 200_000


def a_coeff(spec, n):
    """Coefficient a_n of -h(z)^{-1} = sum z^n a_n (exact closed form)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    out = np.zeros((spec.d, spec.d), dtype=np.complex128)
    if n == 0:
        out += spec.rho00
    elif n <= spec.m0:
        out += spec.rho0[n - 1]
    for mu in range(spec.K):
        pbar_n = np.conj(spec.poles[mu]) ** n
        for j in range(1, spec.mults[mu] + 1):
            out += binom(n + j - 1, j - 1) * pbar_n * spec.rho[mu][j - 1]
    return out


def a_tilde_coeff(spec, n):
    """Coefficient a~_n of -h~(z)^{-1}, built from the sharp residues
    rho~ = (rho_sharp)*."""
    if n < 0:
        raise ValueError("n must be >= 0")
    out = np.zeros((spec.d, spec.d), dtype=np.complex128)
    if n == 0:
        out += spec.sharp_rho00.conj().T
    elif n <= spec.m0:
        out += spec.sharp_rho0[n - 1].conj().T
    for mu in range(spec.K):
        p_n = spec.poles[mu] ** n
        for j in range(1, spec.mults[mu] + 1):
            out += (binom(n + j - 1, j - 1) * p_n
                    * spec.sharp_rho[mu][j - 1].conj().T)
    return out


def _analyticity_radius(spec, sharp):
    """min |z| over zeros of det h^{-1} (resp. det h_sharp^{-1}); these
    are the poles of h, hence the decay radius of its Taylor series.
    Returns inf when the determinant has no zeros at all."""
    deg = spec.d * (spec.m0 + spec.total_multiplicity)
    if deg == 0:
        return np.inf
    npts = 1 << max(3, int(math.ceil(math.log2(deg + 1))) + 1)
    zs, _ = unit_circle(npts)
    vals = np.linalg.det(h_inv_on_grid(spec, zs, sharp=sharp))
    for mu in range(spec.K):
        vals *= (1.0 - np.conj(spec.poles[mu]) * zs) ** (
            spec.d * spec.mults[mu])
    coeffs = np.fft.fft(vals) / npts          # degree j coefficient at [j]
    coeffs = coeffs[:deg + 1]
    mags = np.abs(coeffs)
    keep = np.nonzero(mags > 1e-10 * mags.max())[0]
    if len(keep) == 0 or keep.max() == 0:
        return np.inf
    poly = coeffs[:keep.max() + 1]
    roots = np.roots(poly[::-1])
    if len(roots) == 0:
        return np.inf
    return float(np.abs(roots).min())


class CoefficientTables:
    """Lazily extended, lock-guarded coefficient tables for one symbol.

    Thread contract: concurrent readers are safe because every list
    extension happens under an internal lock; callers that want to share
    a table without contention can call `warm_up(horizon)` first.
    """

    def __init__(self, spec, grid_points=8192):
        self.spec = spec
        self.grid_points = int(grid_points)
        self.decay_rate = spec.pole_decay
        self._lock = threading.RLock()
        self._a = []
        self._a_tilde = []
        self._c = []
        self._c_tilde = []
        self._gamma = {}
        self._beta = {}
        self._kit = None
        self._phase_grid = None
        # Cauchy data: ||c_j|| <= const * ratio^j (same for c~ on the
        # sharp side); radius strictly between 1 and the analyticity radius
        self._cauchy = {}
        self._a_norm_table = None
        self._a_norm_tail = None
        self._c_tilde_abs_sum = None

    @property
    def d(self):
        return self.spec.d

    # -- exact closed-form series ---------------------------------------- #

    def a(self, n):
        with self._lock:
            while len(self._a) <= n:
                self._a.append(a_coeff(self.spec, len(self._a)))
            return self._a[n]

    def a_tilde(self, n):
        with self._lock:
            while len(self._a_tilde) <= n:
                self._a_tilde.append(a_tilde_coeff(self.spec,
                                                   len(self._a_tilde)))
            return self._a_tilde[n]

    # -- triangular recursions ------------------------------------------- #

    def _extend_c(self, seq, coeff_fn, n):
        if not seq:
            a0 = coeff_fn(0)
            try:
                a0_inv = np.linalg.inv(a0)
            except np.linalg.LinAlgError as exc:
                raise errors.SingularLeadingCoefficient(str(exc)) from exc
            seq.append(-a0_inv)
        a0_inv = -seq[0]
        while len(seq) <= n:
            m = len(seq)
            acc = np.zeros((self.spec.d, self.spec.d), dtype=np.complex128)
            for k in range(m):
                acc += seq[k] @ coeff_fn(m - k)
            seq.append(-acc @ a0_inv)

    def c(self, n):
        """MA coefficient c_n of h(z) = sum z^n c_n, generated by the
        convolution identity sum_k c_k a_{n-k} = -delta_{n0} I."""
        with self._lock:
            self._extend_c(self._c, self.a, n)
            return self._c[n]

    def c_tilde(self, n):
        with self._lock:
            self._extend_c(self._c_tilde, self.a_tilde, n)
            return self._c_tilde[n]

    # -- certified tails --------------------------------------------------- #

    def _cauchy_bound(self, sharp):
        """(const, ratio) with ||c_j|| <= const * ratio^j certified by the
        Cauchy integral on |z| = radius < analyticity radius."""
        key = "sharp" if sharp else "plain"
        with self._lock:
            if key in self._cauchy:
                return self._cauchy[key]
            R = _analyticity_radius(self.spec, sharp)
            radius = min(2.0, 0.5 * (1.0 + R)) if np.isfinite(R) else 2.0
            # h is analytic on |z| <= radius, but it is evaluated by
            # inverting h^{-1}, whose own poles sit at |1/p_mu|; keep the
            # sampling circle clear of those magnitudes
            pole_mags = [1.0 / abs(p) for p in self.spec.poles]
            for _ in range(120):
                if all(abs(radius - m) > 1e-3 * radius for m in pole_mags):
                    break
                radius *= 0.97
                if radius <= 1.000001:
                    radius = 1.000001
                    break
            zs, _ = unit_circle(1024)
            h = h_on_grid(self.spec, radius * zs, sharp=sharp)
            mx = float(np.linalg.norm(h, ord=2, axis=(-2, -1)).max())
            # 1024 samples of an analytic function underestimate the true
            # max only marginally; widen by a flat safety factor
            const = 1.2 * mx
            ratio = 1.0 / radius
            self._cauchy[key] = (const, ratio)
            return const, ratio

    def c_tail_sum(self, start, sharp=True):
        """Certified upper bound for sum_{j >= start} ||c_j|| (c~ when
        sharp=True, which is the variant gamma and F need)."""
        const, ratio = self._cauchy_bound(sharp)
        return const * ratio**start / (1.0 - ratio)

    def c_sup(self, start, sharp=True):
        """Certified sup_{j >= start} ||c_j||."""
        const, ratio = self._cauchy_bound(sharp)
        return const * ratio**start

    def _a_norm_data(self):
        """Table of ||a_l|| for l = 0..H plus the certified tail beyond H."""
        with self._lock:
            if self._a_norm_table is not None:
                return self._a_norm_table, self._a_norm_tail
            spec = self.spec
            r = spec.pole_decay
            if spec.K == 0:
                horizon = spec.m0
                tail = 0.0
            else:
                horizon = spec.m0 + max(
                    64, int(np.ceil(np.log(1e-18) / np.log(max(r, 1e-3)))))
                horizon = min(horizon, 20_000)
                tail = 0.0
                for mu in range(spec.K):
                    p_abs = abs(spec.poles[mu])
                    for j in range(1, spec.mults[mu] + 1):
                        rho_norm = float(np.linalg.norm(
                            spec.rho[mu][j - 1], 2))
                        bound, _ = geometric_poly_tail(p_abs, j, horizon + 1)
                        tail += rho_norm * bound
            norms = np.array([np.linalg.norm(self.a(l), 2)
                              for l in range(horizon + 1)])
            self._a_norm_table = norms
            self._a_norm_tail = tail
            return norms, tail

    def a_tail(self, n):
        """Certified upper bound for sum_{l >= n} ||a_l||."""
        norms, tail = self._a_norm_data()
        if n <= len(norms):
            return float(norms[n:].sum()) + tail
        # beyond the table: pure triangle-inequality tail
        spec = self.spec
        if spec.K == 0:
            return 0.0
        out = 0.0
        for mu in range(spec.K):
            p_abs = abs(spec.poles[mu])
            for j in range(1, spec.mults[mu] + 1):
                bound, _ = geometric_poly_tail(p_abs, j, n)
                out += float(np.linalg.norm(spec.rho[mu][j - 1], 2)) * bound
        return out

    def c_tilde_abs_sum(self):
        """Certified upper bound for sum_j ||c~_j||."""
        with self._lock:
            if self._c_tilde_abs_sum is not None:
                return self._c_tilde_abs_sum
            total = 0.0
            j = 0
            while True:
                total += float(np.linalg.norm(self.c_tilde(j), 2))
                j += 1
                rem = self.c_tail_sum(j, sharp=True)
                if rem <= 1e-12 * max(total, 1.0) or j >= _MAX_TERMS:
                    self._c_tilde_abs_sum = total + rem
                    return self._c_tilde_abs_sum

    def decay_bound_F(self, n):
        """F(n): the product bound dominating sum_l ||beta_{n+l}||; it
        decreases to zero for every valid rational symbol."""
        if n < 0:
            raise ValueError("n must be >= 0")
        return self.c_tilde_abs_sum() * self.a_tail(n)

    # -- autocovariance ----------------------------------------------------- #

    def gamma(self, k):
        """gamma(k) = integral e^{-ik theta} w dtheta / 2pi, via the series
        gamma(k) = sum_j c~_j c~_{k+j}* for k >= 0 and Hermitian symmetry
        for k < 0; truncated at certified relative tail 1e-14."""
        k = int(k)
        if k < 0:
            return self.gamma(-k).conj().T
        with self._lock:
            if k in self._gamma:
                return self._gamma[k]
            const, ratio = self._cauchy_bound(sharp=True)
            acc = np.zeros((self.spec.d, self.spec.d), dtype=np.complex128)
            j = 0
            while True:
                acc += self.c_tilde(j) @ self.c_tilde(k + j).conj().T
                j += 1
                rem = const**2 * ratio**(k + 2 * j) / (1.0 - ratio**2)
                scale = max(float(np.linalg.norm(acc)), 1e-300)
                if rem <= _REL_TOL * scale and j >= 2:
                    break
                if j >= _MAX_TERMS:
                    break
            self._gamma[k] = acc
            return acc

    def gamma_via_c(self, k):
        """Alternative route gamma(k) = sum_j c_{k+j} c_j* (k >= 0)."""
        k = int(k)
        if k < 0:
            return self.gamma_via_c(-k).conj().T
        const, ratio = self._cauchy_bound(sharp=False)
        acc = np.zeros((self.spec.d, self.spec.d), dtype=np.complex128)
        j = 0
        while True:
            acc += self.c(k + j) @ self.c(j).conj().T
            j += 1
            rem = const**2 * ratio**(k + 2 * j) / (1.0 - ratio**2)
            if rem <= _REL_TOL * max(float(np.linalg.norm(acc, 2)), 1e-300) \
                    and j >= 2:
                return acc
            if j >= _MAX_TERMS:
                return acc

    def gamma_band_tail(self, L):
        """Certified bound for sum_{|k| > L} ||gamma(k)||."""
        const, ratio = self._cauchy_bound(sharp=True)
        per_k = const**2 / (1.0 - ratio**2)
        return 2.0 * per_k * ratio**(L + 1) / (1.0 - ratio)

    # -- phase-function Fourier coefficients -------------------------------- #

    def _closed_kit(self):
        if self._kit is None:
            from .closed_form import ClosedFormKit
            self._kit = ClosedFormKit(self.spec)
        return self._kit

    def beta(self, k):
        """beta_k, the (negated) k-th Fourier coefficient of the phase
        function h* h_sharp^{-1}.

        Route by index: closed form (pole machinery) for k >= m0 + 1,
        the a / c~ series for 0 <= k <= m0, quadrature for k < 0.
        """
        k = int(k)
        with self._lock:
            if k in self._beta:
                return self._beta[k]
            if k >= self.spec.m0 + 1:
                if self.spec.K == 0:
                    out = np.zeros((self.spec.d, self.spec.d),
                                   dtype=np.complex128)
                else:
                    out = self._closed_kit().beta_closed(k)
            elif k >= 0:
                out = self.beta_series(k)
            else:
                out = self.beta_quadrature(k)
            self._beta[k] = out
            return out

    def beta_series(self, k):
        """beta_k = sum_j a_{j+k} c~_j for k >= 0, certified truncation."""
        if k < 0:
            raise ValueError("series route needs k >= 0")
        acc = np.zeros((self.spec.d, self.spec.d), dtype=np.complex128)
        j = 0
        while True:
            acc += self.a(j + k) @ self.c_tilde(j)
            j += 1
            rem = self.c_sup(j, sharp=True) * self.a_tail(k + j)
            if rem <= _REL_TOL * max(float(np.linalg.norm(acc, 2)), 1e-300) \
                    and j >= 2:
                return acc
            if j >= _MAX_TERMS:
                return acc

    def beta_closed(self, k):
        """Closed-form route, valid for k >= m0 + 1 (K >= 1)."""
        if k < self.spec.m0 + 1:
            raise errors.DomainViolation(
                f"closed form needs k >= m0 + 1 = {self.spec.m0 + 1}")
        if self.spec.K == 0:
            return np.zeros((self.spec.d, self.spec.d), dtype=np.complex128)
        return self._closed_kit().beta_closed(k)

    def _phase_on_grid(self):
        with self._lock:
            if self._phase_grid is None:
                zs, theta = unit_circle(self.grid_points)
                h = h_on_grid(self.spec, zs)
                hs_inv = h_inv_on_grid(self.spec, zs, sharp=True)
                phase = np.conj(np.swapaxes(h, -1, -2)) @ hs_inv
                self._phase_grid = (theta, phase)
            return self._phase_grid

    def beta_quadrature(self, k):
        """Trapezoid quadrature of the defining integral (any k)."""
        theta, phase = self._phase_on_grid()
        weights = np.exp(-1j * k * theta)
        return -(weights[:, None, None] * phase).mean(axis=0)

    # -- misc ---------------------------------------------------------------- #

    def warm_up(self, horizon):
        """Precompute all tables up to `horizon` so that subsequent
        concurrent reads never extend the lists."""
        for fn in (self.a, self.a_tilde, self.c, self.c_tilde):
            fn(horizon)
        for k in range(horizon + 1):
            self.gamma(k)
        return self


class RawTables:
    """User-supplied coefficient tables for symbols outside the rational
    class (the general inverse formulas need only a, a~, beta and a decay
    majorant F). Entries beyond the supplied horizon are treated as zero,
    so F must genuinely dominate the tails the caller cares about."""

    def __init__(self, d, a, a_tilde, beta, F):
        self.spec = None
        self.d = int(d)
        self._a = [np.asarray(m, dtype=np.complex128) for m in a]
        self._at = [np.asarray(m, dtype=np.complex128) for m in a_tilde]
        self._beta = {k: np.asarray(m, dtype=np.complex128)
                      for k, m in beta.items()}
        self._F = F

    def a(self, n):
        z = np.zeros((self.d, self.d), dtype=np.complex128)
        return self._a[n] if n < len(self._a) else z

    def a_tilde(self, n):
        z = np.zeros((self.d, self.d), dtype=np.complex128)
        return self._at[n] if n < len(self._at) else z

    def a_tail(self, n):
        return float(sum(np.linalg.norm(m, 2) for m in self._a[n:]))

    def beta(self, k):
        z = np.zeros((self.d, self.d), dtype=np.complex128)
        return self._beta.get(int(k), z)

    def decay_bound_F(self, n):
        return float(self._F(n)) if callable(self._F) else float(
            self._F[n] if n < len(self._F) else self._F[-1])
