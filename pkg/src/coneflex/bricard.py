"""Iterated cone strips built from a flexible germ.

The intrinsic shape of a strip (its development) is fixed: ruling angles in
the unfolded plane and, along each ruling, the distances of the alpha- and
beta-section points from V.  A fold state places the faces in space: f2 is
fixed, f1 and f3 fold by delta1 and delta2 about r1 and r2, and every further
fold angle is solved so that the next alpha-point stays on the alpha-plane.
Planarity of the beta-section, the period-4 repetition and the mirror
symmetry are then measured, not assumed.

The development is derived once at a reference state by mirroring r1, r2 in
the plane omega (through V, orthogonal to the line alpha ∩ beta).
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .discrete_cone import FoldPair, InfeasibleError, detect_coupling
from .geometry import EX, Plane, fit_plane, line_ray_param, normalize, rot_axis, wrap_angle
from .mesh import Mesh


@dataclass(frozen=True)
class Development:
    theta: np.ndarray   # ruling angles r_0..r_n in the unfolded plane
    rho_a: np.ndarray   # alpha-point distance from V along each ruling
    rho_b: np.ndarray   # beta-point distance from V along each ruling

    @property
    def n(self):
        return len(self.theta) - 1

    def dirs(self):
        return np.stack([np.cos(self.theta), np.sin(self.theta), np.zeros_like(self.theta)], 1)

    def openings(self):
        return np.diff(self.theta)

    def points(self, which="a"):
        rho = self.rho_a if which == "a" else self.rho_b
        return rho[:, None] * self.dirs()


@dataclass
class ConeStrip:
    config: object
    selector: object
    dev: Development
    deltas: np.ndarray          # fold angle at ruling k (entries 0 and n unused)
    rulings: np.ndarray         # (n+1, 3) unit vectors
    a_points: np.ndarray        # (n+1, 3)
    b_points: np.ndarray        # (n+1, 3)
    coupling: object = None
    germ_deviation: float = 0.0
    extended: bool = False
    notes: list = field(default_factory=list)

    @property
    def n(self):
        return self.dev.n

    @property
    def fold(self):
        return FoldPair.from_angles(self.deltas[1], self.deltas[2])

    def alpha(self):
        return fit_plane(self.a_points)[0]

    def beta(self):
        return fit_plane(self.b_points)[0]

    def mesh(self):
        """Quads (P_{k-1}, P_k, Q_k, Q_{k-1}); each lies in face f_k."""
        n = self.n
        verts = np.vstack([self.a_points, self.b_points])
        faces = [(k - 1, k, n + 1 + k, n + k) for k in range(1, n + 1)]
        return Mesh(verts, faces)


@dataclass(frozen=True)
class SectionPolygon:
    points: np.ndarray
    plane: Plane
    residual: float
    lam: float = float("nan")
    pencil_deviation: float = 0.0


# ------------------------------------------------------------------ placement

def _solve_fold(axis, x, normal, p_on_plane):
    """Angles d with rot(axis, d) @ x on the plane (normal, p_on_plane)."""
    xp = (x @ axis) * axis
    xo = x - xp
    a = normal @ xo
    b = normal @ np.cross(axis, x)
    c = normal @ xp - normal @ p_on_plane
    r = math.hypot(a, b)
    if r < 1e-300 or abs(c) > r * (1 + 1e-12):
        return []
    base = math.atan2(b, a)
    w = math.acos(max(-1.0, min(1.0, -c / r)))
    return [wrap_angle(base + w), wrap_angle(base - w)]


def place(dev, delta1, delta2, chooser):
    """Fold the development into space.

    `chooser(k, roots, next_rulings, rulings)` picks the fold angle at ruling
    k >= 3 among the roots of the alpha-plane condition; next_rulings[i] is
    r_{k+1} produced by roots[i].  Returns (deltas, rulings, a_pts, b_pts).
    """
    n = dev.n
    u = dev.dirs()
    g = [None] * (n + 1)
    g[2] = np.eye(3)
    g[1] = rot_axis(u[1], delta1)
    deltas = np.full(n + 1, np.nan)
    deltas[1] = delta1
    if n >= 3:
        g[3] = rot_axis(u[2], delta2)
        deltas[2] = delta2
    rul = np.zeros((n + 1, 3))
    rul[0] = g[1] @ u[0]
    for k in range(1, min(n, 3) + 1):
        rul[k] = g[k] @ u[k]
    pa = dev.points("a")
    p0, p1, p2 = g[1] @ pa[0], pa[1], pa[2]
    normal = normalize(np.cross(p1 - p0, p2 - p1))
    for k in range(3, n):
        axis = rul[k] / np.linalg.norm(rul[k])
        x = g[k] @ pa[k + 1]
        roots = _solve_fold(axis, x, normal, p1)
        if not roots:
            raise InfeasibleError("no fold angle keeps the alpha-section planar at face %d" % (k + 1))
        nxt = [rot_axis(axis, d) @ g[k] @ u[k + 1] for d in roots]
        i = chooser(k, roots, nxt, rul)
        deltas[k] = roots[i]
        g[k + 1] = rot_axis(axis, roots[i]) @ g[k]
        rul[k + 1] = g[k + 1] @ u[k + 1]
    pb = dev.points("b")
    a_pts = np.array([g[max(k, 1)] @ pa[k] for k in range(n + 1)])
    b_pts = np.array([g[max(k, 1)] @ pb[k] for k in range(n + 1)])
    return deltas, rul, a_pts, b_pts


def omega_chooser(omega):
    """Pick the root whose face (r_k, r_{k+1}) is closest to the omega-image
    of the face (r_{k-2}, r_{k-1}).  Planes rather than rulings are compared,
    so end faces with a changed opening are handled too."""
    def choose(k, roots, nxt, rul):
        target = normalize(omega.reflect_dir(np.cross(rul[k - 2], rul[k - 1])))
        return int(np.argmin([np.linalg.norm(np.cross(normalize(np.cross(rul[k], r)), target))
                              for r in nxt]))
    return choose


def nearest_chooser(previous):
    """Pick the root closest (as an angle) to previous[k]: continuation."""
    def choose(k, roots, nxt, rul):
        return int(np.argmin([abs(wrap_angle(d - previous[k])) for d in roots]))
    return choose


def _dev_dir(theta):
    return np.array([math.cos(theta), math.sin(theta), 0.0])


def _line_hit(p, d, theta):
    """Distance along the ray at angle theta where the line p + lam d meets it."""
    return line_ray_param(p, d, _dev_dir(theta))[1]


def mirror_plane_from_normals(na, nb):
    n = np.cross(na, nb)
    nn = np.linalg.norm(n)
    if nn < 1e-9:
        raise InfeasibleError("alpha and beta are parallel: mirror plane undefined")
    return Plane(np.zeros(3), n / nn)


def _angle(t):
    return 2.0 * math.atan(t) if math.isfinite(t) else math.pi


def build_strip(config, selector, n, d1, d2=None):
    """Strip of n faces at fold state (d1, d2); d2 defaults to the coupled value.

    Rulings r0 and r3 are the mirror images of r2 and r1 in omega; openings
    then repeat with period 2, and beyond the germ the section-point
    distances repeat with period 2 as well.
    """
    if n < 3:
        raise ValueError("a strip needs at least 3 faces")
    cf = config.to_float()
    coupling = None
    delta1 = _angle(d1)
    if d2 is None:
        coupling = detect_coupling(cf, selector)
        delta2 = coupling.delta2(delta1)
    else:
        delta2 = _angle(d2)
        try:
            coupling = detect_coupling(cf, selector)
        except InfeasibleError:
            coupling = None
    mu = cf.mu
    sig = [2 * math.atan(cf.s1), 2 * math.atan(cf.s2), mu + 2 * math.atan(cf.s3)]
    tau = [2 * math.atan(cf.t1), 2 * math.atan(cf.t2), mu + 2 * math.atan(cf.t3)]
    g1 = rot_axis(EX, delta1)
    g3 = rot_axis(_dev_dir(mu), delta2)

    # anchors in f2: P1 = (1,0,0) on r1, Q2 = unit point of r2
    u1, u2 = _dev_dir(0.0), _dev_dir(mu)
    rho_a2 = _line_hit(u1, _dev_dir(sig[1]), mu)
    rho_b1 = _line_hit(u2, _dev_dir(tau[1]), 0.0)
    na = normalize(np.cross(g1 @ _dev_dir(sig[0]), _dev_dir(sig[1])))
    nb = normalize(np.cross(g1 @ _dev_dir(tau[0]), _dev_dir(tau[1])))
    omega = mirror_plane_from_normals(na, nb)

    v0 = g1.T @ omega.reflect_dir(u2)
    v3 = g3.T @ omega.reflect_dir(u1)
    germ_dev = max(abs(v0[2]), abs(v3[2]))
    th0 = math.atan2(v0[1], v0[0])
    th3 = math.atan2(v3[1], v3[0])
    openings = [wrap_angle(-th0), mu, wrap_angle(th3 - mu)]
    while len(openings) < n:
        openings.append(openings[-2])
    theta = np.concatenate([[0.0], np.cumsum(openings[:n])]) - openings[0]
    theta[1], theta[2] = 0.0, mu

    rho_a = np.zeros(n + 1)
    rho_b = np.zeros(n + 1)
    rho_a[1], rho_a[2] = 1.0, rho_a2
    rho_b[1], rho_b[2] = rho_b1, 1.0
    rho_a[0] = _line_hit(u1, _dev_dir(sig[0]), theta[0])
    rho_b[0] = _line_hit(rho_b1 * u1, _dev_dir(tau[0]), theta[0])
    rho_a[3] = _line_hit(rho_a2 * u2, _dev_dir(sig[2]), theta[3])
    rho_b[3] = _line_hit(u2, _dev_dir(tau[2]), theta[3])
    for k in range(4, n + 1):
        rho_a[k] = rho_a[k - 2]
        rho_b[k] = rho_b[k - 2]
    dev = Development(theta, rho_a, rho_b)

    deltas, rul, a_pts, b_pts = place(dev, delta1, delta2, omega_chooser(omega))
    return ConeStrip(config, selector, dev, deltas, rul, a_pts, b_pts, coupling, float(germ_dev))


def germ_omega(dev, delta1):
    """Mirror plane computed from faces f1, f2 alone at fold angle delta1."""
    g1 = rot_axis(EX, delta1)
    pa, pb = dev.points("a"), dev.points("b")
    na = np.cross(pa[1] - g1 @ pa[0], pa[2] - pa[1])
    nb = np.cross(pb[1] - g1 @ pb[0], pb[2] - pb[1])
    return mirror_plane_from_normals(normalize(na), normalize(nb))


def refold(strip, delta1, delta2=None, guess=None):
    """The same development at another fold state.

    Roots are picked with the germ's mirror plane; at a flat state (where
    that plane is undefined) the root nearest `guess` is taken instead.
    """
    if delta2 is None:
        if strip.coupling is None:
            raise InfeasibleError("strip has no fold coupling; pass delta2")
        delta2 = strip.coupling.delta2(delta1)
    try:
        chooser = omega_chooser(germ_omega(strip.dev, delta1))
    except InfeasibleError:
        if guess is None:
            # approach the flat state from a neighbouring regular state
            eps = 1e-7 if delta1 <= 0 else -1e-7
            guess = refold(strip, delta1 + eps).deltas
        chooser = nearest_chooser(guess)
    deltas, rul, a_pts, b_pts = place(strip.dev, delta1, delta2, chooser)
    return ConeStrip(strip.config, strip.selector, strip.dev, deltas, rul, a_pts, b_pts,
                     strip.coupling, strip.germ_deviation, strip.extended)


# ------------------------------------------------------------------- checks

def mirror_plane_omega(strip):
    """Plane through V orthogonal to the line alpha ∩ beta of the strip."""
    return mirror_plane_from_normals(strip.alpha().normal, strip.beta().normal)


def _index_range(strip):
    lo, hi = (1, strip.n - 1) if strip.extended else (0, strip.n)
    return lo, hi


def period4_deviation(strip):
    """max |x_k - x_{k+4}| over rulings and both section polygons."""
    lo, hi = _index_range(strip)
    worst = 0.0
    for arr in (strip.rulings, strip.a_points, strip.b_points):
        for k in range(lo, hi - 3):
            worst = max(worst, float(np.linalg.norm(arr[k] - arr[k + 4])))
    return worst


def mirror_deviation(strip, omega=None):
    """max |omega(x_k) - x_{k+2}| over rulings and section points."""
    omega = mirror_plane_omega(strip) if omega is None else omega
    lo, hi = _index_range(strip)
    worst = 0.0
    for arr, pts in ((strip.rulings, False), (strip.a_points, True), (strip.b_points, True)):
        for k in range(lo, hi - 1):
            img = omega.reflect(arr[k]) if pts else omega.reflect_dir(arr[k])
            worst = max(worst, float(np.linalg.norm(img - arr[k + 2])))
    return worst


def germ_mirror_deviation(strip, omega=None):
    """Distance of the lines omega(a1), omega(b1) from a3, b3 (germ only)."""
    omega = mirror_plane_omega(strip) if omega is None else omega
    worst = 0.0
    for pts in (strip.a_points, strip.b_points):
        p0, p1, p2, p3 = pts[:4]
        d3 = normalize(p3 - p2)
        for x in (omega.reflect(p0), omega.reflect(p1)):
            r = x - p2
            worst = max(worst, float(np.linalg.norm(r - (r @ d3) * d3)))
    return worst


def _segments_cross(a, b, c, d, plane):
    """Do segments ab and cd cross (projected into `plane`)?"""
    n = plane.normal
    e1 = normalize(np.cross(n, EX if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])))
    e2 = np.cross(n, e1)
    pa, pb, pc, pd = ((x @ e1, x @ e2) for x in (a, b, c, d))

    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (orient(pa, pb, pc) * orient(pa, pb, pd) < 0
            and orient(pc, pd, pa) * orient(pc, pd, pb) < 0)


def verify_antiparallelogram(strip, which="a"):
    """Report on the 4-gon P1 P2 P3 P4 of one section polygon.

    Keys: closure (period-4 deviation of the polygon), side_pairing (max
    difference of opposite side lengths), crossed_pair (which opposite pair
    of sides crosses: 'P1P2/P3P4', 'P2P3/P4P1' or None), ok.
    """
    pts = strip.a_points if which == "a" else strip.b_points
    lo, hi = _index_range(strip)
    closure = max((float(np.linalg.norm(pts[k] - pts[k + 4])) for k in range(lo, hi - 3)),
                  default=float("nan"))
    p1, p2, p3, p4 = pts[1:5]
    side = [np.linalg.norm(p2 - p1), np.linalg.norm(p3 - p2),
            np.linalg.norm(p4 - p3), np.linalg.norm(p1 - p4)]
    pairing = max(abs(side[0] - side[2]), abs(side[1] - side[3]))
    plane = fit_plane(pts[1:5])[0]
    crossed = None
    if _segments_cross(p1, p2, p3, p4, plane):
        crossed = "P1P2/P3P4"
    elif _segments_cross(p2, p3, p4, p1, plane):
        crossed = "P2P3/P4P1"
    return {"closure": closure, "side_pairing": float(pairing), "crossed_pair": crossed,
            "ok": bool(closure < 1e-9 and pairing < 1e-9 and crossed is not None)}


def isometry_deviation(strip):
    """Max deviation of openings, ruling distances and section edge lengths
    from the development (0 for an exact isometric placement)."""
    dev = strip.dev
    r = strip.rulings / np.linalg.norm(strip.rulings, axis=1)[:, None]
    ang = np.arccos(np.clip(np.sum(r[1:] * r[:-1], axis=1), -1, 1))
    worst = float(np.max(np.abs(ang - np.arccos(np.cos(dev.openings())))))
    for pts, dpts in ((strip.a_points, dev.points("a")), (strip.b_points, dev.points("b"))):
        worst = max(worst, float(np.max(np.abs(np.linalg.norm(pts, axis=1)
                                                - np.linalg.norm(dpts, axis=1)))))
        el = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        dl = np.linalg.norm(np.diff(dpts, axis=0), axis=1)
        worst = max(worst, float(np.max(np.abs(el - dl))))
    return worst


def section_planarity(strip):
    return fit_plane(strip.a_points)[1], fit_plane(strip.b_points)[1]


def pencil_section(strip, lam):
    """Section with cross-ratio (a, b; c, V) = lam on every ruling.

    lam = 0 gives the alpha-polygon, lam = inf the beta-polygon; lam = 1
    collapses every point into V and is rejected.
    """
    p = np.linalg.norm(strip.a_points, axis=1) * np.sign(
        np.sum(strip.a_points * strip.rulings, axis=1))
    q = np.linalg.norm(strip.b_points, axis=1) * np.sign(
        np.sum(strip.b_points * strip.rulings, axis=1))
    if math.isinf(lam):
        c = q
    else:
        if abs(lam - 1.0) < 1e-14:
            raise ValueError("cross-ratio 1 maps every ruling to the vertex")
        den = lam * p - q
        if np.any(np.abs(den) < 1e-12 * (np.abs(p) + np.abs(q))):
            k = int(np.argmin(np.abs(den)))
            raise ValueError("cross-ratio %g sends the point on ruling %d to infinity" % (lam, k))
        c = p * q * (lam - 1.0) / den
    r = strip.rulings / np.linalg.norm(strip.rulings, axis=1)[:, None]
    pts = c[:, None] * r
    plane, res = fit_plane(pts)
    return SectionPolygon(pts, plane, res, float(lam), pencil_deviation(strip, plane))


def pencil_deviation(strip, plane):
    """How far `plane` is from containing the line alpha ∩ beta."""
    pa, ra = fit_plane(strip.a_points)
    pb, rb = fit_plane(strip.b_points)
    d = np.cross(pa.normal, pb.normal)
    if np.linalg.norm(d) < 1e-12:
        return float("nan")
    d = d / np.linalg.norm(d)
    # a point on alpha ∩ beta: combination of the two normals
    m = np.array([[pa.normal @ pa.normal, pa.normal @ pb.normal],
                  [pb.normal @ pa.normal, pb.normal @ pb.normal]])
    h = np.array([pa.normal @ pa.point, pb.normal @ pb.point])
    x = np.linalg.solve(m, h)
    pt = x[0] * pa.normal + x[1] * pb.normal
    scale = max(1.0, float(np.max(np.linalg.norm(strip.a_points, axis=1))))
    return float(max(abs(plane.normal @ d), abs(plane.distance(pt)) / scale))


def strip_report(strip, lambdas=()):
    """Residuals of one placed strip (see flex_sweep)."""
    from .discrete_cone import eval_D1, eval_D2
    fold = strip.fold
    rep = {
        "delta1": float(strip.deltas[1]),
        "delta2": float(strip.deltas[2]),
        "D1": abs(eval_D1(strip.config.to_float(), fold)),
        "D2": abs(eval_D2(strip.config.to_float(), fold)),
        "isometry": isometry_deviation(strip),
        "period4": period4_deviation(strip),
    }
    rep["alpha_planarity"], rep["beta_planarity"] = section_planarity(strip)
    try:
        omega = mirror_plane_omega(strip)
        rep["mirror"] = mirror_deviation(strip, omega)
        rep["germ_mirror"] = germ_mirror_deviation(strip, omega)
    except InfeasibleError:
        rep["mirror"] = rep["germ_mirror"] = float("nan")
    rep["pencil_planarity"] = max((pencil_section(strip, lam).residual for lam in lambdas),
                                  default=0.0)
    return rep


def is_flat(strip, tol=1e-9):
    """All faces in one plane (a flat state of the motion)."""
    pts = np.vstack([strip.a_points, strip.b_points, strip.rulings])
    return fit_plane(np.vstack([pts, np.zeros(3)]))[1] < tol


def flex_sweep(strip, d1_samples, lambdas=()):
    """Rebuild the strip at each fold tangent in d1_samples (inf allowed).

    Returns (samples, notes); samples is a list of (d1, strip, mesh, report).
    A sample where the coupling sends d2 to a singular value is skipped and
    noted.  Flat states are valid samples; the mirror check reports nan there.
    """
    samples, notes = [], []
    for d1 in d1_samples:
        try:
            s = refold(strip, _angle(d1))
        except (InfeasibleError, ZeroDivisionError) as exc:
            notes.append("d1=%r skipped: %s" % (float(d1), exc))
            continue
        rep = strip_report(s, lambdas)
        rep["flat"] = bool(is_flat(s))
        samples.append((d1, s, s.mesh(), rep))
    return samples, notes


def extend_end_faces(strip, angle0=None, anglen=None, flip0=False, flipn=False):
    """Change the opening of the first and/or last face.

    Only r0 (resp. r_n) moves inside its face plane; the section edges of the
    end faces keep their lines, so closure and planarity are unaffected.
    flip0/flipn negate the opening (the end face turned by pi about r1 or
    r_{n-1}).
    """
    dev = strip.dev
    n = dev.n
    theta = dev.theta.copy()
    rho_a, rho_b = dev.rho_a.copy(), dev.rho_b.copy()
    o = dev.openings()
    o0 = o[0] if angle0 is None else angle0
    on = o[-1] if anglen is None else anglen
    if flip0:
        o0 = -o0
    if flipn:
        on = -on
    pa, pb = dev.points("a"), dev.points("b")
    theta[0] = theta[1] - o0
    rho_a[0] = _line_hit(pa[1], pa[0] - pa[1], theta[0])
    rho_b[0] = _line_hit(pb[1], pb[0] - pb[1], theta[0])
    theta[n] = theta[n - 1] + on
    rho_a[n] = _line_hit(pa[n - 1], pa[n] - pa[n - 1], theta[n])
    rho_b[n] = _line_hit(pb[n - 1], pb[n] - pb[n - 1], theta[n])
    new = Development(theta, rho_a, rho_b)
    changed = angle0 is not None or anglen is not None or flip0 or flipn
    deltas, rul, a_pts, b_pts = place(new, strip.deltas[1], strip.deltas[2],
                                      nearest_chooser(strip.deltas))
    return ConeStrip(strip.config, strip.selector, new, deltas, rul, a_pts, b_pts,
                     strip.coupling, strip.germ_deviation, strip.extended or changed)


def perturb_strip(strip, rel, names=("t2",)):
    """Residuals of a strip whose config is perturbed by `rel` while the fold
    state stays that of the unperturbed motion (negative control).  When no
    strip can be placed at all, period4 is inf and 'infeasible' says why."""
    from .discrete_cone import perturb
    bad = perturb(strip.config, rel, names)
    d1 = math.tan(strip.deltas[1] / 2)
    d2 = math.tan(strip.deltas[2] / 2)
    try:
        return strip_report(build_strip(bad, strip.selector, strip.n, d1, d2=d2))
    except InfeasibleError as exc:
        # the perturbed germ cannot even be folded into a strip with planar alpha
        return {"period4": math.inf, "infeasible": str(exc)}
