"""Batched planar forward kinematics for rigid-body trees.

Everything here works on configuration arrays of shape ``(..., n)`` so that a
single call can evaluate one state or a whole stack of states (collocation
nodes, finite-difference clouds).  The sagittal plane is x-z with z up;
angles are counterclockwise, so a positive leg angle swings the foot in +x.
"""

from __future__ import annotations

import numpy as np

FLOATING_BASE = "floating-base-planar"
REVOLUTE = "revolute"
PRISMATIC = "prismatic"

# 90 degree rotation, used for d/dtheta of a rotated vector
_S = np.array([[0.0, -1.0], [1.0, 0.0]])


def rot(theta):
    """Rotation matrices of shape (..., 2, 2) for angles of shape (...)."""
    c, s = np.cos(theta), np.sin(theta)
    out = np.empty(np.shape(theta) + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


class FrameKinematics:
    """World pose, Jacobians and bias accelerations of every link frame.

    Built once per (model, q[, dq]) evaluation and then queried for points
    attached to links.  All arrays carry the batch shape of ``q``.
    """

    def __init__(self, model, q, dq=None):
        q = np.asarray(q, dtype=float)
        if q.shape[-1] != model.nq:
            raise ValueError(f"expected q with last dim {model.nq}, got {q.shape}")
        batch = q.shape[:-1]
        n = model.nq
        nl = len(model.links)
        self.model = model
        self.batch = batch
        self.q = q
        self.dq = None if dq is None else np.asarray(dq, dtype=float)

        self.p = np.zeros(batch + (nl, 2))        # link frame origin, world
        self.theta = np.zeros(batch + (nl,))      # link frame angle, world
        self.jp = np.zeros(batch + (nl, 2, n))    # d p / d q
        self.jth = np.zeros(batch + (nl, n))      # d theta / d q
        if self.dq is not None:
            self.v = np.zeros(batch + (nl, 2))
            self.w = np.zeros(batch + (nl,))
            self.a_bias = np.zeros(batch + (nl, 2))   # Jdot*dq of frame origin
            self.al_bias = np.zeros(batch + (nl,))    # Jdot*dq of frame angle

        for j, joint in enumerate(model.joints):
            par = joint.parent
            if par < 0:
                p_att = np.zeros(batch + (2,))
                th_att = np.full(batch, joint.angle)
                jp_att = np.zeros(batch + (2, n))
                jth_att = np.zeros(batch + (n,))
                if self.dq is not None:
                    v_att = np.zeros(batch + (2,))
                    w_att = np.zeros(batch)
                    a_att = np.zeros(batch + (2,))
                    al_att = np.zeros(batch)
            else:
                Rp = rot(self.theta[..., par])
                r = Rp @ joint.origin                      # (..., 2)
                p_att = self.p[..., par, :] + r
                th_att = self.theta[..., par] + joint.angle
                # d(R(th) a)/dq = (S R a) outer jth
                Sr = r @ _S.T
                jp_att = self.jp[..., par, :, :] + Sr[..., :, None] * self.jth[..., par, None, :]
                jth_att = self.jth[..., par, :]
                if self.dq is not None:
                    wp = self.w[..., par]
                    v_att = self.v[..., par, :] + wp[..., None] * Sr
                    w_att = wp
                    # a = a_par + al*S r - w^2 r
                    a_att = (self.a_bias[..., par, :]
                             + self.al_bias[..., par, None] * Sr
                             - (wp ** 2)[..., None] * r)
                    al_att = self.al_bias[..., par]

            i0 = joint.coord_start
            if joint.kind == FLOATING_BASE:
                self.p[..., j, :] = q[..., i0:i0 + 2]
                self.theta[..., j] = th_att + q[..., i0 + 2]
                self.jp[..., j, 0, i0] = 1.0
                self.jp[..., j, 1, i0 + 1] = 1.0
                self.jth[..., j, :] = jth_att
                self.jth[..., j, i0 + 2] += 1.0
                if self.dq is not None:
                    self.v[..., j, :] = self.dq[..., i0:i0 + 2]
                    self.w[..., j] = w_att + self.dq[..., i0 + 2]
                    # bias terms vanish: origin is a coordinate itself
            elif joint.kind == REVOLUTE:
                self.p[..., j, :] = p_att
                self.theta[..., j] = th_att + q[..., i0]
                self.jp[..., j, :, :] = jp_att
                self.jth[..., j, :] = jth_att
                self.jth[..., j, i0] += 1.0
                if self.dq is not None:
                    self.v[..., j, :] = v_att
                    self.w[..., j] = w_att + self.dq[..., i0]
                    self.a_bias[..., j, :] = a_att
                    self.al_bias[..., j] = al_att
            elif joint.kind == PRISMATIC:
                u_w = rot(th_att) @ joint.axis             # (..., 2)
                Su = u_w @ _S.T
                qi = q[..., i0]
                self.p[..., j, :] = p_att + u_w * qi[..., None]
                self.theta[..., j] = th_att
                self.jp[..., j, :, :] = (jp_att
                                         + (Su * qi[..., None])[..., :, None] * jth_att[..., None, :])
                self.jp[..., j, :, i0] += u_w
                self.jth[..., j, :] = jth_att
                if self.dq is not None:
                    dqi = self.dq[..., i0]
                    w_here = w_att
                    self.v[..., j, :] = v_att + w_here[..., None] * Su * qi[..., None] + u_w * dqi[..., None]
                    self.w[..., j] = w_here
                    self.a_bias[..., j, :] = (a_att
                                              + (al_att[..., None] * Su - (w_here ** 2)[..., None] * u_w) * qi[..., None]
                                              + 2.0 * (w_here * dqi)[..., None] * Su)
                    self.al_bias[..., j] = al_att
            else:
                raise ValueError(f"unknown joint kind {joint.kind!r}")

    # -- queries for a point fixed in a link frame -------------------------

    def point_world(self, link, r_local):
        r = rot(self.theta[..., link]) @ np.asarray(r_local, dtype=float)
        return self.p[..., link, :] + r

    def point_jacobian(self, link, r_local):
        r = rot(self.theta[..., link]) @ np.asarray(r_local, dtype=float)
        Sr = r @ _S.T
        return self.jp[..., link, :, :] + Sr[..., :, None] * self.jth[..., link, None, :]

    def point_velocity(self, link, r_local):
        r = rot(self.theta[..., link]) @ np.asarray(r_local, dtype=float)
        return self.v[..., link, :] + self.w[..., link, None] * (r @ _S.T)

    def point_bias_accel(self, link, r_local):
        """Jdot(q)*dq contribution at the point (acceleration with ddq = 0)."""
        r = rot(self.theta[..., link]) @ np.asarray(r_local, dtype=float)
        Sr = r @ _S.T
        w = self.w[..., link]
        return (self.a_bias[..., link, :]
                + self.al_bias[..., link, None] * Sr
                - (w ** 2)[..., None] * r)
