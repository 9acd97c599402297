//! Closed-form and numeric models: reception probability under multi-hop
//! flooding, expected neighbour count, key-sharing probability, energy-table
//! calibration and memory-bound network size.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use libm::{asin, fabs, log, pow, sqrt};

use crate::energy::{scheme_cost, CostTable, Scheme};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticsError {
    InvalidArgument(&'static str),
}

impl fmt::Display for AnalyticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticsError::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
        }
    }
}

impl core::error::Error for AnalyticsError {}

/// `x - 1 + p_loss^(k x)`; zero at a fixed point of the reception equation.
pub fn reception_residual(k: f64, p_loss: f64, x: f64) -> f64 {
    x - 1.0 + pow(p_loss, k * x)
}

/// Largest root in `[0, 1]` of `p_r = 1 - p_loss^(k p_r)`.
///
/// `p_r = 0` is always a root; it is returned only when no positive root
/// exists, which happens when `k ln(1/p_loss) <= 1`. Otherwise Newton's method
/// runs from `p_r = 1`; the residual is convex and positive there, so the
/// iterates decrease monotonically onto the positive root.
pub fn solve_pr(k: f64, p_loss: f64) -> f64 {
    if !(k > 0.0) || p_loss >= 1.0 {
        return 0.0;
    }
    if p_loss <= 0.0 {
        return 1.0;
    }
    let lp = log(p_loss);
    if -k * lp <= 1.0 {
        return 0.0;
    }
    let mut x = 1.0f64;
    for _ in 0..200 {
        let g = reception_residual(k, p_loss, x);
        if fabs(g) < 1e-13 {
            return x;
        }
        let dg = 1.0 + k * lp * pow(p_loss, k * x);
        let next = x - g / dg;
        if !(next > 0.0 && next < x) {
            break;
        }
        x = next;
    }
    // Newton stalled with the root close to 0; bisect on (lo, x], where the
    // residual dips below zero just right of the trivial root.
    let mut lo = x / 2.0;
    while reception_residual(k, p_loss, lo) >= 0.0 && lo > f64::MIN_POSITIVE {
        lo /= 2.0;
    }
    let mut hi = x;
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if reception_residual(k, p_loss, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Probability that a pair shares a key after `m` cycles when each of the
/// four messages of a handshake arrives with probability `p_r`.
pub fn p_share(m: u32, p_r: f64) -> f64 {
    let success = pow(p_r, 4.0);
    1.0 - pow(1.0 - success, m as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectivityParams {
    /// Expected neighbour count.
    pub k: f64,
    pub p_loss: f64,
    pub m: u32,
}

impl ConnectivityParams {
    pub fn p_r(&self) -> f64 {
        solve_pr(self.k, self.p_loss)
    }

    pub fn p_share(&self) -> f64 {
        p_share(self.m, self.p_r())
    }
}

/// Antiderivative of `sqrt(r^2 - x^2)` on `[-r, r]`.
fn half_chord_integral(x: f64, r: f64) -> f64 {
    let x = x.clamp(-r, r);
    let h = sqrt((r * r - x * x).max(0.0));
    0.5 * (x * h + r * r * asin((x / r).clamp(-1.0, 1.0)))
}

/// Area of the origin-centred disk of radius `r` within `{X <= u, Y <= v}`.
fn quadrant_area(u: f64, v: f64, r: f64) -> f64 {
    if u <= -r || v <= -r {
        return 0.0;
    }
    let u = u.min(r);
    let hi = |a: f64, b: f64| {
        let (a, b) = (a.max(-r), b.min(u));
        if b <= a {
            0.0
        } else {
            half_chord_integral(b, r) - half_chord_integral(a, r)
        }
    };
    let flat = |a: f64, b: f64| {
        let (a, b) = (a.max(-r), b.min(u));
        if b <= a {
            0.0
        } else {
            b - a
        }
    };
    if v >= r {
        return 2.0 * hi(-r, r);
    }
    // Columns with |X| < w reach the line Y = v.
    let w = sqrt(r * r - v * v);
    let middle = hi(-w, w) + v * flat(-w, w);
    if v >= 0.0 {
        2.0 * hi(-r, -w) + middle + 2.0 * hi(w, r)
    } else {
        middle
    }
}

/// Area of the disk of radius `r` centred at `(x, y)` inside `[0, a]^2`.
pub fn disk_square_area(x: f64, y: f64, a: f64, r: f64) -> f64 {
    let (x0, x1, y0, y1) = (-x, a - x, -y, a - y);
    let area = quadrant_area(x1, y1, r) - quadrant_area(x0, y1, r) - quadrant_area(x1, y0, r)
        + quadrant_area(x0, y0, r);
    area.max(0.0)
}

/// Fraction of the field within range `r` of a node at `(x, y)`.
pub fn area_fraction(x: f64, y: f64, a: f64, r: f64) -> f64 {
    disk_square_area(x, y, a, r) / (a * a)
}

/// Whether the disk around `(x, y)` lies entirely inside the field, where
/// the area fraction is `pi (r/a)^2`.
pub fn in_region_one(x: f64, y: f64, a: f64, r: f64) -> bool {
    x >= r && y >= r && x <= a - r && y <= a - r
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if fabs(dx) < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Panel edges on `[0, a/2]`, split where the disk starts touching an edge.
fn panels(a: f64, r: f64, per_segment: usize) -> Vec<f64> {
    let half = a / 2.0;
    let mut cuts = alloc::vec![0.0, half];
    for c in [r, a - r] {
        if c > 0.0 && c < half {
            cuts.push(c);
        }
    }
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let mut edges = Vec::new();
    for w in cuts.windows(2) {
        for s in 0..per_segment {
            edges.push(w[0] + (w[1] - w[0]) * s as f64 / per_segment as f64);
        }
    }
    edges.push(half);
    edges
}

/// Mean area fraction over uniform node positions.
pub fn mean_area_fraction(a: f64, r: f64) -> f64 {
    let gl = gauss_legendre(12);
    let edges = panels(a, r, 12);
    let mut pts = Vec::new();
    for w in edges.windows(2) {
        let (mid, hw) = ((w[0] + w[1]) / 2.0, (w[1] - w[0]) / 2.0);
        for &(x, wt) in &gl {
            pts.push((mid + hw * x, hw * wt));
        }
    }
    let mut sum = 0.0;
    for &(x, wx) in &pts {
        for &(y, wy) in &pts {
            sum += wx * wy * area_fraction(x, y, a, r);
        }
    }
    // Four symmetric quadrants of the field.
    4.0 * sum / (a * a)
}

/// Expected number of neighbours of a node among `n` deployed uniformly in
/// an `a x a` field with range `r`.
pub fn expected_degree(n: usize, a: f64, r: f64) -> Result<f64, AnalyticsError> {
    if n == 0 {
        return Err(AnalyticsError::InvalidArgument("network size must be at least 1"));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(AnalyticsError::InvalidArgument("field side must be positive"));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(AnalyticsError::InvalidArgument("range must be non-negative"));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    if r >= a * core::f64::consts::SQRT_2 {
        return Ok((n - 1) as f64);
    }
    Ok((n - 1) as f64 * mean_area_fraction(a, r))
}

/// Reference per-handshake energy of each scheme, mJ.
pub const REFERENCE_ENERGY_MJ: [(Scheme, f64); 4] =
    [(Scheme::Certificate, 187.6), (Scheme::Hybrid, 75.26), (Scheme::Ba, 58.68), (Scheme::Iba, 60.50)];

/// Extra energy of iBA over BA per handshake, mJ.
pub const IBA_EXTRA_MJ: f64 = 1.82;

/// Mica2dot radio: mJ per octet transmitted and received.
pub const MICA2DOT_TX_PER_OCTET: f64 = 0.0592;
pub const MICA2DOT_RX_PER_OCTET: f64 = 0.0286;

/// Network size supported by the hybrid Bloom/Merkle scheme in 64 KiB.
pub const HYBRID_MAX_NETWORK: u64 = 15792;

pub fn reference_energy(scheme: Scheme) -> f64 {
    REFERENCE_ENERGY_MJ.iter().find(|(s, _)| *s == scheme).map(|(_, v)| *v).unwrap_or(0.0)
}

/// Solves the per-operation costs from the per-handshake totals.
///
/// Radio costs are fixed to the given per-octet rates. SHA1, AES and HMAC
/// are assumed to cost the same per invocation; with the iBA-over-BA
/// difference of one SHA1 and one AES this fixes them. The BA total then
/// fixes ECDH, and the certificate and hybrid totals leave their scheme
/// specific operation as the residual.
pub fn calibrate(tx_per_octet: f64, rx_per_octet: f64) -> CostTable {
    let radio = |s: Scheme| {
        let c = scheme_cost(s);
        c.tx_octets as f64 * tx_per_octet + c.rx_octets as f64 * rx_per_octet
    };
    let (ba, iba) = (scheme_cost(Scheme::Ba).ops, scheme_cost(Scheme::Iba).ops);
    let extra_ops = (iba.sha1 - ba.sha1 + iba.aes - ba.aes + iba.hmac - ba.hmac) as f64;
    let sym = (IBA_EXTRA_MJ - (radio(Scheme::Iba) - radio(Scheme::Ba))) / extra_ops;
    let sym_ops = |s: Scheme| {
        let o = scheme_cost(s).ops;
        (o.sha1 + o.aes + o.hmac) as f64 * sym
    };
    let ecdh = reference_energy(Scheme::Ba) - radio(Scheme::Ba) - sym_ops(Scheme::Ba);
    let cert = reference_energy(Scheme::Certificate) - radio(Scheme::Certificate) - sym_ops(Scheme::Certificate) - ecdh;
    let bloom = reference_energy(Scheme::Hybrid) - radio(Scheme::Hybrid) - sym_ops(Scheme::Hybrid) - ecdh;
    CostTable {
        tx_per_octet,
        rx_per_octet,
        sha1: sym,
        aes: sym,
        hmac: sym,
        ecdh,
        cert_verify: cert,
        bloom,
    }
}

/// Default calibration on the Mica2dot radio rates.
pub fn default_cost_table() -> CostTable {
    calibrate(MICA2DOT_TX_PER_OCTET, MICA2DOT_RX_PER_OCTET)
}

/// Largest network whose revocation list of `id_octets`-wide ids fits in
/// `memory_octets`; the hybrid scheme is bounded by its filter instead.
pub fn max_network_size(scheme: Scheme, memory_octets: u64, id_octets: u64) -> Result<u64, AnalyticsError> {
    if scheme == Scheme::Hybrid {
        return Ok(HYBRID_MAX_NETWORK);
    }
    if id_octets == 0 {
        return Err(AnalyticsError::InvalidArgument("id width must be positive"));
    }
    Ok(memory_octets / id_octets)
}
