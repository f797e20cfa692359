use crate::{Complex64, Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error: f64,
    pub nodes: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 7/15 panel. Error is |K15 − G7| (deliberately pessimistic).
pub fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut vals = [Complex64::new(0.0, 0.0); 15];
    vals[7] = fc;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut absk = fc.norm() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (lo, hi) = (f(c - x), f(c + x));
        vals[j] = lo;
        vals[14 - j] = hi;
        k += (lo + hi) * WGK[j];
        absk += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            g += (lo + hi) * WG[j / 2];
        }
    }
    // QUADPACK-style scaling of |K − G|
    let mean = k * 0.5;
    let mut asc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        asc += WGK[j] * ((vals[j] - mean).norm() + (vals[14 - j] - mean).norm());
    }
    let h = h.abs();
    let (k, g, asc, absk) = (k * h, g * h, asc * h, absk * h);
    let mut err = (k - g).norm();
    if asc > 0.0 && err > 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    let round = 50.0 * f64::EPSILON * absk;
    if round > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(round);
    }
    (k * (b - a).signum(), err)
}

/// Globally adaptive GK15 on [a, b], pre-split into `pieces` panels.
pub fn adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    pieces: usize,
    abs_tol: f64,
    rel_tol: f64,
) -> QuadratureResult {
    let pieces = pieces.max(1);
    let mut panels: Vec<(f64, f64, Complex64, f64)> = (0..pieces)
        .map(|i| {
            let lo = a + (b - a) * i as f64 / pieces as f64;
            let hi = a + (b - a) * (i + 1) as f64 / pieces as f64;
            let (v, e) = gk15(f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    let mut evals = 15 * pieces;
    loop {
        let total: Complex64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        let round: f64 = 100.0 * f64::EPSILON * panels.iter().map(|p| p.2.norm()).sum::<f64>();
        if err <= abs_tol.max(rel_tol * total.norm()).max(round) || panels.len() > 4000 {
            return QuadratureResult { value: total, error: err, nodes: evals };
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            let total: Complex64 = panels.iter().map(|p| p.2).sum();
            return QuadratureResult { value: total, error: err, nodes: evals };
        }
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
        evals += 30;
    }
}

/// Envelope |f(η+iv)| ≤ amplitude·(1+|v|)^power·e^{−rate|v|}.
#[derive(Debug, Clone, Copy)]
pub struct Decay {
    pub amplitude: f64,
    pub rate: f64,
    pub power: f64,
}

impl Decay {
    /// Bound for (1/2π)∫_{|v|>V}|f|.
    pub fn tail(&self, v: f64) -> f64 {
        let slope = self.rate - self.power.max(0.0) / (1.0 + v);
        if slope <= 0.0 {
            return f64::INFINITY;
        }
        self.amplitude / PI * (1.0 + v).powf(self.power) * (-self.rate * v).exp() / slope
    }
}

/// (1/2πi)∫_{Re u = η} f(u) du, truncated where the decay bound makes the
/// tail smaller than 1e−14 of the running total (or `abs_floor`).
pub fn line_integral<F: Fn(Complex64) -> Complex64>(
    f: &F,
    eta: f64,
    decay: Decay,
    abs_floor: f64,
) -> Result<QuadratureResult> {
    if !(decay.rate > 0.0) {
        return Err(Error::Quadrature("decay rate must be positive".into()));
    }
    let g = |v: f64| f(Complex64::new(eta, v)) / (2.0 * PI);
    let mut v = (8.0 / decay.rate).max(4.0);
    let first = adaptive(&g, -v, v, (2.0 * v).ceil() as usize, abs_floor, 1e-14);
    let (mut value, mut error, mut nodes) = (first.value, first.error, first.nodes);
    loop {
        let tail = decay.tail(v);
        if tail <= abs_floor.max(1e-14 * value.norm()) {
            return Ok(QuadratureResult { value, error: error + tail, nodes });
        }
        if v > 1e4 {
            return Err(Error::Quadrature(format!(
                "tail bound {tail:.3e} not met by |Im u| = {v:.1}; integrand not decaying"
            )));
        }
        let nv = v * 1.5;
        let pieces = (nv - v).ceil() as usize;
        for (lo, hi) in [(v, nv), (-nv, -v)] {
            let r = adaptive(&g, lo, hi, pieces, abs_floor, 1e-14);
            value += r.value;
            error += r.error;
            nodes += r.nodes;
        }
        v = nv;
    }
}

/// Taylor data from samples f(c + r·ω^j), ω = e^{2πi/n}: returns
/// f^{(k)}(c) for k < n via the trapezoid rule on the circle.
pub fn cauchy_derivatives(samples: &[Complex64], radius: f64, orders: usize) -> Vec<Complex64> {
    let n = samples.len();
    let mut out = Vec::with_capacity(orders);
    let mut fact = 1.0;
    for k in 0..orders {
        if k > 0 {
            fact *= k as f64;
        }
        let mut s = Complex64::new(0.0, 0.0);
        for (j, v) in samples.iter().enumerate() {
            let ang = -2.0 * PI * (j * k % n) as f64 / n as f64;
            s += v * Complex64::from_polar(1.0, ang);
        }
        out.push(s * fact / (n as f64 * radius.powi(k as i32)));
    }
    out
}
