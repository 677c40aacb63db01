//! Small numeric utilities shared across the crate: compensated summation,
//! Gauss-Legendre quadrature with adaptive refinement, and least-squares lines.

use num_complex::Complex64;

/// Kahan-Babuska compensated accumulator.
///
/// Mass sums over stopping-word sets can run to millions of terms and are
/// checked against 1e-12 gates, so plain summation is not good enough.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated complex accumulator built from two [`KahanSum`]s.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

// Gauss-Legendre 15-point rule on [-1, 1]; nodes are the non-negative half.
const GL15_NODES: [f64; 8] = [
    0.0,
    0.201_194_093_997_434_5,
    0.394_151_347_077_563_4,
    0.570_972_172_608_538_8,
    0.724_417_731_360_170_0,
    0.848_206_583_410_427_2,
    0.937_273_392_400_705_9,
    0.987_992_518_020_485_4,
];
const GL15_WEIGHTS: [f64; 8] = [
    0.202_578_241_925_561_3,
    0.198_431_485_327_111_6,
    0.186_161_000_015_562_2,
    0.166_269_205_816_993_9,
    0.139_570_677_926_154_3,
    0.107_159_220_467_171_9,
    0.070_366_047_488_108_1,
    0.030_753_241_996_117_3,
];

pub fn gl15_complex<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = GL15_WEIGHTS[0] * f(mid);
    for k in 1..8 {
        let dx = half * GL15_NODES[k];
        acc += GL15_WEIGHTS[k] * (f(mid + dx) + f(mid - dx));
    }
    acc * half
}

pub fn gl15_real<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = GL15_WEIGHTS[0] * f(mid);
    for k in 1..8 {
        let dx = half * GL15_NODES[k];
        acc += GL15_WEIGHTS[k] * (f(mid + dx) + f(mid - dx));
    }
    acc * half
}

/// Adaptive bisection quadrature on top of the 15-point panel.
///
/// The panel estimate is compared against its own two halves; intervals are
/// split until the disagreement falls under the (absolute) tolerance.
pub fn adaptive_complex<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> Complex64 {
    fn split<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        b: f64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let left = gl15_complex(f, a, m);
        let right = gl15_complex(f, m, b);
        let refined = left + right;
        if (refined - whole).norm() <= tol || depth >= 48 {
            return refined;
        }
        split(f, a, m, left, 0.5 * tol, depth + 1) + split(f, m, b, right, 0.5 * tol, depth + 1)
    }
    split(f, a, b, gl15_complex(f, a, b), tol, 0)
}

/// Composite rule for integrands oscillating like `exp(i*omega*u)`: the range
/// is pre-split so each panel sees only a few radians before adaptivity runs.
pub fn oscillatory_complex<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    omega: f64,
    tol: f64,
) -> Complex64 {
    let panels = ((omega.abs() * (b - a) / 6.0).ceil() as usize).max(1);
    let width = (b - a) / panels as f64;
    let mut acc = KahanComplex::new();
    let panel_tol = tol / panels as f64;
    for k in 0..panels {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == panels { b } else { lo + width };
        acc.add(adaptive_complex(f, lo, hi, panel_tol));
    }
    acc.value()
}

/// Ordinary least squares line `y = slope*x + intercept`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square of the fit residuals.
    pub rms: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a line fit");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    assert!(sxx > 0.0, "degenerate abscissae in line fit");
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    LineFit {
        slope,
        intercept,
        rms: (rss / n).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn kahan_recovers_small_increments() {
        let mut acc = KahanSum::new();
        acc.add(1.0);
        for _ in 0..1_000_000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1e-10)).abs() < 1e-15);
    }

    #[test]
    fn gl15_integrates_polynomials_exactly() {
        // degree 29 is the rule's exactness limit; degree 7 is deep inside it
        let f = |x: f64| x.powi(7) - 3.0 * x.powi(4) + x;
        let exact = |x: f64| x.powi(8) / 8.0 - 0.6 * x.powi(5) + x * x / 2.0;
        let got = gl15_real(&f, -0.3, 1.7);
        assert!((got - (exact(1.7) - exact(-0.3))).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let omega = 400.0;
        let f = |u: f64| Complex64::new(0.0, omega * u).exp();
        let got = oscillatory_complex(&f, 0.0, 1.0, omega, 1e-12);
        let exact = (Complex64::new(0.0, omega).exp() - Complex64::new(0.0, 0.0).exp())
            / Complex64::new(0.0, omega);
        assert!((got - exact).norm() < 1e-10);
    }

    #[test]
    fn line_fit_recovers_planted_line() {
        let xs: Vec<f64> = (0..20).map(|k| k as f64 / 3.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 2.5 * x - 4.0).collect();
        let fit = fit_line(&xs, &ys);
        assert!((fit.slope - 2.5).abs() < 1e-12);
        assert!((fit.intercept + 4.0).abs() < 1e-12);
        assert!(fit.rms < 1e-12);
        let _ = PI;
    }
}
