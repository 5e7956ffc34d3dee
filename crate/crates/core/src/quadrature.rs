//! Gauss–Legendre rules, composite panel rules and a globally adaptive
//! Gauss–Kronrod (7, 15) integrator for complex-valued integrands.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

/// Nodes and weights of an n-point Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared rule of order n, built once.
    pub fn cached(n: usize) -> std::sync::Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, std::sync::Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard.entry(n).or_insert_with(|| std::sync::Arc::new(GaussLegendre::new(n))).clone()
    }

    /// Nodes and weights mapped to [a, b], appended to the given buffers.
    pub fn push_mapped(&self, a: f64, b: f64, xs: &mut Vec<f64>, ws: &mut Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            xs.push(mid + half * x);
            ws.push(half * w);
        }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule over consecutive breakpoints, `order` nodes per panel.
pub fn composite(breaks: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::cached(order);
    let mut xs = Vec::with_capacity(order * breaks.len().saturating_sub(1));
    let mut ws = Vec::with_capacity(xs.capacity());
    for pair in breaks.windows(2) {
        rule.push_mapped(pair[0], pair[1], &mut xs, &mut ws);
    }
    (xs, ws)
}

/// Composite rule on [a, b] with `panels` equal panels.
pub fn uniform_panels(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let breaks: Vec<f64> = (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect();
    composite(&breaks, order)
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const GK_WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_64, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = fc * GK_WK[7];
    let mut gauss = fc * GK_WG[3];
    for i in 0..7 {
        let dx = half * GK_X[i];
        let s = f(mid - dx) + f(mid + dx);
        kron += s * GK_WK[i];
        if i % 2 == 1 {
            gauss += s * GK_WG[i / 2];
        }
    }
    (kron * half, ((kron - gauss) * half).norm())
}

/// Outcome of [`adaptive`]: integral estimate, error estimate, convergence flag.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
}

/// Globally adaptive GK15 on [a, b]: bisects the interval with the largest
/// error estimate until the total estimate drops below `abs_tol`.
pub fn adaptive<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, abs_tol: f64, max_intervals: usize) -> Adaptive {
    if a == b {
        return Adaptive { value: Complex64::new(0.0, 0.0), error: 0.0, converged: true };
    }
    let (v, e) = gk15(&f, a, b);
    let mut segs = vec![(a, b, v, e)];
    let mut total_err = e;
    while total_err > abs_tol && segs.len() < max_intervals {
        let (idx, _) = segs.iter().enumerate().fold((0, -1.0), |acc, (i, s)| if s.3 > acc.1 { (i, s.3) } else { acc });
        let (lo, hi, _, _) = segs.swap_remove(idx);
        let m = 0.5 * (lo + hi);
        if m == lo || m == hi {
            break;
        }
        let (v1, e1) = gk15(&f, lo, m);
        let (v2, e2) = gk15(&f, m, hi);
        segs.push((lo, m, v1, e1));
        segs.push((m, hi, v2, e2));
        total_err = segs.iter().map(|s| s.3).sum();
    }
    // sum in interval order so the result does not depend on refinement history
    segs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let value = segs.iter().fold(Complex64::new(0.0, 0.0), |acc, s| acc + s.2);
    Adaptive { value, error: total_err, converged: total_err <= abs_tol }
}

/// Sum with a fixed pairwise tree, independent of thread scheduling.
pub fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n if n <= 8 => v.iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b),
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Real counterpart of [`pairwise_sum`].
pub fn pairwise_sum_real(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n if n <= 8 => v.iter().sum(),
        n => pairwise_sum_real(&v[..n / 2]) + pairwise_sum_real(&v[n / 2..]),
    }
}
