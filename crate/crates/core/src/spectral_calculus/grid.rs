//! Radial quadrature grids carrying the r^{n−1} measure, and their products
//! with grids on Y.

use crate::cross_section::YGrid;
use crate::error::{ConeError, Result};
use crate::quadrature::GaussLegendre;

const PANEL_ORDER: usize = 16;

/// Composite Gauss–Legendre rule on (0, r_max] with weights w_i ≈ dr·r_i^{n−1}.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub r_max: f64,
    /// Cone dimension n of the measure r^{n−1}dr.
    pub n: usize,
    order: usize,
    /// Panels per octave when the breaks are 2^{k/m}; scaling by 2^j then maps
    /// nodes onto nodes.
    per_octave: Option<usize>,
}

impl RadialGrid {
    /// Rule over consecutive breakpoints with `order` nodes per panel.
    pub fn from_breaks(n: usize, breaks: &[f64], order: usize) -> Result<Self> {
        if breaks.len() < 2 || order == 0 {
            return Err(ConeError::Domain("a radial grid needs at least one panel".into()));
        }
        if breaks[0] < 0.0 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ConeError::Domain("radial breakpoints must be nonnegative and strictly increasing".into()));
        }
        let rule = GaussLegendre::cached(order);
        let mut nodes = Vec::with_capacity(order * (breaks.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for pair in breaks.windows(2) {
            rule.push_mapped(pair[0], pair[1], &mut nodes, &mut weights);
        }
        for (w, r) in weights.iter_mut().zip(&nodes) {
            *w *= r.powi(n as i32 - 1);
        }
        Ok(RadialGrid { nodes, weights, r_max: *breaks.last().unwrap(), n, order, per_octave: None })
    }

    /// `nodes` points (a multiple of 16) on (0, r_max]: nine panels halving
    /// towards the tip, then equal panels.
    pub fn graded(n: usize, nodes: usize, r_max: f64) -> Result<Self> {
        let panels = nodes / PANEL_ORDER;
        if !nodes.is_multiple_of(PANEL_ORDER) || panels < 10 || !(r_max > 0.0) {
            return Err(ConeError::Domain(format!("graded grid needs a multiple of 16 nodes (>= 160), got {nodes}")));
        }
        let h0 = r_max / (panels - 8) as f64;
        let mut breaks = vec![0.0];
        breaks.extend((0..=8).rev().map(|k| h0 * 0.5f64.powi(k)));
        breaks.extend((2..=panels - 8).map(|k| h0 * k as f64));
        *breaks.last_mut().unwrap() = r_max;
        Self::from_breaks(n, &breaks, PANEL_ORDER)
    }

    /// The default 4096-node grid on (0, 40].
    pub fn standard(n: usize) -> Self {
        Self::graded(n, 4096, 40.0).expect("standard grid parameters are valid")
    }

    /// Breaks 2^{k/m} for k = m·lo ..= m·hi. The interval below 2^{lo} is
    /// left out, so choose `lo` small enough that it carries no mass.
    pub fn self_similar(n: usize, lo: i32, hi: i32, per_octave: usize) -> Result<Self> {
        if hi <= lo || per_octave == 0 {
            return Err(ConeError::Domain("self-similar grid needs hi > lo and per_octave >= 1".into()));
        }
        let m = per_octave as i32;
        let breaks: Vec<f64> = (m * lo..=m * hi).map(|k| (k as f64 / m as f64).exp2()).collect();
        let mut g = Self::from_breaks(n, &breaks, PANEL_ORDER)?;
        g.per_octave = Some(per_octave);
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the node 2^j·r_i on a self-similar grid, if it lies on the grid.
    pub fn scaled_index(&self, i: usize, octaves: i32) -> Option<usize> {
        let m = self.per_octave? as i64;
        let k = i as i64 + octaves as i64 * m * self.order as i64;
        (0..self.len() as i64).contains(&k).then_some(k as usize)
    }

    /// Σ w_i f(r_i).
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(r, w)| w * f(*r)).sum()
    }
}

/// Radial grid times a grid on Y: nodes (r_i, y_l) with weight w_i·ω_l.
#[derive(Debug, Clone)]
pub struct ConeGrid {
    pub radial: RadialGrid,
    pub y: YGrid,
}

impl ConeGrid {
    pub fn new(radial: RadialGrid, y: YGrid) -> Self {
        ConeGrid { radial, y }
    }

    pub fn len(&self) -> usize {
        self.radial.len() * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
