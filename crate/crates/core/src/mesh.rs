//! Uniform 1D grid, cell-average storage with ghost layers, transmissive
//! boundaries, the CFL time-step rule and L1 error norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Location, Result};
use crate::gas_dynamics::{ConservedState, GasModel, PrimitiveState};

/// Ghost layers per side. The predictor stencil reaches one cell beyond
/// the pair adjacent to an interface.
pub const GHOST_LAYERS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
}

impl Mesh {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::Config("mesh needs at least one cell".into()));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Config(format!(
                "invalid domain [{x_min}, {x_max}]"
            )));
        }
        Ok(Mesh {
            x_min,
            x_max,
            n_cells,
        })
    }

    /// `n_cells` cells on `[0, 1]`.
    pub fn unit(n_cells: usize) -> Result<Self> {
        Mesh::new(0.0, 1.0, n_cells)
    }

    #[inline]
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    #[inline]
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    #[inline]
    pub fn n_ghost(&self) -> usize {
        GHOST_LAYERS
    }

    /// Stored cells including ghosts.
    #[inline]
    pub fn n_stored(&self) -> usize {
        self.n_cells + 2 * GHOST_LAYERS
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    /// Center of interior cell `i`.
    #[inline]
    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    /// Center of stored cell `s`; ghosts have centers outside the domain.
    #[inline]
    pub fn stored_center(&self, s: usize) -> f64 {
        self.x_min + (s as f64 - GHOST_LAYERS as f64 + 0.5) * self.dx()
    }

    /// Position of interface `k`, `0 <= k <= n_cells`; interface `k`
    /// separates interior cells `k - 1` and `k`.
    #[inline]
    pub fn interface(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx()
    }

    pub fn cell_centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.cell_center(i)).collect()
    }
}

/// Cell averages on a mesh, ghosts included, at time `time` after `step`
/// steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    mesh: Mesh,
    cells: Vec<ConservedState>,
    pub time: f64,
    pub step: u64,
}

impl Field {
    /// Builds a field from interior values; ghosts are filled transmissively.
    pub fn from_interior(mesh: Mesh, interior: &[ConservedState]) -> Result<Self> {
        if interior.len() != mesh.n_cells() {
            return Err(Error::LengthMismatch {
                field: mesh.n_cells(),
                reference: interior.len(),
            });
        }
        let mut cells = vec![ConservedState::ZERO; mesh.n_stored()];
        cells[GHOST_LAYERS..GHOST_LAYERS + mesh.n_cells()].copy_from_slice(interior);
        let mut field = Field {
            mesh,
            cells,
            time: 0.0,
            step: 0,
        };
        field.apply_transmissive_bc();
        Ok(field)
    }

    pub fn uniform(mesh: Mesh, state: ConservedState) -> Self {
        Field {
            mesh,
            cells: vec![state; mesh.n_stored()],
            time: 0.0,
            step: 0,
        }
    }

    #[inline]
    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// All stored cells, ghosts included.
    #[inline]
    pub fn stored(&self) -> &[ConservedState] {
        &self.cells
    }

    #[cfg(test)]
    #[inline]
    pub(crate) fn stored_mut(&mut self) -> &mut [ConservedState] {
        &mut self.cells
    }

    #[inline]
    pub fn interior(&self) -> &[ConservedState] {
        &self.cells[GHOST_LAYERS..GHOST_LAYERS + self.mesh.n_cells()]
    }

    #[inline]
    pub fn interior_mut(&mut self) -> &mut [ConservedState] {
        let n = self.mesh.n_cells();
        &mut self.cells[GHOST_LAYERS..GHOST_LAYERS + n]
    }

    /// Zero-order extrapolation: each ghost copies the nearest interior cell.
    pub fn apply_transmissive_bc(&mut self) {
        let n = self.mesh.n_cells();
        let first = self.cells[GHOST_LAYERS];
        let last = self.cells[GHOST_LAYERS + n - 1];
        for g in 0..GHOST_LAYERS {
            self.cells[g] = first;
            self.cells[GHOST_LAYERS + n + g] = last;
        }
    }

    /// Interior primitive states; fails on the first non-physical cell.
    pub fn primitives(&self, gas: &GasModel) -> Result<Vec<PrimitiveState>> {
        self.interior()
            .iter()
            .enumerate()
            .map(|(i, w)| gas.to_primitive_at(w, Location::Cell(i)))
            .collect()
    }

    /// Domain totals `sum_i W_i dx` over interior cells.
    pub fn totals(&self) -> ConservedState {
        let dx = self.mesh.dx();
        let mut sum = ConservedState::ZERO;
        for w in self.interior() {
            sum += *w;
        }
        sum * dx
    }
}

/// Sets up a Riemann problem: cells with center left of `x_split` hold
/// `left`, the rest hold `right`.
pub fn init_riemann(
    mesh: Mesh,
    left: PrimitiveState,
    right: PrimitiveState,
    x_split: f64,
    gas: &GasModel,
) -> Result<Field> {
    left.validate()?;
    right.validate()?;
    if !(x_split >= mesh.x_min() && x_split <= mesh.x_max()) {
        return Err(Error::Config(format!(
            "split position {x_split} outside [{}, {}]",
            mesh.x_min(),
            mesh.x_max()
        )));
    }
    let wl = gas.to_conserved(&left);
    let wr = gas.to_conserved(&right);
    let interior: Vec<_> = (0..mesh.n_cells())
        .map(|i| if mesh.cell_center(i) < x_split { wl } else { wr })
        .collect();
    Field::from_interior(mesh, &interior)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CflMode {
    /// `dt = Cr dx / max_i (|u_i| + c_i)`.
    Base,
    /// `dt = Cr dx / max_k (alpha_k max(Lambda_left, Lambda_right))` with the
    /// control parameter lagged by one step.
    AlphaWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CflRule {
    pub courant: f64,
    pub mode: CflMode,
}

impl CflRule {
    pub fn new(courant: f64, mode: CflMode) -> Result<Self> {
        if !(courant > 0.0) || !courant.is_finite() {
            return Err(Error::Config(format!(
                "Courant number must be positive, got {courant}"
            )));
        }
        Ok(CflRule { courant, mode })
    }

    pub fn base(courant: f64) -> Result<Self> {
        CflRule::new(courant, CflMode::Base)
    }
}

/// Spectral radius per stored cell.
pub(crate) fn spectral_radii(field: &Field, gas: &GasModel) -> Result<Vec<f64>> {
    field
        .stored()
        .iter()
        .enumerate()
        .map(|(s, w)| {
            let q = gas.to_primitive_at(w, Location::Cell(s.saturating_sub(GHOST_LAYERS)))?;
            Ok(gas.spectral_radius(&q))
        })
        .collect()
}

/// Time step from the CFL rule. `alpha_prev` holds one value per interface
/// (`n_cells + 1`); `None` in alpha-weighted mode means 1/2 everywhere.
pub fn compute_dt(
    field: &Field,
    rule: &CflRule,
    alpha_prev: Option<&[f64]>,
    gas: &GasModel,
) -> Result<f64> {
    let radii = spectral_radii(field, gas)?;
    dt_from_radii(field.mesh(), &radii, rule, alpha_prev)
}

pub(crate) fn dt_from_radii(
    mesh: &Mesh,
    radii: &[f64],
    rule: &CflRule,
    alpha_prev: Option<&[f64]>,
) -> Result<f64> {
    let n = mesh.n_cells();
    let g = GHOST_LAYERS;
    let denom = match rule.mode {
        CflMode::Base => radii[g..g + n].iter().fold(0.0f64, |m, &l| m.max(l)),
        CflMode::AlphaWeighted => {
            if let Some(a) = alpha_prev {
                if a.len() != n + 1 {
                    return Err(Error::LengthMismatch {
                        field: n + 1,
                        reference: a.len(),
                    });
                }
            }
            (0..=n).fold(0.0f64, |m, k| {
                let alpha = alpha_prev.map_or(0.5, |a| a[k]);
                m.max(alpha * radii[g + k - 1].max(radii[g + k]))
            })
        }
    };
    if !(denom > 0.0) {
        return Err(Error::NoWaveSpeed);
    }
    Ok(rule.courant * mesh.dx() / denom)
}

/// Shortens `dt` so that `time + dt` never passes `t_end`.
#[inline]
pub fn clip_dt(time: f64, dt: f64, t_end: f64) -> f64 {
    if time + dt >= t_end {
        t_end - time
    } else {
        dt
    }
}

/// Per-variable L1 norms `dx * sum_i |q_i - q_ref(x_i)|`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct L1Error {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    pub ener: f64,
}

/// L1 error of the interior cells against reference point values sampled at
/// cell centers. Ghost cells never contribute.
pub fn l1_error(field: &Field, reference: &[PrimitiveState], gas: &GasModel) -> Result<L1Error> {
    let n = field.mesh().n_cells();
    if reference.len() != n {
        return Err(Error::LengthMismatch {
            field: n,
            reference: reference.len(),
        });
    }
    let dx = field.mesh().dx();
    let mut err = L1Error::default();
    for (w, r) in field.interior().iter().zip(reference) {
        let u = w.mom / w.rho;
        let p = gas.pressure(w);
        let e_ref = gas.to_conserved(r).ener;
        err.rho += (w.rho - r.rho).abs();
        err.u += (u - r.u).abs();
        err.p += (p - r.p).abs();
        err.ener += (w.ener - e_ref).abs();
    }
    err.rho *= dx;
    err.u *= dx;
    err.p *= dx;
    err.ener *= dx;
    Ok(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> GasModel {
        GasModel::default()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn geometry() {
        let m = Mesh::unit(200).unwrap();
        assert_eq!(m.dx(), 0.005);
        assert!(close(m.cell_center(0), 0.0025, 1e-15));
        assert!(close(m.interface(1), 0.005, 1e-15));
        assert_eq!(m.interface(200), 1.0);
        assert!(close(m.stored_center(0), -0.0075, 1e-15));
        assert!(Mesh::new(1.0, 0.0, 10).is_err());
        assert!(Mesh::unit(0).is_err());
    }

    #[test]
    fn sod_initial_data() {
        let g = gas();
        let f = init_riemann(
            Mesh::unit(200).unwrap(),
            PrimitiveState::new(1.0, 0.75, 1.0),
            PrimitiveState::new(0.125, 0.0, 0.1),
            0.5,
            &g,
        )
        .unwrap();
        let w = f.interior();
        for c in &w[..100] {
            assert_eq!((c.rho, c.mom), (1.0, 0.75));
            assert!(close(c.ener, 2.78125, 1e-15));
        }
        for c in &w[100..] {
            assert_eq!(c.rho, 0.125);
            assert_eq!(c.mom, 0.0);
            assert!(close(c.ener, 0.25, 1e-15));
        }
    }

    #[test]
    fn degenerate_splits() {
        let g = gas();
        let m = Mesh::unit(10).unwrap();
        let a = PrimitiveState::new(1.0, 0.2, 1.0);
        let b = PrimitiveState::new(0.5, 0.0, 0.3);
        let f = init_riemann(m, a, a, 0.5, &g).unwrap();
        assert!(f.interior().iter().all(|w| *w == g.to_conserved(&a)));
        let f = init_riemann(m, a, b, 0.0, &g).unwrap();
        assert!(f.interior().iter().all(|w| *w == g.to_conserved(&b)));
        assert!(init_riemann(m, a, b, 1.5, &g).is_err());
        assert!(init_riemann(m, PrimitiveState::new(1.0, 0.0, -1.0), b, 0.5, &g).is_err());
    }

    #[test]
    fn transmissive_ghosts_copy_boundary_cells() {
        let m = Mesh::unit(5).unwrap();
        let interior: Vec<_> = (1..=5)
            .map(|i| ConservedState::new(i as f64, 0.0, 10.0 * i as f64))
            .collect();
        let mut f = Field::from_interior(m, &interior).unwrap();
        f.stored_mut()[0] = ConservedState::ZERO;
        f.apply_transmissive_bc();
        let s = f.stored();
        assert_eq!(s[0], interior[0]);
        assert_eq!(s[1], interior[0]);
        assert_eq!(s[7], interior[4]);
        assert_eq!(s[8], interior[4]);
    }

    #[test]
    fn dt_examples() {
        let g = gas();
        let m = Mesh::unit(100).unwrap();
        let still = Field::uniform(m, g.to_conserved(&PrimitiveState::new(1.4, 0.0, 1.0)));
        let base = CflRule::base(0.8).unwrap();
        assert!(close(compute_dt(&still, &base, None, &g).unwrap(), 0.008, 1e-14));
        let moving = Field::uniform(m, g.to_conserved(&PrimitiveState::new(1.4, 3.0, 1.0)));
        assert!(close(compute_dt(&moving, &base, None, &g).unwrap(), 0.002, 1e-14));
        let weighted = CflRule::new(0.8, CflMode::AlphaWeighted).unwrap();
        assert!(close(compute_dt(&still, &weighted, None, &g).unwrap(), 0.016, 1e-14));
        let ones = vec![1.0; 101];
        assert!(close(compute_dt(&still, &weighted, Some(&ones), &g).unwrap(), 0.008, 1e-14));
        assert!(compute_dt(&still, &weighted, Some(&ones[..50]), &g).is_err());
    }

    #[test]
    fn dt_scales_inversely_with_wave_speed() {
        let g = gas();
        let m = Mesh::unit(50).unwrap();
        let rule = CflRule::base(0.8).unwrap();
        let q = PrimitiveState::new(1.0, 0.3, 1.0);
        let k: f64 = 3.0;
        // scaling u by k and p by k^2 scales |u| + c by k
        let fast = PrimitiveState::new(1.0, 0.3 * k, k * k);
        let dt1 = compute_dt(&Field::uniform(m, g.to_conserved(&q)), &rule, None, &g).unwrap();
        let dt2 = compute_dt(&Field::uniform(m, g.to_conserved(&fast)), &rule, None, &g).unwrap();
        assert!(close(dt1 / dt2, k, 1e-14));
    }

    #[test]
    fn zero_wave_speed_is_an_error() {
        let m = Mesh::unit(4).unwrap();
        let radii = vec![0.0; m.n_stored()];
        let err = dt_from_radii(&m, &radii, &CflRule::base(0.8).unwrap(), None).unwrap_err();
        assert!(matches!(err, Error::NoWaveSpeed));
    }

    #[test]
    fn clip_lands_on_end_time() {
        assert_eq!(0.15 + clip_dt(0.15, 0.1, 0.2), 0.2);
        assert_eq!(clip_dt(0.0, 0.01, 0.2), 0.01);
    }

    #[test]
    fn l1_examples() {
        let g = gas();
        let m = Mesh::unit(200).unwrap();
        let q = PrimitiveState::new(1.0, 0.0, 1.0);
        let f = Field::uniform(m, g.to_conserved(&q));
        let mut reference = vec![q; 200];
        assert_eq!(l1_error(&f, &reference, &g).unwrap().rho, 0.0);
        reference[17].rho = 2.0;
        assert!(close(l1_error(&f, &reference, &g).unwrap().rho, 0.005, 1e-15));
        assert!(l1_error(&f, &reference[..199], &g).is_err());
    }

    #[test]
    fn ghosts_do_not_enter_norms_or_totals() {
        let g = gas();
        let m = Mesh::unit(10).unwrap();
        let q = PrimitiveState::new(1.0, 0.0, 1.0);
        let mut f = Field::uniform(m, g.to_conserved(&q));
        f.stored_mut()[0] = ConservedState::new(100.0, 0.0, 1000.0);
        assert!(close(f.totals().rho, 1.0, 1e-15));
        assert_eq!(l1_error(&f, &[q; 10], &g).unwrap().rho, 0.0);
    }
}
