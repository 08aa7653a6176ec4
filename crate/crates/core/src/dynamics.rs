//! Dynamical diagnostics: integrating the flow of a field and the geodesic
//! equation with a fixed-step RK4 scheme, measuring how well the flow
//! preserves the metric (the integral counterpart of the Killing equation),
//! tracking the conserved quantity g(V, γ̇) along geodesics, and Lie
//! brackets of fields.

use crate::expr::Point;
use crate::geometry::MetricSpec;
use crate::killing::{FrameField, KillingError, PointwiseFrameField};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("integration left the expression domain at t = {t_last}: {source}")]
    DomainExit {
        t_last: f64,
        #[source]
        source: Box<KillingError>,
    },
    #[error(transparent)]
    Killing(#[from] KillingError),
}

/// A sampled integral curve: node times, positions, and coordinate
/// velocities (the flow field for flows, γ̇ for geodesics).
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Point>,
    pub velocities: Vec<[f64; 3]>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn end_point(&self) -> Point {
        *self.points.last().expect("trajectory has at least one node")
    }
}

/// Series of a scalar quantity along a trajectory with its drift from the
/// initial value.
#[derive(Clone, Debug)]
pub struct ConservedSeries {
    pub values: Vec<f64>,
    pub drift: f64,
}

fn series_from(values: Vec<f64>) -> ConservedSeries {
    let q0 = values[0];
    let drift = values.iter().fold(0.0f64, |m, q| m.max((q - q0).abs()));
    ConservedSeries { values, drift }
}

/// How far the time-t flow map is from an isometry, probed on random
/// tangent pairs at the start point.
#[derive(Clone, Copy, Debug)]
pub struct IsometryDefectReport {
    pub t_final: f64,
    pub defect: f64,
    pub n_probes: usize,
}

/// Coordinate components of the field: (V¹f1, V²f2, V³k3).
pub fn coordinate_velocity(
    m: &MetricSpec,
    field: &FrameField,
    p: Point,
) -> Result<[f64; 3], KillingError> {
    let (s1, s2, s3) = m.frame_scalars(p.x3)?;
    let v = field.values(p)?;
    Ok([v[0] * s1, v[1] * s2, v[2] * s3])
}

fn saxpy<const N: usize>(y: &[f64; N], k: &[f64; N], h: f64) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

fn rk4_step<const N: usize, F>(f: &mut F, y: &[f64; N], h: f64) -> Result<[f64; N], KillingError>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N], KillingError>,
{
    let k1 = f(y)?;
    let k2 = f(&saxpy(y, &k1, 0.5 * h))?;
    let k3 = f(&saxpy(y, &k2, 0.5 * h))?;
    let k4 = f(&saxpy(y, &k3, h))?;
    Ok(std::array::from_fn(|i| {
        y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

type IntegrationOutput<const N: usize> = (Vec<f64>, Vec<[f64; N]>, Vec<[f64; N]>);

fn integrate<const N: usize, F>(
    y0: [f64; N],
    t_final: f64,
    steps: usize,
    mut f: F,
) -> Result<IntegrationOutput<N>, DynamicsError>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N], KillingError>,
{
    assert!(steps >= 1, "need at least one step");
    assert!(t_final.is_finite(), "integration time must be finite");
    let h = t_final / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut derivs = Vec::with_capacity(steps + 1);
    let mut y = y0;
    for i in 0..=steps {
        let t = h * i as f64;
        let exit = |source: KillingError| DynamicsError::DomainExit {
            t_last: if i == 0 { 0.0 } else { h * (i - 1) as f64 },
            source: Box::new(source),
        };
        let dy = f(&y).map_err(exit)?;
        times.push(t);
        states.push(y);
        derivs.push(dy);
        if i < steps {
            y = rk4_step(&mut f, &y, h).map_err(exit)?;
        }
    }
    Ok((times, states, derivs))
}

/// Integrate ẋ = V_coord(x) from `x0` for time `t_final` with `steps` RK4
/// steps, sampling every node.
pub fn integrate_flow(
    m: &MetricSpec,
    field: &FrameField,
    x0: Point,
    t_final: f64,
    steps: usize,
) -> Result<Trajectory, DynamicsError> {
    let rhs = |y: &[f64; 3]| coordinate_velocity(m, field, Point::from_array(*y));
    let (times, states, derivs) = integrate(x0.to_array(), t_final, steps, rhs)?;
    Ok(Trajectory {
        times,
        points: states.into_iter().map(Point::from_array).collect(),
        velocities: derivs,
    })
}

/// Flow the starting point together with the variational (Jacobian) matrix
/// J̇ = DV·J, then compare g(Ju, Jv) at the endpoint against g(u, v) at the
/// start on `probes` random tangent pairs. For a Killing field the flow is
/// an isometry and every probe difference vanishes up to integration error.
pub fn isometry_defect(
    m: &MetricSpec,
    field: &FrameField,
    x0: Point,
    t_final: f64,
    steps: usize,
    probes: usize,
    seed: u64,
) -> Result<IsometryDefectReport, DynamicsError> {
    assert!(probes >= 1, "need at least one probe pair");
    // State layout: x, then J row-major (J[i][c] = ∂x_i/∂x0_c).
    let mut y0 = [0.0f64; 12];
    y0[..3].copy_from_slice(&x0.to_array());
    y0[3] = 1.0;
    y0[7] = 1.0;
    y0[11] = 1.0;
    let rhs = |y: &[f64; 12]| -> Result<[f64; 12], KillingError> {
        let p = Point::new(y[0], y[1], y[2]);
        let (w1, w2) = m.warp_jets(p.x3)?;
        let s = [w1.value, w2.value, m.k3()];
        let ds = [w1.d1, w2.d1, 0.0];
        let mut out = [0.0f64; 12];
        let mut d = [[0.0f64; 3]; 3]; // d[i][c] = ∂_c (V_i s_i)
        for i in 0..3 {
            let j = field.component(i).jet1(p)?;
            out[i] = j.value * s[i];
            for (c, slot) in d[i].iter_mut().enumerate() {
                *slot = j.grad[c] * s[i] + if c == 2 { j.value * ds[i] } else { 0.0 };
            }
        }
        for i in 0..3 {
            for c in 0..3 {
                // (J̇)_{ic} = Σ_a D_{ia} J_{ac}
                out[3 + 3 * i + c] = (0..3).map(|a| d[i][a] * y[3 + 3 * a + c]).sum();
            }
        }
        Ok(out)
    };
    let (_, states, _) = integrate(y0, t_final, steps, rhs)?;
    let yend = states.last().expect("at least one node");
    let p_end = Point::new(yend[0], yend[1], yend[2]);
    let g0 = m.metric_at(x0).map_err(KillingError::from)?.diag();
    let g1 = m.metric_at(p_end).map_err(KillingError::from)?.diag();
    let jac = |i: usize, c: usize| yend[3 + 3 * i + c];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut defect = 0.0f64;
    for _ in 0..probes {
        let u: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        let push = |w: &[f64; 3], i: usize| (0..3).map(|c| jac(i, c) * w[c]).sum::<f64>();
        let mut before = 0.0;
        let mut after = 0.0;
        for i in 0..3 {
            before += g0[i] * u[i] * v[i];
            after += g1[i] * push(&u, i) * push(&v, i);
        }
        defect = defect.max((after - before).abs());
    }
    Ok(IsometryDefectReport { t_final, defect, n_probes: probes })
}

/// Integrate the geodesic equation ẍⁱ = −Γⁱ_{jk} ẋʲ ẋᵏ from (`x0`, `v0`).
pub fn integrate_geodesic(
    m: &MetricSpec,
    x0: Point,
    v0: [f64; 3],
    t_final: f64,
    steps: usize,
) -> Result<Trajectory, DynamicsError> {
    let rhs = |y: &[f64; 6]| -> Result<[f64; 6], KillingError> {
        let p = Point::new(y[0], y[1], y[2]);
        let gamma = m.christoffel_coord(p)?;
        let v = [y[3], y[4], y[5]];
        let mut out = [0.0f64; 6];
        out[..3].copy_from_slice(&v);
        for i in 0..3 {
            let mut acc = 0.0;
            for j in 0..3 {
                for k in 0..3 {
                    acc -= gamma[i][j][k] * v[j] * v[k];
                }
            }
            out[3 + i] = acc;
        }
        Ok(out)
    };
    let mut y0 = [0.0f64; 6];
    y0[..3].copy_from_slice(&x0.to_array());
    y0[3..].copy_from_slice(&v0);
    let (times, states, _) = integrate(y0, t_final, steps, rhs)?;
    let mut points = Vec::with_capacity(states.len());
    let mut velocities = Vec::with_capacity(states.len());
    for s in states {
        points.push(Point::new(s[0], s[1], s[2]));
        velocities.push([s[3], s[4], s[5]]);
    }
    Ok(Trajectory { times, points, velocities })
}

/// The quantity g(V, γ̇) = Σᵢ gᵢᵢ V_coordⁱ γ̇ⁱ along a trajectory. Constant
/// along geodesics exactly when V is Killing.
pub fn conserved_series(
    m: &MetricSpec,
    field: &FrameField,
    traj: &Trajectory,
) -> Result<ConservedSeries, KillingError> {
    assert!(!traj.is_empty(), "trajectory must have at least one node");
    let mut values = Vec::with_capacity(traj.len());
    for (p, vel) in traj.points.iter().zip(&traj.velocities) {
        let g = m.metric_at(*p)?.diag();
        let vc = coordinate_velocity(m, field, *p)?;
        values.push((0..3).map(|i| g[i] * vc[i] * vel[i]).sum());
    }
    Ok(series_from(values))
}

/// The squared speed g(γ̇, γ̇) along a trajectory; constant along geodesics.
pub fn speed_series(m: &MetricSpec, traj: &Trajectory) -> Result<ConservedSeries, KillingError> {
    assert!(!traj.is_empty(), "trajectory must have at least one node");
    let mut values = Vec::with_capacity(traj.len());
    for (p, vel) in traj.points.iter().zip(&traj.velocities) {
        let g = m.metric_at(*p)?.diag();
        values.push((0..3).map(|i| g[i] * vel[i] * vel[i]).sum());
    }
    Ok(series_from(values))
}

/// The Lie bracket [V, W] at p, in coordinate and frame components.
#[derive(Clone, Copy, Debug)]
pub struct BracketValue {
    pub coord: [f64; 3],
    pub frame: [f64; 3],
}

/// [V, W]ⁱ = Vᶜ ∂_c Wⁱ − Wᶜ ∂_c Vⁱ on coordinate components, via exact
/// jets; the frame components divide out (f1, f2, k3).
pub fn lie_bracket(
    m: &MetricSpec,
    v: &FrameField,
    w: &FrameField,
    p: Point,
) -> Result<BracketValue, KillingError> {
    let (w1, w2) = m.warp_jets(p.x3)?;
    let s = [w1.value, w2.value, m.k3()];
    let ds = [w1.d1, w2.d1, 0.0];
    let mut vc = [0.0f64; 3];
    let mut wc = [0.0f64; 3];
    let mut dvc = [[0.0f64; 3]; 3]; // dvc[c][i] = ∂_c (V_i s_i)
    let mut dwc = [[0.0f64; 3]; 3];
    for i in 0..3 {
        let jv = v.component(i).jet1(p)?;
        let jw = w.component(i).jet1(p)?;
        vc[i] = jv.value * s[i];
        wc[i] = jw.value * s[i];
        for c in 0..3 {
            let warp_term = if c == 2 { ds[i] } else { 0.0 };
            dvc[c][i] = jv.grad[c] * s[i] + jv.value * warp_term;
            dwc[c][i] = jw.grad[c] * s[i] + jw.value * warp_term;
        }
    }
    let coord: [f64; 3] = std::array::from_fn(|i| {
        (0..3).map(|c| vc[c] * dwc[c][i] - wc[c] * dvc[c][i]).sum()
    });
    Ok(BracketValue { coord, frame: std::array::from_fn(|i| coord[i] / s[i]) })
}

/// The bracket of two expression-backed fields as a pointwise field, so it
/// can be fed back into the residual machinery (the space of Killing fields
/// is closed under the bracket).
pub struct BracketField<'a> {
    m: &'a MetricSpec,
    v: &'a FrameField,
    w: &'a FrameField,
}

impl<'a> BracketField<'a> {
    pub fn new(m: &'a MetricSpec, v: &'a FrameField, w: &'a FrameField) -> Self {
        BracketField { m, v, w }
    }
}

impl PointwiseFrameField for BracketField<'_> {
    fn frame_components(&self, p: Point) -> Result<[f64; 3], KillingError> {
        Ok(lie_bracket(self.m, self.v, self.w, p)?.frame)
    }
}
