//! The diagonal metric g = f1⁻²dx¹⊗dx¹ + f2⁻²dx²⊗dx² + k3⁻²dx³⊗dx³ on ℝ³,
//! its orthonormal frame E1 = f1∂₁, E2 = f2∂₂, E3 = k3∂₃, the frame
//! connection table, and coordinate Christoffel symbols.
//!
//! Christoffels are computed numerically from warp jets; the frame table is
//! hard-coded. The two routes are independent, and the tests check one
//! against the other so a transcription error in either is caught.

use crate::defaults::ZERO_WARP;
use crate::expr::{parse_expr, EvalError, Point, Scalar, ScalarExpr, VarSet, WarpJet};

#[derive(Clone, Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("k3 must be a nonzero real constant")]
    ZeroK3,
    #[error("warp f{which} vanishes at x3 = {x3} (|value| = {value:e} < 1e-14)")]
    ZeroWarp { which: u8, x3: f64, value: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The two warps and the frame constant. Warps are univariate expressions
/// in x³ (spelled `t` or `x3`), smooth and nowhere zero on any box they are
/// evaluated over; the nowhere-zero requirement is enforced lazily at each
/// evaluation.
#[derive(Clone, Debug)]
pub struct MetricSpec {
    f1: ScalarExpr,
    f2: ScalarExpr,
    k3: f64,
}

/// Diagonal metric components at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricMatrix {
    pub g11: f64,
    pub g22: f64,
    pub g33: f64,
}

impl MetricMatrix {
    pub fn diag(&self) -> [f64; 3] {
        [self.g11, self.g22, self.g33]
    }
}

/// Frame connection data at one x³: a1 = k3·f1′/f1, a2 = k3·f2′/f2, and the
/// fixed table ∇_{E1}E1 = a1E3, ∇_{E2}E2 = a2E3, ∇_{E1}E3 = −a1E1,
/// ∇_{E2}E3 = −a2E2, all other ∇_{Ei}Ej = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameConnection {
    pub a1: f64,
    pub a2: f64,
}

impl FrameConnection {
    /// Frame components of ∇_{Ei}Ej (indices 0,1,2 for E1,E2,E3).
    pub fn nabla(&self, i: usize, j: usize) -> [f64; 3] {
        match (i, j) {
            (0, 0) => [0.0, 0.0, self.a1],
            (1, 1) => [0.0, 0.0, self.a2],
            (0, 2) => [-self.a1, 0.0, 0.0],
            (1, 2) => [0.0, -self.a2, 0.0],
            _ => [0.0, 0.0, 0.0],
        }
    }
}

/// Coordinate Christoffel symbols indexed `[i][j][k]` for Γ^i_{jk};
/// symmetric in the last two indices.
pub type ChristoffelSymbols = [[[f64; 3]; 3]; 3];

impl MetricSpec {
    pub fn new(f1: ScalarExpr, f2: ScalarExpr, k3: f64) -> Result<Self, GeometryError> {
        assert_eq!(f1.vars().len(), 1, "warp f1 must be univariate");
        assert_eq!(f2.vars().len(), 1, "warp f2 must be univariate");
        if k3 == 0.0 || !k3.is_finite() {
            return Err(GeometryError::ZeroK3);
        }
        Ok(MetricSpec { f1, f2, k3 })
    }

    /// Parse both warps against the univariate variable set.
    pub fn parse(f1: &str, f2: &str, k3: f64) -> Result<Self, MetricParseError> {
        let vars = VarSet::warp();
        let f1 = parse_expr(f1, &vars).map_err(|e| MetricParseError::Warp {
            which: 1,
            source: e,
        })?;
        let f2 = parse_expr(f2, &vars).map_err(|e| MetricParseError::Warp {
            which: 2,
            source: e,
        })?;
        MetricSpec::new(f1, f2, k3).map_err(MetricParseError::Geometry)
    }

    /// f1 = f2 = 1, k3 = 1.
    pub fn euclidean() -> Self {
        MetricSpec::parse("1", "1", 1.0).expect("constant warps")
    }

    pub fn f1(&self) -> &ScalarExpr {
        &self.f1
    }

    pub fn f2(&self) -> &ScalarExpr {
        &self.f2
    }

    pub fn k3(&self) -> f64 {
        self.k3
    }

    /// Both warps with first and second derivatives at x3, checked against
    /// the zero-warp threshold.
    pub fn warp_jets(&self, x3: f64) -> Result<(WarpJet, WarpJet), GeometryError> {
        let j1 = self.f1.jet2(x3)?;
        if j1.value.abs() < ZERO_WARP {
            return Err(GeometryError::ZeroWarp { which: 1, x3, value: j1.value.abs() });
        }
        let j2 = self.f2.jet2(x3)?;
        if j2.value.abs() < ZERO_WARP {
            return Err(GeometryError::ZeroWarp { which: 2, x3, value: j2.value.abs() });
        }
        Ok((j1, j2))
    }

    /// Diagonal metric components (f1⁻², f2⁻², k3⁻²) at p.
    pub fn metric_at(&self, p: Point) -> Result<MetricMatrix, GeometryError> {
        let (j1, j2) = self.warp_jets(p.x3)?;
        Ok(MetricMatrix {
            g11: 1.0 / (j1.value * j1.value),
            g22: 1.0 / (j2.value * j2.value),
            g33: 1.0 / (self.k3 * self.k3),
        })
    }

    /// Coordinate components of the frame: (f1(x3), f2(x3), k3).
    pub fn frame_scalars(&self, x3: f64) -> Result<(f64, f64, f64), GeometryError> {
        let (j1, j2) = self.warp_jets(x3)?;
        Ok((j1.value, j2.value, self.k3))
    }

    /// a1 = k3·f1′/f1 and a2 = k3·f2′/f2 at x3, derivatives from exact jets.
    pub fn connection_coeffs(&self, x3: f64) -> Result<FrameConnection, GeometryError> {
        let (j1, j2) = self.warp_jets(x3)?;
        Ok(FrameConnection {
            a1: self.k3 * j1.d1 / j1.value,
            a2: self.k3 * j2.d1 / j2.value,
        })
    }

    /// Γ^i_{jk} = ½ g^{il}(∂_j g_{lk} + ∂_k g_{lj} − ∂_l g_{jk}), with the
    /// metric derivative channel taken from jets of 1/f². The metric is
    /// diagonal and depends on x³ only, so just ∂₃ contributes.
    pub fn christoffel_coord(&self, p: Point) -> Result<ChristoffelSymbols, GeometryError> {
        let (j1, j2) = self.warp_jets(p.x3)?;
        let one = WarpJet::constant(1.0);
        let g11 = one.div(j1.mul(j1));
        let g22 = one.div(j2.mul(j2));
        let g = [g11.value, g22.value, 1.0 / (self.k3 * self.k3)];
        // dg[a][i] = ∂_a g_{ii}
        let mut dg = [[0.0; 3]; 3];
        dg[2] = [g11.d1, g22.d1, 0.0];
        let mut gamma = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let t1 = if i == k { dg[j][i] } else { 0.0 };
                    let t2 = if i == j { dg[k][i] } else { 0.0 };
                    let t3 = if j == k { dg[i][j] } else { 0.0 };
                    gamma[i][j][k] = 0.5 / g[i] * (t1 + t2 - t3);
                }
            }
        }
        Ok(gamma)
    }
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum MetricParseError {
    #[error("warp f{which}: {source}")]
    Warp {
        which: u8,
        source: crate::expr::ParseError,
    },
    #[error(transparent)]
    Geometry(GeometryError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exp_pair(k3: f64) -> MetricSpec {
        MetricSpec::parse("exp(t)", "exp(2*t)", k3).unwrap()
    }

    #[test]
    fn euclidean_metric_is_identity() {
        let m = MetricSpec::euclidean();
        let g = m.metric_at(Point::new(0.3, -0.7, 0.9)).unwrap();
        assert_eq!(g.diag(), [1.0, 1.0, 1.0]);
    }

    #[test]
    fn metric_values_at_origin() {
        let m = exp_pair(2.0);
        let g = m.metric_at(Point::ORIGIN).unwrap();
        assert_eq!(g.diag(), [1.0, 1.0, 0.25]);
    }

    #[test]
    fn zero_warp_is_reported_with_location() {
        let m = MetricSpec::parse("t", "1", 1.0).unwrap();
        let err = m.metric_at(Point::new(0.0, 0.0, 0.0)).unwrap_err();
        match err {
            GeometryError::ZeroWarp { which: 1, x3, .. } => assert_eq!(x3, 0.0),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn k3_must_be_nonzero() {
        assert!(matches!(
            MetricSpec::parse("1", "1", 0.0),
            Err(MetricParseError::Geometry(GeometryError::ZeroK3))
        ));
    }

    #[test]
    fn frame_scalar_values() {
        let m = exp_pair(1.0);
        assert_eq!(m.frame_scalars(0.0).unwrap(), (1.0, 1.0, 1.0));
        let (s1, s2, s3) = m.frame_scalars(1.0).unwrap();
        assert!((s1 - std::f64::consts::E).abs() < 1e-15);
        assert!((s2 - std::f64::consts::E.powi(2)).abs() < 1e-12);
        assert_eq!(s3, 1.0);
    }

    #[test]
    fn frame_is_orthonormal_at_random_points() {
        let m = exp_pair(2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x3 = rng.random_range(-1.0..1.0);
            let p = Point::new(0.0, 0.0, x3);
            let g = m.metric_at(p).unwrap().diag();
            let s = m.frame_scalars(x3).unwrap();
            let s = [s.0, s.1, s.2];
            for i in 0..3 {
                for j in 0..3 {
                    // E_i has one coordinate component, s_i on axis i.
                    let ip: f64 = if i == j { g[i] * s[i] * s[i] } else { 0.0 };
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - expected).abs() <= 1e-12, "i={i} j={j} ip={ip}");
                }
            }
        }
    }

    #[test]
    fn connection_coefficient_values() {
        let m = exp_pair(2.0);
        let c = m.connection_coeffs(0.0).unwrap();
        assert!((c.a1 - 2.0).abs() < 1e-15);
        assert!((c.a2 - 4.0).abs() < 1e-15);

        let flat = MetricSpec::parse("3", "5", 1.0).unwrap();
        let c = flat.connection_coeffs(0.4).unwrap();
        assert_eq!((c.a1, c.a2), (0.0, 0.0));

        let sech = MetricSpec::parse("1/cosh(t)", "1", 1.0).unwrap();
        let c = sech.connection_coeffs(0.0).unwrap();
        assert_eq!(c.a1, 0.0);
    }

    #[test]
    fn euclidean_christoffels_vanish() {
        let m = MetricSpec::euclidean();
        let gamma = m.christoffel_coord(Point::new(0.1, 0.2, 0.3)).unwrap();
        for plane in gamma {
            for row in plane {
                for v in row {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn christoffels_symmetric_in_lower_indices() {
        let m = exp_pair(0.5);
        let gamma = m.christoffel_coord(Point::new(0.0, 0.0, 0.37)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(gamma[i][j][k].to_bits(), gamma[i][k][j].to_bits());
                }
            }
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn metric_compatibility_by_finite_differences() {
        // ∂_k g_ij − Γ^l_{ki} g_lj − Γ^l_{kj} g_il = 0 for a diagonal metric;
        // the derivative side is measured by central differences of metric_at.
        let m = exp_pair(1.5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-5;
        for _ in 0..20 {
            let x3: f64 = rng.random_range(-1.0..1.0);
            let p = Point::new(0.0, 0.0, x3);
            let gamma = m.christoffel_coord(p).unwrap();
            let g = m.metric_at(p).unwrap().diag();
            let gp = m.metric_at(p.with_coord(2, x3 + h)).unwrap().diag();
            let gm = m.metric_at(p.with_coord(2, x3 - h)).unwrap().diag();
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let dg = if k == 2 && i == j { (gp[i] - gm[i]) / (2.0 * h) } else { 0.0 };
                        let mut corr = 0.0;
                        for l in 0..3 {
                            if l == j {
                                corr += gamma[l][k][i] * g[l];
                            }
                            if l == i {
                                corr += gamma[l][k][j] * g[l];
                            }
                        }
                        assert!(
                            (dg - corr).abs() <= 1e-7,
                            "k={k} i={i} j={j}: {dg} vs {corr}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn frame_table_matches_christoffel_route() {
        // (∇_{Ei}Ej)^c = E_i^a ∂_a E_j^c + Γ^c_{ab} E_i^a E_j^b, converted to
        // frame components, must reproduce the hard-coded table for every
        // (i, j) pair on several metrics.
        let metrics: Vec<(MetricSpec, f64, f64)> = vec![
            (exp_pair(2.0), -1.0, 1.0),
            (MetricSpec::parse("1/cosh(t)", "1/cosh(t)", 1.0).unwrap(), -1.0, 1.0),
            (MetricSpec::parse("t", "t^2", -1.0).unwrap(), 0.5, 1.5),
            (MetricSpec::parse("2", "3", 0.5).unwrap(), -1.0, 1.0),
            (MetricSpec::parse("t", "1/cosh(t)", 1.0).unwrap(), 0.5, 1.5),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let h = 1e-6;
        for (m, lo, hi) in &metrics {
            for _ in 0..20 {
                let x3: f64 = rng.random_range(*lo..*hi);
                let p = Point::new(0.0, 0.0, x3);
                let gamma = m.christoffel_coord(p).unwrap();
                let conn = m.connection_coeffs(x3).unwrap();
                let s = m.frame_scalars(x3).unwrap();
                let s = [s.0, s.1, s.2];
                let sp = m.frame_scalars(x3 + h).unwrap();
                let sm = m.frame_scalars(x3 - h).unwrap();
                let ds = [(sp.0 - sm.0) / (2.0 * h), (sp.1 - sm.1) / (2.0 * h), 0.0];
                for i in 0..3 {
                    for j in 0..3 {
                        let expected = conn.nabla(i, j);
                        for c in 0..3 {
                            // E_i^a ∂_a E_j^c: E_j^c = s_j δ_j^c depends on x³
                            // only, so the term is s_i δ_i^2 · s_j′ δ_j^c.
                            let transport = if i == 2 && j == c { s[2] * ds[j] } else { 0.0 };
                            let curvature = gamma[c][i][j] * s[i] * s[j];
                            let frame_comp = (transport + curvature) / s[c];
                            assert!(
                                (frame_comp - expected[c]).abs() <= 1e-9 * (1.0 + expected[c].abs()),
                                "i={i} j={j} c={c}: {frame_comp} vs {}",
                                expected[c]
                            );
                        }
                    }
                }
            }
        }
    }
}
