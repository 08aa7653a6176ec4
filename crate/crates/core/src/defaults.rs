//! Every numeric default used by the library and the CLI, in one table.
//!
//! | constant            | value            | used by                                        |
//! |---------------------|------------------|------------------------------------------------|
//! | `TOL_KILLING`       | 1e-8             | `killing::is_killing` verdicts                 |
//! | `TOL_CROSS_PATH`    | 1e-6             | jet path vs finite-difference path agreement   |
//! | `TOL_LINK`          | 1e-10            | frame components vs reduced-system residuals   |
//! | `TOL_CLASSIFY`      | 1e-9             | warp condition constancy estimates             |
//! | `CLASSIFY_SAMPLES`  | 41               | sample count for condition estimates           |
//! | `FD_STEP_FIRST`     | 1e-5             | central differences, first order               |
//! | `FD_STEP_SECOND`    | 1e-4             | central differences, second order              |
//! | `ZERO_WARP`         | 1e-14            | warp magnitudes below this are rejected        |
//! | `GRID_COUNTS`       | 5×5×5            | residual sweep grid                            |
//! | `GRID_BOX`          | [−1,1]³          | residual sweep box                             |
//! | `STEPS`             | 400              | RK4 step count                                 |
//! | `SEED`              | 42               | probe and geodesic sampling                    |
//! | `FLOW_TIME`         | 0.5              | flow integration horizon                       |
//! | `GEODESIC_TIME`     | 1.0              | geodesic integration horizon                   |
//! | `PROBES`            | 5                | random tangent pairs per isometry check        |
//! | `GEODESIC_SPEED`    | 0.5              | metric norm of random geodesic velocities      |
//! | `CROSS_CASES`       | 100              | randomized cases per cross-check sweep         |

/// Residual tolerance below which a field counts as Killing.
pub const TOL_KILLING: f64 = 1e-8;

/// Agreement tolerance between exact jets and the finite-difference oracle.
/// Looser than `TOL_KILLING` because truncation error of the central
/// difference dominates.
pub const TOL_CROSS_PATH: f64 = 1e-6;

/// Agreement tolerance between the six frame components and the reduced
/// six-equation system they rescale to.
pub const TOL_LINK: f64 = 1e-10;

/// Spread tolerance for declaring a warp condition estimate constant.
pub const TOL_CLASSIFY: f64 = 1e-9;

/// Number of interval samples behind each condition estimate.
pub const CLASSIFY_SAMPLES: usize = 41;

/// Step for first-order central differences.
pub const FD_STEP_FIRST: f64 = 1e-5;

/// Step for second-order central differences.
pub const FD_STEP_SECOND: f64 = 1e-4;

/// Warp values with absolute value below this are treated as zero and
/// rejected; beyond double-precision meaningfulness.
pub const ZERO_WARP: f64 = 1e-14;

/// Default residual grid resolution per axis.
pub const GRID_COUNTS: [usize; 3] = [5, 5, 5];

/// Default residual grid box.
pub const GRID_BOX: [[f64; 2]; 3] = [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]];

/// Default RK4 step count.
pub const STEPS: usize = 400;

/// Default seed for all pseudorandom sampling.
pub const SEED: u64 = 42;

/// Default flow integration time.
pub const FLOW_TIME: f64 = 0.5;

/// Default geodesic integration time.
pub const GEODESIC_TIME: f64 = 1.0;

/// Default number of random tangent probe pairs for the isometry defect.
pub const PROBES: usize = 5;

/// Metric norm given to randomly drawn geodesic initial velocities. Kept
/// at 0.5 so a unit-time geodesic moves at most 0.5·k3 along x³ and cannot
/// cross a warp singularity that the validity box keeps at distance ≥ 0.5.
pub const GEODESIC_SPEED: f64 = 0.5;

/// Default number of randomized cases in cross-check sweeps.
pub const CROSS_CASES: usize = 100;

/// Isometry-defect bound for a verified flow at the default time and step
/// count; one order above the observed worst case to absorb integrator
/// error growth across families.
pub const TOL_FLOW: f64 = 1e-7;

/// Drift bound for conserved quantities along default geodesics.
pub const TOL_CONSERVED: f64 = 1e-6;
