//! Parametrized hypersurfaces, induced metrics and their null radicals.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::{inner, metric_at, ChartMetric, DomainBox, JetMap, MetricChart};
use crate::jet::Jet;
use crate::sampling::{sample_box, SampleSpec};

/// Relative threshold below which an eigenvalue of the induced metric counts as zero.
pub const KERNEL_THRESHOLD: f64 = 1e-8;

/// A map `u ↦ x(u)` from an `(n+1)`-box into an ambient chart of dimension `n+2`.
#[derive(Clone)]
pub struct Immersion {
    pub name: String,
    pub chart: Arc<MetricChart>,
    pub param_coords: Vec<String>,
    /// Where the map is defined.
    pub param_domain: DomainBox,
    /// Finite sub-box used for random sampling.
    pub sample_box: DomainBox,
    map: JetMap,
}

impl fmt::Debug for Immersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Immersion")
            .field("name", &self.name)
            .field("chart", &self.chart.name())
            .field("param_coords", &self.param_coords)
            .finish()
    }
}

impl Immersion {
    pub fn new(
        name: impl Into<String>,
        chart: Arc<MetricChart>,
        param_coords: Vec<String>,
        param_domain: DomainBox,
        sample_box: DomainBox,
        map: JetMap,
    ) -> Immersion {
        assert_eq!(param_coords.len() + 1, chart.dim());
        assert_eq!(param_domain.dim(), param_coords.len());
        assert_eq!(sample_box.dim(), param_coords.len());
        Immersion {
            name: name.into(),
            chart,
            param_coords,
            param_domain,
            sample_box,
            map,
        }
    }

    pub fn param_dim(&self) -> usize {
        self.param_coords.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.chart.dim()
    }

    /// Evaluate the map on jets.
    pub fn eval(&self, u: &[Jet]) -> Vec<Jet> {
        (self.map)(u)
    }

    pub fn check_param(&self, u: &[f64]) -> Result<()> {
        if self.param_domain.contains(u) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                chart: format!("{} (parameters)", self.name),
                point: u.to_vec(),
            })
        }
    }

    pub fn point(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_param(u)?;
        let x: Vec<f64> = self.eval(&Jet::variables(u, 0)).iter().map(Jet::value).collect();
        self.chart.check_domain(&x)?;
        Ok(x)
    }

    /// Seeded parameter samples from the sampling box.
    pub fn samples(&self, spec: SampleSpec) -> Vec<Vec<f64>> {
        sample_box(&self.sample_box, spec)
    }
}

/// Pushforward frame and induced metric at one parameter point.
#[derive(Clone, Debug)]
pub struct TangentFrame {
    pub u: Vec<f64>,
    pub point: Vec<f64>,
    /// `basis[i]` is the ambient vector `∂x/∂u_i`.
    pub basis: Vec<Vec<f64>>,
    pub induced: DMatrix<f64>,
    /// Radical in parameter components, when the induced metric has a 1-dimensional kernel.
    pub radical_param: Option<Vec<f64>>,
    /// Radical pushed forward to the ambient chart.
    pub radical: Option<Vec<f64>>,
    /// Kernel dimension under [`KERNEL_THRESHOLD`].
    pub kernel_dim: usize,
    /// Smallest |eigenvalue| over largest |eigenvalue| of the induced metric.
    pub null_residual: f64,
}

pub(crate) fn push_forward(basis: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let n = basis[0].len();
    (0..n)
        .map(|a| basis.iter().zip(v).map(|(e, c)| e[a] * c).sum())
        .collect()
}

pub fn frame_at(imm: &Immersion, u: &[f64]) -> Result<TangentFrame> {
    imm.check_param(u)?;
    let m = imm.param_dim();
    let n = imm.ambient_dim();
    let x = imm.eval(&Jet::variables(u, 1));
    let point: Vec<f64> = x.iter().map(Jet::value).collect();
    let g = metric_at(imm.chart.as_ref(), &point)?;
    let basis: Vec<Vec<f64>> = (0..m)
        .map(|i| x.iter().map(|c| c.partial(&[i])).collect())
        .collect();

    let dx = DMatrix::from_fn(n, m, |a, i| basis[i][a]);
    let sv = dx.singular_values();
    let smax = sv.max();
    let rank = sv.iter().filter(|&&s| s > 1e-10 * smax).count();
    if rank < m || smax == 0.0 {
        return Err(Error::RankDeficient {
            point: u.to_vec(),
            rank,
            expected: m,
        });
    }

    let induced = DMatrix::from_fn(m, m, |i, j| inner(&g, &basis[i], &basis[j]));
    let eig = SymmetricEigen::new(induced.clone());
    let lmax = eig.eigenvalues.amax();
    let (kmin, lmin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, l)| (k, l.abs()))
        .fold((0, f64::INFINITY), |acc, (k, l)| if l < acc.1 { (k, l) } else { acc });
    let kernel_dim = eig
        .eigenvalues
        .iter()
        .filter(|l| l.abs() <= KERNEL_THRESHOLD * lmax)
        .count();
    let (radical_param, radical) = if kernel_dim == 1 {
        let v: Vec<f64> = eig.eigenvectors.column(kmin).iter().copied().collect();
        let amb = push_forward(&basis, &v);
        (Some(v), Some(amb))
    } else {
        (None, None)
    };
    Ok(TangentFrame {
        u: u.to_vec(),
        point,
        basis,
        induced,
        radical_param,
        radical,
        kernel_dim,
        null_residual: if lmax > 0.0 { lmin / lmax } else { 0.0 },
    })
}

/// Ambient generator of the radical; errors unless the kernel is exactly one-dimensional.
pub fn radical_at(imm: &Immersion, u: &[f64]) -> Result<Vec<f64>> {
    let f = frame_at(imm, u)?;
    match f.kernel_dim {
        1 => Ok(f.radical.expect("kernel of dimension one")),
        0 => Err(Error::NotNull {
            point: u.to_vec(),
            residual: f.null_residual,
        }),
        d => Err(Error::KernelTooLarge {
            point: u.to_vec(),
            dim: d,
        }),
    }
}

#[derive(Clone, Debug)]
pub struct NullScanReport {
    pub samples: usize,
    pub max_residual: f64,
    pub argmax: usize,
    pub max_kernel_dim: usize,
    /// `(sample index, message)` for points where the frame could not be built.
    pub failures: Vec<(usize, String)>,
    pub tolerance: f64,
    pub is_null: bool,
}

/// Scan seeded samples for degeneracy of the induced metric.
pub fn null_scan(imm: &Immersion, spec: SampleSpec, tolerance: f64) -> NullScanReport {
    let pts = imm.samples(spec);
    let mut max_residual = 0.0f64;
    let mut argmax = 0;
    let mut max_kernel_dim = 0;
    let mut failures = Vec::new();
    let mut all_one = true;
    for (k, u) in pts.iter().enumerate() {
        match frame_at(imm, u) {
            Ok(f) => {
                if f.null_residual > max_residual {
                    max_residual = f.null_residual;
                    argmax = k;
                }
                max_kernel_dim = max_kernel_dim.max(f.kernel_dim);
                all_one &= f.kernel_dim == 1;
            }
            Err(e) => failures.push((k, e.to_string())),
        }
    }
    NullScanReport {
        samples: pts.len(),
        max_residual,
        argmax,
        max_kernel_dim,
        is_null: failures.is_empty() && all_one && max_residual < tolerance,
        failures,
        tolerance,
    }
}

/// Run [`null_scan`] and turn a failure into an error naming the worst sample.
pub fn ensure_null(imm: &Immersion, spec: SampleSpec, tolerance: f64) -> Result<NullScanReport> {
    let scan = null_scan(imm, spec, tolerance);
    if scan.is_null {
        return Ok(scan);
    }
    let pts = imm.samples(spec);
    let where_ = match scan.failures.first() {
        Some((k, msg)) => format!("sample {k} at {:?}: {msg}", pts[*k]),
        None => format!(
            "sample {} at {:?}: residual {:e}, kernel dimension up to {}",
            scan.argmax, pts[scan.argmax], scan.max_residual, scan.max_kernel_dim
        ),
    };
    Err(Error::InvalidSpec(format!("hypersurface `{}` failed the null scan, {where_}", imm.name)))
}
